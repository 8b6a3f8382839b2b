//! Decision procedure for intuitionistic propositional derivability.
//!
//! Root-first search in a contraction-free sequent calculus: invertible rules
//! are applied eagerly, and implications on the left are split by the shape of
//! their antecedent. Every rule makes the sequent smaller in a well-founded
//! multiset order, so the search terminates without loop checks. Antecedents
//! are kept as sets; sequents are memoized.

use std::collections::{BTreeSet, HashMap};

use crate::corpus;
use crate::formula::{Formula, VarContext};
use crate::kripke::{Color, KripkeModel};

type Id = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Bot,
    Top,
    Var(usize),
    And(Id, Id),
    Or(Id, Id),
    Impl(Id, Id),
}

#[derive(Default)]
struct Prover {
    nodes: Vec<Node>,
    ids: HashMap<Node, Id>,
    memo: HashMap<(Vec<Id>, Id), bool>,
}

impl Prover {
    fn intern(&mut self, node: Node) -> Id {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Id;
        self.nodes.push(node);
        self.ids.insert(node, id);
        id
    }

    fn add(&mut self, f: &Formula) -> Id {
        let node = match f {
            Formula::Bot => Node::Bot,
            Formula::Top => Node::Top,
            Formula::Var(k) => Node::Var(*k),
            Formula::And(a, b) => Node::And(self.add(a), self.add(b)),
            Formula::Or(a, b) => Node::Or(self.add(a), self.add(b)),
            Formula::Impl(a, b) => Node::Impl(self.add(a), self.add(b)),
        };
        self.intern(node)
    }

    fn prove(&mut self, gamma: BTreeSet<Id>, goal: Id) -> bool {
        let key = (gamma.iter().copied().collect::<Vec<_>>(), goal);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let answer = self.search(gamma, goal);
        self.memo.insert(key, answer);
        answer
    }

    fn search(&mut self, mut gamma: BTreeSet<Id>, goal: Id) -> bool {
        // Invertible left rules, to saturation.
        loop {
            let mut step = None;
            for &h in &gamma {
                let act = match self.nodes[h as usize] {
                    Node::Bot => return true,
                    Node::Top => Some(vec![]),
                    Node::And(a, b) => Some(vec![a, b]),
                    Node::Or(a, b) => {
                        let mut left = gamma.clone();
                        left.remove(&h);
                        let mut right = left.clone();
                        left.insert(a);
                        right.insert(b);
                        return self.prove(left, goal) && self.prove(right, goal);
                    }
                    Node::Impl(a, b) => match self.nodes[a as usize] {
                        Node::Var(_) if gamma.contains(&a) => Some(vec![b]),
                        Node::Var(_) | Node::Impl(..) => None,
                        Node::Bot => Some(vec![]),
                        Node::Top => Some(vec![b]),
                        Node::And(c, d) => {
                            let inner = self.intern(Node::Impl(d, b));
                            Some(vec![self.intern(Node::Impl(c, inner))])
                        }
                        Node::Or(c, d) => {
                            let left = self.intern(Node::Impl(c, b));
                            let right = self.intern(Node::Impl(d, b));
                            Some(vec![left, right])
                        }
                    },
                    Node::Var(_) => None,
                };
                if let Some(add) = act {
                    step = Some((h, add));
                    break;
                }
            }
            match step {
                Some((h, add)) => {
                    gamma.remove(&h);
                    gamma.extend(add);
                }
                None => break,
            }
        }

        // Invertible right rules.
        if gamma.contains(&goal) {
            return true;
        }
        match self.nodes[goal as usize] {
            Node::Top => return true,
            Node::And(a, b) => {
                return self.prove(gamma.clone(), a) && self.prove(gamma, b);
            }
            Node::Impl(a, b) => {
                let mut g = gamma;
                g.insert(a);
                return self.prove(g, b);
            }
            _ => {}
        }

        // Non-invertible choices.
        if let Node::Or(a, b) = self.nodes[goal as usize] {
            if self.prove(gamma.clone(), a) || self.prove(gamma.clone(), b) {
                return true;
            }
        }
        let nested: Vec<(Id, Id, Id, Id)> = gamma
            .iter()
            .filter_map(|&h| match self.nodes[h as usize] {
                Node::Impl(a, b) => match self.nodes[a as usize] {
                    Node::Impl(c, d) => Some((h, c, d, b)),
                    _ => None,
                },
                _ => None,
            })
            .collect();
        for (h, c, d, b) in nested {
            let mut rest = gamma.clone();
            rest.remove(&h);
            let db = self.intern(Node::Impl(d, b));
            let cd = self.intern(Node::Impl(c, d));
            let mut first = rest.clone();
            first.insert(db);
            if self.prove(first, cd) {
                let mut second = rest;
                second.insert(b);
                if self.prove(second, goal) {
                    return true;
                }
            }
        }
        false
    }
}

/// Whether `goal` is derivable from `assumptions` in intuitionistic logic.
pub fn proves(assumptions: &[Formula], goal: &Formula) -> bool {
    let mut p = Prover::default();
    let gamma = assumptions.iter().map(|f| p.add(f)).collect();
    let g = p.add(goal);
    p.prove(gamma, g)
}

/// Whether `⊢ f ↔ g`.
pub fn equivalent(f: &Formula, g: &Formula) -> bool {
    proves(std::slice::from_ref(f), g) && proves(std::slice::from_ref(g), f)
}

/// A rooted model with at most `max_worlds` worlds refuting `f` at its root,
/// found by trying every persistent valuation on every rooted frame in
/// increasing size. Variables of `f` above the context size are ignored by
/// construction: the context is sized to `f`.
pub fn semantic_countermodel(f: &Formula, max_worlds: usize) -> Option<KripkeModel> {
    let n = f.max_var().map_or(1, |k| k + 1);
    let ctx = VarContext::standard(n);
    for frame in corpus::rooted_frames_upto(max_worlds) {
        let upsets: Vec<u64> = frame
            .upsets()
            .into_iter()
            .map(|u| {
                u.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .fold(0u64, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let root = frame.root().expect("rooted frames");
        let mut choice = vec![0usize; n];
        loop {
            let colors: Vec<Color> = (0..frame.len())
                .map(|w| {
                    let bits = (0..n)
                        .filter(|&k| upsets[choice[k]] >> w & 1 == 1)
                        .fold(0u64, |m, k| m | 1 << k);
                    Color::new(bits, n)
                })
                .collect();
            let model = KripkeModel::from_colors(frame.clone(), ctx.clone(), colors)
                .expect("upsets give persistent valuations");
            if !model.force(root, f).expect("formula fits the context") {
                return Some(model);
            }
            // Next valuation, odometer style.
            let mut k = 0;
            while k < n {
                choice[k] += 1;
                if choice[k] < upsets.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s, &VarContext::standard(3)).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        assert!(proves(&[], &f("p1 -> p1")));
        assert!(!proves(&[], &f("p1 | ~p1")));
        assert!(proves(&[], &f("((p1 & p2) -> p3) -> p1 -> p2 -> p3")));
        assert!(equivalent(&f("(p1 & p2) -> p3"), &f("p1 -> p2 -> p3")));
        assert!(equivalent(&Formula::Top, &f("false -> false")));
        assert!(!equivalent(&f("p1"), &f("~~p1")));
    }

    #[test]
    fn classical_but_not_intuitionistic() {
        assert!(!proves(&[], &f("((p1 -> p2) -> p1) -> p1")));
        assert!(!proves(&[], &f("~~p1 -> p1")));
        assert!(proves(&[], &f("~~~p1 -> ~p1")));
        assert!(proves(&[], &f("~~(p1 | ~p1)")));
        assert!(!proves(&[], &f("(p1 -> p2) | (p2 -> p1)")));
        assert!(proves(
            &[f("p1 | p2"), f("p1 -> p3"), f("p2 -> p3")],
            &f("p3")
        ));
    }

    #[test]
    fn excluded_middle_countermodel() {
        let m = semantic_countermodel(&f("p1 | ~p1"), 4).unwrap();
        assert_eq!(m.len(), 2);
        assert!(semantic_countermodel(&f("p1 -> p1"), 4).is_none());
    }
}
