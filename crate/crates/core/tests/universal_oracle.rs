//! The universal model against independent computations over reduced trees.

use std::collections::{BTreeSet, HashMap};

use nnil_core::beta::{beta_plus_node, nnil_equivalent};
use nnil_core::morphisms::{equiv, find_all_monotonic};
use nnil_core::universal::{canonical_code, canonical_tree, generate, TreeOrder};
use nnil_core::{prover, random, CanonicalCode, Color, Formula, Tree, VarContext};

/// Colored trees whose chains strictly increase in color and whose sibling
/// subtrees are pairwise distinct.
fn reduced_trees(n: usize) -> Vec<CanonicalCode> {
    fn rooted_at(
        c: Color,
        n: usize,
        memo: &mut HashMap<u64, Vec<CanonicalCode>>,
    ) -> Vec<CanonicalCode> {
        if let Some(v) = memo.get(&c.bits()) {
            return v.clone();
        }
        let pool: Vec<CanonicalCode> = Color::all(n)
            .filter(|&d| c.lt(d))
            .flat_map(|d| rooted_at(d, n, memo))
            .collect();
        let out: Vec<CanonicalCode> = (0u64..1 << pool.len())
            .map(|mask| {
                let kids = (0..pool.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| pool[i].clone())
                    .collect();
                CanonicalCode::new(c, kids)
            })
            .collect();
        memo.insert(c.bits(), out.clone());
        out
    }
    let mut memo = HashMap::new();
    Color::all(n)
        .flat_map(|c| rooted_at(c, n, &mut memo))
        .collect()
}

/// Whether the tree `b` maps monotonically into the tree `a` with its root
/// sent to the root of `a`; children may land anywhere above.
fn embeds_at_root(b: &CanonicalCode, a: &CanonicalCode) -> bool {
    b.color_bits() == a.color_bits() && b.children().iter().all(|c| embeds_anywhere(c, a))
}

fn embeds_anywhere(b: &CanonicalCode, a: &CanonicalCode) -> bool {
    embeds_at_root(b, a) || a.children().iter().any(|c| embeds_anywhere(b, c))
}

/// `a ≤ b`: `b` maps monotonically into `a`.
fn tree_leq(a: &CanonicalCode, b: &CanonicalCode) -> bool {
    embeds_anywhere(b, a)
}

fn equivalence_classes(trees: &[CanonicalCode]) -> usize {
    let mut reps: Vec<&CanonicalCode> = Vec::new();
    for t in trees {
        if !reps.iter().any(|r| tree_leq(r, t) && tree_leq(t, r)) {
            reps.push(t);
        }
    }
    reps.len()
}

#[test]
fn reduced_tree_counts() {
    assert_eq!(reduced_trees(1).len(), 3);
    assert_eq!(reduced_trees(2).len(), 37);
}

#[test]
fn node_count_matches_equivalence_classes_of_reduced_trees() {
    for n in 1..=2 {
        let un = generate(n).unwrap();
        assert_eq!(un.len(), equivalence_classes(&reduced_trees(n)), "n = {n}");
    }
}

#[test]
fn generated_order_matches_direct_embedding() {
    let un = generate(2).unwrap();
    for a in 0..un.len() {
        for b in 0..un.len() {
            assert_eq!(un.leq(a, b), tree_leq(un.code(a), un.code(b)));
        }
    }
}

/// Truth vectors of NNIL formulas over `trees`, closed under the connectives
/// and under `p → φ` for atoms `p`. Returns the number of distinct vectors.
fn nnil_class_count(n: usize) -> usize {
    let trees = reduced_trees(n);
    let index: HashMap<&CanonicalCode, usize> =
        trees.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let subtrees: Vec<Vec<usize>> = trees
        .iter()
        .map(|t| {
            let mut all = Vec::new();
            let mut stack = vec![t];
            while let Some(x) = stack.pop() {
                all.push(index[x]);
                stack.extend(x.children());
            }
            all
        })
        .collect();
    let len = trees.len();
    let atom =
        |k: usize| -> Vec<bool> { trees.iter().map(|t| t.color_bits() >> k & 1 == 1).collect() };
    let mut classes: BTreeSet<Vec<bool>> = BTreeSet::new();
    classes.insert(vec![false; len]);
    classes.insert(vec![true; len]);
    for k in 0..n {
        classes.insert(atom(k));
    }
    loop {
        let current: Vec<Vec<bool>> = classes.iter().cloned().collect();
        let before = classes.len();
        for a in &current {
            for b in &current {
                classes.insert(a.iter().zip(b).map(|(x, y)| *x && *y).collect());
                classes.insert(a.iter().zip(b).map(|(x, y)| *x || *y).collect());
            }
            for k in 0..n {
                let p = atom(k);
                let imp = (0..len)
                    .map(|t| subtrees[t].iter().all(|&u| !p[u] || a[u]))
                    .collect();
                classes.insert(imp);
            }
        }
        if classes.len() == before {
            return classes.len();
        }
    }
}

#[test]
fn class_counts_match_closure_of_truth_vectors() {
    assert_eq!(nnil_class_count(1), 5);
    assert_eq!(
        nnil_class_count(2),
        nnil_core::universal::count_nnil_classes(2).unwrap()
    );
}

#[test]
fn only_identity_self_maps_and_no_equivalent_nodes() {
    let un = generate(2).unwrap();
    for w in 0..un.len() {
        let t = un.tree(w).into_model();
        let maps = find_all_monotonic(&t, &t, 1000);
        assert_eq!(maps.len(), 1);
        assert!(maps[0].is_identity());
    }
    for a in 0..un.len() {
        for b in a + 1..un.len() {
            assert!(!equiv(un.tree(a).model(), un.tree(b).model()));
        }
    }
}

#[test]
fn nodes_and_their_trees_agree_on_nnil_formulas() {
    let un = generate(2).unwrap();
    let mut sample: Vec<Formula> = (0..un.len()).map(|w| un.beta(w).clone()).collect();
    sample.extend((0..un.len()).map(|w| beta_plus_node(&un, w).unwrap()));
    let mut rng = random::rng(43);
    sample.extend(
        (0..100).map(|_| {
            nnil_core::to_nnil_normal_form(&random::nnil_formula(&mut rng, 2, 3)).unwrap()
        }),
    );
    let model = un.as_model();
    for f in &sample {
        let on_model = model.truth_set(f).unwrap();
        for (w, &expected) in on_model.iter().enumerate() {
            let t = un.tree(w);
            assert_eq!(t.model().force(t.root(), f).unwrap(), expected);
        }
    }
}

#[test]
fn canonical_trees_are_unique_representatives() {
    let un = generate(2).unwrap();
    let order = TreeOrder::new(VarContext::standard(2));
    let mut rng = random::rng(44);
    let trees: Vec<Tree> = (0..60).map(|_| random::tree(&mut rng, 2, 8)).collect();
    let codes: Vec<CanonicalCode> = trees.iter().map(|t| canonical_code(t, &order)).collect();
    for (t, c) in trees.iter().zip(&codes) {
        assert!(un.node_of(c).is_some());
        assert_eq!(canonical_tree(t).code(), c);
    }
    for i in 0..trees.len() {
        for j in 0..trees.len() {
            let same = codes[i] == codes[j];
            assert_eq!(same, equiv(trees[i].model(), trees[j].model()));
            assert_eq!(
                same,
                nnil_equivalent(
                    trees[i].model(),
                    trees[i].root(),
                    trees[j].model(),
                    trees[j].root()
                )
                .unwrap()
            );
        }
    }
}

#[test]
fn beta_plus_separates_non_entailments() {
    // For node-defining formulas φ, ψ with ⊬ φ → ψ, some node forces φ but
    // not ψ; for provable implications no such node exists.
    for n in 1..=2 {
        let un = generate(n).unwrap();
        let model = un.as_model();
        let formulas: Vec<Formula> = (0..un.len())
            .map(|w| beta_plus_node(&un, w).unwrap())
            .collect();
        let sets: Vec<Vec<bool>> = formulas
            .iter()
            .map(|f| model.truth_set(f).unwrap())
            .collect();
        let pairs = (0..un.len()).flat_map(|a| (0..un.len()).map(move |b| (a, b)));
        for (a, b) in pairs {
            let provable = prover::proves(&[formulas[a].clone()], &formulas[b]);
            let separated = (0..un.len()).any(|v| sets[a][v] && !sets[b][v]);
            assert_eq!(provable, !separated, "n = {n}, nodes {a} {b}");
        }
    }
}
