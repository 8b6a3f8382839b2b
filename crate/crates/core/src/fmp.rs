//! Color-preserving reductions of finite models, the frame normal form of a
//! formula and a bounded search for finite countermodels.

use sha2::{Digest, Sha256};

use crate::corpus;
use crate::error::{Error, Result};
use crate::formula::{Formula, VarContext};
use crate::kripke::{unravel, Color, KripkeFrame, KripkeModel, Tree};
use crate::morphisms::NodeMap;

/// Largest frame size for exhaustive frame-validity checks.
pub const MAX_EXHAUSTIVE_WORLDS: usize = 4;

/// Checks that `sub` is a submodel of `m` (matched by world id) in which every
/// color visible above a kept world in `m` is also visible among kept worlds.
pub fn is_color_preserving_submodel(sub: &KripkeModel, m: &KripkeModel) -> Result<bool> {
    let embed = embedding(sub, m)?;
    let kept: Vec<bool> = {
        let mut k = vec![false; m.len()];
        for &x in &embed {
            k[x] = true;
        }
        k
    };
    Ok(embed.iter().all(|&w| {
        m.frame().up(w).iter().all(|&u| {
            m.frame()
                .up(w)
                .iter()
                .any(|&v| kept[v] && m.color(v) == m.color(u))
        })
    }))
}

fn embedding(sub: &KripkeModel, m: &KripkeModel) -> Result<Vec<usize>> {
    let not_sub = |reason: String| Error::NotASubmodel {
        sub: sub.frame().ids().join(","),
        reason,
    };
    if sub.ctx().len() != m.ctx().len() {
        return Err(not_sub("variable contexts differ".into()));
    }
    let embed = (0..sub.len())
        .map(|w| {
            m.world(sub.id(w))
                .map_err(|_| not_sub(format!("`{}` is not a world of the model", sub.id(w))))
        })
        .collect::<Result<Vec<_>>>()?;
    for a in 0..sub.len() {
        if sub.color(a) != m.color(embed[a]) {
            return Err(not_sub(format!("color of `{}` differs", sub.id(a))));
        }
        for b in 0..sub.len() {
            if sub.frame().leq(a, b) != m.frame().leq(embed[a], embed[b]) {
                return Err(not_sub(format!(
                    "order between `{}` and `{}` differs",
                    sub.id(a),
                    sub.id(b)
                )));
            }
        }
    }
    Ok(embed)
}

/// Nodes kept by the depth reduction, and for every node the kept node
/// starting its color run.
fn depth_plan(t: &Tree) -> (Vec<bool>, Vec<usize>) {
    let mut keep = vec![false; t.len()];
    let mut run_start = vec![0; t.len()];
    for w in t.preorder() {
        match t.parent(w) {
            Some(p) if t.color(p) == t.color(w) => run_start[w] = run_start[p],
            _ => {
                keep[w] = true;
                run_start[w] = w;
            }
        }
    }
    (keep, run_start)
}

/// Keeps the root and every node whose color is strictly above its parent's.
pub fn depth_reduce(t: &Tree) -> Tree {
    let (keep, _) = depth_plan(t);
    t.restrict(&keep).expect("the root is kept")
}

/// Nodes kept by the width reduction and, for every node, the kept node its
/// subtree is matched onto.
fn width_plan(t: &Tree) -> (Vec<bool>, Vec<usize>) {
    use crate::kripke::CanonicalCode;
    let mut code: Vec<Option<CanonicalCode>> = vec![None; t.len()];
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); t.len()];
    let order = t.preorder();
    for &w in order.iter().rev() {
        let mut kids: Vec<usize> = t.children(w).to_vec();
        kids.sort_by(|&a, &b| code[a].cmp(&code[b]).then_with(|| t.id(a).cmp(t.id(b))));
        kids.dedup_by(|b, a| code[*a] == code[*b]);
        let c = CanonicalCode::new(
            t.color(w),
            kids.iter()
                .map(|&k| code[k].clone().expect("bottom-up"))
                .collect(),
        );
        code[w] = Some(c);
        chosen[w] = kids;
    }
    let mut keep = vec![false; t.len()];
    let mut image = vec![usize::MAX; t.len()];
    let mut stack = vec![(t.root(), t.root())];
    while let Some((x, y)) = stack.pop() {
        image[x] = y;
        if x == y {
            keep[x] = true;
        }
        for &cx in t.children(x) {
            let cy = *chosen[y]
                .iter()
                .find(|&&cy| code[cy] == code[cx])
                .expect("reduced codes match");
            stack.push((cx, cy));
        }
    }
    (keep, image)
}

/// Bottom-up, keeps one child per isomorphism type of reduced subtree; among
/// equals the child with the least id stays.
pub fn width_reduce(t: &Tree) -> Tree {
    let (keep, _) = width_plan(t);
    t.restrict(&keep).expect("the root is kept")
}

fn rank(keep: &[bool]) -> Vec<usize> {
    let mut r = vec![usize::MAX; keep.len()];
    let mut next = 0;
    for (i, &k) in keep.iter().enumerate() {
        if k {
            r[i] = next;
            next += 1;
        }
    }
    r
}

/// A finite color-preserving submodel of `m` with the same root. For
/// tree-like `m` the monotonic surjection from `m` onto the result is
/// returned too.
pub fn reduce(m: &KripkeModel) -> Result<(KripkeModel, Option<NodeMap>)> {
    m.root().ok_or(Error::NotRooted)?;
    if m.frame().is_tree_like() {
        let t = Tree::from_model(m.clone())?;
        let (keep1, run_start) = depth_plan(&t);
        let d = t.restrict(&keep1)?;
        let r1 = rank(&keep1);
        let (keep2, image) = width_plan(&d);
        let w = d.restrict(&keep2)?;
        let r2 = rank(&keep2);
        let map = NodeMap::new((0..t.len()).map(|x| r2[image[r1[run_start[x]]]]).collect());
        return Ok((w.into_model(), Some(map)));
    }
    let u = unravel(m)?;
    let d = depth_reduce(&u);
    let w = width_reduce(&d);
    let alpha = crate::kripke::natural_map(&u, m)?;
    let mut worlds = (0..w.len())
        .map(|x| Ok(alpha.get(u.model().world(w.id(x))?)))
        .collect::<Result<Vec<usize>>>()?;
    worlds.sort_unstable();
    worlds.dedup();
    Ok((m.submodel(&worlds)?, None))
}

/// The frame normal form of a formula: a fresh variable `s_ψ` for every
/// compound subformula `ψ`, the conjunction `plus` of the defining
/// biconditionals, and `prime = plus → s_f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameNormalForm {
    pub plus: Formula,
    pub prime: Formula,
    pub ctx: VarContext,
    /// Fresh variables with their defining biconditional, children first.
    pub definitions: Vec<(usize, Formula)>,
    /// Index of the first fresh variable in `ctx`.
    pub base_len: usize,
}

fn fresh_name(printed: &str, ctx: &VarContext) -> String {
    let digest = Sha256::digest(printed.as_bytes());
    let hex: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    let base = format!("s_{hex}");
    let mut name = base.clone();
    let mut k = 1;
    while ctx.contains(&name) {
        name = format!("{base}_{k}");
        k += 1;
    }
    name
}

pub fn frame_normal_form(f: &Formula, ctx: &VarContext) -> Result<FrameNormalForm> {
    f.check_context(ctx)?;
    let mut ext = ctx.clone();
    let mut names: std::collections::HashMap<Formula, usize> = Default::default();
    let mut definitions = Vec::new();
    let top = fnf_rec(f, ctx, &mut ext, &mut names, &mut definitions)?;
    let plus = Formula::conj(definitions.iter().map(|(_, d)| d.clone()));
    let prime = Formula::implies(plus.clone(), top);
    Ok(FrameNormalForm {
        plus,
        prime,
        ctx: ext,
        definitions,
        base_len: ctx.len(),
    })
}

/// Names every compound subformula of `f` and returns the name of `f` itself.
fn fnf_rec(
    f: &Formula,
    base: &VarContext,
    ext: &mut VarContext,
    names: &mut std::collections::HashMap<Formula, usize>,
    defs: &mut Vec<(usize, Formula)>,
) -> Result<Formula> {
    let (a, b, join): (_, _, fn(Formula, Formula) -> Formula) = match f {
        Formula::Bot | Formula::Top | Formula::Var(_) => return Ok(f.clone()),
        Formula::And(a, b) => (a, b, Formula::and),
        Formula::Or(a, b) => (a, b, Formula::or),
        Formula::Impl(a, b) => (a, b, Formula::implies),
    };
    let s_a = fnf_rec(a, base, ext, names, defs)?;
    let s_b = fnf_rec(b, base, ext, names, defs)?;
    if let Some(&v) = names.get(f) {
        return Ok(Formula::var(v));
    }
    let var = ext.push(fresh_name(&f.print(base), ext))?;
    names.insert(f.clone(), var);
    let s = Formula::var(var);
    defs.push((var, Formula::iff(join(s_a, s_b), s.clone())));
    Ok(s)
}

/// Truth sets as bitmasks over the worlds of a frame with at most 64 worlds.
pub struct MaskEval {
    up: Vec<u64>,
    all: u64,
}

impl MaskEval {
    pub fn new(frame: &KripkeFrame) -> Self {
        assert!(frame.len() <= 64, "mask evaluation needs at most 64 worlds");
        let up = (0..frame.len())
            .map(|w| frame.up(w).iter().fold(0u64, |m, &u| m | 1 << u))
            .collect();
        let all = if frame.len() == 64 {
            u64::MAX
        } else {
            (1u64 << frame.len()) - 1
        };
        MaskEval { up, all }
    }

    pub fn all(&self) -> u64 {
        self.all
    }

    /// Worlds forcing `f` when variable `k` holds on `val[k]` (upsets).
    pub fn eval(&self, f: &Formula, val: &[u64]) -> u64 {
        match f {
            Formula::Bot => 0,
            Formula::Top => self.all,
            Formula::Var(k) => val[*k],
            Formula::And(a, b) => self.eval(a, val) & self.eval(b, val),
            Formula::Or(a, b) => self.eval(a, val) | self.eval(b, val),
            Formula::Impl(a, b) => {
                let ta = self.eval(a, val);
                let tb = self.eval(b, val);
                let bad = ta & !tb;
                (0..self.up.len())
                    .filter(|&w| self.up[w] & bad == 0)
                    .fold(0, |m, w| m | 1 << w)
            }
        }
    }
}

fn upset_masks(frame: &KripkeFrame) -> Vec<u64> {
    frame
        .upsets()
        .into_iter()
        .map(|u| {
            u.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect()
}

/// Calls `visit` with every assignment of upsets to `n` variables; stops
/// when it returns false.
fn each_valuation(upsets: &[u64], n: usize, visit: &mut dyn FnMut(&[u64]) -> bool) {
    let mut val = vec![0u64; n];
    let mut choice = vec![0usize; n];
    loop {
        for k in 0..n {
            val[k] = upsets[choice[k]];
        }
        if !visit(&val) {
            return;
        }
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
            return;
        }
    }
}

/// Whether `f` (over `n` variables) holds on `frame` under every valuation.
pub fn frame_validates(frame: &KripkeFrame, f: &Formula, n: usize) -> bool {
    let ev = MaskEval::new(frame);
    let upsets = upset_masks(frame);
    let mut valid = true;
    each_valuation(&upsets, n, &mut |val| {
        valid = ev.eval(f, val) == ev.all();
        valid
    });
    valid
}

/// Frame validity of `fnf.prime`. Fresh variables are assigned children
/// first; a branch is cut as soon as the defining biconditionals chosen so
/// far hold nowhere, since `prime` is then true for all its extensions.
pub fn frame_validates_prime(frame: &KripkeFrame, fnf: &FrameNormalForm) -> bool {
    let ev = MaskEval::new(frame);
    let upsets = upset_masks(frame);
    let goal = match &fnf.prime {
        Formula::Impl(_, s) => (**s).clone(),
        _ => unreachable!("prime is an implication"),
    };
    let mut valid = true;
    each_valuation(&upsets, fnf.base_len, &mut |base| {
        let mut val = vec![0u64; fnf.ctx.len()];
        val[..base.len()].copy_from_slice(base);
        valid = prime_rec(&ev, &upsets, fnf, &goal, 0, ev.all(), &mut val);
        valid
    });
    valid
}

fn prime_rec(
    ev: &MaskEval,
    upsets: &[u64],
    fnf: &FrameNormalForm,
    goal: &Formula,
    i: usize,
    plus: u64,
    val: &mut Vec<u64>,
) -> bool {
    if plus == 0 {
        return true;
    }
    if i == fnf.definitions.len() {
        // `plus → goal` holds everywhere iff no world forces plus but not goal.
        return plus & !ev.eval(goal, val) == 0;
    }
    let (var, def) = &fnf.definitions[i];
    for &u in upsets {
        val[*var] = u;
        let next = plus & ev.eval(def, val);
        if !prime_rec(ev, upsets, fnf, goal, i + 1, next, val) {
            return false;
        }
    }
    true
}

/// A model on a rooted frame with at most `max_worlds` worlds that validates
/// every axiom under all valuations and refutes `goal` at its root.
pub fn find_countermodel(
    axioms: &[Formula],
    goal: &Formula,
    max_worlds: usize,
) -> Result<Option<KripkeModel>> {
    if max_worlds > MAX_EXHAUSTIVE_WORLDS {
        return Err(Error::BoundExceeded(format!(
            "exhaustive search supports at most {MAX_EXHAUSTIVE_WORLDS} worlds"
        )));
    }
    for a in axioms {
        if !a.is_nnil() {
            return Err(Error::NotNnil(
                a.print(&VarContext::standard(a.max_var().map_or(0, |k| k + 1))),
            ));
        }
    }
    let n = axioms
        .iter()
        .chain(std::iter::once(goal))
        .filter_map(Formula::max_var)
        .max()
        .map_or(1, |k| k + 1);
    let ctx = VarContext::standard(n);
    for frame in corpus::rooted_frames_upto(max_worlds) {
        if !axioms.iter().all(|a| frame_validates(&frame, a, n)) {
            continue;
        }
        let ev = MaskEval::new(&frame);
        let root = frame.root().expect("rooted");
        let mut found = None;
        each_valuation(&upset_masks(&frame), n, &mut |val| {
            if ev.eval(goal, val) >> root & 1 == 0 {
                found = Some(val.to_vec());
                false
            } else {
                true
            }
        });
        if let Some(val) = found {
            let colors = (0..frame.len())
                .map(|w| {
                    let bits = (0..n)
                        .filter(|&k| val[k] >> w & 1 == 1)
                        .fold(0u64, |m, k| m | 1 << k);
                    Color::new(bits, n)
                })
                .collect();
            return Ok(Some(KripkeModel::from_colors(frame, ctx, colors)?));
        }
    }
    Ok(None)
}
