//! The finite poset of canonical colored trees over `n` variables, ordered by
//! monotonic-map existence, together with canonical reduction of arbitrary
//! finite trees onto its nodes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::beta;
use crate::error::{Error, Result};
use crate::formula::{Formula, VarContext};
use crate::kripke::{unravel, CanonicalCode, Color, KripkeFrame, KripkeModel, Tree};
use crate::morphisms::find_monotonic;

/// Exhaustive work on the universal model is supported up to this many
/// variables.
pub const MAX_EXHAUSTIVE_VARS: usize = 2;

/// Limits for [`generate_with`].
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_nodes: usize,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 10_000,
            max_time: Duration::from_secs(60),
        }
    }
}

/// Decides `a ≤ b` between trees given by code (`b` maps monotonically into
/// `a`), caching answers by code pair.
#[derive(Debug)]
pub struct TreeOrder {
    ctx: VarContext,
    cache: RefCell<HashMap<(CanonicalCode, CanonicalCode), bool>>,
    trees: RefCell<HashMap<CanonicalCode, KripkeModel>>,
}

impl TreeOrder {
    pub fn new(ctx: VarContext) -> Self {
        TreeOrder {
            ctx,
            cache: RefCell::default(),
            trees: RefCell::default(),
        }
    }

    fn model(&self, code: &CanonicalCode) -> KripkeModel {
        self.trees
            .borrow_mut()
            .entry(code.clone())
            .or_insert_with(|| code.to_tree(&self.ctx).into_model())
            .clone()
    }

    pub fn leq(&self, a: &CanonicalCode, b: &CanonicalCode) -> bool {
        if a == b {
            return true;
        }
        let key = (a.clone(), b.clone());
        if let Some(&hit) = self.cache.borrow().get(&key) {
            return hit;
        }
        let answer = find_monotonic(&self.model(b), &self.model(a)).is_some();
        self.cache.borrow_mut().insert(key, answer);
        answer
    }
}

/// The universal model: canonical trees, their layers and the `≤` order.
/// Node `i` is `codes()[i]`; nodes are listed layer by layer, each layer in
/// code order.
#[derive(Debug, Clone)]
pub struct UniversalModel {
    ctx: VarContext,
    codes: Vec<CanonicalCode>,
    layers: Vec<usize>,
    index: HashMap<CanonicalCode, usize>,
    model: KripkeModel,
    betas: Vec<Formula>,
}

impl UniversalModel {
    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.len()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[CanonicalCode] {
        &self.codes
    }

    pub fn code(&self, node: usize) -> &CanonicalCode {
        &self.codes[node]
    }

    pub fn tree(&self, node: usize) -> Tree {
        self.codes[node].to_tree(&self.ctx)
    }

    /// 1-based layer of a node; equals the depth of its tree.
    pub fn layer(&self, node: usize) -> usize {
        self.layers[node]
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let top = self.layers.iter().copied().max().unwrap_or(0);
        (1..=top)
            .map(|m| self.layers.iter().filter(|&&l| l == m).count())
            .collect()
    }

    pub fn node_of(&self, code: &CanonicalCode) -> Option<usize> {
        self.index.get(code).copied()
    }

    /// The node isomorphic to `t`, if any.
    pub fn find(&self, t: &Tree) -> Result<usize> {
        self.node_of(t.code()).ok_or(Error::NotInUniversalModel)
    }

    /// `T_a ≤ T_b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.model.frame().leq(a, b)
    }

    /// `β` of the tree at a node (not of the node inside `as_model()`).
    pub fn beta(&self, node: usize) -> &Formula {
        &self.betas[node]
    }

    /// The least node.
    pub fn root(&self) -> usize {
        self.model.root().expect("the universal model is rooted")
    }

    /// The nodes as worlds of a Kripke model ordered by `≤`; world ids are
    /// the printed codes.
    pub fn as_model(&self) -> &KripkeModel {
        &self.model
    }

    /// The `≤`-upset of a node as a membership vector.
    pub fn upset_of(&self, node: usize) -> Vec<bool> {
        (0..self.len()).map(|v| self.leq(node, v)).collect()
    }

    pub fn is_upset(&self, set: &[bool]) -> bool {
        set.len() == self.len() && self.model.frame().is_upset(set)
    }

    /// Every `≤`-upset as a bitmask over nodes (requires at most 64 nodes).
    pub fn upset_masks(&self) -> Result<Vec<u64>> {
        if self.len() > 64 {
            return Err(Error::BoundExceeded(format!(
                "{} nodes do not fit a 64-bit mask",
                self.len()
            )));
        }
        Ok(self
            .model
            .frame()
            .upsets()
            .into_iter()
            .map(|set| to_mask(&set))
            .collect())
    }

    /// `layers: 4 9 5, total 18`.
    pub fn stats(&self) -> String {
        let sizes: Vec<String> = self.layer_sizes().iter().map(usize::to_string).collect();
        format!("layers: {}, total {}", sizes.join(" "), self.len())
    }

    /// Graphviz rendering: every node is a boxed cluster drawing its tree,
    /// labeled with its layer; edges between clusters are covers of `≤`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph universal {\n  rankdir=BT;\n  compound=true;\n");
        let mut anchor = Vec::with_capacity(self.len());
        for (i, code) in self.codes.iter().enumerate() {
            out.push_str(&format!(
                "  subgraph cluster_{i} {{\n    label=\"T{i} (layer {})\";\n    style=rounded;\n",
                self.layers[i]
            ));
            let tree = code.to_tree(&self.ctx);
            for w in 0..tree.len() {
                out.push_str(&format!(
                    "    t{i}_{w} [label=\"{}\", shape=circle];\n",
                    tree.color(w)
                ));
            }
            for w in 0..tree.len() {
                for &c in tree.children(w) {
                    out.push_str(&format!("    t{i}_{w} -> t{i}_{c};\n"));
                }
            }
            out.push_str("  }\n");
            anchor.push(format!("t{i}_{}", tree.root()));
        }
        for a in 0..self.len() {
            for &b in self.model.frame().covers(a) {
                out.push_str(&format!(
                    "  {} -> {} [ltail=cluster_{a}, lhead=cluster_{b}, style=dashed];\n",
                    anchor[a], anchor[b]
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn to_mask(set: &[bool]) -> u64 {
    set.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Generates the universal model with the default [`Budget`].
pub fn generate(n: usize) -> Result<UniversalModel> {
    generate_with(n, Budget::default())
}

/// Layer 1 holds the single-node trees of every color. Layer `m + 1` adds a
/// fresh root of color `c` below every `≤`-antichain `X` of earlier trees that
/// meets layer `m`, for every `c` strictly below all root colors in `X`.
pub fn generate_with(n: usize, budget: Budget) -> Result<UniversalModel> {
    if n == 0 {
        return Err(Error::Precondition(
            "at least one variable is required".into(),
        ));
    }
    let ctx = VarContext::standard(n);
    let start = Instant::now();
    let order = TreeOrder::new(ctx.clone());
    let colors: Vec<Color> = Color::all(n).collect();

    let mut codes: Vec<CanonicalCode> = colors.iter().map(|&c| CanonicalCode::leaf(c)).collect();
    codes.sort();
    let mut layers = vec![1; codes.len()];
    let mut leq = order_matrix(&codes, &order);
    let mut layer_start = 0;

    loop {
        let prev = layer_start..codes.len();
        let mut fresh = Vec::new();
        let mut guard_err = None;
        for_each_antichain(&leq, prev.clone(), &mut |set| {
            let roots: Vec<Color> = set.iter().map(|&i| codes[i].color(n)).collect();
            for &c in &colors {
                if roots.iter().all(|&r| c.lt(r)) {
                    let kids = set.iter().map(|&i| codes[i].clone()).collect();
                    fresh.push(CanonicalCode::new(c, kids));
                }
            }
            if codes.len() + fresh.len() > budget.max_nodes {
                guard_err = Some(format!("more than {} nodes", budget.max_nodes));
            } else if start.elapsed() > budget.max_time {
                guard_err = Some(format!("time budget of {:?} spent", budget.max_time));
            }
            guard_err.is_none()
        });
        if let Some(msg) = guard_err {
            return Err(Error::ResourceGuard(msg));
        }
        if fresh.is_empty() {
            break;
        }
        fresh.sort();
        fresh.dedup();
        let depth = layers[layers.len() - 1] + 1;
        layer_start = codes.len();
        layers.extend(std::iter::repeat_n(depth, fresh.len()));
        codes.extend(fresh);
        leq = order_matrix(&codes, &order);
        if start.elapsed() > budget.max_time {
            return Err(Error::ResourceGuard(format!(
                "time budget of {:?} spent",
                budget.max_time
            )));
        }
    }

    let ids: Vec<String> = codes.iter().map(|c| c.display(n).to_string()).collect();
    let frame = KripkeFrame::from_order(ids, leq)?;
    let node_colors = codes.iter().map(|c| c.color(n)).collect();
    let model = KripkeModel::from_colors(frame, ctx.clone(), node_colors)?;
    let index = codes
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let betas = codes
        .iter()
        .map(|c| beta::beta_model(c.to_tree(&ctx).model()))
        .collect::<Result<_>>()?;
    Ok(UniversalModel {
        ctx,
        codes,
        layers,
        index,
        model,
        betas,
    })
}

fn order_matrix(codes: &[CanonicalCode], order: &TreeOrder) -> Vec<Vec<bool>> {
    codes
        .iter()
        .map(|a| codes.iter().map(|b| order.leq(a, b)).collect())
        .collect()
}

/// Calls `visit` on every nonempty antichain of `leq` (ascending indices) that
/// contains at least one index in `required`; stops once `visit` returns false.
fn for_each_antichain(
    leq: &[Vec<bool>],
    required: std::ops::Range<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    fn rec(
        leq: &[Vec<bool>],
        required: &std::ops::Range<usize>,
        next: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if chosen.iter().any(|i| required.contains(i)) && !visit(chosen) {
            return false;
        }
        for j in next..leq.len() {
            if chosen.iter().all(|&i| !leq[i][j] && !leq[j][i]) {
                chosen.push(j);
                let go_on = rec(leq, required, j + 1, chosen, visit);
                chosen.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
    rec(leq, &required, 0, &mut Vec::new(), visit);
}

/// The unraveling of the color lattice from the all-zero color.
pub fn universal_tree(n: usize) -> Result<Tree> {
    if n == 0 {
        return Err(Error::Precondition(
            "at least one variable is required".into(),
        ));
    }
    let ctx = VarContext::standard(n);
    let colors: Vec<Color> = Color::all(n).collect();
    let ids: Vec<String> = colors.iter().map(Color::to_string).collect();
    let pairs: Vec<(usize, usize)> = (0..colors.len())
        .flat_map(|a| (0..colors.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| colors[a].leq(colors[b]))
        .collect();
    let frame = KripkeFrame::from_pairs(ids, &pairs)?;
    let lattice = KripkeModel::from_colors(frame, ctx, colors)?;
    unravel(&lattice)
}

/// Reduces a finite tree to the unique equivalent node of the universal
/// model: take the minimal nodes whose color differs from the root, reduce
/// their subtrees, keep the `≤`-minimal results and hang them below a fresh
/// root of the original root color.
pub fn canonical_tree(t: &Tree) -> Tree {
    let order = TreeOrder::new(t.ctx().clone());
    canonical_code(t, &order).to_tree(t.ctx())
}

/// As [`canonical_tree`], reusing a shared order cache.
pub fn canonical_code(t: &Tree, order: &TreeOrder) -> CanonicalCode {
    let mut memo = HashMap::new();
    reduce_at(t, t.root(), order, &mut memo)
}

fn reduce_at(
    t: &Tree,
    w: usize,
    order: &TreeOrder,
    memo: &mut HashMap<CanonicalCode, CanonicalCode>,
) -> CanonicalCode {
    if let Some(hit) = memo.get(t.code_of(w)) {
        return hit.clone();
    }
    let color = t.color(w);
    let mut frontier = Vec::new();
    let mut stack: Vec<usize> = t.children(w).to_vec();
    while let Some(x) = stack.pop() {
        if t.color(x) == color {
            stack.extend_from_slice(t.children(x));
        } else {
            frontier.push(x);
        }
    }
    let mut reduced: Vec<CanonicalCode> = frontier
        .into_iter()
        .map(|x| reduce_at(t, x, order, memo))
        .collect();
    reduced.sort();
    reduced.dedup();
    let kept: Vec<CanonicalCode> = reduced
        .iter()
        .filter(|c| !reduced.iter().any(|d| d != *c && order.leq(d, c)))
        .cloned()
        .collect();
    let out = CanonicalCode::new(color, kept);
    memo.insert(t.code_of(w).clone(), out.clone());
    out
}

/// The NNIL theory of a node, as the set of `≤`-upsets containing it. Each
/// upset is one class of NNIL formulas (the class of its defining β⁺
/// formula).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Theory {
    members: Vec<bool>,
}

impl Theory {
    /// Inclusion of formula sets.
    pub fn is_subset(&self, other: &Theory) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }

    /// Whether the class numbered `k` in `upset_masks()` order belongs.
    pub fn contains(&self, k: usize) -> bool {
        self.members[k]
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The theory of node `tw` with respect to the class list `upsets`
/// (as produced by [`UniversalModel::upset_masks`]).
pub fn theory(un: &UniversalModel, upsets: &[u64], tw: usize) -> Result<Theory> {
    if tw >= un.len() {
        return Err(Error::NotInUniversalModel);
    }
    Ok(Theory {
        members: upsets.iter().map(|&u| u >> tw & 1 == 1).collect(),
    })
}

/// Number of NNIL formulas over `n` variables up to provable equivalence,
/// i.e. the number of `≤`-upsets of the universal model.
pub fn count_nnil_classes(n: usize) -> Result<usize> {
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(Error::BoundExceeded(format!(
            "class counting supports at most {MAX_EXHAUSTIVE_VARS} variables"
        )));
    }
    Ok(generate(n)?.upset_masks()?.len())
}

/// Outcome of [`check_canonical_iso`], one flag per property of the map
/// `T_w ↦ Th(T_w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoReport {
    pub nodes: usize,
    pub classes: usize,
    pub injective: bool,
    /// Each theory equals the set of classes that `β⁺(w)` entails.
    pub onto_generated: bool,
    pub color_preserving: bool,
    /// `Th(T_w) ⊆ Th(T_u)` iff `T_w ≤ T_u`.
    pub order_iso: bool,
    /// `T_w ≤ T_u` iff `T_w` refutes `β(u)`.
    pub refutation_agrees: bool,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.injective
            && self.onto_generated
            && self.color_preserving
            && self.order_iso
            && self.refutation_agrees
    }
}

/// Checks that theories of nodes form a copy of the universal model.
pub fn check_canonical_iso(n: usize) -> Result<IsoReport> {
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(Error::BoundExceeded(format!(
            "the isomorphism check supports at most {MAX_EXHAUSTIVE_VARS} variables"
        )));
    }
    let un = generate(n)?;
    let upsets = un.upset_masks()?;
    let theories: Vec<Theory> = (0..un.len())
        .map(|w| theory(&un, &upsets, w))
        .collect::<Result<_>>()?;
    let model = un.as_model();

    let mut injective = true;
    for a in 0..un.len() {
        for b in a + 1..un.len() {
            injective &= theories[a] != theories[b];
        }
    }

    // Entailment between formulas true on the universal model is read off
    // truth sets there, since every finite countermodel reduces onto it.
    let class_sets: Vec<u64> = upsets
        .iter()
        .map(|&u| {
            Ok(to_mask(&model.truth_set(&beta::beta_plus_upset(
                &un,
                &from_mask(u, un.len()),
            )?)?))
        })
        .collect::<Result<_>>()?;
    let mut onto_generated = true;
    for (w, th) in theories.iter().enumerate() {
        let generator = to_mask(&model.truth_set(&beta::beta_plus_node(&un, w)?)?);
        for (k, &set) in class_sets.iter().enumerate() {
            onto_generated &= (generator & !set == 0) == th.contains(k);
        }
    }

    let mut color_preserving = true;
    for k in 0..n {
        let atom = to_mask(&model.truth_set(&Formula::var(k))?);
        let class = class_sets.iter().position(|&s| s == atom);
        for (w, th) in theories.iter().enumerate() {
            let in_theory = class.is_some_and(|c| th.contains(c));
            color_preserving &= in_theory == un.code(w).color(n).get(k);
        }
    }

    let mut order_iso = true;
    let mut refutation_agrees = true;
    for w in 0..un.len() {
        let tw = un.tree(w);
        for u in 0..un.len() {
            order_iso &= theories[w].is_subset(&theories[u]) == un.leq(w, u);
            let refutes = !tw.model().force(tw.root(), un.beta(u))?;
            refutation_agrees &= refutes == un.leq(w, u);
        }
    }

    Ok(IsoReport {
        nodes: un.len(),
        classes: upsets.len(),
        injective,
        onto_generated,
        color_preserving,
        order_iso,
        refutation_agrees,
    })
}

pub fn from_mask(mask: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| mask >> i & 1 == 1).collect()
}
