//! Subframe formulas of finite rooted models, refutation by monotonic maps
//! and the formulas defining upsets of the universal model.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::kripke::{unravel, CanonicalCode, KripkeFrame, KripkeModel};
use crate::morphisms::{find_color_consistent, find_monotonic, synthesize_valuation, NodeMap};
use crate::prover;
use crate::universal::{self, canonical_tree, UniversalModel};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BetaOptions {
    /// Write `x` instead of `true -> x` at worlds where no variable holds.
    pub simplify: bool,
}

/// Builds β formulas for the worlds of one model. Worlds whose unraveled
/// subtrees are isomorphic receive the same (shared) formula.
pub struct BetaBuilder<'a> {
    model: &'a KripkeModel,
    options: BetaOptions,
    codes: Vec<Option<CanonicalCode>>,
    by_world: Vec<Option<Formula>>,
    by_code: HashMap<CanonicalCode, Formula>,
}

impl<'a> BetaBuilder<'a> {
    pub fn new(model: &'a KripkeModel, options: BetaOptions) -> Self {
        BetaBuilder {
            model,
            options,
            codes: vec![None; model.len()],
            by_world: vec![None; model.len()],
            by_code: HashMap::new(),
        }
    }

    /// Code of the unraveling of the submodel generated at `w`.
    fn code(&mut self, w: usize) -> CanonicalCode {
        if let Some(c) = &self.codes[w] {
            return c.clone();
        }
        let kids = self
            .model
            .frame()
            .covers(w)
            .to_vec()
            .into_iter()
            .map(|u| self.code(u))
            .collect();
        let c = CanonicalCode::new(self.model.color(w), kids);
        self.codes[w] = Some(c.clone());
        c
    }

    pub fn beta(&mut self, w: usize) -> Result<Formula> {
        self.model.frame().check_world(w)?;
        Ok(self.beta_at(w))
    }

    fn beta_at(&mut self, w: usize) -> Formula {
        if let Some(f) = &self.by_world[w] {
            return f.clone();
        }
        let code = self.code(w);
        if let Some(f) = self.by_code.get(&code) {
            let f = f.clone();
            self.by_world[w] = Some(f.clone());
            return f;
        }
        let mut succ: Vec<(CanonicalCode, usize)> = self
            .model
            .frame()
            .covers(w)
            .to_vec()
            .into_iter()
            .map(|u| (self.code(u), u))
            .collect();
        succ.sort();
        let prop = self.model.prop(w);
        let mut disjuncts: Vec<Formula> = self
            .model
            .notprop(w)
            .into_iter()
            .map(Formula::var)
            .collect();
        disjuncts.extend(succ.into_iter().map(|(_, u)| self.beta_at(u)));
        let consequent = Formula::disj(disjuncts);
        let f = if prop.is_empty() && self.options.simplify {
            consequent
        } else {
            Formula::implies(
                Formula::conj(prop.into_iter().map(Formula::var)),
                consequent,
            )
        };
        self.by_code.insert(code, f.clone());
        self.by_world[w] = Some(f.clone());
        f
    }
}

/// `⋀prop(w) → ⋁notprop(w) ∨ ⋁β(v)` over the immediate successors `v` of `w`,
/// successors taken in code order.
pub fn beta_node(m: &KripkeModel, w: usize) -> Result<Formula> {
    BetaBuilder::new(m, BetaOptions::default()).beta(w)
}

pub fn beta_node_with(m: &KripkeModel, w: usize, options: BetaOptions) -> Result<Formula> {
    BetaBuilder::new(m, options).beta(w)
}

/// β of a rooted model, taken at its root.
pub fn beta_model(m: &KripkeModel) -> Result<Formula> {
    beta_model_with(m, BetaOptions::default())
}

pub fn beta_model_with(m: &KripkeModel, options: BetaOptions) -> Result<Formula> {
    let root = m.root().ok_or(Error::NotRooted)?;
    beta_node_with(m, root, options)
}

/// A monotonic map from the unraveling of `n` into `m`. One exists exactly
/// when some world of `m` refutes `β(n)`.
pub fn refutation_witness(n: &KripkeModel, m: &KripkeModel) -> Result<Option<NodeMap>> {
    let t = unravel(n)?;
    Ok(find_monotonic(t.model(), m))
}

/// A color-consistent map from the unraveling of `n` into `fr` together with
/// the valuation it induces, under which `β(n)` fails on `fr`.
pub fn frame_refutes(n: &KripkeModel, fr: &KripkeFrame) -> Result<Option<(NodeMap, KripkeModel)>> {
    let t = unravel(n)?;
    match find_color_consistent(t.model(), fr) {
        None => Ok(None),
        Some(f) => {
            let model = synthesize_valuation(&f, t.model(), fr)?;
            Ok(Some((f, model)))
        }
    }
}

/// Conjunction of `β(v)` over the nodes `v` of `un` not above `tw`; it holds
/// on a node exactly when that node lies above `tw`.
pub fn beta_plus_node(un: &UniversalModel, tw: usize) -> Result<Formula> {
    if tw >= un.len() {
        return Err(Error::NotInUniversalModel);
    }
    beta_plus_upset(un, &un.upset_of(tw))
}

/// Conjunction of `β(v)` over the nodes `v` outside `upset`; defines `upset`.
pub fn beta_plus_upset(un: &UniversalModel, upset: &[bool]) -> Result<Formula> {
    if !un.is_upset(upset) {
        return Err(Error::NotAnUpset);
    }
    let parts = (0..un.len())
        .filter(|&v| !upset[v])
        .map(|v| un.beta(v).clone());
    Ok(Formula::conj(parts))
}

/// Whether `(m, w)` and `(n, u)` satisfy the same NNIL formulas, decided by
/// comparing canonical trees.
pub fn nnil_equivalent(m: &KripkeModel, w: usize, n: &KripkeModel, u: usize) -> Result<bool> {
    if m.ctx().len() != n.ctx().len() {
        return Err(Error::ContextMismatch(m.ctx().len(), n.ctx().len()));
    }
    let left = canonical_tree(&unravel(&m.generated_submodel(w)?)?);
    let right = canonical_tree(&unravel(&n.generated_submodel(u)?)?);
    Ok(left.code() == right.code())
}

/// An NNIL formula provably equivalent to `f`, built from the set of nodes of
/// the universal model where `f` holds, or `None` if there is none.
pub fn is_nnil_expressible(f: &Formula, n: usize) -> Result<Option<Formula>> {
    if n > universal::MAX_EXHAUSTIVE_VARS {
        return Err(Error::BoundExceeded(format!(
            "expressibility is decided for at most {} variables",
            universal::MAX_EXHAUSTIVE_VARS
        )));
    }
    if let Some(k) = f.max_var() {
        if k >= n {
            return Err(Error::VariableOutOfRange { index: k, len: n });
        }
    }
    let un = universal::generate(n.max(1))?;
    let holds = un.as_model().truth_set(f)?;
    let g = beta_plus_upset(&un, &holds)?;
    Ok(prover::equivalent(f, &g).then_some(g))
}
