//! Finite Kripke frames and models with persistent valuations.

mod io;
mod tree;

use std::collections::HashMap;
use std::fmt;

pub use io::{FrameFile, ModelFile};
pub use tree::{is_pmorphism, natural_map, unravel, CanonicalCode, Tree};

use crate::error::{Error, Result};
use crate::formula::{Formula, VarContext};

/// Truth values of the context variables at a world, bit `k` for variable `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Color {
    bits: u64,
    len: u8,
}

impl Color {
    pub fn new(bits: u64, len: usize) -> Self {
        assert!(len <= 64, "at most 64 variables");
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Color {
            bits: bits & mask,
            len: len as u8,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let word = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &b)| acc | (u64::from(b) << k));
        Color::new(word, bits.len())
    }

    /// Parses a string such as `"10"` (variable 1 true, variable 2 false).
    pub fn parse(s: &str) -> Option<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return None,
            }
        }
        (bits.len() <= 64).then(|| Color::from_bools(&bits))
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn get(self, k: usize) -> bool {
        self.bits >> k & 1 == 1
    }

    /// Bitwise `≤`.
    pub fn leq(self, other: Color) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn lt(self, other: Color) -> bool {
        self.leq(other) && self.bits != other.bits
    }

    /// All colors of width `n`, in increasing numeric order of their bits.
    pub fn all(n: usize) -> impl Iterator<Item = Color> {
        assert!(n < 64);
        (0..1u64 << n).map(move |b| Color::new(b, n))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            f.write_str(if self.get(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A finite partial order. `up[w]` is `R(w)` including `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeFrame {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<Vec<bool>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    covers: Vec<Vec<usize>>,
}

impl KripkeFrame {
    /// Builds a frame from any relation whose reflexive-transitive closure is
    /// a partial order.
    pub fn new<S: AsRef<str>>(ids: &[S], relation: &[(S, S)]) -> Result<Self> {
        let ids: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateWorld(id.clone()));
            }
        }
        let mut pairs = Vec::with_capacity(relation.len());
        for (a, b) in relation {
            let a = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownWorld(a.as_ref().to_string()))?;
            let b = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownWorld(b.as_ref().to_string()))?;
            pairs.push((a, b));
        }
        Self::from_pairs(ids, &pairs)
    }

    /// Index-based variant of [`KripkeFrame::new`].
    pub fn from_pairs(ids: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::EmptyModel);
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownWorld(format!("#{}", a.max(b))));
            }
            leq[a][b] = true;
        }
        // Warshall
        for k in 0..n {
            let row_k = leq[k].clone();
            for row in leq.iter_mut() {
                if row[k] {
                    for (cell, &via) in row.iter_mut().zip(&row_k) {
                        *cell |= via;
                    }
                }
            }
        }
        Self::from_order(ids, leq)
    }

    /// `leq` must already be reflexive and transitive.
    pub(crate) fn from_order(ids: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::EmptyModel);
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateWorld(id.clone()));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAntisymmetric(ids[i].clone(), ids[j].clone()));
                }
            }
        }
        let up: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| leq[i][j]).collect())
            .collect();
        let down: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| leq[j][i]).collect())
            .collect();
        let covers = (0..n)
            .map(|i| {
                up[i]
                    .iter()
                    .copied()
                    .filter(|&j| j != i && !up[i].iter().any(|&k| k != i && k != j && leq[k][j]))
                    .collect()
            })
            .collect();
        Ok(KripkeFrame {
            ids,
            index,
            leq,
            up,
            down,
            covers,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, w: usize) -> &str {
        &self.ids[w]
    }

    pub fn world(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownWorld(id.to_string()))
    }

    pub(crate) fn check_world(&self, w: usize) -> Result<()> {
        if w < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownWorld(format!("#{w}")))
        }
    }

    /// `w R u`.
    pub fn leq(&self, w: usize, u: usize) -> bool {
        self.leq[w][u]
    }

    pub fn up(&self, w: usize) -> &[usize] {
        &self.up[w]
    }

    pub fn down(&self, w: usize) -> &[usize] {
        &self.down[w]
    }

    /// Immediate successors.
    pub fn covers(&self, w: usize) -> &[usize] {
        &self.covers[w]
    }

    pub fn is_maximal(&self, w: usize) -> bool {
        self.covers[w].is_empty()
    }

    /// The unique minimum, if any.
    pub fn root(&self) -> Option<usize> {
        (0..self.len()).find(|&w| self.up[w].len() == self.len())
    }

    pub fn is_rooted(&self) -> bool {
        self.root().is_some()
    }

    /// Every world has a linearly ordered set of predecessors.
    pub fn is_tree_like(&self) -> bool {
        (0..self.len()).all(|w| {
            let down = &self.down[w];
            down.iter()
                .all(|&a| down.iter().all(|&b| self.leq[a][b] || self.leq[b][a]))
        })
    }

    /// Worlds ordered so that every world comes after all its strict
    /// predecessors: by longest chain from below, then by index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut height = vec![0usize; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&w| self.down[w].len());
        for &w in &order {
            height[w] = self.down[w]
                .iter()
                .filter(|&&v| v != w)
                .map(|&v| height[v] + 1)
                .max()
                .unwrap_or(0);
        }
        order.sort_by_key(|&w| (height[w], w));
        order
    }

    /// Upward closed subsets, each as a membership vector.
    pub fn upsets(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut out = Vec::new();
        let order = self.linear_extension();
        let mut current = vec![false; n];
        self.upsets_rec(&order, 0, &mut current, &mut out);
        out
    }

    // Decide worlds top-down: a world may join only if all its successors did.
    fn upsets_rec(
        &self,
        order: &[usize],
        i: usize,
        current: &mut Vec<bool>,
        out: &mut Vec<Vec<bool>>,
    ) {
        if i == order.len() {
            out.push(current.clone());
            return;
        }
        let w = order[order.len() - 1 - i];
        self.upsets_rec(order, i + 1, current, out);
        if self.up[w].iter().all(|&u| u == w || current[u]) {
            current[w] = true;
            self.upsets_rec(order, i + 1, current, out);
            current[w] = false;
        }
    }

    pub fn is_upset(&self, set: &[bool]) -> bool {
        (0..self.len()).all(|w| !set[w] || self.up[w].iter().all(|&u| set[u]))
    }

    /// Substructure on `worlds` (in the given order) with the restricted order.
    pub fn subframe(&self, worlds: &[usize]) -> Result<KripkeFrame> {
        for &w in worlds {
            self.check_world(w)?;
        }
        let ids = worlds.iter().map(|&w| self.ids[w].clone()).collect();
        let leq = worlds
            .iter()
            .map(|&a| worlds.iter().map(|&b| self.leq[a][b]).collect())
            .collect();
        KripkeFrame::from_order(ids, leq)
    }

    /// Graphviz rendering: one node per world, edges are covers.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph frame {\n  rankdir=BT;\n");
        for (i, id) in self.ids.iter().enumerate() {
            out.push_str(&format!("  w{i} [label=\"{}\"];\n", escape(id)));
        }
        for i in 0..self.len() {
            for &j in &self.covers[i] {
                out.push_str(&format!("  w{i} -> w{j};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A frame, a variable context and a persistent valuation (stored as colors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    frame: KripkeFrame,
    ctx: VarContext,
    colors: Vec<Color>,
}

impl KripkeModel {
    pub fn from_colors(frame: KripkeFrame, ctx: VarContext, colors: Vec<Color>) -> Result<Self> {
        if colors.len() != frame.len() {
            return Err(Error::Precondition(format!(
                "{} colors for {} worlds",
                colors.len(),
                frame.len()
            )));
        }
        if let Some(c) = colors.iter().find(|c| c.len() != ctx.len()) {
            return Err(Error::ContextMismatch(c.len(), ctx.len()));
        }
        for w in 0..frame.len() {
            for &u in frame.up(w) {
                if !colors[w].leq(colors[u]) {
                    let k = (0..ctx.len())
                        .find(|&k| colors[w].get(k) && !colors[u].get(k))
                        .unwrap_or(0);
                    return Err(Error::NotPersistent {
                        var: ctx.name(k).unwrap_or("?").to_string(),
                        from: frame.id(w).to_string(),
                        to: frame.id(u).to_string(),
                    });
                }
            }
        }
        Ok(KripkeModel { frame, ctx, colors })
    }

    /// `valuation[k]` lists the worlds where variable `k` holds.
    pub fn from_valuation(
        frame: KripkeFrame,
        ctx: VarContext,
        valuation: &[Vec<usize>],
    ) -> Result<Self> {
        if valuation.len() != ctx.len() {
            return Err(Error::ContextMismatch(valuation.len(), ctx.len()));
        }
        let mut bits = vec![0u64; frame.len()];
        for (k, worlds) in valuation.iter().enumerate() {
            for &w in worlds {
                frame.check_world(w)?;
                bits[w] |= 1 << k;
            }
        }
        let colors = bits.into_iter().map(|b| Color::new(b, ctx.len())).collect();
        Self::from_colors(frame, ctx, colors)
    }

    pub fn frame(&self) -> &KripkeFrame {
        &self.frame
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn id(&self, w: usize) -> &str {
        self.frame.id(w)
    }

    pub fn world(&self, id: &str) -> Result<usize> {
        self.frame.world(id)
    }

    pub fn root(&self) -> Option<usize> {
        self.frame.root()
    }

    pub fn color(&self, w: usize) -> Color {
        self.colors[w]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    /// Variables true at `w`.
    pub fn prop(&self, w: usize) -> Vec<usize> {
        (0..self.ctx.len())
            .filter(|&k| self.colors[w].get(k))
            .collect()
    }

    /// Variables false at `w`.
    pub fn notprop(&self, w: usize) -> Vec<usize> {
        (0..self.ctx.len())
            .filter(|&k| !self.colors[w].get(k))
            .collect()
    }

    /// `V(f)` as a membership vector.
    pub fn truth_set(&self, f: &Formula) -> Result<Vec<bool>> {
        f.check_context(&self.ctx)?;
        Ok(self.eval(f))
    }

    fn eval(&self, f: &Formula) -> Vec<bool> {
        let n = self.len();
        match f {
            Formula::Bot => vec![false; n],
            Formula::Top => vec![true; n],
            Formula::Var(k) => self.colors.iter().map(|c| c.get(*k)).collect(),
            Formula::And(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
            }
            Formula::Impl(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                (0..n)
                    .map(|w| self.frame.up(w).iter().all(|&u| !a[u] || b[u]))
                    .collect()
            }
        }
    }

    /// `M, w ⊨ f`.
    pub fn force(&self, w: usize, f: &Formula) -> Result<bool> {
        self.frame.check_world(w)?;
        Ok(self.truth_set(f)?[w])
    }

    pub fn force_at(&self, id: &str, f: &Formula) -> Result<bool> {
        self.force(self.world(id)?, f)
    }

    /// `M ⊨ f`.
    pub fn validates(&self, f: &Formula) -> Result<bool> {
        Ok(self.truth_set(f)?.into_iter().all(|b| b))
    }

    /// Submodel on `worlds` with restricted order and valuation.
    pub fn submodel(&self, worlds: &[usize]) -> Result<KripkeModel> {
        let frame = self.frame.subframe(worlds)?;
        let colors = worlds.iter().map(|&w| self.colors[w]).collect();
        Ok(KripkeModel {
            frame,
            ctx: self.ctx.clone(),
            colors,
        })
    }

    /// The submodel on `R(w)`; `w` becomes its root.
    pub fn generated_submodel(&self, w: usize) -> Result<KripkeModel> {
        self.frame.check_world(w)?;
        self.submodel(self.frame.up(w))
    }

    pub fn with_ctx(&self, ctx: VarContext) -> Result<KripkeModel> {
        if ctx.len() != self.ctx.len() {
            return Err(Error::ContextMismatch(ctx.len(), self.ctx.len()));
        }
        Ok(KripkeModel {
            frame: self.frame.clone(),
            ctx,
            colors: self.colors.clone(),
        })
    }

    /// Graphviz rendering: nodes labeled `id:color`, edges are covers.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph model {\n  rankdir=BT;\n");
        for w in 0..self.len() {
            out.push_str(&format!(
                "  w{w} [label=\"{}:{}\"];\n",
                escape(self.id(w)),
                self.colors[w]
            ));
        }
        for w in 0..self.len() {
            for &u in self.frame.covers(w) {
                out.push_str(&format!("  w{w} -> w{u};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn chain(colors: &[&str]) -> KripkeModel {
        let ids: Vec<String> = (0..colors.len()).map(|i| format!("w{i}")).collect();
        let pairs: Vec<(usize, usize)> = (1..colors.len()).map(|i| (i - 1, i)).collect();
        let frame = KripkeFrame::from_pairs(ids, &pairs).unwrap();
        let colors: Vec<Color> = colors.iter().map(|c| Color::parse(c).unwrap()).collect();
        let ctx = VarContext::standard(colors[0].len());
        KripkeModel::from_colors(frame, ctx, colors).unwrap()
    }

    fn diamond() -> KripkeModel {
        let frame = KripkeFrame::new(
            &["r", "a", "b", "t"],
            &[("r", "a"), ("r", "b"), ("a", "t"), ("b", "t")],
        )
        .unwrap();
        let colors = ["00", "01", "10", "11"]
            .iter()
            .map(|c| Color::parse(c).unwrap())
            .collect();
        KripkeModel::from_colors(frame, VarContext::standard(2), colors).unwrap()
    }

    #[test]
    fn color_order() {
        let c = |s| Color::parse(s).unwrap();
        assert!(c("00").leq(c("10")));
        assert!(c("10").lt(c("11")));
        assert!(!c("10").leq(c("01")));
        assert!(!c("11").lt(c("11")));
        assert_eq!(c("10").to_string(), "10");
        assert!(c("10").get(0) && !c("10").get(1));
    }

    #[test]
    fn closure_and_antisymmetry() {
        let f = KripkeFrame::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(f.leq(0, 2));
        assert_eq!(f.covers(0), &[1]);
        let err = KripkeFrame::new(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, Error::NotAntisymmetric(..)));
    }

    #[test]
    fn persistence_is_validated() {
        let frame = KripkeFrame::new(&["a", "b"], &[("a", "b")]).unwrap();
        let err =
            KripkeModel::from_valuation(frame, VarContext::standard(1), &[vec![0]]).unwrap_err();
        assert!(matches!(err, Error::NotPersistent { .. }));
    }

    #[test]
    fn forcing_examples() {
        let ctx = VarContext::standard(2);
        let single = chain(&["10"]);
        assert!(single.force(0, &parse("p1", &ctx).unwrap()).unwrap());
        let m = chain(&["00", "11"]);
        assert!(!m.force(0, &parse("p1", &ctx).unwrap()).unwrap());
        assert!(m.force(0, &parse("p1 -> p2", &ctx).unwrap()).unwrap());
        assert!(m.force(0, &Formula::Top).unwrap());
        assert!(!m.force(1, &Formula::Bot).unwrap());
        assert!(matches!(
            m.force(5, &Formula::Top),
            Err(Error::UnknownWorld(_))
        ));
        assert!(matches!(
            m.force(0, &Formula::var(3)),
            Err(Error::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn colors_of_worlds() {
        let m = chain(&["10", "11"]);
        assert_eq!(m.color(0).to_string(), "10");
        assert_eq!(m.color(1).to_string(), "11");
        assert!(m.color(0).leq(m.color(1)));
        assert_eq!(m.prop(0), vec![0]);
        assert_eq!(m.notprop(0), vec![1]);
    }

    #[test]
    fn generated_submodels() {
        let d = diamond();
        let top = d.generated_submodel(3).unwrap();
        assert_eq!(top.len(), 1);
        let whole = d.generated_submodel(0).unwrap();
        assert_eq!(whole, d);
        let mid = d.generated_submodel(1).unwrap();
        assert_eq!(mid.frame().ids(), ["a", "t"]);
        assert!(mid.frame().leq(0, 1));
    }

    #[test]
    fn roots_and_trees() {
        let d = diamond();
        assert_eq!(d.root(), Some(0));
        assert!(!d.frame().is_tree_like());
        assert!(chain(&["0", "1"]).frame().is_tree_like());
        let anti = KripkeFrame::new::<&str>(&["a", "b"], &[]).unwrap();
        assert_eq!(anti.root(), None);
    }

    #[test]
    fn upsets_of_diamond() {
        // ∅, {t}, {a,t}, {b,t}, {a,b,t}, all
        assert_eq!(diamond().frame().upsets().len(), 6);
    }

    #[test]
    fn dot_lists_covers() {
        let dot = chain(&["00", "11"]).to_dot();
        assert!(dot.contains("label=\"w0:00\""));
        assert!(dot.contains("w0 -> w1;"));
    }
}
