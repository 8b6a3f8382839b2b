//! Monotonic maps between models, color-consistent maps into frames, the
//! `≤` preorder on models and valuation synthesis.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kripke::{Color, KripkeFrame, KripkeModel};

/// A total function from the worlds of one structure to those of another,
/// stored by world index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeMap {
    images: Vec<usize>,
}

impl NodeMap {
    pub fn new(images: Vec<usize>) -> Self {
        NodeMap { images }
    }

    pub fn identity(n: usize) -> Self {
        NodeMap::new((0..n).collect())
    }

    pub fn get(&self, w: usize) -> usize {
        self.images[w]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &NodeMap) -> NodeMap {
        NodeMap::new(self.images.iter().map(|&x| other.get(x)).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn is_surjective(&self, target_len: usize) -> bool {
        let mut hit = vec![false; target_len];
        for &x in &self.images {
            if x < target_len {
                hit[x] = true;
            }
        }
        hit.into_iter().all(|b| b)
    }

    /// `{"src": "dst", ...}` keyed by world ids.
    pub fn to_json(&self, src: &KripkeFrame, dst: &KripkeFrame) -> String {
        let map: BTreeMap<&str, &str> = self
            .images
            .iter()
            .enumerate()
            .map(|(w, &x)| (src.id(w), dst.id(x)))
            .collect();
        serde_json::to_string_pretty(&map).expect("string map serializes")
    }

    pub fn from_json(text: &str, src: &KripkeFrame, dst: &KripkeFrame) -> Result<NodeMap> {
        let map: BTreeMap<String, String> = serde_json::from_str(text)?;
        let mut images = vec![None; src.len()];
        for (a, b) in &map {
            images[src.world(a)?] = Some(dst.world(b)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(w, x)| {
                x.ok_or_else(|| Error::Precondition(format!("no image for `{}`", src.id(w))))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NodeMap::new(images))
    }

    fn fits(&self, src_len: usize, dst_len: usize) -> bool {
        self.images.len() == src_len && self.images.iter().all(|&x| x < dst_len)
    }
}

/// Order preserving and color preserving.
pub fn is_monotonic(f: &NodeMap, src: &KripkeModel, dst: &KripkeModel) -> bool {
    f.fits(src.len(), dst.len())
        && src.ctx().len() == dst.ctx().len()
        && (0..src.len()).all(|w| src.color(w) == dst.color(f.get(w)))
        && is_order_preserving(f, src.frame(), dst.frame())
}

pub fn is_order_preserving(f: &NodeMap, src: &KripkeFrame, dst: &KripkeFrame) -> bool {
    f.fits(src.len(), dst.len())
        && (0..src.len()).all(|w| src.up(w).iter().all(|&u| dst.leq(f.get(w), f.get(u))))
}

/// Order preserving into `fr`, and whenever two images are related the
/// source colors are related the same way. All pairs are checked, related in
/// the source or not.
pub fn is_color_consistent(f: &NodeMap, src: &KripkeModel, fr: &KripkeFrame) -> bool {
    is_order_preserving(f, src.frame(), fr)
        && (0..src.len()).all(|w| {
            (0..src.len()).all(|u| !fr.leq(f.get(w), f.get(u)) || src.color(w).leq(src.color(u)))
        })
}

/// Backtracking over source worlds in a linear extension; candidates are
/// tried in lexicographic order of target ids.
struct Search<'a, C, K> {
    order: Vec<usize>,
    src: &'a KripkeFrame,
    dst: &'a KripkeFrame,
    candidates: C,
    compatible: K,
    assign: Vec<Option<usize>>,
}

impl<C, K> Search<'_, C, K>
where
    C: Fn(usize) -> Vec<usize>,
    K: Fn(usize, usize, usize, usize) -> bool,
{
    /// Calls `visit` on each complete map; stops when it returns false.
    fn run(&mut self, i: usize, visit: &mut dyn FnMut(NodeMap) -> bool) -> bool {
        if i == self.order.len() {
            let images = self
                .assign
                .iter()
                .map(|x| x.expect("all assigned"))
                .collect();
            return visit(NodeMap::new(images));
        }
        let w = self.order[i];
        for x in (self.candidates)(w) {
            if self.consistent(w, x) {
                self.assign[w] = Some(x);
                let go_on = self.run(i + 1, visit);
                self.assign[w] = None;
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    fn consistent(&self, w: usize, x: usize) -> bool {
        self.assign.iter().enumerate().all(|(a, img)| match *img {
            None => true,
            Some(y) => {
                (!self.src.leq(a, w) || self.dst.leq(y, x))
                    && (!self.src.leq(w, a) || self.dst.leq(x, y))
                    && (self.compatible)(a, y, w, x)
            }
        })
    }
}

fn by_id(fr: &KripkeFrame) -> Vec<usize> {
    let mut v: Vec<usize> = (0..fr.len()).collect();
    v.sort_by(|&a, &b| fr.id(a).cmp(fr.id(b)));
    v
}

fn monotonic_search(src: &KripkeModel, dst: &KripkeModel, visit: &mut dyn FnMut(NodeMap) -> bool) {
    if src.ctx().len() != dst.ctx().len() {
        return;
    }
    let targets = by_id(dst.frame());
    let mut search = Search {
        order: src.frame().linear_extension(),
        src: src.frame(),
        dst: dst.frame(),
        candidates: |w: usize| {
            targets
                .iter()
                .copied()
                .filter(|&x| dst.color(x) == src.color(w))
                .collect()
        },
        compatible: |_, _, _, _| true,
        assign: vec![None; src.len()],
    };
    search.run(0, visit);
}

/// A monotonic map from `src` into `dst`, if one exists. The search is
/// complete.
pub fn find_monotonic(src: &KripkeModel, dst: &KripkeModel) -> Option<NodeMap> {
    let mut found = None;
    monotonic_search(src, dst, &mut |f| {
        found = Some(f);
        false
    });
    found
}

/// Every monotonic map from `src` into `dst`, up to `limit` of them.
pub fn find_all_monotonic(src: &KripkeModel, dst: &KripkeModel, limit: usize) -> Vec<NodeMap> {
    let mut all = Vec::new();
    monotonic_search(src, dst, &mut |f| {
        all.push(f);
        all.len() < limit
    });
    all
}

/// `n ≤ m`: `m` maps monotonically into `n`.
pub fn leq(n: &KripkeModel, m: &KripkeModel) -> bool {
    find_monotonic(m, n).is_some()
}

pub fn equiv(n: &KripkeModel, m: &KripkeModel) -> bool {
    leq(n, m) && leq(m, n)
}

/// A color-consistent order-preserving map from `src` into the frame `fr`.
pub fn find_color_consistent(src: &KripkeModel, fr: &KripkeFrame) -> Option<NodeMap> {
    let targets = by_id(fr);
    let colors: Vec<Color> = src.colors().to_vec();
    let mut search = Search {
        order: src.frame().linear_extension(),
        src: src.frame(),
        dst: fr,
        candidates: |_| targets.clone(),
        compatible: |a: usize, y: usize, w: usize, x: usize| {
            (!fr.leq(y, x) || colors[a].leq(colors[w]))
                && (!fr.leq(x, y) || colors[w].leq(colors[a]))
        },
        assign: vec![None; src.len()],
    };
    let mut found = None;
    search.run(0, &mut |f| {
        found = Some(f);
        false
    });
    found
}

/// Puts `p` true on the union of `R(f(w))` over source worlds `w` forcing `p`.
pub fn synthesize_valuation(
    f: &NodeMap,
    src: &KripkeModel,
    fr: &KripkeFrame,
) -> Result<KripkeModel> {
    if !is_color_consistent(f, src, fr) {
        return Err(Error::Precondition("map is not color-consistent".into()));
    }
    let n = src.ctx().len();
    let mut bits = vec![0u64; fr.len()];
    for w in 0..src.len() {
        let c = src.color(w).bits();
        for &x in fr.up(f.get(w)) {
            bits[x] |= c;
        }
    }
    let colors = bits.into_iter().map(|b| Color::new(b, n)).collect();
    KripkeModel::from_colors(fr.clone(), src.ctx().clone(), colors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::VarContext;
    use crate::kripke::CanonicalCode;

    fn tree(code: &str) -> KripkeModel {
        let (c, n) = CanonicalCode::parse(code).unwrap();
        c.to_tree(&VarContext::standard(n)).into_model()
    }

    fn chain2() -> KripkeFrame {
        KripkeFrame::new(&["a", "b"], &[("a", "b")]).unwrap()
    }

    #[test]
    fn identity_on_submodel_is_monotonic() {
        let m = tree("00[01[11],10]");
        let sub = m.submodel(&[0, 1]).unwrap();
        let emb = NodeMap::identity(2);
        assert!(is_monotonic(&emb, &sub, &m));
        assert!(!is_monotonic(
            &NodeMap::new(vec![0, 0]),
            &tree("00[11]"),
            &tree("00[11]")
        ));
    }

    #[test]
    fn search_examples() {
        let single = tree("00");
        assert!(find_monotonic(&single, &tree("00[11]")).is_some());
        assert!(find_monotonic(&tree("00[10[11]]"), &tree("00[11]")).is_none());
        let m = tree("00[01[11],10]");
        assert!(find_monotonic(&m, &m).unwrap().is_identity());
    }

    #[test]
    fn leq_direction() {
        assert!(leq(&tree("00[11]"), &tree("11")));
        assert!(!leq(&tree("11"), &tree("00[11]")));
        let m = tree("00[01,10]");
        assert!(equiv(&m, &m));
    }

    #[test]
    fn color_consistent_examples() {
        let point = KripkeFrame::new::<&str>(&["x"], &[]).unwrap();
        assert!(find_color_consistent(&tree("01[01]"), &point).is_some());
        assert!(find_color_consistent(&tree("00[11]"), &point).is_none());
        let f = find_color_consistent(&tree("00[11]"), &chain2()).unwrap();
        assert_eq!(f.images(), &[0, 1]);
        assert!(find_color_consistent(&tree("00[01,10]"), &chain2()).is_none());
    }

    #[test]
    fn synthesized_valuations() {
        let point = KripkeFrame::new::<&str>(&["x"], &[]).unwrap();
        let m = synthesize_valuation(&NodeMap::new(vec![0]), &tree("10"), &point).unwrap();
        assert_eq!(m.color(0).to_string(), "10");

        let src = tree("00[11]");
        let f = find_color_consistent(&src, &chain2()).unwrap();
        let m = synthesize_valuation(&f, &src, &chain2()).unwrap();
        assert_eq!(m.color(0).to_string(), "00");
        assert_eq!(m.color(1).to_string(), "11");
        assert!(is_monotonic(&f, &src, &m));

        let t = tree("00[01[11],10]");
        let id = NodeMap::identity(t.len());
        let m = synthesize_valuation(&id, &t, t.frame()).unwrap();
        assert!(is_monotonic(&id, &t, &m));
    }

    #[test]
    fn synthesize_rejects_inconsistent_maps() {
        let point = KripkeFrame::new::<&str>(&["x"], &[]).unwrap();
        let err = synthesize_valuation(&NodeMap::new(vec![0, 0]), &tree("00[11]"), &point);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn witness_json_round_trip() {
        let src = tree("00[11]");
        let dst = tree("00[01[11],11]");
        let f = find_monotonic(&src, &dst).unwrap();
        let text = f.to_json(src.frame(), dst.frame());
        assert_eq!(
            NodeMap::from_json(&text, src.frame(), dst.frame()).unwrap(),
            f
        );
    }

    #[test]
    fn all_self_maps_of_a_fork() {
        let m = tree("00[11,11]");
        assert_eq!(find_all_monotonic(&m, &m, 100).len(), 4);
    }
}
