//! Exhaustive enumeration of small posets and models up to isomorphism.

use std::collections::BTreeSet;

use crate::formula::VarContext;
use crate::kripke::{Color, KripkeFrame, KripkeModel};

fn ids(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("w{i}")).collect()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Bit `i * k + j` is set when `i ≤ j`.
fn order_bits(leq: &[Vec<bool>], perm: &[usize]) -> u64 {
    let k = leq.len();
    let mut bits = 0;
    for i in 0..k {
        for j in 0..k {
            if leq[perm[i]][perm[j]] {
                bits |= 1 << (i * k + j);
            }
        }
    }
    bits
}

/// Partial orders on `k` elements (`k ≤ 7`), one per isomorphism class.
pub fn posets(k: usize) -> Vec<KripkeFrame> {
    assert!(k <= 7, "poset enumeration is limited to 7 elements");
    if k == 0 {
        return Vec::new();
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let perms = permutations(k);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut leq = vec![vec![false; k]; k];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let transitive =
            (0..k).all(|a| (0..k).all(|b| !leq[a][b] || (0..k).all(|c| !leq[b][c] || leq[a][c])));
        if !transitive {
            continue;
        }
        let key = perms.iter().map(|p| order_bits(&leq, p)).min().unwrap();
        if seen.insert(key) {
            out.push(KripkeFrame::from_order(ids(k), leq).expect("upper triangular order"));
        }
    }
    out
}

/// Partial orders on `k` elements with a least element, up to isomorphism.
pub fn rooted_posets(k: usize) -> Vec<KripkeFrame> {
    posets(k)
        .into_iter()
        .filter(KripkeFrame::is_rooted)
        .collect()
}

/// Every persistent coloring of `frame` over `n` variables.
pub fn colorings(frame: &KripkeFrame, n: usize) -> Vec<Vec<Color>> {
    let order = frame.linear_extension();
    let all: Vec<Color> = Color::all(n).collect();
    let mut out = Vec::new();
    let mut cur = vec![Color::new(0, n); frame.len()];
    fn rec(
        frame: &KripkeFrame,
        order: &[usize],
        all: &[Color],
        i: usize,
        cur: &mut Vec<Color>,
        out: &mut Vec<Vec<Color>>,
    ) {
        if i == order.len() {
            out.push(cur.clone());
            return;
        }
        let w = order[i];
        for &c in all {
            if frame.down(w).iter().all(|&v| v == w || cur[v].leq(c)) {
                cur[w] = c;
                rec(frame, order, all, i + 1, cur, out);
            }
        }
    }
    rec(frame, &order, &all, 0, &mut cur, &mut out);
    out
}

/// Models with `k` worlds over `n` variables, one per isomorphism class.
pub fn models(k: usize, n: usize, rooted_only: bool) -> Vec<KripkeModel> {
    let ctx = VarContext::standard(n);
    let perms = permutations(k);
    let mut out = Vec::new();
    let frames = if rooted_only {
        rooted_posets(k)
    } else {
        posets(k)
    };
    for frame in frames {
        let leq: Vec<Vec<bool>> = (0..k)
            .map(|a| (0..k).map(|b| frame.leq(a, b)).collect())
            .collect();
        let base = order_bits(&leq, &(0..k).collect::<Vec<_>>());
        let autos: Vec<&Vec<usize>> = perms
            .iter()
            .filter(|p| order_bits(&leq, p) == base)
            .collect();
        let mut seen = BTreeSet::new();
        for colors in colorings(&frame, n) {
            let key = autos
                .iter()
                .map(|p| p.iter().map(|&i| colors[i].bits()).collect::<Vec<_>>())
                .min()
                .unwrap();
            if seen.insert(key) {
                out.push(
                    KripkeModel::from_colors(frame.clone(), ctx.clone(), colors)
                        .expect("colorings are persistent"),
                );
            }
        }
    }
    out
}

/// All models with `1..=max_worlds` worlds, up to isomorphism.
pub fn models_upto(max_worlds: usize, n: usize, rooted_only: bool) -> Vec<KripkeModel> {
    (1..=max_worlds)
        .flat_map(|k| models(k, n, rooted_only))
        .collect()
}

/// Rooted frames with `1..=max_worlds` worlds, up to isomorphism.
pub fn rooted_frames_upto(max_worlds: usize) -> Vec<KripkeFrame> {
    (1..=max_worlds).flat_map(rooted_posets).collect()
}
