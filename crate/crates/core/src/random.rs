//! Seeded generators for formulas, trees and rooted models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, VarContext};
use crate::kripke::{Color, KripkeFrame, KripkeModel, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A formula over `n` variables of depth at most `depth`.
pub fn formula<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..n + 2) {
            0 => Formula::Bot,
            1 if rng.random_bool(0.3) => Formula::Top,
            k => Formula::var((k + n - 2) % n),
        };
    }
    let a = formula(rng, n, depth - 1);
    let b = formula(rng, n, depth - 1);
    match rng.random_range(0..3) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        _ => Formula::implies(a, b),
    }
}

/// An NNIL formula over `n` variables of depth at most `depth`.
pub fn nnil_formula<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return implication_free(rng, n, 0);
    }
    match rng.random_range(0..3) {
        0 => Formula::and(
            nnil_formula(rng, n, depth - 1),
            nnil_formula(rng, n, depth - 1),
        ),
        1 => Formula::or(
            nnil_formula(rng, n, depth - 1),
            nnil_formula(rng, n, depth - 1),
        ),
        _ => Formula::implies(
            implication_free(rng, n, depth - 1),
            nnil_formula(rng, n, depth - 1),
        ),
    }
}

fn implication_free<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.4) {
        return match rng.random_range(0..n + 1) {
            0 => Formula::Bot,
            k => Formula::var(k - 1),
        };
    }
    let a = implication_free(rng, n, depth - 1);
    let b = implication_free(rng, n, depth - 1);
    if rng.random_bool(0.5) {
        Formula::and(a, b)
    } else {
        Formula::or(a, b)
    }
}

fn grow_color<R: Rng>(rng: &mut R, base: Color, n: usize) -> Color {
    let extra = if rng.random_bool(0.5) {
        0
    } else {
        rng.random_range(0..1u64 << n)
    };
    Color::new(base.bits() | extra, n)
}

/// A tree with `1..=max_nodes` nodes over `n` variables; every node hangs
/// below a uniformly chosen earlier node.
pub fn tree<R: Rng>(rng: &mut R, n: usize, max_nodes: usize) -> Tree {
    let size = rng.random_range(1..=max_nodes.max(1));
    let mut parent = vec![None];
    let mut colors = vec![Color::new(rng.random_range(0..1u64 << n), n)];
    for i in 1..size {
        let p = rng.random_range(0..i);
        parent.push(Some(p));
        colors.push(grow_color(rng, colors[p], n));
    }
    let ids = (0..size).map(|i| format!("t{i}")).collect();
    Tree::from_parents(ids, parent, colors, VarContext::standard(n)).expect("random tree")
}

/// A rooted model with `1..=max_worlds` worlds over `n` variables; every
/// world after the first sits above one or two earlier worlds.
pub fn rooted_model<R: Rng>(rng: &mut R, n: usize, max_worlds: usize) -> KripkeModel {
    let size = rng.random_range(1..=max_worlds.max(1));
    let mut pairs = Vec::new();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 1..size {
        let mut ps = vec![rng.random_range(0..i)];
        if i > 1 && rng.random_bool(0.4) {
            let q = rng.random_range(0..i);
            if q != ps[0] {
                ps.push(q);
            }
        }
        for &p in &ps {
            pairs.push((p, i));
        }
        parents.push(ps);
    }
    let mut colors: Vec<Color> = Vec::with_capacity(size);
    colors.push(Color::new(rng.random_range(0..1u64 << n), n));
    for ps in parents.iter().skip(1) {
        let base = ps.iter().fold(Color::new(0, n), |c, &p| {
            Color::new(c.bits() | colors[p].bits(), n)
        });
        colors.push(grow_color(rng, base, n));
    }
    let ids = (0..size).map(|i| format!("m{i}")).collect();
    let frame = KripkeFrame::from_pairs(ids, &pairs).expect("edges go upward");
    KripkeModel::from_colors(frame, VarContext::standard(n), colors).expect("colors grow upward")
}
