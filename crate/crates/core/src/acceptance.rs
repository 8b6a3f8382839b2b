//! End-to-end checks of the library's main claims, one report per check.
//! Shared by the `acceptance` test target and the `selftest` command.

use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;

use crate::beta::{self, beta_model, beta_node, beta_plus_node, beta_plus_upset, nnil_equivalent};
use crate::corpus;
use crate::error::Result;
use crate::fmp::{self, frame_normal_form, frame_validates, frame_validates_prime};
use crate::formula::{parse, Formula, VarContext};
use crate::morphisms::{find_all_monotonic, find_monotonic, is_monotonic};
use crate::prover;
use crate::random;
use crate::universal::{self, canonical_tree, check_canonical_iso, generate, universal_tree};

/// Seed shared by every randomized check.
pub const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone)]
pub struct Report {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let limit = self
            .limit
            .map(|l| format!(" (limit {:.0?})", l))
            .unwrap_or_default();
        write!(
            f,
            "[{}] {:>2} {}: {} in {:.2?}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed,
            limit
        )
    }
}

fn timed(
    id: u8,
    title: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> Report {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let in_time = limit.is_none_or(|l| elapsed <= l);
    Report {
        id,
        title,
        passed: ok && in_time,
        detail: if in_time {
            detail
        } else {
            format!("{detail}; over time")
        },
        elapsed,
        limit,
    }
}

/// Size of the universal 2-tree: the unraveling of the four 2-colors
/// from `00` has one copy of `11` above each of `01` and `10`.
pub const UNIVERSAL_2_TREE_NODES: usize = 5;

pub fn universal_two() -> Report {
    timed(1, "T(2) structure", Some(Duration::from_secs(5)), || {
        let un = generate(2)?;
        let t0 = universal_tree(2)?;
        let layers = un.layer_sizes();
        let root_ok = un.code(un.root()) == t0.code();
        let ok =
            un.len() == 18 && layers == [4, 9, 5] && root_ok && t0.len() == UNIVERSAL_2_TREE_NODES;
        Ok((
            ok,
            format!(
                "{}; root {} ({} nodes, equals universal tree: {root_ok})",
                un.stats(),
                un.code(un.root()).display(2),
                t0.len()
            ),
        ))
    })
}

pub fn universal_one() -> Report {
    timed(
        2,
        "T(1) and NNIL_1 classes",
        Some(Duration::from_secs(1)),
        || {
            let un = generate(1)?;
            let classes = universal::count_nnil_classes(1)?;
            Ok((
                un.len() == 3 && classes == 5,
                format!("{} nodes, {classes} classes", un.len()),
            ))
        },
    )
}

pub fn refutation_oracle() -> Report {
    timed(
        3,
        "refutation by monotonic maps",
        Some(Duration::from_secs(120)),
        || {
            let ns = corpus::models_upto(3, 2, true);
            let ms = corpus::models_upto(3, 2, false);
            let mut mismatches = 0;
            for n in &ns {
                let b = beta_model(n)?;
                for m in &ms {
                    let witness = beta::refutation_witness(n, m)?.is_some();
                    let refuted = !m.validates(&b)?;
                    if witness != refuted {
                        mismatches += 1;
                    }
                }
            }
            Ok((
                mismatches == 0,
                format!("{} x {} pairs, {mismatches} mismatches", ns.len(), ms.len()),
            ))
        },
    )
}

pub fn beta_self_refutation() -> Report {
    timed(4, "beta fails where built", None, || {
        let ms = corpus::models_upto(4, 2, false);
        let mut checked = 0;
        let mut exceptions = 0;
        for m in &ms {
            for w in 0..m.len() {
                checked += 1;
                if m.force(w, &beta_node(m, w)?)? {
                    exceptions += 1;
                }
            }
        }
        Ok((
            exceptions == 0,
            format!(
                "{} models, {checked} worlds, {exceptions} exceptions",
                ms.len()
            ),
        ))
    })
}

pub fn rigid_nodes() -> Report {
    timed(5, "T(2) nodes have only identity self-maps", None, || {
        let un = generate(2)?;
        let mut exceptions = 0;
        for w in 0..un.len() {
            let t = un.tree(w).into_model();
            let maps = find_all_monotonic(&t, &t, usize::MAX);
            if maps.len() != 1 || !maps[0].is_identity() {
                exceptions += 1;
            }
        }
        Ok((
            exceptions == 0,
            format!("{} nodes, {exceptions} exceptions", un.len()),
        ))
    })
}

pub fn beta_plus_definability() -> Report {
    timed(6, "beta-plus defines upsets", None, || {
        let un = generate(2)?;
        let model = un.as_model();
        let mut bad = 0;
        for w in 0..un.len() {
            let f = beta_plus_node(&un, w)?;
            let up = un.upset_of(w);
            if model.truth_set(&f)? != up {
                bad += 1;
            }
            for (v, &above) in up.iter().enumerate() {
                let t = un.tree(v);
                if t.model().force(t.root(), &f)? != above {
                    bad += 1;
                }
            }
        }
        let all = un.upset_masks()?;
        let mut rng = random::rng(SEED);
        let sample: Vec<u64> = all.choose_multiple(&mut rng, 20).copied().collect();
        for &mask in &sample {
            let set = universal::from_mask(mask, un.len());
            if model.truth_set(&beta_plus_upset(&un, &set)?)? != set {
                bad += 1;
            }
        }
        Ok((
            bad == 0,
            format!(
                "{} nodes, {} of {} upsets sampled, {bad} mismatches",
                un.len(),
                sample.len(),
                all.len()
            ),
        ))
    })
}

pub fn canonical_reduction() -> Report {
    timed(7, "canonical trees of random 2-trees", None, || {
        let un = generate(2)?;
        let mut rng = random::rng(SEED);
        let mut failures = 0;
        for _ in 0..200 {
            let t = random::tree(&mut rng, 2, 8);
            let c = canonical_tree(&t);
            let in_model = un.node_of(c.code()).is_some();
            let there = find_monotonic(t.model(), c.model()).is_some();
            let back = find_monotonic(c.model(), t.model()).is_some();
            let idempotent = canonical_tree(&c).code() == c.code();
            if !(in_model && there && back && idempotent) {
                failures += 1;
            }
        }
        Ok((failures == 0, format!("200 trees, {failures} failures")))
    })
}

pub fn canonical_iso() -> Report {
    timed(8, "theories form a copy of T(n)", None, || {
        let one = check_canonical_iso(1)?;
        let two = check_canonical_iso(2)?;
        Ok((
            one.passed() && two.passed(),
            format!(
                "n=1: {} nodes/{} classes {}; n=2: {} nodes/{} classes {}",
                one.nodes,
                one.classes,
                if one.passed() { "ok" } else { "failed" },
                two.nodes,
                two.classes,
                if two.passed() { "ok" } else { "failed" }
            ),
        ))
    })
}

pub fn substructure_closure() -> Report {
    timed(9, "beta validity survives substructures", None, || {
        let ns = corpus::models_upto(3, 2, true);
        let ms = corpus::models_upto(3, 2, false);
        let betas: Vec<Formula> = ns.iter().map(beta_model).collect::<Result<_>>()?;
        let mut pairs = 0;
        let mut exceptions = 0;
        for m in &ms {
            for b in &betas {
                if !m.validates(b)? {
                    continue;
                }
                pairs += 1;
                for mask in 1u32..1 << m.len() {
                    let worlds: Vec<usize> = (0..m.len()).filter(|&w| mask >> w & 1 == 1).collect();
                    if !m.submodel(&worlds)?.validates(b)? {
                        exceptions += 1;
                    }
                }
            }
        }
        Ok((
            exceptions == 0,
            format!("{pairs} valid pairs, {exceptions} exceptions"),
        ))
    })
}

/// Twelve formulas over two variables mixing every connective, up to five
/// compound subformulas each.
pub fn normal_form_sample() -> Vec<Formula> {
    let ctx = VarContext::standard(2);
    [
        "p1 | ~p1",
        "~p1 | ~~p1",
        "((p1 -> p2) -> p1) -> p1",
        "(p1 -> p2) | (p2 -> p1)",
        "~~p1 -> p1",
        "p1 & p2 -> p1",
        "~~p1",
        "p1 | (p1 -> p2 | ~p2)",
        "(~p1 -> p2) -> p2 | p1",
        "p1 & ~p1 -> p2",
        "((p1 -> p2) -> p2) -> (p2 -> p1) -> p1",
        "~(p1 & p2) | ~~(p1 & p2)",
    ]
    .iter()
    .map(|s| parse(s, &ctx).expect("sample formulas parse"))
    .collect()
}

pub fn frame_normal_forms() -> Report {
    timed(
        10,
        "frame normal form keeps frame validity",
        Some(Duration::from_secs(300)),
        || {
            let ctx = VarContext::standard(2);
            let frames = corpus::rooted_frames_upto(fmp::MAX_EXHAUSTIVE_WORLDS);
            let sample = normal_form_sample();
            let mut mismatches = 0;
            for f in &sample {
                let fnf = frame_normal_form(f, &ctx)?;
                for fr in &frames {
                    if frame_validates(fr, f, 2) != frame_validates_prime(fr, &fnf) {
                        mismatches += 1;
                    }
                }
            }
            Ok((
                mismatches == 0,
                format!(
                    "{} frames x {} formulas, {mismatches} mismatches",
                    frames.len(),
                    sample.len()
                ),
            ))
        },
    )
}

pub fn model_reduction() -> Report {
    timed(11, "color-preserving reduction", None, || {
        let mut rng = random::rng(SEED);
        let mut trees = 0;
        let mut failures = 0;
        for _ in 0..200 {
            let m = random::rooted_model(&mut rng, 2, 10);
            let (r, map) = fmp::reduce(&m)?;
            let same_root = r.id(r.root().expect("rooted")) == m.id(m.root().expect("rooted"));
            let mut ok = same_root && fmp::is_color_preserving_submodel(&r, &m)?;
            if m.frame().is_tree_like() {
                trees += 1;
                ok &= match &map {
                    Some(f) => {
                        is_monotonic(f, &m, &r)
                            && f.is_surjective(r.len())
                            && nnil_equivalent(&m, m.root().unwrap(), &r, r.root().unwrap())?
                    }
                    None => false,
                };
            }
            if !ok {
                failures += 1;
            }
        }
        Ok((
            failures == 0,
            format!("200 models ({trees} trees), {failures} failures"),
        ))
    })
}

pub fn prover_agreement() -> Report {
    timed(12, "prover agrees with countermodel search", None, || {
        let mut rng = random::rng(SEED);
        let mut provable = 0;
        let mut disagreements = 0;
        for _ in 0..500 {
            let f = random::formula(&mut rng, 2, 4);
            let proved = prover::proves(&[], &f);
            let counter = prover::semantic_countermodel(&f, 5).is_some();
            provable += usize::from(proved);
            if proved == counter {
                disagreements += 1;
            }
        }
        Ok((
            disagreements == 0,
            format!("500 formulas ({provable} provable), {disagreements} disagreements"),
        ))
    })
}

/// Runs every check in order.
pub fn run_all() -> Vec<Report> {
    vec![
        universal_two(),
        universal_one(),
        refutation_oracle(),
        beta_self_refutation(),
        rigid_nodes(),
        beta_plus_definability(),
        canonical_reduction(),
        canonical_iso(),
        substructure_closure(),
        frame_normal_forms(),
        model_reduction(),
        prover_agreement(),
    ]
}
