//! Map searches against brute-force enumeration of all functions.

use nnil_core::corpus;
use nnil_core::morphisms::{
    equiv, find_color_consistent, find_monotonic, is_color_consistent, is_monotonic, leq,
    synthesize_valuation,
};
use nnil_core::{KripkeModel, NodeMap};

fn all_functions(src: usize, dst: usize) -> impl Iterator<Item = NodeMap> {
    let total = dst.pow(src as u32);
    (0..total).map(move |mut code| {
        let mut images = Vec::with_capacity(src);
        for _ in 0..src {
            images.push(code % dst);
            code /= dst;
        }
        NodeMap::new(images)
    })
}

fn brute_monotonic(src: &KripkeModel, dst: &KripkeModel) -> bool {
    all_functions(src.len(), dst.len()).any(|f| is_monotonic(&f, src, dst))
}

#[test]
fn search_is_complete_on_small_rooted_models() {
    let models = corpus::models_upto(3, 2, true);
    for a in &models {
        for b in &models {
            let found = find_monotonic(a, b);
            if let Some(f) = &found {
                assert!(is_monotonic(f, a, b));
            }
            assert_eq!(found.is_some(), brute_monotonic(a, b));
        }
    }
}

#[test]
fn color_consistent_search_is_complete() {
    let trees = corpus::models_upto(3, 2, true);
    let frames = corpus::rooted_frames_upto(3);
    for t in &trees {
        for fr in &frames {
            let found = find_color_consistent(t, fr);
            let brute = all_functions(t.len(), fr.len()).any(|f| is_color_consistent(&f, t, fr));
            assert_eq!(found.is_some(), brute);
        }
    }
}

#[test]
fn order_on_models_is_a_preorder() {
    let models = corpus::models_upto(3, 2, true);
    for a in &models {
        assert!(leq(a, a) && equiv(a, a));
    }
    for a in &models {
        for b in &models {
            if !leq(a, b) {
                continue;
            }
            for c in &models {
                if leq(b, c) {
                    assert!(leq(a, c));
                }
            }
        }
    }
}

#[test]
fn synthesized_valuations_make_witnesses_monotonic() {
    let sources = corpus::models_upto(3, 2, true);
    let frames = corpus::rooted_frames_upto(4);
    let mut witnesses = 0;
    for n in &sources {
        let t = nnil_core::kripke::unravel(n).unwrap();
        for fr in &frames {
            if let Some(f) = find_color_consistent(t.model(), fr) {
                witnesses += 1;
                let m = synthesize_valuation(&f, t.model(), fr).unwrap();
                assert!(is_monotonic(&f, t.model(), &m));
            }
        }
    }
    assert!(witnesses > 0);
}
