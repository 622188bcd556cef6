//! Property tests against the naive oracles in `common`.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use rectnerve::dual::build_dual;
use rectnerve::embed::{center_projection, classify_projection, VerdictKind};
use rectnerve::io;
use rectnerve::model::{all_pairs_overlap, partition_balance, sweep_overlap, IntBox};
use rectnerve::orient::Sign;

fn partition(seed: u64, d: usize, n: i64, max_side: i64) -> rectnerve::model::Partition {
    random_partition(&mut ChaCha8Rng::seed_from_u64(seed), d, n, max_side)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_matches_voronoi_on_4x4(seed in any::<u64>(), max_side in 1i64..=4) {
        let p = partition(seed, 2, 4, max_side);
        let del = distorted_delaunay(2, 4);
        prop_assert_eq!(build_dual(&p).unwrap().all_simplices(), voronoi_dual(&p, &del));
    }

    #[test]
    fn every_seed_chain_is_nondegenerate(seed in any::<u64>(), d in 2usize..=3) {
        let p = partition(seed, d, 4, 3);
        let dc = build_dual(&p).unwrap();
        for (_, chain) in dc.top_simplices() {
            prop_assert_ne!(chain.orientation(), Sign::Zero);
        }
    }

    #[test]
    fn orientation_test_matches_injectivity(seed in any::<u64>(), max_side in 1i64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_partition(&mut rng, 2, 4, max_side);
        let dc = build_dual(&p).unwrap();
        prop_assume!(dc.num_top() > 0);
        for _ in 0..5 {
            let proj = random_projection(&mut rng, &p);
            let v = classify_projection(&p, &dc, &proj).unwrap();
            if v.violations.len() == dc.num_top() {
                continue;
            }
            prop_assert_eq!(v.kind == VerdictKind::Embedding, injective_2d(&dc, &proj));
        }
    }

    #[test]
    fn sweep_agrees_with_all_pairs(
        raw in prop::collection::vec((0i64..6, 1i64..4, 0i64..6, 1i64..4), 1..12)
    ) {
        let boxes: Vec<IntBox> = raw
            .iter()
            .map(|&(x, w, y, h)| IntBox::new(vec![x, y], vec![x + w, y + h]).unwrap())
            .collect();
        prop_assert_eq!(sweep_overlap(&boxes).is_some(), all_pairs_overlap(&boxes).is_some());
    }

    #[test]
    fn balance_is_at_least_one(seed in any::<u64>()) {
        let p = partition(seed, 2, 6, 4);
        let dc = build_dual(&p).unwrap();
        if dc.count(1) > 0 {
            prop_assert!(partition_balance(&p, &dc).value >= num_rational::Ratio::from_integer(1));
        }
    }

    #[test]
    fn partition_text_round_trips(seed in any::<u64>(), d in 1usize..=3) {
        let p = partition(seed, d, 4, 3);
        let text = io::write_partition(&p);
        let q = io::parse_partition(&text).unwrap();
        prop_assert_eq!(io::write_partition(&q), text);
    }

    #[test]
    fn projection_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_partition(&mut rng, 2, 5, 3);
        let proj = random_projection(&mut rng, &p);
        let text = io::write_projection(&proj);
        prop_assert_eq!(io::parse_projection(&text, 2).unwrap(), proj);
    }

    #[test]
    fn dual_dump_round_trips(seed in any::<u64>(), d in 2usize..=3) {
        let p = partition(seed, d, 3, 3);
        let dc = build_dual(&p).unwrap();
        let text = io::write_dual(&dc);
        let lines = io::parse_dual(&text).unwrap();
        prop_assert_eq!(io::write_dual_lines(&lines), text);
    }

    #[test]
    fn rendering_is_deterministic(seed in any::<u64>()) {
        let p = partition(seed, 2, 5, 3);
        let dc = build_dual(&p).unwrap();
        let proj = center_projection(&p);
        let spec = io::RenderSpec::default();
        let a = io::render_svg(&p, Some(&proj), &dc, &spec).unwrap();
        let b = io::render_svg(&p, Some(&proj), &dc, &spec).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn uniform_grid_is_center_embeddable() {
    for n in 2..6 {
        let p = partition(0, 2, n, 1);
        let dc = build_dual(&p).unwrap();
        let v = classify_projection(&p, &dc, &center_projection(&p)).unwrap();
        assert_eq!(v.kind, VerdictKind::Embedding);
    }
}

#[test]
fn folded_drawings_are_caught_by_both_tests() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut folded = 0;
    for p in all_partitions_2d(3) {
        let dc = build_dual(&p).unwrap();
        if dc.num_top() < 2 {
            continue;
        }
        for _ in 0..20 {
            let proj = random_projection(&mut rng, &p);
            let v = classify_projection(&p, &dc, &proj).unwrap();
            if v.kind == VerdictKind::NotEmbedding && v.violations.len() < dc.num_top() {
                assert!(!injective_2d(&dc, &proj));
                folded += 1;
            }
        }
    }
    assert!(folded > 0, "no folded drawing sampled");
}
