//! Randomized properties checked against brute-force oracles.

use std::f64::consts::TAU;

use nevlab::blaschke_verify::{blaschke_sum, SumWeight};
use nevlab::boundary_set::ArcSet;
use nevlab::quadrature::angular_rule_soft;
use nevlab::weight::WeightParams;
use num_complex::Complex64;
use proptest::prelude::*;

/// Sorted cut points paired into gaps `(c0, c1), (c2, c3), …`; the set is
/// the closed arcs between them.
fn arcset() -> impl Strategy<Value = (ArcSet, Vec<(f64, f64)>)> {
    prop::collection::vec(0.0..TAU, 2..9).prop_filter_map("distinct cuts", |mut c| {
        c.sort_by(f64::total_cmp);
        c.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        if c.len() % 2 == 1 {
            c.pop();
        }
        if c.len() < 2 || c[0] + TAU - c[c.len() - 1] < 1e-3 {
            return None;
        }
        let gaps: Vec<(f64, f64)> = c.chunks(2).map(|w| (w[0], w[1])).collect();
        let arcs: Vec<(f64, f64)> = (0..gaps.len())
            .map(|i| (gaps[i].1, if i + 1 < gaps.len() { gaps[i + 1].0 } else { gaps[0].0 + TAU }))
            .collect();
        ArcSet::new(&gaps).ok().map(|e| (e, arcs))
    })
}

fn brute_distance(arcs: &[(f64, f64)], z: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for &(a, b) in arcs {
        let n = 4000;
        for k in 0..=n {
            let t = a + (b - a) * k as f64 / n as f64;
            best = best.min((z - Complex64::from_polar(1.0, t)).norm());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_matches_sampled_arcs((e, arcs) in arcset(), r in 0.01f64..1.0, t in 0.0..TAU) {
        let z = Complex64::from_polar(r, t);
        let d = e.distance(z).unwrap();
        let brute = brute_distance(&arcs, z);
        // Sampling only overestimates, by at most half a sample spacing.
        prop_assert!(d <= brute + 1e-12);
        prop_assert!(brute - d <= TAU / 4000.0, "d = {d}, sampled {brute}");
    }

    #[test]
    fn neighborhood_measure_matches_counting((e, _) in arcset(), x in 0.0f64..2.5) {
        let n = 20_000;
        let count = (0..n).filter(|&k| e.circle_distance(TAU * (k as f64 + 0.5) / n as f64) < x).count();
        let counted = TAU * count as f64 / n as f64;
        let m = e.neighborhood_measure(x);
        prop_assert!((m - counted).abs() <= 2.0 * (e.gaps().len() + 1) as f64 * TAU / n as f64, "{m} vs {counted}");
        prop_assert!(e.neighborhood_measure(x + 0.1) >= m);
    }

    #[test]
    fn angular_rules_resolve_low_modes(
        hard in prop::collection::vec(0.0..TAU, 0..5),
        soft in prop::collection::vec(0.0..TAU, 0..12),
        n in 64usize..256,
    ) {
        let rule = angular_rule_soft(n, &hard, &soft, 2.0);
        prop_assert!(rule.iter().all(|&(t, w)| (0.0..TAU).contains(&t) && w > 0.0));
        let total: f64 = rule.iter().map(|r| r.1).sum();
        prop_assert!((total - TAU).abs() < 1e-12);
        for k in 1..4 {
            let c: f64 = rule.iter().map(|&(t, w)| w * (k as f64 * t + 0.3).cos()).sum();
            prop_assert!(c.abs() < 1e-7, "mode {k}: {c}");
        }
    }

    #[test]
    fn blaschke_sums_are_additive_and_positive(
        (e, _) in arcset(),
        zs in prop::collection::vec((0.0f64..0.99, 0.0..TAU), 0..10),
        split in 0usize..10,
        p in 0.0f64..2.0,
        q in 0.25f64..2.0,
    ) {
        let zeros: Vec<Complex64> = zs.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        let params = WeightParams::with_q(p, q).unwrap();
        let k = split.min(zeros.len());
        for v in [SumWeight::Phi, SumWeight::DistPower { exponent: 1.5 }] {
            let all = blaschke_sum(&zeros, &e, &params, v).unwrap();
            let a = blaschke_sum(&zeros[..k], &e, &params, v).unwrap();
            let b = blaschke_sum(&zeros[k..], &e, &params, v).unwrap();
            prop_assert!(all >= 0.0);
            prop_assert!((all - a - b).abs() <= 1e-12 * (1.0 + all));
        }
    }
}
