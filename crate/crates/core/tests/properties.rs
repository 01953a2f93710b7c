use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plpcov::channel::{relay_point, sinr_a, sinr_b, sinr_rel, FadingEpoch};
use plpcov::distributions::{cdf_yn, pdf_serving_distance_cross, pdf_serving_distance_own, pdf_yn, serving_distance_density};
use plpcov::geometry::sample_realization;
use plpcov::montecarlo::{relay_from, relay_records};
use plpcov::{McConfig, ModelParams, Point2, QuadratureSpec, RelayAnalyzer};

fn analyzer() -> &'static RelayAnalyzer {
    static A: OnceLock<RelayAnalyzer> = OnceLock::new();
    A.get_or_init(|| RelayAnalyzer::new(&ModelParams::default(), &QuadratureSpec::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn road_distance_cdfs_order_by_rank(n in 1usize..8, y in 0.0f64..3.0, rho in 0.2f64..5.0) {
        let p = ModelParams { rho, ..Default::default() };
        let lo = cdf_yn(&p, n + 1, y);
        let hi = cdf_yn(&p, n, y);
        prop_assert!(lo <= hi + 1e-15);
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(pdf_yn(&p, n, y) >= 0.0);
    }

    #[test]
    fn distance_densities_are_nonnegative(r in 0.001f64..3.0, yfrac in 0.0f64..1.0, lambda_ru in 0.1f64..10.0) {
        let p = ModelParams { lambda_ru, ..Default::default() };
        prop_assert!(pdf_serving_distance_own(&p, r) >= 0.0);
        let y = yfrac * r;
        prop_assert!(pdf_serving_distance_cross(&p, r, y).unwrap() >= 0.0);
    }

    #[test]
    fn sinrs_are_positive_and_finite(seed in 0u64..10_000, r1 in 0.01f64..0.5) {
        let p = ModelParams::default();
        let real = sample_realization(&p, 3.0, seed).unwrap();
        prop_assume!(real.nearest_rsu(Point2::ORIGIN).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let epoch = FadingEpoch::draw(&real, p.mu, &mut rng);
        let a = sinr_a(&real, &p, &epoch).unwrap();
        let b = sinr_b(&real, &p, &epoch, r1).unwrap();
        prop_assert!(a > 0.0 && a.is_finite());
        prop_assert!(b > 0.0 && b.is_finite());
        if let Ok(rel) = sinr_rel(&real, &p, &epoch, relay_point(&real, r1)) {
            prop_assert!(rel > 0.0 && rel.is_finite());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn serving_density_is_nonnegative(r in 0.0f64..1.5) {
        let (own, cross) = serving_distance_density(&ModelParams::default(), r, &QuadratureSpec::default()).unwrap();
        prop_assert!(own >= 0.0 && cross >= 0.0);
    }

    #[test]
    fn relay_factors_are_probabilities(r1 in 0.03f64..0.25) {
        let a = analyzer();
        let x1 = a.xi1(r1).unwrap().value;
        let x2 = a.xi2(r1).unwrap().value;
        let x3 = a.xi3(r1).unwrap().value;
        for x in [x1, x2, x3] {
            prop_assert!((0.0..=1.0).contains(&x), "{x}");
        }
        prop_assert!(x1 <= x3 + 1e-9, "xi1 {x1} > xi3 {x3}");
        let pc = a.relay_coverage(r1).unwrap();
        prop_assert!((0.0..=1.0).contains(&pc.value));
        prop_assert!(pc.error <= 1e-3, "error budget {}", pc.error);
    }

    #[test]
    fn relay_coverage_falls_with_threshold(t_db in -6.0f64..6.0, dt in 0.5f64..4.0) {
        let spec = QuadratureSpec::default();
        let at = |db: f64| {
            let p = ModelParams::default().with_threshold(10f64.powf(db / 10.0));
            RelayAnalyzer::new(&p, &spec).unwrap().relay_coverage(0.1).unwrap()
        };
        let (lo, hi) = (at(t_db), at(t_db + dt));
        prop_assert!(hi.value <= lo.value + hi.error + lo.error, "{} then {}", lo.value, hi.value);
    }
}

#[test]
fn outage_at_zero_distance_complements_direct_coverage() {
    let a = analyzer();
    let pa = a.scenario_a_coverage().unwrap();
    let x3 = a.xi3(0.0).unwrap();
    assert!((pa.value + x3.value - 1.0).abs() <= 1e-9 + pa.error + x3.error, "{} + {}", pa.value, x3.value);
}

#[test]
fn halving_tolerance_stays_within_reported_error() {
    let p = ModelParams::default();
    let coarse = QuadratureSpec::default();
    let fine = QuadratureSpec { rel_tol: coarse.rel_tol / 2.0, ..coarse };
    let a = RelayAnalyzer::new(&p, &coarse).unwrap().relay_coverage(0.1).unwrap();
    let b = RelayAnalyzer::new(&p, &fine).unwrap().relay_coverage(0.1).unwrap();
    assert!((a.value - b.value).abs() <= a.error, "{} vs {} (error {})", a.value, b.value, a.error);
}

#[test]
fn pipeline_equals_conditional_frequency_times_relay_frequency() {
    let p = ModelParams::default();
    let (t, r1) = (1.0, 0.1);
    let recs = relay_records(&p, &McConfig::new(4_000, 5, 3.0), r1).unwrap();
    let est = relay_from(&recs, t, r1).unwrap();
    let not_a: Vec<_> = recs.iter().filter(|d| !(d.sinr_a > t && d.rb1 > r1)).collect();
    let b_given = not_a.iter().filter(|d| d.sinr_b > t).count() as f64 / not_a.len() as f64;
    let rel = recs.iter().filter(|d| d.sinr_rel > t && d.r0 < d.rb1 && d.rb1 > r1).count() as f64 / recs.len() as f64;
    assert!((est.factors.p_pipeline.value - b_given * rel).abs() < 1e-12);
}
