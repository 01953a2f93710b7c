//! Numerical integration: globally adaptive Gauss–Kronrod quadrature on finite
//! and semi-infinite intervals, truncated sums over road ranks, and Chebyshev
//! interpolants for cumulative integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};

mod chebyshev;

pub use chebyshev::{Chebyshev, PiecewiseChebyshev};

/// Tolerances shared by every integral and series in the analytic pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any single subinterval.
    pub max_depth: u32,
    /// A rank sum stops once a term falls below this fraction of the running sum.
    pub series_tail_tol: f64,
    /// Hard cap on the number of ranks in a sum.
    pub n_max: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_depth: 60,
            series_tail_tol: 1e-5,
            n_max: 20,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("series_tail_tol", self.series_tail_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if self.n_max < 1 {
            return Err(invalid("n_max", "must be at least 1"));
        }
        if self.max_depth < 1 {
            return Err(invalid("max_depth", "must be at least 1"));
        }
        Ok(())
    }

    /// Tighter tolerances for an integral nested inside another one.
    pub fn inner(&self) -> Self {
        Self {
            rel_tol: (self.rel_tol * 1e-2).max(1e-12),
            abs_tol: (self.abs_tol * 1e-2).max(1e-15),
            ..*self
        }
    }
}

/// Value of a definite integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// Kronrod 15-point nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights on the odd nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64, depth: u32) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x })
        }
    };
    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        *slot = (f1, f2);
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        depth,
    })
}

const MAX_SEGMENTS: usize = 4000;

fn adaptive<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(gauss_kronrod(&mut f, a, b, 0)?);
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let budget = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= budget {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = !(worst.a < mid && mid < worst.b);
        if worst.depth >= spec.max_depth || too_narrow || heap.len() + 2 > MAX_SEGMENTS {
            return Err(Error::Quadrature {
                a: worst.a,
                b: worst.b,
                error,
                budget,
            });
        }
        heap.push(gauss_kronrod(&mut f, worst.a, mid, worst.depth + 1)?);
        heap.push(gauss_kronrod(&mut f, mid, worst.b, worst.depth + 1)?);
        evaluations += 30;
    }
}

/// Integrates a fallible integrand over `[a, b]`, where `b` may be `+∞`.
///
/// Semi-infinite ranges use the substitution `x = a + t / (1 - t)`. Integrable
/// endpoint singularities are handled by repeated bisection toward the
/// endpoint (the Kronrod nodes never touch an endpoint). On non-convergence
/// the error names the subinterval with the largest remaining error.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !a.is_finite() || b.is_nan() {
        return Err(invalid("bounds", format!("[{a}, {b}] is not a valid range")));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        let r = try_integrate(f, b, a, spec)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    if b.is_infinite() {
        adaptive(
            |t: f64| {
                let s = 1.0 - t;
                f(a + t / s).map(|v| v / (s * s))
            },
            0.0,
            1.0,
            spec,
        )
    } else {
        adaptive(f, a, b, spec)
    }
}

/// Infallible-integrand convenience wrapper around [`try_integrate`].
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, spec)
}

/// Result of a truncated sum over road ranks `n = 1, 2, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Last rank included in the sum.
    pub ranks_used: usize,
    /// The rank cap was hit before the tail criterion was met.
    pub capped: bool,
}

/// Sums `term(1) + term(2) + …` for nonnegative, eventually decreasing terms.
///
/// Stops at the first rank whose term is both smaller than its predecessor
/// and below `series_tail_tol` times the running sum; never exceeds `n_max`.
pub fn try_sum_ranks<F>(mut term: F, spec: &QuadratureSpec) -> Result<SeriesSum>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in 1..=spec.n_max {
        let t = term(n)?;
        sum += t;
        if n > 1 && t <= prev && t <= spec.series_tail_tol * sum {
            return Ok(SeriesSum {
                value: sum,
                ranks_used: n,
                capped: false,
            });
        }
        prev = t;
    }
    Ok(SeriesSum {
        value: sum,
        ranks_used: spec.n_max,
        capped: true,
    })
}

pub fn sum_ranks<F>(mut term: F, spec: &QuadratureSpec) -> SeriesSum
where
    F: FnMut(usize) -> f64,
{
    try_sum_ranks(|n| Ok(term(n)), spec).expect("infallible terms")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn exponential_on_half_line() {
        let r = integrate(|x| (-x).exp(), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{r:?}");
        assert!(r.error <= 1e-6);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularity() {
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn rational_tail_against_arctan() {
        // ∫_r^∞ s x^{-2} / (μ + s x^{-2}) dx = √(s/μ) (π/2 − arctan(r √(μ/s)))
        let closed = |s: f64, mu: f64, r: f64| (s / mu).sqrt() * (0.5 * PI - (r * (mu / s).sqrt()).atan());
        for &(s, mu, r) in &[(1.0, 1.0, 0.0), (2.0, 0.5, 0.3), (0.01, 1.0, 1.5)] {
            let q = integrate(
                |x| {
                    let g = s / (x * x);
                    g / (mu + g)
                },
                r,
                f64::INFINITY,
                &QuadratureSpec { rel_tol: 1e-10, abs_tol: 1e-13, ..spec() },
            )
            .unwrap();
            assert!((q.value - closed(s, mu, r)).abs() < 1e-8, "{s} {mu} {r}: {q:?}");
        }
        let q = integrate(|x| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((q.value - 0.5 * PI).abs() < 1e-6);
    }

    #[test]
    fn reversed_and_empty_ranges() {
        let f = |x: f64| x * x;
        assert_eq!(integrate(f, 1.0, 1.0, &spec()).unwrap().value, 0.0);
        let r = integrate(f, 1.0, 0.0, &spec()).unwrap();
        assert!((r.value + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_names_worst_interval() {
        // Non-integrable at 0.
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, &QuadratureSpec { max_depth: 20, ..spec() });
        match r {
            Err(Error::Quadrature { a, .. }) => assert_eq!(a, 0.0),
            other => panic!("expected a quadrature failure, got {other:?}"),
        }
    }

    #[test]
    fn errors_from_the_integrand_propagate() {
        let r = try_integrate(|_| Err(Error::NoRsuInWindow), 0.0, 1.0, &spec());
        assert_eq!(r.unwrap_err(), Error::NoRsuInWindow);
        let r = integrate(|_| f64::NAN, 0.0, 1.0, &spec());
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn refinement_is_stable() {
        let f = |x: f64| (-x * x).exp() * (3.0 * x).cos();
        let coarse = integrate(f, 0.0, f64::INFINITY, &spec()).unwrap();
        let fine = integrate(
            f,
            0.0,
            f64::INFINITY,
            &QuadratureSpec { rel_tol: 0.5 * spec().rel_tol, ..spec() },
        )
        .unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.error.max(1e-15));
    }

    #[test]
    fn geometric_series() {
        let s = sum_ranks(|n| 0.5f64.powi(n as i32), &QuadratureSpec { n_max: 60, ..spec() });
        assert!((s.value - 1.0).abs() < 1e-4, "{s:?}");
        assert!(!s.capped);
    }

    #[test]
    fn zero_terms_sum_to_zero() {
        let s = sum_ranks(|_| 0.0, &spec());
        assert_eq!(s.value, 0.0);
        assert!(!s.capped);
    }

    #[test]
    fn erlang_weighted_constants_match_oversummation() {
        // Σ_n f_Yn(y) c_n with f_Yn the Erlang(n, 2ρ) density.
        let (rho, y) = (2.0f64, 0.7f64);
        let erlang = |n: usize| {
            let x = 2.0 * rho * y;
            let mut v = 2.0 * rho * (-x).exp();
            for k in 1..n {
                v *= x / k as f64;
            }
            v
        };
        let c = |n: usize| 1.0 / (1.0 + n as f64);
        let truncated = sum_ranks(|n| erlang(n) * c(n), &spec());
        let direct: f64 = (1..=50).map(|n| erlang(n) * c(n)).sum();
        assert!((truncated.value - direct).abs() <= 1e-4 * direct, "{truncated:?} vs {direct}");
    }

    #[test]
    fn cap_is_flagged() {
        let s = sum_ranks(|_| 1.0, &QuadratureSpec { n_max: 7, ..spec() });
        assert!(s.capped);
        assert_eq!(s.ranks_used, 7);
        assert_eq!(s.value, 7.0);
    }

    #[test]
    fn spec_validation() {
        assert!(spec().validate().is_ok());
        assert!(QuadratureSpec { rel_tol: 0.0, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { n_max: 0, ..spec() }.validate().is_err());
    }
}
