//! Distance and serving-road distributions of the road network as seen from
//! the typical vehicle at the origin.
//!
//! Roads other than the typical vehicle's own road `L0` have perpendicular
//! distances forming a Poisson process of intensity `2ρ` on `[0, ∞)`. The
//! serving RSU is the nearest RSU over all roads; its road is `L0` (event
//! ε0) or the road with rank `n` (event εn).
//!
//! Densities of serving distances are the *within-road* nearest-RSU laws.
//! The requirement that no other road holds a closer RSU is carried by the
//! event probabilities [`prob_e0_given_distance`] and
//! [`prob_en_given_distance`], which are void probabilities of the
//! remaining roads inside the disk `b(o, r)`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;
use crate::quadrature::{try_integrate, try_sum_ranks, QuadratureSpec, SeriesSum};

/// Which road hosts the nearest RSU.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServingEvent {
    /// ε0: the receiver's own road.
    OwnRoad,
    /// εn: the road of rank `rank ≥ 1` (ordered by perpendicular distance),
    /// lying at perpendicular distance `y > 0`.
    CrossRoad { rank: usize, y: f64 },
}

impl ServingEvent {
    pub fn cross(rank: usize, y: f64) -> Result<Self> {
        if rank < 1 {
            return Err(invalid("rank", "cross-road ranks start at 1"));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(invalid("y", format!("must be > 0, got {y}")));
        }
        Ok(Self::CrossRoad { rank, y })
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::OwnRoad => 0,
            Self::CrossRoad { rank, .. } => *rank,
        }
    }
}

/// Erlang(n, 2ρ) density of the distance to the `n`-th nearest road.
/// Zero for `n = 0` or `y < 0`.
pub fn pdf_yn(params: &ModelParams, n: usize, y: f64) -> f64 {
    if n == 0 || y < 0.0 {
        return 0.0;
    }
    let rate = 2.0 * params.rho;
    let x = rate * y;
    let mut v = rate * (-x).exp();
    for k in 1..n {
        v *= x / k as f64;
    }
    v
}

/// Erlang(n, 2ρ) distribution function.
pub fn cdf_yn(params: &ModelParams, n: usize, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    let x = 2.0 * params.rho * y;
    let mut term = 1.0;
    let mut partial = 1.0;
    for k in 1..n {
        term *= x / k as f64;
        partial += term;
    }
    1.0 - (-x).exp() * partial
}

/// Density of the nearest-RSU distance along the receiver's own road.
pub fn pdf_serving_distance_own(params: &ModelParams, r: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    let rate = 2.0 * params.lambda_ru;
    rate * (-rate * r).exp()
}

pub fn cdf_serving_distance_own(params: &ModelParams, r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        -(-2.0 * params.lambda_ru * r).exp_m1()
    }
}

/// Density of the nearest-RSU distance on a road at perpendicular distance `y`.
pub fn pdf_serving_distance_cross(params: &ModelParams, r: f64, y: f64) -> Result<f64> {
    if r < y || y < 0.0 {
        return Err(Error::Support { r, min: y });
    }
    let chord = ((r - y) * (r + y)).sqrt();
    if chord == 0.0 {
        return Ok(f64::INFINITY);
    }
    let rate = 2.0 * params.lambda_ru;
    Ok(rate * r * (-rate * chord).exp() / chord)
}

pub fn cdf_serving_distance_cross(params: &ModelParams, r: f64, y: f64) -> f64 {
    if r <= y {
        return 0.0;
    }
    let chord = ((r - y) * (r + y)).sqrt();
    -(-2.0 * params.lambda_ru * chord).exp_m1()
}

/// `∫_0^y exp(-2λ_ru √(r² − u²)) du` for `0 ≤ y ≤ r`, the mean of a road's
/// void probability over roads crossing `b(o, r)` at distances below `y`
/// (times `y`).
pub(crate) fn chord_void_mass(params: &ModelParams, r: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    if y <= 0.0 || r <= 0.0 {
        return Ok(0.0);
    }
    let upper = (y / r).min(1.0).asin();
    let a = 2.0 * params.lambda_ru * r;
    Ok(try_integrate(|psi| Ok((-a * psi.cos()).exp() * r * psi.cos()), 0.0, upper, spec)?.value)
}

/// `2ρ ∫_0^r (1 − exp(−2λ_ru √(r² − u²))) du`: minus the log-probability that
/// no road other than `L0` has an RSU inside `b(o, r)`.
pub fn other_roads_void_exponent(params: &ModelParams, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    let a = 2.0 * params.lambda_ru * r;
    // (1 − e^{−a cos ψ}) cos ψ, integrated over ψ ∈ [0, π/2] with u = r sin ψ
    let mass = try_integrate(|psi| Ok(-(-a * psi.cos()).exp_m1() * psi.cos()), 0.0, FRAC_PI_2, spec)?;
    Ok(2.0 * params.rho * r * mass.value)
}

/// Probability that, given the own-road nearest RSU sits at distance `r`, no
/// other road has a closer RSU.
pub fn prob_e0_given_distance(params: &ModelParams, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok((-other_roads_void_exponent(params, r, spec)?).exp())
}

/// Void probability `P[N(b(o, r)) = 0]` of the whole RSU process, which by
/// the distance/count duality equals `P[dist(o, Φ_ru) > r]`.
pub fn void_probability(params: &ModelParams, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if r <= 0.0 {
        return Ok(1.0);
    }
    Ok((-2.0 * params.lambda_ru * r - other_roads_void_exponent(params, r, spec)?).exp())
}

/// Distribution function of the serving (overall nearest RSU) distance.
pub fn serving_distance_cdf(params: &ModelParams, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(1.0 - void_probability(params, r, spec)?)
}

/// Probability that the serving RSU lies on the typical vehicle's own road.
pub fn prob_e0(params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    let inner = spec.inner();
    let v = try_integrate(
        |r| {
            let w = pdf_serving_distance_own(params, r);
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * prob_e0_given_distance(params, r, &inner)?)
        },
        0.0,
        f64::INFINITY,
        spec,
    )?;
    Ok(v.value)
}

/// Probability that, given the rank-`n` road at distance `y` has its nearest
/// RSU at distance `r ≥ y`, that RSU is the overall nearest: `L0`, the `n − 1`
/// closer roads, and all farther roads are void inside `b(o, r)`.
pub fn prob_en_given_distance(
    params: &ModelParams,
    n: usize,
    y: f64,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if n < 1 {
        return Err(invalid("rank", "cross-road ranks start at 1"));
    }
    if !(y > 0.0) || r < y {
        return Err(Error::Support { r, min: y });
    }
    let inner = chord_void_mass(params, r, y, spec)?;
    let total = chord_void_mass(params, r, r, spec)?;
    let closer = (inner / y).powi(n as i32 - 1);
    let farther = (-2.0 * params.rho * ((r - y) - (total - inner))).exp();
    Ok((-2.0 * params.lambda_ru * r).exp() * closer * farther)
}

/// `Σ_n f_Yn(y) · P[εn | y, r]`: the joint density that some road at
/// distance `y` is the serving road and its nearest RSU is at `r`, per unit
/// `f_R(r | y)`.
pub fn rank_summed_cross_event(params: &ModelParams, y: f64, r: f64, spec: &QuadratureSpec) -> Result<SeriesSum> {
    if !(y > 0.0) || r < y {
        return Err(Error::Support { r, min: y });
    }
    let inner = chord_void_mass(params, r, y, spec)?;
    let total = chord_void_mass(params, r, r, spec)?;
    let base = (-2.0 * params.lambda_ru * r - 2.0 * params.rho * ((r - y) - (total - inner))).exp();
    let ratio = inner / y;
    try_sum_ranks(|n| Ok(pdf_yn(params, n, y) * ratio.powi(n as i32 - 1) * base), spec)
}

/// `f_R(y cosh τ | y) · dr/dτ = 2λ y cosh τ · e^{−2λ y sinh τ}`, the cross-road
/// serving density after the substitution `r = y cosh τ`.
pub(crate) fn cross_weight_tau(params: &ModelParams, y: f64, tau: f64) -> f64 {
    let rate = 2.0 * params.lambda_ru;
    let e = rate * y * tau.sinh();
    if e > 700.0 {
        return 0.0;
    }
    rate * y * tau.cosh() * (-e).exp()
}

/// Probability that the rank-`n` road at distance `y` hosts the serving RSU.
pub fn prob_en_given_yn(params: &ModelParams, n: usize, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    if !(y > 0.0) {
        return Err(invalid("y", format!("must be > 0, got {y}")));
    }
    let inner = spec.inner();
    let v = try_integrate(
        |tau| {
            let w = cross_weight_tau(params, y, tau);
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * prob_en_given_distance(params, n, y, y * tau.cosh(), &inner)?)
        },
        0.0,
        f64::INFINITY,
        spec,
    )?;
    Ok(v.value)
}

/// Density of the serving distance assembled from its road decomposition:
/// the ε0 part plus the rank sum of the εn parts.
pub fn serving_distance_density(params: &ModelParams, r: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if r <= 0.0 {
        return Ok((pdf_serving_distance_own(params, 0.0), 0.0));
    }
    let own = pdf_serving_distance_own(params, r) * prob_e0_given_distance(params, r, spec)?;
    let inner = spec.inner();
    let rate = 2.0 * params.lambda_ru;
    // y = r sin φ turns f_R(r | y) dy into 2λ r e^{−2λ r cos φ} dφ.
    let cross = try_integrate(
        |phi| {
            let y = r * phi.sin();
            let w = rate * r * (-rate * r * phi.cos()).exp();
            let s = try_sum_ranks(
                |n| Ok(pdf_yn(params, n, y) * prob_en_given_distance(params, n, y, r, &inner)?),
                spec,
            )?;
            Ok(w * s.value)
        },
        0.0,
        FRAC_PI_2,
        spec,
    )?;
    Ok((own, cross.value))
}

/// Smallest radius at which the serving-distance survival function drops
/// below `tail`; integrals over the serving distance are truncated there.
pub fn truncation_radius(params: &ModelParams, tail: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    let mut hi = 1.0 / (params.lambda_ru + params.rho);
    while void_probability(params, hi, spec)? > tail {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(invalid("lambda_ru", "serving distance has no usable truncation radius"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if void_probability(params, mid, spec)? > tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 * hi {
            break;
        }
    }
    Ok(hi)
}

/// `E[rb1^k]` of the serving distance.
pub fn serving_distance_moment(params: &ModelParams, k: f64, spec: &QuadratureSpec) -> Result<f64> {
    let inner = spec.inner();
    let v = try_integrate(
        |r| Ok(k * r.powf(k - 1.0) * void_probability(params, r, &inner)?),
        0.0,
        f64::INFINITY,
        spec,
    )?;
    Ok(v.value)
}
