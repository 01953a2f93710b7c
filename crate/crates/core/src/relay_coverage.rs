//! Analytic coverage: direct (Scenario A) coverage and the one-hop relay
//! coverage `ξ1 · ξ2 / ξ3`.
//!
//! * `ξ1(r1) = P[SINR_B > T] − P[SINR_B > T, SINR_A > T, rb1 > r1]`
//! * `ξ2(r1) = P[SINR_rel > T, r0 < rb1, rb1 > r1]` with `r0` and `rb1`
//!   independent
//! * `ξ3(r1) = 1 − P[SINR_A > T, rb1 > r1]`
//!
//! Each is an integral over the serving distance of a *coverage density*
//! split into the own-road part and the cross-road part (itself an integral
//! over the serving road's distance `y` with the rank sum inside).

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use crate::distributions::{
    cross_weight_tau, pdf_serving_distance_own, pdf_yn, prob_e0_given_distance, prob_en_given_distance,
    rank_summed_cross_event, truncation_radius, void_probability, ServingEvent,
};
use crate::error::{invalid, Error, Result};
use crate::laplace::{joint_lt, vehicle_lt, Conditioning, InterferenceComponent, RadialProfile};
use crate::model::{derive_scales, ModelParams, SinrScales};
use crate::quadrature::{try_integrate, try_sum_ranks, PiecewiseChebyshev, QuadratureSpec};

/// Floor below which `ξ3` is treated as zero.
pub const XI3_FLOOR: f64 = 1e-6;

/// Tail mass of the serving distance ignored by truncating its integrals.
const SERVING_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Largest rank reached by any rank sum.
    pub max_ranks: usize,
    /// Rank sums that hit `n_max` with a non-negligible last term.
    pub capped_sums: usize,
    /// Named integral error estimates.
    pub errors: Vec<(String, f64)>,
    /// `[ξ1, ξ2, ξ3]` when the estimate is a relay coverage.
    pub xi: Option<[f64; 3]>,
}

impl Diagnostics {
    fn absorb(&mut self, other: &Diagnostics) {
        self.max_ranks = self.max_ranks.max(other.max_ranks);
        self.capped_sums += other.capped_sums;
        self.errors.extend(other.errors.iter().cloned());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEstimate {
    pub value: f64,
    pub method: Method,
    /// Quadrature error budget (analytic) or 95% CI half-width (Monte Carlo).
    pub error: f64,
    pub diagnostics: Diagnostics,
}

/// Interference scales and prefactor of one coverage event at serving distance `r`.
#[derive(Debug, Clone, Copy)]
struct LinkScales {
    /// RSU kernel scales `(s_a, s_b)`.
    rsu: (f64, f64),
    /// Vehicle kernel scales.
    veh: (f64, f64),
    /// Thermal factor, times the epoch-B factor of the serving RSU for joint events.
    factor: f64,
}

fn direct_scales(params: &ModelParams, r: f64) -> LinkScales {
    let s = params.mu * params.threshold * params.dist_pow(r);
    LinkScales {
        rsu: (s, 0.0),
        veh: (params.nu * s / params.kappa, 0.0),
        factor: (-s * params.noise / params.kappa).exp(),
    }
}

fn joint_factor(params: &ModelParams, rb1: f64, s: &SinrScales) -> f64 {
    let thermal = (-params.noise * (s.s6 / params.nu + s.s7 / params.kappa)).exp();
    // the serving RSU is an ordinary interferer while the relay transmits
    let server = params.mu / (params.mu + s.s5 / params.dist_pow(rb1));
    thermal * server
}

fn joint_scales(params: &ModelParams, r1: f64, rb1: f64) -> Result<LinkScales> {
    let s = derive_scales(params, 0.0, r1, rb1)?;
    Ok(LinkScales {
        rsu: (s.s5, s.s7),
        veh: (s.s6, s.s8),
        factor: joint_factor(params, rb1, &s),
    })
}

/// Own-road and cross-road parts of a coverage density at serving distance `r`.
#[derive(Debug, Clone, Copy, Default)]
struct DensitySplit {
    own: f64,
    cross: f64,
    max_ranks: usize,
    capped: usize,
}

fn coverage_density(params: &ModelParams, r: f64, link: &LinkScales, spec: &QuadratureSpec) -> Result<DensitySplit> {
    let inner = spec.inner();
    let prof = RadialProfile::new(params, r, link.rsu.0, link.rsu.1, &inner)?;
    let vt = vehicle_lt(link.veh.0, link.veh.1, params, &inner)?;
    let common = link.factor * vt * prof.i0() * prof.i4();
    let rho2 = 2.0 * params.rho;
    let lam2 = 2.0 * params.lambda_ru;
    let a_full = prof.void_mass(r);
    let p_e0 = (-rho2 * (r - a_full)).exp();
    let own = pdf_serving_distance_own(params, r) * p_e0 * prof.i3(0.0) * common;
    if r <= 0.0 || common == 0.0 {
        return Ok(DensitySplit { own, ..Default::default() });
    }
    let mut max_ranks = 0;
    let mut capped = 0;
    // y = r sin φ turns f_R(r | y) dy into 2λ r e^{−2λ r cos φ} dφ
    let cross = try_integrate(
        |phi| {
            let y = r * phi.sin();
            let weight = lam2 * r * (-lam2 * r * phi.cos()).exp();
            let a = prof.void_mass(y);
            let event = (-lam2 * r - rho2 * ((r - y) - (a_full - a))).exp();
            let ratio = a / y;
            let sum = try_sum_ranks(|n| Ok(pdf_yn(params, n, y) * ratio.powi(n as i32 - 1) * prof.i2(n, y)), spec)?;
            max_ranks = max_ranks.max(sum.ranks_used);
            let value = weight * event * sum.value * prof.i1(y) * prof.i3(y);
            if sum.capped && value * common > spec.abs_tol {
                capped += 1;
            }
            Ok(value)
        },
        0.0,
        FRAC_PI_2,
        &inner,
    )?;
    Ok(DensitySplit {
        own,
        cross: cross.value * common,
        max_ranks,
        capped,
    })
}

/// `P[ε0 | r] · e^{−s_a N/κ} · L_I0 L_I3 L_I4(s_a | ε0, r) · L_Ivt(s_b)`: direct
/// coverage given own-road service at distance `r`, with `s_a` the RSU and
/// `s_b` the vehicle interference scale.
pub fn pc1_a(r: f64, s_a: f64, s_b: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid("r", format!("must be > 0, got {r}")));
    }
    let cond = Conditioning::Serving {
        event: ServingEvent::OwnRoad,
        rb1: r,
    };
    let lt = own_road_rsu_lt(s_a, 0.0, params, cond, spec)?;
    Ok(prob_e0_given_distance(params, r, spec)?
        * (-s_a * params.noise / params.kappa).exp()
        * lt
        * vehicle_lt(s_b, 0.0, params, spec)?)
}

/// Rank-`n` analogue of [`pc1_a`] for service from the road at distance
/// `y`, including the road-distance density `f_Yn(y)`.
pub fn pc2_a(
    r: f64,
    s_a: f64,
    s_b: f64,
    y: f64,
    n: usize,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let event = ServingEvent::cross(n, y)?;
    if r < y {
        return Err(Error::Support { r, min: y });
    }
    let cond = Conditioning::Serving { event, rb1: r };
    let lt = cross_road_rsu_lt(s_a, 0.0, params, cond, spec)?;
    Ok(prob_en_given_distance(params, n, y, r, spec)?
        * (-s_a * params.noise / params.kappa).exp()
        * lt
        * vehicle_lt(s_b, 0.0, params, spec)?
        * pdf_yn(params, n, y))
}

fn own_road_rsu_lt(s_a: f64, s_b: f64, params: &ModelParams, cond: Conditioning, spec: &QuadratureSpec) -> Result<f64> {
    use InterferenceComponent as C;
    let mut v = 1.0;
    for c in [C::I0, C::I3, C::I4] {
        v *= joint_lt(c, s_a, s_b, params, cond, spec)?;
    }
    Ok(v)
}

fn cross_road_rsu_lt(s_a: f64, s_b: f64, params: &ModelParams, cond: Conditioning, spec: &QuadratureSpec) -> Result<f64> {
    use InterferenceComponent as C;
    let mut v = 1.0;
    for c in [C::I0, C::I1, C::I2, C::I3, C::I4] {
        v *= joint_lt(c, s_a, s_b, params, cond, spec)?;
    }
    Ok(v)
}

/// Joint probability that the typical vehicle is covered in both epochs
/// given own-road service at `rb1`. The serving RSU interferes with the
/// relay epoch.
pub fn pc1_ab(rb1: f64, scales: &SinrScales, params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    let cond = Conditioning::Serving {
        event: ServingEvent::OwnRoad,
        rb1,
    };
    let lt = own_road_rsu_lt(scales.s5, scales.s7, params, cond, spec)?;
    Ok(prob_e0_given_distance(params, rb1, spec)?
        * joint_factor(params, rb1, scales)
        * lt
        * vehicle_lt(scales.s6, scales.s8, params, spec)?)
}

/// Cross-road analogue of [`pc1_ab`] for rank `n` at distance `y`, with `f_Yn(y)`.
pub fn pc2_ab(
    rb1: f64,
    scales: &SinrScales,
    y: f64,
    n: usize,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let event = ServingEvent::cross(n, y)?;
    if rb1 < y {
        return Err(Error::Support { r: rb1, min: y });
    }
    let cond = Conditioning::Serving { event, rb1 };
    let lt = cross_road_rsu_lt(scales.s5, scales.s7, params, cond, spec)?;
    Ok(prob_en_given_distance(params, n, y, rb1, spec)?
        * joint_factor(params, rb1, scales)
        * lt
        * vehicle_lt(scales.s6, scales.s8, params, spec)?
        * pdf_yn(params, n, y))
}

/// Cached analytic pipeline for one parameter set.
///
/// Building it tabulates the direct-coverage density `a(r)` (own-road and
/// cross-road parts) on `[0, r_max]` with piecewise Chebyshev fits, giving
/// `G(r) = ∫_0^r a` in O(1). The relay's own coverage (scales `s3`, `s4` at
/// `r0`) is the same function, so `ξ2` reuses the table.
#[derive(Debug, Clone)]
pub struct RelayAnalyzer {
    params: ModelParams,
    spec: QuadratureSpec,
    r_max: f64,
    g_own: PiecewiseChebyshev,
    g_cross: PiecewiseChebyshev,
    table: Diagnostics,
}

impl RelayAnalyzer {
    pub fn new(params: &ModelParams, spec: &QuadratureSpec) -> Result<Self> {
        params.require_planar()?;
        spec.validate()?;
        let r_max = truncation_radius(params, SERVING_TAIL, &spec.inner())?;
        let mut cache: HashMap<u64, DensitySplit> = HashMap::new();
        let mut diag = Diagnostics::default();
        let node_spec = spec.inner();
        let mut eval = |r: f64| -> Result<DensitySplit> {
            if let Some(d) = cache.get(&r.to_bits()) {
                return Ok(*d);
            }
            let d = coverage_density(params, r, &direct_scales(params, r), &node_spec)?;
            cache.insert(r.to_bits(), d);
            Ok(d)
        };
        let breaks: Vec<f64> = [0.0, 0.03125, 0.0625, 0.125, 0.25, 0.5, 1.0]
            .iter()
            .map(|f| f * r_max)
            .collect();
        let tol = (spec.rel_tol * 1e-3).max(1e-11);
        let g_own = PiecewiseChebyshev::fit(|r| Ok(eval(r)?.own), &breaks, tol, 64)?;
        let g_cross = PiecewiseChebyshev::fit(|r| Ok(eval(r)?.cross), &breaks, tol, 64)?;
        for d in cache.values() {
            diag.max_ranks = diag.max_ranks.max(d.max_ranks);
            diag.capped_sums += d.capped;
        }
        Ok(Self {
            params: *params,
            spec: *spec,
            r_max,
            g_own,
            g_cross,
            table: diag,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Serving distance beyond which all integrals are truncated.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Tabulated `∫_0^r a(r0) dr0` split into own-road and cross-road service.
    pub fn covered_mass_split(&self, r: f64) -> (f64, f64) {
        let r = r.clamp(0.0, self.r_max);
        (self.g_own.cumulative(r), self.g_cross.cumulative(r))
    }

    /// Tabulated direct-coverage density `a(r)`.
    pub fn coverage_density(&self, r: f64) -> f64 {
        if r < 0.0 || r > self.r_max {
            return 0.0;
        }
        self.g_own.eval(r) + self.g_cross.eval(r)
    }

    /// `P[SINR_A > T, rb1 > r1]` by adaptive quadrature over the serving distance.
    fn direct_mass(&self, r1: f64) -> Result<(f64, Diagnostics)> {
        if r1 >= self.r_max {
            return Ok((0.0, Diagnostics::default()));
        }
        let p = &self.params;
        let inner = self.spec.inner();
        let mut diag = Diagnostics::default();
        let v = try_integrate(
            |r| {
                let d = coverage_density(p, r, &direct_scales(p, r), &inner)?;
                diag.max_ranks = diag.max_ranks.max(d.max_ranks);
                diag.capped_sums += d.capped;
                Ok(d.own + d.cross)
            },
            r1.max(0.0),
            self.r_max,
            &self.spec,
        )?;
        diag.errors.push(("direct_mass".into(), v.error));
        Ok((v.value, diag))
    }

    /// Direct (Scenario A) coverage with no restriction on the serving distance.
    pub fn scenario_a_coverage(&self) -> Result<CoverageEstimate> {
        let (v, diag) = self.direct_mass(0.0)?;
        let err = diag.errors.iter().map(|e| e.1).sum::<f64>() + self.spec.abs_tol;
        Ok(CoverageEstimate {
            value: check_unit("scenario A coverage", v, err)?,
            method: Method::Analytic,
            error: err,
            diagnostics: diag,
        })
    }

    pub fn xi3(&self, r1: f64) -> Result<CoverageEstimate> {
        if !(r1 >= 0.0) {
            return Err(invalid("r1", format!("must be >= 0, got {r1}")));
        }
        let (v, diag) = self.direct_mass(r1)?;
        let err = diag.errors.iter().map(|e| e.1).sum::<f64>() + self.spec.abs_tol;
        Ok(CoverageEstimate {
            value: check_unit("xi3", 1.0 - v, err)?,
            method: Method::Analytic,
            error: err,
            diagnostics: diag,
        })
    }

    /// `ξ3` from the cumulative table instead of fresh quadrature.
    pub fn xi3_tabulated(&self, r1: f64) -> f64 {
        let (o, c) = self.covered_mass_split(self.r_max);
        let (o1, c1) = self.covered_mass_split(r1);
        1.0 - ((o - o1) + (c - c1))
    }

    pub fn xi1(&self, r1: f64) -> Result<CoverageEstimate> {
        check_r1(r1)?;
        let p = &self.params;
        let inner = self.spec.inner();
        let s5 = p.kappa * p.mu * p.threshold * p.dist_pow(r1) / p.nu;
        let s6 = p.mu * p.threshold * p.dist_pow(r1);
        let relay_only = (-s6 * p.noise / p.nu).exp()
            * joint_lt(InterferenceComponent::Iru, s5, 0.0, p, Conditioning::None, &inner)?
            * vehicle_lt(s6, 0.0, p, &inner)?;
        let mut diag = Diagnostics::default();
        let both = if r1 < self.r_max {
            let v = try_integrate(
                |r| {
                    let d = coverage_density(p, r, &joint_scales(p, r1, r)?, &inner)?;
                    diag.max_ranks = diag.max_ranks.max(d.max_ranks);
                    diag.capped_sums += d.capped;
                    Ok(d.own + d.cross)
                },
                r1,
                self.r_max,
                &self.spec,
            )?;
            diag.errors.push(("xi1_joint".into(), v.error));
            v.value
        } else {
            0.0
        };
        let err = diag.errors.iter().map(|e| e.1).sum::<f64>() + self.spec.abs_tol;
        Ok(CoverageEstimate {
            value: check_unit("xi1", relay_only - both, err)?,
            method: Method::Analytic,
            error: err,
            diagnostics: diag,
        })
    }

    /// `ξ2` assembled from its four serving-road cases. The returned
    /// diagnostics name each case's value as `case<k>`.
    pub fn xi2(&self, r1: f64) -> Result<CoverageEstimate> {
        check_r1(r1)?;
        let p = &self.params;
        let spec = &self.spec;
        let inner = spec.inner();
        let mut diag = Diagnostics::default();
        let mut cases = [0.0; 4];
        if r1 < self.r_max {
            // cases 1 and 3: typical vehicle served on its own road
            for (k, part) in [(0, 0usize), (2, 1)] {
                let v = try_integrate(
                    |r| {
                        let g = self.covered_mass_split(r);
                        let g = if part == 0 { g.0 } else { g.1 };
                        Ok(g * pdf_serving_distance_own(p, r) * prob_e0_given_distance(p, r, &inner)?)
                    },
                    r1,
                    self.r_max,
                    spec,
                )?;
                cases[k] = v.value;
                diag.errors.push((format!("case{}", k + 1), v.error));
            }
        }
        // cases 2 and 4: typical vehicle served by the road at distance y,
        // rb1 ∈ (max(r1, y), ∞) mapped to r = y cosh τ
        for (k, part) in [(1, 0usize), (3, 1)] {
            let mut ranks = 0;
            let mut capped = 0;
            let mut outer = |y: f64| -> Result<f64> {
                let lo = if y >= r1 { 0.0 } else { (r1 / y).acosh() };
                let hi = (self.r_max / y).acosh();
                if !(hi > lo) {
                    return Ok(0.0);
                }
                let v = try_integrate(
                    |tau| {
                        let r = y * tau.cosh();
                        let w = cross_weight_tau(p, y, tau);
                        if w == 0.0 {
                            return Ok(0.0);
                        }
                        let g = self.covered_mass_split(r);
                        let g = if part == 0 { g.0 } else { g.1 };
                        let s = rank_summed_cross_event(p, y, r, &inner.inner())?;
                        ranks = ranks.max(s.ranks_used);
                        if s.capped && s.value * w > spec.abs_tol {
                            capped += 1;
                        }
                        Ok(g * w * s.value)
                    },
                    lo,
                    hi,
                    &inner,
                )?;
                Ok(v.value)
            };
            let split = r1.min(self.r_max);
            let a = try_integrate(&mut outer, 0.0, split, spec)?;
            let b = try_integrate(&mut outer, split, self.r_max, spec)?;
            cases[k] = a.value + b.value;
            diag.errors.push((format!("case{}", k + 1), a.error + b.error));
            diag.max_ranks = diag.max_ranks.max(ranks);
            diag.capped_sums += capped;
        }
        diag.absorb(&self.table);
        let value: f64 = cases.iter().sum();
        for (k, c) in cases.iter().enumerate() {
            diag.errors.push((format!("case{}_value", k + 1), *c));
        }
        let err = diag
            .errors
            .iter()
            .filter(|e| !e.0.ends_with("_value"))
            .map(|e| e.1)
            .sum::<f64>()
            + spec.rel_tol * value;
        Ok(CoverageEstimate {
            value: check_unit("xi2", value, err)?,
            method: Method::Analytic,
            error: err,
            diagnostics: diag,
        })
    }

    /// `ξ2` by exchanging the order of integration:
    /// `∫ a(r0) P[rb1 > max(r0, r1)] dr0`.
    pub fn xi2_exchanged(&self, r1: f64) -> Result<f64> {
        check_r1(r1)?;
        let inner = self.spec.inner();
        let f = |r0: f64| Ok(self.coverage_density(r0) * void_probability(&self.params, r0.max(r1), &inner)?);
        let split = r1.min(self.r_max);
        Ok(try_integrate(f, 0.0, split, &self.spec)?.value + try_integrate(f, split, self.r_max, &self.spec)?.value)
    }

    pub fn relay_coverage(&self, r1: f64) -> Result<CoverageEstimate> {
        let x1 = self.xi1(r1)?;
        let x3 = self.xi3(r1)?;
        if x3.value < XI3_FLOOR {
            return Err(Error::ConditioningTooRare {
                value: x3.value,
                floor: XI3_FLOOR,
            });
        }
        let x2 = self.xi2(r1)?;
        let value = x1.value * x2.value / x3.value;
        let rel = |e: &CoverageEstimate| if e.value > 0.0 { e.error / e.value } else { 0.0 };
        let error = value * (rel(&x1) + rel(&x2) + rel(&x3)) + x1.error * x2.value / x3.value;
        let mut diag = Diagnostics {
            xi: Some([x1.value, x2.value, x3.value]),
            ..Default::default()
        };
        diag.absorb(&x1.diagnostics);
        diag.absorb(&x2.diagnostics);
        diag.absorb(&x3.diagnostics);
        Ok(CoverageEstimate {
            value: check_unit("relay coverage", value, error)?,
            method: Method::Analytic,
            error,
            diagnostics: diag,
        })
    }
}

fn check_r1(r1: f64) -> Result<()> {
    if !(r1 > 0.0 && r1.is_finite()) {
        return Err(invalid("r1", format!("must be > 0, got {r1}")));
    }
    Ok(())
}

/// Clamps `v` into [0, 1] if it lies within `budget` of the interval.
fn check_unit(what: &'static str, v: f64, budget: f64) -> Result<f64> {
    let slack = budget.max(1e-9);
    if v < -slack || v > 1.0 + slack || !v.is_finite() {
        return Err(Error::OutOfRange { what, value: v, budget: slack });
    }
    Ok(v.clamp(0.0, 1.0))
}

pub fn xi1(r1: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<CoverageEstimate> {
    RelayAnalyzer::new(params, spec)?.xi1(r1)
}

pub fn xi2(r1: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<CoverageEstimate> {
    RelayAnalyzer::new(params, spec)?.xi2(r1)
}

pub fn xi3(r1: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<CoverageEstimate> {
    RelayAnalyzer::new(params, spec)?.xi3(r1)
}

pub fn relay_coverage(r1: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<CoverageEstimate> {
    RelayAnalyzer::new(params, spec)?.relay_coverage(r1)
}

pub fn scenario_a_coverage(params: &ModelParams, spec: &QuadratureSpec) -> Result<CoverageEstimate> {
    RelayAnalyzer::new(params, spec)?.scenario_a_coverage()
}
