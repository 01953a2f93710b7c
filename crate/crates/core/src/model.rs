//! Network parameters and the Laplace-argument scales derived from them.
//!
//! Units are normalized throughout: distances in km, linear densities per km,
//! and powers (`kappa`, `nu`, `noise`) in one arbitrary linear unit. Only
//! power ratios enter an SINR, so the unit never matters.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Physical and statistical parameters of the road network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Line density of the road process (roads per km).
    pub rho: f64,
    /// RSU density along each road (per km).
    pub lambda_ru: f64,
    /// Vehicle density along each road (per km).
    pub lambda_v: f64,
    /// Probability that a vehicle is transmitting.
    pub p1: f64,
    /// Rayleigh fading rate; the fading power has mean `1 / mu`.
    pub mu: f64,
    /// Path-loss exponent.
    pub eta: f64,
    /// SINR threshold, linear scale.
    pub threshold: f64,
    /// Thermal noise power.
    pub noise: f64,
    /// RSU transmit power.
    pub kappa: f64,
    /// Vehicle transmit power.
    pub nu: f64,
}

impl Default for ModelParams {
    /// The reference configuration used by the CLI and the validation suite:
    /// ρ = 2, λ_ru = 2, λ_v = 10, p1 = 0.2, η = 4, μ = 1, κ/ν = 10, T = 0 dB,
    /// and a noise floor giving a median SNR of 10 dB at 0.25 km (the median
    /// of Exp(μ) fading is ln 2 / μ).
    fn default() -> Self {
        let kappa = 10.0;
        let eta = 4.0;
        let mu = 1.0;
        Self {
            rho: 2.0,
            lambda_ru: 2.0,
            lambda_v: 10.0,
            p1: 0.2,
            mu,
            eta,
            threshold: 1.0,
            noise: kappa * std::f64::consts::LN_2 / mu * 0.25f64.powf(-eta) / 10.0,
            kappa,
            nu: 1.0,
        }
    }
}

impl ModelParams {
    /// Checks every parameter invariant. `eta > 1` is enough for the
    /// one-dimensional interference integrals along a single road.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("lambda_ru", self.lambda_ru),
            ("mu", self.mu),
            ("kappa", self.kappa),
            ("nu", self.nu),
            ("threshold", self.threshold),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        let non_negative = [("lambda_v", self.lambda_v), ("noise", self.noise)];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.p1) {
            return Err(invalid("p1", format!("must lie in [0, 1], got {}", self.p1)));
        }
        if !(self.eta.is_finite() && self.eta > 1.0) {
            return Err(invalid("eta", format!("must be > 1, got {}", self.eta)));
        }
        Ok(())
    }

    /// Interference from roads that do not pass through the receiver only
    /// converges for `eta > 2`.
    pub fn require_planar(&self) -> Result<()> {
        self.validate()?;
        if self.eta <= 2.0 {
            return Err(invalid(
                "eta",
                format!("cross-road interference needs eta > 2, got {}", self.eta),
            ));
        }
        Ok(())
    }

    /// Density of the equivalent point process of lines on [0, 2π) × [0, ∞).
    pub fn lambda_l(&self) -> f64 {
        self.rho / PI
    }

    /// Density of transmitting vehicles along a road.
    pub fn lambda_vt(&self) -> f64 {
        self.p1 * self.lambda_v
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// `d^eta` from a squared distance, with fast paths for the common exponents.
    #[inline]
    pub(crate) fn dist_pow_sq(&self, d2: f64) -> f64 {
        if self.eta == 4.0 {
            d2 * d2
        } else if self.eta == 2.0 {
            d2
        } else {
            d2.powf(0.5 * self.eta)
        }
    }

    #[inline]
    pub(crate) fn dist_pow(&self, d: f64) -> f64 {
        self.dist_pow_sq(d * d)
    }
}

/// Laplace-transform arguments feeding the coverage expressions.
///
/// `s5`/`s6` belong to the relay→typical link at distance `r1`, `s7`/`s8` to
/// the RSU→typical link at `rb1`, and `s3`/`s4` to the RSU→relay link at `r0`.
/// The first of each pair scales RSU interference, the second vehicle
/// interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrScales {
    pub s3: f64,
    pub s4: f64,
    pub s5: f64,
    pub s6: f64,
    pub s7: f64,
    pub s8: f64,
}

/// Computes all six scales for the distances `r0` (relay to its RSU), `r1`
/// (relay to typical vehicle) and `rb1` (typical vehicle to its nearest RSU).
pub fn derive_scales(params: &ModelParams, r0: f64, r1: f64, rb1: f64) -> Result<SinrScales> {
    params.validate()?;
    if !(r0 >= 0.0 && r0.is_finite()) {
        return Err(Error::Support { r: r0, min: 0.0 });
    }
    if !(r1 > 0.0 && r1.is_finite()) {
        return Err(invalid("r1", format!("must be > 0, got {r1}")));
    }
    if !(rb1 > r1) {
        return Err(Error::RelayConstraint { r1, rb1 });
    }
    let mu_t = params.mu * params.threshold;
    let (k, v) = (params.kappa, params.nu);
    let r0e = params.dist_pow(r0);
    let r1e = params.dist_pow(r1);
    let rbe = params.dist_pow(rb1);
    Ok(SinrScales {
        s3: mu_t * r0e,
        s4: v * mu_t * r0e / k,
        s5: k * mu_t * r1e / v,
        s6: mu_t * r1e,
        s7: mu_t * rbe,
        s8: v * mu_t * rbe / k,
    })
}
