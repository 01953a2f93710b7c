//! Laplace transforms of RSU and vehicle interference at the typical vehicle,
//! single (one transmission epoch) and joint (two epochs with independent
//! fading on the same points).
//!
//! Everything reduces to the per-road kernel
//! `W(u, c) = ∫_c^∞ ζ2(√(t² + u²)) dt`: a road at perpendicular distance `u`
//! whose points avoid `|t| < c` contributes `exp(−2λ W(u, c))` through the
//! PGFL of its 1D PPP, and roads are then averaged with the PGFL of the line
//! process.
//!
//! RSU interference given the serving event is split by road:
//!
//! | component | roads |
//! |-----------|-------|
//! | `I0` | the Palm road `L0`, outside `b(o, rb1)` |
//! | `I1` | the serving road (cross-road service only), minus the server |
//! | `I2` | the `n − 1` roads closer than the serving road |
//! | `I3` | farther roads that still cut `b(o, rb1)` |
//! | `I4` | roads that miss `b(o, rb1)` |
//!
//! Under own-road service the serving road is `L0`, so `I1` and `I2` are
//! trivially 1 and `I3` covers every other road cutting the disk.

use std::f64::consts::FRAC_PI_2;

use crate::distributions::ServingEvent;
use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;
use crate::quadrature::{try_integrate, PiecewiseChebyshev, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterferenceComponent {
    I0,
    I1,
    I2,
    I3,
    I4,
    /// All RSU interference (every RSU when unconditioned, every RSU but the
    /// server when conditioned on a serving event).
    Iru,
    /// Transmitting vehicles on all roads.
    Ivt,
}

impl InterferenceComponent {
    pub const ALL: [InterferenceComponent; 7] = [
        Self::I0,
        Self::I1,
        Self::I2,
        Self::I3,
        Self::I4,
        Self::Iru,
        Self::Ivt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::I0 => "I0",
            Self::I1 => "I1",
            Self::I2 => "I2",
            Self::I3 => "I3",
            Self::I4 => "I4",
            Self::Iru => "Iru",
            Self::Ivt => "Ivt",
        }
    }
}

/// What the transform is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditioning {
    None,
    /// Serving event together with the serving distance `rb1`: no RSU lies
    /// inside `b(o, rb1)` apart from the server.
    Serving { event: ServingEvent, rb1: f64 },
}

impl Conditioning {
    pub fn validate(&self) -> Result<()> {
        if let Self::Serving { event, rb1 } = *self {
            if !(rb1 > 0.0 && rb1.is_finite()) {
                return Err(invalid("rb1", format!("must be > 0, got {rb1}")));
            }
            if let ServingEvent::CrossRoad { rank, y } = event {
                if rank < 1 {
                    return Err(invalid("rank", "cross-road ranks start at 1"));
                }
                if !(y > 0.0) || y > rb1 {
                    return Err(Error::Support { r: rb1, min: y });
                }
            }
        }
        Ok(())
    }
}

/// Kernel `1 − μD/(μD + s_a) · μD/(μD + s_b)` for `D = distance^η`, written
/// without cancellation.
#[inline]
pub(crate) fn zeta_of_power(mu: f64, d_eta: f64, s_a: f64, s_b: f64) -> f64 {
    if s_a == 0.0 && s_b == 0.0 {
        return 0.0;
    }
    let m = mu * d_eta;
    (s_a * (m + s_b) + s_b * m) / ((m + s_a) * (m + s_b))
}

/// `1 − μ/(μ + s_a (x² + y²)^{−η/2}) · μ/(μ + s_b (x² + y²)^{−η/2})`.
pub fn zeta2(x: f64, y: f64, s_a: f64, s_b: f64, params: &ModelParams) -> f64 {
    zeta_of_power(params.mu, params.dist_pow_sq(x * x + y * y), s_a, s_b)
}

/// `W(u, c) = ∫_c^∞ ζ2(t, u) dt`, one half of a road at distance `u` with the
/// chord `|t| < c` removed.
pub fn line_kernel(params: &ModelParams, u: f64, c: f64, s_a: f64, s_b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if s_a == 0.0 && s_b == 0.0 {
        return Ok(0.0);
    }
    let u2 = u * u;
    let mu = params.mu;
    let f = |t: f64| Ok(zeta_of_power(mu, params.dist_pow_sq(t * t + u2), s_a, s_b));
    // split at the kernel's length scale so the tail map sees a smooth integrand
    let scale = ((s_a + s_b) / mu).powf(1.0 / params.eta);
    let knee = c.max(scale);
    let head = if knee > c { try_integrate(f, c, knee, spec)?.value } else { 0.0 };
    Ok(head + try_integrate(f, knee, f64::INFINITY, spec)?.value)
}

/// `∫_from^∞ (1 − exp(−2 density W(u, 0))) du`: the PLP exponent of roads
/// lying entirely outside `b(o, from)`.
fn far_roads_exponent(
    params: &ModelParams,
    from: f64,
    density: f64,
    s_a: f64,
    s_b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if density == 0.0 || (s_a == 0.0 && s_b == 0.0) {
        return Ok(0.0);
    }
    params.require_planar()?;
    let inner = spec.inner();
    let f = |u: f64| Ok(-(-2.0 * density * line_kernel(params, u, 0.0, s_a, s_b, &inner)?).exp_m1());
    let scale = ((s_a + s_b) / params.mu).powf(1.0 / params.eta);
    let knee = from.max(scale);
    let head = if knee > from { try_integrate(f, from, knee, spec)?.value } else { 0.0 };
    Ok(head + try_integrate(f, knee, f64::INFINITY, spec)?.value)
}

/// Joint LT of the Palm road's RSU interference outside `b(o, rb1)`:
/// `exp(−2λ_ru ∫_{rb1}^∞ ζ2(x, 0) dx)`.
pub fn joint_lt_own_line(s_a: f64, s_b: f64, rb1: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    if !(rb1 >= 0.0) {
        return Err(invalid("rb1", format!("must be >= 0, got {rb1}")));
    }
    check_scales(s_a, s_b)?;
    Ok((-2.0 * params.lambda_ru * line_kernel(params, 0.0, rb1, s_a, s_b, spec)?).exp())
}

/// Joint LT of vehicle interference; vehicles are unaffected by RSU conditioning.
pub fn vehicle_lt(s_a: f64, s_b: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    params.require_planar()?;
    check_scales(s_a, s_b)?;
    let density = params.lambda_vt();
    if density == 0.0 {
        return Ok(1.0);
    }
    let own = line_kernel(params, 0.0, 0.0, s_a, s_b, spec)?;
    let far = far_roads_exponent(params, 0.0, density, s_a, s_b, spec)?;
    Ok((-2.0 * density * own - 2.0 * params.rho * far).exp())
}

fn check_scales(s_a: f64, s_b: f64) -> Result<()> {
    for (name, s) in [("s_a", s_a), ("s_b", s_b)] {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(invalid(name, format!("must be finite and >= 0, got {s}")));
        }
    }
    Ok(())
}

/// `∫_lo^hi e^{−2λ c(u)} (1 − e^{−2λ W(u, c(u))}) du` with `c(u) = √(rb1² − u²)`,
/// and the matching void mass `∫ e^{−2λ c(u)} du`.
fn chord_masses(
    params: &ModelParams,
    rb1: f64,
    lo: f64,
    hi: f64,
    s_a: f64,
    s_b: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let inner = spec.inner();
    let lam2 = 2.0 * params.lambda_ru;
    let (p0, p1) = ((lo / rb1).min(1.0).asin(), (hi / rb1).min(1.0).asin());
    let void = try_integrate(|psi| Ok((-lam2 * rb1 * psi.cos()).exp() * rb1 * psi.cos()), p0, p1, spec)?.value;
    let lost = try_integrate(
        |psi| {
            let (u, c) = (rb1 * psi.sin(), rb1 * psi.cos());
            let w = line_kernel(params, u, c, s_a, s_b, &inner)?;
            Ok((-lam2 * c).exp() * -(-lam2 * w).exp_m1() * c)
        },
        p0,
        p1,
        spec,
    )?
    .value;
    Ok((void, lost))
}

/// Joint LT `E[exp(−s_a I − s_b I')]` of one interference component, with
/// `I` and `I'` the component's interference in two epochs with independent
/// fading. The single LT is the special case `s_b = 0`.
pub fn joint_lt(
    component: InterferenceComponent,
    s_a: f64,
    s_b: f64,
    params: &ModelParams,
    conditioning: Conditioning,
    spec: &QuadratureSpec,
) -> Result<f64> {
    params.require_planar()?;
    check_scales(s_a, s_b)?;
    conditioning.validate()?;
    use InterferenceComponent as C;
    let lam2 = 2.0 * params.lambda_ru;
    let rho2 = 2.0 * params.rho;
    match (component, conditioning) {
        (C::Ivt, _) => vehicle_lt(s_a, s_b, params, spec),
        (C::I0, Conditioning::None) => joint_lt_own_line(s_a, s_b, 0.0, params, spec),
        (C::I4, Conditioning::None) => {
            Ok((-rho2 * far_roads_exponent(params, 0.0, params.lambda_ru, s_a, s_b, spec)?).exp())
        }
        (C::Iru, Conditioning::None) => Ok(joint_lt(C::I0, s_a, s_b, params, conditioning, spec)?
            * joint_lt(C::I4, s_a, s_b, params, conditioning, spec)?),
        (C::I1 | C::I2 | C::I3, Conditioning::None) => Err(invalid(
            "conditioning",
            format!("{} is only defined given a serving event", component.name()),
        )),
        (C::I0, Conditioning::Serving { rb1, .. }) => joint_lt_own_line(s_a, s_b, rb1, params, spec),
        (C::I4, Conditioning::Serving { rb1, .. }) => {
            Ok((-rho2 * far_roads_exponent(params, rb1, params.lambda_ru, s_a, s_b, spec)?).exp())
        }
        (C::I1, Conditioning::Serving { event, rb1 }) => match event {
            ServingEvent::OwnRoad => Ok(1.0),
            ServingEvent::CrossRoad { y, .. } => {
                let c = ((rb1 - y) * (rb1 + y)).max(0.0).sqrt();
                Ok((-lam2 * line_kernel(params, y, c, s_a, s_b, spec)?).exp())
            }
        },
        (C::I2, Conditioning::Serving { event, rb1 }) => match event {
            ServingEvent::OwnRoad => Ok(1.0),
            ServingEvent::CrossRoad { rank, y } => {
                if rank == 1 {
                    return Ok(1.0);
                }
                let (void, lost) = chord_masses(params, rb1, 0.0, y, s_a, s_b, spec)?;
                Ok(((void - lost) / void).powi(rank as i32 - 1))
            }
        },
        (C::I3, Conditioning::Serving { event, rb1 }) => {
            let lo = match event {
                ServingEvent::OwnRoad => 0.0,
                ServingEvent::CrossRoad { y, .. } => y,
            };
            let (_, lost) = chord_masses(params, rb1, lo, rb1, s_a, s_b, spec)?;
            Ok((-rho2 * lost).exp())
        }
        (C::Iru, Conditioning::Serving { .. }) => {
            let mut v = 1.0;
            for c in [C::I0, C::I1, C::I2, C::I3, C::I4] {
                v *= joint_lt(c, s_a, s_b, params, conditioning, spec)?;
            }
            Ok(v)
        }
    }
}

pub fn single_lt(
    component: InterferenceComponent,
    s: f64,
    params: &ModelParams,
    conditioning: Conditioning,
    spec: &QuadratureSpec,
) -> Result<f64> {
    joint_lt(component, s, 0.0, params, conditioning, spec)
}

/// RSU-side quantities at one serving distance `r` for fixed kernel scales,
/// tabulated along the disk boundary so that every cross-road position
/// `y ∈ (0, r]` is an O(1) lookup.
///
/// With `u = r sin ψ` and `c = r cos ψ` it holds Chebyshev fits of
/// `W(u, c)` and of the void and lost chord masses.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    r: f64,
    lambda2: f64,
    rho2: f64,
    chord_w: Option<PiecewiseChebyshev>,
    void: Option<PiecewiseChebyshev>,
    lost: Option<PiecewiseChebyshev>,
    own_w: f64,
    far: f64,
}

const FIT_DEGREE: usize = 128;

impl RadialProfile {
    pub fn new(params: &ModelParams, r: f64, s_a: f64, s_b: f64, spec: &QuadratureSpec) -> Result<Self> {
        let lam2 = 2.0 * params.lambda_ru;
        let mut out = Self {
            r,
            lambda2: lam2,
            rho2: 2.0 * params.rho,
            chord_w: None,
            void: None,
            lost: None,
            own_w: 0.0,
            far: 0.0,
        };
        let tol = (spec.rel_tol * 1e-2).max(1e-13);
        let inner = spec.inner();
        let active = s_a > 0.0 || s_b > 0.0;
        if active {
            out.far = far_roads_exponent(params, r, params.lambda_ru, s_a, s_b, &inner)?;
        }
        if r <= 0.0 {
            out.own_w = line_kernel(params, 0.0, 0.0, s_a, s_b, &inner)?;
            return Ok(out);
        }
        let breaks = [0.0, FRAC_PI_2];
        out.void = Some(PiecewiseChebyshev::fit(
            |psi| Ok((-lam2 * r * psi.cos()).exp() * r * psi.cos()),
            &breaks,
            tol,
            FIT_DEGREE,
        )?);
        if active {
            let w = PiecewiseChebyshev::fit(
                |psi| line_kernel(params, r * psi.sin(), r * psi.cos(), s_a, s_b, &inner.inner()),
                &breaks,
                tol,
                FIT_DEGREE,
            )?;
            out.own_w = w.eval(0.0);
            out.lost = Some(PiecewiseChebyshev::fit(
                |psi| {
                    let c = r * psi.cos();
                    Ok((-lam2 * c).exp() * -(-lam2 * w.eval(psi)).exp_m1() * c)
                },
                &breaks,
                tol,
                FIT_DEGREE,
            )?);
            out.chord_w = Some(w);
        }
        Ok(out)
    }

    fn angle(&self, y: f64) -> f64 {
        (y / self.r).clamp(0.0, 1.0).asin()
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// `∫_0^y e^{−2λ c(u)} du`.
    pub fn void_mass(&self, y: f64) -> f64 {
        self.void.as_ref().map_or(0.0, |v| v.cumulative(self.angle(y)))
    }

    /// `∫_0^y e^{−2λ c(u)} (1 − e^{−2λ W(u, c(u))}) du`.
    pub fn lost_mass(&self, y: f64) -> f64 {
        self.lost.as_ref().map_or(0.0, |v| v.cumulative(self.angle(y)))
    }

    /// `∫_0^y e^{−2λ c(u)} e^{−2λ W(u, c(u))} du`.
    pub fn kept_mass(&self, y: f64) -> f64 {
        self.void_mass(y) - self.lost_mass(y)
    }

    pub fn i0(&self) -> f64 {
        (-self.lambda2 * self.own_w).exp()
    }

    pub fn i1(&self, y: f64) -> f64 {
        self.chord_w.as_ref().map_or(1.0, |w| (-self.lambda2 * w.eval(self.angle(y))).exp())
    }

    pub fn i2(&self, rank: usize, y: f64) -> f64 {
        if rank <= 1 {
            return 1.0;
        }
        (self.kept_mass(y) / self.void_mass(y)).powi(rank as i32 - 1)
    }

    pub fn i3(&self, y: f64) -> f64 {
        (-self.rho2 * (self.lost_mass(self.r) - self.lost_mass(y))).exp()
    }

    pub fn i4(&self) -> f64 {
        (-self.rho2 * self.far).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q() -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            ..Default::default()
        }
    }

    fn flat() -> ModelParams {
        ModelParams {
            lambda_ru: 1.0,
            mu: 1.0,
            eta: 2.0,
            ..Default::default()
        }
    }

    #[test]
    fn zeta2_values() {
        let p = flat();
        assert_eq!(zeta2(0.3, 0.4, 0.0, 0.0, &p), 0.0);
        assert!((zeta2(1.0, 0.0, 1.0, 1.0, &p) - 0.75).abs() < 1e-15);
        let single = 1.0 - 1.0 / (1.0 + 2.0 / (0.25 + 0.81));
        assert!((zeta2(0.5, 0.9, 2.0, 0.0, &p) - single).abs() < 1e-15);
    }

    #[test]
    fn own_line_arctan_closed_form() {
        let p = flat();
        for &(s, rb1) in &[(1.0, 0.0), (0.5, 0.3), (3.0, 1.2)] {
            let closed = (-2.0 * p.lambda_ru * (s / p.mu).sqrt() * (PI / 2.0 - (rb1 * (p.mu / s).sqrt()).atan())).exp();
            let v = joint_lt_own_line(0.0, s, rb1, &p, &q()).unwrap();
            assert!((v - closed).abs() < 1e-9, "s = {s}, rb1 = {rb1}: {v} vs {closed}");
        }
    }

    #[test]
    fn own_line_joint_bounds() {
        let p = flat();
        let v = joint_lt_own_line(1.0, 1.0, 0.0, &p, &q()).unwrap();
        let single = joint_lt_own_line(1.0, 0.0, 0.0, &p, &q()).unwrap();
        assert!((single - (-PI).exp()).abs() < 1e-9);
        // ζ2 = (2x² + 1)/(x² + 1)² integrates to 3π/4 on the half line
        assert!((v - (-1.5 * PI).exp()).abs() < 1e-9);
        assert!(v >= single * single && v <= single);
    }

    #[test]
    fn flat_exponent_needs_planar_decay() {
        let p = flat();
        assert!(joint_lt(InterferenceComponent::Iru, 1.0, 0.0, &p, Conditioning::None, &q()).is_err());
    }

    #[test]
    fn transforms_at_zero_are_one() {
        let p = ModelParams::default();
        let conds = [
            Conditioning::None,
            Conditioning::Serving { event: ServingEvent::OwnRoad, rb1: 0.3 },
            Conditioning::Serving { event: ServingEvent::CrossRoad { rank: 3, y: 0.2 }, rb1: 0.3 },
        ];
        for c in conds {
            for comp in InterferenceComponent::ALL {
                match joint_lt(comp, 0.0, 0.0, &p, c, &q()) {
                    Ok(v) => assert_eq!(v, 1.0, "{comp:?} {c:?}"),
                    Err(_) => assert!(matches!(c, Conditioning::None)),
                }
            }
        }
    }

    #[test]
    fn profile_agrees_with_direct_components() {
        let p = ModelParams::default();
        let (r, sa, sb) = (0.35, 0.002, 0.004);
        let spec = QuadratureSpec::default();
        let prof = RadialProfile::new(&p, r, sa, sb, &spec).unwrap();
        let y = 0.21;
        let ev = ServingEvent::CrossRoad { rank: 3, y };
        let cond = Conditioning::Serving { event: ev, rb1: r };
        let c = |comp| joint_lt(comp, sa, sb, &p, cond, &q()).unwrap();
        use InterferenceComponent as C;
        let close = |a: f64, b: f64| (a - b).abs() < 1e-8 * b.max(1e-3);
        assert!(close(prof.i0(), c(C::I0)));
        assert!(close(prof.i1(y), c(C::I1)));
        assert!(close(prof.i2(3, y), c(C::I2)));
        assert!(close(prof.i3(y), c(C::I3)));
        assert!(close(prof.i4(), c(C::I4)));
        let own = Conditioning::Serving { event: ServingEvent::OwnRoad, rb1: r };
        let i3 = joint_lt(C::I3, sa, sb, &p, own, &q()).unwrap();
        assert!(close(prof.i3(0.0), i3));
        let void = crate::distributions::chord_void_mass(&p, r, y, &q()).unwrap();
        assert!((prof.void_mass(y) - void).abs() < 1e-12);
    }

    #[test]
    fn conditioned_own_road_component_is_own_line_transform() {
        let p = ModelParams::default();
        let cond = Conditioning::Serving { event: ServingEvent::OwnRoad, rb1: 0.4 };
        let a = joint_lt(InterferenceComponent::I0, 0.01, 0.03, &p, cond, &q()).unwrap();
        let b = joint_lt_own_line(0.01, 0.03, 0.4, &p, &q()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_is_joint_with_zero_second_scale() {
        let p = ModelParams::default();
        let cond = Conditioning::Serving { event: ServingEvent::CrossRoad { rank: 2, y: 0.1 }, rb1: 0.2 };
        for comp in InterferenceComponent::ALL {
            let a = single_lt(comp, 0.003, &p, cond, &q()).unwrap();
            let b = joint_lt(comp, 0.003, 0.0, &p, cond, &q()).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_bad_conditioning() {
        let p = ModelParams::default();
        let cond = Conditioning::Serving { event: ServingEvent::CrossRoad { rank: 1, y: 0.5 }, rb1: 0.2 };
        assert!(joint_lt(InterferenceComponent::I1, 0.1, 0.0, &p, cond, &q()).is_err());
        assert!(joint_lt(InterferenceComponent::I2, 0.1, 0.0, &p, Conditioning::None, &q()).is_err());
        assert!(joint_lt(InterferenceComponent::I0, -1.0, 0.0, &p, Conditioning::None, &q()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn comps() -> impl Strategy<Value = InterferenceComponent> {
            prop::sample::select(InterferenceComponent::ALL.to_vec())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn joint_dominates_product_and_is_monotone(
                comp in comps(), sa in 0.0f64..0.05, sb in 0.0f64..0.05, ds in 0.001f64..0.05,
                rank in 1usize..4, yfrac in 0.05f64..1.0, rb1 in 0.05f64..0.6,
            ) {
                let p = ModelParams::default();
                let spec = QuadratureSpec::default();
                let cond = Conditioning::Serving { event: ServingEvent::CrossRoad { rank, y: yfrac * rb1 }, rb1 };
                let j = joint_lt(comp, sa, sb, &p, cond, &spec).unwrap();
                let a = single_lt(comp, sa, &p, cond, &spec).unwrap();
                let b = single_lt(comp, sb, &p, cond, &spec).unwrap();
                prop_assert!(j > 0.0 && j <= 1.0);
                prop_assert!(j >= a * b - 1e-9);
                let k = joint_lt(comp, sa + ds, sb, &p, cond, &spec).unwrap();
                prop_assert!(k <= j + 1e-9);
            }
        }
    }
}
