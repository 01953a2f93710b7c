//! Rayleigh fading, interference sums and the three SINR quantities.
//!
//! RSUs transmit with power `kappa`, vehicles with `nu`. All sums run over
//! the points of a [`NetworkRealization`] with one exponential mark per point
//! and per transmission epoch.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{invalid, Result};
use crate::geometry::{NearestRsu, NetworkRealization, Point2};
use crate::model::ModelParams;

/// Independent Exp(μ) fading marks for one transmission epoch, aligned with
/// the realization's flat RSU and vehicle order. `relay` is the mark of the
/// relay vehicle's own link.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingEpoch {
    pub rsu: Vec<f64>,
    pub vehicles: Vec<f64>,
    pub relay: f64,
}

impl FadingEpoch {
    pub fn draw<R: Rng + ?Sized>(real: &NetworkRealization, mu: f64, rng: &mut R) -> Self {
        let exp = Exp::new(mu).expect("mu > 0");
        let rsu = (0..real.rsu_count()).map(|_| exp.sample(rng)).collect();
        let vehicles = (0..real.tx_vehicle_count()).map(|_| exp.sample(rng)).collect();
        Self {
            rsu,
            vehicles,
            relay: exp.sample(rng),
        }
    }

    /// Every mark equal to `g`; handy for deterministic checks.
    pub fn constant(real: &NetworkRealization, g: f64) -> Self {
        Self {
            rsu: vec![g; real.rsu_count()],
            vehicles: vec![g; real.tx_vehicle_count()],
            relay: g,
        }
    }
}

/// Location of the relay vehicle: abscissa `+r1` on the Palm road `L0`.
pub fn relay_point(real: &NetworkRealization, r1: f64) -> Point2 {
    real.lines()[0].point_at(r1)
}

/// Unit-power fading-weighted sums seen at `at`: RSUs except the one at flat
/// index `skip`, and all transmitting vehicles.
pub(crate) fn interference_sums(
    real: &NetworkRealization,
    params: &ModelParams,
    epoch: &FadingEpoch,
    at: Point2,
    skip: Option<usize>,
) -> (f64, f64) {
    let mut rsu = 0.0;
    let mut veh = 0.0;
    for (k, line) in real.lines().iter().enumerate() {
        let (tp, up) = line.project(at);
        let u2 = up * up;
        let off = real.rsu_offset(k);
        for (i, &t) in real.rsus(k).iter().enumerate() {
            if Some(off + i) == skip {
                continue;
            }
            let dt = t - tp;
            rsu += epoch.rsu[off + i] / params.dist_pow_sq(dt * dt + u2);
        }
        let off = real.vehicle_offset(k);
        for (i, &t) in real.tx_vehicles(k).iter().enumerate() {
            let dt = t - tp;
            veh += epoch.vehicles[off + i] / params.dist_pow_sq(dt * dt + u2);
        }
    }
    (rsu, veh)
}

/// SINR of the nearest-RSU link at `at`, with the serving RSU's description.
pub fn sinr_direct_at(
    real: &NetworkRealization,
    params: &ModelParams,
    epoch: &FadingEpoch,
    at: Point2,
) -> Result<(f64, NearestRsu)> {
    let n = real.nearest_rsu(at)?;
    let flat = real.rsu_offset(n.line) + n.index;
    let (rsu, veh) = interference_sums(real, params, epoch, at, Some(flat));
    let signal = params.kappa * epoch.rsu[flat] / params.dist_pow(n.distance);
    Ok((signal / (params.noise + params.kappa * rsu + params.nu * veh), n))
}

/// Direct-link SINR of the typical vehicle at the origin.
pub fn sinr_a(real: &NetworkRealization, params: &ModelParams, epoch: &FadingEpoch) -> Result<f64> {
    Ok(sinr_direct_at(real, params, epoch, Point2::ORIGIN)?.0)
}

/// SINR at the origin when the relay vehicle at distance `r1` transmits;
/// every RSU interferes.
pub fn sinr_b(real: &NetworkRealization, params: &ModelParams, epoch: &FadingEpoch, r1: f64) -> Result<f64> {
    if !(r1 > 0.0) {
        return Err(invalid("r1", format!("must be > 0, got {r1}")));
    }
    let (rsu, veh) = interference_sums(real, params, epoch, Point2::ORIGIN, None);
    let signal = params.nu * epoch.relay / params.dist_pow(r1);
    Ok(signal / (params.noise + params.kappa * rsu + params.nu * veh))
}

/// SINR of the relay vehicle's own nearest-RSU link.
pub fn sinr_rel(
    real: &NetworkRealization,
    params: &ModelParams,
    epoch: &FadingEpoch,
    relay: Point2,
) -> Result<f64> {
    Ok(sinr_direct_at(real, params, epoch, relay)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_realization, Line};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lone_rsu(at: f64) -> NetworkRealization {
        NetworkRealization::from_parts(vec![Line::new(0.0, 0.0).unwrap()], vec![vec![at]], vec![vec![]], 10.0)
            .unwrap()
    }

    fn unit() -> ModelParams {
        ModelParams {
            noise: 1.0,
            kappa: 1.0,
            nu: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn noise_limited_unit_links() {
        let real = lone_rsu(1.0);
        let e = FadingEpoch::constant(&real, 1.0);
        assert!((sinr_a(&real, &unit(), &e).unwrap() - 1.0).abs() < 1e-15);
        let empty =
            NetworkRealization::from_parts(vec![Line::new(0.0, 0.0).unwrap()], vec![vec![]], vec![vec![]], 10.0).unwrap();
        let e = FadingEpoch::constant(&empty, 1.0);
        assert!((sinr_b(&empty, &unit(), &e, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_relay_distance() {
        let real = lone_rsu(1.0);
        let e = FadingEpoch::constant(&real, 1.0);
        assert!(sinr_b(&real, &unit(), &e, 1e-6).unwrap() > 1e20);
        assert!(sinr_b(&real, &unit(), &e, 0.0).is_err());
    }

    #[test]
    fn relay_at_origin_sees_direct_link() {
        let p = ModelParams::default();
        let real = sample_realization(&p, 3.0, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = FadingEpoch::draw(&real, p.mu, &mut rng);
        assert_eq!(
            sinr_rel(&real, &p, &e, Point2::ORIGIN).unwrap(),
            sinr_a(&real, &p, &e).unwrap()
        );
    }

    #[test]
    fn huge_noise_kills_sinr() {
        let p = ModelParams { noise: 1e300, ..Default::default() };
        let real = sample_realization(&p, 3.0, 9).unwrap();
        let e = FadingEpoch::constant(&real, 1.0);
        let relay = relay_point(&real, 0.1);
        assert!(sinr_rel(&real, &p, &e, relay).unwrap() < 1e-290);
    }

    fn brute(real: &NetworkRealization, p: &ModelParams, e: &FadingEpoch, at: Point2) -> (f64, f64) {
        // independent accumulation: explicit coordinates, sorted by distance
        let mut rsu = Vec::new();
        let mut flat = 0;
        for (k, l) in real.lines().iter().enumerate() {
            for &t in real.rsus(k) {
                rsu.push((l.point_at(t).distance(at), e.rsu[flat]));
                flat += 1;
            }
        }
        let mut veh = 0.0;
        let mut flat = 0;
        for (k, l) in real.lines().iter().enumerate() {
            for &t in real.tx_vehicles(k) {
                veh += p.nu * e.vehicles[flat] * l.point_at(t).distance(at).powf(-p.eta);
                flat += 1;
            }
        }
        rsu.sort_by(|a, b| a.0.total_cmp(&b.0));
        let signal = p.kappa * rsu[0].1 * rsu[0].0.powf(-p.eta);
        let others: f64 = rsu[1..].iter().map(|(d, g)| p.kappa * g * d.powf(-p.eta)).sum();
        let all = others + p.kappa * rsu[0].1 * rsu[0].0.powf(-p.eta);
        (signal / (p.noise + others + veh), all + veh)
    }

    #[test]
    fn matches_brute_force_accumulation() {
        let p = ModelParams { eta: 3.3, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..30 {
            let real = sample_realization(&p, 3.0, seed).unwrap();
            let e = FadingEpoch::draw(&real, p.mu, &mut rng);
            let (a, total) = brute(&real, &p, &e, Point2::ORIGIN);
            let got = sinr_a(&real, &p, &e).unwrap();
            assert!((got - a).abs() < 1e-9 * a, "{got} vs {a}");
            let b = p.nu * e.relay * 0.1f64.powf(-p.eta) / (p.noise + total);
            let got = sinr_b(&real, &p, &e, 0.1).unwrap();
            assert!((got - b).abs() < 1e-9 * b);
            let rp = relay_point(&real, 0.1);
            let (rel, _) = brute(&real, &p, &e, rp);
            let got = sinr_rel(&real, &p, &e, rp).unwrap();
            assert!((got - rel).abs() < 1e-9 * rel);
        }
    }

    #[test]
    fn joint_power_scaling_keeps_sinr() {
        let p = ModelParams::default();
        let q = ModelParams { kappa: 2.0 * p.kappa, nu: 2.0 * p.nu, noise: 2.0 * p.noise, ..p };
        let real = sample_realization(&p, 3.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = FadingEpoch::draw(&real, p.mu, &mut rng);
        let (a, b) = (sinr_a(&real, &p, &e).unwrap(), sinr_a(&real, &q, &e).unwrap());
        assert!((a - b).abs() <= 1e-12 * a);
        let (a, b) = (sinr_b(&real, &p, &e, 0.2).unwrap(), sinr_b(&real, &q, &e, 0.2).unwrap());
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn marginal_coverage_decreases_with_threshold() {
        let p = ModelParams::default();
        let real = sample_realization(&p, 3.0, 21).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sinrs: Vec<f64> = (0..4000)
            .map(|_| sinr_a(&real, &p, &FadingEpoch::draw(&real, p.mu, &mut rng)).unwrap())
            .collect();
        let cov = |t: f64| sinrs.iter().filter(|&&s| s > t).count();
        let ts = [0.1, 0.5, 1.0, 2.0, 10.0];
        assert!(ts.windows(2).all(|w| cov(w[0]) >= cov(w[1])));
        assert!(sinrs.iter().all(|s| s.is_finite() && *s > 0.0));
    }
}
