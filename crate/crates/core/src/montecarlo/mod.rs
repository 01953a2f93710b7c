//! Monte Carlo oracle: estimates every analytic quantity from sampled
//! networks.
//!
//! Drops are split into batches of `McConfig::batch`; batch `b` draws from a
//! ChaCha8 stream seeded with `(seed, b)`, and batches are merged in index
//! order. Results therefore depend on `(seed, drops, batch, params)` only,
//! never on the number of worker threads.

pub mod stats;

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{relay_point, sinr_b, sinr_direct_at, FadingEpoch};
use crate::distributions::ServingEvent;
use crate::error::{invalid, Error, Result};
use crate::geometry::{sample_with_rng, NearestRsu, NetworkRealization, Point2};
use crate::laplace::{Conditioning, InterferenceComponent};
use crate::model::ModelParams;
use crate::relay_coverage::{CoverageEstimate, Diagnostics, Method, XI3_FLOOR};

use stats::{wilson, Moments, Z95};

/// Where the relay's own link is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelayCoupling {
    /// A fresh realization seen from its own typical vehicle, so `r0` and
    /// `SINR_rel` are independent of the typical vehicle's network.
    #[default]
    Independent,
    /// The relay at abscissa `r1` on `L0` of the same realization, with a
    /// third fading epoch.
    SharedRealization,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub drops: u64,
    pub seed: u64,
    /// Radius (km) of the simulation disk around the typical vehicle.
    pub window_radius: f64,
    /// Drops per work unit.
    pub batch: u64,
    pub coupling: RelayCoupling,
}

impl McConfig {
    pub fn new(drops: u64, seed: u64, window_radius: f64) -> Self {
        Self {
            drops,
            seed,
            window_radius,
            batch: 512,
            coupling: RelayCoupling::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.drops < 1 {
            return Err(invalid("drops", "must be >= 1"));
        }
        if self.batch < 1 {
            return Err(invalid("batch", "must be >= 1"));
        }
        if !(self.window_radius > 0.0 && self.window_radius.is_finite()) {
            return Err(invalid("window_radius", format!("must be > 0, got {}", self.window_radius)));
        }
        Ok(())
    }

    /// Runs `work(rng, count)` for every batch in parallel and returns the
    /// outputs in batch order.
    fn run_batches<T, F>(&self, work: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, u64) -> Result<T> + Sync,
    {
        self.validate()?;
        let n_batches = self.drops.div_ceil(self.batch);
        (0..n_batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(b);
                let count = self.batch.min(self.drops - b * self.batch);
                work(&mut rng, count)
            })
            .collect()
    }
}

/// A proportion or mean with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub ci: f64,
    /// Successes (for proportions) or accepted samples (for means).
    pub count: u64,
    pub trials: u64,
}

impl Estimate {
    /// `k / n`, with a half-width wide enough to cover the Wilson interval.
    pub fn proportion(k: u64, n: u64) -> Self {
        let p = if n == 0 { f64::NAN } else { k as f64 / n as f64 };
        let (c, h) = wilson(k, n, Z95);
        Self {
            value: p,
            ci: h + (c - p).abs(),
            count: k,
            trials: n,
        }
    }

    /// True if `x` lies within `k·ci + slack` of the estimate.
    pub fn agrees(&self, x: f64, k: f64, slack: f64) -> bool {
        (self.value - x).abs() <= k * self.ci + slack
    }
}

fn served(real: &NetworkRealization, n: &NearestRsu) -> ServingEvent {
    if n.line == 0 {
        ServingEvent::OwnRoad
    } else {
        ServingEvent::CrossRoad {
            rank: n.line,
            y: real.lines()[n.line].y,
        }
    }
}

/// Per-drop outcome of the direct link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectRecord {
    /// Serving distance; infinite when the window holds no RSU.
    pub rb1: f64,
    pub sinr_a: f64,
}

/// SINR_A and rb1 of every drop.
pub fn direct_records(params: &ModelParams, cfg: &McConfig) -> Result<Vec<DirectRecord>> {
    params.validate()?;
    let batches = cfg.run_batches(|rng, count| {
        let mut out = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let real = sample_with_rng(params, cfg.window_radius, rng)?;
            let epoch = FadingEpoch::draw(&real, params.mu, rng);
            out.push(match sinr_direct_at(&real, params, &epoch, Point2::ORIGIN) {
                Ok((s, n)) => DirectRecord { rb1: n.distance, sinr_a: s },
                Err(Error::NoRsuInWindow) => DirectRecord { rb1: f64::INFINITY, sinr_a: 0.0 },
                Err(e) => return Err(e),
            });
        }
        Ok(out)
    })?;
    Ok(batches.into_iter().flatten().collect())
}

/// Scenario-A coverage `P[SINR_A > T, rb1 > min_rb1]` from precomputed records.
pub fn scenario_a_from(records: &[DirectRecord], threshold: f64, min_rb1: f64, window_radius: f64) -> Result<CoverageEstimate> {
    let degenerate = records.iter().filter(|r| r.rb1.is_infinite()).count();
    if degenerate == records.len() {
        return Err(Error::AllDropsDegenerate { window_radius });
    }
    let k = records.iter().filter(|r| r.sinr_a > threshold && r.rb1 > min_rb1).count();
    let est = Estimate::proportion(k as u64, records.len() as u64);
    Ok(CoverageEstimate {
        value: est.value,
        method: Method::MonteCarlo,
        error: est.ci,
        diagnostics: Diagnostics {
            errors: vec![("degenerate_drops".into(), degenerate as f64)],
            ..Default::default()
        },
    })
}

/// Fraction of drops with `SINR_A > T` and `rb1 > min_rb1`, with a Wilson
/// 95% interval. Drops without any RSU in the window count as outages.
pub fn mc_scenario_a(params: &ModelParams, cfg: &McConfig, min_rb1: f64) -> Result<CoverageEstimate> {
    let records = direct_records(params, cfg)?;
    scenario_a_from(&records, params.threshold, min_rb1, cfg.window_radius)
}

/// Per-drop outcome of the relay scenario. SINR values do not depend on the
/// threshold, so one set of records serves any number of thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropRecord {
    pub rb1: f64,
    /// `None` when the window holds no RSU.
    pub event: Option<ServingEvent>,
    pub sinr_a: f64,
    pub sinr_b: f64,
    /// Distance from the relay to its nearest RSU.
    pub r0: f64,
    pub sinr_rel: f64,
}

pub fn relay_records(params: &ModelParams, cfg: &McConfig, r1: f64) -> Result<Vec<DropRecord>> {
    params.validate()?;
    if !(r1 > 0.0 && r1 < cfg.window_radius) {
        return Err(invalid("r1", format!("must lie in (0, window_radius), got {r1}")));
    }
    let batches = cfg.run_batches(|rng, count| {
        let mut out = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let real = sample_with_rng(params, cfg.window_radius, rng)?;
            let ea = FadingEpoch::draw(&real, params.mu, rng);
            let eb = FadingEpoch::draw(&real, params.mu, rng);
            let (rb1, event, sinr_a) = match sinr_direct_at(&real, params, &ea, Point2::ORIGIN) {
                Ok((s, n)) => (n.distance, Some(served(&real, &n)), s),
                Err(Error::NoRsuInWindow) => (f64::INFINITY, None, 0.0),
                Err(e) => return Err(e),
            };
            let sb = sinr_b(&real, params, &eb, r1)?;
            let rel = match cfg.coupling {
                RelayCoupling::Independent => {
                    let other = sample_with_rng(params, cfg.window_radius, rng)?;
                    let ec = FadingEpoch::draw(&other, params.mu, rng);
                    sinr_direct_at(&other, params, &ec, Point2::ORIGIN)
                }
                RelayCoupling::SharedRealization => {
                    let ec = FadingEpoch::draw(&real, params.mu, rng);
                    sinr_direct_at(&real, params, &ec, relay_point(&real, r1))
                }
            };
            let (r0, sinr_rel) = match rel {
                Ok((s, n)) => (n.distance, s),
                Err(Error::NoRsuInWindow) => (f64::INFINITY, 0.0),
                Err(e) => return Err(e),
            };
            out.push(DropRecord {
                rb1,
                event,
                sinr_a,
                sinr_b: sb,
                r0,
                sinr_rel,
            });
        }
        Ok(out)
    })?;
    let records: Vec<DropRecord> = batches.into_iter().flatten().collect();
    if records.iter().all(|r| r.event.is_none()) {
        return Err(Error::AllDropsDegenerate {
            window_radius: cfg.window_radius,
        });
    }
    Ok(records)
}

/// Estimates of the three relay factors and their combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayFactors {
    /// `P[SINR_B > T, not (SINR_A > T and rb1 > r1)]`, the counterpart of `ξ1`.
    pub p_joint_b_not_a: Estimate,
    /// `P[not (SINR_A > T and rb1 > r1)]`, the counterpart of `ξ3`.
    pub p_not_a: Estimate,
    /// `P[SINR_rel > T, r0 < rb1, rb1 > r1]`, the counterpart of `ξ2`.
    pub p_rel_and_constraint: Estimate,
    /// `p_joint_b_not_a / p_not_a · p_rel_and_constraint` with a delta-method CI.
    pub p_pipeline: Estimate,
    /// Set when `p_not_a` is below the analytic conditioning floor.
    pub conditioning_rare: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayEstimates {
    pub threshold: f64,
    pub r1: f64,
    pub drops: u64,
    pub degenerate: u64,
    /// Estimates over all drops.
    pub factors: RelayFactors,
    /// The same factors after discarding drops with `rb1 <= r1`, with the
    /// direct outage read as plain `SINR_A < T`.
    pub rejection: Option<RelayFactors>,
    pub rejected: u64,
}

/// `(j̄ / ā) · c̄` from per-drop indicators, with a delta-method 95% half-width.
fn ratio_product(ind: impl Iterator<Item = (bool, bool, bool)>) -> Result<RelayFactors> {
    let (mut n, mut sj, mut sa, mut sc) = (0u64, 0u64, 0u64, 0u64);
    let (mut sjj_a, mut sjc, mut sac) = (0u64, 0u64, 0u64);
    for (j, a, c) in ind {
        n += 1;
        sj += j as u64;
        sa += a as u64;
        sc += c as u64;
        sjj_a += (j && a) as u64;
        sjc += (j && c) as u64;
        sac += (a && c) as u64;
    }
    if sa == 0 {
        return Err(Error::EmptyConditioning { drops: n });
    }
    let nf = n as f64;
    let (j, a, c) = (sj as f64 / nf, sa as f64 / nf, sc as f64 / nf);
    let cov = |sxy: u64, x: f64, y: f64| sxy as f64 / nf - x * y;
    let (vj, va, vc) = (j * (1.0 - j), a * (1.0 - a), c * (1.0 - c));
    let (cja, cjc, cac) = (cov(sjj_a, j, a), cov(sjc, j, c), cov(sac, a, c));
    let value = j / a * c;
    let g = [c / a, -j * c / (a * a), j / a];
    let var = g[0] * g[0] * vj
        + g[1] * g[1] * va
        + g[2] * g[2] * vc
        + 2.0 * (g[0] * g[1] * cja + g[0] * g[2] * cjc + g[1] * g[2] * cac);
    Ok(RelayFactors {
        p_joint_b_not_a: Estimate::proportion(sj, n),
        p_not_a: Estimate::proportion(sa, n),
        p_rel_and_constraint: Estimate::proportion(sc, n),
        p_pipeline: Estimate {
            value,
            ci: Z95 * (var.max(0.0) / nf).sqrt(),
            count: sa,
            trials: n,
        },
        conditioning_rare: a < XI3_FLOOR,
    })
}

/// Relay estimates at `threshold` from precomputed records.
pub fn relay_from(records: &[DropRecord], threshold: f64, r1: f64) -> Result<RelayEstimates> {
    let t = threshold;
    let factors = ratio_product(records.iter().map(|d| {
        let not_a = !(d.sinr_a > t && d.rb1 > r1);
        (d.sinr_b > t && not_a, not_a, d.sinr_rel > t && d.r0 < d.rb1 && d.rb1 > r1)
    }))?;
    let accepted = records.iter().filter(|d| d.rb1 > r1 && d.event.is_some());
    let rejection = ratio_product(accepted.map(|d| {
        let not_a = d.sinr_a < t;
        (d.sinr_b > t && not_a, not_a, d.sinr_rel > t && d.r0 < d.rb1)
    }))
    .ok();
    let rejected = records.iter().filter(|d| !(d.rb1 > r1 && d.event.is_some())).count() as u64;
    Ok(RelayEstimates {
        threshold,
        r1,
        drops: records.len() as u64,
        degenerate: records.iter().filter(|d| d.event.is_none()).count() as u64,
        factors,
        rejection,
        rejected,
    })
}

pub fn mc_relay(params: &ModelParams, cfg: &McConfig, r1: f64) -> Result<RelayEstimates> {
    let records = relay_records(params, cfg, r1)?;
    relay_from(&records, params.threshold, r1)
}

/// Writes one whitespace-separated row per drop under a header line.
pub fn write_event_log<W: Write>(records: &[DropRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "drop rb1 rank y sinr_a sinr_b r0 sinr_rel")?;
    for (i, d) in records.iter().enumerate() {
        let (rank, y) = match d.event {
            Some(ServingEvent::OwnRoad) => (0i64, 0.0),
            Some(ServingEvent::CrossRoad { rank, y }) => (rank as i64, y),
            None => (-1, f64::NAN),
        };
        writeln!(
            w,
            "{i} {} {rank} {y} {} {} {} {}",
            d.rb1, d.sinr_a, d.sinr_b, d.r0, d.sinr_rel
        )?;
    }
    Ok(())
}

/// Half-width of the serving-distance (and road-distance) bins used to
/// condition on a continuous value.
pub fn conditioning_half_bin(target: f64) -> f64 {
    0.5 * (0.02f64).max(0.02 * target)
}

/// Empirical joint Laplace transform with its acceptance bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub value: f64,
    pub ci: f64,
    pub accepted: u64,
    pub rejected: u64,
}

/// Unit-power fading-weighted interference of one component at the origin.
fn component_sum(
    real: &NetworkRealization,
    params: &ModelParams,
    epoch: &FadingEpoch,
    component: InterferenceComponent,
    server: Option<&NearestRsu>,
) -> f64 {
    use InterferenceComponent as C;
    let (srv_line, srv_flat, rb1) = match server {
        Some(n) => (n.line, Some(real.rsu_offset(n.line) + n.index), n.distance),
        None => (0, None, 0.0),
    };
    let mut sum = 0.0;
    for (k, line) in real.lines().iter().enumerate() {
        let (tp, up) = line.project(Point2::ORIGIN);
        let u2 = up * up;
        if component == C::Ivt {
            let off = real.vehicle_offset(k);
            for (i, &t) in real.tx_vehicles(k).iter().enumerate() {
                sum += epoch.vehicles[off + i] / params.dist_pow_sq((t - tp) * (t - tp) + u2);
            }
            continue;
        }
        let take = match component {
            C::Iru => true,
            C::I0 => k == 0,
            C::I1 => k != 0 && k == srv_line,
            C::I2 => k != 0 && k < srv_line,
            C::I3 => k != 0 && k > srv_line && line.y < rb1,
            C::I4 => k != 0 && line.y >= rb1,
            C::Ivt => unreachable!(),
        };
        if !take {
            continue;
        }
        let off = real.rsu_offset(k);
        for (i, &t) in real.rsus(k).iter().enumerate() {
            if Some(off + i) == srv_flat {
                continue;
            }
            sum += epoch.rsu[off + i] / params.dist_pow_sq((t - tp) * (t - tp) + u2);
        }
    }
    sum
}

fn accepts(real: &NetworkRealization, n: &NearestRsu, event: ServingEvent, rb1: f64) -> bool {
    if (n.distance - rb1).abs() > conditioning_half_bin(rb1) {
        return false;
    }
    match event {
        ServingEvent::OwnRoad => n.line == 0,
        ServingEvent::CrossRoad { rank, y } => {
            n.line == rank && (real.lines()[rank].y - y).abs() <= conditioning_half_bin(y)
        }
    }
}

/// Per accepted drop, the component's interference `(I, I')` in two epochs
/// with independent fading on shared locations. Returns the samples and the
/// number of rejected drops.
pub fn laplace_samples(
    params: &ModelParams,
    cfg: &McConfig,
    component: InterferenceComponent,
    conditioning: Conditioning,
) -> Result<(Vec<(f64, f64)>, u64)> {
    params.validate()?;
    conditioning.validate()?;
    if matches!(conditioning, Conditioning::None)
        && matches!(
            component,
            InterferenceComponent::I1 | InterferenceComponent::I2 | InterferenceComponent::I3
        )
    {
        return Err(invalid(
            "conditioning",
            format!("{} is only defined given a serving event", component.name()),
        ));
    }
    let batches = cfg.run_batches(|rng, count| {
        let mut out = Vec::new();
        let mut rejected = 0u64;
        for _ in 0..count {
            let real = sample_with_rng(params, cfg.window_radius, rng)?;
            let server = match conditioning {
                Conditioning::None => None,
                Conditioning::Serving { event, rb1 } => match real.nearest_rsu(Point2::ORIGIN) {
                    Ok(n) if accepts(&real, &n, event, rb1) => Some(n),
                    Ok(_) | Err(Error::NoRsuInWindow) => {
                        rejected += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                },
            };
            let ea = FadingEpoch::draw(&real, params.mu, rng);
            let eb = FadingEpoch::draw(&real, params.mu, rng);
            out.push((
                component_sum(&real, params, &ea, component, server.as_ref()),
                component_sum(&real, params, &eb, component, server.as_ref()),
            ));
        }
        Ok((out, rejected))
    })?;
    let mut samples = Vec::new();
    let mut rejected = 0;
    for (s, r) in batches {
        samples.extend(s);
        rejected += r;
    }
    let rate = samples.len() as f64 / cfg.drops as f64;
    if rate < 1e-3 {
        return Err(Error::AcceptanceTooLow { rate });
    }
    Ok((samples, rejected))
}

/// Empirical `E[exp(−s_a I − s_b I')]` at every scale pair, sharing one set of drops.
pub fn mc_laplace_grid(
    params: &ModelParams,
    cfg: &McConfig,
    component: InterferenceComponent,
    conditioning: Conditioning,
    scales: &[(f64, f64)],
) -> Result<Vec<LaplaceEstimate>> {
    for &(a, b) in scales {
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(invalid("scales", format!("must be finite and >= 0, got ({a}, {b})")));
        }
    }
    let (samples, rejected) = laplace_samples(params, cfg, component, conditioning)?;
    Ok(scales
        .iter()
        .map(|&(s_a, s_b)| {
            let mut m = Moments::default();
            for &(i, j) in &samples {
                m.push((-s_a * i - s_b * j).exp());
            }
            LaplaceEstimate {
                value: m.mean,
                ci: m.ci95(),
                accepted: m.n,
                rejected,
            }
        })
        .collect())
}

pub fn mc_laplace(
    params: &ModelParams,
    cfg: &McConfig,
    component: InterferenceComponent,
    s_a: f64,
    s_b: f64,
    conditioning: Conditioning,
) -> Result<LaplaceEstimate> {
    Ok(mc_laplace_grid(params, cfg, component, conditioning, &[(s_a, s_b)])?[0])
}

/// Sample sets for goodness-of-fit tests of the distance laws.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistributionSamples {
    pub drops: u64,
    /// Distances of the nearest and second-nearest roads other than `L0`.
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    /// Nearest RSU on `L0`, ignoring every other road.
    pub own_line_nearest: Vec<f64>,
    /// `(y, r)`: the nearest road's distance and its nearest RSU, ignoring
    /// every other road.
    pub cross_line_nearest: Vec<(f64, f64)>,
    /// `rb1` on drops served from `L0`.
    pub served_own: Vec<f64>,
    /// `(y, rb1)` on drops served from the nearest other road.
    pub served_rank1: Vec<(f64, f64)>,
    /// `event_counts[0]` counts own-road service, `event_counts[n]` rank `n`.
    pub event_counts: Vec<u64>,
    pub degenerate: u64,
}

impl DistributionSamples {
    fn merge(&mut self, o: DistributionSamples) {
        self.drops += o.drops;
        self.y1.extend(o.y1);
        self.y2.extend(o.y2);
        self.own_line_nearest.extend(o.own_line_nearest);
        self.cross_line_nearest.extend(o.cross_line_nearest);
        self.served_own.extend(o.served_own);
        self.served_rank1.extend(o.served_rank1);
        if self.event_counts.len() < o.event_counts.len() {
            self.event_counts.resize(o.event_counts.len(), 0);
        }
        for (a, b) in self.event_counts.iter_mut().zip(o.event_counts) {
            *a += b;
        }
        self.degenerate += o.degenerate;
    }
}

fn within_line_nearest(real: &NetworkRealization, k: usize) -> Option<f64> {
    let line = &real.lines()[k];
    let (tp, up) = line.project(Point2::ORIGIN);
    let pts = real.rsus(k);
    let j = pts.partition_point(|&t| t < tp);
    [j.wrapping_sub(1), j]
        .iter()
        .filter_map(|&i| pts.get(i))
        .map(|&t| (t - tp).hypot(up))
        .min_by(f64::total_cmp)
}

pub fn mc_distributions(params: &ModelParams, cfg: &McConfig) -> Result<DistributionSamples> {
    params.validate()?;
    let batches = cfg.run_batches(|rng, count| {
        let mut s = DistributionSamples {
            drops: count,
            ..Default::default()
        };
        for _ in 0..count {
            let real = sample_with_rng(params, cfg.window_radius, rng)?;
            let lines = real.lines();
            if let Some(l) = lines.get(1) {
                s.y1.push(l.y);
                if let Some(r) = within_line_nearest(&real, 1) {
                    s.cross_line_nearest.push((l.y, r));
                }
            }
            if let Some(l) = lines.get(2) {
                s.y2.push(l.y);
            }
            if let Some(r) = within_line_nearest(&real, 0) {
                s.own_line_nearest.push(r);
            }
            match real.nearest_rsu(Point2::ORIGIN) {
                Ok(n) => {
                    if s.event_counts.len() <= n.line {
                        s.event_counts.resize(n.line + 1, 0);
                    }
                    s.event_counts[n.line] += 1;
                    match n.line {
                        0 => s.served_own.push(n.distance),
                        1 => s.served_rank1.push((lines[1].y, n.distance)),
                        _ => {}
                    }
                }
                Err(Error::NoRsuInWindow) => s.degenerate += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(s)
    })?;
    let mut out = DistributionSamples::default();
    for b in batches {
        out.merge(b);
    }
    if out.degenerate == out.drops {
        return Err(Error::AllDropsDegenerate {
            window_radius: cfg.window_radius,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{cdf_yn, prob_e0};
    use crate::geometry::Line;
    use crate::laplace::{joint_lt, single_lt};
    use crate::quadrature::QuadratureSpec;

    fn cfg(drops: u64, seed: u64) -> McConfig {
        McConfig::new(drops, seed, 4.0)
    }

    #[test]
    fn huge_threshold_gives_no_coverage() {
        let p = ModelParams::default().with_threshold(1e12);
        let e = mc_scenario_a(&p, &cfg(300, 1), 0.0).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.method, Method::MonteCarlo);
    }

    #[test]
    fn lone_rsu_without_noise_is_covered() {
        // a one-road scene with a single RSU: no interference, no noise
        let p = ModelParams {
            noise: 0.0,
            ..Default::default()
        };
        let real = NetworkRealization::from_parts(
            vec![Line::new(0.0, 0.3).unwrap()],
            vec![vec![0.2]],
            vec![vec![]],
            4.0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = FadingEpoch::draw(&real, p.mu, &mut rng);
        let (s, _) = sinr_direct_at(&real, &p, &e, Point2::ORIGIN).unwrap();
        assert!(s.is_infinite() && s > p.threshold);
    }

    #[test]
    fn batches_cover_every_drop_in_order() {
        let c = McConfig { batch: 7, ..cfg(50, 3) };
        let counts = c.run_batches(|_, n| Ok(n)).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 50);
        assert_eq!(counts.len(), 8);
        assert_eq!(*counts.last().unwrap(), 1);
    }

    #[test]
    fn reproducible_across_pools() {
        let p = ModelParams::default();
        let c = McConfig { batch: 16, ..cfg(200, 11) };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| relay_records(&p, &c, 0.1).unwrap());
        let b = four.install(|| relay_records(&p, &c, 0.1).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn zero_scales_are_exactly_one() {
        let p = ModelParams::default();
        let e = mc_laplace(&p, &cfg(50, 2), InterferenceComponent::Iru, 0.0, 0.0, Conditioning::None).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.ci, 0.0);
    }

    #[test]
    fn bookkeeping_adds_up() {
        let p = ModelParams::default();
        let cond = Conditioning::Serving {
            event: ServingEvent::OwnRoad,
            rb1: 0.15,
        };
        let c = cfg(4000, 5);
        let e = mc_laplace(&p, &c, InterferenceComponent::I0, 1e-3, 0.0, cond).unwrap();
        assert_eq!(e.accepted + e.rejected, c.drops);
        assert!(e.accepted > 0);
    }

    #[test]
    fn rare_conditioning_is_refused() {
        let p = ModelParams::default();
        let cond = Conditioning::Serving {
            event: ServingEvent::CrossRoad { rank: 5, y: 0.05 },
            rb1: 0.06,
        };
        let err = mc_laplace(&p, &cfg(500, 5), InterferenceComponent::I1, 1e-3, 0.0, cond).unwrap_err();
        assert!(matches!(err, Error::AcceptanceTooLow { .. }));
        let err = mc_laplace(&p, &cfg(10, 5), InterferenceComponent::I2, 1.0, 0.0, Conditioning::None).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }

    #[test]
    fn unconditioned_own_line_matches_analytic() {
        let p = ModelParams::default();
        let spec = QuadratureSpec::default();
        let s = 2e-3;
        let e = mc_laplace(&p, &cfg(4000, 8), InterferenceComponent::I0, s, 0.0, Conditioning::None).unwrap();
        let a = single_lt(InterferenceComponent::I0, s, &p, Conditioning::None, &spec).unwrap();
        assert!((e.value - a).abs() < 3.0 * e.ci + 0.01, "{} ± {} vs {a}", e.value, e.ci);
    }

    #[test]
    fn conditioned_components_match_analytic() {
        let p = ModelParams::default();
        let spec = QuadratureSpec::default();
        let cond = Conditioning::Serving {
            event: ServingEvent::CrossRoad { rank: 1, y: 0.1 },
            rb1: 0.2,
        };
        let c = McConfig::new(60_000, 9, 4.0);
        for comp in [InterferenceComponent::I1, InterferenceComponent::I3, InterferenceComponent::I4] {
            let s = 3e-3;
            let e = mc_laplace(&p, &c, comp, s, s, cond).unwrap();
            let a = joint_lt(comp, s, s, &p, cond, &spec).unwrap();
            assert!((e.value - a).abs() < 3.0 * e.ci + 0.01, "{comp:?}: {} ± {} vs {a}", e.value, e.ci);
        }
    }

    #[test]
    fn event_frequencies_and_road_distances() {
        let p = ModelParams::default();
        let d = mc_distributions(&p, &cfg(3000, 4)).unwrap();
        assert_eq!(d.event_counts.iter().sum::<u64>() + d.degenerate, d.drops);
        let freq = d.event_counts[0] as f64 / d.drops as f64;
        let e0 = prob_e0(&p, &QuadratureSpec::default()).unwrap();
        let est = Estimate::proportion(d.event_counts[0], d.drops);
        assert!(est.agrees(e0, 3.0, 0.0), "{freq} vs {e0}");
        let ks = stats::ks_test(&d.y1, |y| cdf_yn(&p, 1, y));
        assert!(ks.p_value > 1e-3);
    }

    #[test]
    fn ci_shrinks_with_drops() {
        let p = ModelParams::default();
        let ladder: Vec<f64> = [500u64, 1000, 2000, 4000]
            .iter()
            .map(|&n| mc_scenario_a(&p, &cfg(n, 6), 0.0).unwrap().error)
            .collect();
        for w in ladder.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2f64.sqrt()).abs() < 0.2, "{ladder:?}");
        }
    }

    #[test]
    fn pipeline_delta_method() {
        // deterministic indicators: j = a = c = true on half, false on half
        let ind = (0..100).map(|i| (i % 2 == 0, i % 2 == 0, i % 2 == 0));
        let f = ratio_product(ind).unwrap();
        assert!((f.p_pipeline.value - 0.5).abs() < 1e-15);
        assert!(f.p_pipeline.ci > 0.0);
        let none = ratio_product((0..10).map(|_| (false, false, true))).unwrap_err();
        assert_eq!(none, Error::EmptyConditioning { drops: 10 });
    }

    #[test]
    fn event_log_has_one_row_per_drop() {
        let p = ModelParams::default();
        let recs = relay_records(&p, &cfg(20, 1), 0.1).unwrap();
        let mut buf = Vec::new();
        write_event_log(&recs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 21);
    }
}
