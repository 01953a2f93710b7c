//! Road layouts and the point processes that live on them.
//!
//! A realization is always drawn under Palm conditioning: road `L0` passes
//! through the origin, where the typical vehicle sits. Each road stores the
//! signed abscissae of its RSUs and transmitting vehicles, restricted to the
//! chord cut by the simulation disk `b(o, window_radius)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::distributions::{serving_distance_moment, ServingEvent};
use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A road in `(y, θ)` form: the foot of the perpendicular from the origin is
/// `(y cos θ, y sin θ)` and abscissa `t` runs along `(−sin θ, cos θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub y: f64,
    pub theta: f64,
}

impl Line {
    pub fn new(y: f64, theta: f64) -> Result<Self> {
        if !(y >= 0.0 && y.is_finite()) {
            return Err(invalid("y", format!("must be finite and >= 0, got {y}")));
        }
        if !(0.0..2.0 * PI).contains(&theta) {
            return Err(invalid("theta", format!("must lie in [0, 2π), got {theta}")));
        }
        Ok(Self { y, theta })
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.theta.cos(), self.theta.sin())
    }

    pub fn direction(&self) -> Point2 {
        Point2::new(-self.theta.sin(), self.theta.cos())
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        let (s, c) = self.theta.sin_cos();
        Point2::new(self.y * c - t * s, self.y * s + t * c)
    }

    /// Abscissa of the orthogonal projection of `p` and its signed offset
    /// from the road.
    pub fn project(&self, p: Point2) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (-p.x * s + p.y * c, p.x * c + p.y * s - self.y)
    }

    pub fn distance_from(&self, p: Point2) -> f64 {
        self.project(p).1.abs()
    }

    /// Half-length of the chord cut by `b(o, radius)`; zero if the road misses it.
    pub fn half_chord(&self, radius: f64) -> f64 {
        if self.y >= radius {
            0.0
        } else {
            ((radius - self.y) * (radius + self.y)).sqrt()
        }
    }
}

/// The nearest RSU to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestRsu {
    pub distance: f64,
    pub line: usize,
    /// Position within that road's sorted RSU list.
    pub index: usize,
    pub abscissa: f64,
}

/// One sampled road network, stored in flat arrays with per-road offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    lines: Vec<Line>,
    rsu: Vec<f64>,
    rsu_offsets: Vec<usize>,
    vehicles: Vec<f64>,
    vehicle_offsets: Vec<usize>,
    window_radius: f64,
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive mean");
    let k: f64 = d.sample(rng);
    k as usize
}

fn push_sorted_uniform<R: Rng + ?Sized>(out: &mut Vec<f64>, density: f64, half: f64, rng: &mut R) {
    let n = poisson_count(density * 2.0 * half, rng);
    let start = out.len();
    out.extend((0..n).map(|_| rng.random_range(-half..half)));
    out[start..].sort_unstable_by(f64::total_cmp);
}

impl NetworkRealization {
    /// Builds a realization from explicit per-road lists. Lists are sorted on
    /// the way in; `lines[0]` must be the Palm road with `y = 0`.
    pub fn from_parts(
        lines: Vec<Line>,
        rsus_per_line: Vec<Vec<f64>>,
        tx_vehicles_per_line: Vec<Vec<f64>>,
        window_radius: f64,
    ) -> Result<Self> {
        if lines.is_empty() || lines[0].y != 0.0 {
            return Err(invalid("lines", "the first road must pass through the origin"));
        }
        if rsus_per_line.len() != lines.len() || tx_vehicles_per_line.len() != lines.len() {
            return Err(invalid("lines", "one RSU list and one vehicle list per road"));
        }
        if !(window_radius > 0.0) {
            return Err(invalid("window_radius", format!("must be > 0, got {window_radius}")));
        }
        let mut order: Vec<usize> = (0..lines.len()).collect();
        order[1..].sort_by(|&a, &b| lines[a].y.total_cmp(&lines[b].y));
        let flatten = |lists: &[Vec<f64>]| {
            let mut flat = Vec::new();
            let mut offsets = vec![0];
            for &k in &order {
                let start = flat.len();
                flat.extend_from_slice(&lists[k]);
                flat[start..].sort_unstable_by(f64::total_cmp);
                offsets.push(flat.len());
            }
            (flat, offsets)
        };
        let (rsu, rsu_offsets) = flatten(&rsus_per_line);
        let (vehicles, vehicle_offsets) = flatten(&tx_vehicles_per_line);
        Ok(Self {
            lines: order.iter().map(|&k| lines[k]).collect(),
            rsu,
            rsu_offsets,
            vehicles,
            vehicle_offsets,
            window_radius,
        })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn rsus(&self, line: usize) -> &[f64] {
        &self.rsu[self.rsu_offsets[line]..self.rsu_offsets[line + 1]]
    }

    pub fn tx_vehicles(&self, line: usize) -> &[f64] {
        &self.vehicles[self.vehicle_offsets[line]..self.vehicle_offsets[line + 1]]
    }

    pub fn rsu_count(&self) -> usize {
        self.rsu.len()
    }

    pub fn tx_vehicle_count(&self) -> usize {
        self.vehicles.len()
    }

    /// Offset of road `line`'s first RSU in the flat RSU order.
    pub(crate) fn rsu_offset(&self, line: usize) -> usize {
        self.rsu_offsets[line]
    }

    pub(crate) fn vehicle_offset(&self, line: usize) -> usize {
        self.vehicle_offsets[line]
    }

    /// Same network with every road rotated by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let mut out = self.clone();
        for l in &mut out.lines {
            l.theta = (l.theta + angle).rem_euclid(2.0 * PI);
        }
        out
    }

    pub fn nearest_rsu(&self, from: Point2) -> Result<NearestRsu> {
        let mut best: Option<NearestRsu> = None;
        let mut best_d2 = f64::INFINITY;
        for (k, line) in self.lines.iter().enumerate() {
            let (tp, up) = line.project(from);
            let u2 = up * up;
            if u2 >= best_d2 {
                continue;
            }
            let pts = self.rsus(k);
            // sorted abscissae: the closest one is adjacent to the projection
            let j = pts.partition_point(|&t| t < tp);
            for i in [j.wrapping_sub(1), j] {
                if let Some(&t) = pts.get(i) {
                    let d2 = (t - tp) * (t - tp) + u2;
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = Some(NearestRsu {
                            distance: 0.0,
                            line: k,
                            index: i,
                            abscissa: t,
                        });
                    }
                }
            }
        }
        let mut n = best.ok_or(Error::NoRsuInWindow)?;
        n.distance = best_d2.sqrt();
        Ok(n)
    }

    /// Index of the road carrying `p` (distance below 1e-9 km), preferring `L0`.
    fn own_line(&self, p: Point2) -> Option<usize> {
        self.lines.iter().position(|l| l.distance_from(p) <= 1e-9)
    }

    pub fn serving_event(&self, from: Point2) -> Result<ServingEvent> {
        let n = self.nearest_rsu(from)?;
        let own = self.own_line(from);
        if own == Some(n.line) {
            return Ok(ServingEvent::OwnRoad);
        }
        let y = self.lines[n.line].distance_from(from);
        let rank = if from == Point2::ORIGIN {
            n.line
        } else {
            1 + self
                .lines
                .iter()
                .enumerate()
                .filter(|&(k, l)| Some(k) != own && k != n.line && l.distance_from(from) < y)
                .count()
        };
        Ok(ServingEvent::CrossRoad { rank, y })
    }

    /// Number of RSUs inside the closed disk `b(p, r)`.
    pub fn rsus_within(&self, p: Point2, r: f64) -> usize {
        let mut count = 0;
        for (k, line) in self.lines.iter().enumerate() {
            let (tp, up) = line.project(p);
            if up.abs() > r {
                continue;
            }
            let h = (r * r - up * up).sqrt();
            let pts = self.rsus(k);
            let lo = pts.partition_point(|&t| t < tp - h);
            let hi = pts.partition_point(|&t| t <= tp + h);
            count += hi - lo;
        }
        count
    }

    /// Writes one record per road and per point:
    /// `line <k> <y> <theta>`, `rsu <k> <t> <x> <y>`, `vehicle <k> <t> <x> <y>`.
    pub fn dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# window_radius {}", self.window_radius)?;
        for (k, line) in self.lines.iter().enumerate() {
            writeln!(w, "line {k} {} {}", line.y, line.theta)?;
            for (tag, pts) in [("rsu", self.rsus(k)), ("vehicle", self.tx_vehicles(k))] {
                for &t in pts {
                    let p = line.point_at(t);
                    writeln!(w, "{tag} {k} {t} {} {}", p.x, p.y)?;
                }
            }
        }
        Ok(())
    }
}

/// Draws one realization inside `b(o, window_radius)`, deterministic in `seed`.
pub fn sample_realization(params: &ModelParams, window_radius: f64, seed: u64) -> Result<NetworkRealization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with_rng(params, window_radius, &mut rng)
}

pub fn sample_with_rng<R: Rng + ?Sized>(
    params: &ModelParams,
    window_radius: f64,
    rng: &mut R,
) -> Result<NetworkRealization> {
    params.validate()?;
    if !(window_radius > 0.0 && window_radius.is_finite()) {
        return Err(invalid("window_radius", format!("must be > 0, got {window_radius}")));
    }
    let n_lines = poisson_count(2.0 * params.rho * window_radius, rng);
    let mut lines = Vec::with_capacity(n_lines + 1);
    lines.push(Line {
        y: 0.0,
        theta: rng.random_range(0.0..2.0 * PI),
    });
    let mut ys: Vec<f64> = (0..n_lines).map(|_| rng.random_range(0.0..window_radius)).collect();
    ys.sort_unstable_by(f64::total_cmp);
    for y in ys {
        lines.push(Line {
            y,
            theta: rng.random_range(0.0..2.0 * PI),
        });
    }
    let lambda_vt = params.lambda_vt();
    let mut rsu = Vec::new();
    let mut vehicles = Vec::new();
    let mut rsu_offsets = vec![0];
    let mut vehicle_offsets = vec![0];
    for line in &lines {
        let h = line.half_chord(window_radius);
        push_sorted_uniform(&mut rsu, params.lambda_ru, h, rng);
        push_sorted_uniform(&mut vehicles, lambda_vt, h, rng);
        rsu_offsets.push(rsu.len());
        vehicle_offsets.push(vehicles.len());
    }
    Ok(NetworkRealization {
        lines,
        rsu,
        rsu_offsets,
        vehicles,
        vehicle_offsets,
        window_radius,
    })
}

/// Mean fading-free interference, in unit transmit power, from points beyond
/// `radius`: the Cox process on roads has areal density `ρλ`, plus the
/// Palm road's own points.
pub fn tail_interference(params: &ModelParams, density: f64, radius: f64) -> Result<f64> {
    params.require_planar()?;
    let eta = params.eta;
    let planar = 2.0 * PI * params.rho * density * radius.powf(2.0 - eta) / (eta - 2.0);
    let own = 2.0 * density * radius.powf(1.0 - eta) / (eta - 1.0);
    Ok(planar + own)
}

/// Upper bound on the coverage bias caused by ignoring everything beyond
/// `radius`, for the direct link (averaged over the serving distance) and,
/// if `r1 > 0`, for the relay link. Uses `1 − e^{−x} ≤ x`.
pub fn edge_bias_bound(params: &ModelParams, radius: f64, r1: f64, rb_eta_moment: f64) -> Result<f64> {
    let total = (params.kappa * tail_interference(params, params.lambda_ru, radius)?
        + params.nu * tail_interference(params, params.lambda_vt(), radius)?)
        / params.mu;
    let direct = params.mu * params.threshold * rb_eta_moment * total / params.kappa;
    let relay = params.mu * params.threshold * params.dist_pow(r1) * total / params.nu;
    Ok(direct + relay)
}

/// Smallest radius (at least 3 km) whose edge bias bound is below `eps`.
pub fn default_window_radius(params: &ModelParams, r1: f64, eps: f64) -> Result<f64> {
    params.require_planar()?;
    if !(eps > 0.0) {
        return Err(invalid("eps", "must be > 0"));
    }
    let moment = serving_distance_moment(params, params.eta, &QuadratureSpec::default())?;
    let mut lo = 3.0;
    if edge_bias_bound(params, lo, r1, moment)? <= eps {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    while edge_bias_bound(params, hi, r1, moment)? > eps {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(invalid("eps", "edge bias bound unreachable below 1000 km"));
        }
    }
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if edge_bias_bound(params, mid, r1, moment)? > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(lines: Vec<Line>, rsus: Vec<Vec<f64>>) -> NetworkRealization {
        let n = lines.len();
        NetworkRealization::from_parts(lines, rsus, vec![vec![]; n], 50.0).unwrap()
    }

    #[test]
    fn one_rsu_on_palm_road() {
        let real = single(vec![Line::new(0.0, 1.0).unwrap()], vec![vec![3.0]]);
        let n = real.nearest_rsu(Point2::ORIGIN).unwrap();
        assert!((n.distance - 3.0).abs() < 1e-12);
        assert_eq!(real.serving_event(Point2::ORIGIN).unwrap(), ServingEvent::OwnRoad);
    }

    #[test]
    fn rsu_at_perpendicular_foot() {
        let real = single(
            vec![Line::new(0.0, 0.3).unwrap(), Line::new(2.0, 0.0).unwrap()],
            vec![vec![], vec![0.0]],
        );
        let n = real.nearest_rsu(Point2::ORIGIN).unwrap();
        assert!((n.distance - 2.0).abs() < 1e-12);
        assert_eq!(n.line, 1);
        assert_eq!(
            real.serving_event(Point2::ORIGIN).unwrap(),
            ServingEvent::CrossRoad { rank: 1, y: 2.0 }
        );
    }

    #[test]
    fn empty_window_is_an_error() {
        let real = single(vec![Line::new(0.0, 0.0).unwrap()], vec![vec![]]);
        assert_eq!(real.nearest_rsu(Point2::ORIGIN), Err(Error::NoRsuInWindow));
    }

    #[test]
    fn no_vehicles_without_vehicle_density() {
        let p = ModelParams { lambda_v: 0.0, ..Default::default() };
        let real = sample_realization(&p, 5.0, 7).unwrap();
        assert_eq!(real.tx_vehicle_count(), 0);
        assert!(real.rsu_count() > 0);
    }

    #[test]
    fn same_seed_same_realization() {
        let p = ModelParams::default();
        assert_eq!(sample_realization(&p, 4.0, 11).unwrap(), sample_realization(&p, 4.0, 11).unwrap());
        assert_ne!(sample_realization(&p, 4.0, 11).unwrap(), sample_realization(&p, 4.0, 12).unwrap());
    }

    #[test]
    fn points_stay_on_their_chords() {
        let p = ModelParams::default();
        let real = sample_realization(&p, 3.0, 5).unwrap();
        assert_eq!(real.lines()[0].y, 0.0);
        for (k, l) in real.lines().iter().enumerate() {
            let h = l.half_chord(3.0);
            for &t in real.rsus(k).iter().chain(real.tx_vehicles(k)) {
                assert!(t.abs() <= h);
                assert!(l.point_at(t).norm() <= 3.0 + 1e-12);
            }
            assert!(real.rsus(k).windows(2).all(|w| w[0] <= w[1]));
        }
        assert!(real.lines().windows(2).all(|w| w[0].y <= w[1].y));
    }

    #[test]
    fn mean_line_count_is_twice_rho_r() {
        let p = ModelParams::default();
        let drops = 4000;
        let total: usize = (0..drops)
            .map(|s| sample_realization(&p, 10.0, s).unwrap().lines().len() - 1)
            .sum();
        let mean = total as f64 / drops as f64;
        // Poisson(40): standard error of the mean is 0.1
        assert!((mean - 40.0).abs() < 0.5, "{mean}");
    }

    #[test]
    fn nearest_matches_exhaustive_scan() {
        let p = ModelParams::default();
        for seed in 0..200 {
            let real = sample_realization(&p, 3.0, seed).unwrap();
            let q = Point2::new(0.3 * (seed as f64).sin(), 0.2);
            let mut best = (f64::INFINITY, 0, 0.0);
            for (k, l) in real.lines().iter().enumerate() {
                for &t in real.rsus(k) {
                    let d = l.point_at(t).distance(q);
                    if d < best.0 {
                        best = (d, k, t);
                    }
                }
            }
            let n = real.nearest_rsu(q).unwrap();
            assert!((n.distance - best.0).abs() < 1e-12);
            assert_eq!((n.line, n.abscissa), (best.1, best.2));
        }
    }

    #[test]
    fn distance_count_duality_holds_per_realization() {
        let p = ModelParams::default();
        for seed in 0..300 {
            let real = sample_realization(&p, 3.0, seed).unwrap();
            let d = real.nearest_rsu(Point2::ORIGIN).unwrap().distance;
            for &r in &[0.05, 0.1, 0.2, 0.4] {
                assert_eq!(d <= r, real.rsus_within(Point2::ORIGIN, r) > 0);
            }
        }
    }

    #[test]
    fn rotation_preserves_distances_to_origin() {
        let p = ModelParams::default();
        let real = sample_realization(&p, 3.0, 3).unwrap();
        let rot = real.rotated(1.234);
        assert_eq!(
            real.nearest_rsu(Point2::ORIGIN).unwrap().distance.to_bits(),
            rot.nearest_rsu(Point2::ORIGIN).unwrap().distance.to_bits()
        );
    }

    #[test]
    fn rank_counts_roads_closer_to_query() {
        let lines = vec![
            Line::new(0.0, 0.0).unwrap(),
            Line::new(0.5, 0.0).unwrap(),
            Line::new(0.8, PI).unwrap(),
        ];
        let real = single(lines, vec![vec![], vec![], vec![0.0]]);
        // from the origin the serving road is the second nearest
        assert_eq!(
            real.serving_event(Point2::ORIGIN).unwrap(),
            ServingEvent::CrossRoad { rank: 2, y: 0.8 }
        );
    }

    #[test]
    fn dump_lists_every_point() {
        let p = ModelParams::default();
        let real = sample_realization(&p, 2.0, 1).unwrap();
        let mut buf = Vec::new();
        real.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("rsu ")).count(), real.rsu_count());
        assert_eq!(text.lines().filter(|l| l.starts_with("line ")).count(), real.lines().len());
    }

    #[test]
    fn window_radius_meets_bias_target() {
        let p = ModelParams::default();
        let r = default_window_radius(&p, 0.1, 1e-3).unwrap();
        let m = serving_distance_moment(&p, p.eta, &QuadratureSpec::default()).unwrap();
        assert!(edge_bias_bound(&p, r, 0.1, m).unwrap() <= 1e-3);
        assert!(r >= 3.0);
        assert!(default_window_radius(&ModelParams { eta: 2.0, ..p }, 0.1, 1e-3).is_err());
    }
}
