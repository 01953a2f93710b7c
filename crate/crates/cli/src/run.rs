//! Sweep points, per-point evaluation and CSV rendering.

use std::fmt::Write as _;
use std::io::Write;

use anyhow::{bail, Context};
use rayon::prelude::*;

use plpcov::geometry::default_window_radius;
use plpcov::montecarlo::{relay_from, relay_records, scenario_a_from, write_event_log, DropRecord, McConfig};
use plpcov::relay_coverage::RelayAnalyzer;
use plpcov::ModelParams;

use crate::config::{db_to_linear, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    ThresholdDb,
    LambdaRu,
    Rho,
    R1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl std::str::FromStr for Sweep {
    type Err = String;

    /// `VAR:FROM:TO:STEP`, e.g. `threshold_db:-10:10:2`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("expected VAR:FROM:TO:STEP, got `{s}`"));
        }
        let var = match parts[0] {
            "threshold_db" | "threshold-db" => SweepVar::ThresholdDb,
            "lambda_ru" => SweepVar::LambdaRu,
            "rho" => SweepVar::Rho,
            "r1" => SweepVar::R1,
            v => return Err(format!("cannot sweep `{v}`; use threshold_db, lambda_ru, rho or r1")),
        };
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("`{x}` is not a number"));
        let sweep = Sweep {
            var,
            from: num(parts[1])?,
            to: num(parts[2])?,
            step: num(parts[3])?,
        };
        if !(sweep.step > 0.0) || !(sweep.to >= sweep.from) || !sweep.from.is_finite() || !sweep.to.is_finite() {
            return Err(format!("sweep range `{s}` is empty: need FROM <= TO and STEP > 0"));
        }
        Ok(sweep)
    }
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.from + i as f64 * self.step).collect()
    }
}

/// One evaluation point of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    /// The threshold as given, so sweep values print exactly.
    pub threshold_db: f64,
    pub params: ModelParams,
    pub r1: f64,
}

pub fn points(cfg: &RunConfig, sweep: Option<&Sweep>) -> Vec<Point> {
    let base = Point {
        threshold_db: 10.0 * cfg.params.threshold.log10(),
        params: cfg.params,
        r1: cfg.r1,
    };
    let Some(s) = sweep else {
        return vec![base];
    };
    s.values()
        .into_iter()
        .map(|v| {
            let mut p = base;
            match s.var {
                SweepVar::ThresholdDb => {
                    p.threshold_db = v;
                    p.params.threshold = db_to_linear(v);
                }
                SweepVar::LambdaRu => p.params.lambda_ru = v,
                SweepVar::Rho => p.params.rho = v,
                SweepVar::R1 => p.r1 = v,
            }
            p
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalyticRow {
    pub scenario_a: Option<(f64, f64)>,
    pub xi: Option<[f64; 3]>,
    pub relay: Option<(f64, f64)>,
    pub max_ranks: usize,
    pub errors: Vec<String>,
}

pub fn analytic_row(pt: &Point, cfg: &RunConfig) -> AnalyticRow {
    let mut row = AnalyticRow::default();
    let an = match RelayAnalyzer::new(&pt.params, &cfg.spec) {
        Ok(a) => a,
        Err(e) => {
            row.errors.push(format!("analytic: {e}"));
            return row;
        }
    };
    match an.scenario_a_coverage() {
        Ok(e) => {
            row.scenario_a = Some((e.value, e.error));
            row.max_ranks = row.max_ranks.max(e.diagnostics.max_ranks);
        }
        Err(e) => row.errors.push(format!("scenario A: {e}")),
    }
    let xi = (an.xi1(pt.r1), an.xi2(pt.r1), an.xi3(pt.r1));
    match xi {
        (Ok(a), Ok(b), Ok(c)) => row.xi = Some([a.value, b.value, c.value]),
        (a, b, c) => {
            for e in [a.err(), b.err(), c.err()].into_iter().flatten() {
                row.errors.push(format!("xi: {e}"));
            }
        }
    }
    match an.relay_coverage(pt.r1) {
        Ok(e) => {
            row.relay = Some((e.value, e.error));
            row.max_ranks = row.max_ranks.max(e.diagnostics.max_ranks);
        }
        Err(e) => row.errors.push(format!("relay coverage: {e}")),
    }
    row
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct McRow {
    pub drops: u64,
    pub window: f64,
    /// (value, CI half-width) for Scenario A, ξ1, ξ2, ξ3, the pipeline and
    /// the rejection-form pipeline.
    pub values: Option<[(f64, f64); 6]>,
    pub errors: Vec<String>,
}

fn mc_config(cfg: &RunConfig, window: f64) -> McConfig {
    McConfig {
        batch: cfg.batch,
        coupling: cfg.coupling,
        ..McConfig::new(cfg.drops, cfg.seed, window)
    }
}

fn window_for(cfg: &RunConfig, pts: &[Point]) -> anyhow::Result<f64> {
    if let Some(r) = cfg.window_radius {
        return Ok(r);
    }
    let mut r: f64 = 0.0;
    for p in pts {
        r = r.max(default_window_radius(&p.params, p.r1, cfg.window_eps)?);
    }
    Ok(r)
}

fn mc_row(pt: &Point, records: &anyhow::Result<Vec<DropRecord>>, cfg: &RunConfig, window: f64) -> McRow {
    let mut row = McRow {
        drops: cfg.drops,
        window,
        ..Default::default()
    };
    let recs = match records {
        Ok(r) => r,
        Err(e) => {
            row.errors.push(format!("mc: {e:#}"));
            return row;
        }
    };
    let direct: Vec<_> = recs
        .iter()
        .map(|d| plpcov::montecarlo::DirectRecord { rb1: d.rb1, sinr_a: d.sinr_a })
        .collect();
    let a = scenario_a_from(&direct, pt.params.threshold, 0.0, window);
    let r = relay_from(recs, pt.params.threshold, pt.r1);
    match (a, r) {
        (Ok(a), Ok(r)) => {
            let f = r.factors;
            let rej = r
                .rejection
                .map(|x| (x.p_pipeline.value, x.p_pipeline.ci))
                .unwrap_or((f64::NAN, f64::NAN));
            row.values = Some([
                (a.value, a.error),
                (f.p_joint_b_not_a.value, f.p_joint_b_not_a.ci),
                (f.p_rel_and_constraint.value, f.p_rel_and_constraint.ci),
                (f.p_not_a.value, f.p_not_a.ci),
                (f.p_pipeline.value, f.p_pipeline.ci),
                rej,
            ]);
            if f.conditioning_rare {
                row.errors.push("mc: direct outage below the conditioning floor".into());
            }
        }
        (a, r) => {
            for e in [a.err(), r.err()].into_iter().flatten() {
                row.errors.push(format!("mc: {e}"));
            }
        }
    }
    row
}

/// Drop records per point. A threshold sweep shares one set of drops,
/// sized for its largest threshold, across all its points.
pub fn mc_rows(pts: &[Point], cfg: &RunConfig, sweep: Option<&Sweep>) -> (Vec<McRow>, Vec<anyhow::Result<Vec<DropRecord>>>) {
    let run = |group: &[Point]| -> (f64, anyhow::Result<Vec<DropRecord>>) {
        match window_for(cfg, group) {
            Ok(w) => {
                let recs = relay_records(&group[0].params, &mc_config(cfg, w), group[0].r1).context("simulation");
                (w, recs)
            }
            Err(e) => (f64::NAN, Err(e)),
        }
    };
    if matches!(sweep, Some(s) if s.var == SweepVar::ThresholdDb) {
        let (w, recs) = run(pts);
        let rows = pts.par_iter().map(|p| mc_row(p, &recs, cfg, w)).collect();
        return (rows, vec![recs]);
    }
    let out: Vec<(McRow, anyhow::Result<Vec<DropRecord>>)> = pts
        .par_iter()
        .map(|p| {
            let (w, recs) = run(std::slice::from_ref(p));
            (mc_row(p, &recs, cfg, w), recs)
        })
        .collect();
    out.into_iter().unzip()
}

pub const HEADER: &str = "point,threshold_db,lambda_ru,rho,r1,\
scenario_a,scenario_a_err,xi1,xi2,xi3,relay_coverage,relay_coverage_err,max_ranks,\
mc_drops,mc_window_km,mc_scenario_a,mc_scenario_a_ci,mc_xi1,mc_xi1_ci,mc_xi2,mc_xi2_ci,mc_xi3,mc_xi3_ci,\
mc_pipeline,mc_pipeline_ci,mc_pipeline_rejection,mc_pipeline_rejection_ci,status";

fn cell(out: &mut String, v: Option<f64>) {
    out.push(',');
    if let Some(v) = v {
        if v.is_finite() {
            let _ = write!(out, "{v}");
        }
    }
}

/// Renders the CSV: header plus one row per point, LF line endings.
pub fn render_csv(pts: &[Point], analytic: Option<&[AnalyticRow]>, mc: Option<&[McRow]>) -> String {
    let mut s = String::new();
    s.push_str(HEADER);
    s.push('\n');
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(s, "{i}");
        cell(&mut s, Some(p.threshold_db));
        cell(&mut s, Some(p.params.lambda_ru));
        cell(&mut s, Some(p.params.rho));
        cell(&mut s, Some(p.r1));
        let a = analytic.map(|rows| &rows[i]);
        cell(&mut s, a.and_then(|a| a.scenario_a.map(|x| x.0)));
        cell(&mut s, a.and_then(|a| a.scenario_a.map(|x| x.1)));
        for k in 0..3 {
            cell(&mut s, a.and_then(|a| a.xi.map(|x| x[k])));
        }
        cell(&mut s, a.and_then(|a| a.relay.map(|x| x.0)));
        cell(&mut s, a.and_then(|a| a.relay.map(|x| x.1)));
        cell(&mut s, a.map(|a| a.max_ranks as f64));
        let m = mc.map(|rows| &rows[i]);
        cell(&mut s, m.map(|m| m.drops as f64));
        cell(&mut s, m.map(|m| m.window));
        for k in 0..6 {
            cell(&mut s, m.and_then(|m| m.values.map(|v| v[k].0)));
            cell(&mut s, m.and_then(|m| m.values.map(|v| v[k].1)));
        }
        let mut errors: Vec<&str> = Vec::new();
        if let Some(a) = a {
            errors.extend(a.errors.iter().map(String::as_str));
        }
        if let Some(m) = m {
            errors.extend(m.errors.iter().map(String::as_str));
        }
        let status = if errors.is_empty() {
            "ok".to_string()
        } else {
            errors.join("; ").replace([',', '\n', '"'], " ")
        };
        let _ = writeln!(s, ",{status}");
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    MonteCarlo,
    Both,
}

/// Evaluates every point and returns the CSV text and the drop records.
pub fn evaluate(
    cfg: &RunConfig,
    sweep: Option<&Sweep>,
    mode: Mode,
) -> (String, Vec<anyhow::Result<Vec<DropRecord>>>) {
    let pts = points(cfg, sweep);
    let analytic: Option<Vec<AnalyticRow>> = (mode != Mode::MonteCarlo)
        .then(|| pts.par_iter().map(|p| analytic_row(p, cfg)).collect());
    let (mc, recs) = if mode != Mode::Analytic && cfg.drops > 0 {
        let (rows, recs) = mc_rows(&pts, cfg, sweep);
        (Some(rows), recs)
    } else {
        (None, Vec::new())
    };
    (render_csv(&pts, analytic.as_deref(), mc.as_deref()), recs)
}

pub fn write_logs<W: Write>(recs: &[anyhow::Result<Vec<DropRecord>>], mut w: W) -> anyhow::Result<()> {
    for (k, r) in recs.iter().enumerate() {
        match r {
            Ok(r) => {
                writeln!(w, "# record set {k}")?;
                write_event_log(r, &mut w)?;
            }
            Err(e) => bail!("no drop records for set {k}: {e:#}"),
        }
    }
    Ok(())
}
