//! Drives configured runs of the flow solver and writes their artifacts.

pub mod plots;

use std::fs;
use std::path::{Path, PathBuf};

use hmcf_core::config::{RunConfig, Source};
use hmcf_core::diagnostics::{assert_bounds, series_until, sphere_oracle, SphereOracle};
use hmcf_core::io::{read_profile, write_profile, write_series, Summary};
use hmcf_core::{
    evolve, validate_initial, ChartSpec, EvolveOptions, EvolveResult, FlowParams, HmcfError, ProfileGrid, Result,
    Termination, ValidationReport,
};
use rayon::prelude::*;

/// Column delimiter of series files.
pub const DELIMITER: char = ',';

/// Spread tolerance of the epsilon-uniformity report.
pub const UNIFORMITY_TOLERANCE: f64 = 0.5;

/// One finished sweep point.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub epsilon: f64,
    pub n: usize,
    pub label: String,
    pub series_path: PathBuf,
    pub result: std::result::Result<EvolveResult, HmcfError>,
}

impl PointOutcome {
    pub fn termination(&self) -> Option<Termination> {
        self.result.as_ref().ok().map(|r| r.termination)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub points: Vec<PointOutcome>,
    pub summary: Summary,
    pub summary_path: PathBuf,
}

impl RunOutcome {
    /// True when every sweep point ran to extinction.
    pub fn all_extinct(&self) -> bool {
        self.points.iter().all(|p| p.termination() == Some(Termination::Extinct))
    }

    /// Why the run is unsuccessful, one entry per failed point.
    pub fn failures(&self) -> Vec<String> {
        self.points
            .iter()
            .filter_map(|p| match &p.result {
                Ok(r) if r.termination == Termination::Extinct => None,
                Ok(r) => Some(format!("{}: {} at t={}", p.label, r.termination, r.final_time)),
                Err(e) => Some(format!("{}: {e}", p.label)),
            })
            .collect()
    }
}

/// File-name tag of a sweep point.
pub fn label(epsilon: f64, n: usize) -> String {
    format!("eps{epsilon}_n{n}")
}

fn initial_profile(cfg: &RunConfig, n: usize, base: &Path) -> Result<ProfileGrid> {
    match &cfg.source {
        Source::Preset(_) => cfg.preset(n)?.expect("preset source").build(n),
        Source::File(path) => {
            let path = if path.is_relative() { base.join(path) } else { path.clone() };
            read_profile(&fs::read_to_string(&path)?)
        }
    }
}

fn check_snapshots(cfg: &RunConfig, report: &ValidationReport) -> Result<()> {
    match cfg.snapshot_times.iter().find(|&&t| t >= report.t_predicted) {
        Some(t) => Err(HmcfError::InvalidParameter(format!(
            "snapshot time {t} not before the predicted extinction time {}",
            report.t_predicted
        ))),
        None => Ok(()),
    }
}

fn evolve_point(cfg: &RunConfig, epsilon: f64, n: usize, base: &Path) -> Result<EvolveResult> {
    let grid = initial_profile(cfg, n, base)?;
    let spec = ChartSpec::for_nodes(n);
    let report = validate_initial(&grid, &spec);
    if !report.passed() {
        return Err(report.ensure().expect_err("failed validation"));
    }
    check_snapshots(cfg, &report)?;
    let params = FlowParams { epsilon, ..cfg.params };
    let mut opts = EvolveOptions::for_nodes(n);
    opts.record_every = cfg.record_every;
    opts.snapshot_times = cfg.snapshot_times.clone();
    opts.stop_time = cfg.stop_time;
    if let Some(m) = cfg.max_steps {
        opts.max_steps = m;
    }
    evolve(&grid, &params, &opts)
}

fn write_point(dir: &Path, point: &PointOutcome, plots: bool) -> Result<()> {
    let Ok(r) = &point.result else { return Ok(()) };
    fs::write(&point.series_path, write_series(&r.series, DELIMITER))?;
    if !r.snapshots.is_empty() {
        let snap_dir = dir.join(format!("snapshots_{}", point.label));
        fs::create_dir_all(&snap_dir)?;
        for (k, s) in r.snapshots.iter().enumerate() {
            fs::write(snap_dir.join(format!("{k:03}_t{}.txt", s.t)), write_profile(s))?;
        }
    }
    fs::write(dir.join(format!("final_{}.txt", point.label)), write_profile(&r.final_surface.to_profile()))?;
    if plots {
        plots::write_all(dir, &point.label, point.epsilon, r)?;
    }
    Ok(())
}

fn summarize(cfg: &RunConfig, points: &[PointOutcome]) -> Summary {
    let mut s = Summary::new();
    let source = match &cfg.source {
        Source::Preset(name) => format!("preset:{name}"),
        Source::File(p) => format!("file:{}", p.display()),
    };
    s.push("source", source).push("points", points.len());
    let extinct = points.iter().all(|p| p.termination() == Some(Termination::Extinct));
    s.push("status", if extinct { "ok" } else { "failed" });
    for p in points {
        let key = |k: &str| format!("{}.{k}", p.label);
        s.push(key("epsilon"), p.epsilon).push(key("n"), p.n);
        match &p.result {
            Ok(r) => {
                s.push(key("termination"), r.termination)
                    .push(key("final_time"), r.final_time)
                    .push(key("t_predicted"), r.t_predicted)
                    .push(key("t_convex"), r.t_convex.map_or("none".to_string(), |t| t.to_string()))
                    .push(key("initial_area"), r.initial_area)
                    .push(key("steps"), r.monitors.steps)
                    .push(key("recharts"), r.monitors.recharts)
                    .push(key("records"), r.series.len());
                if let Some(f) = &r.failure {
                    s.push(key("failure"), f);
                }
                if cfg.source == Source::Preset("sphere".into()) {
                    if let Ok(SphereOracle { extinction, .. }) = sphere_oracle(cfg.r0, p.epsilon, 0.0) {
                        s.push(key("oracle_extinction"), extinction)
                            .push(key("extinction_rel_error"), (r.final_time - extinction) / extinction);
                    }
                }
            }
            Err(e) => {
                s.push(key("error"), e);
            }
        }
    }
    let mut by_eps: Vec<&PointOutcome> = points.iter().filter(|p| p.result.is_ok()).collect();
    by_eps.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let distinct_eps = by_eps.windows(2).any(|w| w[0].epsilon != w[1].epsilon);
    if distinct_eps {
        // uniformity over epsilon at the finest grid of the sweep
        let n_max = by_eps.iter().map(|p| p.n).max().unwrap_or(0);
        let runs: Vec<(f64, &[hmcf_core::DiagRecord])> = by_eps
            .iter()
            .filter(|p| p.n == n_max)
            .map(|p| {
                let r = p.result.as_ref().unwrap();
                (p.epsilon, series_until(&r.series, r.final_time * (1.0 - 1e-2)))
            })
            .collect();
        let report = assert_bounds(&runs, UNIFORMITY_TOLERANCE);
        s.push("uniformity.n", n_max).push("uniformity.tolerance", report.tolerance);
        for e in &report.entries {
            let values: Vec<String> = e.extrema.iter().map(|(eps, v)| format!("{eps}:{v}")).collect();
            s.push(format!("uniformity.{}.extrema", e.name), values.join(" "))
                .push(format!("uniformity.{}.variation", e.name), e.variation)
                .push(format!("uniformity.{}.passed", e.name), e.passed);
        }
        s.push("uniformity.passed", report.passed());
    }
    s
}

/// Runs every sweep point of `cfg` and writes series, snapshots, final
/// profiles, the shared summary and, if enabled, plots into the output
/// directory. Relative paths resolve against `base`.
pub fn run(cfg: &RunConfig, base: &Path) -> Result<RunOutcome> {
    let dir = if cfg.output_dir.is_relative() { base.join(&cfg.output_dir) } else { cfg.output_dir.clone() };
    fs::create_dir_all(&dir)?;
    let probe = dir.join(".write_probe");
    fs::write(&probe, b"")?;
    fs::remove_file(&probe)?;

    let points: Vec<PointOutcome> = cfg
        .sweep()
        .into_par_iter()
        .map(|(epsilon, n)| {
            let label = label(epsilon, n);
            let series_path = dir.join(format!("series_{label}.csv"));
            let result = evolve_point(cfg, epsilon, n, base);
            PointOutcome { epsilon, n, label, series_path, result }
        })
        .collect();
    points.par_iter().map(|p| write_point(&dir, p, cfg.emit_plots)).collect::<Result<Vec<()>>>()?;

    let summary = summarize(cfg, &points);
    let summary_path = dir.join("summary.txt");
    fs::write(&summary_path, summary.to_text())?;
    Ok(RunOutcome { points, summary, summary_path })
}

/// Checks a profile file against the hypotheses of the flow.
pub fn validate_file(path: &Path, n: usize) -> Result<ValidationReport> {
    let grid = read_profile(&fs::read_to_string(path)?)?;
    Ok(validate_initial(&grid, &ChartSpec::for_nodes(n)))
}

/// Human-readable validation report.
pub fn describe_validation(report: &ValidationReport) -> Summary {
    let mut s = Summary::new();
    s.push("passed", report.passed());
    for f in &report.failures {
        s.push(format!("failure.{}", f.name.replace(' ', "_")), &f.detail);
    }
    if report.passed() {
        s.push("min_H", report.min_h)
            .push("min_support", report.min_support)
            .push("area", report.area)
            .push("t_predicted", report.t_predicted);
    }
    s
}

/// Closed-form sphere values at the initial time and the extinction time.
pub fn describe_sphere_oracle(r0: f64, epsilon: f64) -> Result<Summary> {
    let o = sphere_oracle(r0, epsilon, 0.0)?;
    let mut s = Summary::new();
    s.push("r0", r0)
        .push("epsilon", epsilon)
        .push("extinction_time", o.extinction)
        .push("area", o.area)
        .push("speed", o.kappa)
        .push("area_rate", -4.0 * std::f64::consts::PI * (1.0 + 4.0 * epsilon));
    if let Some(q) = o.q {
        s.push("q", q);
    }
    Ok(s)
}
