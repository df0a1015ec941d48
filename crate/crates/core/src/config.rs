//! Run configuration: line-oriented `key=value` documents.
//!
//! Several pairs may share a line (`epsilon=0.1 n=800`), `#` starts a
//! comment, and list values are comma separated (`epsilons=0.1,0.05`).

use std::path::PathBuf;

use crate::error::{HmcfError, Result};
use crate::presets::{preset_by_name, Preset, SQUASHED_DEFAULT};
use crate::speed::FlowParams;

/// Smallest accepted interior node count.
pub const MIN_NODES: usize = 50;

/// Where the initial profile comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub params: FlowParams,
    pub n: usize,
    pub record_every: usize,
    pub snapshot_times: Vec<f64>,
    pub output_dir: PathBuf,
    /// Epsilon values to sweep; empty means `[params.epsilon]`.
    pub epsilons: Vec<f64>,
    /// Grid sizes to sweep; empty means `[n]`.
    pub grid_sizes: Vec<usize>,
    pub emit_plots: bool,
    pub stop_time: Option<f64>,
    pub max_steps: Option<usize>,
    /// Sphere radius of the `sphere` preset.
    pub r0: f64,
    /// Semi-axis ratio of the `squashed` preset.
    pub squash: f64,
    /// Bump amplitude of the `bumpy` preset; chosen automatically if unset.
    pub beta: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            source: Source::Preset("sphere".into()),
            params: FlowParams::default(),
            n: 400,
            record_every: 200,
            snapshot_times: Vec::new(),
            output_dir: PathBuf::from("out"),
            epsilons: Vec::new(),
            grid_sizes: Vec::new(),
            emit_plots: false,
            stop_time: None,
            max_steps: None,
            r0: 1.0,
            squash: SQUASHED_DEFAULT,
            beta: None,
        }
    }
}

impl RunConfig {
    /// The sweep as `(epsilon, n)` pairs in a fixed order.
    pub fn sweep(&self) -> Vec<(f64, usize)> {
        let eps = if self.epsilons.is_empty() { vec![self.params.epsilon] } else { self.epsilons.clone() };
        let sizes = if self.grid_sizes.is_empty() { vec![self.n] } else { self.grid_sizes.clone() };
        eps.iter().flat_map(|&e| sizes.iter().map(move |&n| (e, n))).collect()
    }

    /// The preset with this configuration's shape parameters, if the source
    /// is a preset.
    pub fn preset(&self, n: usize) -> Result<Option<Preset>> {
        let Source::Preset(name) = &self.source else { return Ok(None) };
        let preset = match name.as_str() {
            "sphere" => Preset::Sphere { r0: self.r0 },
            "squashed" => Preset::Squashed { a: self.squash },
            "bumpy" => match self.beta {
                Some(beta) => Preset::Bumpy { beta },
                None => preset_by_name("bumpy", n)?,
            },
            other => return Err(HmcfError::UnknownPreset(other.into())),
        };
        Ok(Some(preset))
    }
}

fn err(line: usize, message: String) -> HmcfError {
    HmcfError::Parse { line, message }
}

fn parse_f64(key: &str, v: &str, line: usize) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(line, format!("{key}: expected a number, got {v:?}")))
}

fn parse_usize(key: &str, v: &str, line: usize) -> Result<usize> {
    v.parse::<usize>().map_err(|_| err(line, format!("{key}: expected a non-negative integer, got {v:?}")))
}

fn parse_bool(key: &str, v: &str, line: usize) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn parse_list<T>(key: &str, v: &str, line: usize, item: impl Fn(&str, &str, usize) -> Result<T>) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.is_empty()).map(|s| item(key, s, line)).collect()
}

fn check(ok: bool, line: usize, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(err(line, message()))
    }
}

/// Parses a configuration document; omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut source_line = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected key=value, got {token:?}")))?;
            let p = &mut cfg.params;
            match key {
                "preset" | "profile" => {
                    if let Some(prev) = source_line {
                        return Err(err(line, format!("{key}: initial profile already given on line {prev}")));
                    }
                    source_line = Some(line);
                    cfg.source = if key == "preset" {
                        Source::Preset(value.to_string())
                    } else {
                        Source::File(PathBuf::from(value))
                    };
                }
                "epsilon" => {
                    p.epsilon = parse_f64(key, value, line)?;
                    check(p.epsilon >= 0.0, line, || format!("epsilon must be >= 0, got {value}"))?;
                }
                "delta1" => {
                    p.delta1 = parse_f64(key, value, line)?;
                    check(p.delta1 > 0.0 && p.delta1 < 1.0, line, || "delta1 out of (0,1)".into())?;
                }
                "eta" => p.eta = parse_f64(key, value, line)?,
                "dt_safety" => {
                    p.dt_safety = parse_f64(key, value, line)?;
                    check(p.dt_safety > 0.0 && p.dt_safety <= 1.0, line, || "dt_safety out of (0,1]".into())?;
                }
                "area_floor" => {
                    p.area_floor_fraction = parse_f64(key, value, line)?;
                    check(p.area_floor_fraction > 0.0 && p.area_floor_fraction < 1.0, line, || {
                        "area_floor (fraction of the initial area) out of (0,1)".into()
                    })?;
                }
                "grid_tol" | "quadrature_tol" | "monotone_slack" => {
                    let v = parse_f64(key, value, line)?;
                    check(v >= 0.0, line, || format!("{key} must be >= 0"))?;
                    match key {
                        "grid_tol" => p.grid_tol = v,
                        "quadrature_tol" => p.quadrature_tol = v,
                        _ => p.monotone_slack = v,
                    }
                }
                "n" => {
                    cfg.n = parse_usize(key, value, line)?;
                    check(cfg.n >= MIN_NODES, line, || format!("n must be >= {MIN_NODES}, got {value}"))?;
                }
                "record_every" => {
                    cfg.record_every = parse_usize(key, value, line)?;
                    check(cfg.record_every > 0, line, || "record_every must be positive".into())?;
                }
                "snapshot_times" => {
                    cfg.snapshot_times = parse_list(key, value, line, parse_f64)?;
                    check(cfg.snapshot_times.iter().all(|&t| t >= 0.0), line, || {
                        "snapshot_times must be >= 0".into()
                    })?;
                }
                "output" | "output_dir" => cfg.output_dir = PathBuf::from(value),
                "epsilons" => {
                    cfg.epsilons = parse_list(key, value, line, parse_f64)?;
                    check(cfg.epsilons.iter().all(|&e| e >= 0.0), line, || "epsilons must be >= 0".into())?;
                }
                "grid_sizes" => {
                    cfg.grid_sizes = parse_list(key, value, line, parse_usize)?;
                    check(cfg.grid_sizes.iter().all(|&n| n >= MIN_NODES), line, || {
                        format!("grid_sizes must be >= {MIN_NODES}")
                    })?;
                }
                "emit_plots" => cfg.emit_plots = parse_bool(key, value, line)?,
                "stop_time" => {
                    let t = parse_f64(key, value, line)?;
                    check(t > 0.0, line, || "stop_time must be positive".into())?;
                    cfg.stop_time = Some(t);
                }
                "max_steps" => cfg.max_steps = Some(parse_usize(key, value, line)?),
                "r0" => {
                    cfg.r0 = parse_f64(key, value, line)?;
                    check(cfg.r0 > 0.0, line, || "r0 must be positive".into())?;
                }
                "squash" => {
                    cfg.squash = parse_f64(key, value, line)?;
                    check(cfg.squash > 0.0, line, || "squash must be positive".into())?;
                }
                "beta" => {
                    let b = parse_f64(key, value, line)?;
                    check((0.0..1.0).contains(&b), line, || "beta out of [0,1)".into())?;
                    cfg.beta = Some(b);
                }
                other => return Err(err(line, format!("unknown key {other:?}"))),
            }
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = parse_config("preset=sphere\n").unwrap();
        assert_eq!(cfg.source, Source::Preset("sphere".into()));
        assert_eq!(cfg.params, FlowParams::default());
        assert_eq!(cfg.params.epsilon, 0.0);
        assert_eq!(cfg.params.delta1, 0.2);
        assert_eq!(cfg.params.eta, 0.1);
        assert_eq!(cfg.params.dt_safety, 0.4);
        assert_eq!(cfg.params.area_floor_fraction, 1e-4);
        assert_eq!(cfg.n, 400);
        assert_eq!(cfg.r0, 1.0);
        assert_eq!(cfg.sweep(), vec![(0.0, 400)]);
    }

    #[test]
    fn pairs_share_lines() {
        let cfg = parse_config("# sweep\npreset=bumpy\nepsilon=0.1 n=800  # finer\nepsilons=0.1,0.05\n").unwrap();
        assert_eq!(cfg.params.epsilon, 0.1);
        assert_eq!(cfg.n, 800);
        assert_eq!(cfg.sweep(), vec![(0.1, 800), (0.05, 800)]);
    }

    #[test]
    fn invariant_violation_names_key_and_line() {
        let e = parse_config("preset=sphere\ndelta1=1.5\n").unwrap_err();
        assert_eq!(e, HmcfError::Parse { line: 2, message: "delta1 out of (0,1)".into() });
    }

    #[test]
    fn type_mismatch_and_unknown_key() {
        let e = parse_config("n=abc").unwrap_err().to_string();
        assert!(e.contains("line 1") && e.contains("n:"), "{e}");
        let e = parse_config("\n\nfoo=1").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("foo"), "{e}");
        assert!(parse_config("n=20").is_err());
        assert!(parse_config("epsilon").is_err());
        assert!(parse_config("preset=sphere profile=a.txt").is_err());
    }

    #[test]
    fn file_source_and_lists() {
        let cfg = parse_config("profile=/tmp/p.txt snapshot_times=0.1,0.2 emit_plots=true grid_sizes=100,200").unwrap();
        assert_eq!(cfg.source, Source::File("/tmp/p.txt".into()));
        assert_eq!(cfg.snapshot_times, vec![0.1, 0.2]);
        assert!(cfg.emit_plots);
        assert_eq!(cfg.sweep(), vec![(0.0, 100), (0.0, 200)]);
        assert!(cfg.preset(100).unwrap().is_none());
    }
}
