//! Monitored quantities of a run and the checks applied to their series.

use std::f64::consts::PI;

use crate::error::{HmcfError, Result};
use crate::geometry::profile::ProfileGrid;
use crate::geometry::surface::{NodeSample, Surface};
use crate::speed::FlowParams;

/// Candidate values for the pinching constant `C1`.
pub const PINCH_GRID: [f64; 8] = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];

/// Every monitored quantity at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagRecord {
    pub t: f64,
    pub area: f64,
    /// `dA/dt + 4 pi + eps int H^2` by backward difference; NaN on the
    /// first record.
    pub area_ode_residual: f64,
    /// `int G / 4 pi - 1`.
    pub gb_residual: f64,
    /// `min (<F - c, nu> + 2 t kappa_eps)`.
    pub q: f64,
    /// `min (<F - c, nu> + 2 (t + eta) kappa_eps)`.
    pub q_eta: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub lambda2_min: f64,
    /// `min kappa_eps`.
    pub speed_min: f64,
    pub pinch_c1: f64,
    pub pinch_c2: f64,
    /// `max f^2 f_x^2`.
    pub ffx_max: f64,
    pub h2_integral: f64,
    /// `max lambda1 / min lambda2` once convex, `+inf` before.
    pub roundness: f64,
    /// `max |A|`.
    pub amax: f64,
    /// Smallest radius among non-convex nodes (`+inf` when convex).
    pub nonconvex_height_min: f64,
    /// Largest `lambda1` among nodes with `lambda2 <= 0` (`-inf` when none).
    pub bigger_eigen_max: f64,
    /// Largest radius of the profile.
    pub max_f: f64,
}

/// The DSV columns of a [`DiagRecord`], in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    T,
    Area,
    AreaOdeResidual,
    GbResidual,
    Q,
    QEta,
    HMin,
    HMax,
    Lambda2Min,
    SpeedMin,
    PinchC1,
    PinchC2,
    FfxMax,
    H2Integral,
    Roundness,
    Amax,
}

impl Field {
    pub const ALL: [Field; 16] = [
        Field::T,
        Field::Area,
        Field::AreaOdeResidual,
        Field::GbResidual,
        Field::Q,
        Field::QEta,
        Field::HMin,
        Field::HMax,
        Field::Lambda2Min,
        Field::SpeedMin,
        Field::PinchC1,
        Field::PinchC2,
        Field::FfxMax,
        Field::H2Integral,
        Field::Roundness,
        Field::Amax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::T => "t",
            Field::Area => "area",
            Field::AreaOdeResidual => "area_ode_residual",
            Field::GbResidual => "gb_residual",
            Field::Q => "q",
            Field::QEta => "q_eta",
            Field::HMin => "H_min",
            Field::HMax => "H_max",
            Field::Lambda2Min => "lambda2_min",
            Field::SpeedMin => "speed_min",
            Field::PinchC1 => "pinch_C1",
            Field::PinchC2 => "pinch_C2",
            Field::FfxMax => "ffx_max",
            Field::H2Integral => "h2_integral",
            Field::Roundness => "roundness",
            Field::Amax => "amax",
        }
    }

    pub fn from_name(name: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl DiagRecord {
    pub fn get(&self, field: Field) -> f64 {
        match field {
            Field::T => self.t,
            Field::Area => self.area,
            Field::AreaOdeResidual => self.area_ode_residual,
            Field::GbResidual => self.gb_residual,
            Field::Q => self.q,
            Field::QEta => self.q_eta,
            Field::HMin => self.h_min,
            Field::HMax => self.h_max,
            Field::Lambda2Min => self.lambda2_min,
            Field::SpeedMin => self.speed_min,
            Field::PinchC1 => self.pinch_c1,
            Field::PinchC2 => self.pinch_c2,
            Field::FfxMax => self.ffx_max,
            Field::H2Integral => self.h2_integral,
            Field::Roundness => self.roundness,
            Field::Amax => self.amax,
        }
    }

    pub fn set(&mut self, field: Field, value: f64) {
        let slot = match field {
            Field::T => &mut self.t,
            Field::Area => &mut self.area,
            Field::AreaOdeResidual => &mut self.area_ode_residual,
            Field::GbResidual => &mut self.gb_residual,
            Field::Q => &mut self.q,
            Field::QEta => &mut self.q_eta,
            Field::HMin => &mut self.h_min,
            Field::HMax => &mut self.h_max,
            Field::Lambda2Min => &mut self.lambda2_min,
            Field::SpeedMin => &mut self.speed_min,
            Field::PinchC1 => &mut self.pinch_c1,
            Field::PinchC2 => &mut self.pinch_c2,
            Field::FfxMax => &mut self.ffx_max,
            Field::H2Integral => &mut self.h2_integral,
            Field::Roundness => &mut self.roundness,
            Field::Amax => &mut self.amax,
        };
        *slot = value;
    }
}

/// Fitted pinching constants `(C1, C2)` with `lambda2 >= -C1` and
/// `lambda1 <= C1 lambda2 + C2` at every sample.
pub fn fit_pinching(samples: &[NodeSample]) -> (f64, f64) {
    let owned = || samples.iter().filter(|s| s.owned);
    let lmin = owned().map(NodeSample::lambda_min).fold(f64::INFINITY, f64::min);
    let need = (-lmin).max(1.0);
    let c1 = PINCH_GRID.iter().copied().find(|&c| c >= need).unwrap_or(need);
    let c2 = owned()
        .map(|s| s.lambda_max() - c1 * s.lambda_min())
        .fold(0.0, f64::max);
    (c1, c2)
}

/// Assembles all monitors for the current state.
pub fn record(surface: &Surface, params: &FlowParams, prev: Option<&DiagRecord>) -> Result<DiagRecord> {
    let samples = surface.samples()?;
    Ok(record_from_samples(surface.t(), surface.max_f(), &samples, params, prev))
}

pub(crate) fn record_from_samples(
    t: f64,
    max_f: f64,
    samples: &[NodeSample],
    params: &FlowParams,
    prev: Option<&DiagRecord>,
) -> DiagRecord {
    let eps = params.epsilon;
    let mut area = 0.0;
    let mut total_g = 0.0;
    let mut h2 = 0.0;
    let mut r = DiagRecord {
        t,
        area: 0.0,
        area_ode_residual: f64::NAN,
        gb_residual: 0.0,
        q: f64::INFINITY,
        q_eta: f64::INFINITY,
        h_min: f64::INFINITY,
        h_max: f64::NEG_INFINITY,
        lambda2_min: f64::INFINITY,
        speed_min: f64::INFINITY,
        pinch_c1: 0.0,
        pinch_c2: 0.0,
        ffx_max: 0.0,
        h2_integral: 0.0,
        roundness: f64::INFINITY,
        amax: 0.0,
        nonconvex_height_min: f64::INFINITY,
        bigger_eigen_max: f64::NEG_INFINITY,
        max_f,
    };
    let mut lambda1_max = f64::NEG_INFINITY;
    for s in samples {
        let h = s.h();
        let speed = s.kappa_eps(eps);
        area += s.dmu;
        total_g += s.g() * s.dmu;
        h2 += h * h * s.dmu;
        if !s.owned {
            continue;
        }
        r.q = r.q.min(s.support + 2.0 * t * speed);
        r.q_eta = r.q_eta.min(s.support + 2.0 * (t + params.eta) * speed);
        r.h_min = r.h_min.min(h);
        r.h_max = r.h_max.max(h);
        r.lambda2_min = r.lambda2_min.min(s.lambda_min());
        r.speed_min = r.speed_min.min(speed);
        r.ffx_max = r.ffx_max.max(s.ffx);
        r.amax = r.amax.max(s.norm_a());
        lambda1_max = lambda1_max.max(s.lambda_max());
        if s.lambda_min() < 0.0 {
            r.nonconvex_height_min = r.nonconvex_height_min.min(s.y);
        }
        if s.lambda_min() <= 0.0 {
            r.bigger_eigen_max = r.bigger_eigen_max.max(s.lambda_max());
        }
    }
    r.area = area;
    r.gb_residual = total_g / (4.0 * PI) - 1.0;
    r.h2_integral = h2;
    if r.lambda2_min > 0.0 {
        r.roundness = lambda1_max / r.lambda2_min;
    }
    (r.pinch_c1, r.pinch_c2) = fit_pinching(samples);
    if let Some(p) = prev {
        if t > p.t {
            r.area_ode_residual = (area - p.area) / (t - p.t) + 4.0 * PI + eps * h2;
        }
    }
    r
}

/// Expected direction of a monitored field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub field: Field,
    pub passed: bool,
    /// Largest step against the expected direction (`<= 0` when none).
    pub worst_violation: f64,
    /// Time of the record ending the worst step.
    pub worst_time: f64,
    pub worst_index: usize,
    pub slack: f64,
}

/// Checks every consecutive pair of records against `direction` with an
/// absolute `slack`.
pub fn assert_monotone(series: &[DiagRecord], field: Field, direction: Direction, slack: f64) -> MonotoneReport {
    let mut report = MonotoneReport {
        field,
        passed: true,
        worst_violation: f64::NEG_INFINITY,
        worst_time: f64::NAN,
        worst_index: 0,
        slack,
    };
    for (i, w) in series.windows(2).enumerate() {
        let d = w[1].get(field) - w[0].get(field);
        let against = match direction {
            Direction::NonDecreasing => -d,
            Direction::NonIncreasing => d,
        };
        // NaN steps count as violations
        let against = if against.is_nan() { f64::INFINITY } else { against };
        if against > report.worst_violation {
            report.worst_violation = against;
            report.worst_time = w[1].t;
            report.worst_index = i + 1;
        }
    }
    report.passed = series.len() < 2 || report.worst_violation <= slack;
    report
}

/// `rel * |initial value|` of a field.
pub fn relative_slack(series: &[DiagRecord], field: Field, rel: f64) -> f64 {
    series.first().map(|r| rel * r.get(field).abs()).unwrap_or(0.0)
}

/// Records strictly before `t_end`.
pub fn series_until(series: &[DiagRecord], t_end: f64) -> &[DiagRecord] {
    let k = series.partition_point(|r| r.t < t_end);
    &series[..k]
}

/// Record nearest to time `t`.
pub fn record_near(series: &[DiagRecord], t: f64) -> Option<&DiagRecord> {
    series.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
}

/// Trapezoid rule for `int field dt` over the records.
pub fn time_integral(series: &[DiagRecord], field: Field) -> f64 {
    series
        .windows(2)
        .map(|w| 0.5 * (w[0].get(field) + w[1].get(field)) * (w[1].t - w[0].t))
        .sum()
}

/// One bounded quantity over an epsilon sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub name: &'static str,
    /// `(epsilon, extremum over the run)`.
    pub extrema: Vec<(f64, f64)>,
    /// `(max - min) / max |value|` of the extrema.
    pub variation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub entries: Vec<BoundEntry>,
    pub tolerance: f64,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Relative spread `(max - min) / max |v|`.
pub fn variation(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        (hi - lo) / scale
    }
}

/// Extremal bounds per run and their spread across an epsilon sweep. Each
/// series should already be cut before the near-extinction window.
pub fn assert_bounds(runs: &[(f64, &[DiagRecord])], tolerance: f64) -> BoundsReport {
    type Extremum = fn(&[DiagRecord]) -> f64;
    let specs: [(&'static str, Extremum); 6] = [
        ("speed_min", |s| s.iter().map(|r| r.speed_min).fold(f64::INFINITY, f64::min)),
        ("lambda2_min", |s| s.iter().map(|r| r.lambda2_min).fold(f64::INFINITY, f64::min)),
        ("pinch_C1", |s| s.iter().map(|r| r.pinch_c1).fold(f64::NEG_INFINITY, f64::max)),
        ("pinch_C2", |s| s.iter().map(|r| r.pinch_c2).fold(f64::NEG_INFINITY, f64::max)),
        ("h2_integral", |s| s.iter().map(|r| r.h2_integral).fold(f64::NEG_INFINITY, f64::max)),
        ("H_min", |s| s.iter().map(|r| r.h_min).fold(f64::INFINITY, f64::min)),
    ];
    let entries = specs
        .iter()
        .map(|&(name, extremum)| {
            let extrema: Vec<(f64, f64)> = runs.iter().map(|(eps, s)| (*eps, extremum(s))).collect();
            let values: Vec<f64> = extrema.iter().map(|e| e.1).collect();
            let v = variation(&values);
            BoundEntry { name, extrema, variation: v, passed: v < tolerance && values.iter().all(|x| x.is_finite()) }
        })
        .collect();
    BoundsReport { entries, tolerance }
}

/// Lower bound on `H` from the early part of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerHReport {
    /// Half the smallest `H_min` over the first `early_fraction` of the run.
    pub delta: f64,
    pub min_h: f64,
    pub worst_time: f64,
    pub passed: bool,
}

pub fn lower_h_check(series: &[DiagRecord], t_end: f64, early_fraction: f64) -> LowerHReport {
    let early = series
        .iter()
        .filter(|r| r.t <= early_fraction * t_end)
        .map(|r| r.h_min)
        .fold(f64::INFINITY, f64::min);
    let delta = 0.5 * early;
    let worst = series.iter().min_by(|a, b| a.h_min.total_cmp(&b.h_min));
    let (min_h, worst_time) = worst.map(|r| (r.h_min, r.t)).unwrap_or((f64::NAN, f64::NAN));
    LowerHReport { delta, min_h, worst_time, passed: delta > 0.0 && min_h >= delta }
}

/// Bound on `lambda1` at non-convex points relative to the initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct BiggerEigenReport {
    pub initial: f64,
    pub maximum: f64,
    pub passed: bool,
}

pub fn bigger_eigen_check(series: &[DiagRecord], factor: f64) -> BiggerEigenReport {
    let initial = series.first().map(|r| r.bigger_eigen_max).unwrap_or(f64::NEG_INFINITY);
    let maximum = series.iter().map(|r| r.bigger_eigen_max).fold(f64::NEG_INFINITY, f64::max);
    let passed = maximum == f64::NEG_INFINITY || maximum <= factor * initial;
    BiggerEigenReport { initial, maximum, passed }
}

/// Non-convex nodes stay above a height frozen from the initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerHeightReport {
    /// Half the smallest non-convex radius at `t = 0`.
    pub c: f64,
    pub minimum: f64,
    pub passed: bool,
}

pub fn lower_height_check(series: &[DiagRecord]) -> LowerHeightReport {
    let c = series.first().map(|r| 0.5 * r.nonconvex_height_min).unwrap_or(f64::INFINITY);
    let minimum = series.iter().map(|r| r.nonconvex_height_min).fold(f64::INFINITY, f64::min);
    LowerHeightReport { c, minimum, passed: minimum == f64::INFINITY || minimum >= c }
}

/// Closed-form shrinking sphere under `G/H + eps H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereOracle {
    pub r: f64,
    pub area: f64,
    pub kappa: f64,
    /// `min (<F, nu> + 2 t kappa)`, only for `eps = 0`.
    pub q: Option<f64>,
    pub extinction: f64,
}

pub fn sphere_oracle(r0: f64, epsilon: f64, t: f64) -> Result<SphereOracle> {
    if !(r0 > 0.0) || !(epsilon >= 0.0) {
        return Err(HmcfError::InvalidParameter(format!("sphere oracle needs r0 > 0, eps >= 0; got {r0}, {epsilon}")));
    }
    let c = 1.0 + 4.0 * epsilon;
    let extinction = r0 * r0 / c;
    if t >= extinction {
        return Err(HmcfError::PostExtinction { t, extinction });
    }
    let r = (r0 * r0 - c * t).sqrt();
    Ok(SphereOracle {
        r,
        area: 4.0 * PI * r * r,
        kappa: c / (2.0 * r),
        q: (epsilon == 0.0).then(|| r0 * r0 / r),
        extinction,
    })
}

/// Roundness after convexification.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundnessTrend {
    pub t_mid: f64,
    pub at_mid: f64,
    pub t_late: f64,
    pub at_late: f64,
    pub finite_after_convex: bool,
    pub passed: bool,
}

/// Roundness near extinction, at `T (1 - 1e-2)`, must be closer to 1 than
/// halfway between convexification and extinction.
pub fn roundness_trend(series: &[DiagRecord], t_convex: Option<f64>, t_end: f64) -> Result<RoundnessTrend> {
    let t_convex = t_convex.ok_or_else(|| HmcfError::NotApplicable("run ended before convexification".into()))?;
    let after: Vec<&DiagRecord> = series.iter().filter(|r| r.t >= t_convex).collect();
    if after.len() < 2 {
        return Err(HmcfError::NotApplicable("no records after convexification".into()));
    }
    let t_mid = 0.5 * (t_convex + t_end);
    let t_late = t_end * (1.0 - 1e-2);
    let near = |t: f64| after.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs())).unwrap();
    let (mid, late) = (near(t_mid), near(t_late));
    let finite_after_convex = series_until(series, t_late)
        .iter()
        .filter(|r| r.t > t_convex)
        .all(|r| r.roundness.is_finite());
    let passed = finite_after_convex && (late.roundness - 1.0).abs() < (mid.roundness - 1.0).abs();
    Ok(RoundnessTrend {
        t_mid: mid.t,
        at_mid: mid.roundness,
        t_late: late.t,
        at_late: late.roundness,
        finite_after_convex,
        passed,
    })
}

/// Polar samples `(theta, rho)` of a profile about its center, `theta`
/// measured from the positive axis.
fn polar(grid: &ProfileGrid) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = grid
        .x
        .iter()
        .zip(&grid.f)
        .map(|(&x, &f)| {
            let dx = x - grid.center;
            (f.atan2(dx), f.hypot(dx))
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    pts
}

fn polar_eval(pts: &[(f64, f64)], theta: f64) -> f64 {
    let k = pts.partition_point(|p| p.0 < theta);
    if k == 0 {
        return pts[0].1;
    }
    if k == pts.len() {
        return pts[k - 1].1;
    }
    let (a, b) = (pts[k - 1], pts[k]);
    a.1 + (b.1 - a.1) * (theta - a.0) / (b.0 - a.0)
}

/// Sup-norm distance between the radial functions of two star-shaped
/// profiles about their centers, sampled at every node of either profile.
pub fn radial_distance(a: &ProfileGrid, b: &ProfileGrid) -> f64 {
    let (pa, pb) = (polar(a), polar(b));
    pa.iter()
        .chain(&pb)
        .map(|&(theta, _)| (polar_eval(&pa, theta) - polar_eval(&pb, theta)).abs())
        .fold(0.0, f64::max)
}
