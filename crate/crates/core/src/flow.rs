//! Explicit solver for the flow on the charted surface.
//!
//! The interior chart `r = f(x)` lives on uniform nodes whose two boundary
//! nodes sit at a fixed radius on the tip charts; its nodes follow the tips
//! (arbitrary Lagrangian-Eulerian update). Each tip chart `x = g(y)` takes its
//! outer value from the interior chart, and the interior chart takes its
//! boundary abscissas from the tip charts.

use std::f64::consts::PI;

use crate::diagnostics::{record, DiagRecord};
use crate::error::{HmcfError, Result};
use crate::geometry::chart::{Side, TipChart};
use crate::geometry::profile::{derivatives, uniform_derivatives, ProfileGrid};
use crate::geometry::surface::{surface_area, validate_initial, ChartSpec, Surface};
use crate::interp::{lagrange, STENCIL};
use crate::speed::FlowParams;

/// Run controls that are not part of the flow itself.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub chart: ChartSpec,
    /// A diagnostic record is taken every this many steps.
    pub record_every: usize,
    /// Times at which the merged profile is stored; steps are clipped to hit
    /// them exactly.
    pub snapshot_times: Vec<f64>,
    pub max_steps: usize,
    /// Stop (with [`Termination::UserStop`]) on reaching this time.
    pub stop_time: Option<f64>,
    /// Upper bound on the step; with a small value this fixes the step.
    pub dt_max: Option<f64>,
    /// The tip charts are rebuilt once `y_match / max f` exceeds this.
    pub rechart_ratio: f64,
    /// Step collapse threshold relative to the predicted extinction time.
    pub dt_min_fraction: f64,
    /// Area is checked against the extinction floor this often.
    pub area_check_every: usize,
}

impl EvolveOptions {
    pub fn for_nodes(n: usize) -> Self {
        EvolveOptions {
            chart: ChartSpec::for_nodes(n),
            record_every: 200,
            snapshot_times: Vec::new(),
            max_steps: 200_000_000,
            stop_time: None,
            dt_max: None,
            rechart_ratio: ChartSpec::DEFAULT_Y_MATCH_FRACTION / 0.9,
            dt_min_fraction: 1e-12,
            area_check_every: 10,
        }
    }
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions::for_nodes(400)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Extinct,
    MeanConvexityLost,
    MaxSteps,
    UserStop,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Extinct => "extinct",
            Termination::MeanConvexityLost => "mean_convexity_lost",
            Termination::MaxSteps => "max_steps",
            Termination::UserStop => "user_stop",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-step monitors that are not part of [`DiagRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepMonitors {
    pub steps: usize,
    pub recharts: usize,
    /// Largest relative one-step increase of `max f` (negative if it always
    /// decreased); steps that rebuild the charts are excluded.
    pub max_f_increase: f64,
    /// Steps where `max f` grew by more than `1e-8 max f`.
    pub max_f_violations: usize,
    pub dt_min: f64,
    pub dt_max: f64,
}

#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub final_time: f64,
    pub termination: Termination,
    /// `area / 4 pi` of the initial surface.
    pub t_predicted: f64,
    /// First time every principal curvature is non-negative.
    pub t_convex: Option<f64>,
    pub series: Vec<DiagRecord>,
    pub snapshots: Vec<ProfileGrid>,
    pub initial_area: f64,
    pub area_floor: f64,
    pub final_surface: Surface,
    pub monitors: StepMonitors,
    /// Offending node when the run stopped on lost mean convexity.
    pub failure: Option<String>,
}

/// `(f_t, D)` of the interior equation at one node, `D` being the diffusion
/// coefficient of its linearization.
#[inline]
fn interior_rate(x: f64, f: f64, fx: f64, fxx: f64, eps: f64) -> Result<(f64, f64)> {
    let q = 1.0 + fx * fx;
    let ht = -f * fxx + q;
    if !(ht > 0.0) {
        return Err(HmcfError::MeanConvexityLost { x, value: ht });
    }
    let ft = fxx / ht - eps * ht / (f * q);
    let d = q / (ht * ht) + eps / q;
    Ok((ft, d))
}

/// `f_t` at every non-tip node of a uniformly spaced profile.
pub fn rhs_interior(grid: &ProfileGrid, params: &FlowParams) -> Result<Vec<f64>> {
    let d = derivatives(grid)?;
    (0..d.fx.len())
        .map(|k| {
            let i = d.offset + k;
            interior_rate(grid.x[i], grid.f[i], d.fx[k], d.fxx[k], params.epsilon).map(|r| r.0)
        })
        .collect()
}

/// Per-node `(g_t, D)` of a tip chart.
fn tip_rates(chart: &TipChart, eps: f64) -> Result<(Vec<f64>, f64)> {
    let s = chart.side.sign();
    let mut gt = Vec::with_capacity(chart.g.len());
    let mut dmax: f64 = 0.0;
    for p in chart.points() {
        let h = p.lambda_par + p.lambda_mer;
        if !(h > 0.0) {
            return Err(HmcfError::MeanConvexityLost { x: p.x, value: h });
        }
        let q = 1.0 + p.gy * p.gy;
        let speed = p.lambda_par * p.lambda_mer / h + eps * h;
        gt.push(s * speed * q.sqrt());
        let lp = p.lambda_par / h;
        dmax = dmax.max((lp * lp + eps) / q);
    }
    Ok((gt, dmax))
}

/// `g_t` at every node of a tip chart.
pub fn rhs_tip(chart: &TipChart, params: &FlowParams) -> Result<Vec<f64>> {
    tip_rates(chart, params.epsilon).map(|r| r.0)
}

/// Rates and stability limits of one state.
#[derive(Debug, Clone)]
struct Rates {
    fx: Vec<f64>,
    ft: Vec<f64>,
    gl: Vec<f64>,
    gr: Vec<f64>,
    dt_stable: f64,
    convex: bool,
}

fn rates(s: &Surface, params: &FlowParams) -> Result<Rates> {
    let eps = params.epsilon;
    let xs = s.interior_x();
    let fs = s.interior_f();
    let n = fs.len();
    let h = s.h();
    let (fx, fxx) = uniform_derivatives(fs, h);
    let mut ft = vec![0.0; n];
    let mut dmax: f64 = 0.0;
    let mut convex = true;
    for i in 1..n - 1 {
        let (r, d) = interior_rate(xs[i], fs[i], fx[i], fxx[i], eps)?;
        ft[i] = r;
        dmax = dmax.max(d);
        convex &= fxx[i] <= 0.0;
    }
    let (gl, dl) = tip_rates(&s.left, eps)?;
    let (gr, dr) = tip_rates(&s.right, eps)?;
    for chart in [&s.left, &s.right] {
        let sign = chart.side.sign();
        let (_, gyy) = chart.derivatives();
        convex &= gyy[..chart.m()].iter().all(|&v| sign * v >= 0.0);
    }
    let hy = s.left.hy();
    let dt_interior = params.dt_safety * h * h / (2.0 * dmax);
    let dt_tip = params.dt_safety * hy * hy / (4.0 * dl.max(dr));
    Ok(Rates { fx, ft, gl, gr, dt_stable: dt_interior.min(dt_tip), convex })
}

/// Largest stable explicit step for the current state.
pub fn stable_dt(surface: &Surface, params: &FlowParams) -> Result<f64> {
    rates(surface, params).map(|r| r.dt_stable)
}

/// Abscissa where the interior chart reaches radius `y` on the given flank,
/// by inverse interpolation over the monotone nodes around the crossing.
fn crossing(xs: &[f64], fs: &[f64], y: f64, side: Side) -> Result<f64> {
    let n = fs.len();
    let fail = |reason: &str| HmcfError::TipChartFailure { side: side.name(), reason: reason.into() };
    let half = STENCIL / 2;
    let start = match side {
        Side::Left => {
            let k = (0..n).find(|&i| fs[i] >= y).ok_or_else(|| fail("interior chart below chart radius"))?;
            if k == 0 {
                return Err(fail("chart radius below interior boundary"));
            }
            k.saturating_sub(half)
        }
        Side::Right => {
            let k = (0..n).rev().find(|&i| fs[i] >= y).ok_or_else(|| fail("interior chart below chart radius"))?;
            if k == n - 1 {
                return Err(fail("chart radius below interior boundary"));
            }
            (k + 1).saturating_sub(half - 1)
        }
    }
    .min(n - STENCIL);
    let (wx, wf) = (&xs[start..start + STENCIL], &fs[start..start + STENCIL]);
    let monotone = wf.windows(2).all(|w| match side {
        Side::Left => w[1] > w[0],
        Side::Right => w[1] < w[0],
    });
    if !monotone {
        return Err(fail("interior chart not monotone at the chart radius"));
    }
    Ok(lagrange(wf, wx, y))
}

fn advance(s: &Surface, r: &Rates, dt: f64) -> Result<Surface> {
    let m = s.left.m();
    let half = m / 2;
    let y_match = s.y_match();
    let step_chart = |c: &TipChart, gt: &[f64]| -> Vec<f64> {
        c.g.iter().zip(gt).map(|(g, v)| g + dt * v).collect()
    };
    let mut gl = step_chart(&s.left, &r.gl);
    let mut gr = step_chart(&s.right, &r.gr);

    let xs = s.interior_x();
    let fs = s.interior_f();
    let n = xs.len();
    let (xl, xr) = (gl[half], gr[half]);
    if !(xr > xl) {
        return Err(HmcfError::TipChartFailure { side: "both", reason: "tip charts crossed".into() });
    }
    let h = (xr - xl) / (n - 1) as f64;
    let y_low = s.y_low();
    let mut new_x = Vec::with_capacity(n + 2);
    let mut new_f = Vec::with_capacity(n + 2);
    new_x.push(gl[0]);
    new_f.push(0.0);
    for i in 0..n {
        let x = if i == n - 1 { xr } else { xl + h * i as f64 };
        let f = if i == 0 || i == n - 1 {
            y_low
        } else {
            fs[i] + dt * r.ft[i] + r.fx[i] * (x - xs[i])
        };
        if !(f > 0.0) {
            return Err(HmcfError::DegenerateProfile { x, value: f });
        }
        new_x.push(x);
        new_f.push(f);
    }
    new_x.push(gr[0]);
    new_f.push(0.0);
    let (ix, iff) = (&new_x[1..=n], &new_f[1..=n]);
    gl[m] = crossing(ix, iff, y_match, Side::Left)?;
    gr[m] = crossing(ix, iff, y_match, Side::Right)?;
    let left = TipChart::new(Side::Left, y_match, gl)?;
    let right = TipChart::new(Side::Right, y_match, gr)?;
    let profile = ProfileGrid { x: new_x, f: new_f, t: s.t() + dt, center: s.center() };
    Ok(Surface { profile, left, right })
}

/// One forward Euler step of size `dt` (or the stable step when `None`),
/// checking mean convexity of the result.
pub fn step(surface: &Surface, params: &FlowParams, dt: Option<f64>) -> Result<Surface> {
    let r = rates(surface, params)?;
    let next = advance(surface, &r, dt.unwrap_or(r.dt_stable))?;
    rates(&next, params)?;
    Ok(next)
}

fn needs_rechart(s: &Surface, ratio: f64) -> bool {
    s.y_match() > ratio * s.max_f()
}

/// Runs the flow from validated initial data until extinction, loss of
/// mean convexity, the step budget or the requested stop time.
pub fn evolve(grid: &ProfileGrid, params: &FlowParams, opts: &EvolveOptions) -> Result<EvolveResult> {
    params.validate()?;
    if opts.record_every == 0 || opts.area_check_every == 0 {
        return Err(HmcfError::InvalidParameter("record_every and area_check_every must be positive".into()));
    }
    let mut s = validate_initial(grid, &opts.chart).ensure()?;
    let initial_area = surface_area(&s)?;
    let t_predicted = initial_area / (4.0 * PI);
    let area_floor = params.area_floor_fraction * initial_area;
    let dt_min = opts.dt_min_fraction * t_predicted;

    let mut snapshot_times: Vec<f64> = opts.snapshot_times.clone();
    snapshot_times.sort_by(f64::total_cmp);
    let mut next_snapshot = 0;
    let mut snapshots = Vec::new();
    while next_snapshot < snapshot_times.len() && snapshot_times[next_snapshot] <= s.t() {
        snapshots.push(s.to_profile());
        next_snapshot += 1;
    }

    let mut series = vec![record(&s, params, None)?];
    let mut monitors = StepMonitors {
        steps: 0,
        recharts: 0,
        max_f_increase: f64::NEG_INFINITY,
        max_f_violations: 0,
        dt_min: f64::INFINITY,
        dt_max: 0.0,
    };
    let mut t_convex = None;
    let mut failure = None;
    let mut max_f = s.max_f();

    let termination = loop {
        if monitors.steps >= opts.max_steps {
            break Termination::MaxSteps;
        }
        if opts.stop_time.is_some_and(|ts| s.t() >= ts) {
            break Termination::UserStop;
        }
        let r = match rates(&s, params) {
            Ok(r) => r,
            Err(e @ HmcfError::MeanConvexityLost { .. }) => {
                failure = Some(e.to_string());
                break Termination::MeanConvexityLost;
            }
            Err(e) => return Err(e),
        };
        if r.convex && t_convex.is_none() {
            t_convex = Some(s.t());
        }
        let mut dt = r.dt_stable;
        if let Some(cap) = opts.dt_max {
            dt = dt.min(cap);
        }
        let mut target = None;
        for bound in [snapshot_times.get(next_snapshot).copied(), opts.stop_time].into_iter().flatten() {
            if s.t() + dt >= bound * (1.0 - 1e-14) {
                dt = bound - s.t();
                target = Some(bound);
            }
        }
        if !(dt >= dt_min) {
            return Err(HmcfError::StepCollapse { t: s.t(), dt, dt_min });
        }
        monitors.dt_min = monitors.dt_min.min(dt);
        monitors.dt_max = monitors.dt_max.max(dt);
        let mut next = advance(&s, &r, dt)?;
        if let Some(t) = target {
            next.profile.t = t;
        }
        monitors.steps += 1;

        let new_max = next.max_f();
        let rise = (new_max - max_f) / max_f;
        monitors.max_f_increase = monitors.max_f_increase.max(rise);
        if rise > 1e-8 {
            monitors.max_f_violations += 1;
        }
        max_f = new_max;
        if needs_rechart(&next, opts.rechart_ratio) {
            next = next.rechart(&opts.chart)?;
            monitors.recharts += 1;
            max_f = next.max_f();
        }
        s = next;

        while next_snapshot < snapshot_times.len() && snapshot_times[next_snapshot] <= s.t() {
            snapshots.push(s.to_profile());
            next_snapshot += 1;
        }
        let area = if monitors.steps % opts.record_every == 0 {
            let rec = record(&s, params, series.last())?;
            series.push(rec);
            rec.area
        } else if monitors.steps % opts.area_check_every == 0 {
            surface_area(&s)?
        } else {
            f64::INFINITY
        };
        if area <= area_floor {
            break Termination::Extinct;
        }
    };

    if series.last().map(|r| r.t) != Some(s.t()) {
        if let Ok(rec) = record(&s, params, series.last()) {
            series.push(rec);
        }
    }
    Ok(EvolveResult {
        final_time: s.t(),
        termination,
        t_predicted,
        t_convex,
        series,
        snapshots,
        initial_area,
        area_floor,
        final_surface: s,
        monitors,
        failure,
    })
}
