//! The charted surface: a uniform interior chart in `x` glued to two tip
//! charts in `y`, plus the quadratures and hypothesis checks built on it.

use std::f64::consts::PI;

use crate::error::{HmcfError, Result};
use crate::geometry::chart::{admissible_y_match, build_tip_chart, ChartPoint, Side, TipChart};
use crate::fd::derivatives4;
use crate::geometry::profile::{curvatures_at, support_at, ProfileGrid};
use crate::interp::{interpolate, STENCIL};

/// Resolution and overlap of the chart atlas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartSpec {
    /// Nodes of the interior chart, including its two boundary nodes.
    pub interior_nodes: usize,
    /// Intervals of each tip chart; always even.
    pub tip_intervals: usize,
    /// Tip chart radius as a fraction of `max f`.
    pub y_match_fraction: f64,
    /// Smallest admissible tip chart radius as a fraction of `max f`.
    pub min_y_fraction: f64,
}

impl ChartSpec {
    pub const DEFAULT_Y_MATCH_FRACTION: f64 = 0.6;

    /// Tip charts get roughly the interior node density.
    pub fn for_nodes(n: usize) -> Self {
        let m = ((n as f64 * 0.2).round() as usize).max(16);
        ChartSpec {
            interior_nodes: n,
            tip_intervals: m + m % 2,
            y_match_fraction: Self::DEFAULT_Y_MATCH_FRACTION,
            min_y_fraction: 0.1,
        }
    }
}

impl Default for ChartSpec {
    fn default() -> Self {
        ChartSpec::for_nodes(400)
    }
}

/// Surface state: interior chart (`profile`, closed by its tip nodes) and the
/// two tip charts. The interior chart starts and ends at radius
/// `y_match / 2`, which is a node of both tip charts.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub profile: ProfileGrid,
    pub left: TipChart,
    pub right: TipChart,
}

/// Which chart a sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKind {
    Interior,
    Left,
    Right,
}

/// Geometric data of one chart node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    pub chart: ChartKind,
    pub x: f64,
    /// Distance from the axis (`f`).
    pub y: f64,
    /// Parallel-circle curvature.
    pub lambda_par: f64,
    /// Meridian curvature.
    pub lambda_mer: f64,
    /// `<F - c, nu>`.
    pub support: f64,
    /// `f^2 f_x^2`, the squared axial slope measure.
    pub ffx: f64,
    /// Quadrature weight for surface integrals (partition of unity applied).
    pub dmu: f64,
    /// The node's chart carries at least half of the partition of unity
    /// there; pointwise extrema are taken over owned nodes only.
    pub owned: bool,
}

impl NodeSample {
    pub fn h(&self) -> f64 {
        self.lambda_par + self.lambda_mer
    }

    pub fn g(&self) -> f64 {
        self.lambda_par * self.lambda_mer
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_par.max(self.lambda_mer)
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_par.min(self.lambda_mer)
    }

    /// `G/H + eps H`.
    pub fn kappa_eps(&self, eps: f64) -> f64 {
        let h = self.h();
        self.g() / h + eps * h
    }

    pub fn norm_a(&self) -> f64 {
        self.lambda_par.hypot(self.lambda_mer)
    }
}

/// C-infinity step: 0 for `u <= 0`, 1 for `u >= 1`, flat at both ends.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

impl Surface {
    /// Builds the atlas from samples of a closed (or tip-less) profile.
    pub fn from_profile(grid: &ProfileGrid, spec: &ChartSpec) -> Result<Self> {
        if spec.interior_nodes < 2 * STENCIL || spec.tip_intervals < 8 || spec.tip_intervals % 2 != 0 {
            return Err(HmcfError::InvalidParameter(format!("chart resolution {spec:?}")));
        }
        if grid.len() < 2 * STENCIL {
            return Err(HmcfError::GridTooCoarse { interior: grid.len(), required: 2 * STENCIL });
        }
        for i in grid.interior_range() {
            if grid.f[i] <= 0.0 {
                return Err(HmcfError::DegenerateProfile { x: grid.x[i], value: grid.f[i] });
            }
        }
        let y_match = admissible_y_match(
            grid,
            spec.y_match_fraction * grid.max_f(),
            spec.min_y_fraction,
        )?;
        let m = spec.tip_intervals;
        let left = build_tip_chart(grid, Side::Left, y_match, m)?;
        let right = build_tip_chart(grid, Side::Right, y_match, m)?;
        let half = m / 2;
        let y_lo = left.y(half);
        let (xl, xr) = (left.g[half], right.g[half]);
        if !(xr > xl) {
            return Err(HmcfError::TipChartFailure { side: "both", reason: "tip charts overlap".into() });
        }
        let n = spec.interior_nodes;
        let h = (xr - xl) / (n - 1) as f64;
        let (left_edge, right_edge) = (left.g[m], right.g[m]);
        let mut xs = Vec::with_capacity(n + 2);
        let mut fs = Vec::with_capacity(n + 2);
        xs.push(left.tip());
        fs.push(0.0);
        for i in 0..n {
            let x = if i == n - 1 { xr } else { xl + h * i as f64 };
            let f = if i == 0 || i == n - 1 {
                y_lo
            } else if x < left_edge {
                left.inverse(x).ok_or_else(|| HmcfError::TipChartFailure {
                    side: "left",
                    reason: format!("no inverse at x = {x}"),
                })?
            } else if x > right_edge {
                right.inverse(x).ok_or_else(|| HmcfError::TipChartFailure {
                    side: "right",
                    reason: format!("no inverse at x = {x}"),
                })?
            } else {
                interpolate(&grid.x, &grid.f, x, STENCIL)
            };
            xs.push(x);
            fs.push(f);
        }
        xs.push(right.tip());
        fs.push(0.0);
        let profile = ProfileGrid::new(xs, fs, grid.t, grid.center)?;
        Ok(Surface { profile, left, right })
    }

    pub fn t(&self) -> f64 {
        self.profile.t
    }

    pub fn center(&self) -> f64 {
        self.profile.center
    }

    pub fn y_match(&self) -> f64 {
        self.left.y_match
    }

    /// Radius at which the interior chart begins.
    pub fn y_low(&self) -> f64 {
        self.profile.f[1]
    }

    /// Interior-chart node count (boundary nodes included).
    pub fn interior_len(&self) -> usize {
        self.profile.len() - 2
    }

    pub fn interior_x(&self) -> &[f64] {
        let n = self.profile.len();
        &self.profile.x[1..n - 1]
    }

    pub fn interior_f(&self) -> &[f64] {
        let n = self.profile.len();
        &self.profile.f[1..n - 1]
    }

    pub fn h(&self) -> f64 {
        let xs = self.interior_x();
        (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64
    }

    pub fn max_f(&self) -> f64 {
        self.interior_f().iter().copied().fold(0.0, f64::max)
    }

    pub fn chart(&self, side: Side) -> &TipChart {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// The full meridian as one profile: tip-chart samples below the
    /// interior chart, then the interior nodes.
    ///
    /// On the overlap the interior radius is blended with the tip chart's
    /// radius by the partition of unity, so the small disagreement between
    /// the charts does not leave a kink at the junction.
    pub fn to_profile(&self) -> ProfileGrid {
        let half = self.left.m() / 2;
        let mut x = Vec::with_capacity(self.profile.len() + 2 * half);
        let mut f = Vec::with_capacity(x.capacity());
        for j in 0..half {
            x.push(self.left.g[j]);
            f.push(self.left.y(j));
        }
        let start = x.len();
        x.extend_from_slice(self.interior_x());
        f.extend_from_slice(self.interior_f());
        let (l_end, r_start) = self.blended_ends();
        let n = self.interior_len();
        let ys = self.left.y_nodes();
        let (lg, ly) = (&self.left.g[half..], &ys[half..]);
        let rg: Vec<f64> = self.right.g[half..].iter().rev().copied().collect();
        let ry: Vec<f64> = ys[half..].iter().rev().copied().collect();
        for i in (0..l_end).chain(r_start.max(l_end)..n) {
            let k = start + i;
            let (gs, yv) = if i < l_end { (lg, ly) } else { (&rg[..], &ry[..]) };
            let tip_radius = interpolate(gs, yv, x[k], STENCIL);
            let w = self.tip_weight(f[k]);
            f[k] = w * tip_radius + (1.0 - w) * f[k];
        }
        for j in (0..half).rev() {
            x.push(self.right.g[j]);
            f.push(self.right.y(j));
        }
        f[0] = 0.0;
        let last = f.len() - 1;
        f[last] = 0.0;
        ProfileGrid { x, f, t: self.t(), center: self.center() }
    }

    /// Rebuilds the atlas (new chart radius and node placement) from the
    /// current shape.
    pub fn rechart(&self, spec: &ChartSpec) -> Result<Surface> {
        Surface::from_profile(&self.to_profile(), spec)
    }

    /// Index ranges (within the interior chart) of the monotone end segments
    /// lying below the tip-chart radius.
    fn blended_ends(&self) -> (usize, usize) {
        let f = self.interior_f();
        let y = self.y_match();
        let n = f.len();
        let mut l = 0;
        while l < n && f[l] < y && (l == 0 || f[l] > f[l - 1]) {
            l += 1;
        }
        let mut r = n;
        while r > 0 && f[r - 1] < y && (r == n || f[r - 1] > f[r]) {
            r -= 1;
        }
        (l, r)
    }

    /// Tip-chart weight of the partition of unity at radius `y`.
    fn tip_weight(&self, y: f64) -> f64 {
        let (lo, hi) = (self.y_low(), self.y_match());
        smooth_step((hi - y) / (hi - lo))
    }

    /// Geometry at every node of every chart.
    pub fn samples(&self) -> Result<Vec<NodeSample>> {
        let xs = self.interior_x();
        let fs = self.interior_f();
        let n = xs.len();
        let h = self.h();
        let (fx, fxx) = derivatives4(fs, h);
        let (l_end, r_start) = self.blended_ends();
        let center = self.center();
        let mut out = Vec::with_capacity(n + 2 * (self.left.m() + 1));
        // the interior boundary nodes coincide with tip-chart nodes
        for i in 1..n - 1 {
            if fs[i] <= 0.0 {
                return Err(HmcfError::DegenerateProfile { x: xs[i], value: fs[i] });
            }
            let c = curvatures_at(fs[i], fx[i], fxx[i]);
            let weight = if i < l_end || i >= r_start { 1.0 - self.tip_weight(fs[i]) } else { 1.0 };
            let q = 1.0 + fx[i] * fx[i];
            out.push(NodeSample {
                chart: ChartKind::Interior,
                x: xs[i],
                y: fs[i],
                lambda_par: c.lambda1,
                lambda_mer: c.lambda2,
                support: support_at(xs[i], fs[i], fx[i], center),
                ffx: (fs[i] * fx[i]).powi(2),
                dmu: 2.0 * PI * fs[i] * q.sqrt() * weight * h,
                owned: weight >= 0.5,
            });
        }
        for chart in [&self.left, &self.right] {
            let kind = match chart.side {
                Side::Left => ChartKind::Left,
                Side::Right => ChartKind::Right,
            };
            let hy = chart.hy();
            for p in chart.points4() {
                out.push(self.chart_sample(kind, chart.side, &p, hy));
            }
        }
        Ok(out)
    }

    fn chart_sample(&self, kind: ChartKind, side: Side, p: &ChartPoint, hy: f64) -> NodeSample {
        let q = 1.0 + p.gy * p.gy;
        let s = side.sign();
        let weight = self.tip_weight(p.y);
        let dmu = if p.y == 0.0 {
            // endpoint correction of the trapezoid rule for an integrand y * psi(y)
            2.0 * PI * hy * hy / 12.0
        } else {
            2.0 * PI * p.y * q.sqrt() * weight * hy
        };
        NodeSample {
            chart: kind,
            x: p.x,
            y: p.y,
            lambda_par: p.lambda_par,
            lambda_mer: p.lambda_mer,
            support: s * (-(p.x - self.center()) + p.y * p.gy) / q.sqrt(),
            ffx: 1.0 / (p.lambda_par * p.lambda_par * q),
            dmu,
            owned: weight > 0.5,
        }
    }
}

/// `sum phi dmu` over precomputed samples.
pub fn integrate(samples: &[NodeSample], phi: impl Fn(&NodeSample) -> f64) -> f64 {
    samples.iter().map(|s| phi(s) * s.dmu).sum()
}

/// Total area `2 pi int f ds` over all charts.
pub fn surface_area(surface: &Surface) -> Result<f64> {
    Ok(integrate(&surface.samples()?, |_| 1.0))
}

/// Total curvature `int G dmu`; equals `4 pi` for any closed convex-topology
/// surface up to discretization error.
pub fn gauss_bonnet_integral(surface: &Surface) -> Result<f64> {
    Ok(integrate(&surface.samples()?, NodeSample::g))
}

/// Willmore-type energy `int H^2 dmu`.
pub fn h2_integral(surface: &Surface) -> Result<f64> {
    Ok(integrate(&surface.samples()?, |s| s.h() * s.h()))
}

/// A hypothesis on the initial data that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFailure {
    pub name: &'static str,
    pub detail: String,
}

/// Outcome of checking initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub failures: Vec<HypothesisFailure>,
    pub min_h: f64,
    pub min_support: f64,
    pub area: f64,
    /// Predicted extinction time `area / 4 pi`.
    pub t_predicted: f64,
    pub surface: Option<Surface>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn ensure(self) -> Result<Surface> {
        if !self.failures.is_empty() {
            let all: Vec<String> = self.failures.iter().map(|f| format!("{}: {}", f.name, f.detail)).collect();
            return Err(HmcfError::HypothesisFailed(all.join("; ")));
        }
        self.surface.ok_or_else(|| HmcfError::HypothesisFailed("no surface".into()))
    }

    pub fn has_failure(&self, name: &str) -> bool {
        self.failures.iter().any(|f| f.name == name)
    }
}

pub const TIPS_CLOSED: &str = "tips closed";
pub const POSITIVE_RADIUS: &str = "positive radius";
pub const CHARTS_BUILT: &str = "tip charts";
pub const MEAN_CONVEX: &str = "mean convexity lost";
pub const STAR_SHAPED: &str = "not star-shaped";

/// Checks closed tips, `f > 0`, `H > 0` and star-shapedness about the
/// profile's center.
pub fn validate_initial(grid: &ProfileGrid, spec: &ChartSpec) -> ValidationReport {
    let mut report = ValidationReport {
        failures: Vec::new(),
        min_h: f64::NAN,
        min_support: f64::NAN,
        area: f64::NAN,
        t_predicted: f64::NAN,
        surface: None,
    };
    let n = grid.len();
    let inner = usize::from(grid.f[0] == 0.0)..n - usize::from(grid.f[n - 1] == 0.0);
    if let Some(i) = inner.clone().find(|&i| grid.f[i] <= 0.0) {
        report.failures.push(HypothesisFailure {
            name: POSITIVE_RADIUS,
            detail: format!("f = {} at x = {}", grid.f[i], grid.x[i]),
        });
        return report;
    }
    let surface = match Surface::from_profile(grid, spec) {
        Ok(s) => s,
        Err(e) => {
            report.failures.push(HypothesisFailure { name: CHARTS_BUILT, detail: e.to_string() });
            return report;
        }
    };
    if !(surface.left.tip() <= grid.x[0] && surface.right.tip() >= grid.x[n - 1]) {
        report.failures.push(HypothesisFailure {
            name: TIPS_CLOSED,
            detail: format!(
                "extrapolated tips [{}, {}] inside samples [{}, {}]",
                surface.left.tip(),
                surface.right.tip(),
                grid.x[0],
                grid.x[n - 1]
            ),
        });
    }
    let samples = match surface.samples() {
        Ok(s) => s,
        Err(e) => {
            report.failures.push(HypothesisFailure { name: POSITIVE_RADIUS, detail: e.to_string() });
            return report;
        }
    };
    let worst_h = samples.iter().min_by(|a, b| a.h().total_cmp(&b.h())).unwrap();
    report.min_h = worst_h.h();
    if !(report.min_h > 0.0) {
        report.failures.push(HypothesisFailure {
            name: MEAN_CONVEX,
            detail: format!("H = {} at x = {}", worst_h.h(), worst_h.x),
        });
    }
    let worst_s = samples.iter().min_by(|a, b| a.support.total_cmp(&b.support)).unwrap();
    report.min_support = worst_s.support;
    if !(report.min_support > 0.0) {
        report.failures.push(HypothesisFailure {
            name: STAR_SHAPED,
            detail: format!("<F - c, nu> = {} at x = {}", worst_s.support, worst_s.x),
        });
    }
    report.area = integrate(&samples, |_| 1.0);
    report.t_predicted = report.area / (4.0 * PI);
    report.surface = Some(surface);
    report
}
