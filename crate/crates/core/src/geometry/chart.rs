use crate::error::{HmcfError, Result};
use crate::fd::derivatives4_even;
use crate::geometry::profile::ProfileGrid;
use crate::interp::{bisect, Interpolant, STENCIL};

/// Which pole of the surface a tip chart covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Orientation of the chart: `+1` where the outer normal at the tip
    /// points towards `-x`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Inverse graph `x = g(y)` of the profile near a tip, sampled at
/// `y_j = j * y_match / m` for `j = 0..=m`.
///
/// `g` is even in `y` (the meridian crosses the axis orthogonally), which the
/// derivative stencils at `y = 0` use as a reflection condition.
#[derive(Debug, Clone, PartialEq)]
pub struct TipChart {
    pub side: Side,
    pub y_match: f64,
    pub g: Vec<f64>,
}

/// Geometry of one tip-chart node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub y: f64,
    pub x: f64,
    pub gy: f64,
    pub gyy: f64,
    /// Curvature of the parallel circle (the tip value is the umbilic limit).
    pub lambda_par: f64,
    /// Curvature of the meridian.
    pub lambda_mer: f64,
}

impl TipChart {
    pub fn new(side: Side, y_match: f64, g: Vec<f64>) -> Result<Self> {
        if g.len() < STENCIL || y_match <= 0.0 {
            return Err(HmcfError::TipChartFailure {
                side: side.name(),
                reason: format!("{} nodes on radius {y_match}", g.len()),
            });
        }
        let chart = TipChart { side, y_match, g };
        if !chart.is_monotone() {
            return Err(HmcfError::TipChartFailure {
                side: side.name(),
                reason: "inverse graph is not monotone".into(),
            });
        }
        Ok(chart)
    }

    /// Number of intervals.
    pub fn m(&self) -> usize {
        self.g.len() - 1
    }

    pub fn hy(&self) -> f64 {
        self.y_match / self.m() as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        if j == self.m() {
            self.y_match
        } else {
            j as f64 * self.hy()
        }
    }

    pub fn y_nodes(&self) -> Vec<f64> {
        (0..=self.m()).map(|j| self.y(j)).collect()
    }

    /// Abscissa of the tip itself.
    pub fn tip(&self) -> f64 {
        self.g[0]
    }

    /// `g` moves away from the tip as `y` grows.
    pub fn is_monotone(&self) -> bool {
        let s = self.side.sign();
        self.g.windows(2).all(|w| s * (w[1] - w[0]) > 0.0)
    }

    /// `(g_y, g_yy)` at every node: even reflection at `y = 0`, centered
    /// inside, one-sided second order at the outer node.
    pub fn derivatives(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.m();
        let g = &self.g;
        let h = self.hy();
        let (inv2h, invh2) = (0.5 / h, 1.0 / (h * h));
        let mut gy = vec![0.0; m + 1];
        let mut gyy = vec![0.0; m + 1];
        gyy[0] = 2.0 * (g[1] - g[0]) * invh2;
        for j in 1..m {
            gy[j] = (g[j + 1] - g[j - 1]) * inv2h;
            gyy[j] = (g[j + 1] - 2.0 * g[j] + g[j - 1]) * invh2;
        }
        gy[m] = (3.0 * g[m] - 4.0 * g[m - 1] + g[m - 2]) * inv2h;
        gyy[m] = (2.0 * g[m] - 5.0 * g[m - 1] + 4.0 * g[m - 2] - g[m - 3]) * invh2;
        (gy, gyy)
    }

    /// Node geometry from the solver's second-order stencils.
    pub fn points(&self) -> Vec<ChartPoint> {
        let (gy, gyy) = self.derivatives();
        self.points_from(&gy, &gyy)
    }

    /// Node geometry from fourth-order stencils, for monitors.
    pub fn points4(&self) -> Vec<ChartPoint> {
        let (gy, gyy) = derivatives4_even(&self.g, self.hy());
        self.points_from(&gy, &gyy)
    }

    fn points_from(&self, gy: &[f64], gyy: &[f64]) -> Vec<ChartPoint> {
        let s = self.side.sign();
        (0..=self.m())
            .map(|j| {
                let y = self.y(j);
                let q = 1.0 + gy[j] * gy[j];
                let sq = q.sqrt();
                let lambda_mer = s * gyy[j] / (q * sq);
                let lambda_par = if j == 0 {
                    lambda_mer
                } else {
                    s * gy[j] / (y * sq)
                };
                ChartPoint { y, x: self.g[j], gy: gy[j], gyy: gyy[j], lambda_par, lambda_mer }
            })
            .collect()
    }

    fn interpolant(&self) -> Interpolant {
        let s: Vec<f64> = self.y_nodes().iter().map(|y| y * y).collect();
        Interpolant::new(s, self.g.clone(), STENCIL)
    }

    /// `g(y)` for `0 <= y <= y_match`, interpolated in `y^2`.
    pub fn eval(&self, y: f64) -> f64 {
        self.interpolant().eval(y * y)
    }

    /// The radius `y` at which the chart passes through abscissa `x`, if it
    /// does.
    pub fn inverse(&self, x: f64) -> Option<f64> {
        let interp = self.interpolant();
        bisect(|y| interp.eval(y * y) - x, 0.0, self.y_match, 1e-15 * self.y_match.max(1.0))
            .filter(|_| {
                let (lo, hi) = self.x_range();
                x >= lo && x <= hi
            })
    }

    /// Abscissa range covered by the chart.
    pub fn x_range(&self) -> (f64, f64) {
        let (p, q) = (self.g[0], self.g[self.m()]);
        (p.min(q), p.max(q))
    }
}

/// Index range of the monotone run of samples starting at the given tip.
/// For the right side the range is reported left to right.
pub fn monotone_segment(grid: &ProfileGrid, side: Side) -> std::ops::Range<usize> {
    let n = grid.len();
    match side {
        Side::Left => {
            let mut end = 1;
            while end < n && grid.f[end] > grid.f[end - 1] {
                end += 1;
            }
            0..end
        }
        Side::Right => {
            let mut start = n - 1;
            while start > 0 && grid.f[start - 1] > grid.f[start] {
                start -= 1;
            }
            start..n
        }
    }
}

/// Largest chart radius the monotone end segments support, or an error if
/// it falls below `min_fraction * max f`.
pub fn admissible_y_match(grid: &ProfileGrid, requested: f64, min_fraction: f64) -> Result<f64> {
    let mut y = requested;
    for side in [Side::Left, Side::Right] {
        let seg = monotone_segment(grid, side);
        if seg.len() < STENCIL {
            return Err(HmcfError::TipChartFailure {
                side: side.name(),
                reason: format!("only {} monotone samples near the tip", seg.len()),
            });
        }
        let top = match side {
            Side::Left => grid.f[seg.end - 1],
            Side::Right => grid.f[seg.start],
        };
        // keep a few samples above the chart for the interpolation stencil
        let k = STENCIL / 2;
        let guard = match side {
            Side::Left => grid.f[seg.end.saturating_sub(k + 1).max(seg.start)],
            Side::Right => grid.f[(seg.start + k).min(seg.end - 1)],
        };
        y = y.min(0.9 * top).min(guard);
    }
    if y < min_fraction * grid.max_f() {
        return Err(HmcfError::TipChartFailure {
            side: "both",
            reason: format!("admissible chart radius {y} below minimum"),
        });
    }
    Ok(y)
}

/// Resamples the inverse graph near one tip on `m + 1` uniform radii up to
/// `y_match`. Missing tip rows are extrapolated from the even expansion of
/// `g` in `y^2`.
pub fn build_tip_chart(grid: &ProfileGrid, side: Side, y_match: f64, m: usize) -> Result<TipChart> {
    let seg = monotone_segment(grid, side);
    let mut pts: Vec<(f64, f64)> = seg.map(|i| (grid.f[i] * grid.f[i], grid.x[i])).collect();
    if side == Side::Right {
        pts.reverse();
    }
    let top = pts.last().map(|p| p.0.sqrt()).unwrap_or(0.0);
    if top < y_match {
        return Err(HmcfError::TipChartFailure {
            side: side.name(),
            reason: format!("monotone part reaches only {top} < {y_match}"),
        });
    }
    let (s, x): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let interp = Interpolant::new(s, x, STENCIL);
    let g = (0..=m)
        .map(|j| {
            let y = if j == m { y_match } else { j as f64 * y_match / m as f64 };
            interp.eval(y * y)
        })
        .collect();
    TipChart::new(side, y_match, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sphere(n: usize) -> ProfileGrid {
        ProfileGrid::from_fn(-1.0, 1.0, n, 0.0, |x| (1.0 - x * x).sqrt())
    }

    #[test]
    fn sphere_left_chart_matches_inverse() {
        let grid = sphere(401);
        let chart = build_tip_chart(&grid, Side::Left, 0.6, 80).unwrap();
        for (j, &g) in chart.g.iter().enumerate() {
            let y = chart.y(j);
            assert_relative_eq!(g, -(1.0 - y * y).sqrt(), epsilon = 1e-7);
        }
        let right = build_tip_chart(&grid, Side::Right, 0.6, 80).unwrap();
        for (j, &g) in right.g.iter().enumerate() {
            assert_relative_eq!(g, (1.0 - right.y(j).powi(2)).sqrt(), epsilon = 1e-7);
        }
    }

    #[test]
    fn parabolic_tip_is_reproduced_exactly() {
        // x = y^2 is linear in the interpolation variable y^2
        let grid = ProfileGrid::from_fn(0.0, 2.0, 201, 1.0, |x| x.sqrt());
        let chart = build_tip_chart(&grid, Side::Left, 0.5, 20).unwrap();
        for (j, &g) in chart.g.iter().enumerate() {
            assert_relative_eq!(g, chart.y(j).powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_recovers_profile_on_overlap() {
        let grid = sphere(801);
        let chart = build_tip_chart(&grid, Side::Left, 0.6, 120).unwrap();
        for k in 0..20 {
            let y = 0.3 + 0.3 * k as f64 / 19.0;
            let x = -(1.0 - y * y).sqrt();
            let back = chart.inverse(x).unwrap();
            assert!((back - y).abs() < 1e-6, "y={y} back={back}");
            assert!((chart.eval(y) - x).abs() < 1e-6);
        }
        assert!(chart.inverse(0.0).is_none());
    }

    #[test]
    fn chart_curvatures_are_umbilic_on_sphere() {
        let grid = sphere(801);
        let chart = build_tip_chart(&grid, Side::Left, 0.6, 120).unwrap();
        for p in chart.points().iter().take(120) {
            assert_relative_eq!(p.lambda_mer, 1.0, epsilon = 1e-3);
            assert_relative_eq!(p.lambda_par, 1.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn missing_tip_rows_are_extrapolated() {
        let full = sphere(401);
        let trimmed = ProfileGrid::new(
            full.x[1..400].to_vec(),
            full.f[1..400].to_vec(),
            0.0,
            0.0,
        )
        .unwrap();
        let chart = build_tip_chart(&trimmed, Side::Left, 0.5, 40).unwrap();
        assert!((chart.tip() + 1.0).abs() < 1e-6, "tip {}", chart.tip());
    }

    #[test]
    fn non_monotone_neighbourhood_shrinks_radius() {
        // dip at f ~ 0.45 on the left flank
        let grid = ProfileGrid::from_fn(-1.0, 1.0, 801, 0.0, |x| {
            let base = (1.0 - x * x).sqrt();
            base - 0.08 * (-((x + 0.85) / 0.03).powi(2)).exp()
        });
        let y = admissible_y_match(&grid, 0.6, 0.05).unwrap();
        assert!(y < 0.6);
        assert!(build_tip_chart(&grid, Side::Left, 0.6, 40).is_err());
        assert!(build_tip_chart(&grid, Side::Left, y, 40).is_ok());
        assert!(admissible_y_match(&grid, 0.6, 0.5).is_err());
    }
}
