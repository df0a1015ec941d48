//! SVG plots of a finished run.

use std::f64::consts::PI;
use std::path::Path;

use hmcf_core::{EvolveResult, HmcfError, Result};
use plotters::prelude::*;

const SIZE: (u32, u32) = (800, 560);

struct Curve {
    name: String,
    points: Vec<(f64, f64)>,
    color: RGBColor,
    dashed: bool,
}

fn plot_error<E: std::fmt::Display>(e: E) -> HmcfError {
    HmcfError::Io(format!("plot: {e}"))
}

fn bounds(curves: &[Curve]) -> ((f64, f64), (f64, f64)) {
    let mut xr = (f64::INFINITY, f64::NEG_INFINITY);
    let mut yr = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in curves.iter().flat_map(|c| c.points.iter()) {
        xr = (xr.0.min(x), xr.1.max(x));
        yr = (yr.0.min(y), yr.1.max(y));
    }
    let pad = |(lo, hi): (f64, f64)| {
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        let d = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
        (lo - d, hi + d)
    };
    (pad(xr), pad(yr))
}

fn line_chart(path: &Path, title: &str, x_desc: &str, y_desc: &str, curves: &[Curve], equal_axes: bool) -> Result<()> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_error)?;
    let ((x0, x1), (mut y0, mut y1)) = bounds(curves);
    if equal_axes {
        // keep the aspect ratio of the profile drawing near one
        let half = 0.5 * (x1 - x0) * SIZE.1 as f64 / SIZE.0 as f64;
        let mid = 0.5 * (y0 + y1);
        let half = half.max(0.5 * (y1 - y0));
        (y0, y1) = (mid - half, mid + half);
    }
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_error)?;
    chart.configure_mesh().x_desc(x_desc).y_desc(y_desc).draw().map_err(plot_error)?;
    for c in curves {
        let style = c.color.stroke_width(2);
        let series = if c.dashed {
            let pts: Vec<(f64, f64)> = c.points.clone();
            chart.draw_series(DashedLineSeries::new(pts, 8, 6, style)).map_err(plot_error)?
        } else {
            chart.draw_series(LineSeries::new(c.points.iter().copied(), style)).map_err(plot_error)?
        };
        let color = c.color;
        series.label(c.name.clone()).legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_error)?;
    root.present().map_err(plot_error)
}

fn palette(k: usize) -> RGBColor {
    const COLORS: [RGBColor; 8] = [
        RGBColor(31, 119, 180),
        RGBColor(255, 127, 14),
        RGBColor(44, 160, 44),
        RGBColor(214, 39, 40),
        RGBColor(148, 103, 189),
        RGBColor(140, 86, 75),
        RGBColor(227, 119, 194),
        RGBColor(127, 127, 127),
    ];
    COLORS[k % COLORS.len()]
}

fn field_curve(r: &EvolveResult, name: &str, get: impl Fn(&hmcf_core::DiagRecord) -> f64) -> Curve {
    Curve {
        name: name.into(),
        points: r.series.iter().map(|s| (s.t, get(s))).filter(|p| p.1.is_finite()).collect(),
        color: palette(0),
        dashed: false,
    }
}

/// Writes the profile overlay and the area, `q`, `H_min` and roundness
/// histories as `<label>_<name>.svg`.
pub fn write_all(dir: &Path, label: &str, epsilon: f64, r: &EvolveResult) -> Result<()> {
    let file = |name: &str| dir.join(format!("{label}_{name}.svg"));

    let mut profiles = Vec::new();
    let finals = r.final_surface.to_profile();
    for (k, g) in r.snapshots.iter().chain(std::iter::once(&finals)).enumerate() {
        let upper = g.x.iter().zip(&g.f).map(|(&x, &f)| (x, f));
        let lower = g.x.iter().zip(&g.f).rev().map(|(&x, &f)| (x, -f));
        profiles.push(Curve {
            name: format!("t = {:.4}", g.t),
            points: upper.chain(lower).collect(),
            color: palette(k),
            dashed: false,
        });
    }
    line_chart(&file("profiles"), "Profile snapshots", "x", "r", &profiles, true)?;

    let mut area = vec![field_curve(r, "area", |s| s.area)];
    if epsilon == 0.0 {
        let t_end = r.final_time.max(r.t_predicted);
        area.push(Curve {
            name: "A(0) - 4 pi t".into(),
            points: vec![(0.0, r.initial_area), (t_end, r.initial_area - 4.0 * PI * t_end)],
            color: palette(3),
            dashed: true,
        });
    }
    line_chart(&file("area"), "Area", "t", "area", &area, false)?;
    line_chart(&file("q"), "Star-shape monitor q", "t", "q", &[field_curve(r, "q", |s| s.q)], false)?;
    line_chart(&file("h_min"), "Smallest mean curvature", "t", "H_min", &[field_curve(r, "H_min", |s| s.h_min)], false)?;
    line_chart(
        &file("roundness"),
        "Roundness after convexification",
        "t",
        "lambda1_max / lambda2_min",
        &[field_curve(r, "roundness", |s| s.roundness)],
        false,
    )
}
