//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p hmcf-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hmcf_core::diagnostics::{
    assert_bounds, assert_monotone, lower_h_check, radial_distance, relative_slack, roundness_trend, series_until,
    time_integral,
};
use hmcf_core::flow::stable_dt;
use hmcf_core::speed::{levelset_curvatures, levelset_speed_f1, levelset_speed_f1_trace_det, modified_speed};
use hmcf_core::*;
use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

const N: usize = 400;
const N_FINE: usize = 800;
const SWEEP: [f64; 3] = [0.0, 0.05, 0.1];
const LIMIT_EPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

fn common_times() -> Vec<f64> {
    (1..=10).map(|k| 0.065 * k as f64).collect()
}

struct Run {
    result: EvolveResult,
    seconds: f64,
}

fn run(preset: &str, n: usize, eps: f64, configure: impl FnOnce(&mut EvolveOptions)) -> Result<Run> {
    let grid = make_preset(preset, n)?;
    let mut opts = EvolveOptions::for_nodes(n);
    configure(&mut opts);
    let start = Instant::now();
    let result = evolve(&grid, &FlowParams::with_epsilon(eps), &opts)?;
    Ok(Run { result, seconds: start.elapsed().as_secs_f64() })
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("run failed: {e}")
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn extinct(r: &EvolveResult) -> std::result::Result<(), String> {
    if r.termination == Termination::Extinct {
        Ok(())
    } else {
        Err(format!("terminated with {} at t={}", r.termination, r.final_time))
    }
}

fn sphere_extinction() -> Outcome {
    let r = run("sphere", N, 0.0, |_| {}).map_err(fail)?;
    extinct(&r.result)?;
    let t = r.result.final_time;
    verdict(
        (t - 1.0).abs() <= 0.01 && r.seconds < 60.0,
        format!("n={N} final_time={t:.6} (target 1 +- 1%), runtime {:.1} s (< 60 s)", r.seconds),
    )
}

fn eps_sphere_extinction() -> Outcome {
    let eps = 0.1;
    let r = run("sphere", N, eps, |_| {}).map_err(fail)?.result;
    extinct(&r)?;
    let oracle = 1.0 / (1.0 + 4.0 * eps);
    let t = r.final_time;
    let lhs = t + eps / (4.0 * PI) * time_integral(&r.series, Field::H2Integral);
    let rhs = r.initial_area / (4.0 * PI);
    let time_err = (t - oracle).abs() / oracle;
    let identity_err = (lhs - rhs).abs() / rhs;
    verdict(
        time_err <= 0.01 && identity_err <= 0.02,
        format!(
            "final_time={t:.6} vs {oracle:.6} (rel {time_err:.2e} <= 1%); T + eps/4pi int h2 = {lhs:.6} vs {rhs:.6} (rel {identity_err:.2e} <= 2%)"
        ),
    )
}

struct FineRuns {
    sphere: EvolveResult,
    bumpy: EvolveResult,
}

fn gauss_bonnet(fine: &std::result::Result<FineRuns, String>) -> Outcome {
    let fine = fine.as_ref().map_err(Clone::clone)?;
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, r) in [("sphere", &fine.sphere), ("bumpy", &fine.bumpy)] {
        extinct(r)?;
        let cut = series_until(&r.series, r.final_time * (1.0 - 1e-3));
        let worst = cut.iter().map(|s| s.gb_residual.abs()).fold(0.0, f64::max);
        ok &= worst < 5e-3 && !cut.is_empty();
        parts.push(format!("{name} max |gb|={worst:.2e} over {} records", cut.len()));
    }
    verdict(ok, format!("n={N_FINE}: {} (< 5e-3)", parts.join(", ")))
}

/// `(A(t_end) - A(0)) / t_end + 4 pi` of a sphere run stopped at `t_end`.
fn mean_area_residual(n: usize, dt: f64, t_end: f64) -> Result<f64> {
    let r = run("sphere", n, 0.0, |o| {
        o.dt_max = Some(dt);
        o.stop_time = Some(t_end);
    })?
    .result;
    let first = r.series.first().expect("initial record").area;
    let last = r.series.last().expect("final record").area;
    Ok((last - first) / r.final_time + 4.0 * PI)
}

fn stable_sphere_dt(n: usize) -> Result<f64> {
    let s = Surface::from_profile(&make_preset("sphere", n)?, &ChartSpec::for_nodes(n))?;
    stable_dt(&s, &FlowParams::default())
}

/// Observed order from three levels refined by 2, with the limit value
/// eliminated.
fn three_level_order(e: [f64; 3]) -> f64 {
    ((e[0] - e[1]) / (e[1] - e[2])).log2()
}

fn area_law(fine: &std::result::Result<FineRuns, String>) -> Outcome {
    let t_end = 0.5;
    // the sphere area halves by t_end, so the stable step does too
    let dt0 = 0.4 * stable_sphere_dt(100).map_err(fail)? * (1.0 - t_end);
    let mut by_dt = [0.0; 3];
    for (k, e) in by_dt.iter_mut().enumerate() {
        *e = mean_area_residual(100, dt0 / 2f64.powi(k as i32), t_end).map_err(fail)?;
    }
    let p_dt = three_level_order(by_dt);

    let dt_fixed = 0.5 * stable_sphere_dt(400).map_err(fail)? * (1.0 - t_end);
    let mut by_h = [0.0; 3];
    for (e, n) in by_h.iter_mut().zip([100, 200, 400]) {
        *e = mean_area_residual(n, dt_fixed, t_end).map_err(fail)?;
    }
    let p_h = three_level_order(by_h);

    let fine = fine.as_ref().map_err(Clone::clone)?;
    let cut = series_until(&fine.sphere.series, fine.sphere.final_time * (1.0 - 1e-3));
    let worst = cut.iter().map(|s| s.area_ode_residual.abs()).filter(|v| !v.is_nan()).fold(0.0, f64::max);
    let bound = 1e-2 * 4.0 * PI;
    verdict(
        p_dt >= 1.0 && p_h >= 2.0 && worst < bound,
        format!(
            "dt order {p_dt:.3} (>= 1, n=100, mean residuals {:.3e} {:.3e} {:.3e}); h order {p_h:.3} (>= 2, n=100/200/400, {:.3e} {:.3e} {:.3e}); n={N_FINE} max |residual| {worst:.2e} < {bound:.3e}",
            by_dt[0], by_dt[1], by_dt[2], by_h[0], by_h[1], by_h[2]
        ),
    )
}

fn monotone_suite(bumpy: &[(f64, Result<Run>)]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (eps, r) in bumpy {
        let r = &r.as_ref().map_err(fail)?.result;
        extinct(r)?;
        for (field, dir) in [
            (Field::Q, Direction::NonDecreasing),
            (Field::QEta, Direction::NonDecreasing),
            (Field::FfxMax, Direction::NonIncreasing),
        ] {
            let slack = relative_slack(&r.series, field, 1e-6);
            let rep = assert_monotone(&r.series, field, dir, slack);
            ok &= rep.passed;
            if !rep.passed {
                parts.push(format!("eps={eps} {} violated: {rep:?}", field.name()));
            }
        }
        parts.push(format!("eps={eps} ok over {} records", r.series.len()));
    }
    verdict(ok, format!("q, q_eta non-decreasing, ffx_max non-increasing: {}", parts.join("; ")))
}

fn hypothesis_persistence(bumpy: &EvolveResult) -> Outcome {
    extinct(bumpy)?;
    let rep = lower_h_check(&bumpy.series, bumpy.final_time, 0.01);
    verdict(
        rep.passed,
        format!(
            "termination {}; H_min over run {:.4} at t={:.4} >= delta {:.4}",
            bumpy.termination, rep.min_h, rep.worst_time, rep.delta
        ),
    )
}

fn convexification(bumpy: &EvolveResult) -> Outcome {
    extinct(bumpy)?;
    let t_convex = bumpy.t_convex.ok_or("no convexification time recorded")?;
    let trend = roundness_trend(&bumpy.series, bumpy.t_convex, bumpy.final_time).map_err(fail)?;
    verdict(
        t_convex < bumpy.final_time && trend.passed,
        format!(
            "t_convex={t_convex:.4} < T={:.4}; roundness {:.4} at t={:.4}, {:.4} at t={:.4}",
            bumpy.final_time, trend.at_late, trend.t_late, trend.at_mid, trend.t_mid
        ),
    )
}

fn pinching_bounds(bumpy: &[(f64, Result<Run>)]) -> Outcome {
    let mut cut = Vec::new();
    for (eps, r) in bumpy {
        let r = &r.as_ref().map_err(fail)?.result;
        cut.push((*eps, series_until(&r.series, r.final_time * (1.0 - 1e-2))));
    }
    let report = assert_bounds(&cut, 0.5);
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["speed_min", "pinch_C1", "pinch_C2", "h2_integral"] {
        let e = report.entry(name).ok_or(format!("missing bound {name}"))?;
        ok &= e.passed;
        let values: Vec<String> = e.extrema.iter().map(|(_, v)| format!("{v:.4}")).collect();
        parts.push(format!("{name} [{}] variation {:.3}", values.join(", "), e.variation));
    }
    let speed_floor = report.entry("speed_min").map(|e| e.extrema.iter().map(|v| v.1).fold(f64::INFINITY, f64::min));
    ok &= speed_floor.is_some_and(f64::is_finite);
    verdict(ok, format!("eps in {SWEEP:?}: {} (< 0.5)", parts.join("; ")))
}

fn random_symmetric(rng: &mut ChaCha8Rng) -> (Vector3<f64>, Matrix3<f64>) {
    let p = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    (p, a + a.transpose())
}

fn speed_kernels() -> Outcome {
    let delta1 = 0.2;
    let tol = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut routes, mut rotation, mut geometric) = (0.0f64, 0.0f64, 0.0f64);
    let mut checked = 0;
    while checked < 100 {
        let (p, x) = random_symmetric(&mut rng);
        let Ok((l1, l2)) = levelset_curvatures(&p, &x) else { continue };
        if !(l1 > 0.0 && l2 >= -delta1 * l1) {
            continue;
        }
        let e = levelset_speed_f1(&p, &x, delta1).map_err(fail)?;
        let scale = e.abs().max(1.0);
        routes = routes.max((e - levelset_speed_f1_trace_det(&p, &x).map_err(fail)?).abs() / scale);

        let axis = Unit::new_normalize(Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
        let rot = Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..2.0 * PI));
        let r = rot.matrix();
        let rotated = levelset_speed_f1(&(r * p), &(r * x * r.transpose()), delta1).map_err(fail)?;
        rotation = rotation.max((rotated - e).abs() / scale);

        let s = rng.gen_range(0.2..5.0);
        let sigma = rng.gen_range(-3.0..3.0);
        let moved = levelset_speed_f1(&(s * p), &(s * x + sigma * p * p.transpose()), delta1).map_err(fail)?;
        geometric = geometric.max((moved - e).abs() / scale);
        checked += 1;
    }
    let mut jump = 0.0f64;
    for k in 1..=1000 {
        let l1 = 0.01 * k as f64;
        let l2 = -delta1 * l1;
        let below = modified_speed(l1, l2 * (1.0 + 1e-13), delta1).map_err(fail)?;
        let above = modified_speed(l1, l2 * (1.0 - 1e-13), delta1).map_err(fail)?;
        jump = jump.max((below - above).abs() / l1.max(1.0));
    }
    verdict(
        routes <= tol && rotation <= tol && geometric <= tol && jump <= tol,
        format!(
            "{checked} seeded inputs: routes {routes:.1e}, rotation {rotation:.1e}, geometric {geometric:.1e}; switch jump {jump:.1e} (all <= 1e-10)"
        ),
    )
}

fn limit_consistency(runs: &[(f64, std::result::Result<Vec<ProfileGrid>, String>)]) -> Outcome {
    let mut distances = Vec::new();
    for pair in runs.windows(2) {
        let (eps, a) = (&pair[0].0, pair[0].1.as_ref().map_err(Clone::clone)?);
        let b = pair[1].1.as_ref().map_err(Clone::clone)?;
        if a.len() != b.len() || a.len() != common_times().len() {
            return Err(format!("expected {} snapshots, got {} and {}", common_times().len(), a.len(), b.len()));
        }
        let d = a.iter().zip(b).map(|(p, q)| radial_distance(p, q)).fold(0.0, f64::max);
        distances.push((*eps, d));
    }
    let decreasing = distances.windows(2).all(|w| w[1].1 < w[0].1);
    let text: Vec<String> = distances.iter().map(|(e, d)| format!("d({e}, {})={d:.4e}", e / 2.0)).collect();
    verdict(decreasing, format!("sup radial distance at 10 times up to t=0.65: {}", text.join(", ")))
}

fn main() -> ExitCode {
    let total = Instant::now();
    let mut lines: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |k: usize, name: &'static str, outcome: Outcome| {
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} criterion {k:>2} ({name}): {detail}");
        lines.push((k, name, outcome));
    };

    report(1, "sphere extinction", sphere_extinction());
    report(2, "regularized sphere extinction", eps_sphere_extinction());

    let fine = (|| -> std::result::Result<FineRuns, String> {
        let sphere = run("sphere", N_FINE, 0.0, |_| {}).map_err(fail)?.result;
        let bumpy = run("bumpy", N_FINE, 0.0, |_| {}).map_err(fail)?.result;
        Ok(FineRuns { sphere, bumpy })
    })();
    report(3, "Gauss-Bonnet", gauss_bonnet(&fine));
    report(4, "area law", area_law(&fine));
    drop(fine);

    let bumpy: Vec<(f64, Result<Run>)> = SWEEP
        .iter()
        .map(|&eps| (eps, run("bumpy", N, eps, |o| o.snapshot_times = common_times())))
        .collect();
    report(5, "monotone suite", monotone_suite(&bumpy));
    let base = bumpy[0].1.as_ref().map_err(fail);
    report(6, "hypothesis persistence", base.and_then(|r| hypothesis_persistence(&r.result)));
    let base = bumpy[0].1.as_ref().map_err(fail);
    report(7, "convexification", base.and_then(|r| convexification(&r.result)));
    report(8, "pinching and bounds", pinching_bounds(&bumpy));
    report(9, "speed kernels", speed_kernels());

    let t_last = *common_times().last().unwrap();
    let limit: Vec<(f64, std::result::Result<Vec<ProfileGrid>, String>)> = LIMIT_EPS
        .iter()
        .map(|&eps| {
            let reuse = bumpy.iter().find(|(e, _)| *e == eps).map(|(_, r)| r.as_ref().map(|r| r.result.snapshots.clone()));
            let snaps = match reuse {
                Some(r) => r.map_err(fail),
                None => run("bumpy", N, eps, |o| {
                    o.snapshot_times = common_times();
                    o.stop_time = Some(t_last);
                })
                .map(|r| r.result.snapshots)
                .map_err(fail),
            };
            (eps, snaps)
        })
        .collect();
    report(10, "limit consistency", limit_consistency(&limit));

    let failed: Vec<String> = lines.iter().filter(|l| l.2.is_err()).map(|l| format!("{} ({})", l.0, l.1)).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.0} s{}",
        lines.len() - failed.len(),
        lines.len(),
        total.elapsed().as_secs_f64(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
