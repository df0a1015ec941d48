use std::f64::consts::PI;

use approx::assert_relative_eq;
use hmcf_core::diagnostics::sphere_oracle;
use hmcf_core::flow::step;
use hmcf_core::io::{read_profile, write_profile};
use hmcf_core::*;
use proptest::prelude::*;

const N: usize = 120;

/// Smooth star-shaped profile on `[shift - 1, shift + 1]`.
fn wavy(beta: f64, k: f64, shift: f64) -> ProfileGrid {
    ProfileGrid::from_fn(shift - 1.0, shift + 1.0, 2 * N + 1, shift, |x| {
        let u = x - shift;
        (1.0 - u * u).max(0.0).sqrt() * (1.0 + beta * (k * PI * u).cos())
    })
}

fn mirrored(g: &ProfileGrid) -> ProfileGrid {
    let x = g.x.iter().rev().map(|x| 2.0 * g.center - x).collect();
    let f = g.f.iter().rev().copied().collect();
    ProfileGrid::new(x, f, g.t, g.center).unwrap()
}

fn surface(g: &ProfileGrid) -> Surface {
    Surface::from_profile(g, &ChartSpec::for_nodes(N)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integrals_ignore_reflection_and_translation(beta in 0.0f64..0.04, k in 1.0f64..3.0, shift in -2.0f64..2.0) {
        let base = surface(&wavy(beta, k, 0.0));
        let moved = surface(&wavy(beta, k, shift));
        let flipped = surface(&mirrored(&wavy(beta, k, shift)));
        let a = surface_area(&base).unwrap();
        for s in [&moved, &flipped] {
            prop_assert!((surface_area(s).unwrap() - a).abs() <= 1e-9 * a);
            let gb = gauss_bonnet_integral(&base).unwrap();
            prop_assert!((gauss_bonnet_integral(s).unwrap() - gb).abs() <= 1e-9);
            let h2 = h2_integral(&base).unwrap();
            prop_assert!((h2_integral(s).unwrap() - h2).abs() <= 1e-8 * h2);
        }
    }

    #[test]
    fn one_step_commutes_with_reflection(beta in 0.0f64..0.04, eps in 0.0f64..0.2) {
        let params = FlowParams::with_epsilon(eps);
        let g = wavy(beta, 2.0, 0.3);
        let dt = 1e-5;
        let a = step(&surface(&g), &params, Some(dt)).unwrap().to_profile();
        let b = mirrored(&step(&surface(&mirrored(&g)), &params, Some(dt)).unwrap().to_profile());
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.f.iter().zip(&b.f) {
            prop_assert!((p - q).abs() <= 1e-11);
        }
        for (p, q) in a.x.iter().zip(&b.x) {
            prop_assert!((p - q).abs() <= 1e-11);
        }
    }

    #[test]
    fn gauss_bonnet_holds_for_star_shaped_profiles(beta in 0.0f64..0.04, k in 1.0f64..3.0) {
        let g = gauss_bonnet_integral(&surface(&wavy(beta, k, 0.0))).unwrap();
        prop_assert!((g / (4.0 * PI) - 1.0).abs() < 5e-3);
    }
}

#[test]
fn profile_files_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bumpy.txt");
    let mut g = make_preset("bumpy", 100).unwrap();
    g.t = 0.1 + 0.2;
    std::fs::write(&path, write_profile(&g)).unwrap();
    let back = read_profile(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, g);
}

#[test]
fn profile_without_tip_rows_is_accepted() {
    let g = make_preset("sphere", 100).unwrap();
    let inner = ProfileGrid::new(g.x[1..g.len() - 1].to_vec(), g.f[1..g.len() - 1].to_vec(), 0.0, 0.0).unwrap();
    let with = validate_initial(&g, &ChartSpec::for_nodes(100));
    let without = validate_initial(&inner, &ChartSpec::for_nodes(100));
    assert!(with.passed() && without.passed(), "{:?}", without.failures);
    assert_relative_eq!(with.area, without.area, max_relative = 1e-4);
}

#[test]
fn small_regularized_sphere_matches_the_oracle() {
    let (r0, eps) = (0.7, 0.05);
    let grid = Preset::Sphere { r0 }.build(N).unwrap();
    let r = evolve(&grid, &FlowParams::with_epsilon(eps), &EvolveOptions::for_nodes(N)).unwrap();
    assert_eq!(r.termination, Termination::Extinct);
    let oracle = sphere_oracle(r0, eps, 0.0).unwrap().extinction;
    assert_relative_eq!(r.final_time, oracle, max_relative = 1e-2);
    let mid = r.series.iter().find(|s| s.t > 0.5 * oracle).unwrap();
    let expect = sphere_oracle(r0, eps, mid.t).unwrap();
    assert_relative_eq!(mid.area, expect.area, max_relative = 2e-3);
    assert_relative_eq!(mid.speed_min, expect.kappa, max_relative = 2e-3);
}

#[test]
fn squashed_spheroid_stays_convex_and_dies_on_schedule() {
    let grid = make_preset("squashed", N).unwrap();
    let r = evolve(&grid, &FlowParams::default(), &EvolveOptions::for_nodes(N)).unwrap();
    assert_eq!(r.termination, Termination::Extinct);
    assert_relative_eq!(r.final_time, r.t_predicted, max_relative = 1e-2);
    assert_eq!(r.t_convex, Some(0.0));
    assert!(r.series.iter().all(|s| s.lambda2_min > 0.0));
}
