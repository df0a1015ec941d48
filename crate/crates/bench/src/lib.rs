//! Shared fixtures for the benchmarks.

use hmcf_core::{make_preset, ChartSpec, Surface};

/// Charted preset surface with `n` interior nodes.
pub fn preset_surface(name: &str, n: usize) -> Surface {
    let grid = make_preset(name, n).expect("valid preset");
    Surface::from_profile(&grid, &ChartSpec::for_nodes(n)).expect("charts build")
}
