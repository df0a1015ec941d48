//! Harmonic mean curvature flow of star-shaped, mean-convex surfaces of
//! revolution, and its `G/H + eps H` regularization.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `is_multiple_of` is newer than the minimum supported Rust version.
#![allow(clippy::manual_is_multiple_of)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fd;
pub mod flow;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod presets;
pub mod speed;

pub use config::{parse_config, RunConfig, Source};
pub use diagnostics::{DiagRecord, Direction, Field};
pub use error::{HmcfError, Result};
pub use flow::{evolve, EvolveOptions, EvolveResult, Termination};
pub use geometry::*;
pub use presets::{make_preset, Preset};
pub use speed::FlowParams;
