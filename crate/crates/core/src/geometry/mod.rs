//! Profiles, tip charts and the charted surface.

pub mod chart;
pub mod profile;
pub mod surface;

pub use chart::{ChartPoint, Side, TipChart};
pub use profile::{
    curvatures_at, derivatives, principal_curvatures, support_at, support_inner, CurvatureField,
    Derivatives, PointCurvature, ProfileGrid,
};
pub use surface::{
    gauss_bonnet_integral, h2_integral, integrate, surface_area, validate_initial, ChartKind,
    ChartSpec, HypothesisFailure, NodeSample, Surface, ValidationReport,
};
