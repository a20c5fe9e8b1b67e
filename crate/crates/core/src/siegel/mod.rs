//! Linearization of `P` at its Siegel fixed point, Siegel-disk boundaries,
//! membership tests and the normalized linearizing coordinate.

mod data;
mod series;
mod verdict;

pub use data::{
    in_siegel_disk, phi_eval, siegel_boundary, BoundaryExport, InteriorVerdict, LinearizationData,
    LinearizationOptions,
};
pub use series::{conformal_radius, linearization_series, record_indices, series_with_scale};
pub use verdict::{
    boundary_critical_point, boundary_critical_point_with, BoundaryCriticalVerdict, Verdict,
    DEFAULT_VERDICT_MAX_TERMS, DEFAULT_VERDICT_TOL,
};
