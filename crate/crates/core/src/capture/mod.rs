//! Parameter-space tools: the capture-center tower, the parameter map `Φ`,
//! parameter rays, component boundary traces and the Zakeri curve.

mod phi;
mod quasicircle;
mod rays;
mod tower;
mod trace;
mod zakeri;

pub use phi::{param_map_phi, ParameterMap};
pub use quasicircle::quasicircle_diagnostic;
pub use rays::{landing_anchors, trace_parameter_ray, RayOptions, RayTrace};
pub use tower::{
    capture_centers, capture_polys, expected_degree, write_centers_csv, CapturePolynomialTower, CensusLevel, CensusReport, Center,
    MAX_LEVEL,
};
pub use trace::{trace_component_boundary, ComponentTrace, TraceOptions};
pub use zakeri::{trace_zakeri, ZakeriOptions, ZakeriTrace};

/// Parameters of the connectedness locus satisfy `1/30 < |c| < 30`.
pub const ANNULUS_INNER: f64 = 1.0 / 30.0;
pub const ANNULUS_OUTER: f64 = 30.0;

pub fn in_annulus(c: num_complex::Complex64) -> bool {
    let r = c.norm();
    r > ANNULUS_INNER && r < ANNULUS_OUTER
}
