//! Numerical toolkit for the critically marked cubic Siegel family
//! `P_c(z) = λz + Az² + Bz³` with critical points `1` and `c`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: complex polynomials, truncated power series, simultaneous root finding.
//! * [`family`]: rotation numbers, the two cubic slices and orbit iteration.
//! * [`siegel`]: linearization series, Siegel-disk boundaries and the linearizing coordinate.
//! * [`classify`]: orbit and parameter verdicts.
//! * [`capture`]: the capture-center tower, parameter rays, component traces and the Zakeri curve.
//! * [`render`]: tiled parameter-plane and dynamical-plane images.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod capture;
pub mod classify;
pub mod error;
pub mod family;
pub mod numerics;
pub mod render;
pub mod siegel;

pub use error::{Error, Result};
pub use num_complex::Complex64;
