use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RotationNumber;
use crate::error::{Error, Result};

/// Which normal form a map belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slice {
    /// `P_c(z) = λz − λ(1+1/c)/2·z² + λ/(3c)·z³`, critical points `1` and `c`.
    C,
    /// `f_a(z) = λz + az² + z³`.
    A,
}

/// One cubic `z ↦ λz + qz² + kz³` with a Siegel fixed point at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicSiegelMap {
    slice: Slice,
    parameter: Complex64,
    theta: f64,
    multiplier: Complex64,
    quadratic: Complex64,
    cubic: Complex64,
    critical: [Complex64; 2],
}

impl CubicSiegelMap {
    /// The critically marked map `P_c`.
    pub fn c_plane(theta: &RotationNumber, c: Complex64) -> Result<Self> {
        check_parameter(c)?;
        if c == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroParameter);
        }
        let lambda = theta.multiplier();
        Ok(Self {
            slice: Slice::C,
            parameter: c,
            theta: theta.value(),
            multiplier: lambda,
            quadratic: -lambda * (1.0 + c.inv()) / 2.0,
            cubic: lambda / (3.0 * c),
            critical: [Complex64::new(1.0, 0.0), c],
        })
    }

    /// The monic map `f_a`.
    pub fn a_plane(theta: &RotationNumber, a: Complex64) -> Result<Self> {
        check_parameter(a)?;
        let lambda = theta.multiplier();
        let root = (a * a - 3.0 * lambda).sqrt();
        Ok(Self {
            slice: Slice::A,
            parameter: a,
            theta: theta.value(),
            multiplier: lambda,
            quadratic: a,
            cubic: Complex64::new(1.0, 0.0),
            critical: [(-a + root) / 3.0, (-a - root) / 3.0],
        })
    }

    pub fn slice(&self) -> Slice {
        self.slice
    }

    pub fn parameter(&self) -> Complex64 {
        self.parameter
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn multiplier(&self) -> Complex64 {
        self.multiplier
    }

    /// Expanded coefficients `[0, λ, q, k]` in ascending order.
    pub fn coefficients(&self) -> [Complex64; 4] {
        [Complex64::new(0.0, 0.0), self.multiplier, self.quadratic, self.cubic]
    }

    pub fn quadratic(&self) -> Complex64 {
        self.quadratic
    }

    pub fn cubic(&self) -> Complex64 {
        self.cubic
    }

    /// The two critical points; `[1, c]` in the c-plane.
    pub fn critical_points(&self) -> [Complex64; 2] {
        self.critical
    }

    #[inline]
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        z * (self.multiplier + z * (self.quadratic + z * self.cubic))
    }

    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.multiplier + z * (2.0 * self.quadratic + 3.0 * z * self.cubic)
    }

    /// Derivative from the critical-point factorisation `3k(z − x₁)(z − x₂)`.
    pub fn derivative_factored(&self, z: Complex64) -> Complex64 {
        3.0 * self.cubic * (z - self.critical[0]) * (z - self.critical[1])
    }
}

fn check_parameter(p: Complex64) -> Result<()> {
    if p.re.is_finite() && p.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("map parameter"))
    }
}

/// `η(c) = (3λ/4)(c + 1/c + 2)`, the value of `a²` for the conjugate monic map.
pub fn eta(theta: &RotationNumber, c: Complex64) -> Result<Complex64> {
    if c == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroParameter);
    }
    Ok(0.75 * theta.multiplier() * (c + c.inv() + 2.0))
}

/// Both solutions `c` of `η(c) = a²`; their product is 1. The first has modulus ≥ 1.
pub fn a_to_c(theta: &RotationNumber, a: Complex64) -> (Complex64, Complex64) {
    let lambda = theta.multiplier();
    let b = 6.0 * lambda - 4.0 * a * a;
    let disc_sq = b * b - 36.0 * lambda * lambda;
    if disc_sq.norm() <= 1e-13 * (b.norm_sqr() + 36.0) {
        let c = -b / (6.0 * lambda);
        return (c, c);
    }
    let disc = disc_sq.sqrt();
    let q = if (b + disc).norm() >= (b - disc).norm() { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
    (q / (3.0 * lambda), 3.0 * lambda / q)
}

/// `(u, a)` with `u² = λ/(3c)` on the principal branch and `f_a(u·z) = u·P_c(z)`.
pub fn conjugacy_witness(theta: &RotationNumber, c: Complex64) -> Result<(Complex64, Complex64)> {
    if c == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroParameter);
    }
    let lambda = theta.multiplier();
    let u = (lambda / (3.0 * c)).sqrt();
    let a = -lambda * (1.0 + c.inv()) / (2.0 * u);
    Ok((u, a))
}
