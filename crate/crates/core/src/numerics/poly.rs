use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::finite;
use crate::error::Result;

/// Dense polynomial with ascending coefficients; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

/// Binary and unary coefficient operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolyOp {
    Add,
    Multiply,
    Scale(Complex64),
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(value: Complex64) -> Self {
        Self::new(vec![value])
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, &r| {
            &acc * &Self::new(vec![-r, Complex64::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    /// Plain Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        finite(self.horner(z), "polynomial evaluation")
    }

    pub(crate) fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Horner evaluation with error-free transformations, roughly doubling the working precision.
    pub fn eval_compensated(&self, z: Complex64) -> Result<Complex64> {
        finite(self.horner_compensated(z), "compensated polynomial evaluation")
    }

    pub(crate) fn horner_compensated(&self, z: Complex64) -> Complex64 {
        let Some((&last, rest)) = self.coeffs.split_last() else {
            return Complex64::new(0.0, 0.0);
        };
        let mut s = last;
        let mut correction = Complex64::new(0.0, 0.0);
        for &a in rest.iter().rev() {
            let (p, perr) = two_prod_complex(s, z);
            let (sum, serr) = two_sum_complex(p, a);
            s = sum;
            correction = correction * z + perr + serr;
        }
        s + correction
    }

    /// Value and first derivative by a joint Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn apply(&self, other: &Self, op: PolyOp) -> Self {
        match op {
            PolyOp::Add => self + other,
            PolyOp::Multiply => self * other,
            PolyOp::Scale(k) => self.scale(k),
        }
    }

    /// Largest coefficient modulus; used as a scale for residual checks.
    pub fn max_coefficient(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn two_sum_complex(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let (re, ere) = two_sum(a.re, b.re);
    let (im, eim) = two_sum(a.im, b.im);
    (Complex64::new(re, im), Complex64::new(ere, eim))
}

fn two_prod_complex(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let (p1, e1) = two_prod(a.re, b.re);
    let (p2, e2) = two_prod(a.im, b.im);
    let (p3, e3) = two_prod(a.re, b.im);
    let (p4, e4) = two_prod(a.im, b.re);
    let (re, e5) = two_sum(p1, -p2);
    let (im, e6) = two_sum(p3, p4);
    (Complex64::new(re, im), Complex64::new(e1 - e2 + e5, e3 + e4 + e6))
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn add(self, rhs: Self) -> ComplexPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        ComplexPolynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + rhs.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn neg(self) -> ComplexPolynomial {
        ComplexPolynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn sub(self, rhs: Self) -> ComplexPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn mul(self, rhs: Self) -> ComplexPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPolynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_polynomial_is_empty() {
        let p = ComplexPolynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert_eq!(p.eval(c(2.0, 1.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn constant_evaluates_exactly() {
        let p = ComplexPolynomial::from_real(&[5.0]);
        assert_eq!(p.eval(c(123.4, -7.0)).unwrap(), c(5.0, 0.0));
    }

    #[test]
    fn known_root() {
        let p = ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn product_of_linear_factors() {
        let a = ComplexPolynomial::from_real(&[1.0, 1.0]);
        let b = ComplexPolynomial::from_real(&[-1.0, 1.0]);
        assert_eq!(a.apply(&b, PolyOp::Multiply), ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn adding_zero_is_identity() {
        let p = ComplexPolynomial::new(vec![c(1.0, 2.0), c(0.0, -3.0)]);
        assert_eq!(p.apply(&ComplexPolynomial::zero(), PolyOp::Add), p);
    }

    #[test]
    fn unit_scaling_preserves_moduli() {
        let lambda = Complex64::from_polar(1.0, 0.7);
        let p = ComplexPolynomial::new(vec![c(0.5, 0.0), c(-1.0 / 6.0, 0.0)]);
        let q = p.apply(&p, PolyOp::Scale(lambda));
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
            assert!((a * lambda - b).norm() < 1e-15);
        }
    }

    #[test]
    fn cancellation_normalizes_degree() {
        let p = ComplexPolynomial::from_real(&[1.0, 2.0, 3.0]);
        let q = ComplexPolynomial::from_real(&[0.0, 0.0, 3.0]);
        assert_eq!((&p - &q).degree(), Some(1));
    }

    #[test]
    fn non_finite_evaluation_is_an_error() {
        let p = ComplexPolynomial::from_real(&[0.0, 0.0, 0.0, 1e300]);
        assert!(p.eval(c(1e10, 0.0)).is_err());
    }

    #[test]
    fn compensated_beats_plain_near_a_cluster() {
        // (z-1)^12 expanded; plain Horner loses most digits near z = 1
        let p = ComplexPolynomial::from_roots(&[c(1.0, 0.0); 12]);
        let z = c(1.001, 0.0);
        let exact = 1e-36;
        let plain = (p.eval(z).unwrap().re - exact).abs();
        let comp = (p.eval_compensated(z).unwrap().re - exact).abs();
        assert!(comp < plain);
        assert!(comp < 1e-25);
    }

    #[test]
    fn derivative_matches_joint_evaluation() {
        let p = ComplexPolynomial::new(vec![c(1.0, 1.0), c(-2.0, 0.5), c(0.0, 3.0), c(4.0, 0.0)]);
        let z = c(0.3, -1.2);
        let (_, dp) = p.eval_with_derivative(z);
        assert!((p.derivative().eval(z).unwrap() - dp).norm() < 1e-13);
    }

    fn arb_poly() -> impl Strategy<Value = ComplexPolynomial> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..8)
            .prop_map(|v| ComplexPolynomial::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn add_degree_bound(p in arb_poly(), q in arb_poly()) {
            let s = &p + &q;
            prop_assert!(s.degree() <= p.degree().max(q.degree()));
        }

        #[test]
        fn multiply_degree_is_additive(p in arb_poly(), q in arb_poly()) {
            prop_assume!(!p.is_zero() && !q.is_zero());
            prop_assert_eq!((&p * &q).degree(), Some(p.degree().unwrap() + q.degree().unwrap()));
        }

        #[test]
        fn product_evaluates_pointwise(p in arb_poly(), q in arb_poly(), re in -1.5f64..1.5, im in -1.5f64..1.5) {
            let z = c(re, im);
            let lhs = (&p * &q).eval(z).unwrap();
            let rhs = p.eval(z).unwrap() * q.eval(z).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
        }
    }
}
