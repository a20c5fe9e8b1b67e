use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated series `f(w) = Σ_{n=1}^{M} a_n wⁿ`, stored in scaled form.
///
/// The stored values are `b_n = a_n · scaleⁿ⁻¹`, so `f(w) = scale · Σ b_n (w/scale)ⁿ`.
/// Choosing `scale` near the radius of convergence keeps every `b_n` representable
/// even when `a_n` itself would overflow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    scale: f64,
    normalized: Vec<Complex64>,
}

impl PowerSeries {
    /// Series from plain coefficients `a_1..a_M`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { scale: 1.0, normalized: coeffs }
    }

    /// Series from scaled coefficients `b_n = a_n · scaleⁿ⁻¹`.
    pub fn with_scale(scale: f64, normalized: Vec<Complex64>) -> Self {
        assert!(scale > 0.0 && scale.is_finite(), "series scale must be positive");
        Self { scale, normalized }
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.normalized.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn normalized(&self) -> &[Complex64] {
        &self.normalized
    }

    /// Coefficient `a_n` for `1 ≤ n ≤ M`; may be non-finite when it exceeds the binary64 range.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        self.normalized[n - 1] * self.scale.powi(1 - n as i32)
    }

    /// `ln |a_n|`, finite whenever `a_n ≠ 0`.
    pub fn log_abs_coefficient(&self, n: usize) -> f64 {
        self.normalized[n - 1].norm().ln() - (n as f64 - 1.0) * self.scale.ln()
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let x = w / self.scale;
        let inner = self
            .normalized
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &b| acc * x + b);
        inner * x * self.scale
    }

    /// Value and derivative.
    pub fn eval_with_derivative(&self, w: Complex64) -> (Complex64, Complex64) {
        let x = w / self.scale;
        // g(x) = Σ b_n x^{n-1}; f = s·x·g, f' = g + x·g'
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        for &b in self.normalized.iter().rev() {
            dg = dg * x + g;
            g = g * x + b;
        }
        (g * x * self.scale, g + x * dg)
    }

    /// The series of `f(u·w)`.
    pub fn rotated(&self, u: Complex64) -> Self {
        let mut power = Complex64::new(1.0, 0.0);
        let normalized = self
            .normalized
            .iter()
            .map(|&b| {
                power *= u;
                b * power
            })
            .collect();
        Self { scale: self.scale, normalized }
    }
}

/// Generic tail estimate of `1 / limsup |a_n|^{1/n}`.
///
/// Uses the last quarter of the coefficients, split into four windows; each window
/// contributes its largest `|a_n|^{-1/n}` and the smallest window value is returned.
pub fn radius_of_convergence(series: &PowerSeries) -> Result<f64> {
    let m = series.order();
    if m < 32 {
        return Err(Error::SeriesTooShort(format!("{m} terms, at least 32 required")));
    }
    let start = m - m / 4 + 1;
    let values: Vec<f64> = (start..=m)
        .filter(|&n| series.normalized[n - 1] != Complex64::new(0.0, 0.0))
        .map(|n| -series.log_abs_coefficient(n) / n as f64)
        .collect();
    if values.is_empty() {
        return Err(Error::SeriesTooShort("all-zero tail".into()));
    }
    let window = (values.len() / 4).max(1);
    let best = values
        .chunks(window)
        .map(|w| w.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    Ok(best.exp())
}

/// Radius fitted from the coefficients at the given indices.
///
/// Fits `ln|a_n| = α + β ln n − n ln ρ` by least squares and returns `(ρ, β, rms)`.
/// Needs at least three distinct nonzero indices.
pub fn radius_from_indices(series: &PowerSeries, indices: &[usize]) -> Result<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = indices
        .iter()
        .filter(|&&n| n >= 1 && n <= series.order())
        .filter(|&&n| series.normalized[n - 1] != Complex64::new(0.0, 0.0))
        .map(|&n| (n as f64, series.log_abs_coefficient(n)))
        .collect();
    if pts.len() < 3 {
        return Err(Error::SeriesTooShort(format!("{} usable indices for the fit", pts.len())));
    }
    let rows: Vec<[f64; 3]> = pts.iter().map(|&(n, _)| [1.0, n.ln(), n]).collect();
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (row, &(_, y)) in rows.iter().zip(&pts) {
        for i in 0..3 {
            rhs[i] += row[i] * y;
            for j in 0..3 {
                normal[i][j] += row[i] * row[j];
            }
        }
    }
    let sol = solve3(normal, rhs)
        .ok_or_else(|| Error::SeriesTooShort("degenerate index set for the fit".into()))?;
    let rms = (rows
        .iter()
        .zip(&pts)
        .map(|(r, &(_, y))| {
            let e = sol[0] * r[0] + sol[1] * r[1] + sol[2] * r[2] - y;
            e * e
        })
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    let rho = (-sol[2]).exp();
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::NonFinite("radius fit"));
    }
    Ok((rho, sol[1], rms))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    // column scaling keeps the n and ln n columns comparable
    let scale: Vec<f64> = (0..3).map(|j| a[j][j].sqrt().max(f64::MIN_POSITIVE)).collect();
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] /= scale[i] * scale[j];
        }
        b[i] /= scale[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some([x[0] / scale[0], x[1] / scale[1], x[2] / scale[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geometric(ratio: f64, m: usize) -> PowerSeries {
        PowerSeries::new((1..=m).map(|n| Complex64::new(ratio.powi(n as i32), 0.0)).collect())
    }

    #[test]
    fn geometric_series_radius_one() {
        let r = radius_of_convergence(&geometric(1.0, 64)).unwrap();
        assert!((r - 1.0).abs() < 0.02);
    }

    #[test]
    fn doubling_series_radius_half() {
        let r = radius_of_convergence(&geometric(2.0, 64)).unwrap();
        assert!((r - 0.5).abs() < 0.01);
    }

    #[test]
    fn short_or_zero_series_rejected() {
        assert!(radius_of_convergence(&geometric(1.0, 16)).is_err());
        let zeros = PowerSeries::new(vec![Complex64::new(0.0, 0.0); 64]);
        assert!(matches!(radius_of_convergence(&zeros), Err(Error::SeriesTooShort(_))));
    }

    #[test]
    fn scaled_storage_matches_plain() {
        let plain = geometric(3.0, 40);
        let scaled = PowerSeries::with_scale(
            1.0 / 3.0,
            (1..=40).map(|_| Complex64::new(3.0, 0.0)).collect(),
        );
        let w = Complex64::new(0.1, 0.05);
        assert!((plain.eval(w) - scaled.eval(w)).norm() < 1e-12);
        assert!((plain.coefficient(7) - scaled.coefficient(7)).norm() < 1e-9);
        let (v, d) = scaled.eval_with_derivative(w);
        let h = 1e-6;
        let fd = (scaled.eval(w + h) - scaled.eval(w - h)) / (2.0 * h);
        assert!((v - plain.eval(w)).norm() < 1e-12);
        assert!((d - fd).norm() < 1e-6);
    }

    #[test]
    fn fit_recovers_exact_model() {
        let rho: f64 = 0.7;
        let coeffs = (1..=200)
            .map(|n| Complex64::new(2.0 * (n as f64).powf(-1.0) * rho.powi(-n), 0.0))
            .collect();
        let s = PowerSeries::new(coeffs);
        let (r, beta, rms) = radius_from_indices(&s, &[10, 30, 60, 100, 150, 200]).unwrap();
        assert!((r - rho).abs() < 1e-10);
        assert!((beta + 1.0).abs() < 1e-8);
        assert!(rms < 1e-9);
    }

    proptest! {
        #[test]
        fn radius_invariant_under_rotation(t in 0.0f64..1.0, ratio in 0.5f64..2.0) {
            let s = PowerSeries::new((1..=64).map(|n| Complex64::new(ratio.powi(n) * (1.0 + 0.3 * (n as f64).sin()), 0.1)).collect());
            let u = Complex64::from_polar(1.0, std::f64::consts::TAU * t);
            let a = radius_of_convergence(&s).unwrap();
            let b = radius_of_convergence(&s.rotated(u)).unwrap();
            prop_assert!((a - b).abs() < 1e-12 * a);
        }
    }
}
