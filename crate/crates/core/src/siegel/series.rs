use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{CubicSiegelMap, Slice};
use crate::numerics::{radius_from_indices, radius_of_convergence, PowerSeries};

const PREPASS_TERMS: usize = 64;
const MIDPASS_TERMS: usize = 512;

/// Linearization `ψ` with `ψ(λw) = P(ψ(w))`, `ψ'(0) = 1`, truncated after `M` terms.
pub fn linearization_series(map: &CubicSiegelMap, terms: usize) -> Result<PowerSeries> {
    if terms < 32 {
        return Err(Error::InvalidArgument(format!("at least 32 series terms required, got {terms}")));
    }
    let initial = match map.slice() {
        Slice::C => map.parameter().norm().min(1.0),
        Slice::A => 1.0,
    };
    let pre = series_with_scale(map, terms.min(PREPASS_TERMS), initial)?;
    if terms <= PREPASS_TERMS {
        return Ok(pre);
    }
    let mut scale = conformal_radius(&pre, map.theta())?;
    if terms > MIDPASS_TERMS {
        let mid = series_with_scale(map, MIDPASS_TERMS, scale)?;
        scale = conformal_radius(&mid, map.theta())?;
    }
    series_with_scale(map, terms, scale)
}

/// The recursion run directly on `b_n = a_n · scaleⁿ⁻¹`.
pub fn series_with_scale(map: &CubicSiegelMap, terms: usize, scale: f64) -> Result<PowerSeries> {
    let quad = map.quadratic() * scale;
    let cubic = map.cubic() * scale * scale;
    let lambda = map.multiplier();
    let theta = map.theta();
    let zero = Complex64::new(0.0, 0.0);
    // b[k] holds b_{k+1}; sq[k] holds the coefficient of w^{k+1} in g²
    let mut b = vec![zero; terms];
    let mut sq = vec![zero; terms];
    b[0] = Complex64::new(1.0, 0.0);
    for n in 2..=terms {
        let square = convolve(&b[..n - 1]);
        sq[n - 1] = square;
        let cube = dot_reversed(&b[..n - 2], &sq[1..n - 1]);
        let angle = std::f64::consts::TAU * (n as f64 * theta).fract();
        let divisor = Complex64::new(angle.cos(), angle.sin()) - lambda;
        let gap = divisor.norm();
        if gap < 1e-14 {
            return Err(Error::Resonance { n, gap });
        }
        let value = (quad * square + cubic * cube) / divisor;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite("linearization coefficients"));
        }
        b[n - 1] = value;
    }
    Ok(PowerSeries::with_scale(scale, b))
}

/// `Σ_{i+j=n} x_i x_j` for the next index `n = x.len() + 1` (1-based coefficients).
fn convolve(x: &[Complex64]) -> Complex64 {
    let m = x.len();
    let half = m / 2;
    let mut acc = dot_reversed(&x[..half], &x[m - half..]) * 2.0;
    if m % 2 == 1 {
        acc += x[half] * x[half];
    }
    acc
}

/// `Σ_k x[k] · y[len−1−k]`.
#[inline]
fn dot_reversed(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    let (mut re0, mut im0, mut re1, mut im1) = (0.0, 0.0, 0.0, 0.0);
    let mut pairs = x.chunks_exact(2).zip(y.rchunks_exact(2));
    for (a, b) in &mut pairs {
        re0 += a[0].re * b[1].re - a[0].im * b[1].im;
        im0 += a[0].re * b[1].im + a[0].im * b[1].re;
        re1 += a[1].re * b[0].re - a[1].im * b[0].im;
        im1 += a[1].re * b[0].im + a[1].im * b[0].re;
    }
    let mut acc = Complex64::new(re0 + re1, im0 + im1);
    if x.len() % 2 == 1 {
        acc += x[x.len() - 1] * y[0];
    }
    acc
}

/// Indices `n` with nonzero coefficient whose small divisor `‖(n−1)θ‖` is a new record.
pub fn record_indices(series: &PowerSeries, theta: f64) -> Vec<usize> {
    let b = series.normalized();
    let mut envelope: f64 = 0.0;
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for n in 2..=b.len() {
        let m = b[n - 1].norm();
        envelope = envelope.max(m);
        if m <= 1e-30 * envelope {
            continue;
        }
        let x = (n as f64 - 1.0) * theta;
        let d = (x - x.round()).abs();
        if d < best {
            best = d;
            out.push(n);
        }
    }
    out
}

/// Conformal radius estimate for a linearization series of rotation number `theta`.
///
/// The coefficient spikes sit at small-divisor records; a fit of `ln|a_n|` over the
/// last records is far less biased than a plain tail estimate. Falls back to
/// [`radius_of_convergence`] when too few records exist or the fit is poor.
pub fn conformal_radius(series: &PowerSeries, theta: f64) -> Result<f64> {
    let records: Vec<usize> = record_indices(series, theta).into_iter().filter(|&n| n >= 8).collect();
    if records.len() >= 4 {
        let window = &records[records.len().saturating_sub(6)..];
        if let Ok((rho, beta, rms)) = radius_from_indices(series, window) {
            if (-4.0..=2.0).contains(&beta) && rms < 0.5 && rho.is_finite() && rho > 0.0 {
                return Ok(rho);
            }
        }
    }
    if series.order() >= 32 {
        radius_of_convergence(series)
    } else {
        Err(Error::SeriesTooShort(format!("{} terms", series.order())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::RotationNumber;

    fn map(c: Complex64) -> CubicSiegelMap {
        CubicSiegelMap::c_plane(&RotationNumber::golden(), c).unwrap()
    }

    #[test]
    fn first_coefficients() {
        let m = map(Complex64::new(3.0, 0.0));
        let s = linearization_series(&m, 256).unwrap();
        let lambda = m.multiplier();
        assert!((s.coefficient(1) - 1.0).norm() < 1e-15);
        let a2 = m.quadratic() / (lambda * lambda - lambda);
        assert!((s.coefficient(2) - a2).norm() < 1e-12 * a2.norm());
    }

    #[test]
    fn scale_does_not_change_coefficients() {
        let m = map(Complex64::new(1.3, 0.4));
        let a = series_with_scale(&m, 80, 1.0).unwrap();
        let b = series_with_scale(&m, 80, 0.37).unwrap();
        for n in [1, 2, 10, 40, 80] {
            let (x, y) = (a.coefficient(n), b.coefficient(n));
            assert!((x - y).norm() < 1e-10 * x.norm(), "n = {n}");
        }
    }

    #[test]
    fn convolution_helpers_match_naive() {
        let x: Vec<Complex64> = (0..9).map(|k| Complex64::new(k as f64 * 0.3 - 1.0, (k * k) as f64 * 0.1)).collect();
        let naive: Complex64 = (0..9).map(|i| x[i] * x[8 - i]).sum();
        assert!((convolve(&x) - naive).norm() < 1e-12);
        let y: Vec<Complex64> = x.iter().map(|z| z * Complex64::new(0.5, 2.0)).collect();
        let naive: Complex64 = (0..9).map(|i| x[i] * y[8 - i]).sum();
        assert!((dot_reversed(&x, &y) - naive).norm() < 1e-12);
    }

    #[test]
    fn records_are_fibonacci_shifted() {
        let s = linearization_series(&map(Complex64::new(3.0, 0.0)), 256).unwrap();
        let rec = record_indices(&s, RotationNumber::golden().value());
        assert_eq!(rec, vec![2, 3, 4, 6, 9, 14, 22, 35, 56, 90, 145, 234]);
    }

    #[test]
    fn odd_series_at_minus_one() {
        let s = linearization_series(&map(Complex64::new(-1.0, 0.0)), 128).unwrap();
        assert_eq!(s.coefficient(2), Complex64::new(0.0, 0.0));
        assert!(conformal_radius(&s, RotationNumber::golden().value()).unwrap() > 0.0);
    }

    #[test]
    fn radius_stable_under_doubling() {
        let m = map(Complex64::new(3.0, 0.0));
        let theta = m.theta();
        let r1 = conformal_radius(&linearization_series(&m, 256).unwrap(), theta).unwrap();
        let r2 = conformal_radius(&linearization_series(&m, 512).unwrap(), theta).unwrap();
        assert!((r1 - r2).abs() < 0.05 * r2);
        let g1 = radius_of_convergence(&linearization_series(&m, 256).unwrap()).unwrap();
        let g2 = radius_of_convergence(&linearization_series(&m, 512).unwrap()).unwrap();
        assert!(g1 > 0.0 && (g1 - g2).abs() < 0.05 * g2);
    }
}
