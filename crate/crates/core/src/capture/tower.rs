use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::in_annulus;
use crate::error::{Error, Result};
use crate::family::RotationNumber;
use crate::numerics::{find_roots_of, format_complex, find_roots_with, initial_guesses, ComplexPolynomial, RootOptions};

/// Highest supported level; `deg G_6 = 364`.
pub const MAX_LEVEL: usize = 6;

const MATCH_DISTANCE: f64 = 1e-7;
const MIN_DERIVATIVE: f64 = 1e-6;
const ROOT_RESIDUAL: f64 = 1e-8;

/// Polynomials `G_1..G_L` with `P_c^ℓ(c) = c·G_ℓ(c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapturePolynomialTower {
    pub theta: RotationNumber,
    polys: Vec<ComplexPolynomial>,
    /// Level whose coefficients no longer match the dynamics; its roots are taken from the coefficients alone.
    perturbed: Option<usize>,
}

/// A capture-component center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub level: usize,
    pub c: Complex64,
    pub residual: f64,
    pub derivative_magnitude: f64,
}

/// Per-level summary of a census run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusLevel {
    pub level: usize,
    pub degree: usize,
    pub expected_degree: usize,
    pub count: usize,
    pub expected_count: usize,
    pub max_residual: f64,
    pub min_derivative: f64,
    pub min_separation: f64,
    pub constant_term_modulus: f64,
    /// `max |G_ℓ(r)|` over the roots `r` of `G_{ℓ−1}`.
    pub divisibility_residual: f64,
    pub all_in_annulus: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub theta: String,
    pub levels: Vec<CensusLevel>,
    pub centers: Vec<Vec<Center>>,
}

impl CapturePolynomialTower {
    /// Builds `G_1 = λ(3 − c)/6` and `G_ℓ = λ G (1 − (1 + c) G/2 + c G²/3)` with `G = G_{ℓ−1}`.
    pub fn build(theta: &RotationNumber, levels: usize) -> Result<Self> {
        if !(1..=MAX_LEVEL).contains(&levels) {
            return Err(Error::InvalidArgument(format!("level must be in 1..={MAX_LEVEL}, got {levels}")));
        }
        let lambda = theta.multiplier();
        let one = ComplexPolynomial::constant(Complex64::new(1.0, 0.0));
        let c = ComplexPolynomial::identity();
        let one_plus_c = &one + &c;
        let mut polys = vec![ComplexPolynomial::new(vec![lambda / 2.0, -lambda / 6.0])];
        for level in 2..=levels {
            let g = polys.last().unwrap();
            let g2 = g * g;
            let linear = (&one_plus_c * g).scale(Complex64::new(-0.5, 0.0));
            let quadratic = (&c * &g2).scale(Complex64::new(1.0 / 3.0, 0.0));
            let factor = &(&one + &linear) + &quadratic;
            let next = (g * &factor).scale(lambda);
            let expected = expected_degree(level);
            if next.degree() != Some(expected) {
                return Err(Error::Internal(format!(
                    "G_{level} has degree {:?}, expected {expected}",
                    next.degree()
                )));
            }
            polys.push(next);
        }
        Ok(Self { theta: theta.clone(), polys, perturbed: None })
    }

    pub fn levels(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[ComplexPolynomial] {
        &self.polys
    }

    /// `G_level`, 1-based.
    pub fn poly(&self, level: usize) -> &ComplexPolynomial {
        &self.polys[level - 1]
    }

    /// Copy with `eps` added to the constant term of `G_level`; used to exercise census failures.
    pub fn perturbed(&self, level: usize, eps: f64) -> Self {
        let mut out = self.clone();
        let mut coeffs = out.polys[level - 1].coeffs().to_vec();
        coeffs[0] += eps;
        out.polys[level - 1] = ComplexPolynomial::new(coeffs);
        out.perturbed = Some(level);
        out
    }

    /// Centers per level: roots of `G_ℓ` not shared with `G_{ℓ−1}`, with all census checks applied.
    pub fn census(&self) -> Result<CensusReport> {
        let opts = RootOptions { tol: ROOT_RESIDUAL, ..RootOptions::default() };
        let mut previous: Vec<Complex64> = Vec::new();
        let mut levels = Vec::new();
        let mut centers = Vec::new();
        for (idx, poly) in self.polys.iter().enumerate() {
            let level = idx + 1;
            let fail = |reason: String| Error::Census { level, reason };
            let lambda = self.theta.multiplier();
            let dynamical = self.perturbed != Some(level);
            let roots = if dynamical {
                let degree = poly.degree().unwrap_or(0);
                find_roots_of(degree, initial_guesses(poly), |c| dynamical_value(lambda, level, c), &opts)
            } else {
                find_roots_with(poly, &opts)
            }
            .map_err(|e| fail(e.to_string()))?;
            let residual_at = |c: Complex64| {
                if dynamical {
                    dynamical_value(lambda, level, c).0.norm()
                } else {
                    poly.eval_compensated(c).map(|v| v.norm()).unwrap_or(f64::INFINITY)
                }
            };
            if let Some(r) = roots.iter().find(|r| r.clustered) {
                return Err(fail(format!("root cluster near {}", r.root)));
            }
            let divisibility_residual = previous
                .iter()
                .map(|&r| residual_at(r))
                .fold(0.0, f64::max);
            let mut taken = vec![false; roots.len()];
            for &old in &previous {
                let nearest = roots
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !taken[*i])
                    .min_by(|a, b| (a.1.root - old).norm().total_cmp(&(b.1.root - old).norm()));
                match nearest {
                    Some((i, r)) if (r.root - old).norm() < MATCH_DISTANCE => taken[i] = true,
                    other => {
                        let gap = other.map_or(f64::INFINITY, |(_, r)| (r.root - old).norm());
                        return Err(fail(format!(
                            "root {} of G_{} has no partner in G_{level} (nearest at distance {gap:.3e})",
                            format_complex(old, 12),
                            level - 1
                        )));
                    }
                }
            }
            let mut fresh: Vec<Center> = roots
                .iter()
                .zip(&taken)
                .filter(|(_, &t)| !t)
                .map(|(r, _)| Center { level, c: r.root, residual: r.residual, derivative_magnitude: r.derivative_magnitude })
                .collect();
            fresh.sort_by(|a, b| a.c.re.total_cmp(&b.c.re).then(a.c.im.total_cmp(&b.c.im)));
            let expected_count = 3usize.pow(level as u32 - 1);
            if fresh.len() != expected_count {
                return Err(fail(format!("{} new centers, expected {expected_count}", fresh.len())));
            }
            let min_derivative = fresh.iter().map(|c| c.derivative_magnitude).fold(f64::INFINITY, f64::min);
            if min_derivative <= MIN_DERIVATIVE {
                return Err(fail(format!("non-simple center: |G'| = {min_derivative:e}")));
            }
            let all_in_annulus = fresh.iter().all(|c| in_annulus(c.c));
            if !all_in_annulus {
                return Err(fail("center outside the annulus 1/30 < |c| < 30".into()));
            }
            let min_separation = roots
                .iter()
                .enumerate()
                .flat_map(|(i, a)| roots[i + 1..].iter().map(move |b| (a.root - b.root).norm()))
                .fold(f64::INFINITY, f64::min);
            if min_separation < MATCH_DISTANCE {
                return Err(fail(format!("root pair closer than {MATCH_DISTANCE:e}")));
            }
            let max_residual = roots.iter().map(|r| r.residual).fold(0.0, f64::max);
            if !(max_residual < ROOT_RESIDUAL) {
                return Err(fail(format!("root residual {max_residual:e}")));
            }
            levels.push(CensusLevel {
                level,
                degree: poly.degree().unwrap_or(0),
                expected_degree: expected_degree(level),
                count: fresh.len(),
                expected_count,
                max_residual,
                min_derivative,
                min_separation,
                constant_term_modulus: poly.coeffs().first().map(|c| c.norm()).unwrap_or(0.0),
                divisibility_residual,
                all_in_annulus,
            });
            previous = roots.iter().map(|r| r.root).collect();
            centers.push(fresh);
        }
        Ok(CensusReport { theta: self.theta.to_string(), levels, centers })
    }
}

/// `G_ℓ(c)` and `G_ℓ'(c)` by iterating `P_c` with forward-mode differentiation in `c`;
/// far better conditioned than the expanded coefficients.
fn dynamical_value(lambda: Complex64, level: usize, c: Complex64) -> (Complex64, Complex64) {
    let inv = c.inv();
    let quad = -lambda * (1.0 + inv) / 2.0;
    let cubic = lambda * inv / 3.0;
    let dquad = lambda * inv * inv / 2.0;
    let dcubic = -lambda * inv * inv / 3.0;
    let (mut z, mut dz) = (c, Complex64::new(1.0, 0.0));
    for _ in 0..level {
        let slope = lambda + z * (2.0 * quad + 3.0 * cubic * z);
        let partial = z * z * (dquad + dcubic * z);
        dz = slope * dz + partial;
        z = z * (lambda + z * (quad + cubic * z));
    }
    (z * inv, (dz - z * inv) * inv)
}

/// `(3^ℓ − 1)/2`.
pub fn expected_degree(level: usize) -> usize {
    (3usize.pow(level as u32) - 1) / 2
}

pub fn capture_polys(theta: &RotationNumber, levels: usize) -> Result<CapturePolynomialTower> {
    CapturePolynomialTower::build(theta, levels)
}

/// Centers of levels `1..=levels`.
pub fn capture_centers(theta: &RotationNumber, levels: usize) -> Result<Vec<Vec<Center>>> {
    Ok(capture_polys(theta, levels)?.census()?.centers)
}

/// CSV with columns `level,re,im,residual,derivative_magnitude`.
pub fn write_centers_csv<W: Write>(centers: &[Vec<Center>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "level,re,im,residual,derivative_magnitude")?;
    for c in centers.iter().flatten() {
        writeln!(out, "{},{:.17e},{:.17e},{:.6e},{:.6e}", c.level, c.c.re, c.c.im, c.residual, c.derivative_magnitude)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> RotationNumber {
        RotationNumber::golden()
    }

    #[test]
    fn first_polynomial() {
        let t = capture_polys(&golden(), 1).unwrap();
        let l = golden().multiplier();
        let g = t.poly(1).coeffs();
        assert!((g[0] - l / 2.0).norm() < 1e-15 && (g[1] + l / 6.0).norm() < 1e-15);
        assert!(t.poly(1).eval(Complex64::new(3.0, 0.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn degrees_follow_formula() {
        let t = capture_polys(&golden(), 5).unwrap();
        let d: Vec<usize> = t.polys().iter().map(|p| p.degree().unwrap()).collect();
        assert_eq!(d, vec![1, 4, 13, 40, 121]);
    }

    #[test]
    fn tower_matches_direct_iteration() {
        let theta = golden();
        let t = capture_polys(&theta, 3).unwrap();
        for c in [Complex64::new(0.7, -1.2), Complex64::new(2.5, 0.3)] {
            let map = crate::family::CubicSiegelMap::c_plane(&theta, c).unwrap();
            let mut z = c;
            for level in 1..=3 {
                z = map.evaluate(z);
                let g = t.poly(level).eval(c).unwrap();
                assert!((z - c * g).norm() < 1e-10 * (1.0 + z.norm()), "level {level}");
            }
        }
    }

    #[test]
    fn level_limits() {
        assert!(capture_polys(&golden(), 0).is_err());
        assert!(capture_polys(&golden(), 7).is_err());
    }

    #[test]
    fn small_census() {
        let report = capture_polys(&golden(), 3).unwrap().census().unwrap();
        let counts: Vec<usize> = report.levels.iter().map(|l| l.count).collect();
        assert_eq!(counts, vec![1, 3, 9]);
        assert!((report.centers[0][0].c - Complex64::new(3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn perturbed_tower_fails_census() {
        let tower = capture_polys(&golden(), 3).unwrap().perturbed(2, 1e-3);
        assert!(matches!(tower.census(), Err(Error::Census { level: 3, .. }) | Err(Error::Census { level: 2, .. })));
    }

    #[test]
    fn csv_layout() {
        let centers = capture_centers(&golden(), 2).unwrap();
        let mut buf = Vec::new();
        write_centers_csv(&centers, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "level,re,im,residual,derivative_magnitude");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1,3.0000000000000"));
    }
}
