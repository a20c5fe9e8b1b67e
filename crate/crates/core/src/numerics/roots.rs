use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ComplexPolynomial;
use crate::error::{Error, Result};

/// One root returned by [`find_roots`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootEstimate {
    pub root: Complex64,
    /// `|p(root)|`, evaluated with compensated Horner.
    pub residual: f64,
    /// `|p'(root)|`.
    pub derivative_magnitude: f64,
    /// Another root lies closer than the cluster distance.
    pub clustered: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    pub step_tol: f64,
    pub cluster_distance: f64,
    pub polish_steps: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_sweeps: 1000, step_tol: 1e-13, cluster_distance: 1e-7, polish_steps: 10 }
    }
}

const PARALLEL_DEGREE: usize = 64;

/// All roots of `p` by Aberth–Ehrlich iteration followed by Newton polishing.
pub fn find_roots(p: &ComplexPolynomial, tol: f64) -> Result<Vec<RootEstimate>> {
    find_roots_with(p, &RootOptions { tol, ..RootOptions::default() })
}

pub fn find_roots_with(p: &ComplexPolynomial, opts: &RootOptions) -> Result<Vec<RootEstimate>> {
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::InvalidArgument("root finding needs degree ≥ 1".into())),
    };
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("polynomial coefficients"));
    }
    let dp = p.derivative();
    find_roots_of(degree, initial_guesses(p), |z| (p.horner_compensated(z), dp.horner_compensated(z)), opts)
}

/// Aberth–Ehrlich iteration for a degree-`degree` polynomial given only through
/// `eval(z) = (p(z), p'(z))`, starting from `guesses`.
pub fn find_roots_of<F>(degree: usize, guesses: Vec<Complex64>, eval: F, opts: &RootOptions) -> Result<Vec<RootEstimate>>
where
    F: Fn(Complex64) -> (Complex64, Complex64) + Sync,
{
    if guesses.len() != degree || degree == 0 {
        return Err(Error::InvalidArgument(format!("{} starting points for degree {degree}", guesses.len())));
    }
    let mut roots = guesses;
    let mut done = vec![false; degree];

    let mut sweeps = 0;
    while sweeps < opts.max_sweeps && done.iter().any(|d| !d) {
        sweeps += 1;
        let current = &roots;
        let update = |i: usize| -> (Complex64, bool) {
            let z = current[i];
            if done[i] {
                return (z, true);
            }
            let (value, slope) = eval(z);
            if value == Complex64::new(0.0, 0.0) {
                return (z, true);
            }
            let repulsion: Complex64 = current
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (z - zj).inv())
                .sum();
            let denom = slope - value * repulsion;
            if denom.norm() == 0.0 || !denom.re.is_finite() || !denom.im.is_finite() {
                // nudge off a degenerate configuration
                return (z + Complex64::new(1e-8, 1e-8) * (1.0 + z.norm()), false);
            }
            let step = value / denom;
            let next = z - step;
            (next, step.norm() < opts.step_tol * (1.0 + next.norm()))
        };
        let results: Vec<(Complex64, bool)> = if degree >= PARALLEL_DEGREE {
            (0..degree).into_par_iter().map(update).collect()
        } else {
            (0..degree).map(update).collect()
        };
        for (i, (z, converged)) in results.into_iter().enumerate() {
            roots[i] = z;
            done[i] = converged;
        }
        if roots.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("root iteration"));
        }
    }

    let polished: Vec<(Complex64, f64)> = roots.iter().map(|&z| polish(&eval, z, opts.polish_steps)).collect();
    let failing: Vec<usize> = polished
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| !(*r < opts.tol))
        .map(|(i, _)| i)
        .collect();
    if !failing.is_empty() {
        return Err(Error::RootsNotConverged { sweeps, indices: failing });
    }

    let out = polished
        .iter()
        .enumerate()
        .map(|(i, &(z, residual))| RootEstimate {
            root: z,
            residual,
            derivative_magnitude: eval(z).1.norm(),
            clustered: polished
                .iter()
                .enumerate()
                .any(|(j, &(w, _))| j != i && (z - w).norm() < opts.cluster_distance),
        })
        .collect();
    Ok(out)
}

fn polish<F>(eval: &F, z0: Complex64, steps: usize) -> (Complex64, f64)
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let (mut value, mut slope) = eval(z0);
    let mut best = (z0, value.norm());
    let mut z = z0;
    for _ in 0..steps {
        if slope.norm() == 0.0 {
            break;
        }
        z -= value / slope;
        (value, slope) = eval(z);
        let r = value.norm();
        if !r.is_finite() {
            break;
        }
        if r < best.1 {
            best = (z, r);
        }
        if r == 0.0 {
            break;
        }
    }
    best
}

/// Starting points on circles whose radii come from the upper convex hull of `(k, ln|a_k|)`.
pub fn initial_guesses(p: &ComplexPolynomial) -> Vec<Complex64> {
    let coeffs = p.coeffs();
    let degree = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| (k, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            let cross = (k2 as f64 - k1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut guesses = Vec::with_capacity(degree);
    // roots at zero for missing low-order coefficients
    let zeros = hull[0].0;
    for k in 0..zeros {
        guesses.push(Complex64::from_polar(1e-12, k as f64));
    }
    for (idx, pair) in hull.windows(2).enumerate() {
        let (k1, y1) = pair[0];
        let (k2, y2) = pair[1];
        let count = k2 - k1;
        let radius = ((y1 - y2) / count as f64).exp();
        let offset = 0.4 + 0.7 * idx as f64;
        for j in 0..count {
            let angle = std::f64::consts::TAU * j as f64 / count as f64 + offset;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}
