use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{CubicSiegelMap, RotationNumber};
use crate::siegel::{LinearizationData, LinearizationOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZakeriOptions {
    pub directions: usize,
    /// Series order used for every verdict during the search.
    pub terms: usize,
    /// Bisection stops once the bracket is narrower than this in `ln |c|`.
    pub bracket: f64,
}

impl Default for ZakeriOptions {
    fn default() -> Self {
        Self { directions: 64, terms: 512, bracket: 1e-4 }
    }
}

/// Closed polyline approximating the Zakeri curve, one vertex per resolved direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZakeriTrace {
    pub theta: String,
    pub points: Vec<Complex64>,
    /// Direction indices `k` (angle `k/N`) with a vertex.
    pub directions: Vec<usize>,
    /// Directions where no bracket was found.
    pub skipped: Vec<usize>,
}

/// Scan radii in `ln |c|`, symmetric about zero so that `c ↦ 1/c` maps the scan to itself.
const SCAN: [f64; 8] = [0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2];

/// Sign of `dist(1, ∂Δ) − dist(c, ∂Δ)`: negative when `1` is on the boundary.
fn side(theta: &RotationNumber, c: Complex64, opts: &LinearizationOptions) -> Option<f64> {
    let map = CubicSiegelMap::c_plane(theta, c).ok()?;
    let lin = LinearizationData::new(&map, opts).ok()?;
    let [one, other] = lin.critical_distances();
    Some(one - other)
}

/// Locates the Zakeri curve along `N` rays `arg c = 2πk/N` by bisection in `ln |c|`
/// between a parameter with `c` on the boundary and one with `1` on the boundary.
pub fn trace_zakeri(theta: &RotationNumber, opts: &ZakeriOptions) -> Result<ZakeriTrace> {
    if opts.directions < 32 {
        return Err(Error::InvalidArgument(format!("at least 32 directions required, got {}", opts.directions)));
    }
    let lin_opts = LinearizationOptions { terms: opts.terms, max_terms: opts.terms.max(2048), refine: None, ..LinearizationOptions::default() };
    let n = opts.directions;
    let found: Vec<Option<Complex64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let dir = direction(k, n);
            let at = |s: f64| dir * s.exp();
            // `c ↦ 1/c` swaps the critical roles and maps (direction, s) to (conjugate direction, −s)
            let signed = |s: f64| {
                let here = side(theta, at(s), &lin_opts)?;
                let mirror = side(theta, dir.conj() * (-s).exp(), &lin_opts)?;
                Some(0.5 * (here - mirror))
            };
            direction_crossing(opts.bracket, at, signed)
        })
        .collect();
    let mut trace = ZakeriTrace { theta: theta.to_string(), points: Vec::new(), directions: Vec::new(), skipped: Vec::new() };
    for (k, p) in found.into_iter().enumerate() {
        match p {
            Some(c) => {
                trace.points.push(c);
                trace.directions.push(k);
            }
            None => trace.skipped.push(k),
        }
    }
    if trace.points.len() < 3 {
        return Err(Error::TraceFailed { failed: trace.skipped.len(), total: n });
    }
    Ok(trace)
}

/// `e^{2πik/n}`, exact at quarter turns so that real and imaginary directions stay on their axes.
fn direction(k: usize, n: usize) -> Complex64 {
    if (4 * k).is_multiple_of(n) {
        return [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)][4 * k / n];
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

fn direction_crossing(
    bracket: f64,
    at: impl Fn(f64) -> Complex64,
    signed: impl Fn(f64) -> Option<f64>,
) -> Option<Complex64> {
    let mut bounds = None;
    for &s in &SCAN {
        let inner = signed(-s)?;
        let outer = signed(s)?;
        if inner == 0.0 {
            return Some(at(-s));
        }
        if outer == 0.0 {
            return Some(at(s));
        }
        if inner > 0.0 && outer < 0.0 {
            bounds = Some((-s, s));
            break;
        }
    }
    let (mut lo, mut hi) = bounds?;
    while hi - lo > bracket {
        let mid = 0.5 * (lo + hi);
        let d = signed(mid)?;
        if d == 0.0 {
            return Some(at(mid));
        }
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(at(0.5 * (lo + hi)))
}
