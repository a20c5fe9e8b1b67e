use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ParameterMap;
use crate::error::{Error, Result};
use crate::family::RotationNumber;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayOptions {
    pub r_start: f64,
    pub r_stop: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// Corrector stops when `|Φ(c) − target| < newton_tol`.
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for RayOptions {
    fn default() -> Self {
        Self { r_start: 0.05, r_stop: 0.995, initial_step: 0.05, min_step: 1e-4, newton_tol: 1e-10, max_newton: 12 }
    }
}

/// A traced parameter ray `Φ⁻¹((0,1)·e^{2πit})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    pub center: Complex64,
    pub level: usize,
    pub angle: f64,
    /// `(r, c)` pairs with `Φ(c) = r·e^{2πit}`.
    pub path: Vec<(f64, Complex64)>,
    /// Parameters at the three extrapolation radii.
    pub anchors: [Complex64; 3],
    /// Quadratic extrapolation of `c(r)` to `r = 1`.
    pub landing: Complex64,
}

/// Radii `1 − 4δ, 1 − 2δ, 1 − δ` with `δ = 1 − r_stop`.
pub fn landing_anchors(r_stop: f64) -> [f64; 3] {
    let gap = 1.0 - r_stop;
    [1.0 - 4.0 * gap, 1.0 - 2.0 * gap, r_stop]
}

/// Lagrange extrapolation of three samples to `r = 1`.
pub(crate) fn extrapolate_to_one(radii: [f64; 3], values: [Complex64; 3]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        let mut weight = 1.0;
        for j in 0..3 {
            if j != i {
                weight *= (1.0 - radii[j]) / (radii[i] - radii[j]);
            }
        }
        total += values[i] * weight;
    }
    total
}

/// Newton corrector with a cached finite-difference derivative.
pub(crate) struct Corrector<'a> {
    pub map: &'a ParameterMap,
    pub slope: Option<Complex64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Corrector<'_> {
    pub fn solve(&mut self, target: Complex64, guess: Complex64) -> Result<Complex64> {
        let mut c = guess;
        let mut value = self.map.eval(c)?;
        let mut residual = (value - target).norm();
        let mut fresh = false;
        for _ in 0..self.max_iter {
            if residual < self.tol {
                return Ok(c);
            }
            let slope = match self.slope {
                Some(s) => s,
                None => {
                    fresh = true;
                    let s = self.map.derivative(c)?;
                    self.slope = Some(s);
                    s
                }
            };
            if slope.norm() == 0.0 {
                return Err(Error::RayDiverged { last_r: target.norm() });
            }
            let step = (value - target) / slope;
            let mut accepted = None;
            let mut scale = 1.0;
            for _ in 0..4 {
                let trial = c - step * scale;
                if let Ok(v) = self.map.eval(trial) {
                    let r = (v - target).norm();
                    if r < residual {
                        accepted = Some((trial, v, r));
                        break;
                    }
                }
                scale *= 0.5;
            }
            match accepted {
                Some((trial, v, r)) => {
                    // slow contraction means the cached slope is stale
                    if r > 0.25 * residual && !fresh {
                        self.slope = None;
                    }
                    fresh = false;
                    c = trial;
                    value = v;
                    residual = r;
                }
                None if !fresh => self.slope = None,
                None => return Err(Error::RayDiverged { last_r: target.norm() }),
            }
        }
        if residual < self.tol {
            Ok(c)
        } else {
            Err(Error::RayDiverged { last_r: target.norm() })
        }
    }
}

/// Traces the ray of angle `t` from near the center out to `r_stop`.
pub fn trace_parameter_ray(
    theta: &RotationNumber,
    center: Complex64,
    level: usize,
    t: f64,
    opts: &RayOptions,
) -> Result<RayTrace> {
    trace_with_map(&ParameterMap::new(theta, level), center, t, opts)
}

pub(crate) fn trace_with_map(map: &ParameterMap, center: Complex64, t: f64, opts: &RayOptions) -> Result<RayTrace> {
    if !(opts.r_stop < 1.0 && opts.r_stop > opts.r_start) {
        return Err(Error::InvalidArgument(format!("r_stop must lie in ({}, 1)", opts.r_start)));
    }
    let direction = Complex64::from_polar(1.0, std::f64::consts::TAU * t);
    let anchors = landing_anchors(opts.r_stop);
    let mut corrector = Corrector { map, slope: Some(map.derivative(center)?), tol: opts.newton_tol, max_iter: opts.max_newton };
    let slope = corrector.slope.unwrap();
    let start = corrector
        .solve(direction * opts.r_start, center + direction * opts.r_start / slope)
        .map_err(|_| Error::RayDiverged { last_r: 0.0 })?;

    let mut path = vec![(opts.r_start, start)];
    let mut step = opts.initial_step;
    let mut anchor_values = [Complex64::new(0.0, 0.0); 3];
    let mut r = opts.r_start;
    while r < opts.r_stop {
        let next_anchor = anchors.iter().copied().find(|&a| a > r + 1e-12).unwrap_or(opts.r_stop);
        let target_r = (r + step).min(next_anchor);
        let (r_prev, c_prev) = *path.last().unwrap();
        let predictor = if path.len() >= 2 {
            let (r0, c0) = path[path.len() - 2];
            c_prev + (c_prev - c0) * ((target_r - r_prev) / (r_prev - r0))
        } else {
            c_prev + (c_prev - center) * ((target_r - r_prev) / r_prev)
        };
        match corrector.solve(direction * target_r, predictor) {
            Ok(c) => {
                r = target_r;
                path.push((r, c));
                for (k, &a) in anchors.iter().enumerate() {
                    if (a - r).abs() < 1e-12 {
                        anchor_values[k] = c;
                    }
                }
                step = (step * 1.5).min(opts.initial_step);
            }
            Err(_) => {
                step *= 0.5;
                corrector.slope = None;
                if step < opts.min_step {
                    return Err(Error::RayDiverged { last_r: r });
                }
            }
        }
    }
    let landing = if anchors[0] > opts.r_start {
        extrapolate_to_one(anchors, anchor_values)
    } else {
        path.last().unwrap().1
    };
    Ok(RayTrace { center, level: map.level, angle: t, path, anchors: anchor_values, landing })
}
