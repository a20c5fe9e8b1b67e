use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phi::ParameterMap;
use super::rays::{extrapolate_to_one, landing_anchors, trace_with_map, Corrector, RayOptions};
use super::{in_annulus, quasicircle_diagnostic};
use crate::error::{Error, Result};
use crate::family::RotationNumber;
use crate::numerics::geometry::{closed_polyline_distance, diameter, is_simple_closed, winding_number};
use crate::siegel::{LinearizationData, LinearizationOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub rays: usize,
    pub ray: RayOptions,
    /// Tolerance for `dist(P^ℓ(c*), ∂Δ) / diam` at the landing points; `None` skips the check.
    pub landing_tol: Option<f64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { rays: 256, ray: RayOptions::default(), landing_tol: Some(5e-3) }
    }
}

/// Landing points of `K` parameter rays around one capture component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentTrace {
    pub center: Complex64,
    pub level: usize,
    pub angles: Vec<f64>,
    /// Landing estimates; `None` where continuation failed.
    pub landings: Vec<Option<Complex64>>,
    /// Distance between the landing estimates at angle 0 and after one full turn.
    pub closure_gap: f64,
    /// Diameter of the landing polygon.
    pub diameter: f64,
    pub simple: bool,
    pub winding_number: i64,
    pub turning_constant: f64,
    pub in_annulus: bool,
    /// Smallest distance between landings of distinct angles.
    pub min_separation: f64,
    /// Fraction of landings whose captured iterate lies on the Siegel boundary.
    pub landing_fraction: Option<f64>,
}

impl ComponentTrace {
    pub fn polygon(&self) -> Vec<Complex64> {
        self.landings.iter().flatten().copied().collect()
    }

    pub fn failed(&self) -> usize {
        self.landings.iter().filter(|l| l.is_none()).count()
    }

    pub fn relative_gap(&self) -> f64 {
        self.closure_gap / self.diameter
    }
}

/// Traces the boundary of the level-`ℓ` component around `center`.
///
/// One radial ray reaches the three extrapolation radii at angle 0; each radius is then
/// followed around the full circle of angles, and the landing at each angle is the
/// quadratic extrapolation of the three circuits to `r = 1`.
pub fn trace_component_boundary(
    theta: &RotationNumber,
    center: Complex64,
    level: usize,
    opts: &TraceOptions,
) -> Result<ComponentTrace> {
    let k = opts.rays;
    if k < 64 {
        return Err(Error::InvalidArgument(format!("at least 64 rays required, got {k}")));
    }
    let map = ParameterMap::new(theta, level);
    let anchors = landing_anchors(opts.ray.r_stop);
    let start = trace_with_map(&map, center, 0.0, &opts.ray)?;

    let circuits: Vec<Vec<Option<Complex64>>> = (0..3)
        .into_par_iter()
        .map(|j| circuit(&map, center, anchors[j], start.anchors[j], k, &opts.ray))
        .collect();

    let angles: Vec<f64> = (0..k).map(|i| i as f64 / k as f64).collect();
    let land = |i: usize| -> Option<Complex64> {
        Some(extrapolate_to_one(anchors, [circuits[0][i]?, circuits[1][i]?, circuits[2][i]?]))
    };
    let landings: Vec<Option<Complex64>> = (0..k).map(land).collect();
    let failed = landings.iter().filter(|l| l.is_none()).count();
    if failed * 20 > k {
        return Err(Error::TraceFailed { failed, total: k });
    }
    let polygon: Vec<Complex64> = landings.iter().flatten().copied().collect();
    let closure_gap = match (land(0), land(k)) {
        (Some(a), Some(b)) => (a - b).norm(),
        _ => f64::INFINITY,
    };
    let diam = diameter(&polygon);
    let min_separation = polygon
        .iter()
        .enumerate()
        .flat_map(|(i, a)| polygon[i + 1..].iter().map(move |b| (a - b).norm()))
        .fold(f64::INFINITY, f64::min);
    let landing_fraction = opts.landing_tol.map(|tol| {
        let hits = polygon.par_iter().filter(|&&c| landing_on_boundary(&map, c, tol)).count();
        hits as f64 / polygon.len() as f64
    });
    Ok(ComponentTrace {
        center,
        level,
        angles,
        landings,
        closure_gap,
        diameter: diam,
        simple: is_simple_closed(&polygon),
        winding_number: winding_number(&polygon, center),
        turning_constant: quasicircle_diagnostic(&polygon).unwrap_or(f64::INFINITY),
        in_annulus: polygon.iter().all(|&c| in_annulus(c)),
        min_separation,
        landing_fraction,
    })
}

/// Solutions of `Φ(c) = r e^{2πi·i/K}` for `i = 0..=K`, continued in angle from `first`.
fn circuit(map: &ParameterMap, center: Complex64, r: f64, first: Complex64, k: usize, opts: &RayOptions) -> Vec<Option<Complex64>> {
    let mut out = vec![None; k + 1];
    out[0] = Some(first);
    let mut corrector = Corrector { map, slope: None, tol: opts.newton_tol, max_iter: opts.max_newton };
    let mut last = (0usize, first);
    let mut before: Option<(usize, Complex64)> = None;
    let target = |t: f64| Complex64::from_polar(r, std::f64::consts::TAU * t);
    for i in 1..=k {
        let mut solved = None;
        // finer angular sub-steps on failure
        for subdivisions in [1usize, 4, 16] {
            let t0 = last.0 as f64 / k as f64;
            let t1 = i as f64 / k as f64;
            let mut c = last.1;
            let mut prev = before;
            let mut ok = true;
            for s in 1..=subdivisions {
                let t = t0 + (t1 - t0) * s as f64 / subdivisions as f64;
                let predictor = match prev {
                    Some((pi, pc)) if s == 1 && subdivisions == 1 => {
                        let dt_prev = (last.0 - pi) as f64 / k as f64;
                        c + (c - pc) * ((t - t0) / dt_prev)
                    }
                    _ => c,
                };
                match corrector.solve(target(t), predictor) {
                    Ok(next) => {
                        prev = None;
                        c = next;
                    }
                    Err(_) => {
                        corrector.slope = None;
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                solved = Some(c);
                break;
            }
        }
        if solved.is_none() {
            let t = i as f64 / k as f64;
            let ray_opts = RayOptions { r_stop: r, ..*opts };
            solved = trace_with_map(map, center, t, &ray_opts).ok().map(|ray| ray.path.last().unwrap().1);
            corrector.slope = None;
        }
        if let Some(c) = solved {
            out[i] = Some(c);
            before = Some(last);
            last = (i, c);
        }
    }
    out
}

/// `dist(P^ℓ(c), ∂Δ_c) < tol · diam` for the free critical orbit at `c`.
pub(crate) fn landing_on_boundary(map: &ParameterMap, c: Complex64, tol: f64) -> bool {
    let Ok(p) = crate::family::CubicSiegelMap::c_plane(&map.theta, c) else {
        return false;
    };
    let Ok(lin) = LinearizationData::new(&p, &LinearizationOptions::default()) else {
        return false;
    };
    let mut z = p.critical_points()[1 - lin.boundary_critical_index()];
    for _ in 0..map.level {
        z = p.evaluate(z);
    }
    closed_polyline_distance(z, lin.boundary()).0 < tol * lin.diameter()
}
