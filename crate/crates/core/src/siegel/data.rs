use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::series::{conformal_radius, linearization_series};
use crate::error::{Error, Result};
use crate::family::{CubicSiegelMap, RotationNumber};
use crate::numerics::geometry::{closed_polyline_distance, diameter, point_in_polygon};
use crate::numerics::PowerSeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearizationOptions {
    /// Series terms `M`.
    pub terms: usize,
    /// Initial boundary samples `K`.
    pub samples: usize,
    /// The boundary is `ψ` on the circle of radius `retreat · ρ`.
    pub retreat: f64,
    /// Resample until every boundary segment is shorter than this fraction of the diameter.
    pub refine: Option<f64>,
    /// Upper bound on boundary samples after refinement.
    pub max_samples: usize,
    /// Largest `M` tried when the residual gate fails.
    pub max_terms: usize,
    /// Membership band as a fraction of `ρ`.
    pub margin: f64,
    /// Bound on `max_{|w|=ρ/2} |ψ(λw) − P(ψ(w))|`.
    pub residual_gate: f64,
}

impl Default for LinearizationOptions {
    fn default() -> Self {
        Self {
            terms: 256,
            samples: 512,
            retreat: 1.0,
            refine: Some(1e-3),
            max_samples: 1 << 17,
            max_terms: 2048,
            margin: 1e-3,
            residual_gate: 1e-8,
        }
    }
}

impl LinearizationOptions {
    /// Cheaper settings for per-pixel use: no boundary refinement.
    pub fn fast() -> Self {
        Self { refine: None, ..Self::default() }
    }

    pub fn with_terms(self, terms: usize) -> Self {
        Self { terms, max_terms: self.max_terms.max(terms), ..self }
    }
}

/// Three-valued Siegel-disk membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorVerdict {
    Inside,
    Outside,
    NearBoundary,
}

/// Everything derived from one linearization: series, radius, boundary and the `φ` normalization.
#[derive(Clone, Debug)]
pub struct LinearizationData {
    map: CubicSiegelMap,
    series: PowerSeries,
    rho: f64,
    radius: f64,
    boundary: Vec<Complex64>,
    diameter: f64,
    residual: f64,
    distances: [f64; 2],
    critical_index: usize,
    critical_angle: f64,
    phi_rotation: Complex64,
    seeds: Vec<(Complex64, Complex64)>,
    inner_radius: f64,
    outer_radius: f64,
    /// At most `COARSE_VERTICES` boundary vertices for fast membership.
    coarse: Vec<Complex64>,
    /// Points farther than this plus twice the nearest segment length from the coarse polyline
    /// are classified by the polygon test alone.
    band: f64,
    margin: f64,
}

const SEED_FRACTIONS: [f64; 5] = [0.25, 0.5, 0.75, 0.9, 0.97];
const SEED_ANGLES: usize = 64;
const RESIDUAL_POINTS: usize = 64;
const COARSE_VERTICES: usize = 1024;
/// Largest boundary distance, as a fraction of the diameter, at which `φ` projects to the circle.
const PROJECTION_TOL: f64 = 2.5e-2;

impl LinearizationData {
    pub fn new(map: &CubicSiegelMap, opts: &LinearizationOptions) -> Result<Self> {
        if opts.samples < 8 || opts.terms < 32 {
            return Err(Error::InvalidArgument("need at least 32 terms and 8 boundary samples".into()));
        }
        let mut terms = opts.terms;
        let (series, rho, residual) = loop {
            let series = linearization_series(map, terms)?;
            let rho = conformal_radius(&series, map.theta())?;
            let residual = functional_residual(map, &series, rho);
            if residual < opts.residual_gate {
                break (series, rho, residual);
            }
            if terms * 2 > opts.max_terms {
                return Err(Error::LinearizationGate { residual, terms });
            }
            terms *= 2;
        };
        let radius = opts.retreat * rho;

        let mut count = opts.samples;
        let mut boundary = circle_values(&series, radius, count);
        let mut diam = diameter(&boundary);
        if let Some(h) = opts.refine {
            while count * 2 <= opts.max_samples && max_segment(&boundary) > h * diam {
                count *= 2;
                boundary = circle_values(&series, radius, count);
                diam = diameter(&boundary);
            }
        }
        if boundary.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || !(diam > 0.0) {
            return Err(Error::NonFinite("Siegel boundary samples"));
        }

        let crit = map.critical_points();
        let raw = [closed_polyline_distance(crit[0], &boundary), closed_polyline_distance(crit[1], &boundary)];
        let distances = [raw[0].0 / diam, raw[1].0 / diam];
        let critical_index = if distances[1] < distances[0] { 1 } else { 0 };
        let critical_angle = refine_angle(&series, radius, crit[critical_index], raw[critical_index].1, count);
        let phi_rotation = Complex64::from_polar(1.0, -std::f64::consts::TAU * critical_angle);

        let mut seeds = Vec::with_capacity(SEED_FRACTIONS.len() * SEED_ANGLES + 1);
        seeds.push((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        let mut inner_radius = f64::INFINITY;
        for (idx, &f) in SEED_FRACTIONS.iter().enumerate() {
            let ring = circle_values(&series, f * radius, SEED_ANGLES);
            for (k, &z) in ring.iter().enumerate() {
                let w = Complex64::from_polar(f * radius, std::f64::consts::TAU * k as f64 / SEED_ANGLES as f64);
                seeds.push((w, z));
            }
            if idx == SEED_FRACTIONS.len() - 1 {
                inner_radius = 0.9 * ring.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            }
        }
        let stride = (boundary.len() / 256).max(1);
        for (k, &z) in boundary.iter().enumerate().step_by(stride) {
            let w = Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / boundary.len() as f64);
            seeds.push((w, z));
        }
        let outer_radius = 1.02 * boundary.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let band = 4.0 * opts.margin * diam;
        let coarse: Vec<Complex64> = boundary.iter().step_by(boundary.len().div_ceil(COARSE_VERTICES)).copied().collect();

        Ok(Self {
            map: *map,
            series,
            rho,
            radius,
            boundary,
            diameter: diam,
            residual,
            distances,
            critical_index,
            critical_angle,
            phi_rotation,
            seeds,
            inner_radius,
            outer_radius,
            coarse,
            band,
            margin: opts.margin,
        })
    }

    pub fn map(&self) -> &CubicSiegelMap {
        &self.map
    }

    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    pub fn terms(&self) -> usize {
        self.series.order()
    }

    /// Conformal radius estimate `ρ`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Radius of the circle whose image is the boundary polyline.
    pub fn boundary_radius(&self) -> f64 {
        self.radius
    }

    /// Closed boundary polyline, samples at angles `k/N`.
    pub fn boundary(&self) -> &[Complex64] {
        &self.boundary
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Functional-equation residual on `|w| = ρ/2`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Distances of the two critical points to the boundary, as fractions of the diameter.
    pub fn critical_distances(&self) -> [f64; 2] {
        self.distances
    }

    /// The critical point that `φ` sends to 1.
    pub fn boundary_critical_point(&self) -> Complex64 {
        self.map.critical_points()[self.critical_index]
    }

    pub fn boundary_critical_index(&self) -> usize {
        self.critical_index
    }

    /// Angle `t*` in `[0, 1)` with `ψ(r e^{2πit*})` nearest the boundary critical point.
    pub fn critical_angle(&self) -> f64 {
        self.critical_angle
    }

    pub fn phi_rotation(&self) -> Complex64 {
        self.phi_rotation
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// `ψ` itself.
    pub fn psi(&self, w: Complex64) -> Complex64 {
        self.series.eval(w)
    }

    /// `K` uniform samples `ψ(r e^{2πik/K})`.
    pub fn boundary_samples(&self, count: usize) -> Vec<Complex64> {
        circle_values(&self.series, self.radius, count)
    }

    /// Solves `ψ(w) = z` by Newton's method from the nearest seed.
    pub fn invert(&self, z: Complex64) -> Option<Complex64> {
        let mut w = self
            .seeds
            .iter()
            .min_by(|a, b| (a.1 - z).norm_sqr().total_cmp(&(b.1 - z).norm_sqr()))
            .map(|s| s.0)?;
        let cap = 0.25 * self.radius;
        for _ in 0..50 {
            let (v, dv) = self.series.eval_with_derivative(w);
            if dv.norm() == 0.0 || !dv.re.is_finite() || !dv.im.is_finite() {
                return None;
            }
            let mut step = (v - z) / dv;
            let len = step.norm();
            if len > cap {
                step *= cap / len;
            }
            w -= step;
            if !(w.norm() <= 2.0 * self.radius) {
                return None;
            }
            if step.norm() < 1e-12 * self.radius {
                return Some(w);
            }
        }
        None
    }

    /// Membership with a three-valued verdict.
    pub fn membership(&self, z: Complex64) -> InteriorVerdict {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return InteriorVerdict::Outside;
        }
        let modulus = z.norm();
        if modulus < self.inner_radius {
            return InteriorVerdict::Inside;
        }
        if modulus > self.outer_radius {
            return InteriorVerdict::Outside;
        }
        let (dist, segment) = closed_polyline_distance(z, &self.coarse);
        let next = self.coarse[(segment + 1) % self.coarse.len()];
        if dist > self.band + 2.0 * (next - self.coarse[segment]).norm() {
            return if point_in_polygon(&self.coarse, z) { InteriorVerdict::Inside } else { InteriorVerdict::Outside };
        }
        let polygon = || point_in_polygon(&self.coarse, z);
        match self.invert(z) {
            Some(w) => {
                let r = w.norm();
                if r < self.radius * (1.0 - self.margin) {
                    InteriorVerdict::Inside
                } else if r <= self.radius * (1.0 + self.margin) || polygon() {
                    InteriorVerdict::NearBoundary
                } else {
                    InteriorVerdict::Outside
                }
            }
            None if polygon() => InteriorVerdict::NearBoundary,
            None => InteriorVerdict::Outside,
        }
    }

    /// Normalized linearizing coordinate `φ(z)` in the closed unit disk.
    ///
    /// Points close to the boundary polyline that Newton cannot
    /// invert are projected to the unit circle at the angle of the nearest boundary point.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) {
            return Ok(z);
        }
        if let Some(w) = self.invert(z) {
            let phi = self.phi_rotation * w / self.radius;
            let r = phi.norm();
            if r <= 1.0 + self.margin {
                return Ok(if r > 1.0 { phi / r } else { phi });
            }
        }
        let (dist, segment) = closed_polyline_distance(z, &self.boundary);
        if dist > PROJECTION_TOL * self.diameter {
            return Err(Error::OutsideDomain);
        }
        let t = refine_angle(&self.series, self.radius, z, segment, self.boundary.len());
        Ok(self.phi_rotation * Complex64::from_polar(1.0, std::f64::consts::TAU * t))
    }

    /// Boundary polyline with metadata for JSON output.
    pub fn export(&self, theta: &RotationNumber) -> BoundaryExport {
        BoundaryExport {
            c: [self.map.parameter().re, self.map.parameter().im],
            theta: theta.to_string(),
            rho: self.rho,
            terms: self.series.order(),
            samples: self.boundary.len(),
            diameter: self.diameter,
            residual: self.residual,
            critical_distances: self.distances,
            points: self.boundary.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// `K` uniform boundary samples of an existing linearization.
pub fn siegel_boundary(lin: &LinearizationData, samples: usize) -> Result<Vec<Complex64>> {
    if samples < 64 {
        return Err(Error::InvalidArgument(format!("at least 64 boundary samples required, got {samples}")));
    }
    Ok(lin.boundary_samples(samples))
}

pub fn phi_eval(lin: &LinearizationData, z: Complex64) -> Result<Complex64> {
    lin.phi(z)
}

pub fn in_siegel_disk(lin: &LinearizationData, z: Complex64) -> InteriorVerdict {
    lin.membership(z)
}

/// JSON form of a boundary polyline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryExport {
    pub c: [f64; 2],
    pub theta: String,
    pub rho: f64,
    #[serde(rename = "M")]
    pub terms: usize,
    #[serde(rename = "K")]
    pub samples: usize,
    pub diameter: f64,
    pub residual: f64,
    pub critical_distances: [f64; 2],
    pub points: Vec<[f64; 2]>,
}

fn functional_residual(map: &CubicSiegelMap, series: &PowerSeries, rho: f64) -> f64 {
    let lambda = map.multiplier();
    (0..RESIDUAL_POINTS)
        .map(|k| {
            let w = Complex64::from_polar(0.5 * rho, std::f64::consts::TAU * k as f64 / RESIDUAL_POINTS as f64);
            (series.eval(lambda * w) - map.evaluate(series.eval(w))).norm()
        })
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `ψ(r e^{2πik/n})` for `k = 0..n` by one FFT of the folded coefficients.
pub(crate) fn circle_values(series: &PowerSeries, radius: f64, n: usize) -> Vec<Complex64> {
    let scale = series.scale();
    let log_ratio = (radius / scale).ln();
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    for (k, &b) in series.normalized().iter().enumerate() {
        let power = (k + 1) as f64;
        bins[(k + 1) % n] += b * (power * log_ratio).exp();
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(&mut bins);
    for v in &mut bins {
        *v *= scale;
    }
    bins
}

fn max_segment(poly: &[Complex64]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| (poly[(i + 1) % n] - poly[i]).norm()).fold(0.0, f64::max)
}

/// Golden-section refinement of the angle whose boundary point is closest to `target`.
fn refine_angle(series: &PowerSeries, radius: f64, target: Complex64, segment: usize, count: usize) -> f64 {
    let point = |t: f64| series.eval(Complex64::from_polar(radius, std::f64::consts::TAU * t));
    let dist = |t: f64| (point(t) - target).norm();
    let step = 1.0 / count as f64;
    let mut lo = (segment as f64 - 1.0) * step;
    let mut hi = (segment as f64 + 2.0) * step;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (dist(x1), dist(x2));
    while hi - lo > 1e-13 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist(x2);
        }
    }
    (0.5 * (lo + hi)).rem_euclid(1.0)
}
