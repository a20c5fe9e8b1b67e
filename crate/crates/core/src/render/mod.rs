//! Tiled parameter-plane and dynamical-plane images.

mod image;

pub use image::{read_ppm, write_image, ClassHistogram, ImageBuffer, ImageFormat};

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_map, classify_orbit_with, cycle_multiplier, same_class, Budgets, PointClass};
use crate::error::{Error, Result};
use crate::family::{a_to_c, CubicSiegelMap, RotationNumber, Slice};
use crate::siegel::{LinearizationData, LinearizationOptions};

/// Which plane the pixels sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Plane {
    /// Parameter `c` of `P_c`.
    ParamC,
    /// Parameter `a` of `f_a`; each pixel classifies both preimages `c` and `1/c`.
    ParamA,
    /// Phase space `z` of one map.
    Dynamical { slice: Slice, parameter: Complex64 },
}

/// Axis-aligned window given by its center and width; the height follows the pixel aspect ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Complex64,
    pub width: f64,
}

/// Class colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    pub capture: [u8; 3],
    pub cycle: [u8; 3],
    /// Escape gradient from slow to fast escape.
    pub escape_slow: [u8; 3],
    pub escape_fast: [u8; 3],
    pub unresolved: [u8; 3],
    /// Two tones alternating across level sets of `|φ|` inside the Siegel disk.
    pub siegel_light: [u8; 3],
    pub siegel_dark: [u8; 3],
    pub overlay: [u8; 3],
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            capture: [0, 255, 255],
            cycle: [255, 255, 0],
            escape_slow: [250, 250, 250],
            escape_fast: [25, 30, 90],
            unresolved: [20, 20, 20],
            siegel_light: [120, 235, 235],
            siegel_dark: [60, 190, 200],
            overlay: [220, 30, 30],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderJob {
    pub theta: RotationNumber,
    pub plane: Plane,
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub budgets: Budgets,
    /// Samples per axis: 1, 2 or 4.
    pub supersampling: usize,
    pub palette: Palette,
    /// Counterclockwise quarter turns applied after rendering.
    pub quarter_turns: u8,
    /// Draw the Siegel-disk boundary on dynamical renders.
    pub overlay_boundary: bool,
    /// Worker threads; `None` uses the ambient pool.
    pub threads: Option<usize>,
}

impl RenderJob {
    /// Square job with render budgets and the default palette.
    pub fn new(theta: RotationNumber, plane: Plane, center: Complex64, width: f64, resolution: usize) -> Self {
        Self {
            theta,
            plane,
            window: Window { center, width },
            width: resolution,
            height: resolution,
            budgets: Budgets::render(),
            supersampling: 1,
            palette: Palette::default(),
            quarter_turns: 0,
            overlay_boundary: true,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidArgument("resolution must be at least 1×1".into()));
        }
        if !(self.window.width > 0.0 && self.window.width.is_finite()) {
            return Err(Error::InvalidArgument(format!("window width must be positive, got {}", self.window.width)));
        }
        if !(self.window.center.re.is_finite() && self.window.center.im.is_finite()) {
            return Err(Error::InvalidArgument("window center must be finite".into()));
        }
        if ![1, 2, 4].contains(&self.supersampling) {
            return Err(Error::InvalidArgument(format!("supersampling must be 1, 2 or 4, got {}", self.supersampling)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        Ok(())
    }

    pub fn pixel_size(&self) -> f64 {
        self.window.width / self.width as f64
    }

    pub fn window_height(&self) -> f64 {
        self.pixel_size() * self.height as f64
    }

    /// Plane coordinate of the continuous pixel position `(x, y)` measured from the top-left corner.
    pub fn coordinate(&self, x: f64, y: f64) -> Complex64 {
        let step = self.pixel_size();
        let left = self.window.center.re - 0.5 * self.window.width;
        let top = self.window.center.im + 0.5 * self.window_height();
        Complex64::new(left + x * step, top - y * step)
    }

    /// Pixel containing `z`, if inside the window.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let step = self.pixel_size();
        let left = self.window.center.re - 0.5 * self.window.width;
        let top = self.window.center.im + 0.5 * self.window_height();
        let x = ((z.re - left) / step).floor();
        let y = ((top - z.im) / step).floor();
        (x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64).then_some((x as usize, y as usize))
    }
}

/// One classified sample with its escape smoothing value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub class: PointClass,
    /// Smoothed escape count; for Siegel-interior samples, `|φ(z)|`.
    pub shade: f64,
}

const TILE: usize = 32;
/// Smoothed escape count mapped to the slow end of the gradient.
const ESCAPE_SHADE_SPAN: f64 = 40.0;

/// Renders `job` on the plane it names.
pub fn render(job: &RenderJob) -> Result<ImageBuffer> {
    match job.plane {
        Plane::Dynamical { .. } => render_dynamical_plane(job),
        _ => render_parameter_plane(job),
    }
}

pub fn render_parameter_plane(job: &RenderJob) -> Result<ImageBuffer> {
    job.validate()?;
    if matches!(job.plane, Plane::Dynamical { .. }) {
        return Err(Error::InvalidArgument("parameter render needs a parameter plane".into()));
    }
    let sample = |z: Complex64| match job.plane {
        Plane::ParamA => classify_parameter_a_sample(&job.theta, z, &job.budgets),
        _ => classify_parameter_c_sample(&job.theta, z, &job.budgets),
    };
    let buf = run_tiles(job, &sample)?;
    Ok(buf.rotated(job.quarter_turns))
}

pub fn render_dynamical_plane(job: &RenderJob) -> Result<ImageBuffer> {
    job.validate()?;
    let Plane::Dynamical { slice, parameter } = job.plane else {
        return Err(Error::InvalidArgument("dynamical render needs a dynamical plane".into()));
    };
    let map = match slice {
        Slice::C => CubicSiegelMap::c_plane(&job.theta, parameter)?,
        Slice::A => CubicSiegelMap::a_plane(&job.theta, parameter)?,
    };
    let lin = LinearizationData::new(&map, &LinearizationOptions::default())?;
    let sample = |z: Complex64| classify_dynamical_sample(&map, &lin, z, &job.budgets);
    let mut buf = run_tiles(job, &sample)?;
    if job.overlay_boundary {
        draw_polyline(&mut buf, job, lin.boundary(), job.palette.overlay);
    }
    Ok(buf.rotated(job.quarter_turns))
}

/// Classifies the parameter `c`, deciding escape and attracting cycles from the bare critical orbits
/// and linearizing only when neither orbit resolves.
pub fn classify_parameter_c_sample(theta: &RotationNumber, c: Complex64, budgets: &Budgets) -> Sample {
    let unresolved = Sample { class: PointClass::Unresolved { budget: budgets.max_iterations }, shade: 0.0 };
    let Ok(map) = CubicSiegelMap::c_plane(theta, c) else {
        return unresolved;
    };
    if let Some(sample) = critical_orbit_shortcut(&map, budgets) {
        return sample;
    }
    Sample { class: classify_map(&map, budgets).headline(), shade: 0.0 }
}

/// Classifies both preimages `c, 1/c` of `a` and combines them: agreement or the resolved one wins.
pub fn classify_parameter_a_sample(theta: &RotationNumber, a: Complex64, budgets: &Budgets) -> Sample {
    let (first, second) = a_to_c(theta, a);
    let x = classify_parameter_c_sample(theta, first, budgets);
    if first == second {
        return x;
    }
    let y = classify_parameter_c_sample(theta, second, budgets);
    match (x.class.is_resolved(), y.class.is_resolved()) {
        (true, true) if same_class(&x.class, &y.class) => x,
        (true, true) => Sample { class: PointClass::Unresolved { budget: budgets.max_iterations }, shade: 0.0 },
        (false, true) => y,
        _ => x,
    }
}

/// Classifies the orbit of `z`; Siegel-interior samples carry `|φ(z)|` as shade.
pub fn classify_dynamical_sample(map: &CubicSiegelMap, lin: &LinearizationData, z: Complex64, budgets: &Budgets) -> Sample {
    let class = classify_orbit_with(map, lin, z, budgets);
    let shade = match class {
        PointClass::CaptureSiegel { level: 0 } => lin.phi(z).map(|w| w.norm()).unwrap_or(1.0),
        PointClass::Escapes { step } => step as f64,
        _ => 0.0,
    };
    Sample { class, shade }
}

/// An escaping or cycle-attracted critical orbit cannot lie on the Siegel boundary, so it is the free one.
fn critical_orbit_shortcut(map: &CubicSiegelMap, budgets: &Budgets) -> Option<Sample> {
    let r2 = budgets.escape_radius * budgets.escape_radius;
    let mut z = map.critical_points();
    let mut anchor = z;
    let mut power = 1usize;
    let mut lag = 0usize;
    for step in 0..=budgets.max_iterations {
        for w in z {
            if !(w.norm_sqr() <= r2) {
                let shade = smooth_escape(step, w.norm(), budgets.escape_radius);
                return Some(Sample { class: PointClass::Escapes { step }, shade });
            }
        }
        for k in 0..2 {
            if step > 0 && (z[k] - anchor[k]).norm() < budgets.cycle_tol {
                if let Some((period, modulus)) = cycle_multiplier(map, z[k], lag, budgets.cycle_tol) {
                    if modulus < budgets.cycle_multiplier {
                        return Some(Sample { class: PointClass::AttractedCycle { period, multiplier: modulus }, shade: 0.0 });
                    }
                }
            }
        }
        if lag == power {
            anchor = z;
            power *= 2;
            lag = 0;
        }
        z = z.map(|w| map.evaluate(w));
        lag += 1;
    }
    None
}

/// Continuous escape count for a cubic: `n + 1 − log₃(ln|z| / ln R)`.
fn smooth_escape(step: usize, modulus: f64, radius: f64) -> f64 {
    if !modulus.is_finite() {
        return step as f64;
    }
    (step as f64 + 1.0 - (modulus.ln() / radius.ln()).ln() / 3f64.ln()).max(0.0)
}

fn color(job: &RenderJob, sample: &Sample) -> [f64; 3] {
    let p = &job.palette;
    let rgb = |c: [u8; 3]| c.map(f64::from);
    match sample.class {
        PointClass::CaptureSiegel { level: 0 } if matches!(job.plane, Plane::Dynamical { .. }) => {
            if ((sample.shade * 10.0).floor() as i64) % 2 == 0 {
                rgb(p.siegel_light)
            } else {
                rgb(p.siegel_dark)
            }
        }
        PointClass::CaptureSiegel { .. } => rgb(p.capture),
        PointClass::AttractedCycle { .. } => rgb(p.cycle),
        PointClass::Unresolved { .. } => rgb(p.unresolved),
        PointClass::Escapes { .. } => {
            let t = ((1.0 + sample.shade).ln() / ESCAPE_SHADE_SPAN.ln()).clamp(0.0, 1.0);
            let (slow, fast) = (rgb(p.escape_slow), rgb(p.escape_fast));
            [0, 1, 2].map(|i| fast[i] + (slow[i] - fast[i]) * t)
        }
    }
}

struct Tile {
    x0: usize,
    y0: usize,
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
    histogram: ClassHistogram,
}

fn run_tiles<F>(job: &RenderJob, sample: &F) -> Result<ImageBuffer>
where
    F: Fn(Complex64) -> Sample + Sync,
{
    let mut origins = Vec::new();
    for y0 in (0..job.height).step_by(TILE) {
        for x0 in (0..job.width).step_by(TILE) {
            origins.push((x0, y0));
        }
    }
    let work = || -> Vec<Tile> { origins.par_iter().map(|&(x0, y0)| render_tile(job, sample, x0, y0)).collect() };
    let tiles = match job.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut buf = ImageBuffer::new(job.width, job.height);
    for tile in &tiles {
        for dy in 0..tile.height {
            for dx in 0..tile.width {
                buf.set_pixel(tile.x0 + dx, tile.y0 + dy, tile.pixels[dy * tile.width + dx]);
            }
        }
        buf.histogram.merge(&tile.histogram);
    }
    Ok(buf)
}

fn render_tile<F>(job: &RenderJob, sample: &F, x0: usize, y0: usize) -> Tile
where
    F: Fn(Complex64) -> Sample,
{
    let width = TILE.min(job.width - x0);
    let height = TILE.min(job.height - y0);
    let n = job.supersampling;
    let mut tile = Tile { x0, y0, width, height, pixels: Vec::with_capacity(width * height), histogram: ClassHistogram::default() };
    for y in y0..y0 + height {
        for x in x0..x0 + width {
            let mut acc = [0.0; 3];
            for j in 0..n {
                for i in 0..n {
                    let z = job.coordinate(x as f64 + (i as f64 + 0.5) / n as f64, y as f64 + (j as f64 + 0.5) / n as f64);
                    let s = sample(z);
                    tile.histogram.add(s.class.tag());
                    let c = color(job, &s);
                    for k in 0..3 {
                        acc[k] += c[k];
                    }
                }
            }
            let count = (n * n) as f64;
            tile.pixels.push(acc.map(|v| (v / count).round().clamp(0.0, 255.0) as u8));
        }
    }
    tile
}

/// Draws a closed polyline by stepping each segment at quarter-pixel spacing.
fn draw_polyline(buf: &mut ImageBuffer, job: &RenderJob, points: &[Complex64], rgb: [u8; 3]) {
    let step = 0.25 * job.pixel_size();
    for (k, &a) in points.iter().enumerate() {
        let b = points[(k + 1) % points.len()];
        let count = ((b - a).norm() / step).ceil().max(1.0) as usize;
        for s in 0..=count {
            let z = a + (b - a) * (s as f64 / count as f64);
            if let Some((x, y)) = job.pixel_of(z) {
                buf.set_pixel(x, y, rgb);
            }
        }
    }
}

/// Job parameters and histogram written next to every image.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RenderSidecar {
    pub job: RenderJob,
    pub histogram: ClassHistogram,
    pub fractions: [f64; 4],
    pub elapsed_seconds: f64,
}

pub fn write_sidecar(job: &RenderJob, buf: &ImageBuffer, elapsed_seconds: f64, path: &Path) -> Result<()> {
    let sidecar = RenderSidecar { job: job.clone(), histogram: buf.histogram, fractions: buf.histogram.fractions(), elapsed_seconds };
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn job(plane: Plane, center: Complex64, width: f64, res: usize) -> RenderJob {
        RenderJob::new(RotationNumber::golden(), plane, center, width, res)
    }

    #[test]
    fn single_pixel_at_capture_center_is_cyan() {
        let buf = render(&job(Plane::ParamC, c(3.0, 0.0), 1e-3, 1)).unwrap();
        assert_eq!(buf.pixel(0, 0), Palette::default().capture);
        assert_eq!(buf.histogram.capture, 1);
    }

    #[test]
    fn single_pixel_far_out_escapes() {
        let buf = render(&job(Plane::ParamC, c(100.0, 0.0), 1e-3, 1)).unwrap();
        assert_eq!(buf.histogram.escape, 1);
    }

    #[test]
    fn invalid_jobs_are_rejected() {
        let mut j = job(Plane::ParamC, c(0.0, 0.0), 4.0, 0);
        assert!(render(&j).is_err());
        j.width = 4;
        j.height = 4;
        j.window.width = -1.0;
        assert!(render(&j).is_err());
        j.window.width = 1.0;
        j.supersampling = 3;
        assert!(render(&j).is_err());
    }

    #[test]
    fn histogram_counts_every_sample() {
        let mut j = job(Plane::ParamC, c(0.0, 0.0), 8.0, 9);
        j.height = 7;
        j.supersampling = 2;
        let buf = render(&j).unwrap();
        assert_eq!(buf.histogram.total(), 9 * 7 * 4);
        assert_eq!(buf.pixels.len(), 9 * 7 * 3);
    }

    #[test]
    fn coordinates_round_trip_through_pixels() {
        let j = job(Plane::ParamC, c(1.0, -2.0), 4.0, 16);
        for (x, y) in [(0, 0), (15, 15), (3, 11)] {
            let z = j.coordinate(x as f64 + 0.5, y as f64 + 0.5);
            assert_eq!(j.pixel_of(z), Some((x, y)));
        }
        assert_eq!(j.pixel_of(c(10.0, 0.0)), None);
    }

    #[test]
    fn dynamical_plane_pixels() {
        let theta = RotationNumber::golden();
        let map = CubicSiegelMap::c_plane(&theta, c(3.0, 0.0)).unwrap();
        let lin = LinearizationData::new(&map, &LinearizationOptions::default()).unwrap();
        let b = Budgets::default();
        assert_eq!(classify_dynamical_sample(&map, &lin, c(0.0, 0.0), &b).class, PointClass::CaptureSiegel { level: 0 });
        assert_eq!(classify_dynamical_sample(&map, &lin, c(3.0, 0.0), &b).class, PointClass::CaptureSiegel { level: 1 });
    }

    #[test]
    fn overlay_passes_through_critical_point() {
        let plane = Plane::Dynamical { slice: Slice::C, parameter: c(3.0, 0.0) };
        let j = job(plane, c(0.5, 0.0), 4.0, 64);
        let buf = render(&j).unwrap();
        let (x, y) = j.pixel_of(c(1.0, 0.0)).unwrap();
        let red = Palette::default().overlay;
        let near = (x.saturating_sub(1)..=x + 1).any(|i| (y.saturating_sub(1)..=y + 1).any(|k| buf.pixel(i, k) == red));
        assert!(near);
    }

    #[test]
    fn a_plane_combines_branches() {
        let theta = RotationNumber::golden();
        let b = Budgets::render();
        let far = classify_parameter_a_sample(&theta, c(50.0, 0.0), &b);
        assert!(matches!(far.class, PointClass::Escapes { .. }));
        let center = conjugate_a(&theta, c(3.0, 0.0));
        assert!(matches!(classify_parameter_a_sample(&theta, center, &b).class, PointClass::CaptureSiegel { .. }));
    }

    fn conjugate_a(theta: &RotationNumber, c: Complex64) -> Complex64 {
        crate::family::conjugacy_witness(theta, c).unwrap().1
    }
}
