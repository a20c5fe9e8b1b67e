use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CubicSiegelMap;

/// Escape radius for dynamical iteration.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitStatus {
    /// All stored points stayed within the escape radius.
    Bounded,
    /// `points[step]` was the first point outside the escape radius.
    Escapes(usize),
}

/// Forward orbit `z_0, z_1, …` with the running derivative product `∏ P'(z_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitBuffer {
    pub points: Vec<Complex64>,
    /// Product of `P'(z_k)` over every point that was mapped forward.
    pub derivative_product: Complex64,
    pub status: OrbitStatus,
}

fn outside(z: Complex64, radius: f64) -> bool {
    !(z.norm_sqr() <= radius * radius)
}

/// Iterates up to `n_max` steps, stopping at the first point beyond `escape_radius`.
pub fn iterate_orbit(map: &CubicSiegelMap, z0: Complex64, n_max: usize, escape_radius: f64) -> OrbitBuffer {
    let mut points = Vec::with_capacity(n_max.min(4096) + 1);
    let mut derivative_product = Complex64::new(1.0, 0.0);
    let mut z = z0;
    points.push(z);
    if outside(z, escape_radius) {
        return OrbitBuffer { points, derivative_product, status: OrbitStatus::Escapes(0) };
    }
    for step in 1..=n_max {
        derivative_product *= map.derivative(z);
        z = map.evaluate(z);
        points.push(z);
        if outside(z, escape_radius) {
            return OrbitBuffer { points, derivative_product, status: OrbitStatus::Escapes(step) };
        }
    }
    OrbitBuffer { points, derivative_product, status: OrbitStatus::Bounded }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::RotationNumber;

    fn map(c: f64) -> CubicSiegelMap {
        CubicSiegelMap::c_plane(&RotationNumber::golden(), Complex64::new(c, 0.0)).unwrap()
    }

    #[test]
    fn origin_orbit_is_constant() {
        let o = iterate_orbit(&map(2.0), Complex64::new(0.0, 0.0), 100, DEFAULT_ESCAPE_RADIUS);
        assert_eq!(o.status, OrbitStatus::Bounded);
        assert_eq!(o.points.len(), 101);
        assert!(o.points.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn center_hits_origin() {
        let o = iterate_orbit(&map(3.0), Complex64::new(3.0, 0.0), 10, DEFAULT_ESCAPE_RADIUS);
        assert!(o.points[1].norm() < 1e-14);
        assert!(o.points[5].norm() < 1e-14);
    }

    #[test]
    fn large_parameter_escapes() {
        let o = iterate_orbit(&map(100.0), Complex64::new(100.0, 0.0), 1000, DEFAULT_ESCAPE_RADIUS);
        match o.status {
            OrbitStatus::Escapes(step) => assert!(step <= 50),
            OrbitStatus::Bounded => panic!("expected escape"),
        }
    }

    #[test]
    fn points_follow_the_map() {
        let m = map(1.7);
        let o = iterate_orbit(&m, Complex64::new(0.3, 0.2), 50, DEFAULT_ESCAPE_RADIUS);
        for w in o.points.windows(2) {
            assert_eq!(w[1], m.evaluate(w[0]));
        }
        let product = o.points[..o.points.len() - 1].iter().fold(Complex64::new(1.0, 0.0), |acc, &z| acc * m.derivative(z));
        assert_eq!(product, o.derivative_product);
    }
}
