use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bounded-turning constant of a closed polyline: the largest ratio of the smaller
/// arc diameter to the chord, over all vertex pairs.
pub fn quasicircle_diagnostic(poly: &[Complex64]) -> Result<f64> {
    let n = poly.len();
    if n < 16 {
        return Err(Error::DegeneratePolyline(format!("{n} vertices, at least 16 required")));
    }
    for i in 0..n {
        for j in i + 1..n {
            if poly[i] == poly[j] {
                return Err(Error::DegeneratePolyline(format!("vertices {i} and {j} coincide")));
            }
        }
    }
    // arc[i][l] = diameter of the arc i, i+1, …, i+l
    let mut arc = vec![0.0f64; n * (n + 1)];
    for i in 0..n {
        let mut d: f64 = 0.0;
        for l in 1..=n {
            let j = (i + l) % n;
            let zj = poly[j];
            for m in 0..l {
                d = d.max((poly[(i + m) % n] - zj).norm());
            }
            arc[i * (n + 1) + l] = d;
        }
    }
    let mut best: f64 = 0.0;
    for i in 0..n {
        for l in 1..n {
            let j = (i + l) % n;
            let forward = arc[i * (n + 1) + l];
            let backward = arc[j * (n + 1) + (n - l)];
            best = best.max(forward.min(backward) / (poly[i] - poly[j]).norm());
        }
    }
    Ok(best)
}
