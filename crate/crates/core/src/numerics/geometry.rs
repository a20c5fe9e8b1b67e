//! Planar polyline helpers on complex points.

use num_complex::Complex64;

/// Distance from `p` to the segment `[a, b]`.
#[inline]
pub fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    segment_distance_sqr(p, a, b).sqrt()
}

#[inline]
fn segment_distance_sqr(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm_sqr();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (a + ab * t - p).norm_sqr()
}

/// Distance from `p` to a closed polyline, with the index of the nearest segment.
pub fn closed_polyline_distance(p: Complex64, poly: &[Complex64]) -> (f64, usize) {
    let n = poly.len();
    let mut best = (f64::INFINITY, 0);
    for i in 0..n {
        let d = segment_distance_sqr(p, poly[i], poly[if i + 1 == n { 0 } else { i + 1 }]);
        if d < best.0 {
            best = (d, i);
        }
    }
    (best.0.sqrt(), best.1)
}

/// Convex hull in counter-clockwise order (Andrew's monotone chain).
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| ((a - o).conj() * (b - o)).im;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
        // lower chain first, then the upper chain on the reversed pass
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Largest pairwise distance, via rotating calipers on the convex hull.
pub fn diameter(points: &[Complex64]) -> f64 {
    let hull = convex_hull(points);
    let h = hull.len();
    match h {
        0 | 1 => return 0.0,
        2 => return (hull[0] - hull[1]).norm(),
        _ => {}
    }
    let area = |i: usize, j: usize, k: usize| ((hull[j] - hull[i]).conj() * (hull[k] - hull[i])).im.abs();
    let mut best: f64 = 0.0;
    let mut j = 1;
    for i in 0..h {
        let i1 = (i + 1) % h;
        while area(i, i1, (j + 1) % h) > area(i, i1, j) {
            j = (j + 1) % h;
        }
        best = best.max((hull[i] - hull[j]).norm()).max((hull[i1] - hull[j]).norm());
    }
    best
}

/// Winding number of a closed polyline around `p`.
pub fn winding_number(poly: &[Complex64], p: Complex64) -> i64 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = poly[i] - p;
        let b = poly[(i + 1) % n] - p;
        total += (b / a).arg();
    }
    (total / std::f64::consts::TAU).round() as i64
}

/// Even–odd point-in-polygon test.
pub fn point_in_polygon(poly: &[Complex64], p: Complex64) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if p.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    ((b - a).conj() * (c - a)).im
}

/// Proper or touching intersection of segments `[a, b]` and `[c, d]`.
pub fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Complex64, q: Complex64, r: Complex64| {
        r.re >= p.re.min(q.re) && r.re <= p.re.max(q.re) && r.im >= p.im.min(q.im) && r.im <= p.im.max(q.im)
    };
    (d1 == 0.0 && on(c, d, a)) || (d2 == 0.0 && on(c, d, b)) || (d3 == 0.0 && on(a, b, c)) || (d4 == 0.0 && on(a, b, d))
}

/// True when no two non-adjacent edges of the closed polyline meet.
pub fn is_simple_closed(poly: &[Complex64]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Symmetric Hausdorff distance between two vertex sets measured against the other polyline.
pub fn hausdorff_closed(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one = |x: &[Complex64], y: &[Complex64]| {
        x.iter().map(|&p| closed_polyline_distance(p, y).0).fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}
