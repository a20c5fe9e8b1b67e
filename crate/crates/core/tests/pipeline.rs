use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use siegel_capture::capture::{capture_centers, param_map_phi, trace_parameter_ray, ParameterMap, RayOptions};
use siegel_capture::classify::{capture_level, classify_parameter_c, Budgets, PointClass};
use siegel_capture::family::{CubicSiegelMap, RotationNumber};
use siegel_capture::render::{render, Plane, RenderJob};
use siegel_capture::siegel::{LinearizationData, LinearizationOptions, Verdict, DEFAULT_VERDICT_MAX_TERMS};
use siegel_capture::Complex64;

fn golden() -> RotationNumber {
    RotationNumber::golden()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn classification_of_the_distinguished_parameters() {
    let theta = golden();
    let budgets = Budgets::default();
    let three = classify_parameter_c(&theta, c(3.0, 0.0), &budgets);
    assert_eq!(three.boundary.verdict, Verdict::OnBoundaryOne);
    assert_eq!(three.free, PointClass::CaptureSiegel { level: 1 });
    assert!(three.in_capture_set());

    let deep = Budgets { verdict_max_terms: DEFAULT_VERDICT_MAX_TERMS, ..budgets };
    let one = classify_parameter_c(&theta, c(1.0, 0.0), &deep);
    assert_eq!(one.boundary.verdict, Verdict::Both);
    assert!(!one.in_capture_set());

    let third = classify_parameter_c(&theta, c(1.0 / 3.0, 0.0), &budgets);
    assert_eq!(third.boundary.verdict, Verdict::OnBoundaryC);
    assert_eq!(third.free, PointClass::CaptureSiegel { level: 1 });
    assert!(three.agrees_with_swapped(&third));
}

#[test]
fn escaping_parameter_escapes_quickly() {
    let class = classify_parameter_c(&golden(), c(100.0, 0.0), &Budgets::default());
    match class.free {
        PointClass::Escapes { step } => assert!(step <= 50),
        other => panic!("expected escape, got {other:?}"),
    }
    assert!(!class.in_capture_set());
}

#[test]
fn centers_have_their_own_level() {
    let theta = golden();
    let centers = capture_centers(&theta, 4).unwrap();
    for level in &centers {
        for center in level {
            assert_eq!(capture_level(&theta, center.c, 2000), Some(center.level), "center {}", center.c);
        }
    }
    assert_eq!(capture_level(&theta, c(1.0, 0.0), 2000), None);
}

#[test]
fn phi_vanishes_at_the_center_and_maps_into_the_disk() {
    let theta = golden();
    assert!(param_map_phi(&theta, c(3.0, 0.0), 1).unwrap().norm() < 1e-8);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut inside = 0;
    while inside < 50 {
        let z = c(3.0, 0.0) + Complex64::from_polar(0.3 * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>());
        if capture_level(&theta, z, 2000) != Some(1) {
            continue;
        }
        let Ok(value) = param_map_phi(&theta, z, 1) else { continue };
        assert!(value.norm() < 1.0, "|Φ({z})| = {}", value.norm());
        inside += 1;
    }
}

#[test]
fn phi_is_equivariant_along_the_orbit() {
    let theta = golden();
    let parameter = c(3.05, 0.04);
    let map = ParameterMap::new(&theta, 1);
    let (cubic, lin) = map.linearize(parameter).unwrap();
    let iterate = map.captured_iterate(&cubic, &lin).unwrap();
    let here = lin.phi(iterate).unwrap();
    let next = lin.phi(cubic.evaluate(iterate)).unwrap();
    assert_abs_diff_eq!((next - theta.multiplier() * here).norm(), 0.0, epsilon = 1e-6);
}

#[test]
fn ray_lands_on_a_parameter_with_boundary_iterate() {
    let theta = golden();
    let trace = trace_parameter_ray(&theta, c(3.0, 0.0), 1, 0.25, &RayOptions::default()).unwrap();
    assert!((trace.path[0].1 - c(3.0, 0.0)).norm() < 0.1);
    let landing = trace.landing;
    let map = CubicSiegelMap::c_plane(&theta, landing).unwrap();
    let lin = LinearizationData::new(&map, &LinearizationOptions::default()).unwrap();
    let image = map.evaluate(landing);
    let distance = siegel_capture::numerics::geometry::closed_polyline_distance(image, lin.boundary()).0;
    assert!(distance < 5e-3 * lin.diameter(), "distance {distance}");
}

#[test]
fn parameter_render_shows_all_regions() {
    let job = RenderJob::new(golden(), Plane::ParamC, c(0.0, 0.0), 64.0, 48);
    let image = render(&job).unwrap();
    let h = image.histogram;
    assert_eq!(h.total(), 48 * 48);
    assert!(h.capture > 0 && h.escape > 0);
    assert!(h.escape > h.capture);
}
