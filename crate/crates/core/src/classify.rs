//! Orbit and parameter classification.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::family::{CubicSiegelMap, RotationNumber, DEFAULT_ESCAPE_RADIUS};
use crate::siegel::{
    boundary_critical_point_with, BoundaryCriticalVerdict, InteriorVerdict, LinearizationData, LinearizationOptions,
    Verdict, DEFAULT_VERDICT_TOL,
};

/// Verdict for a single orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PointClass {
    #[serde(rename = "escape")]
    Escapes { step: usize },
    #[serde(rename = "capture")]
    CaptureSiegel { level: usize },
    #[serde(rename = "cycle")]
    AttractedCycle { period: usize, multiplier: f64 },
    #[serde(rename = "unresolved")]
    Unresolved { budget: usize },
}

impl PointClass {
    pub fn is_resolved(&self) -> bool {
        !matches!(self, PointClass::Unresolved { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PointClass::Escapes { .. } => "escape",
            PointClass::CaptureSiegel { .. } => "capture",
            PointClass::AttractedCycle { .. } => "cycle",
            PointClass::Unresolved { .. } => "unresolved",
        }
    }
}

/// Iteration limits and tolerances for classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_iterations: usize,
    pub escape_radius: f64,
    /// Distance below which two orbit points count as the same cycle point.
    pub cycle_tol: f64,
    /// Cycles with multiplier modulus below this are attracting.
    pub cycle_multiplier: f64,
    pub verdict_tol: f64,
    /// Series order cap for verdict escalation; equal to the base order disables escalation.
    pub verdict_max_terms: usize,
    pub linearization: LinearizationOptions,
    /// Also iterate the critical point that lies on the boundary.
    pub classify_boundary_orbit: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            cycle_tol: 1e-9,
            cycle_multiplier: 0.99,
            verdict_tol: DEFAULT_VERDICT_TOL,
            verdict_max_terms: 4096,
            linearization: LinearizationOptions::default(),
            classify_boundary_orbit: true,
        }
    }
}

impl Budgets {
    /// Settings for dense pixel grids: no boundary refinement, no escalation, only the free orbit.
    pub fn render() -> Self {
        let linearization = LinearizationOptions::fast();
        Self { verdict_max_terms: linearization.terms, linearization, classify_boundary_orbit: false, ..Self::default() }
    }

    /// Longer budgets used by the acceptance suite.
    pub fn acceptance() -> Self {
        Self { max_iterations: 20000, ..Self::default() }
    }
}

/// Classifies the orbit of `z0`: escape, then capture, then attracting cycle.
pub fn classify_orbit(map: &CubicSiegelMap, lin: &LinearizationData, z0: Complex64, n_max: usize) -> PointClass {
    classify_orbit_with(map, lin, z0, &Budgets { max_iterations: n_max, ..Budgets::default() })
}

pub fn classify_orbit_with(map: &CubicSiegelMap, lin: &LinearizationData, z0: Complex64, budgets: &Budgets) -> PointClass {
    let r2 = budgets.escape_radius * budgets.escape_radius;
    let mut z = z0;
    // Brent cycle detection: `anchor` is the tortoise, `lag` the distance to it
    let mut anchor = z0;
    let mut power = 1usize;
    let mut lag = 0usize;
    for step in 0..=budgets.max_iterations {
        if !(z.norm_sqr() <= r2) {
            return PointClass::Escapes { step };
        }
        if lin.membership(z) == InteriorVerdict::Inside {
            return PointClass::CaptureSiegel { level: step };
        }
        if step > 0 && (z - anchor).norm() < budgets.cycle_tol {
            if let Some((period, modulus)) = cycle_multiplier(map, z, lag, budgets.cycle_tol) {
                if modulus < budgets.cycle_multiplier {
                    return PointClass::AttractedCycle { period, multiplier: modulus };
                }
            }
        }
        if lag == power {
            anchor = z;
            power *= 2;
            lag = 0;
        }
        z = map.evaluate(z);
        lag += 1;
    }
    PointClass::Unresolved { budget: budgets.max_iterations }
}

/// Smallest period dividing `lag` that closes up, with the modulus of its multiplier.
pub(crate) fn cycle_multiplier(map: &CubicSiegelMap, z: Complex64, lag: usize, tol: f64) -> Option<(usize, f64)> {
    let mut orbit = Vec::with_capacity(lag + 1);
    let mut w = z;
    orbit.push(w);
    for _ in 0..lag {
        w = map.evaluate(w);
        orbit.push(w);
    }
    let period = (1..=lag).find(|&d| lag.is_multiple_of(d) && (orbit[d] - z).norm() < 10.0 * tol)?;
    let product = orbit[..period].iter().fold(Complex64::new(1.0, 0.0), |acc, &p| acc * map.derivative(p));
    Some((period, product.norm()))
}

/// Composite verdict for a parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamClass {
    pub boundary: BoundaryCriticalVerdict,
    pub free_critical: Complex64,
    pub free: PointClass,
    pub other_critical: Complex64,
    /// `Unresolved { budget: 0 }` when the boundary orbit was not iterated.
    pub other: PointClass,
}

impl ParamClass {
    /// Either critical orbit is captured by the Siegel disk.
    pub fn in_capture_set(&self) -> bool {
        matches!(self.free, PointClass::CaptureSiegel { .. }) || matches!(self.other, PointClass::CaptureSiegel { .. })
    }

    /// The class that decides the pixel colour.
    pub fn headline(&self) -> PointClass {
        if let PointClass::CaptureSiegel { .. } = self.other {
            if !matches!(self.free, PointClass::CaptureSiegel { .. }) {
                return self.other;
            }
        }
        self.free
    }

    pub fn is_resolved(&self) -> bool {
        self.boundary.verdict != Verdict::Unresolved && self.free.is_resolved()
    }

    /// Agreement with the classification at `1/c`, with the roles of `1` and `c` exchanged.
    pub fn agrees_with_swapped(&self, mirror: &ParamClass) -> bool {
        self.boundary.verdict == mirror.boundary.verdict.swapped() && same_class(&self.free, &mirror.free)
    }
}

/// Tags and levels/periods agree; escape steps are allowed to differ.
pub fn same_class(a: &PointClass, b: &PointClass) -> bool {
    match (a, b) {
        (PointClass::Escapes { .. }, PointClass::Escapes { .. }) => true,
        (PointClass::CaptureSiegel { level: x }, PointClass::CaptureSiegel { level: y }) => x == y,
        (PointClass::AttractedCycle { period: x, .. }, PointClass::AttractedCycle { period: y, .. }) => x == y,
        (PointClass::Unresolved { .. }, PointClass::Unresolved { .. }) => true,
        _ => false,
    }
}

/// Classifies `P_c`: boundary verdict plus the free (and optionally the boundary) critical orbit.
pub fn classify_parameter_c(theta: &RotationNumber, c: Complex64, budgets: &Budgets) -> ParamClass {
    match CubicSiegelMap::c_plane(theta, c) {
        Ok(map) => classify_map(&map, budgets),
        Err(e) => unresolved_param(c, BoundaryCriticalVerdict::unresolved(0, e.to_string()), budgets),
    }
}

/// Same as [`classify_parameter_c`] for any map of the family.
pub fn classify_map(map: &CubicSiegelMap, budgets: &Budgets) -> ParamClass {
    let (boundary, lin) = boundary_critical_point_with(map, budgets.verdict_tol, &budgets.linearization, budgets.verdict_max_terms);
    let Some(lin) = lin else {
        return unresolved_param(map.critical_points()[1], boundary, budgets);
    };
    let [one, other] = map.critical_points();
    let (free_critical, other_critical) = match boundary.verdict {
        Verdict::OnBoundaryC => (one, other),
        _ => (other, one),
    };
    let free = classify_orbit_with(map, &lin, free_critical, budgets);
    let other = if budgets.classify_boundary_orbit {
        classify_orbit_with(map, &lin, other_critical, budgets)
    } else {
        PointClass::Unresolved { budget: 0 }
    };
    ParamClass { boundary, free_critical, free, other_critical, other }
}

fn unresolved_param(c: Complex64, boundary: BoundaryCriticalVerdict, budgets: &Budgets) -> ParamClass {
    let unresolved = PointClass::Unresolved { budget: budgets.max_iterations };
    ParamClass { boundary, free_critical: c, free: unresolved, other_critical: Complex64::new(1.0, 0.0), other: unresolved }
}

/// Capture level of the free critical orbit of `P_c`, if captured within `n_max` steps.
pub fn capture_level(theta: &RotationNumber, c: Complex64, n_max: usize) -> Option<usize> {
    let budgets = Budgets { max_iterations: n_max, classify_boundary_orbit: false, ..Budgets::default() };
    match classify_parameter_c(theta, c, &budgets).free {
        PointClass::CaptureSiegel { level } => Some(level),
        _ => None,
    }
}

/// Outcome of the `c ↦ 1/c` role-swap comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub theta: String,
    pub seed: u64,
    /// Pairs drawn, including unresolved ones.
    pub drawn: usize,
    /// Pairs where both sides resolved.
    pub resolved: usize,
    pub agreeing: usize,
    pub agreement: f64,
    /// Up to ten disagreeing parameters.
    pub disagreements: Vec<Complex64>,
}

/// Draws `c` log-uniformly in the annulus `1/30 < |c| < 30` with uniform argument until
/// `samples` pairs `(c, 1/c)` are resolved on both sides (or `4·samples` pairs were drawn),
/// and counts role-swapped agreement.
pub fn symmetry_suite(theta: &RotationNumber, samples: usize, seed: u64, budgets: &Budgets) -> SymmetryReport {
    use rand::{Rng, SeedableRng};
    // the comparison uses only the boundary verdict and the free orbit
    let budgets = &Budgets { classify_boundary_orbit: false, ..*budgets };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let log_outer = crate::capture::ANNULUS_OUTER.ln();
    let mut resolved = 0;
    let mut agreeing = 0;
    let mut drawn = 0;
    let mut disagreements = Vec::new();
    while resolved < samples && drawn < 4 * samples {
        let batch: Vec<Complex64> = (0..samples - resolved)
            .map(|_| {
                let radius = (rng.random_range(-log_outer..log_outer)).exp();
                Complex64::from_polar(radius, rng.random_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        drawn += batch.len();
        let outcomes: Vec<Option<bool>> = batch
            .par_iter()
            .map(|&c| {
                let here = classify_parameter_c(theta, c, budgets);
                let mirror = classify_parameter_c(theta, c.inv(), budgets);
                (here.is_resolved() && mirror.is_resolved()).then(|| here.agrees_with_swapped(&mirror))
            })
            .collect();
        for (c, outcome) in batch.iter().zip(outcomes) {
            match outcome {
                Some(true) => {
                    resolved += 1;
                    agreeing += 1;
                }
                Some(false) => {
                    resolved += 1;
                    if disagreements.len() < 10 {
                        disagreements.push(*c);
                    }
                }
                None => {}
            }
        }
    }
    let agreement = if resolved == 0 { 0.0 } else { agreeing as f64 / resolved as f64 };
    SymmetryReport { theta: theta.to_string(), seed, drawn, resolved, agreeing, agreement, disagreements }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn golden() -> RotationNumber {
        RotationNumber::golden()
    }

    fn setup(p: Complex64) -> (CubicSiegelMap, LinearizationData) {
        let map = CubicSiegelMap::c_plane(&golden(), p).unwrap();
        let lin = LinearizationData::new(&map, &LinearizationOptions::default()).unwrap();
        (map, lin)
    }

    #[test]
    fn center_three_is_level_one() {
        let (map, lin) = setup(c(3.0, 0.0));
        assert_eq!(classify_orbit(&map, &lin, c(3.0, 0.0), 2000), PointClass::CaptureSiegel { level: 1 });
        assert_eq!(classify_orbit(&map, &lin, c(0.0, 0.0), 2000), PointClass::CaptureSiegel { level: 0 });
    }

    #[test]
    fn large_parameter_escapes() {
        let (map, lin) = setup(c(100.0, 0.0));
        match classify_orbit(&map, &lin, c(100.0, 0.0), 2000) {
            PointClass::Escapes { step } => assert!(step <= 50),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parameter_three_and_its_mirror() {
        let p = classify_parameter_c(&golden(), c(3.0, 0.0), &Budgets::default());
        assert_eq!(p.boundary.verdict, Verdict::OnBoundaryOne);
        assert_eq!(p.free, PointClass::CaptureSiegel { level: 1 });
        assert!(p.in_capture_set());
        let q = classify_parameter_c(&golden(), c(1.0 / 3.0, 0.0), &Budgets::default());
        assert_eq!(q.boundary.verdict, Verdict::OnBoundaryC);
        assert_eq!(q.free_critical, c(1.0, 0.0));
        assert_eq!(q.free, PointClass::CaptureSiegel { level: 1 });
        assert!(p.agrees_with_swapped(&q));
    }

    #[test]
    fn capture_level_examples() {
        assert_eq!(capture_level(&golden(), c(3.0, 0.0), 2000), Some(1));
        assert_eq!(capture_level(&golden(), c(100.0, 0.0), 2000), None);
    }

    #[test]
    fn attracting_cycle_detected() {
        // a superattracting fixed point: P_c(1) = 1 needs λ(3c-1)/(6c) = 1
        let lambda = golden().multiplier();
        let p = lambda / (3.0 * lambda - 6.0);
        let (map, lin) = setup(p);
        assert!((map.evaluate(c(1.0, 0.0)) - 1.0).norm() < 1e-12);
        match classify_orbit(&map, &lin, c(1.0, 0.0), 2000) {
            PointClass::AttractedCycle { period, multiplier } => {
                assert_eq!(period, 1);
                assert!(multiplier < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn serde_tags_are_stable() {
        let s = serde_json::to_string(&PointClass::CaptureSiegel { level: 2 }).unwrap();
        assert_eq!(s, r#"{"class":"capture","level":2}"#);
        let s = serde_json::to_string(&PointClass::Escapes { step: 4 }).unwrap();
        assert!(s.contains("\"escape\""));
        let s = serde_json::to_string(&PointClass::AttractedCycle { period: 3, multiplier: 0.1 }).unwrap();
        assert!(s.contains("\"cycle\""));
        let s = serde_json::to_string(&PointClass::Unresolved { budget: 10 }).unwrap();
        assert!(s.contains("\"unresolved\""));
    }

    #[test]
    fn enlarging_budget_keeps_resolved_verdicts() {
        let (map, lin) = setup(c(2.0, 1.5));
        for z0 in [c(2.0, 1.5), c(1.0, 0.0), c(-0.7, 0.4)] {
            let short = classify_orbit(&map, &lin, z0, 200);
            let long = classify_orbit(&map, &lin, z0, 4000);
            if short.is_resolved() {
                assert_eq!(short, long);
            }
        }
    }
}
