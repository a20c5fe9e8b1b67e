use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LinearizationData, LinearizationOptions};
use crate::family::{CubicSiegelMap, RotationNumber};

/// Default proximity threshold, as a fraction of the boundary diameter.
pub const DEFAULT_VERDICT_TOL: f64 = 5e-3;
/// Largest series order reached by automatic escalation.
pub const DEFAULT_VERDICT_MAX_TERMS: usize = 65536;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OnBoundaryOne,
    OnBoundaryC,
    Both,
    Unresolved,
}

impl Verdict {
    /// The verdict expected at `1/c` when this one holds at `c`.
    pub fn swapped(self) -> Self {
        match self {
            Verdict::OnBoundaryOne => Verdict::OnBoundaryC,
            Verdict::OnBoundaryC => Verdict::OnBoundaryOne,
            other => other,
        }
    }

    pub fn from_distances(distances: [f64; 2], tol: f64) -> Self {
        let [one, other] = distances;
        if one < tol && other < tol {
            Verdict::Both
        } else if one <= other {
            Verdict::OnBoundaryOne
        } else {
            Verdict::OnBoundaryC
        }
    }
}

/// Which critical point lies on the Siegel boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCriticalVerdict {
    pub verdict: Verdict,
    /// `(dist(1, ∂Δ), dist(c, ∂Δ))` as fractions of the boundary diameter.
    pub distances: Option<[f64; 2]>,
    /// Series order of the linearization that produced the verdict.
    pub terms: usize,
    pub diagnostic: Option<String>,
}

impl BoundaryCriticalVerdict {
    pub fn unresolved(terms: usize, diagnostic: String) -> Self {
        Self { verdict: Verdict::Unresolved, distances: None, terms, diagnostic: Some(diagnostic) }
    }

    pub fn from_linearization(lin: &LinearizationData, tol: f64) -> Self {
        let distances = lin.critical_distances();
        Self { verdict: Verdict::from_distances(distances, tol), distances: Some(distances), terms: lin.terms(), diagnostic: None }
    }
}

/// Verdict for `P_c` with default options, escalating the series order near the Zakeri curve.
pub fn boundary_critical_point(theta: &RotationNumber, c: Complex64, tol: f64) -> BoundaryCriticalVerdict {
    match CubicSiegelMap::c_plane(theta, c) {
        Ok(map) => boundary_critical_point_with(&map, tol, &LinearizationOptions::default(), DEFAULT_VERDICT_MAX_TERMS).0,
        Err(e) => BoundaryCriticalVerdict::unresolved(0, e.to_string()),
    }
}

/// Verdict for any map; while both critical points are farther than `tol` from the
/// boundary the series order is multiplied by four, up to `max_terms`.
pub fn boundary_critical_point_with(
    map: &CubicSiegelMap,
    tol: f64,
    opts: &LinearizationOptions,
    max_terms: usize,
) -> (BoundaryCriticalVerdict, Option<LinearizationData>) {
    let mut current = *opts;
    loop {
        let lin = match LinearizationData::new(map, &current) {
            Ok(lin) => lin,
            Err(e) => return (BoundaryCriticalVerdict::unresolved(current.terms, e.to_string()), None),
        };
        let [one, other] = lin.critical_distances();
        if one.min(other) <= tol || current.terms * 4 > max_terms {
            return (BoundaryCriticalVerdict::from_linearization(&lin, tol), Some(lin));
        }
        current = current.with_terms(current.terms * 4);
    }
}
