use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{CubicSiegelMap, RotationNumber};
use crate::siegel::{InteriorVerdict, LinearizationData, LinearizationOptions};

/// The parameter map `Φ(c) = φ_c(P_c^ℓ(x))` of a level-`ℓ` capture component, `x` the free critical point.
#[derive(Clone, Debug)]
pub struct ParameterMap {
    pub theta: RotationNumber,
    pub level: usize,
    pub options: LinearizationOptions,
}

impl ParameterMap {
    pub fn new(theta: &RotationNumber, level: usize) -> Self {
        let options = LinearizationOptions { samples: 256, refine: None, ..LinearizationOptions::default() };
        Self { theta: theta.clone(), level, options }
    }

    pub fn linearize(&self, c: Complex64) -> Result<(CubicSiegelMap, LinearizationData)> {
        let map = CubicSiegelMap::c_plane(&self.theta, c)?;
        let lin = LinearizationData::new(&map, &self.options)?;
        Ok((map, lin))
    }

    /// `P_c^ℓ` of the free critical point, checking that no earlier iterate is inside the disk.
    pub fn captured_iterate(&self, map: &CubicSiegelMap, lin: &LinearizationData) -> Result<Complex64> {
        let free = map.critical_points()[1 - lin.boundary_critical_index()];
        let mut z = free;
        for _ in 0..self.level {
            if lin.membership(z) == InteriorVerdict::Inside {
                return Err(Error::NotCaptured { parameter: map.parameter(), level: self.level });
            }
            z = map.evaluate(z);
        }
        if lin.membership(z) == InteriorVerdict::Outside {
            return Err(Error::NotCaptured { parameter: map.parameter(), level: self.level });
        }
        Ok(z)
    }

    pub fn eval(&self, c: Complex64) -> Result<Complex64> {
        let (map, lin) = self.linearize(c)?;
        let z = self.captured_iterate(&map, &lin)?;
        lin.phi(z).map_err(|_| Error::NotCaptured { parameter: c, level: self.level })
    }

    /// Centered finite-difference derivative with step `1e-6·(1 + |c|)`.
    pub fn derivative(&self, c: Complex64) -> Result<Complex64> {
        let h = 1e-6 * (1.0 + c.norm());
        let plus = self.eval(c + h)?;
        let minus = self.eval(c - h)?;
        Ok((plus - minus) / (2.0 * h))
    }
}

/// `Φ(c)` for the level-`ℓ` component containing `c`.
pub fn param_map_phi(theta: &RotationNumber, c: Complex64, level: usize) -> Result<Complex64> {
    ParameterMap::new(theta, level).eval(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_maps_to_origin() {
        let v = param_map_phi(&RotationNumber::golden(), Complex64::new(3.0, 0.0), 1).unwrap();
        assert!(v.norm() < 1e-8);
    }

    #[test]
    fn advancing_the_orbit_multiplies_by_lambda() {
        let theta = RotationNumber::golden();
        let c = Complex64::new(3.2, 0.15);
        let pm = ParameterMap::new(&theta, 1);
        let (map, lin) = pm.linearize(c).unwrap();
        let z = pm.captured_iterate(&map, &lin).unwrap();
        let a = lin.phi(z).unwrap();
        let b = lin.phi(map.evaluate(z)).unwrap();
        assert!(a.norm() < 1.0 && a.norm() > 0.0);
        assert!((b - theta.multiplier() * a).norm() < 1e-6);
    }

    #[test]
    fn escaping_parameter_is_not_captured() {
        let r = param_map_phi(&RotationNumber::golden(), Complex64::new(20.0, 0.0), 1);
        assert!(matches!(r, Err(Error::NotCaptured { .. })));
    }
}
