//! Rotation numbers, the two cubic slices and orbit iteration.

mod map;
mod orbit;
mod rotation;

pub use map::{a_to_c, conjugacy_witness, eta, CubicSiegelMap, Slice};
pub use orbit::{iterate_orbit, OrbitBuffer, OrbitStatus, DEFAULT_ESCAPE_RADIUS};
pub use rotation::RotationNumber;
