use crate::error::Result;
use crate::quantum::matrix::{c, identity2, kron2, Mat2};
use crate::quantum::JointState;

use super::geometry::NoiseModel;

/// `(1−p)ρ + p·Tr_photon(ρ) ⊗ I/2`: background clicks keep the spin
/// marginal and carry an unpolarized photon.
pub fn apply_background(rho: &JointState, noise: &NoiseModel) -> Result<JointState> {
    noise.validate()?;
    let p = noise.background_fraction;
    let m = rho.matrix();
    let spin = Mat2::from_fn(|a, b| m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)]);
    let mixed = kron2(&spin, &(identity2() * c(0.5, 0.0)));
    Ok(JointState::from_unchecked(m * c(1.0 - p, 0.0) + mixed * c(p, 0.0)))
}
