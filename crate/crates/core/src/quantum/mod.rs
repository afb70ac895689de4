//! Dense qubit and two-qubit primitives shared by every other module.

pub mod channel;
pub mod matrix;
pub mod measures;
pub mod state;

pub use channel::{apply_kraus, chi_to_affine, AffineMap, KrausFamily, OperatorBasis, PhotonLabel, ProcessMatrix};
pub use matrix::{c, pauli, Axis, Mat2, Mat4, C64};
pub use measures::{concurrence, fidelity, von_neumann_entropy};
pub use state::{bloch_to_density, density_to_bloch, joint_pure, BlochVector, JointState, SpinState, Subsystem};
