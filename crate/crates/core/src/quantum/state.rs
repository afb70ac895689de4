use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use super::matrix::*;
use crate::error::{invalid, Result};

/// Bloch-sphere coordinates `(Tr ρσx, Tr ρσy, Tr ρσz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn along(axis: Axis, sign: f64) -> Self {
        let mut v = [0.0; 3];
        v[axis.index()] = sign.signum();
        Self::from(v)
    }

    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        (self.as_vector() - other.as_vector()).norm()
    }

    /// Angle between the two vectors as directions, in radians.
    pub fn angle_to(&self, other: &BlochVector) -> f64 {
        let (a, b) = (self.as_vector(), other.as_vector());
        (a.dot(&b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
    }
}

impl From<Vector3<f64>> for BlochVector {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

fn check_density<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> Result<()> {
    let herm = hermiticity_defect(m);
    if herm >= STATE_TOL * N as f64 {
        return Err(invalid(format!("matrix is not Hermitian (defect {herm:e})")));
    }
    let tr = trace(m);
    if (tr.re - 1.0).abs() > STATE_TOL * N as f64 || tr.im.abs() > STATE_TOL * N as f64 {
        return Err(invalid(format!("trace is {tr}, expected 1")));
    }
    density_eigenvalues(&to_dynamic(m))?;
    Ok(())
}

/// Anything that carries a density matrix: used by the generic measures.
pub trait DensityMatrix {
    fn dynamic(&self) -> DMatrix<C64>;
}

/// Qubit density matrix in the `σz` eigenbasis `{|↑⟩, |↓⟩}`.
///
/// Also used for the reduced photon-polarization state, which is then
/// expressed in the `{|E₊⟩, |E₋⟩}` basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    #[serde(with = "json")]
    rho: Mat2,
}

impl SpinState {
    pub fn new(rho: Mat2) -> Result<Self> {
        check_density(&rho)?;
        Ok(Self { rho })
    }

    pub(crate) fn from_unchecked(rho: Mat2) -> Self {
        Self { rho }
    }

    pub fn maximally_mixed() -> Self {
        Self::from_unchecked(identity2() * c(0.5, 0.0))
    }

    /// Pure state `a|↑⟩ + b|↓⟩`; the amplitudes are normalized.
    pub fn pure(a: C64, b: C64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(invalid("zero or non-finite amplitudes"));
        }
        let (a, b) = (a / n, b / n);
        Ok(Self::from_unchecked(Mat2::new(
            a * a.conj(),
            a * b.conj(),
            b * a.conj(),
            b * b.conj(),
        )))
    }

    /// Pure state `α|x̂⟩ + β|−x̂⟩`, amplitudes in the pointer basis.
    pub fn pointer_superposition(alpha: C64, beta: C64) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure((alpha + beta) * h, (alpha - beta) * h)
    }

    /// Pure state along `±axis`.
    pub fn along(axis: Axis, sign: f64) -> Self {
        Self::from_unchecked(bloch_matrix(&BlochVector::along(axis, sign)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.rho
    }

    pub fn bloch(&self) -> BlochVector {
        density_to_bloch(self)
    }

    pub fn purity(&self) -> f64 {
        trace(&(self.rho * self.rho)).re
    }

    /// `⟨ψ|ρ|ψ⟩` for a pure reference state.
    pub fn overlap_with_pure(&self, psi: &SpinState) -> f64 {
        trace(&(self.rho * psi.rho)).re
    }
}

impl DensityMatrix for SpinState {
    fn dynamic(&self) -> DMatrix<C64> {
        to_dynamic(&self.rho)
    }
}

fn bloch_matrix(b: &BlochVector) -> Mat2 {
    let [sx, sy, sz] = paulis();
    (identity2() + sx * c(b.x, 0.0) + sy * c(b.y, 0.0) + sz * c(b.z, 0.0)) * c(0.5, 0.0)
}

/// `ρ = (I + b·σ)/2`.
pub fn bloch_to_density(b: &BlochVector) -> Result<SpinState> {
    let n = b.norm();
    if !n.is_finite() || n > 1.0 + 1e-9 {
        return Err(invalid(format!("Bloch vector norm {n} exceeds 1")));
    }
    Ok(SpinState::from_unchecked(bloch_matrix(b)))
}

/// `bᵢ = Tr(ρσᵢ)`.
pub fn density_to_bloch(rho: &SpinState) -> BlochVector {
    bloch_of_matrix(&rho.rho)
}

pub(crate) fn bloch_of_matrix(m: &Mat2) -> BlochVector {
    let [sx, sy, sz] = paulis();
    BlochVector::new(
        trace(&(m * sx)).re,
        trace(&(m * sy)).re,
        trace(&(m * sz)).re,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    Spin,
    Photon,
}

/// Spin ⊗ photon-polarization density matrix.
///
/// The basis order is fixed: `{|x̂,E₊⟩, |x̂,E₋⟩, |−x̂,E₊⟩, |−x̂,E₋⟩}`, spin
/// factor first and expressed in the pointer basis `{|x̂⟩, |−x̂⟩}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    #[serde(with = "json")]
    rho: Mat4,
}

impl JointState {
    /// Wraps a matrix already written in the pointer ⊗ `{E₊,E₋}` basis.
    pub fn new(rho: Mat4) -> Result<Self> {
        check_density(&rho)?;
        Ok(Self { rho })
    }

    pub(crate) fn from_unchecked(rho: Mat4) -> Self {
        Self { rho }
    }

    /// Converts a matrix whose spin factor is in the `σz` basis.
    pub fn from_spin_z_basis(rho: &Mat4) -> Result<Self> {
        let u = kron2(&hadamard(), &identity2());
        Self::new(u * rho * u)
    }

    /// `ρ_spin ⊗ ρ_photon`; the spin state is given in the usual `σz` basis.
    pub fn product(spin: &SpinState, photon: &SpinState) -> Self {
        let h = hadamard();
        Self::from_unchecked(kron2(&(h * spin.rho * h), &photon.rho))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    /// Reduced state of one factor. The spin marginal comes back in the `σz`
    /// basis like every other [`SpinState`]; the photon marginal is in the
    /// `{E₊,E₋}` basis.
    pub fn partial_trace(&self, keep: Subsystem) -> SpinState {
        let mut out = Mat2::zeros();
        for a in 0..2 {
            for b in 0..2 {
                out[(a, b)] = (0..2)
                    .map(|k| match keep {
                        Subsystem::Spin => self.rho[(2 * a + k, 2 * b + k)],
                        Subsystem::Photon => self.rho[(2 * k + a, 2 * k + b)],
                    })
                    .sum();
            }
        }
        if keep == Subsystem::Spin {
            let h = hadamard();
            out = h * out * h;
        }
        SpinState::from_unchecked(hermitize(&out))
    }

    pub fn fidelity_with_pure(&self, psi: &JointState) -> f64 {
        trace(&(self.rho * psi.rho)).re
    }
}

impl DensityMatrix for JointState {
    fn dynamic(&self) -> DMatrix<C64> {
        to_dynamic(&self.rho)
    }
}

/// Pure joint state from amplitudes in the fixed joint basis order.
pub fn joint_pure(amps: [C64; 4]) -> Result<JointState> {
    let v = nalgebra::Vector4::from(amps);
    let n = v.norm();
    if n == 0.0 {
        return Err(invalid("zero state vector"));
    }
    let v = v / c(n, 0.0);
    Ok(JointState::from_unchecked(v * v.adjoint()))
}
