use nalgebra::DMatrix;

use super::matrix::*;
use super::state::{DensityMatrix, JointState, SpinState};
use crate::error::Result;

/// Von Neumann entropy `−Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy<D: DensityMatrix + ?Sized>(rho: &D) -> Result<f64> {
    entropy_of_matrix(&rho.dynamic())
}

pub fn entropy_of_matrix(m: &DMatrix<C64>) -> Result<f64> {
    let values = density_eigenvalues(m)?;
    Ok(values
        .into_iter()
        .filter(|&v| v > STATE_TOL)
        .map(|v| -v * v.ln())
        .sum())
}

/// Wootters concurrence of a two-qubit state.
///
/// The `λᵢ` are taken as the singular values of `√ρ √ρ̃`, whose squares are
/// the eigenvalues of `ρρ̃`. Eigenvalues of `ρ` up to `STATE_TOL` are
/// dropped from `√ρ`.
pub fn concurrence(rho: &JointState) -> Result<f64> {
    let m = rho.dynamic();
    density_eigenvalues(&m)?;
    let (values, vectors) = hermitian_eigen(&m);
    let mut root = DMatrix::<C64>::zeros(4, 4);
    for (k, v) in values.iter().enumerate() {
        if *v > STATE_TOL {
            let col = vectors.column(k);
            root += col * col.adjoint() * c(v.sqrt(), 0.0);
        }
    }
    let yy = to_dynamic(&kron2(&pauli(Axis::Y), &pauli(Axis::Y)));
    let root_tilde = &yy * root.map(|z| z.conj()) * &yy;
    let mut l: Vec<f64> = (root * root_tilde).singular_values().iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(a: &SpinState, b: &SpinState) -> f64 {
    let ra = psd_sqrt(&a.dynamic());
    let inner = &ra * b.dynamic() * &ra;
    let (values, _) = hermitian_eigen(&inner);
    let t: f64 = values.iter().map(|v| v.max(0.0).sqrt()).sum();
    (t * t).min(1.0)
}
