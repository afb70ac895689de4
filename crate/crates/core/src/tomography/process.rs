//! Single-qubit process tomography: linear inversion onto the Pauli-basis
//! χ followed by a CPTP projection.

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::error::{invalid, Error, Result};
use crate::quantum::matrix::{from_dynamic, hermitian_eigen, hermitize, psd_sqrt, to_dynamic, Axis, Mat2, Mat4, C64};
use crate::quantum::{bloch_to_density, BlochVector, KrausFamily, OperatorBasis, PhotonLabel, ProcessMatrix, SpinState};

use super::counts::{derive_seed, simulate_counts, CountRecord, MeasurementSetting};
use super::state::reconstruct_state_1q;

/// Largest accepted condition number of the input Gram matrix.
pub const MAX_INPUT_CONDITION: f64 = 1e6;

/// Four linearly independent probe states.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyInputSet {
    states: [SpinState; 4],
}

impl TomographyInputSet {
    pub fn new(states: [SpinState; 4]) -> Result<Self> {
        let gram = Matrix4::<f64>::from_fn(|i, j| {
            (states[i].matrix() * states[j].matrix()).trace().re
        });
        let sv = gram.singular_values();
        let (max, min) = (sv.max(), sv.min());
        if min <= 0.0 || max / min >= MAX_INPUT_CONDITION {
            return Err(invalid(format!(
                "tomography inputs are not linearly independent (Gram condition {:e})",
                if min > 0.0 { max / min } else { f64::INFINITY }
            )));
        }
        Ok(Self { states })
    }

    /// `{|ẑ⟩, |−ẑ⟩, |x̂⟩, |ŷ⟩}`.
    pub fn standard() -> Self {
        Self::new([
            SpinState::along(Axis::Z, 1.0),
            SpinState::along(Axis::Z, -1.0),
            SpinState::along(Axis::X, 1.0),
            SpinState::along(Axis::Y, 1.0),
        ])
        .expect("standard inputs are independent")
    }

    /// Pure states on the vertices of a regular tetrahedron. Every vertex
    /// has a non-zero overlap with both `|±x̂⟩`.
    pub fn tetrahedral() -> Self {
        let s = 1.0 / 3f64.sqrt();
        let v = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        Self::new(v.map(|b| bloch_to_density(&BlochVector::from(b)).expect("unit vector")))
            .expect("tetrahedral inputs are independent")
    }

    pub fn states(&self) -> &[SpinState; 4] {
        &self.states
    }
}

/// Solves `E(ρⱼ) = Σ χ_mn B_m ρⱼ B_n†` for χ in the Pauli basis. The
/// outputs may be unnormalized. The result is Hermitized but not projected.
pub fn linear_inversion(inputs: &TomographyInputSet, outputs: &[Mat2; 4]) -> Result<ProcessMatrix> {
    let b = OperatorBasis::Pauli.operators();
    let mut a = DMatrix::<C64>::zeros(16, 16);
    let mut y = DVector::<C64>::zeros(16);
    for (j, rho) in inputs.states.iter().enumerate() {
        for m in 0..4 {
            for n in 0..4 {
                let term = b[m] * rho.matrix() * b[n].adjoint();
                for e in 0..4 {
                    a[(4 * j + e, 4 * m + n)] = term[(e / 2, e % 2)];
                }
            }
        }
        for e in 0..4 {
            y[4 * j + e] = outputs[j][(e / 2, e % 2)];
        }
    }
    let x = a
        .lu()
        .solve(&y)
        .ok_or_else(|| Error::Numerical("process inversion system is singular".into()))?;
    let chi = Mat4::from_fn(|m, n| x[4 * m + n]);
    Ok(ProcessMatrix::new(hermitize(&chi), OperatorBasis::Pauli))
}

/// Nearest-CPTP map: negative eigenvalues of χ are truncated, then the
/// Kraus operators are renormalized as `Kᵢ T^{-1/2}` with `T = Σ Kᵢ†Kᵢ`.
pub fn project_cptp(chi: &ProcessMatrix) -> Result<ProcessMatrix> {
    let pauli = chi.to_basis(OperatorBasis::Pauli);
    let kraus = ProcessMatrix::new(hermitize(&pauli.chi), OperatorBasis::Pauli).to_kraus();
    let t = kraus.completeness();
    let (values, _) = hermitian_eigen(&to_dynamic(&t));
    if values[1] <= 1e-12 {
        return Err(Error::Numerical("projected map annihilates a state; cannot restore trace".into()));
    }
    let root = from_dynamic::<2>(&psd_sqrt(&to_dynamic(&t)));
    let inv_root = root
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular completeness operator".into()))?;
    let ops = kraus
        .operators()
        .iter()
        .map(|(k, _)| (k * inv_root, PhotonLabel::Unlabeled))
        .collect();
    let out = ProcessMatrix::from_kraus(&KrausFamily::new(ops));
    Ok(ProcessMatrix::new(hermitize(&out.chi), OperatorBasis::Pauli).to_basis(chi.basis))
}

/// Linear inversion followed by CPTP projection, in the Pauli basis.
pub fn reconstruct_process(inputs: &TomographyInputSet, outputs: &[SpinState; 4]) -> Result<ProcessMatrix> {
    let mats = [0, 1, 2, 3].map(|j| *outputs[j].matrix());
    project_cptp(&linear_inversion(inputs, &mats)?)
}

/// Result of a simulated tomography run: four inputs times three spin axes.
#[derive(Debug, Clone)]
pub struct ProcessTomographyRun {
    pub records: Vec<CountRecord>,
    pub outputs: [SpinState; 4],
    pub chi: ProcessMatrix,
}

/// Simulates the 12 measurement types with `n` repetitions each. Record
/// `(j, axis)` uses seed `derive_seed(seed, 3j + axis)`.
pub fn simulate_process_tomography(
    channel: &ProcessMatrix,
    inputs: &TomographyInputSet,
    n: u64,
    seed: u64,
) -> Result<ProcessTomographyRun> {
    channel.require_cptp()?;
    let mut records = Vec::with_capacity(12);
    let mut outputs = Vec::with_capacity(4);
    for (j, rho) in inputs.states.iter().enumerate() {
        let out = channel.apply(rho);
        let recs = Axis::ALL
            .iter()
            .map(|&axis| {
                let s = derive_seed(seed, (3 * j + axis.index()) as u64);
                Ok(simulate_counts(&out, &MeasurementSetting::spin(axis), n, s)?.tagged(&format!("in{j}")))
            })
            .collect::<Result<Vec<_>>>()?;
        outputs.push(reconstruct_state_1q(&recs)?);
        records.extend(recs);
    }
    let outputs: [SpinState; 4] = outputs.try_into().expect("four inputs");
    let chi = reconstruct_process(inputs, &outputs)?;
    Ok(ProcessTomographyRun { records, outputs, chi })
}

/// Reconstruction from exact output states.
pub fn exact_process_tomography(channel: &ProcessMatrix, inputs: &TomographyInputSet) -> Result<ProcessMatrix> {
    let outputs = inputs.states.clone().map(|rho| channel.apply(&rho));
    reconstruct_process(inputs, &outputs)
}
