//! Qubit channels in Kraus, process-matrix and Bloch-affine form.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::matrix::*;
use super::state::{bloch_of_matrix, BlochVector, SpinState};
use crate::error::{invalid, Result};

/// Classical tag attached to a Kraus operator: which photon polarization
/// was emitted on that branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhotonLabel {
    /// `E₊`, the positive-helicity circular polarization.
    Plus,
    /// `E₋`, the negative-helicity circular polarization.
    Minus,
    /// `E₁`, first linear polarization.
    First,
    /// `E₂`, second linear polarization.
    Second,
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    ops: Vec<(Mat2, PhotonLabel)>,
}

impl KrausFamily {
    /// Takes the operators as given; nothing is checked until the family is
    /// applied or normalized.
    pub fn new(ops: Vec<(Mat2, PhotonLabel)>) -> Self {
        Self { ops }
    }

    pub fn identity() -> Self {
        Self::new(vec![(identity2(), PhotonLabel::Unlabeled)])
    }

    pub fn operators(&self) -> &[(Mat2, PhotonLabel)] {
        &self.ops
    }

    pub fn get(&self, label: PhotonLabel) -> Option<&Mat2> {
        self.ops.iter().find(|(_, l)| *l == label).map(|(k, _)| k)
    }

    /// `Σ K†K`.
    pub fn completeness(&self) -> Mat2 {
        self.ops.iter().map(|(k, _)| k.adjoint() * k).sum()
    }

    pub fn completeness_defect(&self) -> f64 {
        (self.completeness() - identity2()).norm()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness_defect() <= CHANNEL_TOL
    }

    /// Rescales every operator by one common constant so that `Σ K†K = I`.
    /// Fails if `Σ K†K` is not proportional to the identity.
    pub fn normalized(self) -> Result<Self> {
        let s = self.completeness();
        let scale = trace(&s).re / 2.0;
        if scale <= 0.0 {
            return Err(invalid("Kraus family has zero weight"));
        }
        let defect = (s * c(1.0 / scale, 0.0) - identity2()).norm();
        if defect > CHANNEL_TOL {
            return Err(invalid(format!(
                "Σ K†K is not proportional to the identity (defect {defect:e})"
            )));
        }
        let f = c(1.0 / scale.sqrt(), 0.0);
        Ok(Self::new(self.ops.into_iter().map(|(k, l)| (k * f, l)).collect()))
    }

    pub fn apply_matrix(&self, rho: &Mat2) -> Mat2 {
        self.ops.iter().map(|(k, _)| k * rho * k.adjoint()).sum()
    }
}

/// Applies a trace-preserving Kraus family.
pub fn apply_kraus(family: &KrausFamily, rho: &SpinState) -> Result<SpinState> {
    if !family.is_trace_preserving() {
        return Err(invalid(format!(
            "Kraus family is not trace preserving (defect {:e})",
            family.completeness_defect()
        )));
    }
    Ok(SpinState::from_unchecked(hermitize(&family.apply_matrix(rho.matrix()))))
}

/// Operator basis a process matrix is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorBasis {
    /// `{I, σx, −iσy, σz}`.
    Pauli,
    /// `{(I+σx)/2, (I−σx)/2, −iσy, σz}`: projections on `|±x̂⟩` first.
    Reporting,
}

impl OperatorBasis {
    pub fn operators(self) -> [Mat2; 4] {
        let [x, y, z] = paulis();
        let i = identity2();
        let miy = y * c(0.0, -1.0);
        match self {
            OperatorBasis::Pauli => [i, x, miy, z],
            OperatorBasis::Reporting => [(i + x) * c(0.5, 0.0), (i - x) * c(0.5, 0.0), miy, z],
        }
    }

    fn vectorized(self) -> Mat4 {
        let ops = self.operators();
        Mat4::from_fn(|r, col| ops[col][(r / 2, r % 2)])
    }
}

/// `ρ ↦ Σ χ_mn B_m ρ B_n†` on a fixed operator basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessMatrix {
    pub basis: OperatorBasis,
    #[serde(with = "json")]
    pub chi: Mat4,
}

impl ProcessMatrix {
    pub fn new(chi: Mat4, basis: OperatorBasis) -> Self {
        Self { basis, chi }
    }

    pub fn identity() -> Self {
        let mut chi = Mat4::zeros();
        chi[(0, 0)] = c(1.0, 0.0);
        Self::new(chi, OperatorBasis::Pauli)
    }

    /// Process matrix of a Kraus family, in the Pauli basis.
    pub fn from_kraus(family: &KrausFamily) -> Self {
        let basis = OperatorBasis::Pauli.operators();
        let mut chi = Mat4::zeros();
        for (k, _) in family.operators() {
            // Tr(B_m† B_n) = 2δ_mn for the Pauli basis.
            let coeff: Vec<C64> = basis
                .iter()
                .map(|b| trace(&(b.adjoint() * k)) * c(0.5, 0.0))
                .collect();
            for m in 0..4 {
                for n in 0..4 {
                    chi[(m, n)] += coeff[m] * coeff[n].conj();
                }
            }
        }
        Self::new(chi, OperatorBasis::Pauli)
    }

    /// Kraus operators from the eigendecomposition of the Hermitian part of χ.
    /// Negative eigenvalues are dropped.
    pub fn to_kraus(&self) -> KrausFamily {
        let basis = self.basis.operators();
        let (values, vectors) = hermitian_eigen(&to_dynamic(&hermitize(&self.chi)));
        let ops = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(k, v)| {
                let op: Mat2 = (0..4)
                    .map(|m| basis[m] * vectors[(m, k)] * c(v.sqrt(), 0.0))
                    .sum();
                (op, PhotonLabel::Unlabeled)
            })
            .collect();
        KrausFamily::new(ops)
    }

    pub fn to_basis(&self, target: OperatorBasis) -> Self {
        if target == self.basis {
            return self.clone();
        }
        // B_m = Σ_j A_mj B'_j  ⇒  χ' = Aᵀ χ A*.
        let from = self.basis.vectorized();
        let to = target.vectorized();
        let a_t = to.try_inverse().expect("operator bases are invertible") * from;
        let a = a_t.transpose();
        Self::new(a_t * self.chi * a.map(|z| z.conj()), target)
    }

    pub fn apply_matrix(&self, rho: &Mat2) -> Mat2 {
        let b = self.basis.operators();
        let mut out = Mat2::zeros();
        for m in 0..4 {
            let left = b[m] * rho;
            for n in 0..4 {
                let w = self.chi[(m, n)];
                if w != c(0.0, 0.0) {
                    out += left * b[n].adjoint() * w;
                }
            }
        }
        out
    }

    /// Applies the channel. The output is Hermitized but not otherwise
    /// projected, so only CPTP matrices give valid states.
    pub fn apply(&self, rho: &SpinState) -> SpinState {
        SpinState::from_unchecked(hermitize(&self.apply_matrix(rho.matrix())))
    }

    /// `Σ χ_mn B_n† B_m`; equals the identity for trace-preserving maps.
    pub fn tp_operator(&self) -> Mat2 {
        let b = self.basis.operators();
        let mut out = Mat2::zeros();
        for m in 0..4 {
            for n in 0..4 {
                out += b[n].adjoint() * b[m] * self.chi[(m, n)];
            }
        }
        out
    }

    pub fn tp_defect(&self) -> f64 {
        (self.tp_operator() - identity2()).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (values, _) = hermitian_eigen(&to_dynamic(&hermitize(&self.chi)));
        values[3]
    }

    pub fn is_cptp(&self, tol: f64) -> bool {
        hermiticity_defect(&self.chi) <= tol && self.min_eigenvalue() >= -tol && self.tp_defect() <= tol
    }

    pub fn require_cptp(&self) -> Result<()> {
        if self.is_cptp(CHANNEL_TOL) {
            Ok(())
        } else {
            Err(invalid(format!(
                "process matrix is not CPTP (min eigenvalue {:e}, TP defect {:e})",
                self.min_eigenvalue(),
                self.tp_defect()
            )))
        }
    }

    /// Same matrix scaled to unit trace, for side-by-side display of
    /// matrices written in non-normalized bases.
    pub fn unit_trace(&self) -> Self {
        let t = trace(&self.chi);
        Self::new(self.chi / t, self.basis)
    }

    pub fn frobenius_distance(&self, other: &ProcessMatrix) -> f64 {
        let other = other.to_basis(self.basis);
        (self.chi - other.chi).norm()
    }
}

/// Bloch-picture form of a qubit channel: `b ↦ M b + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl AffineMap {
    pub fn apply(&self, b: &BlochVector) -> BlochVector {
        BlochVector::from(self.linear * b.as_vector() + self.translation)
    }
}

pub fn chi_to_affine(chi: &ProcessMatrix) -> AffineMap {
    let s = paulis();
    let half = c(0.5, 0.0);
    let image_of_identity = chi.apply_matrix(&identity2());
    let t = bloch_of_matrix(&(image_of_identity * half)).as_vector();
    let mut linear = Matrix3::zeros();
    for j in 0..3 {
        // E(σ_j)/2 has Bloch vector equal to column j of M.
        let col = bloch_of_matrix(&(chi.apply_matrix(&s[j]) * half)).as_vector();
        linear.set_column(j, &col);
    }
    AffineMap { linear, translation: t }
}
