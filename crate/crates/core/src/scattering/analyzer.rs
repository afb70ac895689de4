//! Wave plates and polarizing beam splitter acting on the photon qubit.
//!
//! Jones vectors use the lab linear basis `(H, V)`, with `H` transmitted to
//! port `+1`. The photon qubit of a [`JointState`] is in the `{E₊, E₋}` basis
//! with `E± = (H ± iV)/√2`.

use std::f64::consts::FRAC_PI_4;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::quantum::matrix::{c, identity2, kron2, trace, Axis, Mat2};
use crate::quantum::JointState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WavePlateKind {
    Quarter,
    Half,
}

/// Retarder with its fast axis at `angle` radians from `H`. Angles are
/// meaningful mod π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePlateSetting {
    pub kind: WavePlateKind,
    pub angle: f64,
}

impl WavePlateSetting {
    pub fn quarter(angle: f64) -> Self {
        Self { kind: WavePlateKind::Quarter, angle }
    }

    pub fn half(angle: f64) -> Self {
        Self { kind: WavePlateKind::Half, angle }
    }

    pub fn jones(&self) -> Mat2 {
        let (s, co) = self.angle.sin_cos();
        let rot = Matrix2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0));
        let retard = match self.kind {
            WavePlateKind::Quarter => c(0.0, 1.0),
            WavePlateKind::Half => c(-1.0, 0.0),
        };
        let diag = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), retard);
        rot * diag * rot.transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    Plus,
    Minus,
}

impl Port {
    pub fn sign(self) -> f64 {
        match self {
            Port::Plus => 1.0,
            Port::Minus => -1.0,
        }
    }
}

/// Quarter-wave plate, then half-wave plate, then PBS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Analyzer {
    pub qwp: WavePlateSetting,
    pub hwp: WavePlateSetting,
}

impl Analyzer {
    pub fn new(qwp_angle: f64, hwp_angle: f64) -> Self {
        Self { qwp: WavePlateSetting::quarter(qwp_angle), hwp: WavePlateSetting::half(hwp_angle) }
    }

    /// Port `+1` detects `E₊`, port `−1` detects `E₋`.
    pub fn circular() -> Self {
        Self::new(FRAC_PI_4, 0.0)
    }

    /// Measures the photon Pauli operator along `axis`, port `+1` being the
    /// `+1` eigenvalue.
    pub fn for_photon_axis(axis: Axis) -> Self {
        match axis {
            Axis::X => Self::new(0.0, 0.0),
            Axis::Y => Self::new(FRAC_PI_4, FRAC_PI_4 / 2.0),
            Axis::Z => Self::circular(),
        }
    }

    pub fn jones(&self) -> Mat2 {
        self.hwp.jones() * self.qwp.jones()
    }
}

fn circular_to_linear() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(h, 0.0), c(h, 0.0), c(0.0, h), c(0.0, -h))
}

/// Projector onto the photon states routed to `port`, in the `{E₊, E₋}`
/// basis.
pub fn analyzer_povm(analyzer: &Analyzer, port: Port) -> Mat2 {
    let mut pbs = Mat2::zeros();
    let k = if port == Port::Plus { 0 } else { 1 };
    pbs[(k, k)] = c(1.0, 0.0);
    let j = analyzer.jones() * circular_to_linear();
    j.adjoint() * pbs * j
}

/// `Tr[ρ (I ⊗ Π_port)]`.
pub fn detection_probability(rho: &JointState, analyzer: &Analyzer, port: Port) -> f64 {
    let op = kron2(&identity2(), &analyzer_povm(analyzer, port));
    trace(&(rho.matrix() * op)).re.clamp(0.0, 1.0)
}

/// `⟨I ⊗ σ⟩` for the photon observable measured by `analyzer`.
pub fn photon_expectation(rho: &JointState, analyzer: &Analyzer) -> f64 {
    detection_probability(rho, analyzer, Port::Plus) - detection_probability(rho, analyzer, Port::Minus)
}
