use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quantum::matrix::{c, C64};
use crate::quantum::PhotonLabel;

use super::geometry::unit;

/// Complex unit polarization vector transverse to its propagation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationVector {
    components: [C64; 3],
}

impl PolarizationVector {
    pub fn new(components: [C64; 3], propagation: &Vector3<f64>) -> Result<Self> {
        let norm: f64 = components.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("polarization must be unit (E·E* = {norm})")));
        }
        let k = unit(*propagation)?;
        let along: C64 = (0..3).map(|i| components[i] * k[i]).sum();
        if along.norm() > 1e-12 {
            return Err(invalid("polarization is not transverse to propagation"));
        }
        Ok(Self { components })
    }

    /// Real linear polarization; `propagation` may be any direction normal to it.
    pub fn linear(direction: Vector3<f64>) -> Result<Self> {
        let e = unit(direction)?;
        Ok(Self { components: [c(e.x, 0.0), c(e.y, 0.0), c(e.z, 0.0)] })
    }

    /// The excitation laser of the experiment: polarized along `ẑ`.
    pub fn laser_z() -> Self {
        Self::linear(Vector3::z()).expect("ẑ is a unit vector")
    }

    pub fn components(&self) -> &[C64; 3] {
        &self.components
    }

    pub fn conj(&self) -> [C64; 3] {
        self.components.map(|z| z.conj())
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|z| z.im.abs() <= 1e-15)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationBasis {
    Linear,
    Circular,
}

/// Right-handed transverse frame `(e₁, e₂, k̂)` with `e₁ ∝ ẑ × k̂`.
///
/// For `k̂ = x̂` this is `(ŷ, ẑ)`; along `±ẑ` the frame falls back to
/// `e₁ = x̂`. The frame varies continuously with `k̂` away from the poles,
/// which is what lets a fixed lab analyzer follow nearby directions.
pub fn transverse_frame(k: &Vector3<f64>) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let k = unit(*k)?;
    let cross = Vector3::z().cross(&k);
    let e1 = if cross.norm() < 1e-12 { Vector3::x() } else { cross.normalize() };
    let e2 = k.cross(&e1);
    Ok((e1, e2))
}

/// Orthonormal polarization pair spanning the plane normal to `k̂`.
///
/// Circular: `E± = (e₁ ± i e₂)/√2`, so that for `k̂ = ẑ` the emission
/// operators `σ·E±*` are the ladder operators `√2 σ∓`.
pub fn polarization_pair(
    k: &Vector3<f64>,
    basis: PolarizationBasis,
) -> Result<[(PolarizationVector, PhotonLabel); 2]> {
    let (e1, e2) = transverse_frame(k)?;
    let real = |v: Vector3<f64>| [c(v.x, 0.0), c(v.y, 0.0), c(v.z, 0.0)];
    let pair = match basis {
        PolarizationBasis::Linear => [(real(e1), PhotonLabel::First), (real(e2), PhotonLabel::Second)],
        PolarizationBasis::Circular => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let circ = |s: f64| -> [C64; 3] {
                std::array::from_fn(|i| c(e1[i] * h, s * e2[i] * h))
            };
            [(circ(1.0), PhotonLabel::Plus), (circ(-1.0), PhotonLabel::Minus)]
        }
    };
    Ok(pair.map(|(v, l)| (PolarizationVector { components: v }, l)))
}
