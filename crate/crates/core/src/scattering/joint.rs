use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::Result;
use crate::quantum::matrix::{c, hermitize, Mat2, Mat4};
use crate::quantum::{JointState, SpinState};

use super::chi::{averaging_nodes, AveragingOptions};
use super::emission::scattering_isometry;
use super::geometry::{direction, ScatteringGeometry};
use super::polarization::PolarizationVector;

/// Linear map from the spin to the joint spin-photon state, averaged over
/// detected directions. Stored as the images of the four matrix units
/// `|a⟩⟨b|` of the `σz` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct JointScatteringMap {
    units: [Mat4; 4],
}

impl JointScatteringMap {
    /// Single emission direction `k̂`.
    pub fn point(k: &Vector3<f64>, laser: &PolarizationVector) -> Result<Self> {
        let v = scattering_isometry(k, laser)?;
        Ok(Self { units: std::array::from_fn(|u| v * unit(u) * v.adjoint()) })
    }

    /// Photon along `x̂`, laser along `ẑ`.
    pub fn ideal() -> Self {
        Self::point(&Vector3::x(), &PolarizationVector::laser_z())
            .expect("x̂ is a valid emission direction")
    }

    /// Average over the detection window of `geometry` with a `ẑ` laser.
    pub fn averaged(geometry: &ScatteringGeometry, options: &AveragingOptions) -> Result<Self> {
        let nodes = averaging_nodes(geometry, options)?;
        let laser = PolarizationVector::laser_z();
        let parts: Vec<[Mat4; 4]> = nodes
            .par_iter()
            .map(|&(t, p, w)| {
                let m = Self::point(&direction(t, p), &laser)?;
                Ok(m.units.map(|u| u * c(w, 0.0)))
            })
            .collect::<Result<_>>()?;
        let mut units = [Mat4::zeros(); 4];
        for part in parts {
            for (acc, u) in units.iter_mut().zip(part) {
                *acc += u;
            }
        }
        Ok(Self { units })
    }

    pub fn apply_matrix(&self, rho: &Mat2) -> Mat4 {
        (0..4).map(|u| self.units[u] * rho[(u / 2, u % 2)]).sum()
    }

    pub fn apply(&self, rho: &SpinState) -> JointState {
        JointState::from_unchecked(hermitize(&self.apply_matrix(rho.matrix())))
    }
}

fn unit(u: usize) -> Mat2 {
    let mut m = Mat2::zeros();
    m[(u / 2, u % 2)] = c(1.0, 0.0);
    m
}
