use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Detection geometry of the scattered photon and the Larmor phase window
/// used for stroboscopic post-selection. Angles are in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatteringGeometry {
    pub detector_direction: [f64; 3],
    pub numerical_aperture: f64,
    pub phase_center: f64,
    pub phase_halfwidth: f64,
    /// Angular Larmor frequency. Informational only; precession enters
    /// through the phase window.
    pub larmor_frequency: f64,
}

impl Default for ScatteringGeometry {
    fn default() -> Self {
        Self {
            detector_direction: [1.0, 0.0, 0.0],
            numerical_aperture: 0.31,
            phase_center: 0.0,
            phase_halfwidth: PI / 32.0,
            larmor_frequency: 2.0 * PI * 3.5e6,
        }
    }
}

impl ScatteringGeometry {
    pub fn validate(&self) -> Result<()> {
        let na = self.numerical_aperture;
        if !(na > 0.0 && na < 1.0) {
            return Err(invalid(format!("numerical_aperture must lie in (0,1), got {na}")));
        }
        let w = self.phase_halfwidth;
        if !(0.0..=PI).contains(&w) {
            return Err(invalid(format!("phase_halfwidth must lie in [0,π], got {w}")));
        }
        if !self.phase_center.is_finite() {
            return Err(invalid("phase_center must be finite"));
        }
        self.detector()?;
        Ok(())
    }

    pub fn detector(&self) -> Result<Vector3<f64>> {
        unit(Vector3::from(self.detector_direction))
    }

    /// Full phase window in degrees.
    pub fn window_degrees(&self) -> f64 {
        2.0 * self.phase_halfwidth.to_degrees()
    }

    pub fn with_window_degrees(mut self, full_width_deg: f64) -> Self {
        self.phase_halfwidth = full_width_deg.to_radians() / 2.0;
        self
    }
}

/// Post-selection noise: the fraction of single-click events that carry no
/// polarization information (dark counts, one photon of a scattered pair).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub background_fraction: f64,
    /// Informational.
    pub detection_efficiency: f64,
    /// Informational.
    pub scatter_probability: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            background_fraction: 0.125,
            detection_efficiency: 1.0 / 400.0,
            scatter_probability: 0.075,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self { background_fraction: 0.0, ..Self::default() }
    }

    pub fn with_background(p: f64) -> Self {
        Self { background_fraction: p, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.background_fraction;
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("background_fraction must lie in [0,1], got {p}")));
        }
        Ok(())
    }
}

pub fn unit(v: Vector3<f64>) -> Result<Vector3<f64>> {
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(invalid("direction must be a non-zero finite vector"));
    }
    Ok(v / n)
}

/// `k̂(θ, φ)` with nutation `θ` from `ẑ` and precession `φ` from `x̂`.
pub fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Spherical angles `(θ, φ)` of a unit vector.
pub fn angles(k: &Vector3<f64>) -> (f64, f64) {
    (k.z.clamp(-1.0, 1.0).acos(), k.y.atan2(k.x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ScatteringGeometry::default().validate().unwrap();
        NoiseModel::default().validate().unwrap();
        assert!((ScatteringGeometry::default().window_degrees() - 11.25).abs() < 1e-12);
    }

    #[test]
    fn json_defaults_and_unknown_fields() {
        let g: ScatteringGeometry = serde_json::from_str(r#"{"numerical_aperture": 0.2}"#).unwrap();
        assert_eq!(g.numerical_aperture, 0.2);
        assert_eq!(g.phase_halfwidth, PI / 32.0);
        assert!(serde_json::from_str::<ScatteringGeometry>(r#"{"na": 0.2}"#).is_err());
        let n: NoiseModel = serde_json::from_str("{}").unwrap();
        assert_eq!(n.background_fraction, 0.125);
    }

    #[test]
    fn invalid_geometry() {
        let mut g = ScatteringGeometry { numerical_aperture: 1.0, ..Default::default() };
        assert!(g.validate().is_err());
        g.numerical_aperture = 0.3;
        g.phase_halfwidth = 4.0;
        assert!(g.validate().is_err());
        g.phase_halfwidth = 0.1;
        g.detector_direction = [0.0; 3];
        assert!(g.validate().is_err());
        assert!(NoiseModel::with_background(1.5).validate().is_err());
    }
}
