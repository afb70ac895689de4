//! Process matrix of one scattering event, for a single photon direction and
//! averaged over the detected cone and Larmor phase window.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quantum::matrix::{c, Mat4};
use crate::quantum::{OperatorBasis, ProcessMatrix};

use super::geometry::{angles, ScatteringGeometry};

/// χ for a photon scattered along `k̂(θ, φ)` with `ẑ`-polarized excitation,
/// in the `{I, σx, −iσy, σz}` basis.
pub fn chi_single_direction(theta: f64, phi: f64) -> ProcessMatrix {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let s2t = (2.0 * theta).sin();
    let s2p = (2.0 * phi).sin();

    let a = c(2.0 * st * st, 0.0);
    let b = c(0.0, s2t * sp);
    let cc = c(-s2t * cp, 0.0);
    let d = c(2.0 * cp * cp + 2.0 * ct * ct * sp * sp, 0.0);
    let e = c(0.0, s2p * ct * ct - s2p);
    let f = c(2.0 * cp * cp * ct * ct + 2.0 * sp * sp, 0.0);
    let z = c(0.0, 0.0);

    #[rustfmt::skip]
    let chi = Mat4::new(
        a,           b,           cc, z,
        b.conj(),    d,           e,  z,
        cc.conj(),   e.conj(),    f,  z,
        z,           z,           z,  z,
    ) * c(0.25, 0.0);
    ProcessMatrix::new(chi, OperatorBasis::Pauli)
}

/// How the nutation range of detected photons is read off the aperture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaLimits {
    /// `θ' ∈ [θ_d − asin NA, θ_d + asin NA]` around the detector axis.
    #[default]
    Band,
    /// `θ' ∈ [−θ_max, θ_max]` with `θ_max = π/2 + asin NA`, taken literally.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Flat measure `dθ' dφ'`.
    #[default]
    Uniform,
    /// Solid-angle measure `|sin θ'| dθ' dφ'`.
    SolidAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingMethod {
    /// Tensor-product midpoint rule with this many nodes per axis.
    Quadrature { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingOptions {
    pub method: AveragingMethod,
    pub theta_limits: ThetaLimits,
    pub weighting: Weighting,
}

impl Default for AveragingOptions {
    fn default() -> Self {
        Self::quadrature(64)
    }
}

impl AveragingOptions {
    pub fn quadrature(nodes: usize) -> Self {
        Self {
            method: AveragingMethod::Quadrature { nodes },
            theta_limits: ThetaLimits::Band,
            weighting: Weighting::Uniform,
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: AveragingMethod::MonteCarlo { samples, seed },
            ..Self::quadrature(0)
        }
    }
}

/// Rectangle of scattering directions `[θ_lo, θ_hi] × [φ_lo, φ_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularWindow {
    pub theta: (f64, f64),
    pub phi: (f64, f64),
}

impl AngularWindow {
    pub fn from_geometry(geometry: &ScatteringGeometry, limits: ThetaLimits) -> Result<Self> {
        geometry.validate()?;
        let (theta_d, phi_d) = angles(&geometry.detector()?);
        let spread = geometry.numerical_aperture.asin();
        let theta = match limits {
            ThetaLimits::Band => (theta_d - spread, theta_d + spread),
            ThetaLimits::Literal => {
                let max = FRAC_PI_2 + spread;
                (-max, max)
            }
        };
        let center = phi_d + geometry.phase_center;
        let phi = (center - geometry.phase_halfwidth, center + geometry.phase_halfwidth);
        Ok(Self { theta, phi })
    }

    /// Midpoint nodes `(θ, φ, weight)` with weights summing to one.
    pub fn midpoint_nodes(&self, nodes: usize, weighting: Weighting) -> Result<Vec<(f64, f64, f64)>> {
        if nodes < 1 {
            return Err(invalid("quadrature needs at least one node per axis"));
        }
        let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
            let n = if hi > lo { nodes } else { 1 };
            let h = (hi - lo) / n as f64;
            (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
        };
        let thetas = axis(self.theta);
        let phis = axis(self.phi);
        let mut out = Vec::with_capacity(thetas.len() * phis.len());
        for &t in &thetas {
            let w = match weighting {
                Weighting::Uniform => 1.0,
                Weighting::SolidAngle => t.sin().abs(),
            };
            for &p in &phis {
                out.push((t, p, w));
            }
        }
        normalize_weights(out)
    }

    /// Seeded random directions `(θ, φ, weight)`, weights summing to one.
    /// Sample `i` is drawn from stream `i / CHUNK` of the ChaCha generator,
    /// so the set does not depend on the thread count.
    pub fn random_nodes(&self, samples: usize, seed: u64, weighting: Weighting) -> Result<Vec<(f64, f64, f64)>> {
        if samples < 1 {
            return Err(invalid("Monte-Carlo averaging needs at least one sample"));
        }
        if weighting == Weighting::SolidAngle && !(self.theta.0 >= 0.0 && self.theta.1 <= PI)
            && self.theta.0 != -self.theta.1
        {
            return Err(Error::Unsupported(
                "solid-angle sampling needs θ within [0, π] or a symmetric range".into(),
            ));
        }
        let window = *self;
        let chunks = samples.div_ceil(CHUNK);
        let nodes: Vec<(f64, f64, f64)> = (0..chunks)
            .into_par_iter()
            .flat_map_iter(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64);
                let count = CHUNK.min(samples - chunk * CHUNK);
                (0..count)
                    .map(|_| {
                        let theta = window.sample_theta(&mut rng, weighting);
                        let phi = lerp(window.phi, rng.random::<f64>());
                        (theta, phi, 1.0)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        normalize_weights(nodes)
    }

    fn sample_theta(&self, rng: &mut ChaCha8Rng, weighting: Weighting) -> f64 {
        let u: f64 = rng.random();
        match weighting {
            Weighting::Uniform => lerp(self.theta, u),
            Weighting::SolidAngle if self.theta.0 >= 0.0 && self.theta.1 <= PI => {
                // cos θ is uniform under the sin θ measure.
                let (c_lo, c_hi) = (self.theta.1.cos(), self.theta.0.cos());
                (c_lo + u * (c_hi - c_lo)).acos()
            }
            Weighting::SolidAngle => {
                let max = self.theta.1;
                let mag = (max.cos() + u * (1.0 - max.cos())).acos();
                if rng.random::<bool>() { mag } else { -mag }
            }
        }
    }
}

const CHUNK: usize = 8192;

fn lerp((lo, hi): (f64, f64), u: f64) -> f64 {
    lo + u * (hi - lo)
}

fn normalize_weights(mut nodes: Vec<(f64, f64, f64)>) -> Result<Vec<(f64, f64, f64)>> {
    let total: f64 = nodes.iter().map(|n| n.2).sum();
    if total <= 0.0 {
        return Err(invalid("averaging window has zero total weight"));
    }
    for n in &mut nodes {
        n.2 /= total;
    }
    Ok(nodes)
}

/// Integration nodes `(θ, φ, weight)` selected by `options`.
pub fn averaging_nodes(
    geometry: &ScatteringGeometry,
    options: &AveragingOptions,
) -> Result<Vec<(f64, f64, f64)>> {
    let window = AngularWindow::from_geometry(geometry, options.theta_limits)?;
    match options.method {
        AveragingMethod::Quadrature { nodes } => window.midpoint_nodes(nodes, options.weighting),
        AveragingMethod::MonteCarlo { samples, seed } => {
            window.random_nodes(samples, seed, options.weighting)
        }
    }
}

/// Averaged process matrix, with element-wise standard errors for
/// Monte-Carlo runs (real and imaginary parts separately).
#[derive(Debug, Clone)]
pub struct AveragedChi {
    pub chi: ProcessMatrix,
    pub standard_error: Option<(Matrix4<f64>, Matrix4<f64>)>,
}

/// χ averaged over the detection window of `geometry`.
pub fn chi_averaged(geometry: &ScatteringGeometry, options: &AveragingOptions) -> Result<AveragedChi> {
    let nodes = averaging_nodes(geometry, options)?;
    match options.method {
        AveragingMethod::Quadrature { .. } => {
            let chi = nodes
                .par_iter()
                .map(|&(t, p, w)| chi_single_direction(t, p).chi * c(w, 0.0))
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Mat4::zeros(), |acc, m| acc + m);
            Ok(AveragedChi { chi: ProcessMatrix::new(chi, OperatorBasis::Pauli), standard_error: None })
        }
        AveragingMethod::MonteCarlo { .. } => {
            let n = nodes.len() as f64;
            // Per-chunk sums, reduced in chunk order.
            let partial: Vec<(Mat4, Matrix4<f64>, Matrix4<f64>)> = nodes
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut sum = Mat4::zeros();
                    let mut sq_re = Matrix4::<f64>::zeros();
                    let mut sq_im = Matrix4::<f64>::zeros();
                    for &(t, p, _) in chunk {
                        let m = chi_single_direction(t, p).chi;
                        sum += m;
                        sq_re += m.map(|z| z.re * z.re);
                        sq_im += m.map(|z| z.im * z.im);
                    }
                    (sum, sq_re, sq_im)
                })
                .collect();
            let (sum, sq_re, sq_im) = partial.into_iter().fold(
                (Mat4::zeros(), Matrix4::zeros(), Matrix4::zeros()),
                |(a, b, cc), (x, y, z)| (a + x, b + y, cc + z),
            );
            let mean = sum / c(n, 0.0);
            let se = |sq: Matrix4<f64>, mean_part: Matrix4<f64>| {
                let denom = (n - 1.0).max(1.0);
                Matrix4::from_fn(|i, j| {
                    let var = (sq[(i, j)] - n * mean_part[(i, j)].powi(2)).max(0.0) / denom;
                    (var / n).sqrt()
                })
            };
            let se_re = se(sq_re, mean.map(|z| z.re));
            let se_im = se(sq_im, mean.map(|z| z.im));
            Ok(AveragedChi {
                chi: ProcessMatrix::new(mean, OperatorBasis::Pauli),
                standard_error: Some((se_re, se_im)),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(d: [f64; 4]) -> Mat4 {
        Mat4::from_diagonal(&nalgebra::Vector4::from(d.map(|x| c(x, 0.0))))
    }

    #[test]
    fn spot_values() {
        let chi = chi_single_direction(FRAC_PI_2, 0.0);
        assert!((chi.chi - diag([0.5, 0.5, 0.0, 0.0])).norm() <= 1e-12);
        for phi in [0.0, 0.7, 2.0, 5.5] {
            let chi = chi_single_direction(0.0, phi);
            assert!((chi.chi - diag([0.0, 0.5, 0.5, 0.0])).norm() <= 1e-12);
        }
    }

    #[test]
    fn grid_is_cptp() {
        for i in 0..20 {
            for j in 0..40 {
                let theta = PI * i as f64 / 19.0;
                let phi = 2.0 * PI * j as f64 / 40.0;
                let chi = chi_single_direction(theta, phi);
                assert!(chi.tp_defect() <= 1e-9, "TP at {theta},{phi}");
                assert!(chi.min_eigenvalue() >= -1e-9, "CP at {theta},{phi}");
            }
        }
    }

    #[test]
    fn degenerate_window_is_single_direction() {
        let g = ScatteringGeometry {
            numerical_aperture: 1e-12,
            phase_halfwidth: 0.0,
            ..Default::default()
        };
        let avg = chi_averaged(&g, &AveragingOptions::default()).unwrap();
        assert!((avg.chi.chi - chi_single_direction(FRAC_PI_2, 0.0).chi).norm() < 1e-10);
    }

    #[test]
    fn averaged_is_trace_preserving() {
        let avg = chi_averaged(&ScatteringGeometry::default(), &AveragingOptions::default()).unwrap();
        assert_abs_diff_eq!(avg.chi.tp_defect(), 0.0, epsilon = 1e-12);
        assert!(avg.chi.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let g = ScatteringGeometry::default();
        let a = chi_averaged(&g, &AveragingOptions::monte_carlo(20_000, 7)).unwrap();
        let b = chi_averaged(&g, &AveragingOptions::monte_carlo(20_000, 7)).unwrap();
        assert_eq!(a.chi, b.chi);
        let d = chi_averaged(&g, &AveragingOptions::monte_carlo(20_000, 8)).unwrap();
        assert_ne!(a.chi, d.chi);
        assert!(chi_averaged(&g, &AveragingOptions::monte_carlo(0, 7)).is_err());
        assert!(chi_averaged(&g, &AveragingOptions::quadrature(0)).is_err());
    }

    #[test]
    fn literal_limits_cover_negative_nutation() {
        let w = AngularWindow::from_geometry(&ScatteringGeometry::default(), ThetaLimits::Literal).unwrap();
        assert!(w.theta.0 < 0.0);
        assert_abs_diff_eq!(w.theta.1, FRAC_PI_2 + 0.31f64.asin(), epsilon = 1e-15);
    }
}
