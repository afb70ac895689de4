use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quantum::{JointState, SpinState};
use crate::scattering::{apply_background, detection_probability, Analyzer, JointScatteringMap, NoiseModel, Port};
use crate::tomography::counts::sample_binomial;
use crate::tomography::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub hwp_angle: f64,
    pub p_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizationScan {
    pub points: Vec<ScanPoint>,
    /// `A + B cos 4α + C sin 4α` least-squares coefficients.
    pub fit: [f64; 3],
    pub visibility: f64,
}

/// Least-squares fit of `p(α) = A + B cos 4α + C sin 4α` and the visibility
/// `√(B² + C²)/A`.
pub fn fit_visibility(points: &[ScanPoint]) -> Result<([f64; 3], f64)> {
    if points.len() < 3 {
        return Err(invalid("a visibility fit needs at least three angles"));
    }
    let a = DMatrix::from_fn(points.len(), 3, |i, j| {
        let x = 4.0 * points[i].hwp_angle;
        match j {
            0 => 1.0,
            1 => x.cos(),
            _ => x.sin(),
        }
    });
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.p_plus));
    let sol = a
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let (c0, c1, c2) = (sol[0], sol[1], sol[2]);
    if c0 <= 0.0 {
        return Err(Error::Numerical("fitted mean detection probability is not positive".into()));
    }
    Ok(([c0, c1, c2], (c1 * c1 + c2 * c2).sqrt() / c0))
}

fn scan_state(rho0: &SpinState, map: &JointScatteringMap, noise: &NoiseModel) -> Result<JointState> {
    apply_background(&map.apply(rho0), noise)
}

/// Port `+1` probability while the half-wave plate turns behind a
/// quarter-wave plate fixed at 45°.
pub fn polarization_scan(
    rho0: &SpinState,
    hwp_angles: &[f64],
    map: &JointScatteringMap,
    noise: &NoiseModel,
) -> Result<PolarizationScan> {
    let joint = scan_state(rho0, map, noise)?;
    let points: Vec<ScanPoint> = hwp_angles
        .iter()
        .map(|&a| ScanPoint {
            hwp_angle: a,
            p_plus: detection_probability(&joint, &Analyzer::new(FRAC_PI_4, a), Port::Plus),
        })
        .collect();
    let (fit, visibility) = fit_visibility(&points)?;
    Ok(PolarizationScan { points, fit, visibility })
}

/// Same scan with `n` detected photons per angle; angle `i` uses seed
/// `derive_seed(seed, i)`.
pub fn polarization_scan_sampled(
    rho0: &SpinState,
    hwp_angles: &[f64],
    map: &JointScatteringMap,
    noise: &NoiseModel,
    n: u64,
    seed: u64,
) -> Result<PolarizationScan> {
    let exact = polarization_scan(rho0, hwp_angles, map, noise)?;
    let points = exact
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (k, _) = sample_binomial(p.p_plus, n, derive_seed(seed, i as u64))?;
            Ok(ScanPoint { hwp_angle: p.hwp_angle, p_plus: k as f64 / n as f64 })
        })
        .collect::<Result<Vec<_>>>()?;
    let (fit, visibility) = fit_visibility(&points)?;
    Ok(PolarizationScan { points, fit, visibility })
}

/// Probability that the circular analyzer port agrees with the prepared
/// pointer state, averaged over `|x̂⟩` (expects `E₋`) and `|−x̂⟩` (expects
/// `E₊`).
pub fn pointer_readout_correlation(map: &JointScatteringMap, noise: &NoiseModel) -> Result<f64> {
    use crate::quantum::Axis;
    let analyzer = Analyzer::circular();
    let plus = scan_state(&SpinState::along(Axis::X, 1.0), map, noise)?;
    let minus = scan_state(&SpinState::along(Axis::X, -1.0), map, noise)?;
    Ok(0.5
        * (detection_probability(&plus, &analyzer, Port::Minus)
            + detection_probability(&minus, &analyzer, Port::Plus)))
}

/// `n` evenly spaced angles over `[0, π)`.
pub fn default_hwp_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect()
}
