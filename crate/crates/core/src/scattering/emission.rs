//! Single-photon emission and absorption operators on the spin.
//!
//! Field prefactors and the reduced dipole matrix element are dropped: only
//! relative weights survive post-selection on one detected photon, so every
//! family is rescaled by a single constant to `Σ K†K = I`.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::quantum::matrix::{hadamard, hermitize, sigma_dot, Mat2, Mat4, C64};
use crate::quantum::{JointState, KrausFamily, SpinState, Subsystem};

use super::geometry::ScatteringGeometry;
use super::polarization::{polarization_pair, PolarizationBasis, PolarizationVector};

/// Emission operators `(σ·Eᵢ)†` for photons emitted along `k̂`, one per
/// polarization of the chosen basis.
pub fn emission_kraus(k: &Vector3<f64>, basis: PolarizationBasis) -> Result<KrausFamily> {
    let ops = polarization_pair(k, basis)?
        .into_iter()
        .map(|(e, label)| (sigma_dot(&e.conj()), label))
        .collect();
    KrausFamily::new(ops).normalized()
}

/// `σ·E_L` for a linearly polarized excitation laser.
pub fn absorption_operator(laser: &PolarizationVector) -> Result<Mat2> {
    if !laser.is_real() {
        return Err(Error::Unsupported(
            "absorption is modelled for linear laser polarization only".into(),
        ));
    }
    Ok(sigma_dot(laser.components()))
}

/// Absorption of the laser photon followed by emission along `k̂`:
/// `Kᵢ ∝ (σ·Eᵢ)† (σ·E_L)`.
pub fn scattering_kraus(
    k: &Vector3<f64>,
    laser: &PolarizationVector,
    basis: PolarizationBasis,
) -> Result<KrausFamily> {
    let absorb = absorption_operator(laser)?;
    let ops = emission_kraus(k, basis)?
        .operators()
        .iter()
        .map(|(e, label)| (e * absorb, *label))
        .collect();
    KrausFamily::new(ops).normalized()
}

/// Isometry `Σᵢ Kᵢ ⊗ |Eᵢ⟩` from the spin into spin ⊗ photon, written in the
/// joint pointer basis (spin rows rotated to `{|x̂⟩,|−x̂⟩}`).
pub(crate) fn scattering_isometry(
    k: &Vector3<f64>,
    laser: &PolarizationVector,
) -> Result<nalgebra::Matrix4x2<C64>> {
    let family = scattering_kraus(k, laser, PolarizationBasis::Circular)?;
    let h = hadamard();
    let mut v = nalgebra::Matrix4x2::zeros();
    for (photon, (op, _)) in family.operators().iter().enumerate() {
        let rotated = h * op;
        for s in 0..2 {
            for t in 0..2 {
                v[(2 * s + photon, t)] = rotated[(s, t)];
            }
        }
    }
    Ok(v)
}

/// Joint spin-photon state after one scattering event with the photon
/// emitted along `k̂`, photon factor in the circular `{E₊, E₋}` basis.
pub fn scatter_joint_state(
    rho: &SpinState,
    k: &Vector3<f64>,
    laser: &PolarizationVector,
) -> Result<JointState> {
    let v = scattering_isometry(k, laser)?;
    let joint: Mat4 = v * rho.matrix() * v.adjoint();
    Ok(JointState::from_unchecked(hermitize(&joint)))
}

/// Spin state after scattering into the detector direction, photon traced out.
pub fn reduced_spin_after_scatter(rho: &SpinState, geometry: &ScatteringGeometry) -> Result<SpinState> {
    let joint = scatter_joint_state(rho, &geometry.detector()?, &PolarizationVector::laser_z())?;
    Ok(joint.partial_trace(Subsystem::Spin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::{c, pauli};
    use crate::quantum::{apply_kraus, concurrence, Axis, PhotonLabel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &Mat2, b: &Mat2, eps: f64) {
        assert!((a - b).norm() < eps, "{a} vs {b}");
    }

    fn random_direction(rng: &mut ChaCha8Rng) -> Vector3<f64> {
        loop {
            let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if v.norm() > 0.1 && v.norm() <= 1.0 {
                return v.normalize();
            }
        }
    }

    #[test]
    fn ladder_operators_along_z() {
        let fam = emission_kraus(&Vector3::z(), PolarizationBasis::Circular).unwrap();
        let lower = Mat2::new(c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.));
        close(fam.get(PhotonLabel::Plus).unwrap(), &lower, 1e-12);
        close(fam.get(PhotonLabel::Minus).unwrap(), &lower.adjoint(), 1e-12);
    }

    #[test]
    fn linear_basis_along_z() {
        let fam = emission_kraus(&Vector3::z(), PolarizationBasis::Linear).unwrap();
        let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        close(fam.get(PhotonLabel::First).unwrap(), &(pauli(Axis::X) * h), 1e-12);
        close(fam.get(PhotonLabel::Second).unwrap(), &(pauli(Axis::Y) * h), 1e-12);
    }

    #[test]
    fn families_are_complete_and_linear_ops_unitary_like() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = random_direction(&mut rng);
            for basis in [PolarizationBasis::Linear, PolarizationBasis::Circular] {
                assert!(emission_kraus(&k, basis).unwrap().is_trace_preserving());
                assert!(scattering_kraus(&k, &PolarizationVector::laser_z(), basis)
                    .unwrap()
                    .is_trace_preserving());
            }
            for (op, _) in emission_kraus(&k, PolarizationBasis::Linear).unwrap().operators() {
                let s = op.singular_values();
                assert!((s[0] - s[1]).abs() < 1e-9);
            }
        }
        assert!(emission_kraus(&Vector3::zeros(), PolarizationBasis::Linear).is_err());
    }

    #[test]
    fn aligned_spin_emits_one_helicity_and_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let k = random_direction(&mut rng);
            let up = crate::quantum::bloch_to_density(&k.into()).unwrap();
            let fam = emission_kraus(&k, PolarizationBasis::Circular).unwrap();
            let weights: Vec<f64> = fam
                .operators()
                .iter()
                .map(|(op, _)| (op * up.matrix() * op.adjoint()).trace().re)
                .collect();
            assert!((weights[0] - 1.0).abs() < 1e-12 && weights[1].abs() < 1e-12, "{weights:?}");
            let out = fam.operators()[0].0 * up.matrix() * fam.operators()[0].0.adjoint();
            let b = crate::quantum::state::bloch_of_matrix(&out);
            assert!((b.as_vector() + k).norm() < 1e-12);
        }
    }

    #[test]
    fn absorption() {
        close(&absorption_operator(&PolarizationVector::laser_z()).unwrap(), &pauli(Axis::Z), 1e-15);
        let x = PolarizationVector::linear(Vector3::x()).unwrap();
        let sx = absorption_operator(&x).unwrap();
        close(&sx, &pauli(Axis::X), 1e-15);
        close(&(sx * sx), &Mat2::identity(), 1e-15);
        let circ = polarization_pair(&Vector3::z(), PolarizationBasis::Circular).unwrap()[0].0;
        assert!(matches!(absorption_operator(&circ), Err(Error::Unsupported(_))));
    }

    #[test]
    fn pointer_projectors_for_detector_axis() {
        let fam = scattering_kraus(&Vector3::x(), &PolarizationVector::laser_z(), PolarizationBasis::Circular)
            .unwrap();
        let plus_x = SpinState::along(Axis::X, 1.0);
        let minus_x = SpinState::along(Axis::X, -1.0);
        let p = fam.get(PhotonLabel::Plus).unwrap();
        let m = fam.get(PhotonLabel::Minus).unwrap();
        close(&(p.adjoint() * p), minus_x.matrix(), 1e-12);
        close(&(m.adjoint() * m), plus_x.matrix(), 1e-12);
        let z = SpinState::along(Axis::Z, 1.0);
        close(apply_kraus(&fam, &z).unwrap().matrix(), SpinState::maximally_mixed().matrix(), 1e-12);
        close(apply_kraus(&fam, &plus_x).unwrap().matrix(), plus_x.matrix(), 1e-12);
    }

    #[test]
    fn joint_state_examples() {
        let k = Vector3::x();
        let laser = PolarizationVector::laser_z();
        let j = scatter_joint_state(&SpinState::along(Axis::X, 1.0), &k, &laser).unwrap();
        assert!((j.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
        assert!(concurrence(&j).unwrap() < 1e-9);

        let j = scatter_joint_state(&SpinState::along(Axis::Z, 1.0), &k, &laser).unwrap();
        assert!((concurrence(&j).unwrap() - 1.0).abs() < 1e-9);
        let m = j.matrix();
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-12 && (m[(2, 2)].re - 0.5).abs() < 1e-12);
        assert!((m[(1, 2)].norm() - 0.5).abs() < 1e-12);

        let j = scatter_joint_state(&SpinState::maximally_mixed(), &k, &laser).unwrap();
        assert!(concurrence(&j).unwrap() < 1e-9);
    }

    #[test]
    fn reduced_state_is_pointer_mixture() {
        let g = ScatteringGeometry::default();
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let rho = SpinState::pointer_superposition(a, b).unwrap();
        let out = reduced_spin_after_scatter(&rho, &g).unwrap();
        let expected = SpinState::along(Axis::X, 1.0).matrix() * c(0.36, 0.0)
            + SpinState::along(Axis::X, -1.0).matrix() * c(0.64, 0.0);
        close(out.matrix(), &expected, 1e-12);
        let mixed = SpinState::maximally_mixed();
        close(reduced_spin_after_scatter(&mixed, &g).unwrap().matrix(), mixed.matrix(), 1e-12);
    }

    #[test]
    fn marginal_matches_kraus_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let laser = PolarizationVector::laser_z();
        for _ in 0..20 {
            let k = random_direction(&mut rng);
            let b = random_direction(&mut rng) * rng.random::<f64>();
            let rho = crate::quantum::bloch_to_density(&b.into()).unwrap();
            let fam = scattering_kraus(&k, &laser, PolarizationBasis::Circular).unwrap();
            let direct = apply_kraus(&fam, &rho).unwrap();
            let traced = scatter_joint_state(&rho, &k, &laser).unwrap().partial_trace(Subsystem::Spin);
            close(direct.matrix(), traced.matrix(), 1e-12);
        }
    }
}
