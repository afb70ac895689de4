use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::quantum::matrix::{c, from_dynamic, hermitize, identity2, pauli, project_to_density, to_dynamic, Axis, Mat2, Mat4};
use crate::quantum::{JointState, SpinState};

use super::counts::{photon_axis_of, CountRecord, MeasurementSetting};

/// `(I + b·σ)/2` projected onto the density matrices.
pub fn state_from_bloch_estimate(b: [f64; 3]) -> Result<SpinState> {
    let [sx, sy, sz] = [pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z)];
    let m: Mat2 = (identity2() + sx * c(b[0], 0.0) + sy * c(b[1], 0.0) + sz * c(b[2], 0.0)) * c(0.5, 0.0);
    let p = project_to_density(&to_dynamic(&m))?;
    SpinState::new(hermitize(&from_dynamic::<2>(&p)))
}

/// Single-qubit state from one unconditioned spin record per axis.
pub fn reconstruct_state_1q(records: &[CountRecord]) -> Result<SpinState> {
    let mut b = [None; 3];
    for r in records {
        if r.port.is_some() || r.setting.photon_analyzer.is_some() {
            continue;
        }
        if let Some(axis) = r.setting.spin_axis {
            b[axis.index()] = Some(r.mean());
        }
    }
    let mut out = [0.0; 3];
    for axis in Axis::ALL {
        out[axis.index()] = b[axis.index()]
            .ok_or_else(|| invalid(format!("no record for spin axis {}", axis.label())))?;
    }
    state_from_bloch_estimate(out)
}

/// Key of a two-qubit Pauli expectation, `None` being the identity factor.
pub type PauliPair = (Option<Axis>, Option<Axis>);

/// All 15 non-trivial two-qubit Pauli settings, spin factor first.
pub fn two_qubit_settings() -> Vec<MeasurementSetting> {
    let opts = [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)];
    let mut out = Vec::with_capacity(15);
    for s in opts {
        for p in opts {
            if let Ok(set) = MeasurementSetting::pauli(s, p) {
                out.push(set);
            }
        }
    }
    out
}

/// `ρ = ¼ Σ ⟨σᵢ⊗σⱼ⟩ σᵢ⊗σⱼ` followed by the PSD projection. Missing pairs
/// are an error; `(None, None)` is implied.
pub fn joint_from_expectations(expect: &BTreeMap<PauliPair, f64>) -> Result<JointState> {
    let mut m = Mat4::identity() * c(0.25, 0.0);
    for set in two_qubit_settings() {
        let key = (set.spin_axis, set.photon_analyzer.and_then(|a| photon_axis_of(&a)));
        let v = expect
            .get(&key)
            .ok_or_else(|| invalid(format!("missing two-qubit setting {}", set.id())))?;
        m += set.joint_observable() * c(v / 4.0, 0.0);
    }
    let p = project_to_density(&to_dynamic(&m))?;
    JointState::new(hermitize(&from_dynamic::<4>(&p)))
}

/// Two-qubit state from Pauli-correlator records; analyzers must be set to
/// one of the photon Pauli axes.
pub fn reconstruct_state_2q(records: &[CountRecord]) -> Result<JointState> {
    let mut expect = BTreeMap::new();
    for r in records {
        if r.port.is_some() {
            continue;
        }
        let photon = match r.setting.photon_analyzer {
            None => None,
            Some(a) => Some(photon_axis_of(&a).ok_or_else(|| {
                invalid("analyzer setting is not a photon Pauli measurement")
            })?),
        };
        expect.insert((r.setting.spin_axis, photon), r.mean());
    }
    joint_from_expectations(&expect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{concurrence, fidelity, joint_pure};
    use crate::tomography::counts::{derive_seed, simulate_counts, Measurable};

    fn exact_records<S: Measurable>(s: &S, settings: &[MeasurementSetting]) -> BTreeMap<PauliPair, f64> {
        settings
            .iter()
            .map(|set| {
                let key = (set.spin_axis, set.photon_analyzer.and_then(|a| photon_axis_of(&a)));
                (key, s.expectation(set).unwrap())
            })
            .collect()
    }

    #[test]
    fn noiseless_1q_round_trip() {
        let s = SpinState::along(Axis::X, 1.0);
        let b = s.bloch();
        let r = state_from_bloch_estimate([b.x, b.y, b.z]).unwrap();
        assert!((r.matrix() - s.matrix()).norm() < 1e-12);
    }

    #[test]
    fn outside_ball_lands_on_surface() {
        let r = state_from_bloch_estimate([0.9, 0.5, 0.3]).unwrap();
        assert!((r.bloch().norm() - 1.0).abs() < 1e-12);
        assert!((r.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_axis_rejected() {
        let s = SpinState::maximally_mixed();
        let recs: Vec<_> = [Axis::X, Axis::Y]
            .iter()
            .map(|&a| simulate_counts(&s, &MeasurementSetting::spin(a), 10, 1).unwrap())
            .collect();
        assert!(reconstruct_state_1q(&recs).is_err());
    }

    #[test]
    fn sampled_1q_fidelity() {
        let s = SpinState::along(Axis::X, 1.0);
        let recs: Vec<_> = Axis::ALL
            .iter()
            .enumerate()
            .map(|(i, &a)| simulate_counts(&s, &MeasurementSetting::spin(a), 900, derive_seed(5, i as u64)).unwrap())
            .collect();
        assert!(fidelity(&reconstruct_state_1q(&recs).unwrap(), &s) > 0.99);
    }

    #[test]
    fn bell_round_trip() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let bell = joint_pure([c(h, 0.0), z, z, c(h, 0.0)]).unwrap();
        let r = joint_from_expectations(&exact_records(&bell, &two_qubit_settings())).unwrap();
        assert!((r.matrix() - bell.matrix()).norm() < 1e-10);
        assert!((concurrence(&r).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn product_pointer_state_has_one_element() {
        let j = JointState::product(&SpinState::along(Axis::X, 1.0), &SpinState::along(Axis::Z, -1.0));
        let r = joint_from_expectations(&exact_records(&j, &two_qubit_settings())).unwrap();
        let m = r.matrix();
        assert!((m[(1, 1)].re - 1.0).abs() < 1e-10);
        let rest: f64 = m.iter().map(|z| z.norm()).sum::<f64>() - m[(1, 1)].norm();
        assert!(rest < 1e-9);
    }

    #[test]
    fn incomplete_2q_rejected() {
        let j = JointState::product(&SpinState::maximally_mixed(), &SpinState::maximally_mixed());
        let mut e = exact_records(&j, &two_qubit_settings());
        e.remove(&(Some(Axis::Z), Some(Axis::Z)));
        assert!(joint_from_expectations(&e).is_err());
    }
}
