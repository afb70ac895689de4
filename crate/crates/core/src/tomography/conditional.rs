//! Process tomography post-selected on the circular polarization of the
//! scattered photon.

use crate::error::{Error, Result};
use crate::quantum::matrix::{c, hadamard, hermitize, identity2, kron2, Axis, Mat2};
use crate::quantum::{JointState, ProcessMatrix, SpinState};
use crate::scattering::{analyzer_povm, apply_background, Analyzer, JointScatteringMap, NoiseModel, Port};

use super::counts::{derive_seed, simulate_conditional_counts, MIN_CONDITION_PROBABILITY};
use super::process::{linear_inversion, reconstruct_process, ProcessTomographyRun, TomographyInputSet};
use super::state::reconstruct_state_1q;

fn joint_output(map: &JointScatteringMap, noise: &NoiseModel, rho: &SpinState) -> Result<JointState> {
    apply_background(&map.apply(rho), noise)
}

/// Unnormalized spin state `Tr_photon[(I ⊗ Π_port) ρ]` in the `σz` basis.
pub fn conditional_branch_state(joint: &JointState, port: Port) -> Mat2 {
    let proj = kron2(&identity2(), &analyzer_povm(&Analyzer::circular(), port));
    let m = proj * joint.matrix() * proj;
    let spin = Mat2::from_fn(|a, b| m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)]);
    let h = hadamard();
    hermitize(&(h * spin * h))
}

/// Linear inversion of the unnormalized branch `ρ ↦ Tr_photon[(I⊗Π)ρ]`.
/// The two branches sum to the unconditioned process.
pub fn conditional_branch(
    map: &JointScatteringMap,
    noise: &NoiseModel,
    port: Port,
    inputs: &TomographyInputSet,
) -> Result<ProcessMatrix> {
    let outputs = inputs
        .states()
        .clone()
        .map(|rho| joint_output(map, noise, &rho).map(|j| conditional_branch_state(&j, port)));
    let [a, b, cc, d] = outputs;
    linear_inversion(inputs, &[a?, b?, cc?, d?])
}

/// Process reconstructed from the normalized post-selected output states,
/// `port` `+1` selecting `E₊` and `−1` selecting `E₋`.
pub fn conditional_process(
    map: &JointScatteringMap,
    noise: &NoiseModel,
    port: Port,
    inputs: &TomographyInputSet,
) -> Result<ProcessMatrix> {
    let mut outputs = Vec::with_capacity(4);
    for rho in inputs.states() {
        let branch = conditional_branch_state(&joint_output(map, noise, rho)?, port);
        let p = branch.trace().re;
        if p < MIN_CONDITION_PROBABILITY {
            return Err(Error::InsufficientData(format!(
                "input never produces a photon in port {port:?}"
            )));
        }
        outputs.push(SpinState::new(branch / c(p, 0.0))?);
    }
    let outputs: [SpinState; 4] = outputs.try_into().expect("four inputs");
    reconstruct_process(inputs, &outputs)
}

/// Sampled version of [`conditional_process`]: each of the 12 spin settings
/// is repeated until `n` photons reached `port`.
pub fn simulate_conditional_tomography(
    map: &JointScatteringMap,
    noise: &NoiseModel,
    port: Port,
    inputs: &TomographyInputSet,
    n: u64,
    seed: u64,
) -> Result<ProcessTomographyRun> {
    let analyzer = Analyzer::circular();
    let mut records = Vec::with_capacity(12);
    let mut outputs = Vec::with_capacity(4);
    for (j, rho) in inputs.states().iter().enumerate() {
        let joint = joint_output(map, noise, rho)?;
        let recs = Axis::ALL
            .iter()
            .map(|&axis| {
                let s = derive_seed(seed, (3 * j + axis.index()) as u64);
                Ok(simulate_conditional_counts(&joint, axis, &analyzer, port, n, s)?.tagged(&format!("in{j}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let spin_only: Vec<_> = recs
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.port = None;
                r.setting.photon_analyzer = None;
                r
            })
            .collect();
        outputs.push(reconstruct_state_1q(&spin_only)?);
        records.extend(recs);
    }
    let outputs: [SpinState; 4] = outputs.try_into().expect("four inputs");
    let chi = reconstruct_process(inputs, &outputs)?;
    Ok(ProcessTomographyRun { records, outputs, chi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{chi_to_affine, BlochVector};
    use crate::tomography::process::exact_process_tomography;

    #[test]
    fn ideal_collapse_onto_pointer_states() {
        let map = JointScatteringMap::ideal();
        let inputs = TomographyInputSet::tetrahedral();
        for (port, target) in [(Port::Minus, 1.0), (Port::Plus, -1.0)] {
            let chi = conditional_process(&map, &NoiseModel::noiseless(), port, &inputs).unwrap();
            let aff = chi_to_affine(&chi);
            for b in [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.6, 0.0, 0.8]] {
                let out = aff.apply(&BlochVector::from(b));
                assert!(out.distance(&BlochVector::new(target, 0.0, 0.0)) < 1e-9);
            }
        }
    }

    #[test]
    fn standard_inputs_hit_empty_port() {
        let map = JointScatteringMap::ideal();
        let err = conditional_process(&map, &NoiseModel::noiseless(), Port::Plus, &TomographyInputSet::standard());
        assert!(matches!(err, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn full_background_carries_no_information() {
        let map = JointScatteringMap::ideal();
        let inputs = TomographyInputSet::tetrahedral();
        let noise = NoiseModel::with_background(1.0);
        let cond = conditional_process(&map, &noise, Port::Plus, &inputs).unwrap();
        let outputs = inputs.states().clone().map(|rho| map.apply(&rho).partial_trace(crate::quantum::Subsystem::Spin));
        let uncond = reconstruct_process(&inputs, &outputs).unwrap();
        assert!(cond.frobenius_distance(&uncond) < 1e-9);
        let direct = exact_process_tomography(&uncond, &inputs).unwrap();
        assert!(direct.frobenius_distance(&uncond) < 1e-9);
    }

    #[test]
    fn sampled_conditional_run() {
        let map = JointScatteringMap::ideal();
        let run = simulate_conditional_tomography(
            &map,
            &NoiseModel::noiseless(),
            Port::Minus,
            &TomographyInputSet::tetrahedral(),
            900,
            1,
        )
        .unwrap();
        assert_eq!(run.records.len(), 12);
        assert!(run.records.iter().all(|r| r.port == Some(Port::Minus)));
        for out in &run.outputs {
            assert!(out.bloch().x > 0.9);
        }
    }
}
