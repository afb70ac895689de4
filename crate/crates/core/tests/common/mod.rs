#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spinscatter::quantum::{KrausFamily, Mat2, Mat4, PhotonLabel, ProcessMatrix, SpinState, JointState};

pub type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-ish random unitary from the QR of a Ginibre matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    g.qr().q()
}

pub fn random_unitary2(rng: &mut ChaCha8Rng) -> Mat2 {
    let u = random_unitary(rng, 2);
    Matrix2::from_fn(|i, j| u[(i, j)])
}

/// Random CPTP map with `rank` Kraus operators, from a random isometry.
pub fn random_channel(rng: &mut ChaCha8Rng, rank: usize) -> KrausFamily {
    let g = DMatrix::from_fn(2 * rank, 2, |_, _| gaussian(rng));
    let v = g.qr().q();
    let ops = (0..rank)
        .map(|k| (Matrix2::from_fn(|i, j| v[(2 * k + i, j)]), PhotonLabel::Unlabeled))
        .collect();
    KrausFamily::new(ops)
}

pub fn random_process(rng: &mut ChaCha8Rng) -> ProcessMatrix {
    let rank = rng.random_range(1..=4);
    ProcessMatrix::from_kraus(&random_channel(rng, rank))
}

/// Random mixed state: `G G† / Tr`.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let t = m.trace();
    m / t
}

pub fn random_spin(rng: &mut ChaCha8Rng) -> SpinState {
    let d = random_density(rng, 2);
    SpinState::new(Matrix2::from_fn(|i, j| d[(i, j)])).unwrap()
}

pub fn random_joint(rng: &mut ChaCha8Rng) -> JointState {
    let d = random_density(rng, 4);
    JointState::new(Mat4::from_fn(|i, j| d[(i, j)])).unwrap()
}

pub fn max_abs(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
