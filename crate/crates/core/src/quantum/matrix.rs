//! Small dense complex matrices: Pauli algebra, Hermitian eigendecomposition
//! and the JSON layout shared by every serialized matrix.

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

/// Tolerance for Hermiticity, trace and eigenvalue clamping of density matrices.
pub const STATE_TOL: f64 = 1e-12;
/// Tolerance for completeness / trace preservation of channels.
pub const CHANNEL_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s.trim() {
            "x" | "X" => Some(Axis::X),
            "y" | "Y" => Some(Axis::Y),
            "z" | "Z" => Some(Axis::Z),
            _ => None,
        }
    }
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn pauli(axis: Axis) -> Mat2 {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let i = C64::new(0.0, 1.0);
    match axis {
        Axis::X => Mat2::new(z, o, o, z),
        Axis::Y => Mat2::new(z, -i, i, z),
        Axis::Z => Mat2::new(o, z, z, -o),
    }
}

pub fn paulis() -> [Mat2; 3] {
    [pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z)]
}

/// `σ·v` for a complex 3-vector.
pub fn sigma_dot(v: &[C64; 3]) -> Mat2 {
    let [sx, sy, sz] = paulis();
    sx * v[0] + sy * v[1] + sz * v[2]
}

/// Hadamard matrix; maps the `σz` eigenbasis onto the `σx` eigenbasis and is
/// its own inverse.
pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))
}

pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn trace<const N: usize>(m: &SMatrix<C64, N, N>) -> C64 {
    (0..N).map(|i| m[(i, i)]).sum()
}

pub fn hermitize<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn hermiticity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn to_dynamic<const N: usize>(m: &SMatrix<C64, N, N>) -> DMatrix<C64> {
    DMatrix::from_column_slice(N, N, m.as_slice())
}

pub fn from_dynamic<const N: usize>(m: &DMatrix<C64>) -> SMatrix<C64, N, N> {
    assert_eq!(m.shape(), (N, N));
    SMatrix::<C64, N, N>::from_column_slice(m.as_slice())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Eigenvectors are the columns of the returned matrix, in the same order.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a density matrix with `[-STATE_TOL, 0)` clamped to zero.
/// Anything more negative is rejected.
pub fn density_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let (values, _) = hermitian_eigen(m);
    let min = values.last().copied().unwrap_or(0.0);
    if min < -STATE_TOL {
        return Err(invalid(format!(
            "matrix is not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    Ok(values.into_iter().map(|v| v.max(0.0)).collect())
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (k, v) in values.iter().enumerate() {
        let col = vectors.column(k);
        out += col * col.adjoint() * c(v.max(0.0).sqrt(), 0.0);
    }
    out
}

/// Nearest unit-trace PSD matrix by eigenvalue truncation followed by trace
/// renormalization. This is the one physicality projection used by state
/// reconstruction; swap it here for a likelihood-based variant if needed.
pub fn project_to_density(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (values, vectors) = hermitian_eigen(m);
    let kept: f64 = values.iter().map(|v| v.max(0.0)).sum();
    if kept <= f64::EPSILON {
        return Err(Error::Numerical(
            "no positive spectral weight left after truncation".into(),
        ));
    }
    let n = m.nrows();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (k, v) in values.iter().enumerate() {
        if *v > 0.0 {
            let col = vectors.column(k);
            out += col * col.adjoint() * c(v / kept, 0.0);
        }
    }
    Ok(out)
}

/// Row-major `[re, im]` pairs, one inner array per row.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> MatrixJson {
    (0..R)
        .map(|i| (0..C).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json<const R: usize, const C: usize>(
    rows: &MatrixJson,
) -> Result<SMatrix<C64, R, C>> {
    if rows.len() != R || rows.iter().any(|r| r.len() != C) {
        return Err(invalid(format!("expected a {R}x{C} matrix")));
    }
    Ok(SMatrix::<C64, R, C>::from_fn(|i, j| {
        let [re, im] = rows[i][j];
        c(re, im)
    }))
}

/// Serde adapter for fixed-size complex matrices in the shared JSON layout.
pub mod json {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S, const N: usize>(
        m: &SMatrix<C64, N, N>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error>
    where
        S: Serializer,
    {
        matrix_to_json(m).serialize(s)
    }

    pub fn deserialize<'de, D, const N: usize>(
        d: D,
    ) -> std::result::Result<SMatrix<C64, N, N>, D::Error>
    where
        D: Deserializer<'de>,
    {
        let rows = MatrixJson::deserialize(d)?;
        matrix_from_json::<N, N>(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = paulis();
        let i = c(0.0, 1.0);
        assert_abs_diff_eq!((x * y - z * i).norm(), 0.0, epsilon = 1e-15);
        for p in [x, y, z] {
            assert_abs_diff_eq!((p * p - identity2()).norm(), 0.0, epsilon = 1e-15);
        }
        let h = hadamard();
        assert_abs_diff_eq!((h * z * h - x).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = to_dynamic(&(pauli(Axis::Y) * c(0.3, 0.0) + identity2() * c(0.5, 0.0)));
        let (vals, vecs) = hermitian_eigen(&m);
        assert_abs_diff_eq!(vals[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 0.2, epsilon = 1e-14);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            vals.iter().map(|v| c(*v, 0.0)).collect(),
        ));
        let back = &vecs * diag * vecs.adjoint();
        assert_abs_diff_eq!((back - m).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = to_dynamic(&Mat2::new(c(1.1, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.1, 0.0)));
        assert!(density_eigenvalues(&m).is_err());
        let p = project_to_density(&m).unwrap();
        assert_abs_diff_eq!(p[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[(1, 1)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn json_layout_is_row_major_pairs() {
        let m = Mat2::new(c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0));
        let j = matrix_to_json(&m);
        assert_eq!(j, vec![vec![[1.0, 2.0], [3.0, 4.0]], vec![[5.0, 6.0], [7.0, 8.0]]]);
        let back: Mat2 = matrix_from_json(&j).unwrap();
        assert_eq!(back, m);
        assert!(matrix_from_json::<4, 4>(&j).is_err());
    }
}
