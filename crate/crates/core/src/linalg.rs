//! Small fixed-size linear algebra for 4×4 symmetric tensors.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Row-major index of the packed upper triangle.
pub const SYM_IDX: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]];

/// Coordinate pairs (i <= j) in packed order.
pub const SYM_PAIRS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

/// Symmetric 4×4 tensor stored as its 10 independent entries.
///
/// Symmetry is exact by construction: `get(i, j)` and `get(j, i)` read the
/// same slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sym4<S> {
    pub data: [S; 10],
}

impl<S: Scalar> Sym4<S> {
    pub fn zero() -> Self {
        Self {
            data: [S::from_f64(0.0); 10],
        }
    }

    /// Build from a closure evaluated only on i <= j.
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = [S::from_f64(0.0); 10];
        for (slot, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            data[slot] = f(i, j);
        }
        Self { data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[SYM_IDX[i][j]]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[SYM_IDX[i][j]] = v;
    }

    pub fn to_matrix(&self) -> [[S; 4]; 4] {
        let mut m = [[S::from_f64(0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.get(i, j);
            }
        }
        m
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(S) -> T) -> Sym4<T> {
        let mut data = [T::from_f64(0.0); 10];
        for (k, v) in self.data.iter().enumerate() {
            data[k] = f(*v);
        }
        Sym4 { data }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| v.scale(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut data = self.data;
        for (a, b) in data.iter_mut().zip(other.data.iter()) {
            *a = *a + *b;
        }
        Self { data }
    }

    /// Full double contraction `sum_ij a_ij b_ij` (both triangles).
    pub fn dot(&self, other: &Self) -> S {
        let mut acc = S::from_f64(0.0);
        for (slot, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            let w = if i == j { 1.0 } else { 2.0 };
            acc = acc + (self.data[slot] * other.data[slot]).scale(w);
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.re().abs())
            .fold(0.0_f64, f64::max)
    }
}

impl Sym4<f64> {
    /// Symmetrize an almost-symmetric matrix into packed storage.
    pub fn from_matrix(m: &[[f64; 4]; 4]) -> Self {
        Self::from_fn(|i, j| 0.5 * (m[i][j] + m[j][i]))
    }
}

/// Determinant and inverse of a 4×4 matrix by Gaussian elimination with
/// partial pivoting (pivot magnitude compared on the real part).
///
/// Returns `(det, None)` when a pivot vanishes.
pub fn det_inverse<S: Scalar>(m: &[[S; 4]; 4]) -> (S, Option<[[S; 4]; 4]>) {
    // Augmented [m | I].
    let mut a = [[S::from_f64(0.0); 8]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = m[i][j];
        }
        a[i][4 + i] = S::from_f64(1.0);
    }

    let mut det = S::from_f64(1.0);
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if a[row][col].re().abs() > a[pivot][col].re().abs() {
                pivot = row;
            }
        }
        if a[pivot][col].re().abs() == 0.0 || !a[pivot][col].re().is_finite() {
            return (S::from_f64(0.0), None);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = det * a[col][col];
        let inv_piv = a[col][col].recip();
        for j in 0..8 {
            a[col][j] = a[col][j] * inv_piv;
        }
        for row in 0..4 {
            if row != col {
                let factor = a[row][col];
                for j in 0..8 {
                    a[row][j] = a[row][j] - factor * a[col][j];
                }
            }
        }
    }

    let mut inv = [[S::from_f64(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            inv[i][j] = a[i][4 + j];
        }
    }
    (det, Some(inv))
}

/// Solve a small dense symmetric-positive system by Gaussian elimination.
/// Used for least-squares normal equations; `None` signals a tiny pivot.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-13 * scale.max(1e-300) {
            return None;
        }
        a.swap(pivot, col);
        b.swap(pivot, col);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for j in col..n {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in col + 1..n {
            s -= a[col][j] * b[j];
        }
        b[col] = s / a[col][col];
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_diagonal() {
        let g = Sym4::from_fn(|i, j| {
            if i == j {
                [-1.0, 1.0, 4.0, 9.0][i]
            } else {
                0.0
            }
        });
        let (det, inv) = det_inverse(&g.to_matrix());
        let inv = inv.unwrap();
        assert!((det - (-36.0)).abs() < 1e-12);
        assert!((inv[0][0] + 1.0).abs() < 1e-14);
        assert!((inv[2][2] - 0.25).abs() < 1e-14);
        assert!((inv[3][3] - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_roundtrip_dense() {
        let m = [
            [2.0, 0.3, 0.0, 0.1],
            [0.3, 1.5, -0.2, 0.0],
            [0.0, -0.2, 3.0, 0.4],
            [0.1, 0.0, 0.4, 1.0],
        ];
        let (_, inv) = det_inverse(&m);
        let inv = inv.unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += m[i][k] * inv[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-13, "({i},{j}) -> {s}");
            }
        }
    }

    #[test]
    fn singular_matrix_reports_none() {
        let m = [
            [1.0, 2.0, 0.0, 0.0],
            [2.0, 4.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let (_, inv) = det_inverse(&m);
        assert!(inv.is_none());
    }
}
