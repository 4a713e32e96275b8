#![allow(dead_code)]

use cvqt_core::nalgebra::{DMatrix, DVector};
use cvqt_core::GaussianState;
use rand::Rng;

pub type Mat = Vec<Vec<f64>>;

pub fn to_rows(m: &DMatrix<f64>) -> Mat {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            out[i][j] = (0..k).map(|t| a[i][t] * b[t][j]).sum();
        }
    }
    out
}

pub fn transpose(a: &Mat) -> Mat {
    (0..a[0].len())
        .map(|j| (0..a.len()).map(|i| a[i][j]).collect())
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(a: &Mat) -> Mat {
    let n = a.len();
    let mut aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        assert!(p.abs() > 1e-300, "singular matrix");
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for row in 0..n {
            if row != col {
                let f = aug[row][col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        aug[row][j] -= f * aug[col][j];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn submatrix(a: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| a[i][j]).collect())
        .collect()
}

pub fn max_abs_diff(a: &Mat, b: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - b[(i, j)]).abs());
        }
    }
    worst
}

/// A random mixed Gaussian state: thermal modes, then random squeezers,
/// phase shifts and beam splitters, then a random displacement.
pub fn random_state<R: Rng>(rng: &mut R, n_modes: usize) -> GaussianState {
    let dim = 2 * n_modes;
    let mut diag = DVector::zeros(dim);
    for m in 0..n_modes {
        let nu = 1.0 + rng.random_range(0.0..2.0);
        diag[2 * m] = nu;
        diag[2 * m + 1] = nu;
    }
    let mut s =
        GaussianState::from_moments(DVector::zeros(dim), DMatrix::from_diagonal(&diag)).unwrap();
    for _ in 0..3 * n_modes {
        let m = rng.random_range(0..n_modes);
        s = s
            .squeeze(m, rng.random_range(-1.0..1.0), rng.random_range(0.0..6.3))
            .unwrap();
        if n_modes > 1 {
            let k = (m + 1 + rng.random_range(0..n_modes - 1)) % n_modes;
            s = s
                .beam_splitter(m, k, rng.random_range(0.0..1.0), rng.random_range(0.0..6.3))
                .unwrap();
        }
    }
    for m in 0..n_modes {
        s = s
            .displace(m, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))
            .unwrap();
    }
    s
}
