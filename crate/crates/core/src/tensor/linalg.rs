//! Determinant and inverse of small square matrices over any [`Scalar`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn pivot_row<S: Scalar>(m: &[Vec<S>], col: usize) -> Option<usize> {
    let candidates = (col..m.len()).filter(|&r| m[r][col].is_invertible());
    if S::EXACT {
        candidates.into_iter().next()
    } else {
        candidates.max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()))
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<S: Scalar>(rows: &[Vec<S>]) -> S {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let Some(p) = pivot_row(&m, col) else {
            return S::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det = det * &piv;
        let inv = S::one() / &piv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() * &inv;
            for c in col..n {
                let d = f.clone() * &m[col][c];
                m[r][c] -= &d;
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan elimination; errors on a singular matrix.
pub fn inverse<S: Scalar>(rows: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut inv: Vec<Vec<S>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
    for col in 0..n {
        let p = pivot_row(&m, col).ok_or(Error::DegenerateMetric)?;
        m.swap(p, col);
        inv.swap(p, col);
        let piv = S::one() / &m[col][col];
        for c in 0..n {
            m[col][c] = m[col][c].clone() * &piv;
            inv[col][c] = inv[col][c].clone() * &piv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..n {
                let d = f.clone() * &m[col][c];
                m[r][c] -= &d;
                let e = f.clone() * &inv[col][c];
                inv[r][c] -= &e;
            }
        }
    }
    Ok(inv)
}
