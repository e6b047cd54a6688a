//! Dense helpers for the small (desk-scale) matrices that appear in
//! coefficient specifications.

use crate::error::{Error, Result};

/// Solves `A x = b` for a row-major `n x n` matrix by Gaussian elimination
/// with partial pivoting. `n` is tiny here (state dimension), so no effort is
/// spent on blocking.
pub fn solve(matrix: &[f64], rhs: &[f64], out: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    debug_assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    out.copy_from_slice(rhs);

    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        let pivot_val = a[pivot * n + col];
        if pivot_val.abs() < 1e-300 {
            return Err(Error::model("singular diffusion matrix encountered"));
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            out.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor != 0.0 {
                for j in col..n {
                    a[row * n + j] -= factor * a[col * n + j];
                }
                out[row] -= factor * out[col];
            }
        }
    }
    for row in (0..n).rev() {
        let mut acc = out[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * out[j];
        }
        out[row] = acc / a[row * n + row];
    }
    Ok(())
}

/// Largest eigenvalue of a symmetric row-major `n x n` matrix via cyclic
/// Jacobi rotations.
pub fn max_symmetric_eigenvalue(matrix: &[f64], n: usize) -> f64 {
    debug_assert_eq!(matrix.len(), n * n);
    if n == 1 {
        return matrix[0];
    }
    let mut a = matrix.to_vec();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for i in 0..n {
            for j in i + 1..n {
                let apq = a[i * n + j];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[i * n + i];
                let aqq = a[j * n + j];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let aik = a[i * n + k];
                    let ajk = a[j * n + k];
                    a[i * n + k] = c * aik - s * ajk;
                    a[j * n + k] = s * aik + c * ajk;
                }
                for k in 0..n {
                    let aki = a[k * n + i];
                    let akj = a[k * n + j];
                    a[k * n + i] = c * aki - s * akj;
                    a[k * n + j] = s * aki + c * akj;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_2x2() {
        let a = [2.0, 1.0, 1.0, 3.0];
        let b = [5.0, 10.0];
        let mut x = [0.0; 2];
        solve(&a, &b, &mut x).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn solve_rejects_singular() {
        let a = [1.0, 2.0, 2.0, 4.0];
        let b = [1.0, 2.0];
        let mut x = [0.0; 2];
        assert!(solve(&a, &b, &mut x).is_err());
    }

    #[test]
    fn max_eigenvalue_of_diagonal_and_rotation() {
        assert!((max_symmetric_eigenvalue(&[-2.0, 0.0, 0.0, -5.0], 2) + 2.0).abs() < 1e-12);
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        assert!((max_symmetric_eigenvalue(&[2.0, 1.0, 1.0, 2.0], 2) - 3.0).abs() < 1e-12);
        assert!((max_symmetric_eigenvalue(&[7.0], 1) - 7.0).abs() < 1e-15);
    }
}
