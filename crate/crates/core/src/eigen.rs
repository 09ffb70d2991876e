//! Cyclic Jacobi eigensolver for dense Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Relative off-diagonal tolerance for convergence.
pub const JACOBI_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Tolerance used to decide whether a matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
    pub sweeps: usize,
    /// Off-diagonal Frobenius mass left when iteration stopped.
    pub residual: f64,
    pub converged: bool,
}

impl EigenDecomposition {
    /// `V · diag(f(λ)) · V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let dim = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|l| l)
    }
}

/// Eigen-decomposes a Hermitian matrix.
///
/// Iterates cyclic sweeps of complex Jacobi rotations until the off-diagonal
/// Frobenius mass drops below `JACOBI_TOL · ||A||_F` or `MAX_SWEEPS` sweeps have
/// run; in the latter case `converged` is false and `residual` holds what is
/// left.
pub fn hermitian_eigen(matrix: &CMatrix) -> Result<EigenDecomposition> {
    let scale = matrix.max_abs().max(1.0);
    let deviation = matrix.hermitian_deviation();
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(matrix))
}

/// Eigenvalues only (descending).
pub fn hermitian_eigenvalues(matrix: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(matrix).map(|e| e.eigenvalues)
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn jacobi(input: &CMatrix) -> EigenDecomposition {
    let n = input.dim();
    // Symmetrize so that rounding asymmetries in the input cannot leak in.
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (input[(i, j)] + input[(j, i)].conj()) * 0.5;
        }
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let target = JACOBI_TOL * a.frobenius_norm();

    let mut sweeps = 0;
    let mut residual = off_diagonal_norm(&a);
    while residual > target && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        residual = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[(row, col)] = v[(row, src)];
        }
    }
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
        residual,
        converged: residual <= target,
    }
}

/// Annihilates `a[p][q]` with the unitary `W = diag(1, e^{-iφ}) · G(θ)` acting
/// on coordinates `p, q`, where `a[p][q] = |a_pq| e^{iφ}` and `G` is the real
/// Jacobi rotation for the resulting real symmetric 2×2 block.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations below the resolution of the diagonal.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let ph = phase.conj();
    let w_pp = Complex64::new(c, 0.0);
    let w_pq = Complex64::new(s, 0.0);
    let w_qp = ph * -s;
    let w_qq = ph * c;

    let n = a.dim();
    // A ← A W
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    // A ← W* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V W
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
}
