//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation. Sweeps stop once
//! the off-diagonal Frobenius mass drops below `1e-12 · ‖A‖_F`.

use num_complex::Complex64 as C64;

use super::{ComplexMatrix, HermitianOperator};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigen-decomposition `A = Q Λ Q†` with eigenvalues sorted descending and
/// eigenvectors stored as the columns of `eigenvectors`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `Q diag(values) Q†` using this spectrum's eigenvectors.
    pub fn reconstruct_with(&self, values: &[f64]) -> HermitianOperator {
        assert_eq!(values.len(), self.dim());
        let n = self.dim();
        let q = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in values.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = q[(i, k)] * lambda;
                for j in 0..n {
                    out[(i, j)] += qi * q[(j, k)].conj();
                }
            }
        }
        HermitianOperator::hermitian_part(&out)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue passes `keep`.
    pub fn projector_where(&self, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
        let values: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&l| if keep(l) { 1.0 } else { 0.0 })
            .collect();
        self.reconstruct_with(&values).into_matrix()
    }
}

pub fn eig_hermitian(op: &HermitianOperator) -> Result<Spectrum> {
    let n = op.dim();
    let mut a = op.matrix().clone();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    let tol = OFF_DIAGONAL_TOL * scale;
    let mut converged = scale == 0.0;

    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > tol {
            return Err(Error::numerical("Jacobi eigensolver", off / scale));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let abs_g = g.norm();
    if abs_g == 0.0 {
        return;
    }
    let phase_conj = (g / abs_g).conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * abs_g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Columns p, q of J = diag(1, e^{-iφ}) · [[c, s], [-s, c]].
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = phase_conj * (-s);
    let j_qq = phase_conj * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}
