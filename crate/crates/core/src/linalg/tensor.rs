use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `v ⊗ w` for vectors.
pub fn kron_vec(v: &[C64], w: &[C64]) -> Vec<C64> {
    v.iter()
        .flat_map(|&a| w.iter().map(move |&b| a * b))
        .collect()
}

/// The flip `F_d = Σ_ij |i><j| ⊗ |j><i|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::param("swap operator needs d >= 1"));
    }
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(i * d + j, j * d + i)] = C64::new(1.0, 0.0);
        }
    }
    Ok(f)
}

/// Traces out the second factor of `C^{dim_a} ⊗ C^{dim_b}`.
pub fn partial_trace_b(x: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if x.rows() != n || x.cols() != n {
        return Err(Error::dims(format!(
            "partial trace over {dim_a}x{dim_b} needs a {n}x{n} matrix, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_a, dim_a, |a, a2| {
        (0..dim_b).map(|b| x[(a * dim_b + b, a2 * dim_b + b)]).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn diagonal_kron() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diag(&[3.0, 4.0]);
        assert_eq!(
            kron(&a, &b),
            ComplexMatrix::from_real_diag(&[3.0, 4.0, 6.0, 8.0])
        );
    }

    #[test]
    fn swap_two_exchanges_middle_basis_states() {
        let f = swap_operator(2).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(f, expected);
        assert!(swap_operator(0).is_err());
    }

    #[test]
    fn swap_squares_to_identity_and_traces_to_d() {
        for d in 1..=4 {
            let f = swap_operator(d).unwrap();
            assert_eq!(&f * &f, ComplexMatrix::identity(d * d));
            assert_eq!(f.trace().re, d as f64);
        }
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ];
        let p = ComplexMatrix::outer(&bell, &bell);
        let reduced = partial_trace_b(&p, 2, 2).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        assert!(partial_trace_b(&p, 2, 3).is_err());
    }
}
