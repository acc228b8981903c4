use num_complex::Complex64 as C64;

use super::RngStream;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, HermitianOperator, PureState};

/// Maximum `|V†V - I|` entry accepted for an isometry.
pub const ISOMETRY_TOL: f64 = 1e-10;

/// Linear map `V: C^dim_in -> C^dim_out` with `V†V = I`.
#[derive(Clone, Debug)]
pub struct Isometry {
    matrix: ComplexMatrix,
}

impl Isometry {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() < matrix.cols() {
            return Err(Error::dims(format!(
                "isometry must have dim_out >= dim_in, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let gram = &matrix.adjoint() * &matrix;
        let resid = gram.max_abs_diff(&ComplexMatrix::identity(matrix.cols()));
        if resid > ISOMETRY_TOL {
            return Err(Error::numerical("isometry V†V = I", resid));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.matrix.cols()
    }

    pub fn dim_out(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `V X V†`.
    pub fn conjugate(&self, x: &HermitianOperator) -> HermitianOperator {
        let m = &(&self.matrix * x.matrix()) * &self.matrix.adjoint();
        HermitianOperator::hermitian_part(&m)
    }
}

/// Haar-random `d x d` unitary: complex Ginibre matrix, Householder QR, then
/// each column of Q multiplied by the phase of the matching diagonal entry of
/// R so that R has a positive diagonal. Without that phase fix the output is
/// not Haar distributed.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::param("Haar unitary needs d >= 1"));
    }
    let ginibre = ComplexMatrix::from_fn(d, d, |_, _| rng.complex_gaussian());
    Ok(phase_corrected_q(ginibre))
}

/// Haar isometry: the first `dim_in` columns of a Haar `dim_out` unitary.
pub fn haar_isometry(dim_in: usize, dim_out: usize, rng: &mut RngStream) -> Result<Isometry> {
    if dim_in == 0 {
        return Err(Error::param("isometry needs dim_in >= 1"));
    }
    if dim_out < dim_in {
        return Err(Error::param(format!(
            "isometry needs dim_out >= dim_in, got {dim_out} < {dim_in}"
        )));
    }
    let u = haar_unitary(dim_out, rng)?;
    Ok(Isometry {
        matrix: u.leading_columns(dim_in),
    })
}

/// Uniformly random pure state (normalized complex Gaussian vector).
pub fn haar_pure_state(d: usize, rng: &mut RngStream) -> Result<PureState> {
    if d == 0 {
        return Err(Error::param("pure state needs d >= 1"));
    }
    loop {
        let v: Vec<C64> = (0..d).map(|_| rng.complex_gaussian()).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return Ok(psi);
        }
    }
}

/// Rank-`r` state with Haar eigenbasis and eigenvalues uniform on the simplex
/// (normalized exponential variates). Every eigenvalue exceeds `1e-12`.
pub fn random_density(d: usize, r: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
    if r == 0 || r > d {
        return Err(Error::param(format!(
            "random density needs 1 <= r <= d, got r={r}, d={d}"
        )));
    }
    let weights = loop {
        let w: Vec<f64> = (0..r).map(|_| -rng.uniform_open().ln()).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.into_iter().map(|x| x / total).collect();
        if w.iter().all(|&x| x > 1e-12) {
            break w;
        }
    };
    let v = haar_isometry(r, d, rng)?;
    let m = v.matrix();
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, &lambda) in weights.iter().enumerate() {
        for i in 0..d {
            let a = m[(i, k)] * lambda;
            for j in 0..d {
                out[(i, j)] += a * m[(j, k)].conj();
            }
        }
    }
    Ok(DensityMatrix::from_trusted(
        HermitianOperator::hermitian_part(&out),
        Some(r),
    ))
}

/// Projector `V V†` onto a Haar-random `s`-dimensional subspace of `C^d`.
pub fn random_projector(d: usize, s: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if s == 0 || s > d {
        return Err(Error::param(format!(
            "random projector needs 1 <= s <= d, got s={s}, d={d}"
        )));
    }
    let v = haar_isometry(s, d, rng)?;
    Ok(v.matrix() * &v.matrix().adjoint())
}

fn phase_corrected_q(mut a: ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut q = ComplexMatrix::identity(n);
    let mut r_phase = vec![C64::new(1.0, 0.0); n];
    let mut v = vec![C64::new(0.0, 0.0); n];

    for k in 0..n {
        let len = n - k;
        let alpha = (k..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // H x = -phase·alpha·e_0, so R_kk = -phase·alpha.
        r_phase[k] = -phase;
        for (m, i) in (k..n).enumerate() {
            v[m] = a[(i, k)];
        }
        v[0] += phase * alpha;
        let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v[..len] {
            *z /= vnorm;
        }

        // A <- H A on rows k..n.
        for j in k..n {
            let s: C64 = (0..len).map(|m| v[m].conj() * a[(k + m, j)]).sum();
            for m in 0..len {
                let upd = v[m] * s * 2.0;
                a[(k + m, j)] -= upd;
            }
        }
        // Q <- Q H on columns k..n.
        for i in 0..n {
            let s: C64 = (0..len).map(|m| q[(i, k + m)] * v[m]).sum();
            for m in 0..len {
                let upd = s * v[m].conj() * 2.0;
                q[(i, k + m)] -= upd;
            }
        }
    }

    for j in 0..n {
        for i in 0..n {
            q[(i, j)] *= r_phase[j];
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, partial_trace_b};

    fn unitarity_residual(u: &ComplexMatrix) -> f64 {
        (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.cols()))
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = RngStream::from_seed(5);
        for d in [1, 2, 3, 8, 33, 69] {
            let u = haar_unitary(d, &mut rng).unwrap();
            assert!(unitarity_residual(&u) < 1e-10, "d={d}");
        }
        assert!(haar_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn one_dimensional_unitary_is_a_phase() {
        let mut rng = RngStream::from_seed(6);
        let u = haar_unitary(1, &mut rng).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_correction_reproduces_ginibre() {
        // Q R = G with R upper triangular and positive diagonal.
        let mut rng = RngStream::from_seed(7);
        let g = ComplexMatrix::from_fn(5, 5, |_, _| rng.complex_gaussian());
        let q = phase_corrected_q(g.clone());
        let r = &q.adjoint() * &g;
        for i in 0..5 {
            assert!(r[(i, i)].im.abs() < 1e-12 && r[(i, i)].re > 0.0);
            for j in 0..i {
                assert!(r[(i, j)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn isometry_shapes_and_errors() {
        let mut rng = RngStream::from_seed(8);
        let v = haar_isometry(4, 12, &mut rng).unwrap();
        assert_eq!((v.dim_out(), v.dim_in()), (12, 4));
        assert!(Isometry::new(v.matrix().clone()).is_ok());
        assert!(haar_isometry(5, 4, &mut rng).is_err());
        let sq = haar_isometry(3, 3, &mut rng).unwrap();
        assert!(unitarity_residual(sq.matrix()) < 1e-10);
    }

    #[test]
    fn reduced_output_of_isometry_is_a_state() {
        let mut rng = RngStream::from_seed(9);
        let v = haar_isometry(8, 9, &mut rng).unwrap();
        let rho = random_density(8, 3, &mut rng).unwrap();
        let out = partial_trace_b(v.conjugate(rho.op()).matrix(), 3, 3).unwrap();
        assert!(DensityMatrix::from_matrix(out).is_ok());
    }

    #[test]
    fn random_density_rank_and_validity() {
        let mut rng = RngStream::from_seed(10);
        for (d, r) in [(4, 1), (6, 3), (5, 5)] {
            let rho = random_density(d, r, &mut rng).unwrap();
            assert_eq!(rho.rank().unwrap(), r);
            assert!(DensityMatrix::new(rho.op().clone()).is_ok());
        }
        assert!(random_density(3, 4, &mut rng).is_err());
        assert!(random_density(3, 0, &mut rng).is_err());
    }

    #[test]
    fn rank_one_density_is_pure() {
        let mut rng = RngStream::from_seed(12);
        let rho = random_density(5, 1, &mut rng).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_properties() {
        let mut rng = RngStream::from_seed(13);
        let p = random_projector(8, 3, &mut rng).unwrap();
        assert!((&p * &p).max_abs_diff(&p) < 1e-9);
        assert!((p.trace().re - 3.0).abs() < 1e-9);
        let op = HermitianOperator::new(p).unwrap();
        let rank = op
            .eig()
            .unwrap()
            .eigenvalues
            .iter()
            .filter(|&&l| l > 0.5)
            .count();
        assert_eq!(rank, 3);
        let full = random_projector(4, 4, &mut rng).unwrap();
        assert!(full.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        assert!(random_projector(4, 5, &mut rng).is_err());
    }

    #[test]
    fn pure_states_have_unit_norm() {
        let mut rng = RngStream::from_seed(14);
        for _ in 0..100 {
            let psi = haar_pure_state(7, &mut rng).unwrap();
            assert!((psi.inner(&psi).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_mixed_product_on_haar_probes() {
        let mut rng = RngStream::from_seed(15);
        for _ in 0..5 {
            let a = haar_unitary(2, &mut rng).unwrap();
            let b = haar_unitary(3, &mut rng).unwrap();
            let c = haar_unitary(2, &mut rng).unwrap();
            let d = haar_unitary(3, &mut rng).unwrap();
            let lhs = &kron(&a, &b) * &kron(&c, &d);
            let rhs = kron(&(&a * &c), &(&b * &d));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }
}
