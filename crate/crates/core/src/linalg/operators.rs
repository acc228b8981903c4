use num_complex::Complex64 as C64;

use super::{eig_hermitian, ComplexMatrix, Spectrum, HERMITIAN_TOL, NORM_TOL, PSD_TOL, TRACE_TOL};
use crate::error::{Error, Result};

/// Square matrix equal to its adjoint.
///
/// Construction tolerates `max|A - A†| <= 1e-10` and then stores `(A + A†)/2`,
/// so the stored matrix is exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::dims(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.max_abs_diff(&matrix.adjoint());
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian(deviation));
        }
        Ok(Self::hermitian_part(&matrix))
    }

    /// `(A + A†)/2` for any square `A`, without a tolerance check.
    pub fn hermitian_part(matrix: &ComplexMatrix) -> Self {
        assert!(matrix.is_square(), "Hermitian part of non-square matrix");
        let n = matrix.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = C64::new(matrix[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Self { matrix: out }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diag(diag),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr[A²] = Σ|a_ij|²`.
    pub fn trace_sq(&self) -> f64 {
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `tr[A^4] = ‖A²‖_F²`.
    pub fn trace_fourth(&self) -> f64 {
        let sq = &self.matrix * &self.matrix;
        sq.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<v|A|v>`, real for Hermitian `A`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.matrix.expectation(v).re
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        let m = &(u * &self.matrix) * &u.adjoint();
        Self::hermitian_part(&m)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn eig(&self) -> Result<Spectrum> {
        eig_hermitian(self)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::dims(format!(
                "operator dimensions {} and {} differ",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// Positive semidefinite Hermitian operator with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
    rank_hint: Option<usize>,
}

impl DensityMatrix {
    /// Validates trace and positivity. Eigenvalues in `[-1e-9, 0)` are clipped
    /// to zero and the state renormalized; anything more negative is rejected.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let spectrum = op.eig()?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "eigenvalue {min:e} below -{PSD_TOL:e}"
            )));
        }
        if min >= 0.0 {
            return Ok(Self {
                op,
                rank_hint: None,
            });
        }
        let clipped: Vec<f64> = spectrum.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let renormalized: Vec<f64> = clipped.iter().map(|l| l / total).collect();
        Ok(Self {
            op: spectrum.reconstruct_with(&renormalized),
            rank_hint: None,
        })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            op: HermitianOperator::hermitian_part(&psi.projector()),
            rank_hint: Some(1),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diag(diag))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::from_real_diag(&vec![1.0 / dim as f64; dim]),
            rank_hint: Some(dim),
        }
    }

    /// Wraps an operator already known to be a state, skipping validation.
    pub(crate) fn from_trusted(op: HermitianOperator, rank_hint: Option<usize>) -> Self {
        Self { op, rank_hint }
    }

    pub fn with_rank_hint(mut self, rank: usize) -> Self {
        self.rank_hint = Some(rank);
        self
    }

    pub fn rank_hint(&self) -> Option<usize> {
        self.rank_hint
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn purity(&self) -> f64 {
        self.op.trace_sq()
    }

    /// Numerical rank: number of eigenvalues above the zero threshold.
    pub fn rank(&self) -> Result<usize> {
        Ok(self
            .op
            .eig()?
            .eigenvalues
            .iter()
            .filter(|&&l| l > super::ZERO_EIG_TOL)
            .count())
    }

    /// `ρ - σ`.
    pub fn difference(&self, other: &Self) -> Result<HermitianOperator> {
        self.op.sub(&other.op)
    }
}

/// Unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::param(format!(
                "basis index {index} >= dimension {dim}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_rejects_asymmetric() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn hermitian_stores_exact_symmetrization() {
        let mut m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 3.0]]).unwrap();
        m[(0, 1)] += C64::new(4e-11, 0.0);
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)].conj());
    }

    #[test]
    fn density_rejects_bad_trace_and_negativity() {
        assert!(DensityMatrix::from_real_diag(&[0.5, 0.4]).is_err());
        assert!(DensityMatrix::from_real_diag(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn density_clips_tiny_negative_eigenvalues() {
        let rho = DensityMatrix::from_real_diag(&[1.0 + 5e-10, -5e-10]).unwrap();
        let spec = rho.op().eig().unwrap();
        assert!(spec.eigenvalues.iter().all(|&l| l >= 0.0));
        assert!((rho.op().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_state_norm_checked() {
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1e-5, 0.0)]).is_err());
        let psi = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert!((psi.inner(&psi).re - 1.0).abs() < 1e-15);
        assert_eq!(psi.to_density().rank_hint(), Some(1));
    }
}
