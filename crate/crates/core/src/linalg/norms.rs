use std::fmt;
use std::str::FromStr;

use super::{ComplexMatrix, HermitianOperator, ZERO_EIG_TOL};
use crate::error::{Error, Result};

/// Supported Schatten indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchattenP {
    One,
    Two,
    Inf,
}

impl FromStr for SchattenP {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(SchattenP::One),
            "2" => Ok(SchattenP::Two),
            "inf" | "infinity" | "∞" => Ok(SchattenP::Inf),
            other => Err(Error::UnsupportedNorm(other.to_string())),
        }
    }
}

impl TryFrom<f64> for SchattenP {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(SchattenP::One)
        } else if p == 2.0 {
            Ok(SchattenP::Two)
        } else if p == f64::INFINITY {
            Ok(SchattenP::Inf)
        } else {
            Err(Error::UnsupportedNorm(p.to_string()))
        }
    }
}

impl fmt::Display for SchattenP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchattenP::One => write!(f, "1"),
            SchattenP::Two => write!(f, "2"),
            SchattenP::Inf => write!(f, "inf"),
        }
    }
}

/// `‖A‖_p = (Σ|λ_i|^p)^{1/p}` over the eigenvalues of `A`.
pub fn schatten_norm(a: &HermitianOperator, p: SchattenP) -> Result<f64> {
    let spec = a.eig()?;
    let abs = spec.eigenvalues.iter().map(|l| l.abs());
    Ok(match p {
        SchattenP::One => abs.sum(),
        SchattenP::Two => abs.map(|l| l * l).sum::<f64>().sqrt(),
        SchattenP::Inf => abs.fold(0.0, f64::max),
    })
}

/// Projector onto eigenvectors with eigenvalue strictly above `1e-10`.
/// Eigenvalues in `(-1e-10, 1e-10)` count as zero and are excluded.
pub fn positive_part_projector(a: &HermitianOperator) -> Result<ComplexMatrix> {
    Ok(a.eig()?.projector_where(|l| l > ZERO_EIG_TOL))
}

/// Projector onto the support of a positive semidefinite operator.
pub fn support_projector(a: &HermitianOperator) -> Result<ComplexMatrix> {
    positive_part_projector(a)
}
