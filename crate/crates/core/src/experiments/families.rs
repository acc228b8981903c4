//! Pairs of states fed to the embedding experiments.

use std::fmt;
use std::str::FromStr;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, PureState};
use crate::sampling::{random_density, RngStream};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateFamily {
    /// `|0><0|` and `|1><1|`.
    OrthogonalPure,
    /// `P/r` and `Q/r` for orthogonal rank-`r` coordinate projectors.
    RankROrthogonalProjectors,
    /// Two independent random rank-`r` states.
    RandomRankRPair,
    /// States supplied by the caller.
    Explicit,
}

impl StateFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            StateFamily::OrthogonalPure => "orthogonal-pure",
            StateFamily::RankROrthogonalProjectors => "rank-r-orthogonal-projectors",
            StateFamily::RandomRankRPair => "random-rank-r-pair",
            StateFamily::Explicit => "explicit",
        }
    }

    /// Builds the pair for dimension `d` and rank `r`. `Explicit` has no
    /// generator; use [`parse_explicit_states`].
    pub fn build(
        self,
        d: usize,
        r: usize,
        rng: &mut RngStream,
    ) -> Result<(DensityMatrix, DensityMatrix)> {
        match self {
            StateFamily::OrthogonalPure => {
                if d < 2 {
                    return Err(Error::param("orthogonal pure pair needs d >= 2"));
                }
                Ok((
                    PureState::basis(d, 0)?.to_density(),
                    PureState::basis(d, 1)?.to_density(),
                ))
            }
            StateFamily::RankROrthogonalProjectors => orthogonal_projector_pair(d, r),
            StateFamily::RandomRankRPair => {
                Ok((random_density(d, r, rng)?, random_density(d, r, rng)?))
            }
            StateFamily::Explicit => Err(Error::param(
                "explicit family needs states supplied with --states",
            )),
        }
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            StateFamily::OrthogonalPure,
            StateFamily::RankROrthogonalProjectors,
            StateFamily::RandomRankRPair,
            StateFamily::Explicit,
        ]
        .into_iter()
        .find(|f| f.as_str() == s)
        .ok_or_else(|| Error::param(format!("unknown state family '{s}'")))
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `ρ = P/r`, `σ = Q/r` with `P` on the first `r` basis vectors and `Q` on the
/// next `r`. Needs `2r <= d`.
pub fn orthogonal_projector_pair(d: usize, r: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    if r == 0 || 2 * r > d {
        return Err(Error::param(format!(
            "orthogonal rank-r projectors need 1 <= r and 2r <= d, got r={r}, d={d}"
        )));
    }
    let w = 1.0 / r as f64;
    let rho: Vec<f64> = (0..d).map(|i| if i < r { w } else { 0.0 }).collect();
    let sigma: Vec<f64> = (0..d)
        .map(|i| if (r..2 * r).contains(&i) { w } else { 0.0 })
        .collect();
    Ok((
        DensityMatrix::from_real_diag(&rho)?.with_rank_hint(r),
        DensityMatrix::from_real_diag(&sigma)?.with_rank_hint(r),
    ))
}

/// Parses `{"rho": M, "sigma": M}` where each `M` is a list of rows and each
/// entry is a number or a `[re, im]` pair.
pub fn parse_explicit_states(text: &str) -> Result<(DensityMatrix, DensityMatrix)> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::param(format!("state file is not valid JSON: {e}")))?;
    let get = |key: &str| -> Result<DensityMatrix> {
        let m = v
            .get(key)
            .ok_or_else(|| Error::param(format!("state file lacks '{key}'")))?;
        DensityMatrix::from_matrix(parse_matrix(m)?)
    };
    let rho = get("rho")?;
    let sigma = get("sigma")?;
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(format!(
            "rho is {0}x{0} but sigma is {1}x{1}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok((rho, sigma))
}

fn parse_matrix(v: &Value) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::param("matrix must be a list of rows"))?;
    let n_rows = rows.len();
    let mut data = Vec::new();
    let mut n_cols = None;
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::param("matrix row must be a list"))?;
        if *n_cols.get_or_insert(row.len()) != row.len() {
            return Err(Error::dims("ragged matrix rows"));
        }
        for entry in row {
            data.push(parse_entry(entry)?);
        }
    }
    ComplexMatrix::new(n_rows, n_cols.unwrap_or(0), data)
}

fn parse_entry(v: &Value) -> Result<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(Error::param("complex entry must be [re, im] numbers")),
        },
        _ => Err(Error::param("matrix entry must be a number or [re, im]")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in [
            "orthogonal-pure",
            "rank-r-orthogonal-projectors",
            "random-rank-r-pair",
            "explicit",
        ] {
            assert_eq!(f.parse::<StateFamily>().unwrap().as_str(), f);
        }
        assert!("other".parse::<StateFamily>().is_err());
    }

    #[test]
    fn projector_pair_is_orthogonal() {
        let (rho, sigma) = orthogonal_projector_pair(8, 3).unwrap();
        assert!(rho.matrix().trace_of_product(sigma.matrix()).norm() < 1e-15);
        assert_eq!(rho.rank().unwrap(), 3);
        assert!(orthogonal_projector_pair(8, 5).is_err());
    }

    #[test]
    fn explicit_parsing() {
        let text = r#"{"rho": [[1, 0], [0, 0]], "sigma": [[0.5, [0, 0.5]], [[0, -0.5], 0.5]]}"#;
        let (rho, sigma) = parse_explicit_states(text).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!((sigma.purity() - 1.0).abs() < 1e-12);
        assert!(parse_explicit_states(r#"{"rho": [[1]]}"#).is_err());
        assert!(parse_explicit_states(r#"{"rho": [[2]], "sigma": [[1]]}"#).is_err());
    }
}
