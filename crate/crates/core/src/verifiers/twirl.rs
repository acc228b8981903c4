use super::{check_samples, require_traceless, MatrixEstimate};
use crate::error::Result;
use crate::linalg::{kron, swap_operator, ComplexMatrix, HermitianOperator};
use crate::parallel::monte_carlo_matrix;
use crate::sampling::{haar_unitary, RngStream};

/// `(‖Δ‖₂²/(d²-1)) (F_d - I/d)`, the Haar average of `U⊗2 Δ⊗2 U†⊗2` for
/// traceless `Δ`. At `d = 1` the only traceless operator is zero.
pub fn twirl_closed_form(delta: &HermitianOperator, d: usize) -> Result<ComplexMatrix> {
    require_traceless(delta, d)?;
    let n = d * d;
    if d == 1 {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    let coeff = delta.trace_sq() / (n as f64 - 1.0);
    let f = swap_operator(d)?;
    let shifted = &f - &ComplexMatrix::identity(n).scale_real(1.0 / d as f64);
    Ok(shifted.scale_real(coeff))
}

/// Entrywise Monte Carlo mean of `(UΔU†)⊗2` over `n` Haar unitaries.
pub fn twirl_estimate(
    delta: &HermitianOperator,
    d: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<MatrixEstimate> {
    require_traceless(delta, d)?;
    check_samples(n)?;
    let root = rng.fork();
    let stats = monte_carlo_matrix(n, d * d, d * d, &root, |rng| {
        let u = haar_unitary(d, rng).expect("d >= 1 checked");
        let x = delta.conjugate_by(&u);
        kron(x.matrix(), x.matrix())
    });
    Ok(stats.into())
}
