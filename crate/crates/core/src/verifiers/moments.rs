//! Moments of `X = <ψ|Δ|ψ>` for Haar-random `|ψ>` and the uniform-POVM
//! distinguishability `Q(Δ) = d·E|X|`.

use serde::Serialize;

use super::{check_samples, require_traceless, BoundCheck, MonteCarloEstimate};
use crate::error::Result;
use crate::linalg::{schatten_norm, HermitianOperator, SchattenP};
use crate::parallel::{monte_carlo, monte_carlo_multi};
use crate::sampling::{haar_pure_state, haar_unitary, RngStream};

/// `E[X²] = tr[Δ²]/(d(d+1))`.
pub fn second_moment_exact(delta: &HermitianOperator, d: usize) -> Result<f64> {
    require_traceless(delta, d)?;
    let d = d as f64;
    Ok(delta.trace_sq() / (d * (d + 1.0)))
}

/// `E[X⁴] = (3 tr[Δ²]² + 6 tr[Δ⁴]) / (d(d+1)(d+2)(d+3))`.
pub fn fourth_moment_exact(delta: &HermitianOperator, d: usize) -> Result<f64> {
    require_traceless(delta, d)?;
    let t2 = delta.trace_sq();
    Ok((3.0 * t2 * t2 + 6.0 * delta.trace_fourth()) / rising4(d))
}

/// `9 tr[Δ²]² / (d(d+1)(d+2)(d+3))`; dominates the exact value because
/// `tr[Δ⁴] <= tr[Δ²]²`.
pub fn fourth_moment_bound(delta: &HermitianOperator, d: usize) -> Result<f64> {
    require_traceless(delta, d)?;
    let t2 = delta.trace_sq();
    Ok(9.0 * t2 * t2 / rising4(d))
}

fn rising4(d: usize) -> f64 {
    let d = d as f64;
    d * (d + 1.0) * (d + 2.0) * (d + 3.0)
}

/// Sample moments of `X` from one set of draws.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HaarMoments {
    pub abs: MonteCarloEstimate,
    pub second: MonteCarloEstimate,
    pub fourth: MonteCarloEstimate,
}

pub fn haar_state_moments(
    delta: &HermitianOperator,
    d: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<HaarMoments> {
    require_traceless(delta, d)?;
    check_samples(n)?;
    let root = rng.fork();
    let stats = monte_carlo_multi(n, 3, &root, |rng, buf| {
        let psi = haar_pure_state(d, rng).expect("d >= 1 checked");
        let x = delta.expectation(psi.amplitudes());
        let x2 = x * x;
        buf[0] = x.abs();
        buf[1] = x2;
        buf[2] = x2 * x2;
    });
    Ok(HaarMoments {
        abs: stats[0].into(),
        second: stats[1].into(),
        fourth: stats[2].into(),
    })
}

pub fn second_moment_estimate(
    delta: &HermitianOperator,
    d: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<MonteCarloEstimate> {
    Ok(haar_state_moments(delta, d, n, rng)?.second)
}

pub fn fourth_moment_estimate(
    delta: &HermitianOperator,
    d: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<MonteCarloEstimate> {
    Ok(haar_state_moments(delta, d, n, rng)?.fourth)
}

/// Berger's fourth-moment inequality `E|X| >= E[X²]^{3/2} / E[X⁴]^{1/2}`,
/// evaluated on sample moments (where it holds exactly, by Hölder).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BergerCheck {
    pub mean_abs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BergerCheck {
    pub fn from_moments(m: &HaarMoments) -> Self {
        let rhs = if m.fourth.mean > 0.0 {
            m.second.mean.powf(1.5) / m.fourth.mean.sqrt()
        } else {
            0.0
        };
        Self {
            mean_abs: m.abs.mean,
            rhs,
            holds: m.abs.mean >= rhs * (1.0 - 1e-12),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct UniformPovmReport {
    /// `d · E|<ψ|Δ|ψ>|`.
    pub q: MonteCarloEstimate,
    pub norm2: f64,
    /// `Q >= ‖Δ‖₂/3`.
    pub lower: BoundCheck,
    /// `Q <= ‖Δ‖₂`.
    pub upper: BoundCheck,
    pub berger: BergerCheck,
}

impl UniformPovmReport {
    pub fn passed(&self) -> bool {
        self.lower.passed() && self.upper.passed() && self.berger.holds
    }
}

pub fn uniform_povm_quantity(
    delta: &HermitianOperator,
    d: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<UniformPovmReport> {
    let moments = haar_state_moments(delta, d, n, rng)?;
    let q = moments.abs.scaled(d as f64);
    let norm2 = schatten_norm(delta, SchattenP::Two)?;
    Ok(UniformPovmReport {
        q,
        norm2,
        lower: BoundCheck::at_least(q, norm2 / 3.0),
        upper: BoundCheck::at_most(q, norm2),
        berger: BergerCheck::from_moments(&moments),
    })
}

/// Bias of measuring in a Haar-random orthonormal basis:
/// `½ E_U Σ_i |<i|U†ΔU|i>|`.
pub fn random_basis_bias(
    delta: &HermitianOperator,
    d: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<MonteCarloEstimate> {
    require_traceless(delta, d)?;
    check_samples(n)?;
    let root = rng.fork();
    let stats = monte_carlo(n, &root, |rng| {
        let u = haar_unitary(d, rng).expect("d >= 1 checked");
        (0..d)
            .map(|i| delta.expectation(&u.column(i)).abs())
            .sum::<f64>()
            * 0.5
    });
    Ok(stats.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_z() -> HermitianOperator {
        HermitianOperator::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn qubit_exact_values() {
        let z = pauli_z();
        assert!((second_moment_exact(&z, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((fourth_moment_exact(&z, 2).unwrap() - 0.2).abs() < 1e-15);
        assert!((fourth_moment_bound(&z, 2).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn zero_delta_gives_zero() {
        let mut rng = RngStream::from_seed(20);
        let zero = HermitianOperator::zeros(3);
        assert_eq!(second_moment_exact(&zero, 3).unwrap(), 0.0);
        let r = uniform_povm_quantity(&zero, 3, 100, &mut rng).unwrap();
        assert_eq!(r.q.mean, 0.0);
        assert!(r.passed());
        assert_eq!(
            random_basis_bias(&zero, 3, 100, &mut rng).unwrap().mean,
            0.0
        );
    }

    #[test]
    fn qubit_q_near_one() {
        let mut rng = RngStream::from_seed(21);
        let r = uniform_povm_quantity(&pauli_z(), 2, 50_000, &mut rng).unwrap();
        assert!(r.q.agrees_with(1.0, 4.0), "{:?}", r.q);
        assert!(r.passed());
    }

    #[test]
    fn random_basis_matches_half_q() {
        let mut rng = RngStream::from_seed(22);
        let b = random_basis_bias(&pauli_z(), 2, 20_000, &mut rng).unwrap();
        assert!(b.agrees_with(0.5, 4.0), "{b:?}");
    }

    #[test]
    fn moments_estimates_track_exact() {
        let mut rng = RngStream::from_seed(23);
        let delta = HermitianOperator::from_real_diag(&[0.6, 0.1, -0.7]);
        let m = haar_state_moments(&delta, 3, 50_000, &mut rng).unwrap();
        assert!(m
            .second
            .agrees_with(second_moment_exact(&delta, 3).unwrap(), 4.0));
        assert!(m
            .fourth
            .agrees_with(fourth_moment_exact(&delta, 3).unwrap(), 4.0));
    }

    #[test]
    fn berger_holds_on_any_sample() {
        let mut rng = RngStream::from_seed(24);
        let delta = HermitianOperator::from_real_diag(&[0.9, -0.1, -0.8, 0.0]);
        let m = haar_state_moments(&delta, 4, 2_000, &mut rng).unwrap();
        assert!(BergerCheck::from_moments(&m).holds);
    }
}
