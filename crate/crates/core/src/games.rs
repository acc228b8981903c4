//! The equality-testing game without a shared reference frame, and binary
//! state discrimination.
//!
//! In the equality game a referee receives two systems prepared as one of
//! `ρ⊗ρ`, `σ⊗σ`, `ρ⊗σ`, `σ⊗ρ` (uniformly), each hit by the same unknown
//! unitary `U`, and must say whether the two halves are equal. A strategy is
//! a two-outcome measurement `(M, I - M)` on `C^d ⊗ C^d`, outcome `M` meaning
//! "same".

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    kron, positive_part_projector, schatten_norm, swap_operator, ComplexMatrix, DensityMatrix,
    HermitianOperator, SchattenP,
};
use crate::parallel::{map_trials, pairwise_reduce, CHUNK_SIZE};
use crate::sampling::{haar_unitary, RngStream};
use crate::verifiers::twirl_closed_form;

/// Tolerance on POVM positivity and completeness.
pub const POVM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adversary {
    /// One unitary drawn at the start and used for every round.
    FixedU,
    /// A fresh Haar unitary every round.
    HaarU,
}

impl FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-u" | "fixed-U" => Ok(Adversary::FixedU),
            "haar-u" | "haar-U" => Ok(Adversary::HaarU),
            other => Err(Error::param(format!("unknown adversary '{other}'"))),
        }
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Adversary::FixedU => "fixed-u",
            Adversary::HaarU => "haar-u",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Strategy {
    SwapTest,
    /// Projector onto the positive part of `F - I/d` (the symmetric subspace).
    OptimalM,
    CustomM(HermitianOperator),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::SwapTest => "swap-test",
            Strategy::OptimalM => "optimal-m",
            Strategy::CustomM(_) => "custom-m",
        }
    }

    /// The "same" measurement operator on `C^d ⊗ C^d`.
    pub fn measurement(&self, d: usize) -> Result<ComplexMatrix> {
        match self {
            Strategy::SwapTest => {
                let n = d * d;
                Ok((&ComplexMatrix::identity(n) + &swap_operator(d)?).scale_real(0.5))
            }
            Strategy::OptimalM => optimal_measurement(d),
            Strategy::CustomM(m) => {
                if m.dim() != d * d {
                    return Err(Error::dims(format!(
                        "custom measurement is {0}x{0}, expected {1}x{1}",
                        m.dim(),
                        d * d
                    )));
                }
                Ok(m.matrix().clone())
            }
        }
    }
}

/// Validates `0 <= M <= I` (eigenvalues within `[-1e-9, 1+1e-9]`) and clips
/// the spectrum into `[0, 1]`.
pub fn validate_measurement(m: HermitianOperator) -> Result<HermitianOperator> {
    let spec = m.eig()?;
    let lo = spec.eigenvalues.last().copied().unwrap_or(0.0);
    let hi = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if lo < -POVM_TOL || hi > 1.0 + POVM_TOL {
        return Err(Error::InvalidPovm(format!(
            "measurement eigenvalues span [{lo:e}, {hi}], outside [0, 1]"
        )));
    }
    let clipped: Vec<f64> = spec.eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).collect();
    Ok(spec.reconstruct_with(&clipped))
}

fn optimal_measurement(d: usize) -> Result<ComplexMatrix> {
    let n = d * d;
    let shifted = &swap_operator(d)? - &ComplexMatrix::identity(n).scale_real(1.0 / d as f64);
    positive_part_projector(&HermitianOperator::hermitian_part(&shifted))
}

#[derive(Clone, Debug)]
pub struct GameSpec {
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub rounds: usize,
    pub adversary: Adversary,
    pub strategy: Strategy,
}

impl GameSpec {
    pub fn new(
        rho: DensityMatrix,
        sigma: DensityMatrix,
        rounds: usize,
        adversary: Adversary,
        strategy: Strategy,
    ) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::dims(format!(
                "states have dimensions {} and {}",
                rho.dim(),
                sigma.dim()
            )));
        }
        if rounds == 0 {
            return Err(Error::param("rounds must be >= 1"));
        }
        let strategy = match strategy {
            Strategy::CustomM(m) => {
                let d = rho.dim();
                if m.dim() != d * d {
                    return Err(Error::dims(format!(
                        "custom measurement is {0}x{0}, expected {1}x{1}",
                        m.dim(),
                        d * d
                    )));
                }
                Strategy::CustomM(validate_measurement(m)?)
            }
            other => other,
        };
        Ok(Self {
            rho,
            sigma,
            rounds,
            adversary,
            strategy,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
}

/// `½ + ½ tr[AB]`.
pub fn swap_test_accept_prob(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dims(format!(
            "states have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(0.5 + 0.5 * a.matrix().trace_of_product(b.matrix()).re)
}

/// Success of measurement `M` against a fixed rotation `Δ' = UΔU†`:
/// `½ + ¼ tr[M (Δ'⊗Δ')]`.
fn success_for_rotated(m: &ComplexMatrix, rotated_delta: &HermitianOperator) -> f64 {
    let dd = kron(rotated_delta.matrix(), rotated_delta.matrix());
    0.5 + 0.25 * m.trace_of_product(&dd).re
}

/// Haar-averaged bias `½ tr[M T]` of the optimal measurement, where `T` is the
/// twirl of `Δ⊗Δ`. Equals `¼‖ρ-σ‖₂²`.
pub fn optimal_m_average_bias(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    let delta = rho.difference(sigma)?;
    let m = optimal_measurement(d)?;
    Ok(0.5 * m.trace_of_product(&twirl_closed_form(&delta, d)?).re)
}

/// Haar-averaged success probability of a strategy. The swap test's value
/// `½ + ⅛‖ρ-σ‖₂²` does not depend on `U` at all.
pub fn equality_game_analytic(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    strategy: &Strategy,
) -> Result<f64> {
    let delta = rho.difference(sigma)?;
    match strategy {
        Strategy::SwapTest => Ok(0.5 + 0.125 * delta.trace_sq()),
        Strategy::OptimalM => Ok(0.5 + 0.5 * optimal_m_average_bias(rho, sigma)?),
        Strategy::CustomM(_) => {
            let d = rho.dim();
            let m = strategy.measurement(d)?;
            Ok(0.5 + 0.25 * m.trace_of_product(&twirl_closed_form(&delta, d)?).re)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preparation {
    RhoRho,
    SigmaSigma,
    RhoSigma,
    SigmaRho,
}

impl Preparation {
    const ALL: [Preparation; 4] = [
        Preparation::RhoRho,
        Preparation::SigmaSigma,
        Preparation::RhoSigma,
        Preparation::SigmaRho,
    ];

    pub fn is_same(self) -> bool {
        matches!(self, Preparation::RhoRho | Preparation::SigmaSigma)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Preparation::RhoRho => "rho-rho",
            Preparation::SigmaSigma => "sigma-sigma",
            Preparation::RhoSigma => "rho-sigma",
            Preparation::SigmaRho => "sigma-rho",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    pub round: u64,
    pub preparation: &'static str,
    pub outcome: &'static str,
    pub correct: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameResult {
    pub success_rate: f64,
    pub std_error: f64,
    pub analytic_success: f64,
    pub bias: f64,
    pub rounds: u64,
    #[serde(skip)]
    pub trace: Option<Vec<RoundRecord>>,
}

impl GameResult {
    /// `|rate - analytic| <= k` binomial standard errors of the analytic value.
    pub fn within_sigmas(&self, k: f64) -> bool {
        let p = self.analytic_success;
        let sigma = (p * (1.0 - p) / self.rounds as f64).sqrt();
        (self.success_rate - p).abs() <= k * sigma + 1e-12
    }
}

/// Plays `spec.rounds` rounds. Each round picks a preparation uniformly,
/// rotates both halves by the adversary's `U`, computes the exact "same"
/// probability `tr[M (A'⊗B')]` and draws the outcome from it.
///
/// `analytic_success` is the exact value for the drawn `U` in fixed-U mode and
/// the Haar average in haar-U mode.
pub fn equality_game_simulate(
    spec: &GameSpec,
    keep_trace: bool,
    rng: &mut RngStream,
) -> Result<GameResult> {
    let d = spec.dim();
    let m = spec.strategy.measurement(d)?;
    let delta = spec.rho.difference(&spec.sigma)?;
    let fixed_u = match spec.adversary {
        Adversary::FixedU => Some(haar_unitary(d, rng)?),
        Adversary::HaarU => None,
    };
    let analytic_success = match &fixed_u {
        Some(u) => success_for_rotated(&m, &delta.conjugate_by(u)),
        None => equality_game_analytic(&spec.rho, &spec.sigma, &spec.strategy)?,
    };
    let swap_test = matches!(spec.strategy, Strategy::SwapTest);

    let root = rng.fork();
    let n = spec.rounds;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts = map_trials(chunks, &root, |c, rng| {
        let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
        let mut wins = 0u64;
        let mut trace = Vec::new();
        for k in 0..len {
            let prep = Preparation::ALL[rng.below(4) as usize];
            let (a, b) = match prep {
                Preparation::RhoRho => (&spec.rho, &spec.rho),
                Preparation::SigmaSigma => (&spec.sigma, &spec.sigma),
                Preparation::RhoSigma => (&spec.rho, &spec.sigma),
                Preparation::SigmaRho => (&spec.sigma, &spec.rho),
            };
            let u = match &fixed_u {
                Some(u) => u.clone(),
                None => haar_unitary(d, rng).expect("d >= 1"),
            };
            let a_rot = a.op().conjugate_by(&u);
            let b_rot = b.op().conjugate_by(&u);
            let p_same = if swap_test {
                0.5 + 0.5 * a_rot.matrix().trace_of_product(b_rot.matrix()).re
            } else {
                m.trace_of_product(&kron(a_rot.matrix(), b_rot.matrix())).re
            };
            let said_same = rng.bernoulli(p_same);
            let correct = said_same == prep.is_same();
            wins += correct as u64;
            if keep_trace {
                trace.push(RoundRecord {
                    round: (c * CHUNK_SIZE + k) as u64,
                    preparation: prep.as_str(),
                    outcome: if said_same { "same" } else { "different" },
                    correct,
                });
            }
        }
        (wins, trace)
    });
    let wins = pairwise_reduce(parts.iter().map(|p| p.0).collect(), |a, b| a + b).unwrap_or(0);
    let trace = keep_trace.then(|| parts.into_iter().flat_map(|p| p.1).collect());

    let rate = wins as f64 / n as f64;
    Ok(GameResult {
        success_rate: rate,
        std_error: (rate * (1.0 - rate) / n as f64).sqrt(),
        analytic_success,
        bias: 2.0 * rate - 1.0,
        rounds: n as u64,
        trace,
    })
}

#[derive(Clone, Debug)]
pub struct Helstrom {
    /// `½‖ρ-σ‖₁`.
    pub bias: f64,
    /// Projector onto the positive part of `ρ-σ`.
    pub measurement: ComplexMatrix,
}

pub fn helstrom_bias(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Helstrom> {
    let delta = rho.difference(sigma)?;
    Ok(Helstrom {
        bias: 0.5 * schatten_norm(&delta, SchattenP::One)?,
        measurement: positive_part_projector(&delta)?,
    })
}

/// `½ Σ_i |tr[M_i (ρ-σ)]|` after checking that the `M_i` form a POVM.
pub fn povm_bias(
    povm: &[HermitianOperator],
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<f64> {
    let delta = rho.difference(sigma)?;
    validate_povm(povm, delta.dim())?;
    Ok(0.5
        * povm
            .iter()
            .map(|m| m.matrix().trace_of_product(delta.matrix()).re.abs())
            .sum::<f64>())
}

pub fn validate_povm(povm: &[HermitianOperator], d: usize) -> Result<()> {
    if povm.is_empty() {
        return Err(Error::InvalidPovm("empty POVM".into()));
    }
    let mut total = ComplexMatrix::zeros(d, d);
    for (i, m) in povm.iter().enumerate() {
        if m.dim() != d {
            return Err(Error::dims(format!(
                "POVM element {i} is {0}x{0}, expected {d}x{d}",
                m.dim()
            )));
        }
        let min = m.eig()?.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "element {i} has eigenvalue {min:e}"
            )));
        }
        total = &total + m.matrix();
    }
    let resid = total.max_abs_diff(&ComplexMatrix::identity(d));
    if resid > POVM_TOL {
        return Err(Error::InvalidPovm(format!(
            "elements sum to identity only within {resid:e}"
        )));
    }
    Ok(())
}

/// Projective measurement in the basis given by the columns of a Haar unitary.
pub fn random_basis_povm(d: usize, rng: &mut RngStream) -> Result<Vec<HermitianOperator>> {
    let u = haar_unitary(d, rng)?;
    Ok((0..d)
        .map(|i| {
            let col = u.column(i);
            HermitianOperator::hermitian_part(&ComplexMatrix::outer(&col, &col))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;
    use crate::sampling::random_density;

    fn ket(d: usize, i: usize) -> DensityMatrix {
        PureState::basis(d, i).unwrap().to_density()
    }

    #[test]
    fn swap_test_probabilities() {
        assert!((swap_test_accept_prob(&ket(2, 0), &ket(2, 0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((swap_test_accept_prob(&ket(2, 0), &ket(2, 1)).unwrap() - 0.5).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((swap_test_accept_prob(&mixed, &mixed).unwrap() - 0.75).abs() < 1e-15);
        assert!(swap_test_accept_prob(&ket(2, 0), &ket(3, 0)).is_err());
    }

    #[test]
    fn analytic_values() {
        let (r, s) = (ket(2, 0), ket(2, 1));
        assert!(
            (equality_game_analytic(&r, &s, &Strategy::SwapTest).unwrap() - 0.75).abs() < 1e-15
        );
        assert!((equality_game_analytic(&r, &r, &Strategy::SwapTest).unwrap() - 0.5).abs() < 1e-15);
        let opt = equality_game_analytic(&r, &s, &Strategy::OptimalM).unwrap();
        assert!((opt - 0.75).abs() < 1e-12);
        assert!((optimal_m_average_bias(&r, &s).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn optimal_measurement_is_symmetric_projector() {
        let m = optimal_measurement(3).unwrap();
        let sym = Strategy::SwapTest.measurement(3).unwrap();
        assert!(m.max_abs_diff(&sym) < 1e-10);
    }

    #[test]
    fn custom_measurement_validation() {
        let too_big = HermitianOperator::from_real_diag(&[1.5, 0.0, 0.0, 0.0]);
        assert!(matches!(
            GameSpec::new(
                ket(2, 0),
                ket(2, 1),
                10,
                Adversary::HaarU,
                Strategy::CustomM(too_big)
            ),
            Err(Error::InvalidPovm(_))
        ));
        let wrong_dim = HermitianOperator::from_real_diag(&[1.0, 0.0]);
        assert!(GameSpec::new(
            ket(2, 0),
            ket(2, 1),
            10,
            Adversary::HaarU,
            Strategy::CustomM(wrong_dim)
        )
        .is_err());
        let nearly = HermitianOperator::from_real_diag(&[1.0 + 5e-10, -5e-10, 0.5, 0.5]);
        let spec = GameSpec::new(
            ket(2, 0),
            ket(2, 1),
            10,
            Adversary::HaarU,
            Strategy::CustomM(nearly),
        )
        .unwrap();
        if let Strategy::CustomM(m) = &spec.strategy {
            let e = m.eig().unwrap().eigenvalues;
            assert!(e[0] <= 1.0 && *e.last().unwrap() >= 0.0);
        }
    }

    #[test]
    fn simulation_tracks_analytic_and_rate_bias_identity() {
        let mut rng = RngStream::from_seed(50);
        for adversary in [Adversary::FixedU, Adversary::HaarU] {
            let spec =
                GameSpec::new(ket(2, 0), ket(2, 1), 20_000, adversary, Strategy::SwapTest).unwrap();
            let r = equality_game_simulate(&spec, false, &mut rng).unwrap();
            assert!((r.analytic_success - 0.75).abs() < 1e-12);
            assert!(r.within_sigmas(4.0), "{r:?}");
            assert!((r.success_rate - (0.5 + r.bias / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_has_one_row_per_round() {
        let mut rng = RngStream::from_seed(51);
        let spec = GameSpec::new(
            ket(2, 0),
            ket(2, 1),
            2_500,
            Adversary::HaarU,
            Strategy::OptimalM,
        )
        .unwrap();
        let r = equality_game_simulate(&spec, true, &mut rng).unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.len(), 2_500);
        assert!(trace.iter().enumerate().all(|(i, t)| t.round == i as u64));
        let wins = trace.iter().filter(|t| t.correct).count() as f64;
        assert!((wins / 2_500.0 - r.success_rate).abs() < 1e-15);
    }

    #[test]
    fn helstrom_cases() {
        assert!((helstrom_bias(&ket(3, 0), &ket(3, 2)).unwrap().bias - 1.0).abs() < 1e-12);
        assert!(helstrom_bias(&ket(3, 0), &ket(3, 0)).unwrap().bias.abs() < 1e-12);
        let rho = DensityMatrix::from_real_diag(&[0.75, 0.25]).unwrap();
        let sigma = DensityMatrix::from_real_diag(&[0.25, 0.75]).unwrap();
        let h = helstrom_bias(&rho, &sigma).unwrap();
        assert!((h.bias - 0.5).abs() < 1e-12);
        let delta = rho.difference(&sigma).unwrap();
        assert!((h.measurement.trace_of_product(delta.matrix()).re - h.bias).abs() < 1e-9);
    }

    #[test]
    fn povm_bias_cases() {
        let mut rng = RngStream::from_seed(52);
        let rho = random_density(3, 2, &mut rng).unwrap();
        let sigma = random_density(3, 1, &mut rng).unwrap();
        let h = helstrom_bias(&rho, &sigma).unwrap();
        let p = HermitianOperator::hermitian_part(&h.measurement);
        let q = HermitianOperator::hermitian_part(&(&ComplexMatrix::identity(3) - &h.measurement));
        assert!((povm_bias(&[p, q], &rho, &sigma).unwrap() - h.bias).abs() < 1e-9);
        let id = HermitianOperator::from_real_diag(&[1.0; 3]);
        assert!(povm_bias(&[id], &rho, &sigma).unwrap().abs() < 1e-12);
        for _ in 0..20 {
            let povm = random_basis_povm(3, &mut rng).unwrap();
            assert!(povm_bias(&povm, &rho, &sigma).unwrap() <= h.bias + 1e-9);
        }
        let half = HermitianOperator::from_real_diag(&[0.5; 3]);
        assert!(matches!(
            povm_bias(&[half], &rho, &sigma),
            Err(Error::InvalidPovm(_))
        ));
    }
}
