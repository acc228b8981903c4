//! Quantum channels in Kraus form.
//!
//! The central object is the embedding channel `E_V(X) = tr_B[V X V†]` for an
//! isometry `V: C^d -> C^e ⊗ C^⌈d/e⌉`. Its Kraus operators are the row blocks
//! `A_k = (I_e ⊗ <k|) V`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{kron, swap_operator, ComplexMatrix, HermitianOperator};
use crate::sampling::{haar_isometry, Isometry, RngStream};

/// Tolerance on `|Σ A†A - I|` (entrywise).
pub const TRACE_PRESERVING_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(dim_in: usize, dim_out: usize, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus_ops.is_empty() {
            return Err(Error::param("channel needs at least one Kraus operator"));
        }
        if let Some(bad) = kraus_ops.iter().find(|a| a.shape() != (dim_out, dim_in)) {
            return Err(Error::dims(format!(
                "Kraus operator is {}x{}, expected {dim_out}x{dim_in}",
                bad.rows(),
                bad.cols()
            )));
        }
        let ch = Self {
            dim_in,
            dim_out,
            kraus_ops,
        };
        let resid = ch
            .completeness()
            .max_abs_diff(&ComplexMatrix::identity(dim_in));
        if resid > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving(resid));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus_ops: vec![ComplexMatrix::identity(d)],
        }
    }

    /// `X -> tr(X) I_e / e`, with the `d·e` Kraus operators `|i><j| / √e`.
    pub fn completely_depolarizing(d: usize, e: usize) -> Result<Self> {
        if d == 0 || e == 0 {
            return Err(Error::param(
                "depolarizing channel needs positive dimensions",
            ));
        }
        let w = 1.0 / (e as f64).sqrt();
        let mut ops = Vec::with_capacity(d * e);
        for i in 0..e {
            for j in 0..d {
                let mut a = ComplexMatrix::zeros(e, d);
                a[(i, j)] = C64::new(w, 0.0);
                ops.push(a);
            }
        }
        Self::new(d, e, ops)
    }

    /// Stinespring channel `X -> tr_B[V X V†]` for `V: C^d -> C^e ⊗ C^env`.
    pub fn from_isometry(v: &Isometry, e: usize, env: usize) -> Result<Self> {
        if e == 0 || env == 0 || v.dim_out() != e * env {
            return Err(Error::dims(format!(
                "isometry output {} is not {e} x {env}",
                v.dim_out()
            )));
        }
        let m = v.matrix();
        let d = v.dim_in();
        let ops = (0..env)
            .map(|k| ComplexMatrix::from_fn(e, d, |i, j| m[(i * env + k, j)]))
            .collect();
        Self::new(d, e, ops)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// `Σ A_i† A_i`.
    pub fn completeness(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for a in &self.kraus_ops {
            acc = &acc + &(&a.adjoint() * a);
        }
        acc
    }

    /// `Σ A_i X A_i†` for a general square input.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::dims(format!(
                "channel input must be {0}x{0}, got {1}x{2}",
                self.dim_in,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.kraus_ops {
            out = &out + &(&(a * x) * &a.adjoint());
        }
        Ok(out)
    }

    pub fn apply(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        Ok(HermitianOperator::hermitian_part(
            &self.apply_matrix(x.matrix())?,
        ))
    }

    /// `E⊗2(X) = Σ_ij (A_i ⊗ A_j) X (A_i ⊗ A_j)†`.
    pub fn apply_tensor_square(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim_in * self.dim_in;
        if x.shape() != (n, n) {
            return Err(Error::dims(format!(
                "tensor-square input must be {n}x{n}, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let m = self.dim_out * self.dim_out;
        let mut out = ComplexMatrix::zeros(m, m);
        for ai in &self.kraus_ops {
            for aj in &self.kraus_ops {
                let k = kron(ai, aj);
                out = &out + &(&(&k * x) * &k.adjoint());
            }
        }
        Ok(out)
    }

    /// `tr[F_e E⊗2(F_d)]`, evaluated from the definition.
    pub fn flip_functional(&self) -> Result<f64> {
        let fd = swap_operator(self.dim_in)?;
        let fe = swap_operator(self.dim_out)?;
        let image = self.apply_tensor_square(&fd)?;
        Ok(fe.trace_of_product(&image).re)
    }

    /// `Σ_i (tr A_i†A_i)²` over a trace-orthogonal Kraus set; equals
    /// [`flip_functional`](Self::flip_functional).
    pub fn flip_functional_canonical(&self) -> Result<f64> {
        Ok(self
            .canonicalize()?
            .kraus_ops
            .iter()
            .map(|a| a.frobenius_norm().powi(2))
            .map(|w| w * w)
            .sum())
    }

    /// Gram matrix `G_ij = tr[A_i† A_j]`.
    pub fn gram(&self) -> HermitianOperator {
        let n = self.kraus_ops.len();
        let g = ComplexMatrix::from_fn(n, n, |i, j| {
            self.kraus_ops[i]
                .data()
                .iter()
                .zip(self.kraus_ops[j].data())
                .map(|(a, b)| a.conj() * b)
                .sum()
        });
        HermitianOperator::hermitian_part(&g)
    }

    /// Equivalent channel with pairwise trace-orthogonal Kraus operators.
    ///
    /// Mixes the operators with the eigenvectors of the Gram matrix
    /// (`B_k = Σ_i W_ik A_i`), drops those with zero weight, orders them by
    /// descending weight and rotates each so its first non-negligible entry
    /// is real and positive.
    pub fn canonicalize(&self) -> Result<Self> {
        let spec = self.gram().eig()?;
        let cutoff = 1e-12 * (self.dim_in as f64).max(1.0);
        let mut ops = Vec::new();
        for (k, &weight) in spec.eigenvalues.iter().enumerate() {
            if weight <= cutoff {
                continue;
            }
            let mut b = ComplexMatrix::zeros(self.dim_out, self.dim_in);
            for (i, a) in self.kraus_ops.iter().enumerate() {
                let w = spec.eigenvectors[(i, k)];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                b = &b + &a.scale(w);
            }
            let floor = 1e-12 * b.max_abs();
            if let Some(&z) = b.data().iter().find(|z| z.norm() > floor) {
                b = b.scale(z.conj() / z.norm());
            }
            ops.push(b);
        }
        Self::new(self.dim_in, self.dim_out, ops)
    }
}

/// `⌈d/e⌉`, the environment dimension of the embedding channel.
pub fn environment_dim(d: usize, e: usize) -> usize {
    d.div_ceil(e)
}

/// The embedding channel: apply `V: C^d -> C^e ⊗ C^⌈d/e⌉`, then discard the
/// second factor. Requires `1 <= e <= d`.
pub fn embedding_channel(v: &Isometry, d: usize, e: usize) -> Result<KrausChannel> {
    if e == 0 || e > d {
        return Err(Error::param(format!(
            "embedding needs 1 <= e <= d, got e={e}, d={d}"
        )));
    }
    if v.dim_in() != d {
        return Err(Error::dims(format!(
            "isometry input {} differs from d={d}",
            v.dim_in()
        )));
    }
    KrausChannel::from_isometry(v, e, environment_dim(d, e))
}

/// Embedding channel with a Haar-random isometry.
pub fn random_embedding_channel(d: usize, e: usize, rng: &mut RngStream) -> Result<KrausChannel> {
    if e == 0 || e > d {
        return Err(Error::param(format!(
            "embedding needs 1 <= e <= d, got e={e}, d={d}"
        )));
    }
    let v = haar_isometry(d, e * environment_dim(d, e), rng)?;
    embedding_channel(&v, d, e)
}

/// Stinespring channel `C^d -> C^e` with Haar isometry and environment
/// dimension drawn uniformly from `[⌈d/e⌉, d]`.
pub fn random_stinespring_channel(d: usize, e: usize, rng: &mut RngStream) -> Result<KrausChannel> {
    if e == 0 || d == 0 {
        return Err(Error::param("channel dimensions must be positive"));
    }
    let lo = environment_dim(d, e);
    let hi = d.max(lo);
    let env = lo + rng.below((hi - lo + 1) as u64) as usize;
    let v = haar_isometry(d, e * env, rng)?;
    KrausChannel::from_isometry(&v, e, env)
}
