//! Deterministic parallel Monte Carlo.
//!
//! Work is cut into fixed-size chunks (or single trials); chunk `i` draws from
//! `root.substream(i)`. Partial statistics are merged by a fixed-order pairwise
//! tree, so the result never depends on the rayon worker count.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::linalg::ComplexMatrix;
use crate::sampling::RngStream;

/// Samples per chunk.
pub const CHUNK_SIZE: usize = 1024;

/// Runs `f(index, &mut rng)` for every index with `rng = root.substream(index)`,
/// returning results in index order.
pub fn map_trials<T, F>(n: usize, root: &RngStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut RngStream) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = root.substream(i as u64);
            f(i, &mut rng)
        })
        .collect()
}

/// Splits `n` samples into chunks of [`CHUNK_SIZE`]; `f(len, &mut rng)` handles one chunk.
pub fn map_chunks<T, F>(n: usize, root: &RngStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut RngStream) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    map_trials(chunks, root, |c, rng| {
        let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
        f(len, rng)
    })
}

/// Fixed-order pairwise reduction.
pub fn pairwise_reduce<T>(mut items: Vec<T>, merge: impl Fn(T, T) -> T) -> Option<T> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

/// Running mean and centered second moment (Welford, merged with Chan's rule).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScalarStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl ScalarStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(a: Self, b: Self) -> Self {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let mean = a.mean + delta * b.count as f64 / count as f64;
        let m2 = a.m2 + b.m2 + delta * delta * (a.count as f64 * b.count as f64) / count as f64;
        Self { count, mean, m2 }
    }

    /// Sample standard deviation (n-1 denominator).
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.count - 1) as f64).sqrt()
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.std_dev() / (self.count as f64).sqrt()
    }
}

/// Entrywise [`ScalarStats`] for complex matrices; the spread of an entry is
/// `Σ|z - mean|²`.
#[derive(Clone, Debug)]
pub struct MatrixStats {
    pub count: u64,
    pub rows: usize,
    pub cols: usize,
    pub mean: Vec<C64>,
    pub m2: Vec<f64>,
}

impl MatrixStats {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            count: 0,
            rows,
            cols,
            mean: vec![C64::new(0.0, 0.0); rows * cols],
            m2: vec![0.0; rows * cols],
        }
    }

    pub fn push(&mut self, x: &ComplexMatrix) {
        assert_eq!(x.shape(), (self.rows, self.cols));
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), &z) in self.mean.iter_mut().zip(&mut self.m2).zip(x.data()) {
            let delta = z - *mean;
            *mean += delta / n;
            *m2 += (delta.conj() * (z - *mean)).re;
        }
    }

    pub fn merge(a: Self, b: Self) -> Self {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let wb = b.count as f64 / count as f64;
        let cross = a.count as f64 * b.count as f64 / count as f64;
        let mut out = Self::new(a.rows, a.cols);
        out.count = count;
        for k in 0..a.mean.len() {
            let delta = b.mean[k] - a.mean[k];
            out.mean[k] = a.mean[k] + delta * wb;
            out.m2[k] = a.m2[k] + b.m2[k] + delta.norm_sqr() * cross;
        }
        out
    }

    pub fn mean_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.rows, self.cols, self.mean.clone()).expect("finite running mean")
    }

    pub fn std_errors(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![0.0; self.m2.len()];
        }
        let n = self.count as f64;
        self.m2
            .iter()
            .map(|m2| (m2.max(0.0) / (n - 1.0)).sqrt() / n.sqrt())
            .collect()
    }
}

/// Monte Carlo over `n` samples of `k` real statistics computed from the same
/// draw; `f` fills a length-`k` buffer.
pub fn monte_carlo_multi<F>(n: usize, k: usize, root: &RngStream, f: F) -> Vec<ScalarStats>
where
    F: Fn(&mut RngStream, &mut [f64]) + Sync,
{
    let parts = map_chunks(n, root, |len, rng| {
        let mut stats = vec![ScalarStats::default(); k];
        let mut buf = vec![0.0; k];
        for _ in 0..len {
            f(rng, &mut buf);
            for (s, &x) in stats.iter_mut().zip(&buf) {
                s.push(x);
            }
        }
        stats
    });
    pairwise_reduce(parts, |a, b| {
        a.into_iter()
            .zip(b)
            .map(|(x, y)| ScalarStats::merge(x, y))
            .collect()
    })
    .unwrap_or_else(|| vec![ScalarStats::default(); k])
}

pub fn monte_carlo<F>(n: usize, root: &RngStream, f: F) -> ScalarStats
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    monte_carlo_multi(n, 1, root, |rng, buf| buf[0] = f(rng))[0]
}

pub fn monte_carlo_matrix<F>(
    n: usize,
    rows: usize,
    cols: usize,
    root: &RngStream,
    f: F,
) -> MatrixStats
where
    F: Fn(&mut RngStream) -> ComplexMatrix + Sync,
{
    let parts = map_chunks(n, root, |len, rng| {
        let mut stats = MatrixStats::new(rows, cols);
        for _ in 0..len {
            stats.push(&f(rng));
        }
        stats
    });
    pairwise_reduce(parts, MatrixStats::merge).unwrap_or_else(|| MatrixStats::new(rows, cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = ScalarStats::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = ScalarStats::default();
        let mut right = ScalarStats::default();
        xs[..333].iter().for_each(|&x| left.push(x));
        xs[333..].iter().for_each(|&x| right.push(x));
        let merged = ScalarStats::merge(left, right);
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0;
        assert!((merged.mean - mean).abs() < 1e-12);
        assert!((merged.std_dev().powi(2) - var).abs() < 1e-10);
        assert!((whole.m2 - merged.m2).abs() < 1e-8);
    }

    #[test]
    fn pairwise_order_is_fixed() {
        let v: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let r = pairwise_reduce(v, |a, b| format!("({a}{b})")).unwrap();
        assert_eq!(r, "(((01)(23))4)");
        assert!(pairwise_reduce(Vec::<u8>::new(), |a, _| a).is_none());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let root = RngStream::from_seed(77);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo(10_000, &root, |rng| rng.gaussian()))
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one, four);
        assert_eq!(one.count, 10_000);
    }
}
