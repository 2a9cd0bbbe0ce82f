//! Execution strategy for per-sample work and the seeded random sources the
//! checkers draw from.
//!
//! Every sample gets its own ChaCha stream derived from `(seed, index)`, so a
//! run produces the same numbers whether samples are evaluated in parallel
//! or in order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cxmat::{Cx, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, and silently runs
    /// sequentially otherwise.
    #[default]
    Parallel,
}

impl Exec {
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            Exec::Parallel => par_map(n, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

pub type SampleRng = ChaCha8Rng;

/// Independent stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: usize) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn gaussian_cx(rng: &mut impl Rng) -> Cx {
    Cx::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_mat(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| gaussian_cx(rng))
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<Cx> {
    (0..n).map(|_| gaussian_cx(rng)).collect()
}

/// Haar-ish random unitary: Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> Mat {
    let g = gaussian_mat(rng, n, n);
    let mut cols: Vec<Vec<Cx>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.col(j);
        for q in &cols {
            let proj: Cx = crate::cxmat::inner(q, &v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    Mat::from_fn(n, n, |i, j| cols[j][i])
}
