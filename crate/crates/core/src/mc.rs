//! Path-parallel Monte Carlo driver and summary statistics.
//!
//! Estimates must not depend on scheduling: every path derives its draws
//! from its own counter-indexed stream, results are collected in path
//! order, and the summary pass is sequential. With the `parallel` feature
//! enabled paths run on the rayon pool; [`map_paths_seq`] is always
//! available and produces bitwise identical output.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::RngSpec;

/// Runs `f` over path indices `0..n` and collects results in index order.
#[cfg(feature = "parallel")]
pub fn map_paths<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    let raw: Vec<Result<T>> = (0..n).into_par_iter().map(f).collect();
    first_error_in_order(raw)
}

/// Runs `f` over path indices `0..n` and collects results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_paths<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    map_paths_seq(n, f)
}

/// Sequential twin of [`map_paths`], kept unconditionally for benchmarks
/// and for checking scheduler independence.
pub fn map_paths_seq<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T>,
{
    let raw: Vec<Result<T>> = (0..n).map(f).collect();
    first_error_in_order(raw)
}

/// Surfaces the lowest-index error so failures are deterministic under
/// any scheduling.
fn first_error_in_order<T>(raw: Vec<Result<T>>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(raw.len());
    for r in raw {
        out.push(r?);
    }
    Ok(out)
}

/// Sample mean with its standard error and the inputs that reproduce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: RngSpec,
    pub dt: f64,
    pub eps_cut: f64,
    /// Set by estimators whose integrand provably has infinite variance at
    /// the requested parameters; `stderr` is then only an in-sample scale.
    pub variance_warning: bool,
}

impl McEstimate {
    /// Two-pass mean and standard error, sequential in input order.
    pub fn from_values(values: &[f64], seed: RngSpec, dt: f64, eps_cut: f64) -> Self {
        let n = values.len() as u64;
        let (mean, stderr) = if n == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let mean = values.iter().sum::<f64>() / n as f64;
            let stderr = if n < 2 {
                0.0
            } else {
                let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
                (ss / ((n - 1) as f64 * n as f64)).sqrt()
            };
            (mean, stderr)
        };
        McEstimate {
            mean,
            stderr,
            n,
            seed,
            dt,
            eps_cut,
            variance_warning: false,
        }
    }
}
