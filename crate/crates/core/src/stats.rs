//! Small statistics helpers for distributional comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sample Kolmogorov-Smirnov comparison at a fixed significance level.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub level: f64,
    pub n: usize,
    pub m: usize,
    pub reject: bool,
}

/// Supremum distance between the two empirical CDFs.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("non-NaN samples"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("non-NaN samples"));
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        // Consume a tied value from both sides before comparing the CDFs,
        // otherwise ties across samples inflate the supremum.
        let x = a[i].min(b[j]);
        while i < n && a[i] == x {
            i += 1;
        }
        while j < m && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Asymptotic two-sample critical value `c(level) * sqrt((n+m)/(n m))`.
pub fn ks_critical(level: f64, n: usize, m: usize) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * (((n + m) as f64) / ((n * m) as f64)).sqrt()
}

/// Runs the comparison, rejecting equality in law when the statistic
/// exceeds the asymptotic critical value.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("KS test needs nonempty samples".into()));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::Domain(format!(
            "significance level must lie in (0,1), got {level}"
        )));
    }
    let statistic = ks_statistic(a, b);
    let critical = ks_critical(level, a.len(), b.len());
    Ok(KsResult {
        statistic,
        critical,
        level,
        n: a.len(),
        m: b.len(),
        reject: statistic > critical,
    })
}
