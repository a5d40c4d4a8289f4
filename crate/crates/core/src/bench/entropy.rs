use rayon::prelude::*;

use super::{instance_seed, BenchError};
use crate::problems::{gen_random_3sat, sat3_oracle, SAT3_ORACLE_MAX_VARS};

/// Clause-to-variable ratio at the random 3-SAT threshold.
pub const PHASE_RATIO: f64 = 4.26;

/// Solution counts at one `n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EntropyRecord {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub satisfiable: usize,
    pub mean_count: f64,
    /// `2^n (7/8)^m`.
    pub analytic_mean: f64,
}

impl EntropyRecord {
    pub fn log2_mean(&self) -> Option<f64> {
        (self.mean_count > 0.0).then(|| self.mean_count.log2())
    }

    /// `log₂(measured / analytic)`.
    pub fn log2_gap(&self) -> Option<f64> {
        self.log2_mean().map(|l| l - self.analytic_mean.log2())
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EntropyReport {
    pub records: Vec<EntropyRecord>,
    /// Least-squares slope of `log₂ mean` against `n`, over the sizes with a
    /// non-zero mean.
    pub slope: Option<f64>,
    /// `1 + 4.26 · log₂(7/8)`.
    pub analytic_slope: f64,
    /// Sizes left out of the fit because every sample was unsatisfiable.
    pub excluded: Vec<usize>,
}

/// Slope of `1 + r · log₂(7/8)`.
pub fn analytic_slope(ratio: f64) -> f64 {
    1.0 + ratio * (7.0f64 / 8.0).log2()
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Counts models of `samples` random formulas with `m = round(4.26 n)` for
/// each `n`.
pub fn entropy_experiment(
    n_values: &[usize],
    samples: usize,
    seed: u64,
) -> Result<EntropyReport, BenchError> {
    if samples == 0 {
        return Err(BenchError::Params("need at least one sample".into()));
    }
    if let Some(&n) = n_values
        .iter()
        .find(|&&n| !(3..=SAT3_ORACLE_MAX_VARS).contains(&n))
    {
        return Err(BenchError::Params(format!(
            "n={n} outside 3..={SAT3_ORACLE_MAX_VARS}"
        )));
    }
    let mut records = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let m = (PHASE_RATIO * n as f64).round() as usize;
        let counts: Vec<u64> = (0..samples)
            .into_par_iter()
            .map(|i| Ok(sat3_oracle(&gen_random_3sat(n, m, instance_seed(seed, n, i))?).1))
            .collect::<Result<_, BenchError>>()?;
        let total: u64 = counts.iter().sum();
        records.push(EntropyRecord {
            n,
            m,
            samples,
            satisfiable: counts.iter().filter(|&&c| c > 0).count(),
            mean_count: total as f64 / samples as f64,
            analytic_mean: (n as f64 + m as f64 * (7.0f64 / 8.0).log2()).exp2(),
        });
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.log2_mean().map(|l| (r.n as f64, l)))
        .collect();
    let excluded = records
        .iter()
        .filter(|r| r.mean_count == 0.0)
        .map(|r| r.n)
        .collect();
    Ok(EntropyReport {
        slope: least_squares_slope(&points),
        analytic_slope: analytic_slope(PHASE_RATIO),
        records,
        excluded,
    })
}
