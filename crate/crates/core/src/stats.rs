//! Summary statistics over error samples: mean/abs-mean/max, nearest-rank
//! percentiles and empirical CDFs.
//!
//! Sums use compensated (Kahan) accumulation and quantiles are nearest-rank
//! without interpolation, so results are reproducible across platforms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cast, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("empty sample set")]
    EmptyInput,
    #[error("quantile {q} outside (0, 1)")]
    QuantileOutOfRange { q: f64 },
    #[error("grid values must be sorted ascending")]
    UnsortedGrid,
}

/// Moment and extreme statistics of a signed sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats<R> {
    /// Mean of |x|.
    pub abs_mean_ns: R,
    /// Signed mean; consumers usually report its magnitude.
    pub mean_ns: R,
    /// Max of |x|.
    pub max_abs_ns: R,
    pub count: u64,
    /// Requested quantile -> value pairs, ascending in quantile.
    pub percentiles: Vec<(f64, R)>,
}

fn kahan_sum<R: Scalar>(values: impl Iterator<Item = R>) -> R {
    let mut sum = R::zero();
    let mut carry = R::zero();
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Summary statistics without percentile readouts.
pub fn summarize<R: Scalar>(samples: &[R]) -> Result<SummaryStats<R>, StatsError> {
    summarize_with_percentiles(samples, &[])
}

/// Summary statistics plus nearest-rank values at the requested quantiles.
pub fn summarize_with_percentiles<R: Scalar>(
    samples: &[R],
    quantiles: &[f64],
) -> Result<SummaryStats<R>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let n = cast::<R>(samples.len() as f64);
    let mean_ns = kahan_sum(samples.iter().copied()) / n;
    let abs_mean_ns = kahan_sum(samples.iter().map(|v| v.abs())) / n;
    let max_abs_ns = samples
        .iter()
        .map(|v| v.abs())
        .fold(R::zero(), |a, b| if b > a { b } else { a });
    let mut percentiles = Vec::with_capacity(quantiles.len());
    for &q in quantiles {
        percentiles.push((q, percentile(samples, q)?));
    }
    percentiles.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite quantile"));
    Ok(SummaryStats {
        abs_mean_ns,
        mean_ns,
        max_abs_ns,
        count: samples.len() as u64,
        percentiles,
    })
}

/// Nearest-rank quantile: the `ceil(q * n)`-th smallest sample.
pub fn percentile<R: Scalar>(samples: &[R], q: f64) -> Result<R, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(StatsError::QuantileOutOfRange { q });
    }
    let rank = (q * samples.len() as f64).ceil() as usize;
    let idx = rank.clamp(1, samples.len()) - 1;
    let mut scratch = samples.to_vec();
    let (_, value, _) =
        scratch.select_nth_unstable_by(idx, |a, b| a.partial_cmp(b).expect("non-NaN sample"));
    Ok(*value)
}

/// Right-continuous empirical CDF evaluated on a sorted grid:
/// `P(X <= v)` for each grid value `v`.
pub fn empirical_cdf<R: Scalar>(
    samples: &[R],
    grid: &[R],
) -> Result<Vec<(R, f64)>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(StatsError::UnsortedGrid);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("non-NaN sample"));
    let n = samples.len() as f64;
    Ok(grid
        .iter()
        .map(|&v| {
            let below = sorted.partition_point(|s| *s <= v);
            (v, below as f64 / n)
        })
        .collect())
}
