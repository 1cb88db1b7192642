use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::construction::Basis;
use crate::model::{Params, ScaledInt};
use crate::splice::Chain;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub size_a: usize,
    pub size_b: usize,
    /// `|A| / n²` as `"p/q"`.
    pub density: String,
    pub density_approx: f64,
    pub per_block_kept: BTreeMap<i64, usize>,
    /// Chain elements in `[k - 1 + eps, k + 1 - eps]`, per block `k`.
    pub middle_interval_counts: BTreeMap<i64, usize>,
}

impl Measurement {
    pub fn density(&self) -> BigRational {
        self.density
            .parse()
            .expect("density is written as a rational")
    }
}

pub fn measure(chain: &Chain, basis: &Basis, params: &Params) -> Measurement {
    let values = chain.values.values();
    let mut per_block_kept = BTreeMap::new();
    for w in &chain.witnesses {
        *per_block_kept.entry(w.block()).or_insert(0) += 1;
    }
    let middle_interval_counts = chain
        .block_indices
        .iter()
        .map(|&k| {
            let lo = &params.integer(k - 1) + &ScaledInt::new(params.eps_scaled.clone());
            let hi = &params.integer(k + 1) - &ScaledInt::new(params.eps_scaled.clone());
            let from = values.partition_point(|a| *a < lo);
            let to = values.partition_point(|a| *a <= hi);
            (k, to.saturating_sub(from))
        })
        .collect();
    let n2 = BigInt::from(params.n) * BigInt::from(params.n);
    let density = BigRational::new(BigInt::from(values.len()), n2);
    Measurement {
        size_a: values.len(),
        size_b: basis.len(),
        density: density.to_string(),
        density_approx: values.len() as f64 / (params.n as f64 * params.n as f64),
        per_block_kept,
        middle_interval_counts,
    }
}

/// Multiplicities `r(x)` of positive differences `a1 - a2` within a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffStats {
    /// `(x, r(x))` sorted by `x`.
    pub histogram: Vec<(ScaledInt, u64)>,
    pub threshold: u64,
    pub popular_count: usize,
    pub total_pairs: u64,
}

impl DiffStats {
    pub fn popular_count(&self, threshold: u64) -> usize {
        self.histogram
            .iter()
            .filter(|(_, r)| *r >= threshold)
            .count()
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.histogram.iter().map(|(_, r)| *r).max().unwrap_or(0)
    }

    pub fn multiplicity(&self, x: &ScaledInt) -> u64 {
        self.histogram
            .binary_search_by(|(d, _)| d.cmp(x))
            .map(|i| self.histogram[i].1)
            .unwrap_or(0)
    }
}

fn count_runs<T: Ord + Clone>(mut diffs: Vec<T>) -> Vec<(T, u64)> {
    diffs.sort_unstable();
    let mut out: Vec<(T, u64)> = Vec::new();
    for d in diffs {
        match out.last_mut() {
            Some((last, c)) if *last == d => *c += 1,
            _ => out.push((d, 1)),
        }
    }
    out
}

/// Sort-and-count histogram over all pairs of a sorted set.
///
/// Uses machine integers when every value fits; the arbitrary-precision path
/// is otherwise identical.
pub fn diff_popularity(
    a: &[ScaledInt],
    threshold: u64,
    max_pairs: u128,
) -> Result<DiffStats, VerifyError> {
    if let Some(pos) = a.windows(2).position(|w| w[0] > w[1]) {
        return Err(VerifyError::Unsorted(pos + 1));
    }
    let len = a.len() as u128;
    let required = len * len.saturating_sub(1) / 2;
    if required > max_pairs {
        return Err(VerifyError::BudgetExceeded {
            required,
            budget: max_pairs,
        });
    }
    let small: Option<Vec<i128>> = a
        .iter()
        .map(|v| v.to_i128().filter(|x| x.unsigned_abs() < 1u128 << 125))
        .collect();
    let histogram: Vec<(ScaledInt, u64)> = match small {
        Some(vals) => {
            let mut diffs = Vec::with_capacity(required as usize);
            for (idx, hi) in vals.iter().enumerate() {
                diffs.extend(vals[..idx].iter().map(|lo| hi - lo).filter(|d| *d > 0));
            }
            count_runs(diffs)
                .into_iter()
                .map(|(d, c)| (ScaledInt::new(d), c))
                .collect()
        }
        None => {
            let mut diffs = Vec::with_capacity(required as usize);
            for (idx, hi) in a.iter().enumerate() {
                diffs.extend(
                    a[..idx]
                        .iter()
                        .map(|lo| hi - lo)
                        .filter(|d| d.num().is_positive()),
                );
            }
            count_runs(diffs)
        }
    };
    let total_pairs = histogram.iter().map(|(_, c)| c).sum();
    let mut stats = DiffStats {
        histogram,
        threshold,
        popular_count: 0,
        total_pairs,
    };
    stats.popular_count = stats.popular_count(threshold);
    Ok(stats)
}
