//! Exact checks on assembled chains: convexity, sumset membership through
//! witnesses, the inequality audit, and size/difference statistics.

mod audit;
mod stats;

pub use audit::{audit_bounds, max_gap, min_gap, window_size, AuditReport, Check};
pub use stats::{diff_popularity, measure, DiffStats, Measurement};

use thiserror::Error;

use crate::construction::{Basis, Witness};
use crate::model::ScaledInt;
use crate::splice::Chain;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("input is not sorted at position {0}")]
    Unsorted(usize),
    #[error("element {index} ({value}) is not x_{i} + y_{j}", i = witness.i, j = witness.j)]
    WitnessMismatch {
        index: usize,
        value: ScaledInt,
        witness: Witness,
    },
    #[error("chain has {values} values but {witnesses} witnesses")]
    WitnessCount { values: usize, witnesses: usize },
    #[error("block pair ({k}, {k_next}) is outside [{lo}, {n}]")]
    PairOutOfRange {
        k: i64,
        k_next: i64,
        lo: i64,
        n: i64,
    },
    #[error("{required} pairs needed but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

/// True iff consecutive gaps strictly increase. Rejects unsorted input.
pub fn is_convex(s: &[ScaledInt]) -> Result<bool, VerifyError> {
    if let Some(pos) = s.windows(2).position(|w| w[0] > w[1]) {
        return Err(VerifyError::Unsorted(pos + 1));
    }
    let gaps: Vec<ScaledInt> = s.windows(2).map(|w| &w[1] - &w[0]).collect();
    Ok(gaps.windows(2).all(|g| g[0] < g[1]))
}

/// Recomputes `x_i + y_j` for every chain element from the basis tables.
/// Returns the number of elements checked.
pub fn check_witnesses(chain: &Chain, basis: &Basis) -> Result<usize, VerifyError> {
    let values = chain.values.values();
    if values.len() != chain.witnesses.len() {
        return Err(VerifyError::WitnessCount {
            values: values.len(),
            witnesses: chain.witnesses.len(),
        });
    }
    for (index, (value, w)) in values.iter().zip(&chain.witnesses).enumerate() {
        let ok = match (basis.xs.get(&w.i), basis.ys.get(&w.j)) {
            (Some(x), Some(y)) => &(x + y) == value,
            _ => false,
        };
        if !ok {
            return Err(VerifyError::WitnessMismatch {
                index,
                value: value.clone(),
                witness: *w,
            });
        }
    }
    Ok(values.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_basis, build_block};
    use crate::model::{make_params, paper_theta};
    use crate::splice::{Chain, ConvexSeq};

    fn seq(v: &[i64]) -> Vec<ScaledInt> {
        v.iter().map(|&x| ScaledInt::from(x)).collect()
    }

    #[test]
    fn convexity_examples() {
        assert_eq!(is_convex(&seq(&[0, 1, 3, 6])), Ok(true));
        assert_eq!(is_convex(&seq(&[0, 1, 2])), Ok(false));
        assert_eq!(is_convex(&seq(&[5])), Ok(true));
        assert_eq!(is_convex(&seq(&[])), Ok(true));
        assert_eq!(is_convex(&seq(&[4, 9])), Ok(true));
        assert_eq!(is_convex(&seq(&[0, 3, 2])), Err(VerifyError::Unsorted(2)));
    }

    fn block_chain(n: i64, k: i64) -> (Chain, crate::construction::Basis) {
        let params = make_params(n, paper_theta(), 4).unwrap();
        let block = build_block(&params, k).unwrap();
        let chain = Chain {
            values: ConvexSeq::new(block.values()).unwrap(),
            witnesses: block.entries.iter().map(|e| e.witness).collect(),
            block_indices: vec![k],
            splice_log: vec![],
        };
        (chain, build_basis(&params))
    }

    #[test]
    fn witnesses_recompute() {
        let (chain, basis) = block_chain(2, 2);
        let pos = chain.witnesses.iter().position(|w| w.i == 1).unwrap();
        assert_eq!(chain.values.values()[pos], ScaledInt::from(16001));
        assert_eq!(check_witnesses(&chain, &basis), Ok(7));

        let mut tampered = chain.clone();
        tampered.witnesses[pos] = Witness { i: 1, j: 2 };
        assert_eq!(
            check_witnesses(&tampered, &basis),
            Err(VerifyError::WitnessMismatch {
                index: pos,
                value: ScaledInt::from(16001),
                witness: Witness { i: 1, j: 2 },
            })
        );

        let mut out_of_range = chain.clone();
        out_of_range.witnesses[pos] = Witness { i: 5, j: -3 };
        assert!(check_witnesses(&out_of_range, &basis).is_err());

        let empty = Chain {
            values: ConvexSeq::default(),
            witnesses: vec![],
            block_indices: vec![],
            splice_log: vec![],
        };
        assert_eq!(check_witnesses(&empty, &basis), Ok(0));
    }
}
