//! Brute-force ground truth for small instances: explicit sumsets and the
//! longest convex subsequence, by dynamic programming and by enumeration.

use thiserror::Error;

use crate::model::ScaledInt;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{required} exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("exhaustive search is limited to {max} elements (got {got})")]
    TooLarge { got: usize, max: usize },
}

pub const EXHAUSTIVE_MAX: usize = 20;

/// Sorted, deduplicated pairwise sums.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortedSums(Vec<ScaledInt>);

impl SortedSums {
    /// Sorts and deduplicates arbitrary values.
    pub fn from_values(mut v: Vec<ScaledInt>) -> Self {
        v.sort();
        v.dedup();
        SortedSums(v)
    }

    pub fn values(&self) -> &[ScaledInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `{a + b : a, b ∈ set}`, guarded by the number of unordered pairs.
pub fn sumset(set: &[ScaledInt], max_pairs: u128) -> Result<SortedSums, OracleError> {
    let len = set.len() as u128;
    let required = len * (len + 1) / 2;
    if required > max_pairs {
        return Err(OracleError::BudgetExceeded {
            required,
            budget: max_pairs,
        });
    }
    let mut sums = Vec::with_capacity(required as usize);
    for (i, a) in set.iter().enumerate() {
        sums.extend(set[i..].iter().map(|b| a + b));
    }
    Ok(SortedSums::from_values(sums))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexSubsequence {
    pub length: usize,
    /// Increasing indices into the input.
    pub witness: Vec<usize>,
}

/// Longest subsequence with strictly increasing gaps, in `O(N²)` time and memory.
///
/// `best[j][i]` (`i < j`) is the longest convex subsequence ending `s_i, s_j`.
/// Its predecessor `s_p` must satisfy `s_p > 2s_i - s_j`; those `p` form a
/// suffix of `0..i` that only grows as `j` increases, so each row keeps a
/// suffix argmax and a pointer that moves monotonically.
pub fn lcs_dp(s: &SortedSums, max_len: usize) -> Result<ConvexSubsequence, OracleError> {
    let v = s.values();
    let n = v.len();
    if n > max_len {
        return Err(OracleError::BudgetExceeded {
            required: n as u128,
            budget: max_len as u128,
        });
    }
    if n <= 2 {
        return Ok(ConvexSubsequence {
            length: n,
            witness: (0..n).collect(),
        });
    }

    // best[j][i] and, per row j, suf_arg[j][t] = argmax_{t <= i < j} best[j][i].
    let mut best: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut suf_arg: Vec<Vec<u32>> = Vec::with_capacity(n);
    // ptr[i]: smallest p with s_p > 2s_i - s_j for the current j (starts at i).
    let mut ptr: Vec<usize> = (0..n).collect();
    let mut overall = (2u32, 0usize, 1usize);

    for j in 0..n {
        let mut row = vec![0u32; j];
        for i in 0..j {
            let threshold = &(&v[i] + &v[i]) - &v[j];
            let p = &mut ptr[i];
            while *p > 0 && v[*p - 1] > threshold {
                *p -= 1;
            }
            row[i] = if *p < i {
                let arg = suf_arg[i][*p] as usize;
                best[i][arg] + 1
            } else {
                2
            };
            if row[i] > overall.0 {
                overall = (row[i], i, j);
            }
        }
        let mut args = vec![0u32; j];
        for t in (0..j).rev() {
            args[t] = if t + 1 < j && row[args[t + 1] as usize] >= row[t] {
                args[t + 1]
            } else {
                t as u32
            };
        }
        best.push(row);
        suf_arg.push(args);
    }

    // Walk predecessors back from the best ending pair.
    let (length, mut i, mut j) = overall;
    let mut rev = vec![j, i];
    while best[j][i] > 2 {
        let threshold = &(&v[i] + &v[i]) - &v[j];
        let p0 = v[..i].partition_point(|x| *x <= threshold);
        let p = suf_arg[i][p0] as usize;
        rev.push(p);
        j = i;
        i = p;
    }
    rev.reverse();
    Ok(ConvexSubsequence {
        length: length as usize,
        witness: rev,
    })
}

/// Longest convex subsequence by trying every subset.
pub fn lcs_exhaustive(s: &SortedSums) -> Result<usize, OracleError> {
    let v = s.values();
    if v.len() > EXHAUSTIVE_MAX {
        return Err(OracleError::TooLarge {
            got: v.len(),
            max: EXHAUSTIVE_MAX,
        });
    }
    let mut best = 0usize;
    let mut picked = Vec::with_capacity(v.len());
    for mask in 1u32..(1u32 << v.len()) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        picked.clear();
        picked.extend((0..v.len()).filter(|b| mask >> b & 1 == 1).map(|b| &v[b]));
        let convex = picked.windows(3).all(|w| (w[1] - w[0]) < (w[2] - w[1]));
        if convex {
            best = size;
        }
    }
    Ok(best)
}
