//! The sequences `x_i = i + (alpha+gamma)i²`, `y_j = j - alpha·j²`, the basis
//! they form, and the truncated blocks of sums `x_i + y_{k-i}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Params, ScaledInt};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("index {index} outside [{lo}, {hi}]")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },
    #[error("block index k = {k} outside (0, {n}]")]
    BlockOutOfRange { k: i64, n: i64 },
}

/// The pair `(i, j)` certifying that a value equals `x_i + y_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub i: i64,
    pub j: i64,
}

impl Witness {
    /// Index sum, i.e. the block the element came from.
    pub fn block(&self) -> i64 {
        self.i + self.j
    }
}

fn check_basis_index(params: &Params, index: i64) -> Result<(), ConstructionError> {
    let (lo, hi) = (-2 * params.n, 2 * params.n);
    if index < lo || index > hi {
        return Err(ConstructionError::IndexOutOfRange { index, lo, hi });
    }
    Ok(())
}

/// `D·i + (1000n + 1)·i²`.
pub fn x_value(params: &Params, i: i64) -> Result<ScaledInt, ConstructionError> {
    check_basis_index(params, i)?;
    let i = BigInt::from(i);
    let coeff = &params.alpha_scaled + &params.gamma_scaled;
    Ok(ScaledInt::new(&params.d * &i + coeff * &i * &i))
}

/// `D·j - 1000n·j²`.
pub fn y_value(params: &Params, j: i64) -> Result<ScaledInt, ConstructionError> {
    check_basis_index(params, j)?;
    let j = BigInt::from(j);
    Ok(ScaledInt::new(
        &params.d * &j - &params.alpha_scaled * &j * &j,
    ))
}

#[derive(Clone, Debug)]
pub struct Basis {
    pub xs: BTreeMap<i64, ScaledInt>,
    pub ys: BTreeMap<i64, ScaledInt>,
    /// Sorted, deduplicated union of `xs` and `ys`.
    pub elements: Vec<ScaledInt>,
    pub xs_increasing: bool,
    pub ys_increasing: bool,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn strictly_increasing<'a>(vals: impl Iterator<Item = &'a ScaledInt>) -> bool {
    let v: Vec<_> = vals.collect();
    v.windows(2).all(|w| w[0] < w[1])
}

/// Builds `{x_i} ∪ {y_j}` for `i, j ∈ [-2n, 2n]`.
///
/// Both sequences are increasing once `n >= 4`; for smaller `n` the flags
/// record that they are not, and `elements` is still the exact sorted union.
pub fn build_basis(params: &Params) -> Basis {
    let r = 2 * params.n;
    let xs: BTreeMap<_, _> = (-r..=r)
        .map(|i| (i, x_value(params, i).expect("index in range")))
        .collect();
    let ys: BTreeMap<_, _> = (-r..=r)
        .map(|j| (j, y_value(params, j).expect("index in range")))
        .collect();
    let mut elements: Vec<ScaledInt> = xs.values().chain(ys.values()).cloned().collect();
    elements.sort();
    elements.dedup();
    Basis {
        xs_increasing: strictly_increasing(xs.values()),
        ys_increasing: strictly_increasing(ys.values()),
        xs,
        ys,
        elements,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEntry {
    pub i: i64,
    pub value: ScaledInt,
    pub witness: Witness,
}

/// `{b_i^(k)}` for `i ∈ [-n, 2n]`, sorted by `i`.
#[derive(Clone, Debug)]
pub struct Block {
    pub k: i64,
    pub entries: Vec<BlockEntry>,
}

impl Block {
    pub fn values(&self) -> Vec<ScaledInt> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }

    pub fn first(&self) -> &BlockEntry {
        &self.entries[0]
    }

    pub fn last(&self) -> &BlockEntry {
        &self.entries[self.entries.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `b_i^(k)` scaled: `1000n³k - 1000nk² + i² + 2000nki`.
///
/// Defined for every integer `i`; the block itself keeps `i ∈ [-n, 2n]`.
pub fn block_value(params: &Params, k: i64, i: i64) -> ScaledInt {
    let (k, i) = (BigInt::from(k), BigInt::from(i));
    let two_alpha = &params.alpha_scaled * 2;
    ScaledInt::new(
        &params.d * &k - &params.alpha_scaled * &k * &k
            + &params.gamma_scaled * &i * &i
            + two_alpha * &k * &i,
    )
}

pub fn build_block(params: &Params, k: i64) -> Result<Block, ConstructionError> {
    let n = params.n;
    if k <= 0 || k > n {
        return Err(ConstructionError::BlockOutOfRange { k, n });
    }
    let entries = (-n..=2 * n)
        .map(|i| BlockEntry {
            i,
            value: block_value(params, k, i),
            witness: Witness { i, j: k - i },
        })
        .collect();
    Ok(Block { k, entries })
}

/// `b_{i+1}^(k) - b_i^(k) = gamma(2i+1) + 2k·alpha`, scaled: `(2i+1) + 2000nk`.
pub fn gap(params: &Params, k: i64, i: i64) -> Result<ScaledInt, ConstructionError> {
    let n = params.n;
    if i < -n || i > 2 * n - 1 {
        return Err(ConstructionError::IndexOutOfRange {
            index: i,
            lo: -n,
            hi: 2 * n - 1,
        });
    }
    Ok(gap_unchecked(params, k, i))
}

pub(crate) fn gap_unchecked(params: &Params, k: i64, i: i64) -> ScaledInt {
    let two_alpha = &params.alpha_scaled * 2;
    ScaledInt::new(&params.gamma_scaled * BigInt::from(2 * i + 1) + two_alpha * BigInt::from(k))
}
