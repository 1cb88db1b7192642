//! Gluing convex sequences at a nested gap, and the left-to-right assembly
//! of consecutive blocks into one convex chain.
//!
//! If `[x_u, x_{u+1}] ⊆ [y_v, y_{v+1}]` for convex `X` and `Y`, then
//! `x_0..=x_u` followed by `y_{v+1}..` is convex: the junction gap
//! `y_{v+1} - x_u` is at least `x_{u+1} - x_u` and at most `y_{v+1} - y_v`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::{build_block, ConstructionError, Witness};
use crate::model::{Params, ScaledInt};
use crate::verify::is_convex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpliceError {
    #[error("no gap of the earlier sequence nests inside a gap of the later one")]
    NoNesting,
    #[error("splice point (u = {u}, v = {v}) does not nest")]
    NestingViolated { u: usize, v: usize },
    #[error("spliced sequence failed the convexity re-check")]
    ConvexityBroken,
    #[error("input sequence is not sorted")]
    Unsorted,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssembleError {
    #[error("no multiple of stride {stride} in [{lo}, {n}]")]
    NoBlocks { stride: i64, lo: i64, n: i64 },
    #[error("blocks k = {k_from} and k = {k_to} cannot be spliced: {source}")]
    NoNesting {
        k_from: i64,
        k_to: i64,
        source: SpliceError,
    },
    #[error("assembled chain failed its exact re-check: {0}")]
    Internal(SpliceError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// A sorted sequence of scaled values with strictly increasing gaps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexSeq(Vec<ScaledInt>);

impl ConvexSeq {
    /// Wraps `values` after checking convexity exactly.
    pub fn new(values: Vec<ScaledInt>) -> Result<Self, SpliceError> {
        match is_convex(&values) {
            Ok(true) => Ok(ConvexSeq(values)),
            Ok(false) => Err(SpliceError::ConvexityBroken),
            Err(_) => Err(SpliceError::Unsorted),
        }
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

impl AsRef<[ScaledInt]> for ConvexSeq {
    fn as_ref(&self) -> &[ScaledInt] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplicePoint {
    pub u: usize,
    pub v: usize,
}

impl SplicePoint {
    pub fn nests(&self, x: &[ScaledInt], y: &[ScaledInt]) -> bool {
        let SplicePoint { u, v } = *self;
        u + 1 < x.len() && v + 1 < y.len() && y[v] <= x[u] && x[u + 1] <= y[v + 1]
    }
}

/// Smallest `u` (then smallest `v`) with `[x_u, x_{u+1}] ⊆ [y_v, y_{v+1}]`.
pub fn find_nesting(x: &[ScaledInt], y: &[ScaledInt]) -> Result<SplicePoint, SpliceError> {
    find_nesting_from(x, y, 0)
}

/// As [`find_nesting`], considering only `u >= start`.
///
/// Two-pointer scan: for each `u`, `v` is the last index with `y_v <= x_u`,
/// which is the only candidate since `y` is strictly increasing.
pub fn find_nesting_from(
    x: &[ScaledInt],
    y: &[ScaledInt],
    start: usize,
) -> Result<SplicePoint, SpliceError> {
    if y.is_empty() {
        return Err(SpliceError::NoNesting);
    }
    let mut v = 0usize;
    for u in start..x.len().saturating_sub(1) {
        while v + 1 < y.len() && y[v + 1] <= x[u] {
            v += 1;
        }
        if y[v] > x[u] {
            continue;
        }
        if v + 1 >= y.len() {
            break;
        }
        if x[u + 1] <= y[v + 1] {
            return Ok(SplicePoint { u, v });
        }
    }
    Err(SpliceError::NoNesting)
}

fn splice_slices<T: Clone>(x: &[T], y: &[T], p: SplicePoint) -> Vec<T> {
    x[..=p.u].iter().chain(&y[p.v + 1..]).cloned().collect()
}

/// `x_0..=x_u` followed by `y_{v+1}..`, re-checked for convexity.
pub fn splice_at(x: &ConvexSeq, y: &ConvexSeq, p: SplicePoint) -> Result<ConvexSeq, SpliceError> {
    if !p.nests(x.values(), y.values()) {
        return Err(SpliceError::NestingViolated { u: p.u, v: p.v });
    }
    let z = splice_slices(x.values(), y.values(), p);
    if !is_convex(&z).map_err(|_| SpliceError::ConvexityBroken)? {
        return Err(SpliceError::ConvexityBroken);
    }
    Ok(ConvexSeq(z))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpliceRecord {
    pub k_from: i64,
    pub k_to: i64,
    /// Index into the chain as it stood before this merge.
    pub u: usize,
    /// Position in the incoming block (0 is `i = -n`).
    pub v: usize,
    /// Block label `i` of the least element of block `k_from` above the
    /// incoming block's minimum; the scan starts there.
    pub start_i: i64,
    /// `b^(k_from)_{start_i} - b^(k_to)_{-n}`.
    pub d: ScaledInt,
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub values: ConvexSeq,
    pub witnesses: Vec<Witness>,
    pub block_indices: Vec<i64>,
    pub splice_log: Vec<SpliceRecord>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds every block in range and splices them left to right.
pub fn assemble(params: &Params) -> Result<Chain, AssembleError> {
    let ks = params.block_indices();
    let Some((&k0, rest)) = ks.split_first() else {
        return Err(AssembleError::NoBlocks {
            stride: params.stride,
            lo: params.k_min(),
            n: params.n,
        });
    };
    let first = build_block(params, k0)?;
    let mut values = first.values();
    let mut witnesses: Vec<Witness> = first.entries.iter().map(|e| e.witness).collect();
    let mut splice_log = Vec::with_capacity(rest.len());
    let mut k_prev = k0;

    for &k in rest {
        let block = build_block(params, k)?;
        let y = block.values();
        let fail = |source| AssembleError::NoNesting {
            k_from: k_prev,
            k_to: k,
            source,
        };
        let start = values
            .iter()
            .position(|a| *a > y[0])
            .ok_or_else(|| fail(SpliceError::NoNesting))?;
        let p = find_nesting_from(&values, &y, start).map_err(fail)?;
        let rec = SpliceRecord {
            k_from: k_prev,
            k_to: k,
            u: p.u,
            v: p.v,
            start_i: witnesses[start].i,
            d: &values[start] - &y[0],
        };
        let ws: Vec<Witness> = block.entries.iter().map(|e| e.witness).collect();
        values = splice_slices(&values, &y, p);
        witnesses = splice_slices(&witnesses, &ws, p);
        splice_log.push(rec);
        k_prev = k;
    }

    let values = ConvexSeq::new(values).map_err(AssembleError::Internal)?;
    Ok(Chain {
        values,
        witnesses,
        block_indices: ks,
        splice_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_params, ratio};

    fn seq(v: &[i64]) -> Vec<ScaledInt> {
        v.iter().map(|&x| ScaledInt::from(x)).collect()
    }

    fn cseq(v: &[i64]) -> ConvexSeq {
        ConvexSeq::new(seq(v)).unwrap()
    }

    // Exhaustive reference: all (u, v) in lexicographic order.
    fn brute_nesting(x: &[ScaledInt], y: &[ScaledInt]) -> Option<SplicePoint> {
        for u in 0..x.len().saturating_sub(1) {
            for v in 0..y.len().saturating_sub(1) {
                let p = SplicePoint { u, v };
                if p.nests(x, y) {
                    return Some(p);
                }
            }
        }
        None
    }

    #[test]
    fn nesting_examples() {
        let (x, y) = (seq(&[0, 6, 13]), seq(&[-10, -1, 14, 40]));
        assert_eq!(find_nesting(&x, &y), Ok(SplicePoint { u: 0, v: 1 }));
        assert_eq!(brute_nesting(&x, &y), Some(SplicePoint { u: 0, v: 1 }));

        let x = seq(&[0, 1, 3]);
        assert_eq!(find_nesting(&x, &x), Ok(SplicePoint { u: 0, v: 0 }));

        let (x, y) = (seq(&[0, 10, 21]), seq(&[-5, 4, 15, 30]));
        assert_eq!(find_nesting(&x, &y), Err(SpliceError::NoNesting));
        assert_eq!(brute_nesting(&x, &y), None);

        assert_eq!(
            find_nesting(&seq(&[1]), &seq(&[0, 5])),
            Err(SpliceError::NoNesting)
        );
        assert_eq!(
            find_nesting(&seq(&[1, 2]), &[]),
            Err(SpliceError::NoNesting)
        );
    }

    #[test]
    fn splice_examples() {
        let z = splice_at(
            &cseq(&[0, 6, 13]),
            &cseq(&[-10, -1, 14, 40]),
            SplicePoint { u: 0, v: 1 },
        )
        .unwrap();
        assert_eq!(z.values(), seq(&[0, 14, 40]).as_slice());

        let x = cseq(&[0, 1, 3]);
        assert_eq!(splice_at(&x, &x, SplicePoint { u: 0, v: 0 }).unwrap(), x);

        let z = splice_at(
            &cseq(&[0, 1]),
            &cseq(&[-2, 0, 4, 9]),
            SplicePoint { u: 0, v: 1 },
        )
        .unwrap();
        assert_eq!(z.values(), seq(&[0, 4, 9]).as_slice());

        assert_eq!(
            splice_at(
                &cseq(&[0, 10, 21]),
                &cseq(&[-5, 4, 15, 30]),
                SplicePoint { u: 0, v: 0 }
            ),
            Err(SpliceError::NestingViolated { u: 0, v: 0 })
        );
        assert!(matches!(
            splice_at(&cseq(&[0, 1]), &cseq(&[0, 1]), SplicePoint { u: 1, v: 0 }),
            Err(SpliceError::NestingViolated { .. })
        ));
    }

    #[test]
    fn convex_seq_rejects_bad_input() {
        assert_eq!(
            ConvexSeq::new(seq(&[0, 1, 2])),
            Err(SpliceError::ConvexityBroken)
        );
        assert_eq!(ConvexSeq::new(seq(&[3, 1])), Err(SpliceError::Unsorted));
    }

    #[test]
    fn scan_matches_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let random_convex = |rng: &mut rand::rngs::StdRng| {
            let len = rng.gen_range(0..8);
            let mut v = vec![rng.gen_range(-50i64..50)];
            let mut g = rng.gen_range(1i64..6);
            for _ in 1..len {
                v.push(v[v.len() - 1] + g);
                g += rng.gen_range(1..6);
            }
            seq(&v)
        };
        for _ in 0..2000 {
            let x = random_convex(&mut rng);
            let y = random_convex(&mut rng);
            assert_eq!(
                find_nesting(&x, &y).ok(),
                brute_nesting(&x, &y),
                "{x:?} {y:?}"
            );
        }
    }

    #[test]
    fn assembles_exploratory_run() {
        let params = make_params(64, ratio(7, 8), 4).unwrap();
        let chain = assemble(&params).unwrap();
        assert_eq!(chain.block_indices, vec![56, 60, 64]);
        assert_eq!(chain.splice_log.len(), 2);
        assert!(is_convex(chain.values.values()).unwrap());
        assert!(chain.len() >= 3 * 32);
        assert_eq!(chain.witnesses.len(), chain.len());

        // Between splices the chain is a contiguous run of one block.
        for w in chain.witnesses.windows(2) {
            if w[0].block() == w[1].block() {
                assert_eq!(w[1].i, w[0].i + 1);
            } else {
                assert_eq!(w[1].block(), w[0].block() + 4);
            }
        }
        let runs = chain
            .witnesses
            .windows(2)
            .filter(|w| w[0].block() != w[1].block())
            .count();
        assert_eq!(runs, chain.splice_log.len());
    }

    #[test]
    fn disjoint_blocks_fail_to_splice() {
        let params = make_params(64, ratio(1, 2), 4).unwrap();
        match assemble(&params) {
            Err(AssembleError::NoNesting { k_from, k_to, .. }) => {
                assert_eq!((k_from, k_to), (32, 36));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn no_blocks_in_range() {
        let params = make_params(3, ratio(1, 1), 4).unwrap();
        assert!(matches!(
            assemble(&params),
            Err(AssembleError::NoBlocks { .. })
        ));
    }

    #[test]
    fn single_block_chain() {
        let params = make_params(8, ratio(1, 1), 4).unwrap();
        let chain = assemble(&params).unwrap();
        assert_eq!(chain.len(), 25);
        assert!(chain.splice_log.is_empty());
    }
}
