#![allow(dead_code)]

use convex_sumset::{ScaledInt, SplicePoint};
use rand::Rng;

pub fn seq(v: &[i64]) -> Vec<ScaledInt> {
    v.iter().map(|&x| ScaledInt::from(x)).collect()
}

fn convex_from_gaps(start: i64, gaps: &[i64]) -> Vec<i64> {
    let mut v = vec![start];
    for g in gaps {
        v.push(v[v.len() - 1] + g);
    }
    v
}

/// Strictly increasing positive gaps built from positive increments.
fn increasing_gaps(first: i64, incs: &[i64]) -> Vec<i64> {
    let mut g = vec![first];
    for d in incs {
        g.push(g[g.len() - 1] + d);
    }
    g
}

/// Two convex sequences and a planted nesting `[x_u, x_{u+1}] ⊆ [y_v, y_{v+1}]`.
///
/// `X` is arbitrary; every gap of `Y` is lifted by a constant until the gap at
/// `v` is at least the gap of `X` at `u`, then `X` is translated into it.
pub fn planted_pair(rng: &mut impl Rng) -> (Vec<i64>, Vec<i64>, SplicePoint) {
    let x_incs: Vec<i64> = (0..rng.gen_range(0..10))
        .map(|_| rng.gen_range(1..40))
        .collect();
    let x_gaps = increasing_gaps(rng.gen_range(1..30), &x_incs);
    let y_incs: Vec<i64> = (0..rng.gen_range(0..10))
        .map(|_| rng.gen_range(1..40))
        .collect();
    let mut y_gaps = increasing_gaps(rng.gen_range(1..30), &y_incs);

    let u = rng.gen_range(0..x_gaps.len());
    let v = rng.gen_range(0..y_gaps.len());
    let lift = (x_gaps[u] - y_gaps[v]).max(0) + rng.gen_range(0..3);
    for g in &mut y_gaps {
        *g += lift;
    }
    let y = convex_from_gaps(rng.gen_range(-10_000..10_000), &y_gaps);
    let room = y_gaps[v] - x_gaps[u];
    let xu = y[v] + rng.gen_range(0..=room);
    let x0 = xu - x_gaps[..u].iter().sum::<i64>();
    let x = convex_from_gaps(x0, &x_gaps);
    (x, y, SplicePoint { u, v })
}
