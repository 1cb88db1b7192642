//! Exact evaluation of the inequalities behind the block splice.
//!
//! For a pair of consecutive blocks `(k, k + stride)`, `delta` is the largest
//! gap of block `k` and `Delta` the smallest gap of block `k + stride`; `v` is
//! the label of the least element of block `k` above the next block's minimum,
//! and `m = ceil(n/2) + 1`. Every slack is an exact rational in value units,
//! negative when the inequality is violated.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::VerifyError;
use crate::construction::{block_value, build_block, gap_unchecked};
use crate::model::{ratio, Params, ScaledInt};
use crate::splice::find_nesting_from;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub slack: BigRational,
}

impl Check {
    fn strict(name: &'static str, slack: BigRational) -> Self {
        Check {
            name,
            pass: slack > BigRational::zero(),
            slack,
        }
    }

    fn weak(name: &'static str, slack: BigRational) -> Self {
        Check {
            name,
            pass: slack >= BigRational::zero(),
            slack,
        }
    }

    pub fn slack_f64(&self) -> f64 {
        self.slack.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for Check {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Check", 4)?;
        st.serialize_field("name", self.name)?;
        st.serialize_field("pass", &self.pass)?;
        st.serialize_field("slack", &self.slack.to_string())?;
        st.serialize_field("slack_approx", &self.slack_f64())?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub n: i64,
    pub k: i64,
    pub k_next: i64,
    pub theta: String,
    pub stride: i64,
    pub m: i64,
    /// Label `i` of the least element of block `k` above `b^(k+stride)_{-n}`.
    pub v: i64,
    /// The nine gating inequalities.
    pub checks: Vec<Check>,
    /// Intermediate claims, reported but not gating.
    pub info: Vec<Check>,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks
            .iter()
            .chain(&self.info)
            .find(|c| c.name == name)
    }
}

/// Largest consecutive gap of block `k`, attained at `i = 2n - 1`.
pub fn max_gap(params: &Params, k: i64) -> ScaledInt {
    gap_unchecked(params, k, 2 * params.n - 1)
}

/// Smallest consecutive gap of block `k`, attained at `i = -n`.
pub fn min_gap(params: &Params, k: i64) -> ScaledInt {
    gap_unchecked(params, k, -params.n)
}

/// `ceil(n/2) + 1`.
pub fn window_size(n: i64) -> i64 {
    (n + 1) / 2 + 1
}

pub fn audit_bounds(params: &Params, k: i64) -> Result<AuditReport, VerifyError> {
    let n = params.n;
    let k_next = k + params.stride;
    let lo = params.k_min();
    if k < lo || k_next > n {
        return Err(VerifyError::PairOutOfRange { k, k_next, lo, n });
    }
    let r = |v: &ScaledInt| params.unscale(v);
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let nb = BigInt::from(n);
    let alpha = BigRational::new(params.alpha_scaled.clone(), params.d.clone());
    let gamma = BigRational::new(params.gamma_scaled.clone(), params.d.clone());
    let eps = BigRational::new(params.eps_scaled.clone(), params.d.clone());
    let kq = int(k);

    let block = build_block(params, k).expect("k in (0, n]");
    let lowest = r(&block.first().value);
    let highest = r(&block.last().value);

    let delta = r(&max_gap(params, k));
    let big_delta = r(&min_gap(params, k_next));
    let next_min = block_value(params, k_next, -n);

    // Least label above the next block's minimum. The block formula is
    // increasing for i >= -n, so the search may run past 2n when the
    // blocks fail to overlap; check (9) then reports it.
    let mut v = -n;
    while block_value(params, k, v) <= next_min {
        v += 1;
    }
    let d = r(&block_value(params, k, v)) - r(&next_min);
    let m = window_size(n);
    let overtaker = r(&block_value(params, k_next, -n + m));
    let tail = r(&block_value(params, k, v + m));

    let min2 = |a: BigRational, b: BigRational| if a < b { a } else { b };
    let checks = vec![
        Check::weak(
            "lower_bound",
            min2(&lowest - (&kq - int(3)), (&kq - ratio(29, 10)) - &lowest),
        ),
        Check::weak(
            "upper_bound",
            min2(
                &highest - (&kq + ratio(29, 10)),
                (&kq + ratio(31, 10)) - &highest,
            ),
        ),
        Check::weak(
            "containment",
            min2(
                &lowest - (&kq - int(3) - &eps),
                (&kq + int(3) + &eps) - &highest,
            ),
        ),
        Check::strict(
            "delta1",
            BigRational::new(BigInt::from(21), BigInt::from(10) * &nb) - &delta,
        ),
        Check::strict(
            "delta2",
            (&big_delta - &delta) - BigRational::new(BigInt::from(6), &nb * &nb),
        ),
        Check::weak("start_dist", min2(d.clone(), &delta - &d)),
        Check::strict("window_overtake", &overtaker - &tail),
        Check::strict("tail_bound", (&kq + ratio(22, 10)) - &tail),
        Check::strict("index_bound", int(2 * n - (v + m))),
    ];

    let n_q = int(n);
    let alpha_k2 = &alpha * &kq * &kq;
    let found = {
        let xs = block.values();
        let ys = build_block(params, k_next)
            .expect("k_next in (0, n]")
            .values();
        let start = (v + n) as usize;
        find_nesting_from(&xs, &ys, start.min(xs.len())).ok()
    };
    let mut info = vec![
        Check::strict(
            "delta1_intermediate",
            (int(3) * &n_q * &gamma + int(2) * &kq * &alpha) - &delta,
        ),
        Check::strict(
            "delta2_intermediate",
            (&big_delta - &delta) - (int(8) * &alpha - int(10) * &n_q * &gamma),
        ),
        Check::weak(
            "alpha_k_squared",
            min2(&alpha_k2 - ratio(99, 100), int(1) - &alpha_k2),
        ),
        Check::weak(
            "window_lower_bound",
            (&overtaker - &tail) - (int(m) * (&big_delta - &delta) - &d),
        ),
        Check::strict(
            "window_margin",
            (int(m) * (&big_delta - &delta) - &d) - (ratio(3, 1) / &n_q - &delta),
        ),
        Check::strict(
            "tail_intermediate",
            (r(&next_min) + int(m) * &big_delta) - &tail,
        ),
    ];
    info.push(match found {
        Some(p) => {
            let u_label = p.u as i64 - n;
            Check::weak(
                "nesting_in_window",
                min2(int(u_label - v), int(v + m - u_label)),
            )
        }
        None => Check::weak("nesting_in_window", int(-1)),
    });

    Ok(AuditReport {
        n,
        k,
        k_next,
        theta: params.theta.to_string(),
        stride: params.stride,
        m,
        v,
        checks,
        info,
    })
}
