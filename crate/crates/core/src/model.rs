//! Exact parameters and the fixed-denominator integer representation.
//!
//! Every quantity in the construction is a rational with denominator dividing
//! `D = 1000·n³`. Values are stored as the integer numerator at that
//! denominator, so ordering and every inequality reduce to integer comparison.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("n must be at least 1 (got {0})")]
    NonPositiveN(i64),
    #[error("theta must lie in (0, 1] (got {0})")]
    ThetaOutOfRange(String),
    #[error("stride must be at least 1 (got {0})")]
    NonPositiveStride(i64),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}

/// An exact numerator at the ambient denominator `D` of some [`Params`].
///
/// Comparing values produced under different `Params` is meaningless; callers
/// keep a single `Params` per run.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ScaledInt(BigInt);

impl ScaledInt {
    pub fn new(num: impl Into<BigInt>) -> Self {
        ScaledInt(num.into())
    }

    pub fn num(&self) -> &BigInt {
        &self.0
    }

    pub fn into_num(self) -> BigInt {
        self.0
    }

    /// The represented rational `num / d`.
    pub fn to_rational(&self, d: &BigInt) -> BigRational {
        BigRational::new(self.0.clone(), d.clone())
    }

    pub fn to_i128(&self) -> Option<i128> {
        self.0.to_i128()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl fmt::Display for ScaledInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<i64> for ScaledInt {
    fn from(v: i64) -> Self {
        ScaledInt(BigInt::from(v))
    }
}

impl From<BigInt> for ScaledInt {
    fn from(v: BigInt) -> Self {
        ScaledInt(v)
    }
}

impl Add for &ScaledInt {
    type Output = ScaledInt;
    fn add(self, rhs: &ScaledInt) -> ScaledInt {
        ScaledInt(&self.0 + &rhs.0)
    }
}

impl Sub for &ScaledInt {
    type Output = ScaledInt;
    fn sub(self, rhs: &ScaledInt) -> ScaledInt {
        ScaledInt(&self.0 - &rhs.0)
    }
}

impl Add for ScaledInt {
    type Output = ScaledInt;
    fn add(self, rhs: ScaledInt) -> ScaledInt {
        ScaledInt(self.0 + rhs.0)
    }
}

impl Sub for ScaledInt {
    type Output = ScaledInt;
    fn sub(self, rhs: ScaledInt) -> ScaledInt {
        ScaledInt(self.0 - rhs.0)
    }
}

impl Neg for ScaledInt {
    type Output = ScaledInt;
    fn neg(self) -> ScaledInt {
        ScaledInt(-self.0)
    }
}

impl Serialize for ScaledInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for ScaledInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s)
            .map(ScaledInt)
            .map_err(serde::de::Error::custom)
    }
}

/// Conditions under which the construction is not expected to go through.
/// These are advisory; the exact splice search decides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    /// No multiple of `stride` lies in `[ceil(theta·n), n]`.
    NoBlocks,
    /// Only one block in range, so nothing gets spliced.
    NoBlockPair,
    /// `theta <= stride/6`: value ranges of consecutive blocks need not overlap.
    OverlapPrecheck,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub n: i64,
    pub theta: BigRational,
    pub stride: i64,
    /// Common denominator `1000·n³`.
    pub d: BigInt,
    /// `alpha·D = 1000·n`.
    pub alpha_scaled: BigInt,
    /// `gamma·D = 1`.
    pub gamma_scaled: BigInt,
    /// `epsilon·D = 100·n³`.
    pub eps_scaled: BigInt,
    pub warnings: Vec<Feasibility>,
}

/// Validates the inputs and clears the constants to the common denominator.
pub fn make_params(n: i64, theta: BigRational, stride: i64) -> Result<Params, ParamsError> {
    if n < 1 {
        return Err(ParamsError::NonPositiveN(n));
    }
    if !theta.is_positive() || theta > BigRational::one() {
        return Err(ParamsError::ThetaOutOfRange(theta.to_string()));
    }
    if stride < 1 {
        return Err(ParamsError::NonPositiveStride(stride));
    }
    let nb = BigInt::from(n);
    let n3 = &nb * &nb * &nb;
    let mut params = Params {
        n,
        theta,
        stride,
        d: BigInt::from(1000) * &n3,
        alpha_scaled: BigInt::from(1000) * &nb,
        gamma_scaled: BigInt::one(),
        eps_scaled: BigInt::from(100) * &n3,
        warnings: Vec::new(),
    };
    match params.block_indices().len() {
        0 => params.warnings.push(Feasibility::NoBlocks),
        1 => params.warnings.push(Feasibility::NoBlockPair),
        _ => {}
    }
    if params.theta <= BigRational::new(BigInt::from(stride), BigInt::from(6)) {
        params.warnings.push(Feasibility::OverlapPrecheck);
    }
    Ok(params)
}

impl Params {
    /// Paper-mode defaults: `theta = 999/1000`, `stride = 4`.
    pub fn paper(n: i64) -> Result<Params, ParamsError> {
        make_params(n, paper_theta(), 4)
    }

    /// `ceil(theta·n)`, the smallest admissible block index.
    pub fn k_min(&self) -> i64 {
        (&self.theta * BigRational::from_integer(BigInt::from(self.n)))
            .ceil()
            .to_integer()
            .to_i64()
            .expect("theta·n fits in i64 since theta <= 1")
    }

    /// Multiples of `stride` in `[ceil(theta·n), n]`, increasing.
    pub fn block_indices(&self) -> Vec<i64> {
        let lo = self.k_min().max(1);
        let first = (lo + self.stride - 1) / self.stride * self.stride;
        (first..=self.n).step_by(self.stride as usize).collect()
    }

    pub fn is_paper_mode(&self) -> bool {
        self.stride == 4 && self.theta == paper_theta()
    }

    /// A scaled integer for an exact rational whose denominator divides `D`.
    pub fn scale(&self, r: &BigRational) -> Option<ScaledInt> {
        let num = r.numer() * &self.d;
        let (q, rem) = num.div_rem(r.denom());
        rem.is_zero().then_some(ScaledInt(q))
    }

    /// `v / D` as an exact rational.
    pub fn unscale(&self, v: &ScaledInt) -> BigRational {
        v.to_rational(&self.d)
    }

    /// The integer `k` as a scaled value, `k·D`.
    pub fn integer(&self, k: i64) -> ScaledInt {
        ScaledInt(&self.d * k)
    }
}

pub fn paper_theta() -> BigRational {
    BigRational::new(BigInt::from(999), BigInt::from(1000))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.999` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, ParamsError> {
    let bad = || ParamsError::BadRational(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().all(|c| c.is_ascii_digit())
        || !frac.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Exact decimal literal such as `"2.9"` as a rational (test and audit helper).
pub(crate) fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clears_constants_for_small_n() {
        let p = make_params(2, paper_theta(), 4).unwrap();
        assert_eq!(p.d, BigInt::from(8000));
        assert_eq!(p.alpha_scaled, BigInt::from(2000));
        assert_eq!(p.gamma_scaled, BigInt::from(1));
        assert_eq!(p.eps_scaled, BigInt::from(800));

        let p = make_params(1, BigRational::one(), 4).unwrap();
        assert_eq!(p.d, BigInt::from(1000));
        assert_eq!(p.alpha_scaled, BigInt::from(1000));
        assert_eq!(p.gamma_scaled, BigInt::from(1));
        assert_eq!(p.eps_scaled, BigInt::from(100));
    }

    #[test]
    fn scaled_constants_match_rational_values() {
        // alpha = 1/n², gamma = 1/(1000n³), eps = 1/10, each cleared by D
        for n in [2i64, 7, 4000] {
            let p = make_params(n, BigRational::one(), 4).unwrap();
            let nn = BigInt::from(n);
            let alpha = BigRational::new(BigInt::one(), &nn * &nn);
            let gamma = BigRational::new(BigInt::one(), BigInt::from(1000) * &nn * &nn * &nn);
            assert_eq!(p.scale(&alpha).unwrap().num(), &p.alpha_scaled);
            assert_eq!(p.scale(&gamma).unwrap().num(), &p.gamma_scaled);
            assert_eq!(p.scale(&ratio(1, 10)).unwrap().num(), &p.eps_scaled);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            make_params(0, BigRational::one(), 4),
            Err(ParamsError::NonPositiveN(0))
        );
        assert!(matches!(
            make_params(3, ratio(0, 1), 4),
            Err(ParamsError::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            make_params(3, ratio(3, 2), 4),
            Err(ParamsError::ThetaOutOfRange(_))
        ));
        assert_eq!(
            make_params(3, BigRational::one(), 0),
            Err(ParamsError::NonPositiveStride(0))
        );
    }

    #[test]
    fn block_ranges_and_warnings() {
        let p = Params::paper(4000).unwrap();
        assert_eq!(p.block_indices(), vec![3996, 4000]);
        assert!(p.warnings.is_empty());

        let p = Params::paper(100).unwrap();
        assert_eq!(p.block_indices(), vec![100]);
        assert_eq!(p.warnings, vec![Feasibility::NoBlockPair]);

        let p = Params::paper(1000).unwrap();
        assert_eq!(p.block_indices(), vec![1000]);

        let p = make_params(64, ratio(7, 8), 4).unwrap();
        assert_eq!(p.block_indices(), vec![56, 60, 64]);

        let p = make_params(64, ratio(1, 2), 4).unwrap();
        assert!(p.warnings.contains(&Feasibility::OverlapPrecheck));

        let p = make_params(3, BigRational::one(), 4).unwrap();
        assert!(p.block_indices().is_empty());
        assert!(p.warnings.contains(&Feasibility::NoBlocks));
    }

    #[test]
    fn ordering_examples() {
        assert!(ScaledInt::from(5) < ScaledInt::from(7));
        assert_eq!(
            ScaledInt::from(-3).cmp(&ScaledInt::from(-3)),
            std::cmp::Ordering::Equal
        );
        assert!(ScaledInt::from(10001) > ScaledInt::from(6000));
    }

    #[test]
    fn parses_rationals_exactly() {
        assert_eq!(parse_rational("0.999").unwrap(), ratio(999, 1000));
        assert_eq!(parse_rational("999/1000").unwrap(), ratio(999, 1000));
        assert_eq!(parse_rational("7/8").unwrap(), ratio(7, 8));
        assert_eq!(parse_rational("1").unwrap(), ratio(1, 1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-2.25").unwrap(), ratio(-9, 4));
        for bad in ["", "abc", "1/0", "1.2.3", "0x10", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn denominator_identities(n in 1i64..5000) {
            let p = make_params(n, BigRational::one(), 4).unwrap();
            let nb = BigInt::from(n);
            prop_assert_eq!(&p.alpha_scaled * &nb * &nb, p.d.clone());
            prop_assert_eq!(&p.gamma_scaled * BigInt::from(1000) * &nb * &nb * &nb, p.d.clone());
            prop_assert_eq!(&p.eps_scaled * BigInt::from(10), p.d.clone());
        }

        #[test]
        fn cmp_agrees_with_rational_order(a in any::<i64>(), b in any::<i64>(), c in any::<i64>(), n in 1i64..100) {
            let p = make_params(n, BigRational::one(), 4).unwrap();
            let (sa, sb, sc) = (ScaledInt::from(a), ScaledInt::from(b), ScaledInt::from(c));
            prop_assert_eq!(sa.cmp(&sb), p.unscale(&sa).cmp(&p.unscale(&sb)));
            prop_assert_eq!(sa.cmp(&sb), sb.cmp(&sa).reverse());
            if sa <= sb && sb <= sc {
                prop_assert!(sa <= sc);
            }
        }

        #[test]
        fn decimal_and_fraction_agree(p in 0u32..1_000_000) {
            let dec = format!("{}.{:06}", p / 1_000_000, p % 1_000_000);
            prop_assert_eq!(parse_rational(&dec).unwrap(), ratio(p as i64, 1_000_000));
        }
    }
}
