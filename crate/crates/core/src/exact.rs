//! Exact evaluation of the positive-vector probability and the half-space
//! probability for symmetric random points.
//!
//! Everything here is big-integer arithmetic; no floating point is involved
//! until [`Rational::to_f64`] is called explicitly.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

/// Reduced fraction with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Self(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion with `digits` places after the point, rounded half to even.
    pub fn to_decimal(&self, digits: usize) -> String {
        to_decimal(self, digits)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl std::ops::Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_owned());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        Ok(Rational::new(num, den))
    }
}

// Serialized as the string "p/q" so JSON consumers never see a lossy float.
impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One line of the exact probability table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbTableRow {
    pub n: usize,
    pub k: usize,
    pub p: Rational,
    pub p_decimal: String,
}

/// Number of decimals used for table and plot output.
pub const TABLE_DIGITS: usize = 6;

/// `C(n, j)`, zero when `j` lies outside `0..=n`.
///
/// Multiplicative recurrence `C(n, i+1) = C(n, i)·(n−i)/(i+1)` where the
/// factor pair is first divided by its gcd, so every intermediate is an
/// exact binomial coefficient times a small integer.
pub fn binomial(n: u64, j: i64) -> BigUint {
    if j < 0 || j as u64 > n {
        return BigUint::zero();
    }
    let j = (j as u64).min(n - j as u64);
    let mut acc = BigUint::one();
    for i in 0..j {
        acc = binomial_step(acc, n, i);
    }
    acc
}

/// Advances `C(n, i)` to `C(n, i+1)`.
fn binomial_step(acc: BigUint, n: u64, i: u64) -> BigUint {
    let up = n - i;
    let down = i + 1;
    let g = up.gcd(&down);
    (acc / (down / g)) * (up / g)
}

fn check_dims(n: usize, k: usize, what: &str) -> Result<()> {
    if n == 0 {
        return domain(format!("n must be positive, got n={n}"));
    }
    if k < 1 || k > n {
        return domain(format!("{what} must lie in [1, n]; got n={n}, {what}={k}"));
    }
    Ok(())
}

/// Σ_{j<terms} C(m, j), accumulated with the running binomial.
fn partial_row_sum(m: u64, terms: u64) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::zero();
    for j in 0..terms.min(m + 1) {
        if j > 0 {
            term = binomial_step(term, m, j - 1);
        }
        sum += &term;
    }
    sum
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// Probability that a Haar-random `k`-dimensional subspace of `Rⁿ` contains
/// a positive vector: `2^{−(n−1)} Σ_{j=0}^{k−1} C(n−1, j)`.
pub fn p_exact(n: usize, k: usize) -> Result<Rational> {
    check_dims(n, k, "k")?;
    let m = (n - 1) as u64;
    let num = partial_row_sum(m, k as u64);
    Ok(Rational::new(BigInt::from(num), BigInt::from(pow2(m))))
}

/// Probability that `n` iid symmetric points in `R^d` lie in a common
/// half-space through the origin (Wendel). Same closed form as [`p_exact`]
/// with `d` in place of `k`, evaluated through its own path.
pub fn wendel_halfspace_prob(n: usize, d: usize) -> Result<Rational> {
    check_dims(n, d, "d")?;
    // Points surround the origin with probability 2^{-(n-1)} Σ_{j≥d} C(n-1, j);
    // complement that count rather than reusing p_exact's prefix.
    let m = (n - 1) as u64;
    let mut surround = BigUint::zero();
    for j in d as u64..=m {
        surround += binomial(m, j as i64);
    }
    let total = pow2(m);
    let halfspace = &total - surround;
    Ok(Rational::new(BigInt::from(halfspace), BigInt::from(total)))
}

/// Exact table for `1 ≤ k ≤ n ≤ n_max` in lexicographic `(n, k)` order.
pub fn p_table(n_max: usize) -> Vec<ProbTableRow> {
    let mut rows = Vec::with_capacity(n_max * (n_max + 1) / 2);
    for n in 1..=n_max {
        let m = (n - 1) as u64;
        let den = BigInt::from(pow2(m));
        let mut term = BigUint::one();
        let mut sum = BigUint::zero();
        for k in 1..=n {
            let j = (k - 1) as u64;
            if j > 0 {
                term = binomial_step(term, m, j - 1);
            }
            sum += &term;
            let p = Rational::new(BigInt::from(sum.clone()), den.clone());
            let p_decimal = to_decimal(&p, TABLE_DIGITS);
            rows.push(ProbTableRow { n, k, p, p_decimal });
        }
    }
    rows
}

/// Fixed-point decimal rendering of `r` with `digits` fractional places,
/// rounding half to even.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let negative = r.numer().is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let (mut q, rem) = (num * &scale).div_rem(&den);
    let twice = rem * 2u32;
    if twice > den || (twice == den && q.is_odd()) {
        q += 1u32;
    }
    let mut digits_str = q.to_string();
    if digits_str.len() <= digits {
        digits_str = format!("{}{}", "0".repeat(digits + 1 - digits_str.len()), digits_str);
    }
    let split = digits_str.len() - digits;
    let (int_part, frac_part) = digits_str.split_at(split);
    let sign = if negative && !q.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}
