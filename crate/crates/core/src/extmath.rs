//! Extended integers `Z ∪ {±∞}`, exact dyadic distances, and points of the
//! completion of `Z^m × F_n` under the product ultrametric.
//!
//! Integers are read as unary words: `+5` is `aaaaa`, `-5` is `AAAAA`, `0` is
//! the empty word, `+∞` is `a^∞`. The prefix metric then gives
//! `d(x, y) = 2^-min(|x|,|y|)` when `x` and `y` share a strict sign and `1`
//! otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use thiserror::Error;

use crate::words::{self, CompletionWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtError {
    #[error("sum of opposite infinities is undefined")]
    OppositeInfinities,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse extended integer {0:?}")]
    BadExtInt(String),
    #[error("cannot parse point {0:?}: {1}")]
    BadPoint(String, String),
}

/// An element of `Z ∪ {-∞, +∞}`. Variant order gives the natural total order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    NegInf,
    Fin(BigInt),
    PosInf,
}

impl ExtInt {
    pub fn zero() -> Self {
        ExtInt::Fin(BigInt::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtInt::Fin(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            ExtInt::Fin(v) => Some(v),
            _ => None,
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        match self {
            ExtInt::NegInf => -1,
            ExtInt::PosInf => 1,
            ExtInt::Fin(v) => match v.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExtInt::NegInf => ExtInt::PosInf,
            ExtInt::PosInf => ExtInt::NegInf,
            ExtInt::Fin(v) => ExtInt::Fin(-v),
        }
    }

    /// Magnitude as an unbounded natural; `None` for the infinities.
    pub fn magnitude(&self) -> Option<BigUint> {
        self.finite().map(|v| v.magnitude().clone())
    }

    pub fn infinity(sign: i8) -> Self {
        if sign < 0 {
            ExtInt::NegInf
        } else {
            ExtInt::PosInf
        }
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Fin(BigInt::from(v))
    }
}

impl From<BigInt> for ExtInt {
    fn from(v: BigInt) -> Self {
        ExtInt::Fin(v)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => f.write_str("-inf"),
            ExtInt::PosInf => f.write_str("+inf"),
            ExtInt::Fin(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for ExtInt {
    type Err = ExtError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtInt::PosInf),
            "-inf" => Ok(ExtInt::NegInf),
            t => t
                .strip_prefix('+')
                .unwrap_or(t)
                .parse::<BigInt>()
                .map(ExtInt::Fin)
                .map_err(|_| ExtError::BadExtInt(s.to_string())),
        }
    }
}

/// `λ · x` with the convention `0 · (±∞) = 0`.
pub fn ext_mul(lambda: &BigInt, x: &ExtInt) -> ExtInt {
    match x {
        ExtInt::Fin(v) => ExtInt::Fin(lambda * v),
        inf => match lambda.sign() {
            Sign::NoSign => ExtInt::zero(),
            Sign::Plus => inf.clone(),
            Sign::Minus => inf.neg(),
        },
    }
}

pub fn ext_add(x: &ExtInt, y: &ExtInt) -> Result<ExtInt, ExtError> {
    match (x, y) {
        (ExtInt::Fin(a), ExtInt::Fin(b)) => Ok(ExtInt::Fin(a + b)),
        (ExtInt::PosInf, ExtInt::NegInf) | (ExtInt::NegInf, ExtInt::PosInf) => {
            Err(ExtError::OppositeInfinities)
        }
        (inf, ExtInt::Fin(_)) | (ExtInt::Fin(_), inf) => Ok(inf.clone()),
        (a, _) => Ok(a.clone()),
    }
}

/// Length of a longest common prefix: a natural number or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrefixLen {
    Finite(BigUint),
    Infinite,
}

impl PrefixLen {
    pub fn finite(n: usize) -> Self {
        PrefixLen::Finite(BigUint::from(n))
    }
}

impl PartialOrd for PrefixLen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrefixLen {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PrefixLen::Infinite, PrefixLen::Infinite) => Ordering::Equal,
            (PrefixLen::Infinite, _) => Ordering::Greater,
            (_, PrefixLen::Infinite) => Ordering::Less,
            (PrefixLen::Finite(a), PrefixLen::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for PrefixLen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrefixLen::Finite(n) => write!(f, "{n}"),
            PrefixLen::Infinite => f.write_str("inf"),
        }
    }
}

/// An exact distance: `0` or `2^-d` for a natural `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Dyadic {
    Zero,
    NegPow(BigUint),
}

impl Dyadic {
    pub fn one() -> Self {
        Dyadic::NegPow(BigUint::zero())
    }

    pub fn neg_pow(d: u64) -> Self {
        Dyadic::NegPow(BigUint::from(d))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Dyadic::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Dyadic::NegPow(d) if d.is_zero())
    }

    /// `2^-lcp`, or `0` for an infinite common prefix.
    pub fn from_prefix(p: PrefixLen) -> Self {
        match p {
            PrefixLen::Infinite => Dyadic::Zero,
            PrefixLen::Finite(n) => Dyadic::NegPow(n),
        }
    }

    /// The exponent `d` of `2^-d`; `None` for zero.
    pub fn exponent(&self) -> Option<&BigUint> {
        match self {
            Dyadic::Zero => None,
            Dyadic::NegPow(d) => Some(d),
        }
    }

    /// True iff `self < 2^-d`.
    pub fn lt_neg_pow(&self, d: &BigUint) -> bool {
        match self {
            Dyadic::Zero => true,
            Dyadic::NegPow(e) => e > d,
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dyadic::Zero, Dyadic::Zero) => Ordering::Equal,
            (Dyadic::Zero, _) => Ordering::Less,
            (_, Dyadic::Zero) => Ordering::Greater,
            (Dyadic::NegPow(a), Dyadic::NegPow(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dyadic::Zero => f.write_str("0"),
            Dyadic::NegPow(d) if d.is_zero() => f.write_str("1"),
            Dyadic::NegPow(d) => write!(f, "2^-{d}"),
        }
    }
}

impl FromStr for Dyadic {
    type Err = ExtError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExtError::BadExtInt(s.to_string());
        match s.trim() {
            "0" => Ok(Dyadic::Zero),
            "1" => Ok(Dyadic::one()),
            t => t
                .strip_prefix("2^-")
                .and_then(|d| d.parse::<BigUint>().ok())
                .map(Dyadic::NegPow)
                .ok_or_else(bad),
        }
    }
}

/// Common prefix length of two extended integers in the unary-word model.
pub fn int_lcp(x: &ExtInt, y: &ExtInt) -> PrefixLen {
    if x == y {
        return PrefixLen::Infinite;
    }
    let sx = x.signum();
    if sx == 0 || sx != y.signum() {
        return PrefixLen::Finite(BigUint::zero());
    }
    match (x.magnitude(), y.magnitude()) {
        (Some(a), Some(b)) => PrefixLen::Finite(a.min(b)),
        (Some(a), None) | (None, Some(a)) => PrefixLen::Finite(a),
        (None, None) => unreachable!("equal infinities handled above"),
    }
}

pub fn int_dist(x: &ExtInt, y: &ExtInt) -> Dyadic {
    Dyadic::from_prefix(int_lcp(x, y))
}

/// A point of `Ẑ^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExtVector(pub Vec<ExtInt>);

impl ExtVector {
    pub fn zeros(m: usize) -> Self {
        ExtVector(vec![ExtInt::zero(); m])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        ExtVector(v.iter().map(|&x| ExtInt::from(x)).collect())
    }

    pub fn from_bigints(v: &[BigInt]) -> Self {
        ExtVector(v.iter().cloned().map(ExtInt::Fin).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[ExtInt] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(ExtInt::is_finite)
    }

    pub fn all_infinite(&self) -> bool {
        self.0.iter().all(ExtInt::is_infinite)
    }

    /// Finite entries as integers, if every entry is finite.
    pub fn to_finite(&self) -> Option<Vec<BigInt>> {
        self.0.iter().map(|x| x.finite().cloned()).collect()
    }

    /// Largest magnitude among the finite entries (0 if none).
    pub fn max_finite_magnitude(&self) -> BigUint {
        self.0
            .iter()
            .filter_map(ExtInt::magnitude)
            .max()
            .unwrap_or_default()
    }

    pub fn dist(&self, other: &ExtVector) -> Result<Dyadic, ExtError> {
        if self.dim() != other.dim() {
            return Err(ExtError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| int_dist(x, y))
            .max()
            .unwrap_or(Dyadic::Zero))
    }
}

impl fmt::Display for ExtVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for ExtVector {
    type Err = ExtError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| ExtError::BadExtInt(s.to_string()))?;
        if inner.trim().is_empty() {
            return Ok(ExtVector(Vec::new()));
        }
        inner
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(ExtVector)
    }
}

/// A point `(a, u)` of the completion `Ẑ^m × F̂_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub abelian: ExtVector,
    pub free: CompletionWord,
}

impl Point {
    pub fn new(abelian: ExtVector, free: CompletionWord) -> Self {
        Point { abelian, free }
    }

    pub fn is_finite(&self) -> bool {
        self.abelian.is_finite() && self.free.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.abelian, self.free)
    }
}

impl FromStr for Point {
    type Err = ExtError;

    /// Syntax: `[e1,...,em] word`, e.g. `[+inf,5] a(b)^inf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let close = t
            .find(']')
            .ok_or_else(|| ExtError::BadPoint(s.to_string(), "missing ']'".into()))?;
        let abelian: ExtVector = t[..=close].parse()?;
        let rest = t[close + 1..].trim();
        let rest = if rest.is_empty() { "1" } else { rest };
        let free: CompletionWord = rest
            .parse()
            .map_err(|e: words::WordError| ExtError::BadPoint(s.to_string(), e.to_string()))?;
        Ok(Point { abelian, free })
    }
}

/// Product ultrametric: the max of the coordinate distances.
pub fn product_dist(p: &Point, q: &Point) -> Result<Dyadic, ExtError> {
    let a = p.abelian.dist(&q.abelian)?;
    let b = words::dist(&p.free, &q.free);
    Ok(a.max(b))
}

/// Multiply-with-sign helper for callers holding `i64` coefficients.
pub fn ext_mul_i64(lambda: i64, x: &ExtInt) -> ExtInt {
    ext_mul(&BigInt::from(lambda), x)
}
