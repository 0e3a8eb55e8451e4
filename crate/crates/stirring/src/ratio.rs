//! Exact rational scalars, parsing, and the scalar abstraction shared by the
//! sparse-operator machinery.
//!
//! All model parameters are held as arbitrary-precision rationals. JSON
//! numbers are parsed from their decimal literal (`0.3` becomes `3/10`, not
//! the nearest binary double), so rational-mode results are exact whenever
//! the inputs are written as decimals or `p/q` strings.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Ratio = BigRational;

/// `n` as a rational.
pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

/// `n / d` as a rational.
pub fn frac(n: i64, d: i64) -> Ratio {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, integer, or decimal/scientific literals exactly.
pub fn parse(s: &str) -> Result<Ratio> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Ratio::new(n, d));
    }
    parse_decimal(s)
}

/// Parses a decimal literal (optionally with exponent) as an exact rational.
fn parse_decimal(s: &str) -> Result<Ratio> {
    let err = || Error::Parse(format!("bad number {s:?}"));
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (mantissa, sign) = match mantissa.strip_prefix('-') {
        Some(rest) => (rest, Sign::Minus),
        None => (mantissa.strip_prefix('+').unwrap_or(mantissa), Sign::Plus),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let digits: String = [int_part, frac_part].concat();
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut numer = digits.parse::<BigInt>().map_err(|_| err())?;
    if sign == Sign::Minus {
        numer = -numer;
    }
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Ratio::from_integer(numer * ten.pow(shift as u32))
    } else {
        Ratio::new(numer, ten.pow((-shift) as u32))
    })
}

/// Exact conversion of a finite double (doubles are dyadic rationals).
pub fn from_f64(x: f64) -> Result<Ratio> {
    Ratio::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite number {x}")))
}

/// Nearest double, robust to components that overflow `f64` individually.
pub fn to_f64(r: &Ratio) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both parts down by a common power of two.
    let bits = r.numer().bits().max(r.denom().bits());
    let shift = bits.saturating_sub(900);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Multinomial coefficient `n! / (parts_1! ... parts_k!)`; zero if the parts
/// do not sum to `n`.
pub fn multinomial(n: u32, parts: &[u32]) -> BigInt {
    if parts.iter().sum::<u32>() != n {
        return BigInt::zero();
    }
    let mut acc = factorial(n);
    for &p in parts {
        acc /= factorial(p);
    }
    acc
}

/// Sum of a slice of rationals.
pub fn sum(xs: &[Ratio]) -> Ratio {
    let mut acc = Ratio::zero();
    for x in xs {
        acc += x;
    }
    acc
}

/// Scalar field of a sparse operator: exact rationals or doubles.
///
/// The mode is a type parameter everywhere; the two are never mixed silently.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    /// True for exact rational arithmetic.
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_ratio(r: &Ratio) -> Self;
    /// Nearest double (signed).
    fn signed_f64(&self) -> f64;
    /// Magnitude as a double, for residual reporting.
    fn abs_f64(&self) -> f64 {
        self.signed_f64().abs()
    }
}

impl Scalar for Ratio {
    const EXACT: bool = true;
    fn zero() -> Self {
        <Ratio as Zero>::zero()
    }
    fn one() -> Self {
        <Ratio as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_ratio(r: &Ratio) -> Self {
        r.clone()
    }
    fn signed_f64(&self) -> f64 {
        to_f64(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_ratio(r: &Ratio) -> Self {
        to_f64(r)
    }
    fn signed_f64(&self) -> f64 {
        *self
    }
}

/// Renders a rational as `p/q` (or just `p` for integers).
pub fn render(r: &Ratio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
