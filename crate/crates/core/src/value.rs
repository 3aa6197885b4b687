//! Numeric values used for rewards, measures and probability weights.
//!
//! A [`Value`] is one of three carriers: machine integers, exact rationals or
//! binary64 floats. Mixed arithmetic promotes along `Int -> Rat -> Float`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::ValueError;

#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    Rat(BigRational),
    Float(f64),
}

/// The numeric carrier a problem is stated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    Int,
    Rational,
    Float,
}

impl Carrier {
    pub fn name(self) -> &'static str {
        match self {
            Carrier::Int => "int",
            Carrier::Rational => "rational",
            Carrier::Float => "float",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Carrier::Float)
    }

    /// Whether division (and hence averaging) is closed on this carrier.
    pub fn has_division(self) -> bool {
        !matches!(self, Carrier::Int)
    }

    pub fn from_i64(self, n: i64) -> Value {
        match self {
            Carrier::Int => Value::Int(n),
            Carrier::Rational => Value::Rat(BigRational::from_integer(n.into())),
            Carrier::Float => Value::Float(n as f64),
        }
    }

    pub fn zero(self) -> Value {
        self.from_i64(0)
    }

    pub fn one(self) -> Value {
        self.from_i64(1)
    }

    /// Converts `v` into this carrier. Narrowing (float to rational, rational
    /// to int) only succeeds when no information is lost.
    pub fn coerce(self, v: &Value) -> Result<Value, ValueError> {
        match (self, v) {
            (Carrier::Int, Value::Int(n)) => Ok(Value::Int(*n)),
            (Carrier::Int, Value::Rat(r)) if r.is_integer() => r
                .to_integer()
                .to_i64()
                .map(Value::Int)
                .ok_or_else(|| ValueError::NotRepresentable(v.to_string(), "int")),
            (Carrier::Int, Value::Float(f)) if f.fract() == 0.0 && f.abs() < 9.0e15 => {
                Ok(Value::Int(*f as i64))
            }
            (Carrier::Int, _) => Err(ValueError::NotRepresentable(v.to_string(), "int")),
            (Carrier::Rational, Value::Float(f)) => BigRational::from_float(*f)
                .map(Value::Rat)
                .ok_or_else(|| ValueError::NotRepresentable(v.to_string(), "rational")),
            (Carrier::Rational, other) => Ok(Value::Rat(other.to_rational().expect("exact value"))),
            (Carrier::Float, other) => Ok(Value::Float(other.to_f64())),
        }
    }

    /// Parses a number written as an integer, a decimal (`"0.8"`) or a
    /// fraction (`"4/5"`). Decimals are read exactly in the exact carriers.
    pub fn parse(self, s: &str) -> Result<Value, ValueError> {
        let exact = parse_exact(s.trim());
        match self {
            Carrier::Float => match exact {
                Some(r) => Ok(Value::Float(r.to_f64().unwrap_or(f64::NAN))),
                None => s
                    .trim()
                    .parse::<f64>()
                    .map(Value::Float)
                    .map_err(|_| ValueError::Parse(s.to_string())),
            },
            _ => {
                let r = exact.ok_or_else(|| ValueError::Parse(s.to_string()))?;
                self.coerce(&Value::Rat(r))
            }
        }
    }
}

impl FromStr for Carrier {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "int" | "integer" => Ok(Carrier::Int),
            "rational" => Ok(Carrier::Rational),
            "float" => Ok(Carrier::Float),
            other => Err(ValueError::UnknownCarrier(other.to_string())),
        }
    }
}

fn parse_exact(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

impl Value {
    pub fn carrier(&self) -> Carrier {
        match self {
            Value::Int(_) => Carrier::Int,
            Value::Rat(_) => Carrier::Rational,
            Value::Float(_) => Carrier::Float,
        }
    }

    pub fn rational(n: i64, d: i64) -> Value {
        Value::Rat(BigRational::new(n.into(), d.into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Int(n) => *n as f64,
            Value::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(f) => *f,
        }
    }

    fn to_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(n) => Some(BigRational::from_integer((*n).into())),
            Value::Rat(r) => Some(r.clone()),
            Value::Float(_) => None,
        }
    }

    /// Numerator and positive denominator, when both fit in an `i64`.
    fn small_ratio(&self) -> Option<(i64, i64)> {
        match self {
            Value::Int(n) => Some((*n, 1)),
            Value::Rat(r) => Some((r.numer().to_i64()?, r.denom().to_i64()?)),
            Value::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Int(n) => *n == 0,
            Value::Rat(r) => r.is_zero(),
            Value::Float(f) => *f == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Value::Int(n) => *n > 0,
            Value::Rat(r) => r.is_positive(),
            Value::Float(f) => *f > 0.0,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => {
                Value::Int(a.checked_add(*b).expect("integer overflow in addition"))
            }
            (Value::Float(_), _) | (_, Value::Float(_)) => {
                Value::Float(self.to_f64() + other.to_f64())
            }
            _ => match (self.small_ratio(), other.small_ratio()) {
                (Some((a, b)), Some((c, d))) if b == d => small_or_big(a.checked_add(c), Some(b), self, other, |x, y| x + y),
                (Some((a, b)), Some((c, d))) => {
                    let n = a.checked_mul(d).zip(c.checked_mul(b)).and_then(|(x, y)| x.checked_add(y));
                    small_or_big(n, b.checked_mul(d), self, other, |x, y| x + y)
                }
                _ => Value::Rat(self.to_rational().unwrap() + other.to_rational().unwrap()),
            },
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Value::Int(
                a.checked_mul(*b)
                    .expect("integer overflow in multiplication"),
            ),
            (Value::Float(_), _) | (_, Value::Float(_)) => {
                Value::Float(self.to_f64() * other.to_f64())
            }
            _ => match (self.small_ratio(), other.small_ratio()) {
                (Some((a, b)), Some((c, d))) => {
                    small_or_big(a.checked_mul(c), b.checked_mul(d), self, other, |x, y| x * y)
                }
                _ => Value::Rat(self.to_rational().unwrap() * other.to_rational().unwrap()),
            },
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Int(n) => Value::Int(-n),
            Value::Rat(r) => Value::Rat(-r),
            Value::Float(f) => Value::Float(-f),
        }
    }

    /// Division by a positive count. Integers are promoted to rationals.
    pub fn div_count(&self, n: usize) -> Value {
        assert!(n > 0, "division by zero count");
        match self {
            Value::Float(f) => Value::Float(f / n as f64),
            other => Value::Rat(other.to_rational().unwrap() / BigRational::from_integer(n.into())),
        }
    }

    /// Numeric comparison across carriers. `None` only when a NaN is involved.
    pub fn num_cmp(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Float(_), _) | (_, Value::Float(_)) => {
                self.to_f64().partial_cmp(&other.to_f64())
            }
            _ => match (self.small_ratio(), other.small_ratio()) {
                (Some((a, b)), Some((c, d))) => Some((a as i128 * d as i128).cmp(&(c as i128 * b as i128))),
                _ => Some(
                    self.to_rational()
                        .unwrap()
                        .cmp(&other.to_rational().unwrap()),
                ),
            },
        }
    }

    pub fn max(&self, other: &Value) -> Value {
        if self.num_cmp(other) == Some(Ordering::Less) {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, other: &Value) -> Value {
        if other.num_cmp(self) == Some(Ordering::Less) {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Equality up to an absolute tolerance. Exact values compare exactly.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Float(_), _) | (_, Value::Float(_)) => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a == b || (a - b).abs() <= tol
            }
            _ => self == other,
        }
    }
}

/// Reduced `n / d` when both parts were computed without overflow,
/// otherwise the exact result of `op` on the operands.
fn small_or_big(
    n: Option<i64>,
    d: Option<i64>,
    x: &Value,
    y: &Value,
    op: impl Fn(BigRational, BigRational) -> BigRational,
) -> Value {
    match (n, d) {
        (Some(n), Some(d)) => {
            let g = gcd(n.unsigned_abs(), d.unsigned_abs()).max(1);
            // g divides d > 0, so g fits in i64
            let g = g as i64;
            Value::Rat(BigRational::new_raw(BigInt::from(n / g), BigInt::from(d / g)))
        }
        _ => Value::Rat(op(x.to_rational().unwrap(), y.to_rational().unwrap())),
    }
}

/// Binary gcd.
fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a | b;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.num_cmp(other) == Some(Ordering::Equal)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<f64> for Value {
    fn from(f: f64) -> Self {
        Value::Float(f)
    }
}

impl From<BigRational> for Value {
    fn from(r: BigRational) -> Self {
        Value::Rat(r)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Rat(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Float(x) => f.write_str(&format_sig(*x, 9)),
        }
    }
}

/// `%g`-style formatting with `sig` significant digits.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -5 || exp >= sig as i32 {
        let s = format!("{:.*e}", sig - 1, x);
        let (m, e) = s.split_once('e').unwrap();
        let m = trim_zeros(m);
        return format!("{m}e{e}");
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(n) => serializer.serialize_i64(*n),
            Value::Rat(_) => serializer.serialize_str(&self.to_string()),
            Value::Float(f) => serializer.serialize_f64(*f),
        }
    }
}

impl Value {
    pub fn is_one(&self) -> bool {
        match self {
            Value::Int(n) => *n == 1,
            Value::Rat(r) => r.is_one(),
            Value::Float(f) => *f == 1.0,
        }
    }
}
