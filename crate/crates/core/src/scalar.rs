//! Exact scalar types.
//!
//! Every algorithm in this crate is generic over [`Scalar`], an ordered field
//! with exact arithmetic. Implementations are provided for the three
//! `num_rational` ratio types; floating point types are deliberately not
//! implemented because optimality and membership tests are equality tests.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, NumAssign, Signed, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as an exact number")]
pub struct ParseScalarError {
    pub input: String,
}

/// An exact ordered field element.
pub trait Scalar: Clone + Debug + Display + Ord + Hash + Send + Sync + 'static + Num + NumAssign + Signed {
    fn from_i64(value: i64) -> Self;

    /// Ratio of two integers; `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// The value as an `i64` if it is an integer that fits.
    fn to_i64_exact(&self) -> Option<i64>;

    /// Smallest integer not below the value, if it fits an `i64`.
    fn ceil_i64(&self) -> Option<i64>;

    /// Denominator of the reduced fraction, if it fits a `u64`.
    fn denominator_u64(&self) -> Option<u64>;

    fn to_f64_lossy(&self) -> f64;

    /// Canonical fraction text: `"3/2"`, `"-4"`, `"0"`.
    fn to_fraction_string(&self) -> String {
        self.to_string()
    }

    /// Parses `"3/2"`, `"-7"`, or a finite decimal such as `"1.25"`.
    fn parse_exact(text: &str) -> Result<Self, ParseScalarError> {
        let err = || ParseScalarError {
            input: text.to_string(),
        };
        let t = text.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((num, den)) = t.split_once('/') {
            let num = parse_integer::<Self>(num.trim()).ok_or_else(err)?;
            let den = parse_integer::<Self>(den.trim()).ok_or_else(err)?;
            if den.is_zero() {
                return Err(err());
            }
            return Ok(num / den);
        }
        if let Some((int_part, frac_part)) = t.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let negative = int_part.starts_with('-');
            let int_digits = int_part.trim_start_matches(['-', '+']);
            let whole = if int_digits.is_empty() {
                Self::zero()
            } else {
                parse_integer::<Self>(int_digits).ok_or_else(err)?
            };
            let frac = parse_integer::<Self>(frac_part).ok_or_else(err)?;
            let mut scale = Self::one();
            let ten = Self::from_i64(10);
            for _ in 0..frac_part.len() {
                scale *= ten.clone();
            }
            let magnitude = whole + frac / scale;
            return Ok(if negative { -magnitude } else { magnitude });
        }
        parse_integer::<Self>(t).ok_or_else(err)
    }
}

// Digit-by-digit accumulation so arbitrarily long integers work for every
// backing integer type that can hold them.
fn parse_integer<T: Scalar>(text: &str) -> Option<T> {
    let (negative, digits) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let ten = T::from_i64(10);
    let mut acc = T::zero();
    for b in digits.bytes() {
        acc = acc * ten.clone() + T::from_i64(i64::from(b - b'0'));
    }
    Some(if negative { -acc } else { acc })
}

macro_rules! impl_scalar_for_ratio {
    ($int:ty, $from:expr) => {
        impl Scalar for Ratio<$int> {
            fn from_i64(value: i64) -> Self {
                Ratio::from_integer($from(value))
            }

            fn from_ratio(num: i64, den: i64) -> Self {
                Ratio::new($from(num), $from(den))
            }

            fn to_i64_exact(&self) -> Option<i64> {
                if self.is_integer() {
                    self.numer().to_i64()
                } else {
                    None
                }
            }

            fn ceil_i64(&self) -> Option<i64> {
                self.ceil().numer().to_i64()
            }

            fn denominator_u64(&self) -> Option<u64> {
                self.denom().to_u64()
            }

            fn to_f64_lossy(&self) -> f64 {
                let n = self.numer().to_f64().unwrap_or(f64::NAN);
                let d = self.denom().to_f64().unwrap_or(f64::NAN);
                n / d
            }
        }
    };
}

impl_scalar_for_ratio!(i64, |v: i64| v);
impl_scalar_for_ratio!(i128, |v: i64| i128::from(v));
impl_scalar_for_ratio!(BigInt, BigInt::from);

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> Option<u64> {
    values.into_iter().try_fold(1u64, |acc, v| {
        let d = v.denominator_u64()?;
        let l = acc.lcm(&d);
        // lcm overflow shows up as a result smaller than an input
        (l >= acc && l >= d).then_some(l)
    })
}

/// Parses through `FromStr` for callers that want the std trait.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exact<T>(pub T);

impl<T: Scalar> FromStr for Exact<T> {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        T::parse_exact(s).map(Exact)
    }
}
