//! Numeric types for ballot weights, margins and metric values.
//!
//! Everything above this module is generic over [`Scalar`]. Exact rationals
//! ([`crate::Rational`]) are the default because tie detection between
//! margins and supports has to be exact; `f64` is available for quick
//! exploratory runs where that does not matter.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// A number type usable as a ballot weight and metric value.
pub trait Scalar: Num + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn from_u64(value: u64) -> Self;

    /// Converts an exact rational. Returns `None` when the value does not fit.
    fn from_rational(value: &BigRational) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// The value as a non-negative integer, if it is one.
    fn to_count(&self) -> Option<u64>;

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn from_usize(value: usize) -> Self {
        Self::from_u64(value as u64)
    }
}

impl Scalar for BigRational {
    fn from_u64(value: u64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn from_rational(value: &BigRational) -> Option<Self> {
        Some(value.clone())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_count(&self) -> Option<u64> {
        if self.is_integer() && !self.is_negative() {
            self.numer().to_u64()
        } else {
            None
        }
    }
}

macro_rules! impl_scalar_for_small_ratio {
    ($($int:ty => $conv:ident),*) => {$(
        impl Scalar for Ratio<$int> {
            fn from_u64(value: u64) -> Self {
                Ratio::from_integer(<$int>::try_from(value).expect("integer weight out of range"))
            }

            fn from_rational(value: &BigRational) -> Option<Self> {
                Some(Ratio::new(value.numer().$conv()?, value.denom().$conv()?))
            }

            fn to_f64(&self) -> f64 {
                ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
            }

            fn to_count(&self) -> Option<u64> {
                if self.is_integer() && !self.is_negative() {
                    u64::try_from(*self.numer()).ok()
                } else {
                    None
                }
            }
        }
    )*};
}

impl_scalar_for_small_ratio!(i64 => to_i64, i128 => to_i128);

macro_rules! impl_scalar_for_float {
    ($($float:ty),*) => {$(
        impl Scalar for $float {
            fn from_u64(value: u64) -> Self {
                value as $float
            }

            fn from_rational(value: &BigRational) -> Option<Self> {
                let v = ToPrimitive::to_f64(value)?;
                v.is_finite().then_some(v as $float)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn to_count(&self) -> Option<u64> {
                (*self >= 0.0 && self.fract() == 0.0 && *self <= u64::MAX as $float)
                    .then_some(*self as u64)
            }
        }
    )*};
}

impl_scalar_for_float!(f32, f64);

/// Sums an iterator of scalars.
pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Parses a weight written as an integer, a fraction `p/q`, or a decimal.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mantissa: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::new(mantissa * BigInt::from(sign), scale))
}

/// Renders `value` as a plain decimal with `digits` significant digits,
/// trailing zeros removed.
pub fn decimal_string(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value.is_finite() {
            "0".to_string()
        } else {
            value.to_string()
        };
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), value);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exponent + 1;
    let mut out = String::new();
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits_only);
    } else if point as usize >= digits_only.len() {
        out.push_str(&digits_only);
        out.extend(std::iter::repeat_n('0', point as usize - digits_only.len()));
    } else {
        out.push_str(&digits_only[..point as usize]);
        out.push('.');
        out.push_str(&digits_only[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    if negative {
        out.insert(0, '-');
    }
    out
}

/// `a / b` as an exact ratio of two counts.
pub fn ratio<S: Scalar>(a: u64, b: u64) -> S {
    S::from_u64(a) / S::from_u64(b)
}
