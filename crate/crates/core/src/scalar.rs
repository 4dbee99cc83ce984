//! Scalar abstraction shared by every exact and numerical routine.
//!
//! The dynamic programs, recurrences and alternating closed forms are written
//! once against [`Scalar`] and instantiated with `f64`/`f32` for speed,
//! [`BigRational`] for exact comparison against the enumeration oracle, and
//! [`MpFloat`] when an alternating sum needs more mantissa than `f64` has.
//! Transcendental functions (asymptotic main terms, Γ) live on [`RealScalar`],
//! which the rational type does not implement.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use rug::float::Special;
use rug::ops::Pow;
use rug::Float;

/// Field-like number type used by the generic numerical core.
pub trait Scalar: Num + Signed + Clone + PartialOrd + fmt::Debug + Send + Sync + 'static {
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_int(value: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn from_u64(value: u64) -> Self {
        match i64::try_from(value) {
            Ok(v) => Self::from_int(v),
            Err(_) => Self::from_int((value >> 1) as i64) * Self::from_int(2) + Self::from_int((value & 1) as i64),
        }
    }

    fn to_f64(&self) -> f64;

    /// Base-2 logarithm of `|self|`, usable even where `to_f64` would overflow.
    fn log2_abs(&self) -> f64 {
        self.to_f64().abs().log2()
    }
}

/// Scalars with the elementary transcendental functions.
pub trait RealScalar: Scalar {
    fn from_f64(value: f64) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn powf(&self, exponent: &Self) -> Self;
    fn gamma(&self) -> Self;
    fn pi() -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(value: i64) -> Self {
        value as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl RealScalar for f64 {
    fn from_f64(value: f64) -> Self {
        value
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn powf(&self, exponent: &Self) -> Self {
        f64::powf(*self, *exponent)
    }
    fn gamma(&self) -> Self {
        statrs::function::gamma::gamma(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_int(value: i64) -> Self {
        value as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl RealScalar for f32 {
    fn from_f64(value: f64) -> Self {
        value as f32
    }
    fn sqrt(&self) -> Self {
        f32::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f32::exp(*self)
    }
    fn ln(&self) -> Self {
        f32::ln(*self)
    }
    fn powf(&self, exponent: &Self) -> Self {
        f32::powf(*self, *exponent)
    }
    fn gamma(&self) -> Self {
        statrs::function::gamma::gamma(f64::from(*self)) as f32
    }
    fn pi() -> Self {
        std::f32::consts::PI
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_u64(value: u64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Only reached for magnitudes outside the f64 range.
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let num = self.numer().abs();
        let den = self.denom();
        let shift_n = num.bits().saturating_sub(64);
        let shift_d = den.bits().saturating_sub(64);
        let n = (&num >> shift_n).to_f64().unwrap_or(f64::MAX);
        let d = (den >> shift_d).to_f64().unwrap_or(f64::MAX);
        n.log2() - d.log2() + shift_n as f64 - shift_d as f64
    }
}

/// Default working precision (mantissa bits) for [`MpFloat`].
pub const DEFAULT_PRECISION: u32 = 256;

thread_local! {
    static WORKING_PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION) };
}

/// Current thread's working precision for newly created [`MpFloat`] values.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.with(Cell::get)
}

/// Runs `f` with the thread's [`MpFloat`] working precision set to `bits`.
///
/// The previous precision is restored when `f` returns or unwinds.
pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> R {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            WORKING_PRECISION.with(|p| p.set(self.0));
        }
    }
    let bits = bits.clamp(rug::float::prec_min(), rug::float::prec_max());
    let _restore = Restore(WORKING_PRECISION.with(|p| p.replace(bits)));
    f()
}

/// Arbitrary-precision binary float (MPFR) usable as a [`Scalar`].
///
/// Constants are created at the thread's working precision, see
/// [`with_precision`]. Binary operations keep the precision of the left
/// operand, so values created inside one scope stay at one precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct MpFloat(Float);

impl MpFloat {
    pub fn new(value: f64) -> Self {
        MpFloat(Float::with_val(working_precision(), value))
    }

    pub fn from_rational(value: &BigRational) -> Self {
        let num = rug::Integer::from_str_radix(&value.numer().to_str_radix(16), 16).expect("valid hex");
        let den = rug::Integer::from_str_radix(&value.denom().to_str_radix(16), 16).expect("valid hex");
        let q = rug::Rational::from((num, den));
        MpFloat(Float::with_val(working_precision(), &q))
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(25)))
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                MpFloat($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a MpFloat> for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &'a MpFloat) -> MpFloat {
                MpFloat($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);
forward_binop!(Rem, rem);

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0)
    }
}

impl Zero for MpFloat {
    fn zero() -> Self {
        MpFloat(Float::with_val(working_precision(), 0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for MpFloat {
    fn one() -> Self {
        MpFloat(Float::with_val(working_precision(), 1))
    }
}

impl Num for MpFloat {
    type FromStrRadixErr = rug::float::ParseFloatError;

    fn from_str_radix(src: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(src, radix as i32)?;
        Ok(MpFloat(Float::with_val(working_precision(), parsed)))
    }
}

impl Signed for MpFloat {
    fn abs(&self) -> Self {
        MpFloat(self.0.clone().abs())
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Self::zero()
        } else {
            self.clone() - other
        }
    }

    fn signum(&self) -> Self {
        MpFloat(self.0.clone().signum())
    }

    fn is_positive(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Greater)
    }

    fn is_negative(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Less)
    }
}

impl Scalar for MpFloat {
    const EXACT: bool = false;

    fn from_int(value: i64) -> Self {
        MpFloat(Float::with_val(working_precision(), value))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        let q = rug::Rational::from((num, den));
        MpFloat(Float::with_val(working_precision(), &q))
    }

    fn from_u64(value: u64) -> Self {
        MpFloat(Float::with_val(working_precision(), value))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (mantissa, exp) = self.0.to_f64_exp();
        mantissa.abs().log2() + f64::from(exp)
    }
}

impl RealScalar for MpFloat {
    fn from_f64(value: f64) -> Self {
        MpFloat::new(value)
    }
    fn sqrt(&self) -> Self {
        MpFloat(self.0.clone().sqrt())
    }
    fn exp(&self) -> Self {
        MpFloat(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        MpFloat(self.0.clone().ln())
    }
    fn powf(&self, exponent: &Self) -> Self {
        MpFloat(self.0.clone().pow(&exponent.0))
    }
    fn gamma(&self) -> Self {
        MpFloat(self.0.clone().gamma())
    }
    fn pi() -> Self {
        MpFloat(Float::with_val(working_precision(), rug::float::Constant::Pi))
    }
}

impl Default for MpFloat {
    fn default() -> Self {
        MpFloat(Float::with_val(working_precision(), Special::Zero))
    }
}

/// Exact rational from a decimal or `a/b` string, e.g. `"3/4"` or `"0.25"`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32 + 1);
    let value = BigRational::new(all, scale);
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_scope_is_restored() {
        let outer = working_precision();
        with_precision(512, || {
            assert_eq!(MpFloat::one().precision(), 512);
            with_precision(80, || assert_eq!(MpFloat::zero().precision(), 80));
            assert_eq!(working_precision(), 512);
        });
        assert_eq!(working_precision(), outer);
    }

    #[test]
    fn mp_arithmetic_matches_f64_on_simple_values() {
        let x = MpFloat::from_ratio(1, 3) * MpFloat::from_int(3);
        assert!((x.to_f64() - 1.0).abs() < 1e-70_f64.max(f64::EPSILON));
        let y = MpFloat::from_int(2).sqrt();
        assert!((y.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-16);
    }

    #[test]
    fn mp_log2_survives_overflow() {
        let big = MpFloat::from_int(2).powf(&MpFloat::from_int(5000));
        assert!(big.to_f64().is_infinite());
        assert!((big.log2_abs() - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn rational_log2() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(2).pow(300u32));
        assert!((q.log2_abs() + 300.0).abs() < 1e-12);
        assert_eq!(Scalar::to_f64(&BigRational::from_ratio(3, 4)), 0.75);
    }

    #[test]
    fn mp_from_rational_is_correctly_rounded() {
        let q = BigRational::new(BigInt::from(7), BigInt::from(3));
        assert_eq!(MpFloat::from_rational(&q).to_f64(), 7.0 / 3.0);
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/4"), Some(BigRational::from_ratio(3, 4)));
        assert_eq!(parse_rational("0.25"), Some(BigRational::from_ratio(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(BigRational::from_ratio(-3, 2)));
        assert_eq!(parse_rational("2"), Some(BigRational::from_int(2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn gamma_reference_values() {
        // Reference values from a 50-digit evaluation.
        let vectors = [
            (0.5, 1.772_453_850_905_516),
            (1.5, 0.886_226_925_452_758),
            (std::f64::consts::SQRT_2, 0.886_581_428_719_259),
            (0.618_033_988_749_894_9, 1.449_229_602_269_896_5),
            (1.618_033_988_749_895, 0.895_673_151_705_288),
            (0.25, 3.625_609_908_221_908),
            (0.01, 99.432_585_119_150_6),
            (12.3, 83_385_367.899_97),
            (29.5, 1.634_812_519_827_426_6e30),
        ];
        for (x, expected) in vectors {
            let got = RealScalar::gamma(&x);
            assert!(((got - expected) / expected).abs() < 1e-12, "Γ({x}) = {got}, expected {expected}");
        }
    }
}
