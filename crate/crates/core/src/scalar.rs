//! Scalar abstractions.
//!
//! [`Scalar`] is the field interface the power-series machinery needs, and
//! [`Real`] adds the elementary functions used on real saddles. Both are
//! implemented for `f64` and for [`BigReal`], an arbitrary-precision binary
//! float; `Complex64` implements [`Scalar`] only.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign as BfSign};
use num_complex::Complex64;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("failed to allocate constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Field operations plus construction of constants in the precision context
/// of an existing value.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `v` converted into the same precision context as `self`.
    fn lift(&self, v: f64) -> Self;

    /// |self| rounded to double.
    fn magnitude(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.lift(0.0)
    }

    fn one_like(&self) -> Self {
        self.lift(1.0)
    }
}

/// Ordered real scalars with the elementary functions.
pub trait Real: Scalar + PartialOrd {
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn pi_like(&self) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn lift(&self, v: f64) -> Self {
        v
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Real for f64 {
    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn pi_like(&self) -> Self {
        std::f64::consts::PI
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Complex64 {
    fn lift(&self, v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Arbitrary-precision real number with a fixed mantissa length in bits.
///
/// Binary operations produce a result at the larger of the two operand
/// precisions. Rounding is to nearest, ties to even.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    bits: usize,
}

/// Mantissa bits needed to carry `digits` decimal digits, plus one guard word.
pub fn bits_for_digits(digits: u32) -> usize {
    let raw = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
    raw.div_ceil(64) * 64
}

impl BigReal {
    pub fn from_f64(v: f64, bits: usize) -> Self {
        BigReal { v: BigFloat::from_f64(v, bits), bits }
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        BigReal { v: BigFloat::from_i64(v, bits), bits }
    }

    pub fn from_u64(v: u64, bits: usize) -> Self {
        BigReal { v: BigFloat::from_u64(v, bits), bits }
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_u64(0, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_u64(1, bits)
    }

    /// π at `bits` precision.
    pub fn pi(bits: usize) -> Self {
        BigReal { v: with_consts(|cc| cc.pi(bits, RM)), bits }
    }

    /// Parses a decimal literal such as `"0.2"` or `"-1.5e3"` exactly to the
    /// working precision.
    pub fn parse(s: &str, bits: usize) -> Self {
        BigReal { v: with_consts(|cc| BigFloat::parse(s, Radix::Dec, bits, RM, cc)), bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Same value carried at a different precision.
    pub fn with_bits(&self, bits: usize) -> Self {
        let mut v = self.v.clone();
        // set_precision only fails for NaN/Inf, which keep their flavour.
        let _ = v.set_precision(bits, RM);
        BigReal { v, bits }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_nan() || self.v.is_inf())
    }

    pub fn abs(&self) -> Self {
        BigReal { v: self.v.abs(), bits: self.bits }
    }

    pub fn exp(&self) -> Self {
        BigReal { v: with_consts(|cc| self.v.exp(self.bits, RM, cc)), bits: self.bits }
    }

    pub fn ln(&self) -> Self {
        BigReal { v: with_consts(|cc| self.v.ln(self.bits, RM, cc)), bits: self.bits }
    }

    pub fn sqrt(&self) -> Self {
        BigReal { v: self.v.sqrt(self.bits, RM), bits: self.bits }
    }

    /// self^n for a non-negative integer n.
    pub fn powi(&self, n: usize) -> Self {
        BigReal { v: self.v.powi(n, self.bits, RM), bits: self.bits }
    }

    pub fn recip(&self) -> Self {
        BigReal { v: self.v.reciprocal(self.bits, RM), bits: self.bits }
    }

    pub fn mul_f64(&self, k: f64) -> Self {
        self.clone() * self.lift(k)
    }

    /// Largest integer not exceeding self, as i64 (saturating).
    pub fn floor_i64(&self) -> i64 {
        let f = self.v.floor();
        let d = BigReal { v: f, bits: self.bits }.to_f64();
        d as i64
    }

    /// True when the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.v.is_int()
    }

    /// log₂|self| to double accuracy, valid far outside the f64 range;
    /// -∞ for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.v.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self.v.as_raw_parts() {
            Some((m, _, _, e, _)) => {
                let top = m[m.len() - 1] as f64 / 18446744073709551616.0;
                e as f64 + top.log2()
            }
            None => f64::INFINITY,
        }
    }

    /// log₁₀|self|, see [`BigReal::log2_abs`].
    pub fn log10_abs(&self) -> f64 {
        self.log2_abs() * std::f64::consts::LOG10_2
    }

    /// Nearest double (saturating to ±∞ / 0 outside the double range).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.v.is_zero() {
            return 0.0;
        }
        let (m, _, s, e, _) = self.v.as_raw_parts().expect("finite value has raw parts");
        let n = m.len();
        // Fold the sticky bits of the lower words into the top word so the
        // u64 -> f64 rounding below sees them.
        let mut top = m[n - 1];
        if m[..n - 1].iter().any(|&w| w != 0) {
            top |= 1;
        }
        let mag = ldexp(top as f64, e as i64 - 64);
        match s {
            BfSign::Neg => -mag,
            BfSign::Pos => mag,
        }
    }

    /// Decimal rendering with `digits` significant digits, e.g. `-1.234e-5`.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.v.is_zero() {
            return "0".to_string();
        }
        let lg = self.log10_abs();
        let mut exp10 = lg.floor() as i64;
        let bits = self.bits.max(128);
        let ten = BigReal::from_u64(10, bits);
        let scale = |k: i64| -> BigReal {
            if k >= 0 {
                ten.powi(k as usize)
            } else {
                ten.powi((-k) as usize).recip()
            }
        };
        let shift = digits as i64 - 1 - exp10;
        let mut scaled = (self.abs().with_bits(bits) * scale(shift)).to_f64().round();
        if scaled >= 10f64.powi(digits as i32) {
            exp10 += 1;
            scaled = (self.abs().with_bits(bits) * scale(shift - 1)).to_f64().round();
        }
        let mant = format!("{:.0}", scaled);
        let (head, tail) = mant.split_at(1);
        let sign = if self.is_negative() { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{exp10}")
        } else {
            format!("{sign}{head}.{tail}e{exp10}")
        }
    }
}

fn ldexp(mut m: f64, mut k: i64) -> f64 {
    while k > 1000 {
        m *= 2f64.powi(1000);
        k -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while k < -1000 {
        m *= 2f64.powi(-1000);
        k += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(k as i32)
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {} bits)", self.to_sci_string(20), self.bits)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(17);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! bigreal_binop {
    ($tr:ident, $method:ident, $op:ident) => {
        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                let bits = self.bits.max(rhs.bits);
                BigReal { v: self.v.$op(&rhs.v, bits, RM), bits }
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
    };
}

bigreal_binop!(Add, add, add);
bigreal_binop!(Sub, sub, sub);
bigreal_binop!(Mul, mul, mul);
bigreal_binop!(Div, div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal { v: self.v.neg(), bits: self.bits }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal { v: self.v.clone().neg(), bits: self.bits }
    }
}

impl Scalar for BigReal {
    fn lift(&self, v: f64) -> Self {
        BigReal::from_f64(v, self.bits)
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Real for BigReal {
    fn exp(&self) -> Self {
        BigReal::exp(self)
    }

    fn ln(&self) -> Self {
        BigReal::ln(self)
    }

    fn sqrt(&self) -> Self {
        BigReal::sqrt(self)
    }

    fn pi_like(&self) -> Self {
        BigReal::pi(self.bits)
    }

    fn to_f64(&self) -> f64 {
        BigReal::to_f64(self)
    }
}

/// Neumaier-compensated running sum over any scalar field with an ordering
/// on magnitudes.
#[derive(Debug, Clone)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new(zero: T) -> Self {
        CompensatedSum { comp: zero.clone(), sum: zero }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum.clone() + x.clone();
        if self.sum.magnitude() >= x.magnitude() {
            self.comp = self.comp.clone() + ((self.sum.clone() - t.clone()) + x);
        } else {
            self.comp = self.comp.clone() + ((x - t.clone()) + self.sum.clone());
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum.clone() + self.comp.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_bigreal() {
        for v in [1.0, -0.75, 3.0, 1e-300, -1e300, 0.1, std::f64::consts::PI, 2.2250738585072014e-308] {
            assert_eq!(BigReal::from_f64(v, 256).to_f64(), v);
        }
        assert_eq!(BigReal::zero(128).to_f64(), 0.0);
    }

    #[test]
    fn to_f64_rounds_to_nearest() {
        let third = BigReal::one(256) / BigReal::from_u64(3, 256);
        assert_eq!(third.to_f64(), 1.0 / 3.0);
        let e = BigReal::one(256).exp();
        assert_eq!(e.to_f64(), std::f64::consts::E);
    }

    #[test]
    fn elementary_functions() {
        let bits = 256;
        let two = BigReal::from_u64(2, bits);
        assert_eq!(two.ln().to_f64(), std::f64::consts::LN_2);
        assert_eq!(two.sqrt().to_f64(), std::f64::consts::SQRT_2);
        assert_eq!(BigReal::pi(bits).to_f64(), std::f64::consts::PI);
        assert_eq!(two.powi(10).to_f64(), 1024.0);
    }

    #[test]
    fn log2_beyond_double_range() {
        let big = BigReal::from_u64(10, 256).powi(400);
        assert!((big.log10_abs() - 400.0).abs() < 1e-12);
        assert_eq!(big.to_f64(), f64::INFINITY);
    }

    #[test]
    fn scientific_rendering() {
        let v = BigReal::parse("-1.58935e-2", 256);
        assert_eq!(v.to_sci_string(6), "-1.58935e-2");
        assert_eq!(BigReal::parse("999999.7", 256).to_sci_string(3), "1.00e6");
        assert_eq!(BigReal::from_u64(7, 128).to_sci_string(1), "7e0");
    }

    #[test]
    fn parse_is_exact_at_working_precision() {
        let bits = 256;
        let fifth = BigReal::parse("0.2", bits);
        let five = BigReal::from_u64(5, bits);
        let diff = (fifth * five - BigReal::one(bits)).abs();
        assert!(diff.log2_abs() < -250.0);
    }

    #[test]
    fn compensated_sum_recovers_small_addend() {
        let mut s = CompensatedSum::new(0.0f64);
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn bits_for_digits_rounds_to_words() {
        assert_eq!(bits_for_digits(30) % 64, 0);
        assert!(bits_for_digits(60) as f64 >= 60.0 * std::f64::consts::LOG2_10 + 64.0);
    }
}
