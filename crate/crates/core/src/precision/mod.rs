//! Scalar substrate: exact rationals, outward-rounded dyadic intervals and
//! exact arithmetic in `Q(beta)` for algebraic bases.

mod algebraic;
mod parse;
mod poly;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use algebraic::{AlgebraicNumber, NumberRing, Real};
pub use parse::{parse_rational, RealSpec};
pub use poly::Poly;

pub type Rational = BigRational;

/// Lowest admissible working precision.
pub const MIN_BITS: u32 = 64;
/// Default working precision for interval evaluation.
pub const DEFAULT_BITS: u32 = 192;
/// Default precision ceiling for escalation.
pub const DEFAULT_CEILING: u32 = 1 << 16;

/// Working precision and the ceiling up to which it may be doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub bits: u32,
    pub ceiling: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { bits: DEFAULT_BITS, ceiling: DEFAULT_CEILING }
    }
}

impl PrecisionPolicy {
    pub fn with_bits(bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::Domain(format!("precision must be at least {MIN_BITS} bits, got {bits}")));
        }
        Ok(PrecisionPolicy { bits, ceiling: DEFAULT_CEILING.max(bits) })
    }

    /// Bits needed to extract `depth` digits of a base-`beta` orbit.
    pub fn bits_for_depth(&self, depth: usize, log2_beta: f64) -> u32 {
        let need = (depth as f64 * log2_beta).ceil() as u64 + 64;
        (need.min(u32::MAX as u64) as u32).max(self.bits)
    }
}

pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << (k as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-k) as usize))
    }
}

/// Round `x` to a dyadic rational with about `bits` significant bits,
/// towards -inf (`up = false`) or +inf (`up = true`).
pub(crate) fn round_dyadic(x: &Rational, bits: u32, up: bool) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let k = bits as i64 - e;
    let (n, d) = if k >= 0 {
        (x.numer() << (k as usize), x.denom().clone())
    } else {
        (x.numer().clone(), x.denom() << ((-k) as usize))
    };
    let q = if up { n.div_ceil(&d) } else { n.div_floor(&d) };
    let r = Rational::from_integer(q) * pow2(-k);
    debug_assert!(if up { &r >= x } else { &r <= x });
    r
}

pub(crate) fn floor_rat(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Outcome of a floor decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FloorDecision {
    Certain(BigInt),
    Ambiguous,
}

/// Closed interval `[lo, hi]` with dyadic endpoints rounded outward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    bits: u32,
}

impl Interval {
    /// Encloses `[lo, hi]`, rounding endpoints outward to `bits` bits.
    pub fn new(lo: &Rational, hi: &Rational, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("interval lower bound {lo} exceeds upper bound {hi}")));
        }
        Ok(Interval { lo: round_dyadic(lo, bits, false), hi: round_dyadic(hi, bits, true), bits })
    }

    pub fn point(x: &Rational, bits: u32) -> Self {
        Interval { lo: round_dyadic(x, bits, false), hi: round_dyadic(x, bits, true), bits }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Same enclosure at a higher working precision. Endpoints are already
    /// exact dyadics, so they carry over unchanged.
    pub fn widen(&self, bits: u32) -> Self {
        Interval { lo: self.lo.clone(), hi: self.hi.clone(), bits: bits.max(self.bits) }
    }

    fn from_raw(lo: Rational, hi: Rational, bits: u32) -> Self {
        Interval { lo: round_dyadic(&lo, bits, false), hi: round_dyadic(&hi, bits, true), bits }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let bits = self.bits.max(o.bits);
        Interval::from_raw(&self.lo + &o.lo, &self.hi + &o.hi, bits)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let bits = self.bits.max(o.bits);
        Interval::from_raw(&self.lo - &o.hi, &self.hi - &o.lo, bits)
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -self.hi.clone(), hi: -self.lo.clone(), bits: self.bits }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let bits = self.bits.max(o.bits);
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().cloned().unwrap();
        let hi = c.iter().max().cloned().unwrap();
        Interval::from_raw(lo, hi, bits)
    }

    pub fn mul_rat(&self, q: &Rational) -> Interval {
        let (a, b) = (&self.lo * q, &self.hi * q);
        if q.is_negative() {
            Interval::from_raw(b, a, self.bits)
        } else {
            Interval::from_raw(a, b, self.bits)
        }
    }

    pub fn add_rat(&self, q: &Rational) -> Interval {
        Interval::from_raw(&self.lo + q, &self.hi + q, self.bits)
    }

    pub fn recip(&self) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::Domain("reciprocal of an interval containing 0".into()));
        }
        Ok(Interval::from_raw(self.hi.recip(), self.lo.recip(), self.bits))
    }

    pub fn div(&self, o: &Interval) -> Result<Interval> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, e: u32) -> Interval {
        let mut acc = Interval::point(&Rational::one(), self.bits);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn floor(&self) -> FloorDecision {
        let a = floor_rat(&self.lo);
        let b = floor_rat(&self.hi);
        if a == b {
            FloorDecision::Certain(a)
        } else {
            FloorDecision::Ambiguous
        }
    }

    /// Sign-certified comparison with another interval; `None` on overlap.
    pub fn partial_cmp_certified(&self, o: &Interval) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.mid())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_decimal(&self.lo, 20), format_decimal(&self.hi, 20))
    }
}

/// Real quantity: either exact or enclosed by an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Exact(Rational),
    Interval(Interval),
}

impl Scalar {
    pub fn exact(q: Rational) -> Self {
        Scalar::Exact(q)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn precision(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Interval(i) => Some(i.bits()),
        }
    }

    pub fn widen_precision(&self, bits: u32) -> Result<Scalar> {
        match self {
            Scalar::Exact(_) => Ok(self.clone()),
            Scalar::Interval(i) => {
                if bits < i.bits() {
                    return Err(Error::Domain(format!("cannot narrow precision from {} to {bits} bits", i.bits())));
                }
                Ok(Scalar::Interval(i.widen(bits)))
            }
        }
    }

    pub fn certified_floor(&self) -> FloorDecision {
        match self {
            Scalar::Exact(q) => FloorDecision::Certain(floor_rat(q)),
            Scalar::Interval(i) => i.floor(),
        }
    }

    pub fn enclosure(&self, bits: u32) -> Interval {
        match self {
            Scalar::Exact(q) => Interval::point(q, bits),
            Scalar::Interval(i) => i.clone(),
        }
    }

    /// Width of the enclosure; zero for exact values.
    pub fn width(&self) -> Rational {
        match self {
            Scalar::Exact(_) => Rational::zero(),
            Scalar::Interval(i) => i.width(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rat_to_f64(q),
            Scalar::Interval(i) => i.to_f64(),
        }
    }

    fn binary(
        &self,
        o: &Scalar,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        inter: impl Fn(&Interval, &Interval) -> Interval,
    ) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            (Scalar::Interval(a), Scalar::Interval(b)) => Scalar::Interval(inter(a, b)),
            (Scalar::Exact(a), Scalar::Interval(b)) => Scalar::Interval(inter(&Interval::point(a, b.bits()), b)),
            (Scalar::Interval(a), Scalar::Exact(b)) => Scalar::Interval(inter(a, &Interval::point(b, a.bits()))),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        self.binary(o, |a, b| a + b, Interval::add)
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.binary(o, |a, b| a - b, Interval::sub)
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        self.binary(o, |a, b| a * b, Interval::mul)
    }

    pub fn powi(&self, e: u32) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(num_traits::pow(q.clone(), e as usize)),
            Scalar::Interval(i) => Scalar::Interval(i.powi(e)),
        }
    }

    /// Certified comparison; `None` when enclosures overlap.
    pub fn compare(&self, o: &Scalar) -> Option<Ordering> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => {
                let bits = self.precision().or(o.precision()).unwrap_or(DEFAULT_BITS);
                self.enclosure(bits).partial_cmp_certified(&o.enclosure(bits))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Interval(i) => write!(f, "{i}"),
        }
    }
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() && (v != 0.0 || q.is_zero()) {
            return v;
        }
    }
    // Very large or very small magnitudes: scale through the exponent.
    let e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let scaled = q * pow2(-e);
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(e as i32)
}

/// Natural logarithm of a positive rational, robust to huge magnitudes.
pub fn ln_rat(q: &Rational) -> f64 {
    ln_big(q.numer()) - ln_big(q.denom())
}

pub fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).abs().ln();
    }
    let shift = bits - 64;
    let top = (n.magnitude() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Decimal rendering with `digits` significant digits (truncated toward zero).
pub fn format_decimal(q: &Rational, digits: usize) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let neg = q.is_negative();
    let a = q.abs();
    let int_part = floor_rat(&a);
    let mut frac = a - Rational::from_integer(int_part.clone());
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let int_str = int_part.to_str_radix(10);
    out.push_str(&int_str);
    let leading = if int_part.sign() == Sign::NoSign { 0 } else { int_str.len() };
    let mut remaining = digits.saturating_sub(leading);
    if remaining == 0 || frac.is_zero() {
        return out;
    }
    out.push('.');
    let ten = Rational::from_integer(BigInt::from(10));
    let mut significant = leading > 0;
    let mut frac_digits = 0usize;
    while remaining > 0 && !frac.is_zero() && frac_digits < 4 * digits + 400 {
        frac *= &ten;
        let d = floor_rat(&frac);
        frac -= Rational::from_integer(d.clone());
        let d = d.to_u8().unwrap();
        out.push((b'0' + d) as char);
        frac_digits += 1;
        if d != 0 {
            significant = true;
        }
        if significant {
            remaining -= 1;
        }
    }
    out
}
