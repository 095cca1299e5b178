use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{floor_rat, FloorDecision, Interval, Poly, PrecisionPolicy, RealSpec};
use crate::error::{Error, Result};

type Rational = BigRational;

/// A real algebraic number: a squarefree polynomial together with an
/// isolating interval `(lo, hi)` that is refined on demand by bisection.
#[derive(Debug)]
pub struct AlgebraicNumber {
    poly: Poly,
    lo: Rational,
    hi: Rational,
    lo_sign_negative: bool,
    /// `poly` scaled to integer coefficients.
    int_coeffs: Vec<BigInt>,
    refined: RwLock<Bracket>,
}

/// Dyadic bracket `[lo / 2^k, hi / 2^k]`.
#[derive(Clone, Debug)]
struct Bracket {
    lo: BigInt,
    hi: BigInt,
    k: usize,
}

impl Bracket {
    fn interval(&self, bits: u32) -> Interval {
        let d = BigInt::one() << self.k;
        Interval::new(&Rational::new(self.lo.clone(), d.clone()), &Rational::new(self.hi.clone(), d), bits).unwrap()
    }
}

/// Sign of `p(a / 2^k)` for integer coefficients, by homogeneous Horner.
fn sign_at_dyadic(c: &[BigInt], a: &BigInt, k: usize) -> BigInt {
    let d = c.len() - 1;
    let mut acc = c[d].clone();
    for i in (0..d).rev() {
        acc = acc * a + (&c[i] << (k * (d - i)));
    }
    acc.signum()
}

fn integer_coeffs(p: &Poly) -> Vec<BigInt> {
    let l = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.coeffs().iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect()
}

impl Clone for AlgebraicNumber {
    fn clone(&self) -> Self {
        let r = self.refined.read().unwrap().clone();
        AlgebraicNumber {
            poly: self.poly.clone(),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_sign_negative: self.lo_sign_negative,
            int_coeffs: self.int_coeffs.clone(),
            refined: RwLock::new(r),
        }
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.poly == o.poly && self.lo == o.lo && self.hi == o.hi
    }
}

impl AlgebraicNumber {
    pub fn rational(q: Rational) -> Self {
        let poly = Poly::new(vec![-q.clone(), Rational::one()]);
        AlgebraicNumber {
            poly,
            lo: q.clone(),
            hi: q.clone(),
            lo_sign_negative: false,
            int_coeffs: Vec::new(),
            refined: RwLock::new(Bracket { lo: BigInt::zero(), hi: BigInt::zero(), k: 0 }),
        }
    }

    /// The unique root of `poly` in the open interval `(lo, hi)`.
    pub fn new(poly: &Poly, lo: &Rational, hi: &Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidRoot(format!("empty interval ({lo}, {hi})")));
        }
        let mut sf = poly.squarefree();
        if sf.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidRoot(format!("constant polynomial {poly}")));
        }
        let zero_in = lo < &Rational::zero() && hi > &Rational::zero();
        if !zero_in {
            while sf.constant_term().is_zero() {
                sf = sf.div_rem(&Poly::z()).0;
            }
        }
        if sf.eval(lo).is_zero() || sf.eval(hi).is_zero() {
            return Err(Error::InvalidRoot(format!(
                "an endpoint of ({lo}, {hi}) is a root of {poly}; give the root as a rational"
            )));
        }
        let n = sf.count_roots(lo, hi);
        if n != 1 {
            return Err(Error::InvalidRoot(format!("{poly} has {n} roots in ({lo}, {hi}), expected exactly 1")));
        }
        if sf.degree() == Some(1) {
            let q = -sf.constant_term() / sf.lead();
            return Ok(AlgebraicNumber::rational(q));
        }
        let lo_sign_negative = sf.eval(lo).is_negative();
        let int_coeffs = integer_coeffs(&sf);
        // Move to a dyadic bracket strictly inside (lo, hi).
        let mut k = 0usize;
        let bracket = loop {
            let scale = Rational::from_integer(BigInt::one() << k);
            let a = (lo * &scale).ceil().to_integer();
            let b = (hi * &scale).floor().to_integer();
            if a < b {
                let sa = sign_at_dyadic(&int_coeffs, &a, k);
                let sb = sign_at_dyadic(&int_coeffs, &b, k);
                if sa.is_zero() {
                    return Ok(AlgebraicNumber::rational(Rational::new(a, BigInt::one() << k)));
                }
                if sb.is_zero() {
                    return Ok(AlgebraicNumber::rational(Rational::new(b, BigInt::one() << k)));
                }
                if sa.is_negative() == lo_sign_negative && sb.is_negative() != lo_sign_negative {
                    break Bracket { lo: a, hi: b, k };
                }
            }
            k += 1;
        };
        Ok(AlgebraicNumber {
            poly: sf,
            lo: lo.clone(),
            hi: hi.clone(),
            lo_sign_negative,
            int_coeffs,
            refined: RwLock::new(bracket),
        })
    }

    pub fn from_spec(spec: &RealSpec) -> Result<Self> {
        match spec {
            RealSpec::Rational(q) => Ok(AlgebraicNumber::rational(q.clone())),
            RealSpec::Root { poly, lo, hi } => AlgebraicNumber::new(poly, lo, hi),
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn isolating_interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.poly.degree() == Some(1) {
            Some(-self.poly.constant_term() / self.poly.lead())
        } else {
            None
        }
    }

    /// Enclosure of width at most about `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(&q, bits);
        }
        let fine = |b: &Bracket| {
            let w = &b.hi - &b.lo;
            let t = bits as usize + 2;
            if b.k >= t {
                w <= BigInt::one() << (b.k - t)
            } else {
                (w << (t - b.k)) <= BigInt::one()
            }
        };
        {
            let b = self.refined.read().unwrap();
            if fine(&b) {
                return b.interval(bits + 4);
            }
        }
        let mut b = self.refined.write().unwrap();
        while !fine(&b) {
            let mid = &b.lo + &b.hi;
            b.lo <<= 1;
            b.hi <<= 1;
            b.k += 1;
            let v = sign_at_dyadic(&self.int_coeffs, &mid, b.k);
            if v.is_zero() {
                b.lo = mid.clone();
                b.hi = mid;
                break;
            }
            if v.is_negative() == self.lo_sign_negative {
                b.lo = mid;
            } else {
                b.hi = mid;
            }
        }
        b.interval(bits + 4)
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure(60).to_f64()
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "root:{}:[{},{}]", self.poly, self.lo, self.hi),
        }
    }
}

/// The ring `Q[z]/(p)` evaluated at the distinguished root `beta` of `p`.
///
/// Elements are exact; signs and floors are decided from interval enclosures
/// with a gcd + Sturm fallback for exact zero tests.
#[derive(Debug)]
pub struct NumberRing {
    base: AlgebraicNumber,
    inv_z: Poly,
    policy: PrecisionPolicy,
    height_bits: u64,
}

impl NumberRing {
    pub fn new(base: AlgebraicNumber, policy: PrecisionPolicy) -> Result<Arc<Self>> {
        let p = base.poly().clone();
        let c0 = p.constant_term();
        if c0.is_zero() {
            return Err(Error::Domain("base must be nonzero".into()));
        }
        // p = z*q + c0  =>  z * (-q/c0) = 1 mod p
        let (q, _) = p.sub(&Poly::constant(c0.clone())).div_rem(&Poly::z());
        let inv_z = q.scale(&(-c0.recip()));
        let upper = base.enclosure(8).hi().clone();
        let height_bits = floor_rat(&upper.abs()).bits() + 1;
        Ok(Arc::new(NumberRing { base, inv_z, policy, height_bits }))
    }

    pub fn from_spec(spec: &RealSpec, policy: PrecisionPolicy) -> Result<Arc<Self>> {
        NumberRing::new(AlgebraicNumber::from_spec(spec)?, policy)
    }

    pub fn base(&self) -> &AlgebraicNumber {
        &self.base
    }

    pub fn policy(&self) -> PrecisionPolicy {
        self.policy
    }

    pub fn modulus(&self) -> &Poly {
        self.base.poly()
    }

    pub fn is_rational(&self) -> bool {
        self.modulus().degree() == Some(1)
    }

    fn reduce(&self, p: Poly) -> Poly {
        match p.degree() {
            Some(d) if d >= self.modulus().degree().unwrap() => p.rem(self.modulus()),
            _ => p,
        }
    }

    pub fn element(self: &Arc<Self>, rep: Poly) -> Real {
        Real { ring: Arc::clone(self), rep: self.reduce(rep) }
    }

    pub fn rational(self: &Arc<Self>, q: Rational) -> Real {
        self.element(Poly::constant(q))
    }

    pub fn integer(self: &Arc<Self>, n: i64) -> Real {
        self.rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero(self: &Arc<Self>) -> Real {
        self.element(Poly::zero())
    }

    pub fn one(self: &Arc<Self>) -> Real {
        self.integer(1)
    }

    /// The base `beta` itself.
    pub fn beta(self: &Arc<Self>) -> Real {
        match self.base.as_rational() {
            Some(q) => self.rational(q),
            None => self.element(Poly::z()),
        }
    }

    pub fn beta_inv(self: &Arc<Self>) -> Real {
        self.element(self.inv_z.clone())
    }
}

/// Exact element of a [`NumberRing`].
#[derive(Clone, Debug)]
pub struct Real {
    ring: Arc<NumberRing>,
    rep: Poly,
}

impl Real {
    pub fn ring(&self) -> &Arc<NumberRing> {
        &self.ring
    }

    pub fn rep(&self) -> &Poly {
        &self.rep
    }

    fn same_ring(&self, o: &Real) {
        debug_assert!(Arc::ptr_eq(&self.ring, &o.ring), "mixing elements of different rings");
    }

    pub fn add(&self, o: &Real) -> Real {
        self.same_ring(o);
        Real { ring: Arc::clone(&self.ring), rep: self.rep.add(&o.rep) }
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.same_ring(o);
        Real { ring: Arc::clone(&self.ring), rep: self.rep.sub(&o.rep) }
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.same_ring(o);
        self.ring.element(self.rep.mul(&o.rep))
    }

    pub fn mul_rat(&self, q: &Rational) -> Real {
        Real { ring: Arc::clone(&self.ring), rep: self.rep.scale(q) }
    }

    pub fn add_int(&self, n: &BigInt) -> Real {
        let c = Poly::constant(Rational::from_integer(n.clone()));
        Real { ring: Arc::clone(&self.ring), rep: self.rep.add(&c) }
    }

    pub fn mul_beta(&self) -> Real {
        match self.ring.base.as_rational() {
            Some(q) => self.mul_rat(&q),
            None => self.ring.element(self.rep.shift_up()),
        }
    }

    pub fn div_beta(&self) -> Real {
        match self.ring.base.as_rational() {
            Some(q) => self.mul_rat(&q.recip()),
            None => self.ring.element(self.rep.mul(&self.ring.inv_z)),
        }
    }

    pub fn pow(&self, e: u32) -> Real {
        let mut acc = self.ring.one();
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

    /// Exact rational value, when the representative is constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.rep.is_constant() {
            Some(self.rep.constant_term())
        } else {
            None
        }
    }

    fn coeff_bits(&self) -> u64 {
        self.rep.coeffs().iter().map(|c| c.numer().bits() + c.denom().bits()).max().unwrap_or(0)
    }

    fn start_bits(&self) -> u32 {
        let d = self.rep.degree().unwrap_or(0) as u64;
        let extra = self.coeff_bits() + d * self.ring.height_bits + 8;
        (self.ring.policy.bits as u64 + extra).min(u32::MAX as u64 / 2) as u32
    }

    /// Rigorous enclosure of the value. Width shrinks as `bits` grows.
    pub fn enclosure(&self, bits: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(&q, bits);
        }
        let d = self.rep.degree().unwrap_or(0) as u64;
        let guard = (self.coeff_bits() + d * self.ring.height_bits + 16).min(u32::MAX as u64 / 4) as u32;
        let b = self.ring.base.enclosure(bits + guard);
        self.rep.eval_interval(&b.widen(bits + guard))
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure(64).to_f64()
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        if self.rep.is_zero() {
            return true;
        }
        if self.rep.is_constant() || self.ring.is_rational() {
            return false;
        }
        if !self.enclosure(self.ring.policy.bits).contains_zero() {
            return false;
        }
        let g = self.rep.gcd(self.ring.modulus());
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let (lo, hi) = self.ring.base.isolating_interval();
        g.count_roots(lo, hi) == 1
    }

    /// Certified floor, escalating precision up to the ring's ceiling.
    pub fn floor(&self) -> Result<BigInt> {
        if let Some(q) = self.as_rational() {
            return Ok(floor_rat(&q));
        }
        let ceiling = self.ring.policy.ceiling.max(self.start_bits());
        let mut bits = self.start_bits();
        loop {
            let e = self.enclosure(bits);
            match e.floor() {
                FloorDecision::Certain(n) => return Ok(n),
                FloorDecision::Ambiguous => {
                    let a = floor_rat(e.lo());
                    let b = floor_rat(e.hi());
                    if &b - &a <= BigInt::from(4) {
                        let mut k: BigInt = a + 1;
                        while k <= b {
                            if self.add_int(&-k.clone()).is_zero() {
                                return Ok(k);
                            }
                            k += 1;
                        }
                    }
                    if bits >= ceiling {
                        return Err(Error::Ambiguous { bits });
                    }
                    bits = bits.saturating_mul(2).min(ceiling);
                }
            }
        }
    }

    /// Certified sign comparison with another element of the same ring.
    pub fn cmp_exact(&self, o: &Real) -> Result<Ordering> {
        let d = self.sub(o);
        if let Some(q) = d.as_rational() {
            return Ok(q.cmp(&Rational::zero()));
        }
        if d.is_zero() {
            return Ok(Ordering::Equal);
        }
        let ceiling = self.ring.policy.ceiling.max(d.start_bits());
        let mut bits = d.start_bits();
        loop {
            let e = d.enclosure(bits);
            if e.lo().is_positive() {
                return Ok(Ordering::Greater);
            }
            if e.hi().is_negative() {
                return Ok(Ordering::Less);
            }
            if bits >= ceiling {
                return Err(Error::Ambiguous { bits });
            }
            bits = bits.saturating_mul(2).min(ceiling);
        }
    }

    /// Exact value when rational, otherwise an interval at `bits`.
    pub fn to_scalar(&self, bits: u32) -> super::Scalar {
        match self.as_rational() {
            Some(q) => super::Scalar::Exact(q),
            None => super::Scalar::Interval(self.enclosure(bits)),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "{}", self.enclosure(64)),
        }
    }
}
