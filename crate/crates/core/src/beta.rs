//! The beta-transformation, digit extraction and the expansion of 1.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::precision::{AlgebraicNumber, Interval, NumberRing, Poly, PrecisionPolicy, Rational, Real, RealSpec};

/// Depth up to which termination of the orbit of 1 is probed.
pub const DEFAULT_PARRY_DEPTH: usize = 512;

/// Orbit comparisons for algebraic bases are quadratic; keep them shallow.
const ALGEBRAIC_CYCLE_DEPTH: usize = 64;

/// What is known about the orbit of 1 under `T_beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParryStatus {
    /// `T^n 1 = 0`; the last nonzero digit of the greedy expansion is `last_digit`.
    Simple {
        n: usize,
        last_digit: u32,
    },
    /// The orbit of 1 cycles without reaching 0: `eps(1, beta) = pre (period)^inf`.
    Periodic {
        pre: Vec<u32>,
        period: Vec<u32>,
    },
    /// Neither termination nor a cycle was seen within `depth` steps.
    NoWithinDepth(usize),
    Unknown,
}

#[derive(Debug)]
struct OrbitState {
    /// Greedy digits of 1 computed so far.
    digits: Vec<u32>,
    /// `T^k 1` with `k = digits.len()`.
    point: Real,
    /// Previously visited points (algebraic bases only, bounded).
    visited: Vec<Real>,
    /// Exact orbit values for rational bases.
    seen: HashMap<Rational, usize>,
    status: ParryStatus,
}

/// A base `beta > 1` with its alphabet and a lazily extended expansion of 1.
pub struct BetaSystem {
    ring: Arc<NumberRing>,
    spec: RealSpec,
    alphabet_max: u32,
    parry_depth: usize,
    orbit: RwLock<OrbitState>,
}

impl fmt::Debug for BetaSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BetaSystem")
            .field("beta", &self.spec.to_string())
            .field("alphabet_max", &self.alphabet_max)
            .finish()
    }
}

impl fmt::Display for BetaSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec)
    }
}

impl BetaSystem {
    pub fn new(spec: RealSpec, policy: PrecisionPolicy) -> Result<Self> {
        let ring = NumberRing::from_spec(&spec, policy)?;
        Self::from_ring(ring, spec)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(RealSpec::parse(s)?, PrecisionPolicy::default())
    }

    pub fn parse_with(s: &str, policy: PrecisionPolicy) -> Result<Self> {
        Self::new(RealSpec::parse(s)?, policy)
    }

    pub fn from_rational(q: Rational) -> Result<Self> {
        Self::new(RealSpec::Rational(q), PrecisionPolicy::default())
    }

    pub fn integer(b: u32) -> Result<Self> {
        Self::from_rational(Rational::from_integer(BigInt::from(b)))
    }

    fn from_ring(ring: Arc<NumberRing>, spec: RealSpec) -> Result<Self> {
        let beta = ring.beta();
        if beta.cmp_exact(&ring.one())? != std::cmp::Ordering::Greater {
            return Err(Error::Domain(format!("beta must exceed 1, got {spec}")));
        }
        let floor = beta.floor()?;
        let alphabet_max = floor.to_u32().ok_or_else(|| Error::Domain(format!("beta = {spec} is too large")))?;
        let point = ring.one();
        let orbit = OrbitState {
            digits: Vec::new(),
            point: point.clone(),
            visited: vec![point],
            seen: HashMap::new(),
            status: ParryStatus::Unknown,
        };
        Ok(BetaSystem { ring, spec, alphabet_max, parry_depth: DEFAULT_PARRY_DEPTH, orbit: RwLock::new(orbit) })
    }

    pub fn with_parry_depth(mut self, depth: usize) -> Self {
        self.parry_depth = depth.max(1);
        self
    }

    pub fn ring(&self) -> &Arc<NumberRing> {
        &self.ring
    }

    pub fn spec(&self) -> &RealSpec {
        &self.spec
    }

    pub fn policy(&self) -> PrecisionPolicy {
        self.ring.policy()
    }

    /// `floor(beta)`, the largest digit.
    pub fn alphabet_max(&self) -> u32 {
        self.alphabet_max
    }

    pub fn beta(&self) -> Real {
        self.ring.beta()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.ring.base().as_rational()
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().map(|q| q.is_integer()).unwrap_or(false)
    }

    pub fn enclosure(&self, bits: u32) -> Interval {
        self.ring.base().enclosure(bits)
    }

    pub fn to_f64(&self) -> f64 {
        self.ring.base().to_f64()
    }

    pub fn ln(&self) -> f64 {
        match self.as_rational() {
            Some(q) => crate::precision::ln_rat(&q),
            None => self.to_f64().ln(),
        }
    }

    pub fn element(&self, q: &Rational) -> Real {
        self.ring.rational(q.clone())
    }

    fn check_unit(&self, x: &Real) -> Result<()> {
        let zero = self.ring.zero();
        let one = self.ring.one();
        if x.cmp_exact(&zero)?.is_lt() || x.cmp_exact(&one)?.is_gt() {
            return Err(Error::Domain(format!("x = {x} is outside [0, 1]")));
        }
        Ok(())
    }

    fn step(&self, x: &Real) -> Result<(u32, Real)> {
        let y = x.mul_beta();
        let d = y.floor()?;
        let digit = d.to_u32().ok_or_else(|| Error::Domain("digit overflow".into()))?;
        Ok((digit, y.add_int(&-d)))
    }

    /// `T x = beta x - floor(beta x)` for `x` in `[0, 1]`.
    pub fn transform(&self, x: &Real) -> Result<Real> {
        self.check_unit(x)?;
        Ok(self.step(x)?.1)
    }

    /// First `n` digits of `x` together with `T^n x`.
    pub fn orbit(&self, x: &Real, n: usize) -> Result<(Vec<u32>, Real)> {
        self.check_unit(x)?;
        let mut out = Vec::with_capacity(n);
        let mut p = x.clone();
        for _ in 0..n {
            let (d, next) = self.step(&p)?;
            out.push(d);
            p = next;
        }
        Ok((out, p))
    }

    pub fn digits(&self, x: &Real, n: usize) -> Result<Vec<u32>> {
        Ok(self.orbit(x, n)?.0)
    }

    pub fn digits_of_rational(&self, x: &Rational, n: usize) -> Result<Vec<u32>> {
        self.digits(&self.element(x), n)
    }

    /// Value of a finite word, `sum w_i beta^-i`, as an exact ring element.
    pub fn value(&self, w: &[u32]) -> Real {
        let inv = self.ring.beta_inv();
        let mut acc = self.ring.zero();
        for &d in w.iter().rev() {
            acc = acc.add(&self.ring.integer(d as i64)).mul(&inv);
        }
        acc
    }

    /// Extend the orbit of 1 to at least `n` digits, or until its fate is known.
    fn extend_orbit(&self, n: usize) -> Result<()> {
        {
            let o = self.orbit.read().unwrap();
            if o.digits.len() >= n || matches!(o.status, ParryStatus::Simple { .. } | ParryStatus::Periodic { .. }) {
                return Ok(());
            }
        }
        let mut o = self.orbit.write().unwrap();
        let rational = self.ring.is_rational();
        while o.digits.len() < n && !matches!(o.status, ParryStatus::Simple { .. } | ParryStatus::Periodic { .. }) {
            let (d, next) = self.step(&o.point)?;
            o.digits.push(d);
            let k = o.digits.len();
            if next.is_zero() {
                o.status = ParryStatus::Simple { n: k, last_digit: d };
                o.point = next;
                break;
            }
            let cycle_start = if rational {
                let key = next.as_rational().expect("rational ring");
                let hit = o.seen.get(&key).copied();
                o.seen.insert(key, k);
                hit
            } else if k <= ALGEBRAIC_CYCLE_DEPTH {
                let hit = o.visited.iter().position(|p| p.sub(&next).is_zero());
                o.visited.push(next.clone());
                hit
            } else {
                None
            };
            o.point = next;
            if let Some(i) = cycle_start {
                // T^i 1 = T^k 1: digits i+1..=k repeat forever.
                let pre = o.digits[..i].to_vec();
                let period = o.digits[i..].to_vec();
                o.status = ParryStatus::Periodic { pre, period };
                break;
            }
            if k >= self.parry_depth {
                o.status = ParryStatus::NoWithinDepth(k);
            }
        }
        Ok(())
    }

    /// Termination status of the orbit of 1, probed to the configured depth.
    pub fn simple_parry(&self) -> Result<ParryStatus> {
        self.extend_orbit(self.parry_depth)?;
        let o = self.orbit.read().unwrap();
        Ok(match &o.status {
            ParryStatus::Unknown => ParryStatus::NoWithinDepth(o.digits.len()),
            s => s.clone(),
        })
    }

    /// Greedy expansion of 1, first `n` digits.
    pub fn expansion_of_one(&self, n: usize) -> Result<Vec<u32>> {
        self.extend_orbit(n)?;
        let o = self.orbit.read().unwrap();
        Ok((0..n)
            .map(|k| match &o.status {
                ParryStatus::Simple { n: m, .. } if k >= *m => 0,
                ParryStatus::Periodic { pre, period } if k >= o.digits.len() => period[(k - pre.len()) % period.len()],
                _ => o.digits[k],
            })
            .collect())
    }

    /// `(preperiod, period)` of the quasi-greedy expansion of 1, when it is
    /// known to be eventually periodic.
    pub fn eps_star_periodic(&self) -> Result<Option<(Vec<u32>, Vec<u32>)>> {
        self.extend_orbit(self.parry_depth)?;
        let o = self.orbit.read().unwrap();
        Ok(match &o.status {
            ParryStatus::Simple { n, .. } => {
                let mut w = o.digits[..*n].to_vec();
                *w.last_mut().unwrap() -= 1;
                Some((Vec::new(), w))
            }
            ParryStatus::Periodic { pre, period } => Some((pre.clone(), period.clone())),
            _ => None,
        })
    }

    /// First `n` digits of the quasi-greedy expansion `eps*(1, beta)`.
    pub fn epsilon_star(&self, n: usize) -> Result<Vec<u32>> {
        self.extend_orbit(n)?;
        let o = self.orbit.read().unwrap();
        match &o.status {
            ParryStatus::Simple { n: m, .. } => {
                let m = *m;
                Ok((0..n)
                    .map(|k| {
                        let j = k % m;
                        if j == m - 1 {
                            o.digits[j] - 1
                        } else {
                            o.digits[j]
                        }
                    })
                    .collect())
            }
            ParryStatus::Periodic { pre, period } => Ok((0..n)
                .map(|k| if k < pre.len() { pre[k] } else { period[(k - pre.len()) % period.len()] })
                .collect()),
            _ => {
                if o.digits.len() < n {
                    return Err(Error::UndecidedParry(format!(
                        "only {} digits of eps*(1, {}) available",
                        o.digits.len(),
                        self.spec
                    )));
                }
                Ok(o.digits[..n].to_vec())
            }
        }
    }

    /// Defining polynomial of the truncation `beta_N`:
    /// `z^N - sum_{j<=N} eps*_j z^(N-j)`.
    pub fn truncation_poly(&self, n: usize) -> Result<Poly> {
        let eps = self.epsilon_star(n)?;
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        for (j, &e) in eps.iter().enumerate() {
            c[n - 1 - j] = -Rational::from_integer(BigInt::from(e));
        }
        Ok(Poly::new(c))
    }

    /// The truncation root `beta_N` as an algebraic number.
    pub fn beta_truncation(&self, n: usize) -> Result<AlgebraicNumber> {
        if n == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        let eps = self.epsilon_star(n)?;
        if eps[n - 1] == 0 {
            return Err(Error::InvalidTruncation { n });
        }
        if eps.iter().map(|&e| e as u64).sum::<u64>() <= 1 {
            return Err(Error::DegenerateRoot { n });
        }
        let poly = self.truncation_poly(n)?;
        let hi = Rational::from_integer(BigInt::from(self.alphabet_max as u64 + 1));
        AlgebraicNumber::new(&poly, &Rational::one(), &hi)
    }

    /// The system with base `beta_N`.
    pub fn truncated_system(&self, n: usize) -> Result<BetaSystem> {
        let root = self.beta_truncation(n)?;
        let spec = match root.as_rational() {
            Some(q) => RealSpec::Rational(q),
            None => {
                let (lo, hi) = root.isolating_interval();
                RealSpec::Root { poly: root.poly().clone(), lo: lo.clone(), hi: hi.clone() }
            }
        };
        let ring = NumberRing::new(root, self.policy())?;
        BetaSystem::from_ring(ring, spec)
    }

    /// Smallest `N >= 1` whose truncation is valid (`eps*_N > 0`, `beta_N > 1`).
    pub fn default_truncation(&self) -> Result<usize> {
        for n in 1..=self.parry_depth {
            match self.beta_truncation(n) {
                Ok(_) => return Ok(n),
                Err(Error::InvalidTruncation { .. }) | Err(Error::DegenerateRoot { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Domain(format!("no valid truncation of {} within depth", self.spec)))
    }

    /// `|x - y| <= bound` style checks on orbit reconstruction.
    pub fn reconstruct(&self, w: &[u32], tail: &Real) -> Real {
        let n = w.len() as u32;
        self.value(w).add(&tail.mul(&self.ring.beta_inv().pow(n)))
    }
}
