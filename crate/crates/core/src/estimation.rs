//! Single-generation covering counts and blocked-word counts.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use serde::{Serialize, Serializer};

use crate::beta::BetaSystem;
use crate::error::{Error, Result};
use crate::precision::ln_big;
use crate::symbolic::CountingAutomaton;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Squares of side `beta2^-n(1+v)`.
    SmallSquare,
    /// Squares of side `beta1^-n(1+v)`.
    LargeSquare,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small-square" | "small" => Ok(Strategy::SmallSquare),
            "large-square" | "large" => Ok(Strategy::LargeSquare),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

fn as_decimal<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_str_radix(10))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub n: usize,
    pub strategy: Strategy,
    #[serde(serialize_with = "as_decimal")]
    pub count: BigUint,
    pub exponent: f64,
}

fn ln_biguint(n: &BigUint) -> f64 {
    ln_big(&BigInt::from(n.clone()))
}

fn count(sys: &BetaSystem, n: usize) -> Result<BigUint> {
    CountingAutomaton::for_length(sys, n)?.count(n)
}

/// `ceil((b2/b1)^e)`: exact for rational bases and integral `e`.
fn ratio_ceil(b1: &BetaSystem, b2: &BetaSystem, e: f64) -> Result<BigUint> {
    if let (Some(q1), Some(q2)) = (b1.as_rational(), b2.as_rational()) {
        if (e - e.round()).abs() < 1e-12 && e.round() <= 1e6 {
            let r: BigRational = num_traits::pow(q2 / q1, e.round() as usize);
            let (q, rem) = r.numer().div_rem(r.denom());
            let c = if rem.is_zero() { q } else { q + 1 };
            return Ok(c.to_biguint().unwrap_or_default());
        }
    }
    let x = e * (b2.ln() - b1.ln());
    if x < 700.0 {
        return BigUint::from_f64(x.exp().ceil()).ok_or_else(|| Error::Domain("ratio is not finite".into()));
    }
    // 2^(x / ln 2) with a 52-bit mantissa
    let bits = x / std::f64::consts::LN_2;
    let shift = bits.floor() as u64 - 52;
    let mant = BigUint::from_f64(2f64.powf(bits - shift as f64).ceil()).unwrap();
    Ok(mant << shift)
}

/// Generation-`n` covering count for `W(v)` and its exponent.
pub fn cover_w(b1: &BetaSystem, b2: &BetaSystem, v: f64, n: usize, strategy: Strategy) -> Result<CoverReport> {
    if v.is_nan() || v <= 0.0 || !v.is_finite() {
        return Err(Error::Domain(format!("need 0 < v < inf, got {v}")));
    }
    if n == 0 {
        return Err(Error::Domain("generation must be at least 1".into()));
    }
    let base = count(b1, n)? * count(b2, n)?;
    let e = n as f64 * (1.0 + v);
    let (count, side) = match strategy {
        Strategy::SmallSquare => (base * ratio_ceil(b1, b2, e)?, b2.ln()),
        Strategy::LargeSquare => (base, b1.ln()),
    };
    let exponent = ln_biguint(&count) / (e * side);
    Ok(CoverReport { n, strategy, count, exponent })
}

/// The smaller exponent of the two strategies.
pub fn cover_w_min(b1: &BetaSystem, b2: &BetaSystem, v: f64, n: usize) -> Result<CoverReport> {
    let a = cover_w(b1, b2, v, n, Strategy::SmallSquare)?;
    let b = cover_w(b1, b2, v, n, Strategy::LargeSquare)?;
    Ok(if b.exponent < a.exponent { b } else { a })
}

fn check_profile(profile: &[(usize, usize)], n: usize) -> Result<()> {
    let mut floor = 0;
    for (i, &(a, b)) in profile.iter().enumerate() {
        if a < floor || (i > 0 && a == floor) || b <= a || b > n {
            return Err(Error::PreconditionViolated(format!(
                "profile must satisfy n_1 < m_1 < n_2 < ... with m_k <= {n}; entry {} is ({a}, {b})",
                i + 1
            )));
        }
        floor = b;
    }
    Ok(())
}

/// Words of length `n` with digits `a+1..=b` forced to zero for each `(a, b)`.
pub fn count_blocked_single(sys: &BetaSystem, profile: &[(usize, usize)], n: usize) -> Result<BigUint> {
    check_profile(profile, n)?;
    let aut = CountingAutomaton::for_length(sys, n)?;
    let k = aut.states();
    let mut forced = vec![false; n];
    for &(a, b) in profile {
        forced[a..b].iter_mut().for_each(|f| *f = true);
    }
    let mut cur = vec![BigUint::zero(); k];
    cur[0] = BigUint::one();
    for &zero in &forced {
        let mut next = vec![BigUint::zero(); k];
        for (s, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let top = if zero { 0 } else { sys.alphabet_max() };
            for d in 0..=top {
                if let Some(t) = aut.step(s, d) {
                    next[t] += c;
                }
            }
        }
        cur = next;
    }
    Ok(cur.into_iter().sum())
}

/// Pairs `(w, u)` of length-`n` words sharing the forced zero blocks.
pub fn count_blocked(b1: &BetaSystem, b2: &BetaSystem, profile: &[(usize, usize)], n: usize) -> Result<BigUint> {
    Ok(count_blocked_single(b1, profile, n)? * count_blocked_single(b2, profile, n)?)
}

/// Natural log of the closed-form upper bound on `count_blocked`.
pub fn ln_blocked_bound(b1: &BetaSystem, b2: &BetaSystem, profile: &[(usize, usize)], n: usize) -> Result<f64> {
    check_profile(profile, n)?;
    let k = profile.len() as f64;
    let blocked: usize = profile.iter().map(|&(a, b)| b - a).sum();
    let (l1, l2) = (b1.ln(), b2.ln());
    let l = l1 / l2;
    let c = (b1.to_f64() - 1.0).ln();
    Ok(-2.0 * k * c + k * (1.0 + l) * l2 + (n - blocked) as f64 * (1.0 + l) * l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::dim_w;
    use crate::symbolic::{enumerate_words, DEFAULT_ENUM_BUDGET};

    fn b(n: u32) -> BetaSystem {
        BetaSystem::integer(n).unwrap()
    }

    fn phi() -> BetaSystem {
        BetaSystem::parse("phi").unwrap()
    }

    #[test]
    fn cover_examples() {
        let s = cover_w(&b(2), &b(5), 1.0, 6, Strategy::SmallSquare).unwrap();
        let oracle = (3.0 - 2f64.ln() / 5f64.ln()) / 2.0;
        assert!((s.exponent - oracle).abs() < 0.05, "{s:?}");
        assert_eq!(s.count, BigUint::from(64u64 * 15625 * 59605u64));
        let l = cover_w(&b(2), &b(5), 1.0, 6, Strategy::LargeSquare).unwrap();
        let lr = 2f64.ln() / 5f64.ln();
        assert!((l.exponent - (1.0 + lr) / (2.0 * lr)).abs() < 1e-9);
        for st in [Strategy::SmallSquare, Strategy::LargeSquare] {
            assert!((cover_w(&b(2), &b(2), 1.0, 8, st).unwrap().exponent - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn min_cover_approaches_dim_w() {
        let w = dim_w(&b(2), &b(5), 1.0).unwrap().value;
        let errs: Vec<f64> = (4..=8).map(|n| (cover_w_min(&b(2), &b(5), 1.0, n).unwrap().exponent - w).abs()).collect();
        assert!(errs.windows(2).all(|p| p[1] <= p[0] + 1e-12), "{errs:?}");
        assert!(errs[4] < 0.05);
    }

    #[test]
    fn huge_ratio_stays_finite() {
        let r = cover_w(&b(2), &b(9), 3.0, 400, Strategy::SmallSquare).unwrap();
        assert!(r.exponent.is_finite() && r.exponent > 0.0 && r.exponent <= 2.0);
    }

    #[test]
    fn blocked_examples() {
        assert_eq!(count_blocked(&b(2), &b(2), &[(2, 4)], 6).unwrap(), BigUint::from(256u32));
        assert_eq!(count_blocked(&b(2), &b(2), &[], 5).unwrap(), BigUint::from(1024u32));
        assert!(matches!(count_blocked(&b(2), &b(2), &[(3, 4), (4, 5)], 6), Err(Error::PreconditionViolated(_))));
        assert!(matches!(count_blocked(&b(2), &b(2), &[(2, 7)], 6), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn blocked_golden_brute_force() {
        let p = phi();
        let words = enumerate_words(&p, 6, DEFAULT_ENUM_BUDGET).unwrap();
        let single = words.iter().filter(|w| w[2] == 0 && w[3] == 0).count() as u64;
        let got = count_blocked(&p, &p, &[(2, 4)], 6).unwrap();
        assert_eq!(got, BigUint::from(single * single));
        let bound = ln_blocked_bound(&p, &p, &[(2, 4)], 6).unwrap();
        assert!(ln_biguint(&got) <= bound);
    }

    #[test]
    fn blocked_monotone() {
        let p = phi();
        let c0 = count_blocked(&p, &b(3), &[], 12).unwrap();
        let c1 = count_blocked(&p, &b(3), &[(1, 3)], 12).unwrap();
        let c2 = count_blocked(&p, &b(3), &[(1, 3), (6, 9)], 12).unwrap();
        assert!(c2 <= c1 && c1 <= c0);
        let w = CountingAutomaton::periodic(&p).unwrap().count(12).unwrap();
        assert_eq!(count_blocked(&p, &p, &[], 12).unwrap(), &w * &w);
    }
}
