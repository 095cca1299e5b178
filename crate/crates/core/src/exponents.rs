//! Joint zero-runs of a pair of expansions and the exponents they encode.
//!
//! Positions are 1-indexed: the run "after position `n`" starts at digit
//! `eps_{n+1}`.

use num_bigint::{BigInt, BigUint, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::beta::BetaSystem;
use crate::error::{Error, Result};
use crate::precision::{ln_big, Rational, Real};

/// Length of the zero block right after position `n`, and whether it runs
/// into the end of the stream.
pub fn zero_run<D: Copy + Default + PartialEq>(ds: &[D], n: usize) -> (usize, bool) {
    let zero = D::default();
    let start = n.min(ds.len());
    let k = ds[start..].iter().take_while(|&&d| d == zero).count();
    (k, start + k == ds.len())
}

/// `runs[i]` is the zero-run length starting at 0-based index `i`.
fn backward_runs<D: Copy + Default + PartialEq>(ds: &[D]) -> Vec<usize> {
    let zero = D::default();
    let mut r = vec![0usize; ds.len() + 1];
    for i in (0..ds.len()).rev() {
        r[i] = if ds[i] == zero { r[i + 1] + 1 } else { 0 };
    }
    r
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub pairs: Vec<(usize, usize)>,
    pub depth: usize,
    pub filtered: bool,
    /// The last pair touches the truncation horizon; its `m` is a lower bound.
    pub provisional_last: bool,
}

impl RunRecord {
    pub fn gaps(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|(n, m)| m - n)
    }
}

/// Greedy joint zero-block record of `(x, y)` up to `depth` digits.
pub fn run_records<D: Copy + Default + PartialEq>(x: &[D], y: &[D], depth: usize, filter: bool) -> RunRecord {
    let depth = depth.min(x.len()).min(y.len());
    let rx = backward_runs(&x[..depth]);
    let ry = backward_runs(&y[..depth]);
    let mut pairs = Vec::new();
    let mut provisional = false;
    let mut n = 1;
    while n < depth {
        let (a, b) = (rx[n], ry[n]);
        if a > 0 && b > 0 {
            let m = n + a.min(b);
            pairs.push((n, m));
            if m >= depth {
                provisional = true;
                break;
            }
            n = m + 1;
        } else {
            n += 1;
        }
    }
    let mut rec = RunRecord { pairs, depth, filtered: false, provisional_last: provisional };
    if filter {
        rec = filter_record(&rec);
    }
    rec
}

/// Subsequence with non-decreasing gaps, starting from the first entry.
pub fn filter_record(r: &RunRecord) -> RunRecord {
    let mut kept: Vec<(usize, usize)> = Vec::new();
    let mut last_kept_is_last = false;
    for (i, &(n, m)) in r.pairs.iter().enumerate() {
        let keep = match kept.last() {
            None => true,
            Some(&(pn, pm)) => m - n >= pm - pn,
        };
        if keep {
            kept.push((n, m));
            last_kept_is_last = i + 1 == r.pairs.len();
        }
    }
    RunRecord { pairs: kept, depth: r.depth, filtered: true, provisional_last: r.provisional_last && last_kept_is_last }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub v_est: f64,
    pub vhat_est: f64,
    pub v_global: f64,
    pub vhat_global: f64,
    pub depth: usize,
    pub records: RunRecord,
}

fn ratios(r: &RunRecord, from: usize) -> (f64, f64) {
    let p = &r.pairs;
    let v = p[from..].iter().map(|&(n, m)| (m - n) as f64 / n as f64).fold(0.0, f64::max);
    // v-hat needs n_{k+1}: skip the final entry (and so any provisional one).
    let vhat = (from..p.len().saturating_sub(1))
        .map(|k| (p[k].1 - p[k].0) as f64 / p[k + 1].0 as f64)
        .fold(f64::INFINITY, f64::min);
    (v, if vhat.is_finite() { vhat } else { 0.0 })
}

/// Finite-depth `limsup (m_k - n_k)/n_k` and `liminf (m_k - n_k)/n_{k+1}`,
/// over the last half of the record and over all of it.
pub fn estimate_exponents(r: &RunRecord) -> ExponentEstimate {
    if r.pairs.is_empty() {
        return ExponentEstimate {
            v_est: 0.0,
            vhat_est: 0.0,
            v_global: 0.0,
            vhat_global: 0.0,
            depth: r.depth,
            records: r.clone(),
        };
    }
    let len = r.pairs.len();
    let window = len.div_ceil(2);
    let (v_est, vhat_est) = ratios(r, len - window);
    let (v_global, vhat_global) = ratios(r, 0);
    ExponentEstimate { v_est, vhat_est, v_global, vhat_global, depth: r.depth, records: r.clone() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitStatistics {
    pub trials: usize,
    pub mean_hits: f64,
    pub std_err: f64,
    pub expected: f64,
}

/// Orbit of `x` under one system; yields `ln T^n x` for `n = 1..=steps`
/// (`-inf` once the orbit hits 0).
struct Orbit<'a> {
    sys: &'a BetaSystem,
    fast: Option<(BigInt, BigInt)>,
    num: BigInt,
    den: BigInt,
    point: Option<Real>,
}

impl<'a> Orbit<'a> {
    fn new(sys: &'a BetaSystem, x: &Rational) -> Self {
        match sys.as_rational() {
            Some(b) => Orbit {
                sys,
                fast: Some((b.numer().clone(), b.denom().clone())),
                num: x.numer().clone(),
                den: x.denom().clone(),
                point: None,
            },
            None => {
                Orbit { sys, fast: None, num: BigInt::default(), den: BigInt::default(), point: Some(sys.element(x)) }
            }
        }
    }

    fn next_ln(&mut self) -> Result<f64> {
        match &self.fast {
            Some((p, q)) => {
                // x = num/den, beta x = p num / (q den)
                let n = &self.num * p;
                self.den = &self.den * q;
                let d = num_integer::Integer::div_floor(&n, &self.den);
                self.num = n - d * &self.den;
                Ok(ln_ratio(&self.num, &self.den))
            }
            None => {
                let x = self.point.take().expect("orbit point");
                let t = self.sys.transform(&x)?;
                let l = if t.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    let e = t.enclosure(self.sys.policy().bits);
                    crate::precision::ln_rat(&e.mid())
                };
                self.point = Some(t);
                Ok(l)
            }
        }
    }
}

fn ln_ratio(num: &BigInt, den: &BigInt) -> f64 {
    if num.sign() == Sign::NoSign {
        return f64::NEG_INFINITY;
    }
    ln_big(num) - ln_big(den)
}

fn random_dyadic(rng: &mut ChaCha8Rng, bits: usize) -> Rational {
    let words = bits.div_ceil(32);
    let mut digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    let extra = words * 32 - bits;
    if extra > 0 {
        let last = digits.len() - 1;
        digits[last] >>= extra;
    }
    let n = BigUint::new(digits);
    Rational::new(BigInt::from(n), BigInt::from(1u8) << bits)
}

/// Monte Carlo mean of `#{n <= steps : T^n x < beta1^(-n v), T^n y < beta2^(-n v)}`
/// over uniform random pairs, with the analytic `sum (beta1 beta2)^(-n v)`.
pub fn hit_statistics(
    sys1: &BetaSystem,
    sys2: &BetaSystem,
    v: f64,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<HitStatistics> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if v.is_nan() || v < 0.0 {
        return Err(Error::Domain(format!("v must be nonnegative, got {v}")));
    }
    let (l1, l2) = (sys1.ln(), sys2.ln());
    let bits1 = 64 + (steps as f64 * l1 / std::f64::consts::LN_2).ceil() as usize;
    let bits2 = 64 + (steps as f64 * l2 / std::f64::consts::LN_2).ceil() as usize;
    let counts: Vec<Result<u32>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let x = random_dyadic(&mut rng, bits1);
            let y = random_dyadic(&mut rng, bits2);
            let mut ox = Orbit::new(sys1, &x);
            let mut oy = Orbit::new(sys2, &y);
            let mut hits = 0;
            for n in 1..=steps {
                let (lx, ly) = (ox.next_ln()?, oy.next_ln()?);
                let t = n as f64 * v;
                if lx < -t * l1 && ly < -t * l2 {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect();
    let counts: Vec<f64> = counts.into_iter().map(|c| c.map(f64::from)).collect::<Result<_>>()?;
    let t = trials as f64;
    let mean = counts.iter().sum::<f64>() / t;
    let var = if trials > 1 { counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (t - 1.0) } else { 0.0 };
    let expected = (1..=steps).map(|n| (-(n as f64) * v * (l1 + l2)).exp()).sum();
    Ok(HitStatistics { trials, mean_hits: mean, std_err: (var / t).sqrt(), expected })
}
