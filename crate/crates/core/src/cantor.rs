//! The two-dimensional Cantor construction: target sequences, per-level
//! bookkeeping, digit-stream assembly and the mass distribution.
//!
//! Every slot of the templates is a word admissible for the truncated base
//! `beta_{i,N}`, followed by the separator `0^N 1 0^N`. A slot word padded
//! with `0^N` is full for `beta_i`, so assembled streams are admissible.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::beta::BetaSystem;
use crate::dimension::compare_power;
use crate::error::{Error, Result};
use crate::symbolic::{format_word, CountingAutomaton};

/// Default cap on the length of an assembled digit stream.
pub const DEFAULT_DIGIT_BUDGET: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetSequences {
    pub v: f64,
    pub vhat: f64,
    pub scale: u64,
    pub n: Vec<u64>,
    pub m: Vec<u64>,
}

impl TargetSequences {
    pub fn levels(&self) -> usize {
        self.n.len()
    }

    pub fn gap(&self, k: usize) -> u64 {
        self.m[k] - self.n[k]
    }
}

fn check_targets(v: f64, vhat: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::RegimeUnsupported("v = inf has nothing to construct".into()));
    }
    if v.is_nan() || v <= 0.0 || vhat.is_nan() || vhat < 0.0 {
        return Err(Error::Domain(format!("need v > 0 and vhat >= 0, got v = {v}, vhat = {vhat}")));
    }
    if vhat > v / (1.0 + v) {
        return Err(Error::RegimeUnsupported(format!("vhat = {vhat} exceeds v/(1+v) = {}", v / (1.0 + v))));
    }
    Ok(())
}

/// Up to `levels` terms; stops early (without error) when the next term
/// would overflow `u64`.
fn targets_upto(v: f64, vhat: f64, levels: usize, scale: u64) -> Result<TargetSequences> {
    check_targets(v, vhat)?;
    let mut n = Vec::with_capacity(levels);
    let mut m = Vec::with_capacity(levels);
    let m_of = |nk: u64| -> Option<u64> {
        let x = ((1.0 + v) * nk as f64).floor() + 1.0;
        (x < 1.8e19).then_some(x as u64)
    };
    for k in 1..=levels {
        let nk = if vhat == 0.0 {
            let e = 1u32.checked_shl(k as u32).filter(|&e| e < 64);
            match e.and_then(|e| 1u64.checked_shl(e)).and_then(|p| p.checked_mul(scale)) {
                Some(x) => x,
                None => break,
            }
        } else if k == 1 {
            scale
        } else {
            let x = (v / vhat * *n.last().unwrap() as f64).floor() + 2.0;
            if x >= 1.8e19 {
                break;
            }
            x as u64
        };
        let Some(mk) = m_of(nk) else { break };
        n.push(nk);
        m.push(mk);
    }
    Ok(TargetSequences { v, vhat, scale, n, m })
}

/// `n_1 = 1, n_{k+1} = floor((v/vhat) n_k) + 2` (or `n_k = 2^(2^k)` when
/// `vhat = 0`) and `m_k = floor((1+v) n_k) + 1`.
pub fn target_sequences(v: f64, vhat: f64, levels: usize) -> Result<TargetSequences> {
    let t = targets_upto(v, vhat, levels, 1)?;
    if t.levels() < levels {
        return Err(Error::BudgetExceeded(format!(
            "n_{} does not fit in 64 bits; at most {} levels are representable",
            t.levels() + 1,
            t.levels()
        )));
    }
    Ok(t)
}

/// `log_{b1} b2`, exact when it is a small-denominator rational.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LogRatio {
    Exact { p: u64, q: u64 },
    Approx(f64),
}

impl LogRatio {
    pub fn of(b1: &BetaSystem, b2: &BetaSystem) -> Result<Self> {
        let x = b2.ln() / b1.ln();
        for q in 1..=64u64 {
            let p = (x * q as f64).round();
            if p < 1.0 || ((p / q as f64) - x).abs() > 1e-9 {
                continue;
            }
            // b1^(p/q) = b2  <=>  b1^(1+v) = b2 with v = p/q - 1
            let v = p / q as f64 - 1.0;
            if compare_power(b1, b2, v).ok() == Some(std::cmp::Ordering::Equal) {
                return Ok(LogRatio::Exact { p: p as u64, q });
            }
        }
        Ok(LogRatio::Approx(x))
    }

    pub fn value(&self) -> f64 {
        match *self {
            LogRatio::Exact { p, q } => p as f64 / q as f64,
            LogRatio::Approx(x) => x,
        }
    }

    /// `floor(h * log_{b1} b2)`.
    pub fn floor_mul(&self, h: u64) -> Result<u64> {
        match *self {
            LogRatio::Exact { p, q } => {
                let x = (h as u128 * p as u128) / q as u128;
                x.to_u64().ok_or_else(|| Error::BudgetExceeded("level length overflow".into()))
            }
            LogRatio::Approx(x) => {
                let y = h as f64 * x;
                if (y - y.round()).abs() < 1e-9 * y.max(1.0) {
                    return Err(Error::Ambiguous { bits: 53 });
                }
                Ok(y.floor() as u64)
            }
        }
    }
}

/// Bookkeeping integers of one level. `t, r, t_bar, r_bar` describe the
/// passage from level `k-1` to level `k` (all zero at level 1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Level {
    pub n: u64,
    pub m: u64,
    pub l: u64,
    pub h: u64,
    pub h_tilde: u64,
    pub t: u64,
    pub r: u64,
    pub t_bar: u64,
    pub r_bar: u64,
    pub t_tilde: u64,
    pub r_tilde: u64,
}

impl Level {
    pub fn gap(&self) -> u64 {
        self.m - self.n
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSpec {
    pub sep: usize,
    pub targets: TargetSequences,
    pub log_ratio: LogRatio,
    /// `log_{b2} b1 > (vhat/v)(1+v)`.
    pub condition_holds: bool,
    pub levels: Vec<Level>,
}

impl LevelSpec {
    /// `2N + 1`.
    pub fn block(&self) -> u64 {
        2 * self.sep as u64 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelOptions {
    /// Reject parameters violating the log condition.
    pub enforce_condition: bool,
    /// Largest factor tried for `n_1` when a level is not sparse enough.
    pub max_scale: u64,
}

impl Default for LevelOptions {
    fn default() -> Self {
        LevelOptions { enforce_condition: true, max_scale: 64 }
    }
}

fn overflow() -> Error {
    Error::BudgetExceeded("level length overflow".into())
}

fn levels_for(seq: &TargetSequences, ratio: LogRatio, sep: usize) -> Result<std::result::Result<Vec<Level>, usize>> {
    let s = 2 * sep as u64 + 1;
    let mut out: Vec<Level> = Vec::with_capacity(seq.levels());
    for k in 0..seq.levels() {
        let (n, m) = (seq.n[k], seq.m[k]);
        let gap = m - n;
        let mut lv = Level { n, m, ..Default::default() };
        if k == 0 {
            lv.l = n + s;
        } else {
            let prev = &out[k - 1];
            let pg = prev.gap();
            let d = n - prev.m;
            lv.t = d / pg;
            lv.r = d % pg;
            lv.l = prev.h + lv.t.checked_mul(pg + s).ok_or_else(overflow)? + lv.r + s;
            let room = lv.l as i128 - prev.h_tilde as i128 - s as i128;
            if room < 0 {
                return Ok(Err(k + 1));
            }
            lv.t_bar = room as u64 / (pg + s);
            lv.r_bar = room as u64 % (pg + s);
        }
        lv.h = lv.l.checked_add(gap + s).ok_or_else(overflow)?;
        lv.h_tilde = ratio.floor_mul(lv.h)?.checked_add(s).ok_or_else(overflow)?;
        let extra = lv.h_tilde - lv.h - s;
        lv.t_tilde = extra / (gap + s);
        lv.r_tilde = extra % (gap + s);
        out.push(lv);
    }
    Ok(Ok(out))
}

/// Smallest `N >= 1` valid for both systems.
pub fn default_separator(b1: &BetaSystem, b2: &BetaSystem) -> Result<usize> {
    let mut n = b1.default_truncation()?.max(b2.default_truncation()?);
    loop {
        if b1.beta_truncation(n).is_ok() && b2.beta_truncation(n).is_ok() {
            return Ok(n);
        }
        n += 1;
        if n > 4096 {
            return Err(Error::Domain("no common truncation depth".into()));
        }
    }
}

pub fn log_condition(b1: &BetaSystem, b2: &BetaSystem, v: f64, vhat: f64) -> bool {
    let l = b1.ln() / b2.ln();
    l > vhat / v * (1.0 + v) + 1e-12
}

/// All bookkeeping integers for `seq`, repairing sparsity by scaling `n_1`.
pub fn level_spec(
    seq: &TargetSequences,
    b1: &BetaSystem,
    b2: &BetaSystem,
    sep: usize,
    opts: LevelOptions,
) -> Result<LevelSpec> {
    if sep == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    b1.beta_truncation(sep)?;
    b2.beta_truncation(sep)?;
    if compare_power(b1, b2, 0.0)?.is_gt() {
        return Err(Error::Domain(format!("need beta2 >= beta1, got {b1} and {b2}")));
    }
    let holds = log_condition(b1, b2, seq.v, seq.vhat);
    if opts.enforce_condition && !holds {
        return Err(Error::ConditionViolated(format!(
            "log_b2(b1) = {:.6} <= (vhat/v)(1+v) = {:.6}",
            b1.ln() / b2.ln(),
            seq.vhat / seq.v * (1.0 + seq.v)
        )));
    }
    let ratio = LogRatio::of(b1, b2)?;
    let mut first_bad = None;
    for c in 1..=opts.max_scale.max(1) {
        let scaled = if c == seq.scale {
            seq.clone()
        } else {
            let t = targets_upto(seq.v, seq.vhat, seq.levels(), c)?;
            if t.levels() < seq.levels() {
                break;
            }
            t
        };
        match levels_for(&scaled, ratio, sep)? {
            Ok(levels) => {
                return Ok(LevelSpec { sep, targets: scaled, log_ratio: ratio, condition_holds: holds, levels })
            }
            Err(k) => {
                first_bad.get_or_insert(k);
            }
        }
    }
    Err(Error::SparsityViolated { level: first_bad.unwrap_or(1) })
}

/// Which coordinate a slot belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    X,
    Y,
}

/// Supplies the free words of the templates.
pub trait SlotFiller {
    fn fill(&mut self, coord: Coord, aut: &CountingAutomaton, len: usize) -> Vec<u8>;
}

/// Fills every slot with zeros: the lexicographically smallest point.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroFiller;

impl SlotFiller for ZeroFiller {
    fn fill(&mut self, _: Coord, _: &CountingAutomaton, len: usize) -> Vec<u8> {
        vec![0; len]
    }
}

/// Rows kept in the completion-count table; later rows are the Perron limit.
const TABLE_ROWS: usize = 256;

/// Uniformly random admissible slot words from a seeded stream.
pub struct RandomFiller {
    rng: ChaCha8Rng,
    tables: HashMap<Vec<Vec<u64>>, Vec<Vec<f64>>>,
}

impl RandomFiller {
    pub fn new(seed: u64) -> Self {
        RandomFiller { rng: ChaCha8Rng::seed_from_u64(seed), tables: HashMap::new() }
    }
}

/// `t[r][s]`: normalized number of admissible continuations of length `r` from state `s`.
fn completion_table(aut: &CountingAutomaton) -> Vec<Vec<f64>> {
    let m = aut.matrix();
    let k = m.len();
    let mut rows = vec![vec![1.0; k]];
    for _ in 0..TABLE_ROWS {
        let prev = rows.last().unwrap();
        let mut row: Vec<f64> = (0..k).map(|s| m[s].iter().zip(prev).map(|(&c, &p)| c as f64 * p).sum()).collect();
        let mx = row.iter().cloned().fold(0.0, f64::max);
        row.iter_mut().for_each(|x| *x /= mx);
        rows.push(row);
    }
    rows
}

impl SlotFiller for RandomFiller {
    fn fill(&mut self, _: Coord, aut: &CountingAutomaton, len: usize) -> Vec<u8> {
        let key = aut.matrix();
        let table = self.tables.entry(key).or_insert_with(|| completion_table(aut));
        let mut out = Vec::with_capacity(len);
        let mut s = 0;
        for i in 0..len {
            let rem = (len - i - 1).min(TABLE_ROWS);
            let row = &table[rem];
            let mut opts: Vec<(u8, usize, f64)> = Vec::with_capacity(4);
            let mut d = 0u32;
            while let Some(t) = aut.step(s, d) {
                opts.push((d as u8, t, row[t]));
                d += 1;
            }
            let total: f64 = opts.iter().map(|o| o.2).sum();
            let mut u = self.rng.gen::<f64>() * total;
            let mut pick = opts[opts.len() - 1];
            for o in &opts {
                if u < o.2 {
                    pick = *o;
                    break;
                }
                u -= o.2;
            }
            out.push(pick.0);
            s = pick.1;
        }
        out
    }
}

/// Digits of a point of the Cantor set, to `levels` levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledPoint {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub levels: usize,
}

struct Assembler<'a> {
    aut: &'a CountingAutomaton,
    coord: Coord,
    sep: usize,
    out: Vec<u8>,
}

impl Assembler<'_> {
    fn separator(&mut self) {
        self.out.extend(std::iter::repeat_n(0, self.sep));
        self.out.push(1);
        self.out.extend(std::iter::repeat_n(0, self.sep));
    }

    fn slot(&mut self, filler: &mut dyn SlotFiller, len: u64) -> Result<()> {
        let len = len as usize;
        let w = filler.fill(self.coord, self.aut, len);
        if w.len() != len {
            return Err(Error::SlotLengthMismatch { expected: len, got: w.len() });
        }
        let digits: Vec<u32> = w.iter().map(|&d| d as u32).collect();
        if !self.aut.accepts(&digits) {
            return Err(Error::NotAdmissible { word: format_word(&digits), context: " for the truncated base".into() });
        }
        self.out.extend_from_slice(&w);
        self.separator();
        Ok(())
    }

    fn zeros(&mut self, len: u64) {
        self.out.extend(std::iter::repeat_n(0, len as usize));
        self.separator();
    }
}

/// Truncated systems and their automata for one construction.
pub struct Slots {
    pub sys1: BetaSystem,
    pub sys2: BetaSystem,
    pub aut1: CountingAutomaton,
    pub aut2: CountingAutomaton,
}

impl Slots {
    pub fn new(b1: &BetaSystem, b2: &BetaSystem, sep: usize) -> Result<Self> {
        let sys1 = b1.truncated_system(sep)?;
        let sys2 = b2.truncated_system(sep)?;
        let aut1 = CountingAutomaton::periodic(&sys1)?;
        let aut2 = CountingAutomaton::periodic(&sys2)?;
        Ok(Slots { sys1, sys2, aut1, aut2 })
    }
}

/// Number of levels whose streams fit in `budget` digits.
pub fn levels_within(spec: &LevelSpec, budget: usize) -> usize {
    spec.levels.iter().take_while(|l| l.h_tilde.max(l.h) <= budget as u64).count()
}

/// Assemble the digits of a point of the Cantor set through `levels` levels.
pub fn sample_point(
    spec: &LevelSpec,
    slots: &Slots,
    filler: &mut dyn SlotFiller,
    levels: usize,
) -> Result<SampledPoint> {
    let levels = levels.min(spec.levels.len());
    let last = &spec.levels[levels.max(1) - 1];
    let mut x =
        Assembler { aut: &slots.aut1, coord: Coord::X, sep: spec.sep, out: Vec::with_capacity(last.h_tilde as usize) };
    let mut y =
        Assembler { aut: &slots.aut2, coord: Coord::Y, sep: spec.sep, out: Vec::with_capacity(last.h as usize) };
    for k in 0..levels {
        let lv = &spec.levels[k];
        if k == 0 {
            x.slot(filler, lv.n)?;
            y.slot(filler, lv.n)?;
        } else {
            let pg = spec.levels[k - 1].gap();
            for _ in 0..lv.t_bar {
                x.slot(filler, pg)?;
            }
            x.slot(filler, lv.r_bar)?;
            for _ in 0..lv.t {
                y.slot(filler, pg)?;
            }
            y.slot(filler, lv.r)?;
        }
        x.zeros(lv.gap());
        y.zeros(lv.gap());
        debug_assert_eq!(x.out.len() as u64, lv.h);
        debug_assert_eq!(y.out.len() as u64, lv.h);
        for _ in 0..lv.t_tilde {
            x.slot(filler, lv.gap())?;
        }
        x.slot(filler, lv.r_tilde)?;
        if x.out.len() as u64 != lv.h_tilde || y.out.len() as u64 != lv.h {
            return Err(Error::SlotLengthMismatch { expected: lv.h_tilde as usize, got: x.out.len() });
        }
    }
    Ok(SampledPoint { x: x.out, y: y.out, levels })
}

/// Word counts `#Sigma^j` of a truncated base, cached by length.
pub struct Counter<'a> {
    aut: &'a CountingAutomaton,
    exact: HashMap<u64, BigUint>,
    ln: HashMap<u64, f64>,
}

impl<'a> Counter<'a> {
    pub fn new(aut: &'a CountingAutomaton) -> Self {
        Counter { aut, exact: HashMap::new(), ln: HashMap::new() }
    }

    pub fn count(&mut self, len: u64) -> Result<BigUint> {
        if let Some(c) = self.exact.get(&len) {
            return Ok(c.clone());
        }
        let c = self.aut.count(len as usize)?;
        self.exact.insert(len, c.clone());
        Ok(c)
    }

    pub fn ln_count(&mut self, len: u64) -> Result<f64> {
        if let Some(&c) = self.ln.get(&len) {
            return Ok(c);
        }
        let c = self.aut.ln_count(len as usize)?;
        self.ln.insert(len, c);
        Ok(c)
    }
}

/// Factors `(count length, multiplicity, coordinate)` dividing the mass of
/// `Q_{k-1}` among the rectangles `R_k`, then of `R_k` among the squares `Q_k`.
type Factors = Vec<(u64, u64, Coord)>;

fn split_factors(spec: &LevelSpec, k: usize) -> (Factors, Factors) {
    let lv = &spec.levels[k];
    let rect = if k == 0 {
        vec![(lv.n, 1, Coord::X), (lv.n, 1, Coord::Y)]
    } else {
        let pg = spec.levels[k - 1].gap();
        vec![(pg, lv.t_bar, Coord::X), (lv.r_bar, 1, Coord::X), (pg, lv.t, Coord::Y), (lv.r, 1, Coord::Y)]
    };
    let square = vec![(lv.gap(), lv.t_tilde, Coord::X), (lv.r_tilde, 1, Coord::X)];
    (rect, square)
}

/// Cap on the total exponent of exact mass computations.
const EXACT_MASS_LIMIT: u64 = 1 << 20;

/// Exact `mu(Q_k)` (1-indexed `k`).
pub fn square_measure(spec: &LevelSpec, slots: &Slots, k: usize) -> Result<BigRational> {
    if k == 0 || k > spec.levels.len() {
        return Err(Error::Domain(format!("level {k} outside 1..={}", spec.levels.len())));
    }
    if spec.levels[k - 1].h_tilde > EXACT_MASS_LIMIT {
        return Err(Error::BudgetExceeded(format!("exact mass at level {k} is too large; use the log form")));
    }
    let mut c1 = Counter::new(&slots.aut1);
    let mut c2 = Counter::new(&slots.aut2);
    let mut den = BigUint::one();
    for j in 0..k {
        let (rect, square) = split_factors(spec, j);
        for (len, mult, coord) in rect.into_iter().chain(square) {
            if mult == 0 {
                continue;
            }
            let c = match coord {
                Coord::X => c1.count(len)?,
                Coord::Y => c2.count(len)?,
            };
            den *= num_traits::pow(c, mult as usize);
        }
    }
    Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
}

/// `ln mu(R_k)` and `ln mu(Q_k)` for `k = 1..=levels`.
pub fn ln_measures(spec: &LevelSpec, slots: &Slots, levels: usize) -> Result<Vec<(f64, f64)>> {
    let mut c1 = Counter::new(&slots.aut1);
    let mut c2 = Counter::new(&slots.aut2);
    let mut acc = 0.0;
    let mut out = Vec::new();
    for j in 0..levels.min(spec.levels.len()) {
        let (rect, square) = split_factors(spec, j);
        let mut sum = |fs: Factors| -> Result<f64> {
            let mut s = 0.0;
            for (len, mult, coord) in fs {
                if mult == 0 {
                    continue;
                }
                let c = match coord {
                    Coord::X => c1.ln_count(len)?,
                    Coord::Y => c2.ln_count(len)?,
                };
                s += mult as f64 * c;
            }
            Ok(s)
        };
        acc -= sum(rect)?;
        let r = acc;
        acc -= sum(square)?;
        out.push((r, acc));
    }
    Ok(out)
}

/// `log mu(Q_k) / log |Q_k|` with `|Q_k| = beta2^(-h_k)`.
pub fn local_dimension(spec: &LevelSpec, slots: &Slots, b2: &BetaSystem, k: usize) -> Result<f64> {
    let ms = ln_measures(spec, slots, k)?;
    let (_, q) = *ms.last().ok_or_else(|| Error::Domain("level must be at least 1".into()))?;
    Ok(-q / (spec.levels[k - 1].h as f64 * b2.ln()))
}

/// Closed-form limit of the local dimension.
pub fn local_dimension_limit(b1: &BetaSystem, b2: &BetaSystem, slots: &Slots, v: f64, vhat: f64) -> f64 {
    let l2 = b2.ln();
    let g = (v - vhat - vhat * v) / ((1.0 + v) * (v - vhat));
    (slots.sys1.ln() / l2 + slots.sys2.ln() / l2) * g + 1.0 - b1.ln() / l2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionOptions {
    pub levels: usize,
    pub sep: Option<usize>,
    pub digit_budget: usize,
    pub level: LevelOptions,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions { levels: 8, sep: None, digit_budget: DEFAULT_DIGIT_BUDGET, level: LevelOptions::default() }
    }
}

/// A level spec with as many levels as are representable, plus the number
/// that fit in the digit budget.
pub struct Construction {
    pub spec: LevelSpec,
    pub slots: Slots,
    pub levels_requested: usize,
    pub levels_buildable: usize,
}

impl Construction {
    pub fn new(b1: &BetaSystem, b2: &BetaSystem, v: f64, vhat: f64, opts: ConstructionOptions) -> Result<Self> {
        let sep = match opts.sep {
            Some(n) => n,
            None => default_separator(b1, b2)?,
        };
        let seq = targets_upto(v, vhat, opts.levels, 1)?;
        if seq.levels() == 0 {
            return Err(Error::BudgetExceeded("no representable level".into()));
        }
        let mut spec = level_spec(&seq, b1, b2, sep, opts.level)?;
        // drop trailing levels whose lengths overflowed the scaled sequence
        spec.levels.truncate(opts.levels);
        let slots = Slots::new(b1, b2, sep)?;
        let levels_buildable = levels_within(&spec, opts.digit_budget);
        Ok(Construction { spec, slots, levels_requested: opts.levels, levels_buildable })
    }

    pub fn sample(&self, filler: &mut dyn SlotFiller) -> Result<SampledPoint> {
        if self.levels_buildable == 0 {
            return Err(Error::BudgetExceeded("level 1 exceeds the digit budget".into()));
        }
        sample_point(&self.spec, &self.slots, filler, self.levels_buildable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{estimate_exponents, run_records};
    use crate::symbolic::is_admissible;

    fn two() -> BetaSystem {
        BetaSystem::integer(2).unwrap()
    }

    #[test]
    fn target_examples() {
        let t = target_sequences(1.0, 0.3, 4).unwrap();
        assert_eq!(t.n, vec![1, 5, 18, 62]);
        assert_eq!(t.m, vec![3, 11, 37, 125]);
        let t = target_sequences(1.0, 0.0, 3).unwrap();
        assert_eq!(t.n, vec![4, 16, 256]);
        assert_eq!(t.m, vec![9, 33, 513]);
        assert!(matches!(target_sequences(1.0, 0.6, 3), Err(Error::RegimeUnsupported(_))));
        assert!(matches!(target_sequences(f64::INFINITY, 0.1, 3), Err(Error::RegimeUnsupported(_))));
        assert!(matches!(target_sequences(1.0, 0.0, 12), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn target_invariants() {
        let t = target_sequences(2.0, 0.5, 12).unwrap();
        for k in 0..t.levels() {
            assert!(t.n[k] < t.m[k]);
            if k + 1 < t.levels() {
                assert!(t.m[k] < t.n[k + 1]);
                assert!(t.gap(k) <= t.gap(k + 1));
            }
        }
        let k = t.levels() - 1;
        let tol = 3.0 / t.n[k] as f64;
        assert!((t.gap(k) as f64 / t.n[k] as f64 - 2.0).abs() < tol);
        assert!((t.gap(k - 1) as f64 / t.n[k] as f64 - 0.5).abs() < tol);
    }

    #[test]
    fn level_spec_examples() {
        let seq = target_sequences(1.0, 0.3, 4).unwrap();
        let s = level_spec(&seq, &two(), &two(), 2, LevelOptions::default()).unwrap();
        let l1 = &s.levels[0];
        assert_eq!((l1.l, l1.h, l1.h_tilde), (6, 13, 18));
        let four = BetaSystem::integer(4).unwrap();
        let relaxed = LevelOptions { enforce_condition: false, ..Default::default() };
        let one = target_sequences(1.0, 0.3, 1).unwrap();
        let s = level_spec(&one, &two(), &four, 2, relaxed).unwrap();
        assert_eq!(s.levels[0].h_tilde, 31);
        assert!(!s.condition_holds);
        // without the condition later levels cannot be made sparse
        assert!(matches!(level_spec(&seq, &two(), &four, 2, relaxed), Err(Error::SparsityViolated { level: 2 })));
        assert!(matches!(
            level_spec(&seq, &two(), &four, 2, LevelOptions::default()),
            Err(Error::ConditionViolated(_))
        ));
        let ok = target_sequences(1.0, 0.45, 3).unwrap();
        assert!(level_spec(&ok, &two(), &two(), 2, LevelOptions::default()).is_ok());
        let bad = TargetSequences { vhat: 0.55, ..ok };
        assert!(matches!(
            level_spec(&bad, &two(), &two(), 2, LevelOptions::default()),
            Err(Error::ConditionViolated(_))
        ));
    }

    #[test]
    fn bookkeeping_identities() {
        let seq = target_sequences(1.0, 0.3, 10).unwrap();
        let s = level_spec(&seq, &two(), &BetaSystem::integer(3).unwrap(), 2, LevelOptions::default()).unwrap();
        let b = s.block();
        for k in 0..s.levels.len() {
            let lv = &s.levels[k];
            assert_eq!(lv.h - lv.l, lv.gap() + b);
            assert_eq!(lv.h_tilde, lv.h + lv.t_tilde * (lv.gap() + b) + lv.r_tilde + b);
            if k > 0 {
                let p = &s.levels[k - 1];
                assert_eq!(lv.n, p.m + lv.t * p.gap() + lv.r);
                assert!(lv.r < p.gap());
                assert_eq!(lv.l, p.h_tilde + lv.t_bar * (p.gap() + b) + lv.r_bar + b);
                assert!(lv.l >= p.h_tilde + b);
            }
        }
    }

    #[test]
    fn zero_fill_point_is_admissible() {
        let (b1, b2) = (two(), two());
        let c = Construction::new(&b1, &b2, 1.0, 0.3, ConstructionOptions { levels: 5, ..Default::default() }).unwrap();
        let p = c.sample(&mut ZeroFiller).unwrap();
        let xs: Vec<u32> = p.x.iter().map(|&d| d as u32).collect();
        assert!(is_admissible(&b1, &xs).unwrap());
        let lv = &c.spec.levels[4];
        assert_eq!((p.x.len() as u64, p.y.len() as u64), (lv.h_tilde, lv.h));
        // the prescribed block sits between the two separator ones
        let n = c.spec.sep as u64;
        for s in [&p.x, &p.y] {
            assert_eq!(s[(lv.l - n - 1) as usize], 1);
            assert_eq!(s[(lv.h - n - 1) as usize], 1);
            assert!(s[(lv.l - n) as usize..(lv.h - n - 1) as usize].iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn random_fill_tracks_targets() {
        let (b1, b2) = (two(), two());
        let c =
            Construction::new(&b1, &b2, 1.0, 0.3, ConstructionOptions { levels: 10, ..Default::default() }).unwrap();
        let p = c.sample(&mut RandomFiller::new(11)).unwrap();
        let rec = run_records(&p.x, &p.y, p.x.len().min(p.y.len()), true);
        let e = estimate_exponents(&rec);
        assert!((e.v_est - 1.0).abs() < 0.05, "{e:?}");
        assert!((e.vhat_est - 0.3).abs() < 0.05, "{e:?}");
    }

    struct Bad;
    impl SlotFiller for Bad {
        fn fill(&mut self, _: Coord, _: &CountingAutomaton, len: usize) -> Vec<u8> {
            vec![1; len]
        }
    }

    struct Short;
    impl SlotFiller for Short {
        fn fill(&mut self, _: Coord, _: &CountingAutomaton, len: usize) -> Vec<u8> {
            vec![0; len.saturating_sub(1)]
        }
    }

    #[test]
    fn filler_output_is_validated() {
        let c = Construction::new(&two(), &two(), 1.0, 0.3, ConstructionOptions { levels: 3, ..Default::default() })
            .unwrap();
        // n_1 = 1 makes the first slot a single digit; grow it so "11" appears
        let mut spec = c.spec.clone();
        spec.levels.truncate(3);
        assert!(matches!(sample_point(&spec, &c.slots, &mut Bad, 3), Err(Error::NotAdmissible { .. })));
        assert!(matches!(sample_point(&spec, &c.slots, &mut Short, 3), Err(Error::SlotLengthMismatch { .. })));
    }

    #[test]
    fn first_level_mass() {
        let c = Construction::new(&two(), &two(), 1.0, 0.3, ConstructionOptions { levels: 3, ..Default::default() })
            .unwrap();
        // R_1: one slot of length n_1 = 1 in each coordinate, two words each
        let ms = ln_measures(&c.spec, &c.slots, 1).unwrap();
        assert!((ms[0].0 - (0.25f64).ln()).abs() < 1e-12);
        let q1 = square_measure(&c.spec, &c.slots, 1).unwrap();
        assert!((q1.to_f64().unwrap().ln() - ms[0].1).abs() < 1e-9);
    }

    #[test]
    fn level_one_squares_partition_the_mass() {
        // enumerate every x-word of level 1 and check the count is 1/mu(Q_1) per R_1
        let c = Construction::new(&two(), &two(), 1.0, 0.3, ConstructionOptions { levels: 2, ..Default::default() })
            .unwrap();
        let lv = &c.spec.levels[0];
        let per_rect = {
            let mut c1 = Counter::new(&c.slots.aut1);
            let mut n = BigUint::one();
            for _ in 0..lv.t_tilde {
                n *= c1.count(lv.gap()).unwrap();
            }
            n * c1.count(lv.r_tilde).unwrap()
        };
        let mu_r = BigRational::new(BigInt::one(), BigInt::from(4));
        let mu_q = square_measure(&c.spec, &c.slots, 1).unwrap();
        assert_eq!(mu_q * BigRational::from_integer(BigInt::from(per_rect)), mu_r);
    }
}
