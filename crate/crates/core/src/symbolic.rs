//! Words over `{0, .., floor(beta)}`: lexicographic order, the Parry
//! admissibility criterion, counting and successor.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::beta::BetaSystem;
use crate::error::{Error, Result};

pub type Word = Vec<u32>;

/// Default cap on `(alphabet size)^n` for exhaustive enumeration.
pub const DEFAULT_ENUM_BUDGET: u128 = 1 << 26;

pub fn format_word(w: &[u32]) -> String {
    let sep = if w.iter().any(|&d| d > 9) { "," } else { "" };
    w.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(sep)
}

/// Parse `"1,0,1"` or `"101"`.
pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(',') {
        s.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad digit '{t}'")))).collect()
    } else {
        s.chars().map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad digit '{c}'")))).collect()
    }
}

/// A one-sided digit sequence: finite (read as padded with zeros) or
/// eventually periodic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequence<'a> {
    Finite(&'a [u32]),
    Periodic { pre: &'a [u32], period: &'a [u32] },
}

impl Sequence<'_> {
    pub fn at(&self, k: usize) -> u32 {
        match self {
            Sequence::Finite(w) => w.get(k).copied().unwrap_or(0),
            Sequence::Periodic { pre, period } => {
                if k < pre.len() {
                    pre[k]
                } else {
                    period[(k - pre.len()) % period.len()]
                }
            }
        }
    }

    fn tail_start(&self) -> usize {
        match self {
            Sequence::Finite(w) => w.len(),
            Sequence::Periodic { pre, .. } => pre.len(),
        }
    }

    fn period(&self) -> usize {
        match self {
            Sequence::Finite(_) => 1,
            Sequence::Periodic { period, .. } => period.len().max(1),
        }
    }
}

/// Lexicographic order; finite words compare as if followed by `0^inf`.
pub fn lex_compare(a: &Sequence<'_>, b: &Sequence<'_>) -> Ordering {
    let horizon = a.tail_start().max(b.tail_start()) + a.period().lcm(&b.period());
    (0..horizon).map(|k| a.at(k).cmp(&b.at(k))).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

pub fn lex_compare_words(a: &[u32], b: &[u32]) -> Ordering {
    lex_compare(&Sequence::Finite(a), &Sequence::Finite(b))
}

/// Parry automaton driven by `eps*(1, beta)`.
///
/// State `s` is the length of the current tight match against a prefix of
/// `eps*`. Reading `d` in state `s`: reject if `d > eps*_{s+1}`, advance if
/// equal, reset to 0 if smaller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingAutomaton {
    eps: Vec<u32>,
    /// State reached after matching all of `eps` (periodic wrap), or `None`
    /// for a prefix automaton that is exact only up to `eps.len()` digits.
    wrap: Option<usize>,
}

impl CountingAutomaton {
    /// Finite automaton for an eventually periodic `eps*`.
    pub fn periodic(sys: &BetaSystem) -> Result<Self> {
        match sys.eps_star_periodic()? {
            Some((pre, period)) => {
                let p = pre.len();
                let mut eps = pre;
                eps.extend(period);
                Ok(CountingAutomaton { eps, wrap: Some(p) })
            }
            None => Err(Error::AutomatonUnavailable(format!("eps*(1, {sys}) is not known to be eventually periodic"))),
        }
    }

    /// Prefix automaton, exact for words of length at most `n`.
    pub fn prefix(sys: &BetaSystem, n: usize) -> Result<Self> {
        Ok(CountingAutomaton { eps: sys.epsilon_star(n.max(1))?, wrap: None })
    }

    /// Periodic automaton when available, otherwise a prefix automaton for length `n`.
    pub fn for_length(sys: &BetaSystem, n: usize) -> Result<Self> {
        match Self::periodic(sys) {
            Ok(a) => Ok(a),
            Err(Error::AutomatonUnavailable(_)) => Self::prefix(sys, n),
            Err(e) => Err(e),
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.wrap.is_some()
    }

    pub fn states(&self) -> usize {
        match self.wrap {
            Some(_) => self.eps.len(),
            None => self.eps.len() + 1,
        }
    }

    /// Limit on word length for which counts are exact.
    pub fn horizon(&self) -> Option<usize> {
        match self.wrap {
            Some(_) => None,
            None => Some(self.eps.len()),
        }
    }

    fn next(&self, s: usize) -> usize {
        match self.wrap {
            Some(p) if s + 1 == self.eps.len() => p,
            _ => s + 1,
        }
    }

    /// Transition from `s` on digit `d`, or `None` when `d` is forbidden.
    pub fn step(&self, s: usize, d: u32) -> Option<usize> {
        let e = *self.eps.get(s)?;
        match d.cmp(&e) {
            Ordering::Less => Some(0),
            Ordering::Equal => Some(self.next(s)),
            Ordering::Greater => None,
        }
    }

    pub fn accepts(&self, w: &[u32]) -> bool {
        let mut s = 0;
        for &d in w {
            match self.step(s, d) {
                Some(t) => s = t,
                None => return false,
            }
        }
        true
    }

    /// Nonnegative transition-count matrix.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let k = self.states();
        let mut m = vec![vec![0u64; k]; k];
        for (s, row) in m.iter_mut().enumerate() {
            if let Some(&e) = self.eps.get(s) {
                row[0] += e as u64;
                row[self.next(s)] += 1;
            }
        }
        m
    }

    fn check_horizon(&self, n: usize) -> Result<()> {
        match self.horizon() {
            Some(h) if n > h => Err(Error::AutomatonUnavailable(format!(
                "prefix automaton is exact only up to length {h}, asked for {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Number of admissible words of length `n`.
    pub fn count(&self, n: usize) -> Result<BigUint> {
        self.check_horizon(n)?;
        let m: Vec<Vec<BigUint>> =
            self.matrix().into_iter().map(|r| r.into_iter().map(BigUint::from).collect()).collect();
        let k = m.len();
        // Row vector e_0 * M^n, summed.
        let v = if n <= 64 {
            let mut v = vec![BigUint::zero(); k];
            v[0] = BigUint::one();
            for _ in 0..n {
                v = vec_mat(&v, &m);
            }
            v
        } else {
            let p = mat_pow(&m, n);
            p[0].clone()
        };
        Ok(v.into_iter().sum())
    }

    /// Natural log of the count for length `n`: normalized iteration, or
    /// scaled repeated squaring for long words.
    pub fn ln_count(&self, n: usize) -> Result<f64> {
        self.check_horizon(n)?;
        let m = self.matrix();
        let k = m.len();
        if n > 4096 {
            let m: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&c| c as f64).collect()).collect();
            let (p, log) = scaled_pow(&m, n);
            return Ok(p[0].iter().sum::<f64>().ln() + log);
        }
        let mut v = vec![0f64; k];
        v[0] = 1.0;
        let mut log_scale = 0.0;
        for _ in 0..n {
            let mut w = vec![0f64; k];
            for (i, vi) in v.iter().enumerate() {
                if *vi == 0.0 {
                    continue;
                }
                for (j, &c) in m[i].iter().enumerate() {
                    if c != 0 {
                        w[j] += vi * c as f64;
                    }
                }
            }
            let s: f64 = w.iter().sum();
            log_scale += s.ln();
            v = w.into_iter().map(|x| x / s).collect();
        }
        Ok(log_scale)
    }
}

/// `M^e = P * exp(log)` with `P` normalized to max entry 1.
fn scaled_pow(m: &[Vec<f64>], mut e: usize) -> (Vec<Vec<f64>>, f64) {
    let k = m.len();
    let mul = |a: &[Vec<f64>], b: &[Vec<f64>]| -> (Vec<Vec<f64>>, f64) {
        let mut c = vec![vec![0f64; k]; k];
        for i in 0..k {
            for (l, &x) in a[i].iter().enumerate() {
                if x != 0.0 {
                    for j in 0..k {
                        c[i][j] += x * b[l][j];
                    }
                }
            }
        }
        let s = c.iter().flatten().cloned().fold(0.0, f64::max);
        c.iter_mut().flatten().for_each(|x| *x /= s);
        (c, s.ln())
    };
    let mut acc: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut acc_log = 0.0;
    let (mut base, mut base_log) = (m.to_vec(), 0.0);
    while e > 0 {
        if e & 1 == 1 {
            let (c, l) = mul(&acc, &base);
            acc = c;
            acc_log += base_log + l;
        }
        e >>= 1;
        if e > 0 {
            let (c, l) = mul(&base, &base);
            base = c;
            base_log = 2.0 * base_log + l;
        }
    }
    (acc, acc_log)
}

fn vec_mat(v: &[BigUint], m: &[Vec<BigUint>]) -> Vec<BigUint> {
    let k = m.len();
    let mut out = vec![BigUint::zero(); k];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, c) in m[i].iter().enumerate() {
            if !c.is_zero() {
                out[j] += vi * c;
            }
        }
    }
    out
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    a.par_iter().map(|row| vec_mat(row, b)).collect()
}

fn mat_pow(m: &[Vec<BigUint>], mut e: usize) -> Vec<Vec<BigUint>> {
    let k = m.len();
    let mut acc: Vec<Vec<BigUint>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect()).collect();
    let mut base = m.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base);
        }
    }
    acc
}

/// Parry criterion: every shift of `w 0^inf` is strictly below `eps*(1, beta)`.
pub fn is_admissible(sys: &BetaSystem, w: &[u32]) -> Result<bool> {
    if w.iter().any(|&d| d > sys.alphabet_max()) {
        return Ok(false);
    }
    if w.is_empty() {
        return Ok(true);
    }
    Ok(CountingAutomaton::prefix(sys, w.len())?.accepts(w))
}

/// Direct shift-by-shift check against a prefix of `eps*` of length `>= w.len()`.
pub(crate) fn admissible_direct(eps: &[u32], w: &[u32]) -> bool {
    (0..w.len()).all(|i| {
        let tail = &w[i..];
        match tail.iter().zip(eps).map(|(a, b)| a.cmp(b)).find(|o| o.is_ne()) {
            Some(o) => o.is_lt(),
            // equal on the whole tail, then 0^inf against a tail of eps* that
            // is never identically zero
            None => true,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Enumerate,
    Automaton,
}

impl std::str::FromStr for CountMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(CountMethod::Enumerate),
            "automaton" => Ok(CountMethod::Automaton),
            _ => Err(Error::Parse(format!("unknown count method '{s}'"))),
        }
    }
}

fn check_budget(sys: &BetaSystem, n: usize, budget: u128) -> Result<()> {
    let a = sys.alphabet_max() as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(a);
        if total > budget {
            return Err(Error::BudgetExceeded(format!(
                "{a}^{n} candidate words exceed the enumeration budget {budget}"
            )));
        }
    }
    Ok(())
}

fn dfs_count(eps: &[u32], max: u32, w: &mut Vec<u32>, n: usize) -> u64 {
    if w.len() == n {
        return 1;
    }
    let mut total = 0;
    for d in 0..=max {
        w.push(d);
        if admissible_direct(eps, w) {
            total += dfs_count(eps, max, w, n);
        } else {
            // admissibility is monotone in the last digit
            w.pop();
            break;
        }
        w.pop();
    }
    total
}

fn dfs_collect(eps: &[u32], max: u32, w: &mut Vec<u32>, n: usize, out: &mut Vec<Word>) {
    if w.len() == n {
        out.push(w.clone());
        return;
    }
    for d in 0..=max {
        w.push(d);
        let ok = admissible_direct(eps, w);
        if ok {
            dfs_collect(eps, max, w, n, out);
        }
        w.pop();
        if !ok {
            break;
        }
    }
}

/// All admissible words of length `n` in lexicographic order.
pub fn enumerate_words(sys: &BetaSystem, n: usize, budget: u128) -> Result<Vec<Word>> {
    check_budget(sys, n, budget)?;
    let eps = sys.epsilon_star(n.max(1))?;
    let max = sys.alphabet_max();
    let parts: Vec<Vec<Word>> = (0..=max)
        .into_par_iter()
        .map(|d| {
            let mut out = Vec::new();
            if n == 0 {
                if d == 0 {
                    out.push(Vec::new());
                }
                return out;
            }
            let mut w = vec![d];
            if admissible_direct(&eps, &w) {
                dfs_collect(&eps, max, &mut w, n, &mut out);
            }
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// `#Sigma_beta^n`, the number of admissible words of length `n`.
pub fn count_words(sys: &BetaSystem, n: usize, method: CountMethod) -> Result<BigUint> {
    match method {
        CountMethod::Enumerate => {
            check_budget(sys, n, DEFAULT_ENUM_BUDGET)?;
            if n == 0 {
                return Ok(BigUint::one());
            }
            let eps = sys.epsilon_star(n)?;
            let max = sys.alphabet_max();
            let total: u64 = (0..=max)
                .into_par_iter()
                .map(|d| {
                    let mut w = vec![d];
                    if admissible_direct(&eps, &w) {
                        dfs_count(&eps, max, &mut w, n)
                    } else {
                        0
                    }
                })
                .sum();
            Ok(BigUint::from(total))
        }
        CountMethod::Automaton => CountingAutomaton::for_length(sys, n)?.count(n),
    }
}

/// The smallest admissible word of the same length strictly above `w`.
pub fn successor(sys: &BetaSystem, w: &[u32]) -> Result<Option<Word>> {
    if !is_admissible(sys, w)? {
        return Err(Error::NotAdmissible { word: format_word(w), context: format!(" for beta = {sys}") });
    }
    let aut = CountingAutomaton::prefix(sys, w.len())?;
    for i in (0..w.len()).rev() {
        if w[i] >= sys.alphabet_max() {
            continue;
        }
        let mut cand = w[..=i].to_vec();
        cand[i] += 1;
        if aut.accepts(&cand) {
            cand.resize(w.len(), 0);
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// `w 0^N` for `w` admissible for the truncation `beta_N`; the result is a
/// full word for `beta`.
pub fn pad_full(sys: &BetaSystem, w: &[u32], n: usize) -> Result<Word> {
    let trunc = sys.truncated_system(n)?;
    if !is_admissible(&trunc, w)? {
        return Err(Error::NotAdmissible {
            word: format_word(w),
            context: format!(" for the truncation beta_{n} of {sys}"),
        });
    }
    let mut out = w.to_vec();
    out.resize(w.len() + n, 0);
    if !crate::cylinders::is_full(sys, &out)? {
        return Err(Error::PreconditionViolated(format!("padded word {} is not full for {sys}", format_word(&out))));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phi() -> BetaSystem {
        BetaSystem::parse("root:z^2-z-1:[1.6,1.7]").unwrap()
    }

    /// Every word over the alphabet, filtered by the shift definition.
    fn brute_force(sys: &BetaSystem, n: usize) -> Vec<Word> {
        let eps = sys.epsilon_star(2 * n + 2).unwrap();
        let a = sys.alphabet_max() + 1;
        let mut out = Vec::new();
        let total = (a as usize).pow(n as u32);
        for mut code in 0..total {
            let mut w = vec![0u32; n];
            for k in (0..n).rev() {
                w[k] = (code % a as usize) as u32;
                code /= a as usize;
            }
            let ok = (0..n).all(|i| {
                let mut padded = w[i..].to_vec();
                padded.resize(eps.len(), 0);
                padded < eps
            });
            if ok {
                out.push(w);
            }
        }
        out
    }

    #[test]
    fn lex_examples() {
        assert_eq!(lex_compare_words(&[1, 0], &[1, 1]), Ordering::Less);
        assert_eq!(lex_compare_words(&[1], &[1, 0, 0]), Ordering::Equal);
        let s = Sequence::Periodic { pre: &[], period: &[1, 0] };
        assert_eq!(lex_compare(&Sequence::Finite(&[1, 0, 1]), &s), Ordering::Less);
    }

    #[test]
    fn admissibility_examples() {
        let p = phi();
        assert!(!is_admissible(&p, &[1, 1]).unwrap());
        assert!(is_admissible(&p, &[1, 0, 1, 0, 0, 1]).unwrap());
        let two = BetaSystem::integer(2).unwrap();
        assert!(is_admissible(&two, &[1, 1, 1, 0, 1]).unwrap());
        assert!(!is_admissible(&two, &[2]).unwrap());
    }

    #[test]
    fn count_examples() {
        let two = BetaSystem::integer(2).unwrap();
        assert_eq!(count_words(&two, 10, CountMethod::Automaton).unwrap(), BigUint::from(1024u32));
        assert_eq!(count_words(&phi(), 5, CountMethod::Enumerate).unwrap(), BigUint::from(13u32));
        let b = BetaSystem::parse("5/2").unwrap();
        let c = count_words(&b, 8, CountMethod::Enumerate).unwrap();
        let c: f64 = c.to_string().parse().unwrap();
        assert!(2.5f64.powi(8) <= c && c <= 2.5f64.powi(9) / 1.5);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for s in ["2", "5/2", "root:z^2-z-1:[1.6,1.7]", "root:z^3-z^2-1:[1.4,1.5]", "3.7"] {
            let sys = BetaSystem::parse(s).unwrap();
            for n in 1..=6 {
                let oracle = brute_force(&sys, n);
                assert_eq!(enumerate_words(&sys, n, DEFAULT_ENUM_BUDGET).unwrap(), oracle, "{s} n={n}");
                for m in [CountMethod::Enumerate, CountMethod::Automaton] {
                    assert_eq!(count_words(&sys, n, m).unwrap(), BigUint::from(oracle.len()), "{s} n={n}");
                }
            }
        }
    }

    #[test]
    fn automaton_agrees_with_enumeration() {
        for s in ["2", "root:z^2-z-1:[1.6,1.7]", "5/2"] {
            let sys = BetaSystem::parse(s).unwrap();
            for n in 1..=14 {
                assert_eq!(
                    count_words(&sys, n, CountMethod::Automaton).unwrap(),
                    count_words(&sys, n, CountMethod::Enumerate).unwrap(),
                    "{s} n={n}"
                );
            }
        }
    }

    #[test]
    fn large_counts_use_matrix_power() {
        let p = phi();
        let a = CountingAutomaton::periodic(&p).unwrap();
        // Fibonacci: c(n) = F(n+2)
        let (mut x, mut y) = (BigUint::one(), BigUint::one());
        for _ in 0..200 {
            let z = &x + &y;
            x = y;
            y = z;
        }
        assert_eq!(a.count(200).unwrap(), y);
        let ln = a.ln_count(200).unwrap();
        assert!((ln - 200.0 * 1.618033988749895f64.ln()).abs() < 1.0);
    }

    #[test]
    fn ln_count_long_words() {
        let a = CountingAutomaton::periodic(&phi()).unwrap();
        let exact = crate::precision::ln_big(&a.count(5000).unwrap().into());
        assert!((a.ln_count(5000).unwrap() - exact).abs() < 1e-9 * exact);
        // F(n+2) ~ phi^(n+2) / sqrt 5
        let n = 1_000_000_000_000usize;
        let binet = (n as f64 + 2.0) * 1.618033988749895f64.ln() - 5f64.sqrt().ln();
        assert!((a.ln_count(n).unwrap() - binet).abs() < 1e-9 * binet);
    }

    #[test]
    fn successor_examples() {
        let two = BetaSystem::integer(2).unwrap();
        assert_eq!(successor(&two, &[0, 1, 1]).unwrap(), Some(vec![1, 0, 0]));
        let p = phi();
        assert_eq!(successor(&p, &[0, 1]).unwrap(), Some(vec![1, 0]));
        assert_eq!(successor(&p, &[1, 0]).unwrap(), None);
        assert!(successor(&p, &[1, 1]).is_err());
    }

    #[test]
    fn successor_walks_all_words() {
        for s in ["root:z^2-z-1:[1.6,1.7]", "5/2"] {
            let sys = BetaSystem::parse(s).unwrap();
            let n = 6;
            let mut w = vec![0; n];
            let mut seen = vec![w.clone()];
            while let Some(next) = successor(&sys, &w).unwrap() {
                assert_eq!(lex_compare_words(&w, &next), Ordering::Less);
                w = next;
                seen.push(w.clone());
            }
            assert_eq!(seen, brute_force(&sys, n));
        }
    }

    #[test]
    fn truncation_languages_are_nested() {
        let p = phi();
        for n in [3, 5, 7] {
            let t = p.truncated_system(n).unwrap();
            for w in enumerate_words(&t, 7, DEFAULT_ENUM_BUDGET).unwrap() {
                assert!(is_admissible(&p, &w).unwrap());
            }
        }
    }

    #[test]
    fn pad_full_examples() {
        let p = phi();
        assert_eq!(pad_full(&p, &[1, 0], 3).unwrap(), vec![1, 0, 0, 0, 0]);
        assert!(matches!(pad_full(&p, &[1, 1], 3), Err(Error::NotAdmissible { .. })));
        let two = BetaSystem::integer(2).unwrap();
        assert_eq!(pad_full(&two, &[1], 2).unwrap(), vec![1, 0, 0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn automaton_matches_direct_check(w in proptest::collection::vec(0u32..3, 0..24)) {
            let sys = BetaSystem::parse("5/2").unwrap();
            let eps = sys.epsilon_star(24).unwrap();
            prop_assert_eq!(is_admissible(&sys, &w).unwrap(), admissible_direct(&eps, &w));
        }

        #[test]
        fn eps_star_prefix_is_self_admissible(n in 1usize..40) {
            for s in ["5/2", "3.7", "root:z^2-z-1:[1.6,1.7]"] {
                let sys = BetaSystem::parse(s).unwrap();
                let eps = sys.epsilon_star(n).unwrap();
                let long = sys.epsilon_star(2 * n).unwrap();
                for i in 1..n {
                    prop_assert!(eps[i..] <= long[..n - i]);
                }
            }
        }
    }
}
