//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stdout so the lines survive test-output capture.

use std::io::Write;
use std::time::{Duration, Instant};

use betadyn::beta::BetaSystem;
use betadyn::cantor::{local_dimension, Construction, ConstructionOptions, RandomFiller, DEFAULT_DIGIT_BUDGET};
use betadyn::cylinders::{cylinder, full_concat_check, is_full};
use betadyn::dimension::{dim_e, dim_u, dim_w};
use betadyn::estimation::cover_w_min;
use betadyn::exponents::{estimate_exponents, hit_statistics, run_records};
use betadyn::precision::{pow2, Interval, Rational};
use betadyn::symbolic::{count_words, enumerate_words, CountMethod, DEFAULT_ENUM_BUDGET};
use betadyn::Error;
use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};

const PHI: f64 = 1.618_033_988_749_895;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when the criterion cannot be met as stated; the line still reads FAIL.
    unattainable: Option<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail, unattainable: None }
    }
}

fn emit(id: u32, title: &str, o: &Outcome, took: Duration) {
    let mut out = std::io::stdout().lock();
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "criterion {id:>2} [{verdict}] {title} ({:.2}s): {}", took.as_secs_f64(), o.detail);
    if let Some(why) = &o.unattainable {
        let _ = writeln!(out, "             not attainable as stated: {why}");
    }
    let _ = out.flush();
}

fn bases() -> Vec<(&'static str, BetaSystem, f64)> {
    vec![
        ("2", BetaSystem::integer(2).unwrap(), 2.0),
        ("5/2", BetaSystem::parse("5/2").unwrap(), 2.5),
        ("phi", BetaSystem::parse("root:z^2-z-1:[1.6,1.7]").unwrap(), PHI),
    ]
}

fn renyi_bounds() -> Outcome {
    let mut bad = Vec::new();
    for (name, b, x) in bases() {
        for n in 1..=12 {
            let c = count_words(&b, n, CountMethod::Enumerate).unwrap().to_f64().unwrap();
            let (lo, hi) = (x.powi(n as i32), x.powi(n as i32 + 1) / (x - 1.0));
            if c < lo * (1.0 - 1e-12) || c > hi * (1.0 + 1e-12) {
                bad.push(format!("{name} n={n} count={c} not in [{lo:.3}, {hi:.3}]"));
            }
        }
    }
    let phi = &bases()[2].1;
    let (mut a, mut b) = (2u64, 3u64);
    for n in 1..=12usize {
        let want = match n {
            1 => 2,
            2 => 3,
            _ => {
                let c = a + b;
                a = b;
                b = c;
                c
            }
        };
        let got = count_words(phi, n, CountMethod::Enumerate).unwrap();
        if got != BigUint::from(want) {
            bad.push(format!("phi n={n}: {got} != fibonacci {want}"));
        }
    }
    let detail = if bad.is_empty() {
        "beta in {2, 5/2, phi}, n <= 12 within [beta^n, beta^(n+1)/(beta-1)]; phi counts follow 2, 3, 5, ...".into()
    } else {
        bad.join("; ")
    };
    Outcome::new(bad.is_empty(), detail)
}

fn cylinder_partition() -> Outcome {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    let mut checked = 0usize;
    for (name, b, _) in bases() {
        for n in 1..=8 {
            let words = enumerate_words(&b, n, DEFAULT_ENUM_BUDGET).unwrap();
            let cyls: Vec<_> = words.iter().map(|w| cylinder(&b, w).unwrap()).collect();
            let tiled = cyls[0].left.is_zero()
                && cyls.windows(2).all(|p| p[0].right.sub(&p[1].left).is_zero())
                && cyls.last().unwrap().right.sub(&b.ring().one()).is_zero();
            if !tiled {
                bad.push(format!("{name} n={n}: cylinders do not tile [0,1)"));
            }
        }
        // N = 3 when valid, else the next valid truncation depth
        let mut sep = 3;
        while b.beta_truncation(sep).is_err() {
            sep += 1;
        }
        if sep != 3 {
            notes.push(format!("{name}: eps*_3 = 0, used N = {sep}"));
        }
        let small = b.truncated_system(sep).unwrap();
        let inv = b.ring().beta_inv();
        for n in 1..=8 {
            let upper = inv.pow(n as u32);
            let lower = inv.pow((n + sep) as u32);
            for w in enumerate_words(&small, n, DEFAULT_ENUM_BUDGET).unwrap() {
                let len = cylinder(&b, &w).unwrap().length();
                checked += 1;
                if len.cmp_exact(&lower).unwrap().is_lt() || len.cmp_exact(&upper).unwrap().is_gt() {
                    bad.push(format!("{name} {w:?}: length outside [beta^-(n+N), beta^-n]"));
                }
            }
        }
    }
    let mut detail = format!("exact tiling for n <= 8; {checked} truncated-base words within length bounds");
    if !notes.is_empty() {
        detail = format!("{detail} ({})", notes.join(", "));
    }
    if !bad.is_empty() {
        detail = bad.into_iter().take(5).collect::<Vec<_>>().join("; ");
        return Outcome::new(false, detail);
    }
    Outcome::new(true, detail)
}

fn full_word_closure() -> Outcome {
    let phi = BetaSystem::parse("phi").unwrap();
    let mut full = Vec::new();
    for n in 1..=6 {
        for w in enumerate_words(&phi, n, DEFAULT_ENUM_BUDGET).unwrap() {
            if is_full(&phi, &w).unwrap() {
                full.push(w);
            }
        }
    }
    let mut tails = Vec::new();
    for n in 1..=4 {
        tails.extend(enumerate_words(&phi, n, DEFAULT_ENUM_BUDGET).unwrap());
    }
    let mut bad = 0;
    for f in &full {
        for t in &tails {
            let r = full_concat_check(&phi, f, t).unwrap();
            if !(r.admissible && r.product_law) {
                bad += 1;
            }
        }
    }
    Outcome::new(
        bad == 0,
        format!(
            "{} full words x {} tails, {bad} failures of admissibility or |I(uw)| = |I(u)||I(w)|",
            full.len(),
            tails.len()
        ),
    )
}

/// Independent f64 root of `z^N - sum eps_j z^(N-j)` by bisection on (1, 2).
fn truncation_root_f64(eps: &[u32]) -> f64 {
    let f =
        |z: f64| -> f64 { 1.0 - eps.iter().enumerate().map(|(j, &e)| e as f64 * z.powi(-(j as i32 + 1))).sum::<f64>() };
    let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn truncation_convergence() -> Outcome {
    let phi = BetaSystem::parse("phi").unwrap();
    let mut vals = Vec::new();
    let mut bad = Vec::new();
    let tol = pow2(-160);
    for n in [3usize, 5, 7] {
        let root = phi.beta_truncation(n).unwrap();
        let poly = phi.truncation_poly(n).unwrap();
        let enc: Interval = root.enclosure(320);
        let p = poly.eval_interval(&enc);
        let resid: Rational = p.lo().abs().max(p.hi().abs());
        if resid > tol {
            bad.push(format!("beta_{n} residual above 2^-160"));
        }
        let v = root.to_f64();
        let oracle = truncation_root_f64(&phi.epsilon_star(n).unwrap());
        if (v - oracle).abs() > 1e-12 {
            bad.push(format!("beta_{n} = {v} but bisection gives {oracle}"));
        }
        vals.push(v);
    }
    let monotone = vals[0] < vals[1] && vals[1] < vals[2] && vals[2] < PHI;
    let close = PHI - vals[2] < 0.01;
    let pass = bad.is_empty() && monotone && close;
    let mut detail = format!(
        "beta_3 = {:.9} < beta_5 = {:.9} < beta_7 = {:.9} < phi, phi - beta_7 = {:.2e}, residuals <= 2^-160",
        vals[0],
        vals[1],
        vals[2],
        PHI - vals[2]
    );
    if !bad.is_empty() {
        detail = bad.join("; ");
    }
    let mut o = Outcome::new(pass, detail);
    if bad.is_empty() && monotone && !close {
        // smallest valid N that does get within 0.01
        let first =
            (8..64).find(|&n| phi.beta_truncation(n).map(|r| PHI - r.to_f64() < 0.01).unwrap_or(false)).unwrap_or(0);
        o.unattainable = Some(format!(
            "beta_7 is the root of z^7 - z^6 - z^4 - z^2 - 1 (confirmed by independent bisection); \
             the omitted tail of 1 = sum phi^-j puts it {:.4} below phi, and the first truncation within 0.01 is N = {first}",
            PHI - vals[2]
        ));
    }
    o
}

fn exponent_roundtrip() -> Outcome {
    let two = BetaSystem::integer(2).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    let mut unattainable = None;
    for (v, vhat) in [(1.0, 0.3), (2.0, 0.5), (1.0, 0.0)] {
        let opts = ConstructionOptions { levels: 12, digit_budget: DEFAULT_DIGIT_BUDGET, ..Default::default() };
        let c = match Construction::new(&two, &two, v, vhat, opts) {
            Ok(c) => c,
            Err(e) => {
                pass = false;
                parts.push(format!("({v},{vhat}): {e}"));
                continue;
            }
        };
        let p = c.sample(&mut RandomFiller::new(2024)).unwrap();
        let depth = p.x.len().min(p.y.len());
        let est = estimate_exponents(&run_records(&p.x, &p.y, depth, true));
        let ok = (est.v_est - v).abs() <= 0.05 && (est.vhat_est - vhat).abs() <= 0.05;
        let full = p.levels == 12;
        parts.push(format!(
            "({v},{vhat}): levels {}/12, v_est={:.4} vhat_est={:.4}{}",
            p.levels,
            est.v_est,
            est.vhat_est,
            if ok { "" } else { " OUT OF TOLERANCE" }
        ));
        pass &= ok && full;
        if ok && !full {
            unattainable = Some(format!(
                "with vhat = 0 the targets are n_k = 2^(2^k); level {} needs more than {} digits per coordinate \
                 and n_6 = 2^64 does not fit in a machine word, so 12 levels cannot be materialized",
                p.levels + 1,
                DEFAULT_DIGIT_BUDGET
            ));
        }
    }
    Outcome { pass, detail: parts.join("; "), unattainable }
}

fn local_dimension_check() -> Outcome {
    let two = BetaSystem::integer(2).unwrap();
    let opts = ConstructionOptions { levels: 64, sep: Some(5), digit_budget: 0, ..Default::default() };
    let c = Construction::new(&two, &two, 1.0, 0.3, opts).unwrap();
    let k = c.spec.levels.len();
    let d = local_dimension(&c.spec, &c.slots, &two, k).unwrap();
    let target = 4.0 / 7.0;
    Outcome::new(
        (d - target).abs() <= 0.1,
        format!("N = 5, deepest level k = {k}: log mu(Q_k)/log|Q_k| = {d:.4} vs 4/7 = {target:.4}"),
    )
}

fn formula_consistency() -> Outcome {
    let b1s = ["root:z^2-z-1:[1.6,1.7]", "2", "5/2"];
    let b2s = ["3", "4", "7"];
    let vs = [0.2, 1.0, 5.0];
    let mut worst: f64 = 0.0;
    let mut regimes = std::collections::BTreeSet::new();
    for s1 in b1s {
        for s2 in b2s {
            let (b1, b2) = (BetaSystem::parse(s1).unwrap(), BetaSystem::parse(s2).unwrap());
            for v in vs {
                let e = dim_e(&b1, &b2, 0.0, v).unwrap();
                let w = dim_w(&b1, &b2, v).unwrap();
                regimes.insert(w.regime.tag());
                worst = worst.max((e.value - w.value).abs());
            }
        }
    }
    let both = regimes.len() >= 2;
    Outcome::new(
        worst <= 1e-12 && both,
        format!("27 grid points, max |E(0,v) - W(v)| = {worst:.2e}, branches {regimes:?}"),
    )
}

fn dim_u_closed_form() -> Outcome {
    let two = BetaSystem::integer(2).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for vhat in [0.1, 0.3, 0.5] {
        let r = dim_u(&two, &two, vhat).unwrap();
        let want = 2.0 * ((1.0 - vhat) / (1.0 + vhat)).powi(2);
        let arg = 2.0 * vhat / (1.0 - vhat);
        let got_arg = r.argmax_v.unwrap_or(f64::NAN);
        let ok = (r.value - want).abs() <= 1e-6 && (got_arg - arg).abs() <= 1e-4;
        pass &= ok;
        parts.push(format!("vhat={vhat}: {:.9} (want {want:.9}), argmax {got_arg:.6} (want {arg:.6})", r.value));
    }
    Outcome::new(pass, parts.join("; "))
}

fn covering_exponents() -> Outcome {
    let two = BetaSystem::integer(2).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    let l5 = 2f64.ln() / 5f64.ln();
    for (b2, want) in [(5u32, (3.0 - l5) / 2.0), (4, 1.25)] {
        let b = BetaSystem::integer(b2).unwrap();
        let r = cover_w_min(&two, &b, 1.0, 8).unwrap();
        let w = dim_w(&two, &b, 1.0).unwrap().value;
        let ok = (r.exponent - want).abs() <= 0.05 && (w - want).abs() < 1e-12;
        pass &= ok;
        parts.push(format!("(2,{b2}): min exponent {:.4} vs dim_W {want:.4}", r.exponent));
    }
    Outcome::new(pass, parts.join("; "))
}

fn zero_one_law() -> Outcome {
    let two = BetaSystem::integer(2).unwrap();
    let h = hit_statistics(&two, &two, 1.0, 20, 10_000, 7).unwrap();
    let oracle: f64 = (1..=20).map(|n| 4f64.powi(-n)).sum();
    let z = (h.mean_hits - oracle).abs() / h.std_err;
    Outcome::new(
        z <= 5.0 && (h.expected - oracle).abs() < 1e-12,
        format!("mean {:.5} +- {:.5} vs {oracle:.6} ({z:.2} standard errors)", h.mean_hits, h.std_err),
    )
}

#[test]
fn acceptance_criteria() {
    type Check = fn() -> Outcome;
    let criteria: [(u32, &str, Check, Option<u64>); 10] = [
        (1, "word-count bounds", renyi_bounds, Some(10)),
        (2, "cylinder tiling and lengths", cylinder_partition, Some(30)),
        (3, "full-word closure", full_word_closure, None),
        (4, "truncation convergence", truncation_convergence, None),
        (5, "exponent round-trip", exponent_roundtrip, Some(60)),
        (6, "local dimension", local_dimension_check, None),
        (7, "E(0,v) = W(v)", formula_consistency, None),
        (8, "dim_U at equal bases", dim_u_closed_form, None),
        (9, "covering exponents", covering_exponents, None),
        (10, "0-1 law hit counts", zero_one_law, Some(30)),
    ];
    let mut regressions = Vec::new();
    for (id, title, check, limit) in criteria {
        let t = Instant::now();
        let mut o = check();
        let took = t.elapsed();
        if let Some(s) = limit {
            if took.as_secs_f64() > s as f64 {
                o.pass = false;
                o.detail = format!("{} [over the {s}s budget]", o.detail);
            }
        }
        emit(id, title, &o, took);
        if !o.pass && o.unattainable.is_none() {
            regressions.push(id);
        }
    }
    assert!(regressions.is_empty(), "criteria failed: {regressions:?}");
}

#[test]
fn unattainable_levels_are_reported_not_hidden() {
    let two = BetaSystem::integer(2).unwrap();
    assert!(matches!(betadyn::cantor::target_sequences(1.0, 0.0, 12), Err(Error::BudgetExceeded(_))));
    let c = Construction::new(&two, &two, 1.0, 0.0, ConstructionOptions { levels: 12, ..Default::default() }).unwrap();
    assert!(c.levels_buildable < 12);
}
