//! Closed-form Hausdorff dimensions of the exact-exponent sets.

use std::cmp::Ordering;

use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::beta::BetaSystem;
use crate::error::{Error, Result};
use crate::precision::{parse_rational, Rational};

/// Which branch produced a dimension value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    FullMeasure,
    CountableZero,
    #[serde(rename = "caseA-B")]
    CaseAB,
    #[serde(rename = "caseA-C")]
    CaseAC,
    WuSmall,
    WuLarge,
    Boundary,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::FullMeasure => "full-measure",
            Regime::CountableZero => "countable-zero",
            Regime::CaseAB => "caseA-B",
            Regime::CaseAC => "caseA-C",
            Regime::WuSmall => "wu-small",
            Regime::WuLarge => "wu-large",
            Regime::Boundary => "boundary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionResult {
    pub value: f64,
    pub regime: Regime,
    /// Whether `log_{b2} b1 > (vhat/v)(1+v)` held, so that the value is
    /// established and not only an upper bound.
    pub proved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_v: Option<f64>,
}

impl DimensionResult {
    fn new(value: f64, regime: Regime, proved: bool) -> Self {
        DimensionResult { value: value.clamp(0.0, 2.0), regime, proved, argmax_v: None }
    }
}

/// `log_{b2} b1`.
pub fn log_ratio(b1: &BetaSystem, b2: &BetaSystem) -> f64 {
    b1.ln() / b2.ln()
}

/// The three expressions `A`, `B`, `C`.
pub fn abc(vhat: f64, v: f64, l: f64) -> Result<(f64, f64, f64)> {
    if vhat.is_nan() || vhat < 0.0 || v.is_nan() || v < 0.0 {
        return Err(Error::Domain("exponents must be nonnegative".into()));
    }
    if !(l > 0.0 && l <= 1.0) {
        return Err(Error::Domain(format!("log ratio must lie in (0, 1], got {l}")));
    }
    if v.is_infinite() {
        // (v - vh - vh v)/((1+v)(v - vh)) -> 0
        return Ok((1.0 - l, 0.0, 1.0));
    }
    if v == vhat {
        return Err(Error::Domain(format!("v = vhat = {v} makes the expressions singular")));
    }
    let den = (1.0 + v) * (v - vhat);
    let g = (v - vhat - vhat * v) / den;
    let a = (1.0 + l) * g + 1.0 - l;
    let b = (1.0 + l) / l * g;
    let c = (v - vhat - v * vhat * (1.0 + 1.0 / l)) / den + 1.0;
    Ok((a, b, c))
}

fn exact_exponent(v: f64) -> Result<Rational> {
    Ok(parse_rational(&format!("{v}"))? + Rational::one())
}

/// Certified comparison of `b1^(1+v)` with `b2`.
pub fn compare_power(b1: &BetaSystem, b2: &BetaSystem, v: f64) -> Result<Ordering> {
    let lhs = (1.0 + v) * b1.ln();
    let rhs = b2.ln();
    if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1.0) {
        return Ok(lhs.partial_cmp(&rhs).unwrap());
    }
    let e = exact_exponent(v)?;
    let (p, q) = (e.numer().to_u32(), e.denom().to_u32());
    let (Some(p), Some(q)) = (p, q) else {
        return Err(Error::Ambiguous { bits: 0 });
    };
    // b1^(p/q) vs b2  <=>  b1^p vs b2^q
    if let (Some(x), Some(y)) = (b1.as_rational(), b2.as_rational()) {
        if p <= 1 << 14 && q <= 1 << 14 {
            return Ok(num_traits::pow(x, p as usize).cmp(&num_traits::pow(y, q as usize)));
        }
    }
    if b1.spec() == b2.spec() {
        return Ok(p.cmp(&q));
    }
    let ceiling = b1.policy().ceiling.min(1 << 14);
    let mut bits = b1.policy().bits;
    loop {
        let x = b1.enclosure(bits + 32).powi(p);
        let y = b2.enclosure(bits + 32).powi(q);
        if let Some(o) = x.partial_cmp_certified(&y) {
            return Ok(o);
        }
        if bits >= ceiling {
            return Err(Error::Ambiguous { bits });
        }
        bits = (bits * 2).min(ceiling);
    }
}

fn check_bases(b1: &BetaSystem, b2: &BetaSystem) -> Result<()> {
    if compare_power(b1, b2, 0.0)? == Ordering::Greater {
        return Err(Error::Domain(format!("need beta2 >= beta1, got beta1 = {b1}, beta2 = {b2}")));
    }
    Ok(())
}

fn check_exponent(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("{name} must be a nonnegative number or inf, got {x}")));
    }
    Ok(())
}

/// `hdim E(vhat, v)`: points with asymptotic exponent `v` and uniform exponent `vhat`.
pub fn dim_e(b1: &BetaSystem, b2: &BetaSystem, vhat: f64, v: f64) -> Result<DimensionResult> {
    check_bases(b1, b2)?;
    check_exponent("vhat", vhat)?;
    check_exponent("v", v)?;
    if vhat == 0.0 && v == 0.0 {
        return Ok(DimensionResult::new(2.0, Regime::FullMeasure, true));
    }
    if v.is_infinite() {
        return Ok(DimensionResult::new(0.0, Regime::CountableZero, true));
    }
    let edge = v / (1.0 + v);
    if vhat > edge && (vhat - edge).abs() > 1e-15 {
        return Ok(DimensionResult::new(0.0, Regime::CountableZero, true));
    }
    let l = log_ratio(b1, b2);
    let proved = !(vhat > 0.0 && l <= vhat / v * (1.0 + v));
    let (a, b, c) = abc(vhat, v, l)?;
    let (value, mut regime) = match compare_power(b1, b2, v)? {
        Ordering::Greater => (a.min(b), Regime::CaseAB),
        _ => (a.min(c), Regime::CaseAC),
    };
    if vhat > 0.0 && (vhat - edge).abs() <= 1e-12 * edge.max(1.0) {
        regime = Regime::Boundary;
    }
    Ok(DimensionResult::new(value, regime, proved))
}

/// `hdim W(v) = hdim A(v)`.
pub fn dim_w(b1: &BetaSystem, b2: &BetaSystem, v: f64) -> Result<DimensionResult> {
    check_bases(b1, b2)?;
    check_exponent("v", v)?;
    if v == 0.0 {
        return Ok(DimensionResult::new(2.0, Regime::FullMeasure, true));
    }
    if v.is_infinite() {
        return Ok(DimensionResult::new(0.0, Regime::CountableZero, true));
    }
    let l = log_ratio(b1, b2);
    let small = (2.0 + v - v * l) / (1.0 + v);
    Ok(match compare_power(b1, b2, v)? {
        Ordering::Less => DimensionResult::new(small, Regime::WuSmall, true),
        _ => {
            let large = (1.0 + l) / ((1.0 + v) * l);
            DimensionResult::new(small.min(large), Regime::WuLarge, true)
        }
    })
}

/// Upper end of the search range for the supremum over `v`.
pub const V_MAX: f64 = 1e6;

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol * (1.0 + a.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let x = (a + b) / 2.0;
    Ok((x, f(x)?))
}

/// `hdim {vhat(x, y) = vhat}` as `sup_v hdim E(vhat, v)`, maximized numerically.
pub fn dim_u(b1: &BetaSystem, b2: &BetaSystem, vhat: f64) -> Result<DimensionResult> {
    check_bases(b1, b2)?;
    check_exponent("vhat", vhat)?;
    if vhat == 0.0 {
        return Ok(DimensionResult::new(2.0, Regime::FullMeasure, true));
    }
    if vhat >= 1.0 {
        return Ok(DimensionResult::new(0.0, Regime::CountableZero, true));
    }
    let v0 = vhat / (1.0 - vhat);
    let f = |v: f64| dim_e(b1, b2, vhat, v).map(|r| r.value);
    let n = 4000;
    let (lo, hi) = (v0.ln(), V_MAX.ln());
    let grid: Vec<f64> = (0..=n).map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp()).collect();
    let vals: Vec<f64> = grid.iter().map(|&v| f(v)).collect::<Result<_>>()?;
    let (best, _) =
        vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &y)| if y > acc.1 { (i, y) } else { acc });
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n)];
    let (mut arg, mut val) = golden_max(&f, a, b, 1e-12)?;
    if vals[best] > val {
        arg = grid[best];
        val = vals[best];
    }
    // the v -> inf limit of every branch is 0
    if val < 0.0 {
        arg = f64::INFINITY;
        val = 0.0;
    }
    let at = dim_e(b1, b2, vhat, arg)?;
    Ok(DimensionResult { value: val.clamp(0.0, 2.0), regime: at.regime, proved: at.proved, argmax_v: Some(arg) })
}
