//! Command-line front end. `run` maps argv to an exit code and the text to print.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::beta::{BetaSystem, ParryStatus};
use crate::cantor::{
    ln_measures, local_dimension_limit, Construction, ConstructionOptions, LevelOptions, RandomFiller, ZeroFiller,
    DEFAULT_DIGIT_BUDGET,
};
use crate::cylinders::{cylinder, is_full};
use crate::dimension::{dim_e, dim_u, dim_w, DimensionResult};
use crate::error::{Error, Result};
use crate::estimation::{count_blocked, cover_w, cover_w_min, ln_blocked_bound, Strategy};
use crate::exponents::{estimate_exponents, hit_statistics, run_records};
use crate::precision::{parse_rational, rat_to_f64, PrecisionPolicy, Real, DEFAULT_BITS, MIN_BITS};
use crate::symbolic::{count_words, format_word, is_admissible, parse_word, CountMethod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Parser, Debug)]
#[command(name = "betadyn", version, about = "Beta-expansions, approximation exponents and dimension formulas")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Working precision in bits for algebraic bases.
    #[arg(long, env = "BETADYN_PRECISION", default_value_t = DEFAULT_BITS, global = true)]
    precision: u32,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Pair {
    /// First base (integer, rational, `phi`, or `root:<poly>:[lo,hi]`).
    #[arg(long)]
    beta1: String,
    /// Second base, at least the first.
    #[arg(long)]
    beta2: String,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Greedy digits of a rational point.
    Expand {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        n: usize,
    },
    /// Quasi-greedy expansion of 1.
    EpsStar {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        n: usize,
    },
    /// Truncation base beta_N.
    BetaN {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        n: usize,
    },
    /// Parry admissibility of a comma-separated word.
    Admissible {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        word: String,
    },
    /// Number of admissible words of length n.
    Count {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "automaton")]
        method: String,
    },
    /// Endpoints and length of a cylinder.
    Cylinder {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        word: String,
    },
    /// Run records and exponent estimates for a pair of rational points.
    Exponents {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 256)]
        depth: usize,
        /// Keep every record entry instead of the non-decreasing-gap subsequence.
        #[arg(long)]
        unfiltered: bool,
    },
    /// Dimension of the exact-exponent set E(vhat, v).
    DimE {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        vhat: f64,
        #[arg(long)]
        v: String,
    },
    /// Dimension of W(v).
    DimW {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        v: String,
    },
    /// Dimension of the uniform-exponent set U(vhat).
    DimU {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        vhat: f64,
    },
    /// Build a point of the Cantor construction and measure its exponents.
    Construct {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        v: f64,
        #[arg(long)]
        vhat: f64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Separator length N (default: smallest valid).
        #[arg(long)]
        sep: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fill free slots with zeros instead of random words.
        #[arg(long)]
        zero_fill: bool,
        #[arg(long, default_value_t = DEFAULT_DIGIT_BUDGET)]
        budget: usize,
        /// Allow parameters violating the log condition.
        #[arg(long)]
        no_enforce: bool,
        /// Include the first k digits of each coordinate.
        #[arg(long, default_value_t = 0)]
        emit_digits: usize,
    },
    /// Mass distribution and local dimension per level.
    Measure {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        v: f64,
        #[arg(long)]
        vhat: f64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long)]
        sep: Option<usize>,
        #[arg(long)]
        no_enforce: bool,
    },
    /// Generation-n covering count for W(v).
    Cover {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        v: f64,
        #[arg(long)]
        n: usize,
        /// small, large, min, or both.
        #[arg(long, default_value = "both")]
        strategy: String,
    },
    /// Pairs of words with forced zero blocks, e.g. `--profile 2-4,6-8`.
    Blocked {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value = "")]
        profile: String,
        #[arg(long)]
        n: usize,
    },
    /// Monte Carlo hit counts for the 0-1 law.
    McHits {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        v: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A real rounded to 12 significant digits.
fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    json!(r)
}

fn big(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => Value::String(n.to_str_radix(10)),
    }
}

fn real_with_width(x: &Real, bits: u32) -> (Value, Value) {
    let e = x.enclosure(bits);
    (real(x.to_f64()), real(rat_to_f64(&e.width())))
}

fn to_value<T: Serialize + ?Sized>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

fn dimension(d: &DimensionResult) -> Value {
    let mut v = json!({ "value": real(d.value), "regime": d.regime.tag(), "proved": d.proved });
    if let Some(a) = d.argmax_v {
        v["argmax_v"] = real(a);
    }
    v
}

fn parse_v(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| Error::Parse(format!("not a number: {t:?}"))),
    }
}

fn parse_profile(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p.split_once('-').ok_or_else(|| Error::Parse(format!("expected a-b, got {p:?}")))?;
            let n = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index {t:?}")));
            Ok((n(a)?, n(b)?))
        })
        .collect()
}

fn parry(s: &ParryStatus) -> Value {
    match s {
        ParryStatus::Simple { n, last_digit } => json!({ "kind": "simple", "length": n, "last_digit": last_digit }),
        ParryStatus::Periodic { pre, period } => {
            json!({ "kind": "periodic", "preperiod": pre, "period": period })
        }
        ParryStatus::NoWithinDepth(d) => json!({ "kind": "undecided", "depth": d }),
        ParryStatus::Unknown => json!({ "kind": "unknown" }),
    }
}

fn execute(cmd: Cmd, policy: PrecisionPolicy) -> Result<Value> {
    let sys = |s: &str| BetaSystem::parse_with(s, policy);
    let pair = |p: &Pair| -> Result<(BetaSystem, BetaSystem)> { Ok((sys(&p.beta1)?, sys(&p.beta2)?)) };
    let bits = policy.bits;
    Ok(match cmd {
        Cmd::Expand { beta, x, n } => {
            let b = sys(&beta)?;
            let x = b.element(&parse_rational(&x)?);
            let (digits, rest) = b.orbit(&x, n)?;
            let (r, w) = real_with_width(&rest, bits);
            json!({ "digits": digits, "remainder": r, "enclosure_width": w })
        }
        Cmd::EpsStar { beta, n } => {
            let b = sys(&beta)?;
            let eps = b.epsilon_star(n)?;
            json!({ "eps_star": eps, "parry": parry(&b.simple_parry()?) })
        }
        Cmd::BetaN { beta, n } => {
            let b = sys(&beta)?;
            let root = b.beta_truncation(n)?;
            let e = root.enclosure(bits);
            json!({
                "n": n,
                "value": real(root.to_f64()),
                "enclosure_width": real(rat_to_f64(&e.width())),
                "polynomial": b.truncation_poly(n)?.to_string(),
            })
        }
        Cmd::Admissible { beta, word } => {
            json!({ "admissible": is_admissible(&sys(&beta)?, &parse_word(&word)?)? })
        }
        Cmd::Count { beta, n, method } => {
            let m: CountMethod = method.parse()?;
            json!({ "count": big(&count_words(&sys(&beta)?, n, m)?) })
        }
        Cmd::Cylinder { beta, word } => {
            let b = sys(&beta)?;
            let w = parse_word(&word)?;
            let c = cylinder(&b, &w)?;
            let (l, _) = real_with_width(&c.left, bits);
            let (r, _) = real_with_width(&c.right, bits);
            let (len, width) = real_with_width(&c.length(), bits);
            json!({
                "word": format_word(&w),
                "left": l,
                "right": r,
                "length": len,
                "enclosure_width": width,
                "full": is_full(&b, &w)?,
            })
        }
        Cmd::Exponents { pair: p, x, y, depth, unfiltered } => {
            let (b1, b2) = pair(&p)?;
            let dx = b1.digits_of_rational(&parse_rational(&x)?, depth)?;
            let dy = b2.digits_of_rational(&parse_rational(&y)?, depth)?;
            let est = estimate_exponents(&run_records(&dx, &dy, depth, !unfiltered));
            let mut v = to_value(&est);
            for k in ["v_est", "vhat_est", "v_global", "vhat_global"] {
                v[k] = real(v[k].as_f64().unwrap_or(f64::NAN));
            }
            v
        }
        Cmd::DimE { pair: p, vhat, v } => {
            let (b1, b2) = pair(&p)?;
            dimension(&dim_e(&b1, &b2, vhat, parse_v(&v)?)?)
        }
        Cmd::DimW { pair: p, v } => {
            let (b1, b2) = pair(&p)?;
            dimension(&dim_w(&b1, &b2, parse_v(&v)?)?)
        }
        Cmd::DimU { pair: p, vhat } => {
            let (b1, b2) = pair(&p)?;
            dimension(&dim_u(&b1, &b2, vhat)?)
        }
        Cmd::Construct { pair: p, v, vhat, levels, sep, seed, zero_fill, budget, no_enforce, emit_digits } => {
            let (b1, b2) = pair(&p)?;
            let opts = ConstructionOptions {
                levels,
                sep,
                digit_budget: budget,
                level: LevelOptions { enforce_condition: !no_enforce, ..Default::default() },
            };
            let c = Construction::new(&b1, &b2, v, vhat, opts)?;
            let point = if zero_fill { c.sample(&mut ZeroFiller)? } else { c.sample(&mut RandomFiller::new(seed))? };
            let depth = point.x.len().min(point.y.len());
            let est = estimate_exponents(&run_records(&point.x, &point.y, depth, true));
            let mut out = json!({
                "sep": c.spec.sep,
                "scale": c.spec.targets.scale,
                "condition_holds": c.spec.condition_holds,
                "levels_requested": c.levels_requested,
                "levels_built": point.levels,
                "levels": to_value(&c.spec.levels[..point.levels]),
                "v_est": real(est.v_est),
                "vhat_est": real(est.vhat_est),
                "record_entries": est.records.pairs.len(),
            });
            if emit_digits > 0 {
                let show = |d: &[u8]| d.iter().take(emit_digits).map(|x| char::from(b'0' + x)).collect::<String>();
                out["x_digits"] = json!(show(&point.x));
                out["y_digits"] = json!(show(&point.y));
            }
            out
        }
        Cmd::Measure { pair: p, v, vhat, levels, sep, no_enforce } => {
            let (b1, b2) = pair(&p)?;
            let opts = ConstructionOptions {
                levels,
                sep,
                digit_budget: usize::MAX,
                level: LevelOptions { enforce_condition: !no_enforce, ..Default::default() },
            };
            let c = Construction::new(&b1, &b2, v, vhat, opts)?;
            let ms = ln_measures(&c.spec, &c.slots, c.spec.levels.len())?;
            let rows: Vec<Value> = ms
                .iter()
                .zip(&c.spec.levels)
                .enumerate()
                .map(|(k, (&(r, q), lv))| {
                    json!({
                        "level": k + 1,
                        "h": lv.h,
                        "ln_mu_r": real(r),
                        "ln_mu_q": real(q),
                        "local_dimension": real(-q / (lv.h as f64 * b2.ln())),
                    })
                })
                .collect();
            json!({
                "sep": c.spec.sep,
                "limit": real(local_dimension_limit(&b1, &b2, &c.slots, v, vhat)),
                "rows": rows,
            })
        }
        Cmd::Cover { pair: p, v, n, strategy } => {
            let (b1, b2) = pair(&p)?;
            let row = |r: crate::estimation::CoverReport| json!({ "n": r.n, "strategy": to_value(&r.strategy), "count": big(&r.count), "exponent": real(r.exponent) });
            match strategy.as_str() {
                "both" => json!({ "rows": [
                    row(cover_w(&b1, &b2, v, n, Strategy::SmallSquare)?),
                    row(cover_w(&b1, &b2, v, n, Strategy::LargeSquare)?),
                ] }),
                "min" => row(cover_w_min(&b1, &b2, v, n)?),
                s => row(cover_w(&b1, &b2, v, n, s.parse()?)?),
            }
        }
        Cmd::Blocked { pair: p, profile, n } => {
            let (b1, b2) = pair(&p)?;
            let prof = parse_profile(&profile)?;
            json!({
                "count": big(&count_blocked(&b1, &b2, &prof, n)?),
                "ln_upper_bound": real(ln_blocked_bound(&b1, &b2, &prof, n)?),
            })
        }
        Cmd::McHits { pair: p, v, steps, trials, seed } => {
            let (b1, b2) = pair(&p)?;
            let h = hit_statistics(&b1, &b2, v, steps, trials, seed)?;
            json!({
                "trials": h.trials,
                "mean_hits": real(h.mean_hits),
                "std_err": real(h.std_err),
                "expected": real(h.expected),
            })
        }
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_cell(v: &Value) -> String {
    let s = scalar(v);
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn csv_table(rows: &[Map<String, Value>]) -> String {
    let Some(first) = rows.first() else { return String::new() };
    let keys: Vec<&String> = first.keys().collect();
    let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = keys.iter().map(|k| csv_cell(r.get(*k).unwrap_or(&Value::Null))).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).unwrap_or_default()),
        Format::Plain => match v {
            Value::Object(m) => m.iter().map(|(k, x)| format!("{k}: {}\n", scalar(x))).collect(),
            other => format!("{}\n", scalar(other)),
        },
        Format::Csv => match v {
            Value::Object(m) => {
                let rows = m.get("rows").and_then(Value::as_array);
                match rows {
                    Some(rs) => csv_table(&rs.iter().filter_map(|r| r.as_object().cloned()).collect::<Vec<_>>()),
                    None => csv_table(std::slice::from_ref(m)),
                }
            }
            other => format!("{}\n", scalar(other)),
        },
    }
}

fn error_value(e: &Error) -> Value {
    json!({ "error": e.kind(), "message": e.to_string() })
}

/// Parse `argv` (including the program name) and run the subcommand.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    if cli.precision < MIN_BITS {
        let e = Error::Domain(format!("precision must be at least {MIN_BITS} bits, got {}", cli.precision));
        return (1, render(&error_value(&e), Format::Json));
    }
    let result = PrecisionPolicy::with_bits(cli.precision).and_then(|p| execute(cli.cmd, p));
    match result {
        Ok(v) => (0, render(&v, cli.format)),
        Err(e) => (2, render(&error_value(&e), cli.format)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &str) -> (i32, Value) {
        let argv = std::iter::once("betadyn").chain(args.split_whitespace());
        let (code, out) = run(argv);
        (code, serde_json::from_str(&out).unwrap_or(Value::String(out)))
    }

    #[test]
    fn rounding() {
        assert_eq!(real(4.0 / 7.0), json!(0.571428571429));
        assert_eq!(real(f64::INFINITY), json!("inf"));
    }

    #[test]
    fn profiles() {
        assert_eq!(parse_profile("2-4, 6-8").unwrap(), vec![(2, 4), (6, 8)]);
        assert_eq!(parse_profile("").unwrap(), vec![]);
        assert!(parse_profile("2:4").is_err());
    }

    #[test]
    fn examples() {
        let (c, v) = call("dim-e --beta1 2 --beta2 2 --vhat 0.3 --v 1");
        assert_eq!(c, 0);
        assert_eq!(v["regime"], "caseA-B");
        assert_eq!(v["proved"], true);
        assert!((v["value"].as_f64().unwrap() - 4.0 / 7.0).abs() < 1e-11);
        assert_eq!(call("count --beta root:z^2-z-1:[1.6,1.7] --n 5").1["count"], 13);
        assert_eq!(call("admissible --beta root:z^2-z-1:[1.6,1.7] --word 1,1").1["admissible"], false);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call("--help").0, 0);
        assert_eq!(call("frobnicate").0, 1);
        let (c, v) = call("beta-n --beta 2 --n 1");
        assert_eq!(c, 2);
        assert_eq!(v["error"], "degenerate-root");
        assert_eq!(call("count --beta 2 --n 3 --precision 32").0, 1);
    }

    #[test]
    fn csv_rows() {
        let (c, out) =
            run(["betadyn", "--format", "csv", "cover", "--beta1", "2", "--beta2", "5", "--v", "1", "--n", "6"]);
        assert_eq!(c, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("exponent"));
    }
}
