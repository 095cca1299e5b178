use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Interval;

type Rational = BigRational;

/// Dense univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn constant_term(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = o.coeffs.get(i);
            c.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(c)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Multiply by `z`.
    pub fn shift_up(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(Rational::zero());
        c.extend(self.coeffs.iter().cloned());
        Poly { coeffs: c }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let f = &r[i] / &lead;
            for (j, c) in d.coeffs.iter().enumerate() {
                let t = &f * c;
                r[i - dd + j] -= t;
            }
            q[i - dd] = f;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead().recip();
        self.scale(&l)
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(BigInt::from(i))).collect(),
        )
    }

    /// `p / gcd(p, p')`, made monic.
    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation over an interval argument.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let bits = x.bits();
        let mut it = self.coeffs.iter().rev();
        let Some(first) = it.next() else {
            return Interval::point(&Rational::zero(), bits);
        };
        let mut acc = Interval::point(first, bits);
        for c in it {
            acc = acc.mul(x).add_rat(c);
        }
        acc
    }

    fn sign_at(&self, x: &Rational) -> i8 {
        let v = self.eval(x);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Sturm sequence `p, p', -rem(p_{i-1}, p_i), ...`.
    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        if seq.last().is_some_and(|p| p.is_zero()) {
            seq.pop();
        }
        seq
    }

    fn variations(seq: &[Poly], x: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for p in seq {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in `(a, b]` (Sturm's theorem).
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        if self.is_zero() || self.is_constant() {
            return 0;
        }
        let sf = self.squarefree();
        let seq = sf.sturm_sequence();
        Self::variations(&seq, a).saturating_sub(Self::variations(&seq, b))
    }

    /// Parse `z^2-z-1`, `x^3 - x^2 - 1`, `2z^2 + 1/2 z - 3` style input.
    pub fn parse(s: &str) -> Result<Poly, String> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut coeffs: Vec<Rational> = Vec::new();
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, t.strip_prefix('+').unwrap_or(&t)),
            };
            let var_pos = body.find(['z', 'x']);
            let (coef, power) = match var_pos {
                None => (parse_coef(body)?, 0usize),
                Some(p) => {
                    let c = body[..p].trim_end_matches('*');
                    let c = if c.is_empty() { Rational::one() } else { parse_coef(c)? };
                    let rest = &body[p + 1..];
                    let e = if rest.is_empty() {
                        1
                    } else if let Some(e) = rest.strip_prefix('^') {
                        e.parse::<usize>().map_err(|_| format!("bad exponent in term '{t}'"))?
                    } else {
                        return Err(format!("bad term '{t}'"));
                    };
                    (c, e)
                }
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Rational::zero());
            }
            coeffs[power] += coef * Rational::from_integer(BigInt::from(sign));
        }
        let p = Poly::new(coeffs);
        if p.is_zero() {
            return Err("polynomial is identically zero".into());
        }
        Ok(p)
    }
}

fn parse_coef(s: &str) -> Result<Rational, String> {
    super::parse::parse_rational(s).map_err(|e| e.to_string())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coef = !a.is_one() || i == 0;
            if show_coef {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        Ok(())
    }
}
