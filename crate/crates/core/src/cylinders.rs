//! Cylinder intervals `I_n(w)` and fullness.

use crate::beta::BetaSystem;
use crate::error::{Error, Result};
use crate::precision::Real;
use crate::symbolic::{format_word, is_admissible, successor, Word};

/// The set of points of `[0, 1)` whose first `n` digits are `word`.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub word: Word,
    pub left: Real,
    pub right: Real,
}

impl Cylinder {
    pub fn order(&self) -> usize {
        self.word.len()
    }

    pub fn length(&self) -> Real {
        self.right.sub(&self.left)
    }

    pub fn contains(&self, x: &Real) -> Result<bool> {
        Ok(x.cmp_exact(&self.left)?.is_ge() && x.cmp_exact(&self.right)?.is_lt())
    }
}

fn not_admissible(sys: &BetaSystem, w: &[u32]) -> Error {
    Error::NotAdmissible { word: format_word(w), context: format!(" for beta = {sys}") }
}

pub fn cylinder(sys: &BetaSystem, w: &[u32]) -> Result<Cylinder> {
    if !is_admissible(sys, w)? {
        return Err(not_admissible(sys, w));
    }
    let left = sys.value(w);
    let right = match successor(sys, w)? {
        Some(s) => sys.value(&s),
        None => sys.ring().one(),
    };
    Ok(Cylinder { word: w.to_vec(), left, right })
}

/// `|I_n(w)| = beta^-n`, decided exactly.
pub fn is_full(sys: &BetaSystem, w: &[u32]) -> Result<bool> {
    let c = cylinder(sys, w)?;
    let unit = sys.ring().beta_inv().pow(w.len() as u32);
    Ok(c.length().sub(&unit).is_zero())
}

/// Outcome of concatenating a full word with an admissible one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConcatCheck {
    pub admissible: bool,
    pub product_law: bool,
}

pub fn full_concat_check(sys: &BetaSystem, full_w: &[u32], any_w: &[u32]) -> Result<ConcatCheck> {
    if !is_full(sys, full_w)? {
        return Err(Error::PreconditionViolated(format!("{} is not a full word", format_word(full_w))));
    }
    let tail = cylinder(sys, any_w)?;
    let mut joined = full_w.to_vec();
    joined.extend_from_slice(any_w);
    if !is_admissible(sys, &joined)? {
        return Ok(ConcatCheck { admissible: false, product_law: false });
    }
    let head = cylinder(sys, full_w)?;
    let whole = cylinder(sys, &joined)?;
    let law = whole.length().sub(&head.length().mul(&tail.length())).is_zero();
    Ok(ConcatCheck { admissible: true, product_law: law })
}
