//! C ABI over `betadyn`. Every fallible call returns a `BetadynStatus`;
//! on failure `betadyn_last_error` describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use betadyn::beta::BetaSystem;
use betadyn::dimension::{dim_e, dim_u, dim_w, DimensionResult, Regime};
use betadyn::precision::parse_rational;
use betadyn::symbolic::{count_words, is_admissible, CountMethod, Word};
use betadyn::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetadynStatus {
    Ok = 0,
    NullPointer,
    Utf8,
    Parse,
    Domain,
    Ambiguous,
    UndecidedParry,
    InvalidTruncation,
    DegenerateRoot,
    NotAdmissible,
    BudgetExceeded,
    AutomatonUnavailable,
    PreconditionViolated,
    RegimeUnsupported,
    SparsityViolated,
    ConditionViolated,
    SlotLengthMismatch,
    InvalidRoot,
    Panic,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetadynRegime {
    FullMeasure = 0,
    CountableZero,
    CaseAB,
    CaseAC,
    WuSmall,
    WuLarge,
    Boundary,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetadynDimension {
    pub value: f64,
    pub regime: BetadynRegime,
    pub proved: bool,
    /// NaN unless the value comes from an optimization over `v`.
    pub argmax_v: f64,
}

/// A base `beta > 1`. Create with `betadyn_beta_new`, release with `betadyn_beta_free`.
pub struct BetadynBeta {
    inner: BetaSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BetadynStatus {
    use BetadynStatus as S;
    match e {
        Error::Parse(_) => S::Parse,
        Error::Domain(_) => S::Domain,
        Error::Ambiguous { .. } => S::Ambiguous,
        Error::UndecidedParry(_) => S::UndecidedParry,
        Error::InvalidTruncation { .. } => S::InvalidTruncation,
        Error::DegenerateRoot { .. } => S::DegenerateRoot,
        Error::NotAdmissible { .. } => S::NotAdmissible,
        Error::BudgetExceeded(_) => S::BudgetExceeded,
        Error::AutomatonUnavailable(_) => S::AutomatonUnavailable,
        Error::PreconditionViolated(_) => S::PreconditionViolated,
        Error::RegimeUnsupported(_) => S::RegimeUnsupported,
        Error::SparsityViolated { .. } => S::SparsityViolated,
        Error::ConditionViolated(_) => S::ConditionViolated,
        Error::SlotLengthMismatch { .. } => S::SlotLengthMismatch,
        Error::InvalidRoot(_) => S::InvalidRoot,
    }
}

enum Fail {
    Null,
    Utf8,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BetadynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BetadynStatus::Ok,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            BetadynStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not valid UTF-8".into());
            BetadynStatus::Utf8
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            BetadynStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn beta_arg<'a>(p: *const BetadynBeta) -> Result<&'a BetaSystem, Fail> {
    p.as_ref().map(|b| &b.inner).ok_or(Fail::Null)
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

unsafe fn write_digits(out: *mut u32, ds: &[u32]) -> Result<(), Fail> {
    if ds.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(Fail::Null);
    }
    ptr::copy_nonoverlapping(ds.as_ptr(), out, ds.len());
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn betadyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a base: an integer, a rational `p/q`, `phi`, or `root:<poly>:[lo,hi]`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn betadyn_beta_new(spec: *const c_char, out: *mut *mut BetadynBeta) -> BetadynStatus {
    guard(|| {
        let out = out_arg(out)?;
        let inner = BetaSystem::parse(str_arg(spec)?)?;
        *out = Box::into_raw(Box::new(BetadynBeta { inner }));
        Ok(())
    })
}

/// # Safety
/// `beta` must come from `betadyn_beta_new` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn betadyn_beta_free(beta: *mut BetadynBeta) {
    if !beta.is_null() {
        drop(Box::from_raw(beta));
    }
}

/// # Safety
/// `beta` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn betadyn_beta_value(beta: *const BetadynBeta, out: *mut f64) -> BetadynStatus {
    guard(|| {
        *out_arg(out)? = beta_arg(beta)?.to_f64();
        Ok(())
    })
}

/// First `n` digits of `num/den` in base `beta` into `out[0..n]`.
///
/// # Safety
/// `out` must have room for `n` values.
#[no_mangle]
pub unsafe extern "C" fn betadyn_digits(
    beta: *const BetadynBeta,
    num: u64,
    den: u64,
    n: usize,
    out: *mut u32,
) -> BetadynStatus {
    guard(|| {
        let b = beta_arg(beta)?;
        let x = parse_rational(&format!("{num}/{den}"))?;
        let ds = b.digits_of_rational(&x, n)?;
        write_digits(out, &ds)
    })
}

/// First `n` digits of the quasi-greedy expansion of 1 into `out[0..n]`.
///
/// # Safety
/// `out` must have room for `n` values.
#[no_mangle]
pub unsafe extern "C" fn betadyn_eps_star(beta: *const BetadynBeta, n: usize, out: *mut u32) -> BetadynStatus {
    guard(|| {
        let ds = beta_arg(beta)?.epsilon_star(n)?;
        write_digits(out, &ds)
    })
}

/// Number of admissible words of length `n`; `BUDGET_EXCEEDED` if it does not fit in 64 bits.
///
/// # Safety
/// `beta` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn betadyn_count_words(beta: *const BetadynBeta, n: usize, out: *mut u64) -> BetadynStatus {
    guard(|| {
        let c = count_words(beta_arg(beta)?, n, CountMethod::Automaton)?;
        let c: u64 = c.try_into().map_err(|_| Error::BudgetExceeded(format!("count for n = {n} exceeds 64 bits")))?;
        *out_arg(out)? = c;
        Ok(())
    })
}

/// # Safety
/// `word` must point to `len` digits (it may be NULL when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn betadyn_is_admissible(
    beta: *const BetadynBeta,
    word: *const u32,
    len: usize,
    out: *mut bool,
) -> BetadynStatus {
    guard(|| {
        let w: Word = if len == 0 {
            Vec::new()
        } else if word.is_null() {
            return Err(Fail::Null);
        } else {
            std::slice::from_raw_parts(word, len).to_vec()
        };
        *out_arg(out)? = is_admissible(beta_arg(beta)?, &w)?;
        Ok(())
    })
}

fn dimension(d: DimensionResult) -> BetadynDimension {
    let regime = match d.regime {
        Regime::FullMeasure => BetadynRegime::FullMeasure,
        Regime::CountableZero => BetadynRegime::CountableZero,
        Regime::CaseAB => BetadynRegime::CaseAB,
        Regime::CaseAC => BetadynRegime::CaseAC,
        Regime::WuSmall => BetadynRegime::WuSmall,
        Regime::WuLarge => BetadynRegime::WuLarge,
        Regime::Boundary => BetadynRegime::Boundary,
    };
    BetadynDimension { value: d.value, regime, proved: d.proved, argmax_v: d.argmax_v.unwrap_or(f64::NAN) }
}

/// Dimension of the set with exact exponents `(vhat, v)`; `v` may be `INFINITY`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn betadyn_dim_e(
    beta1: *const BetadynBeta,
    beta2: *const BetadynBeta,
    vhat: f64,
    v: f64,
    out: *mut BetadynDimension,
) -> BetadynStatus {
    guard(|| {
        *out_arg(out)? = dimension(dim_e(beta_arg(beta1)?, beta_arg(beta2)?, vhat, v)?);
        Ok(())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn betadyn_dim_w(
    beta1: *const BetadynBeta,
    beta2: *const BetadynBeta,
    v: f64,
    out: *mut BetadynDimension,
) -> BetadynStatus {
    guard(|| {
        *out_arg(out)? = dimension(dim_w(beta_arg(beta1)?, beta_arg(beta2)?, v)?);
        Ok(())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn betadyn_dim_u(
    beta1: *const BetadynBeta,
    beta2: *const BetadynBeta,
    vhat: f64,
    out: *mut BetadynDimension,
) -> BetadynStatus {
    guard(|| {
        *out_arg(out)? = dimension(dim_u(beta_arg(beta1)?, beta_arg(beta2)?, vhat)?);
        Ok(())
    })
}
