//! C ABI over the planner, the language registry and the metrics.
//!
//! Conventions: functions return an [`LmStatus`]; results go through out
//! pointers. On failure a message is available from
//! [`lm_last_error_message`] on the same thread. Objects are opaque handles
//! released with their `_free` function, and strings handed out by the
//! library are released with [`lm_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lingomix::eval::cider;
use lingomix::eval::metrics;
use lingomix::planner::{allocate, AllocationSpec, MixPlan};
use lingomix::registry::{LanguageSetup, Registry};
use lingomix::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    UnknownLanguage = 3,
    InvalidInput = 4,
    OutOfRange = 5,
    Io = 6,
    ServiceUnavailable = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

fn status_of(err: &Error) -> LmStatus {
    match err {
        Error::UnknownLanguage(_) => LmStatus::UnknownLanguage,
        Error::Io { .. } | Error::Image(_) => LmStatus::Io,
        Error::ServiceUnavailable { .. } => LmStatus::ServiceUnavailable,
        _ => LmStatus::InvalidInput,
    }
}

struct Fail(LmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LmStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(LmStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LmStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

fn opt_str<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        unsafe { str_arg(p, name).map(Some) }
    }
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail(LmStatus::NullArgument, format!("`{name}` is null")))
}

fn to_c(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(LmStatus::InvalidInput, "string contains a nul byte".into()))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn lm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque training mix plan.
pub struct LmPlan {
    plan: MixPlan,
}

/// Allocate a budget. `english_fraction` accepts "0.5", "50%" or "1/2";
/// `setup` is one of english, t5, t5-t4, t5-t3, t5-t2, l100; a null
/// `distribution` means uniform.
#[no_mangle]
pub unsafe extern "C" fn lm_plan_allocate(
    budget: u64,
    english_fraction: *const c_char,
    setup: *const c_char,
    distribution: *const c_char,
    out: *mut *mut LmPlan,
) -> LmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let fraction = str_arg(english_fraction, "english_fraction")?.parse()?;
        let setup: LanguageSetup = str_arg(setup, "setup")?.parse()?;
        let dist = opt_str(distribution, "distribution")?.unwrap_or("uniform").parse()?;
        let spec = AllocationSpec::for_setup(budget, fraction, setup, dist);
        let plan = allocate(&spec)?;
        *out = Box::into_raw(Box::new(LmPlan { plan }));
        Ok(())
    })
}

/// Parse a plan previously written with [`lm_plan_to_json`].
#[no_mangle]
pub unsafe extern "C" fn lm_plan_from_json(json: *const c_char, out: *mut *mut LmPlan) -> LmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let plan = MixPlan::from_json_str(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(LmPlan { plan }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_plan_free(plan: *mut LmPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Serialize the plan; free the result with [`lm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lm_plan_to_json(plan: *const LmPlan, out: *mut *mut c_char) -> LmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let plan = plan.as_ref().ok_or(Fail(LmStatus::NullArgument, "`plan` is null".into()))?;
        *out = to_c(plan.plan.to_json_string())?;
        Ok(())
    })
}

/// English share of the plan. Returns 0 for a null plan.
#[no_mangle]
pub unsafe extern "C" fn lm_plan_english(plan: *const LmPlan) -> u64 {
    plan.as_ref().map_or(0, |p| p.plan.english)
}

/// Sum of all counts, English included. Returns 0 for a null plan.
#[no_mangle]
pub unsafe extern "C" fn lm_plan_total(plan: *const LmPlan) -> u64 {
    plan.as_ref().map_or(0, |p| p.plan.total())
}

/// Number of entries (English first, then canonical language order).
#[no_mangle]
pub unsafe extern "C" fn lm_plan_len(plan: *const LmPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.plan.entries().count())
}

/// Entry `index`: its language code (free with [`lm_string_free`]) and count.
#[no_mangle]
pub unsafe extern "C" fn lm_plan_entry(
    plan: *const LmPlan,
    index: usize,
    code_out: *mut *mut c_char,
    count_out: *mut u64,
) -> LmStatus {
    guard(|| {
        let plan = plan.as_ref().ok_or(Fail(LmStatus::NullArgument, "`plan` is null".into()))?;
        let code_out = out_arg(code_out, "code_out")?;
        let count_out = out_arg(count_out, "count_out")?;
        let (lang, count) = plan
            .plan
            .entries()
            .nth(index)
            .ok_or_else(|| Fail(LmStatus::OutOfRange, format!("no entry {index}")))?;
        *code_out = to_c(lang.code.to_owned())?;
        *count_out = count;
        Ok(())
    })
}

/// Count for one language (aliases accepted); 0 when it is not in the plan.
#[no_mangle]
pub unsafe extern "C" fn lm_plan_count(plan: *const LmPlan, code: *const c_char, out: *mut u64) -> LmStatus {
    guard(|| {
        let plan = plan.as_ref().ok_or(Fail(LmStatus::NullArgument, "`plan` is null".into()))?;
        let out = out_arg(out, "out")?;
        let lang = Registry::global().lookup(str_arg(code, "code")?)?;
        *out = plan.plan.count(lang.code);
        Ok(())
    })
}

/// Resource tier (0 to 5) of a language code or alias.
#[no_mangle]
pub unsafe extern "C" fn lm_language_tier(code: *const c_char, out: *mut u8) -> LmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Registry::global().lookup(str_arg(code, "code")?)?.tier.index();
        Ok(())
    })
}

/// Canonical code for a code or alias; free with [`lm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lm_language_canonical(code: *const c_char, out: *mut *mut c_char) -> LmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = to_c(Registry::global().lookup(str_arg(code, "code")?)?.code.to_owned())?;
        Ok(())
    })
}

/// 1 if the prediction matches, 0 if not; `out` receives the result.
#[no_mangle]
pub unsafe extern "C" fn lm_exact_match(prediction: *const c_char, gold: *const c_char, out: *mut u8) -> LmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = metrics::exact_match(str_arg(prediction, "prediction")?, str_arg(gold, "gold")?);
        Ok(())
    })
}

/// Like [`lm_exact_match`], but a leading choice letter also counts.
#[no_mangle]
pub unsafe extern "C" fn lm_relaxed_match(prediction: *const c_char, gold: *const c_char, out: *mut u8) -> LmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = metrics::relaxed_match(str_arg(prediction, "prediction")?, str_arg(gold, "gold")?);
        Ok(())
    })
}

/// Opaque CIDEr-D accumulator: add items, then compute once.
#[derive(Default)]
pub struct LmCider {
    candidates: Vec<String>,
    references: Vec<Vec<String>>,
    per_item: Vec<f64>,
}

#[no_mangle]
pub extern "C" fn lm_cider_new() -> *mut LmCider {
    Box::into_raw(Box::default())
}

#[no_mangle]
pub unsafe extern "C" fn lm_cider_free(c: *mut LmCider) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Add one candidate with `n_refs` reference captions.
#[no_mangle]
pub unsafe extern "C" fn lm_cider_add(
    c: *mut LmCider,
    candidate: *const c_char,
    refs: *const *const c_char,
    n_refs: usize,
) -> LmStatus {
    guard(|| {
        let c = out_arg(c, "cider")?;
        let candidate = str_arg(candidate, "candidate")?.to_owned();
        if refs.is_null() && n_refs > 0 {
            return Err(Fail(LmStatus::NullArgument, "`refs` is null".into()));
        }
        let mut rs = Vec::with_capacity(n_refs);
        for i in 0..n_refs {
            rs.push(str_arg(*refs.add(i), "refs[i]")?.to_owned());
        }
        c.candidates.push(candidate);
        c.references.push(rs);
        c.per_item.clear();
        Ok(())
    })
}

/// Corpus CIDEr-D (0 to 10) over all added items.
#[no_mangle]
pub unsafe extern "C" fn lm_cider_compute(c: *mut LmCider, out: *mut f64) -> LmStatus {
    guard(|| {
        let c = out_arg(c, "cider")?;
        let out = out_arg(out, "out")?;
        let scores = cider::cider(&c.candidates, &c.references)?;
        c.per_item = scores.per_item;
        *out = scores.corpus;
        Ok(())
    })
}

/// Score of item `index` from the last [`lm_cider_compute`].
#[no_mangle]
pub unsafe extern "C" fn lm_cider_item(c: *const LmCider, index: usize, out: *mut f64) -> LmStatus {
    guard(|| {
        let c = c.as_ref().ok_or(Fail(LmStatus::NullArgument, "`cider` is null".into()))?;
        let out = out_arg(out, "out")?;
        *out = *c
            .per_item
            .get(index)
            .ok_or_else(|| Fail(LmStatus::OutOfRange, format!("no computed score for item {index}")))?;
        Ok(())
    })
}
