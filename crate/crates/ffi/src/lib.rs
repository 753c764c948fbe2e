//! C ABI for the equivalence checker.
//!
//! Programs are opaque handles created from C source text. Every entry
//! point returns a [`CfgkatStatus`]; on failure the message is available
//! from [`cfgkat_last_error_message`] on the same thread. Strings handed
//! out by the library must be released with [`cfgkat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cfgkat::driver::{equiv, EquivalenceReport};
use cfgkat::frontend::{lift_pair, lift_source, parse_function, FrontendError, IndicatorChoice};
use cfgkat::syntax::Exp;
use cfgkat::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfgkatStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The source could not be parsed or lifted.
    Frontend = 3,
    /// The lifted program is malformed (for example an undefined label).
    InvalidProgram = 4,
    TooManyTests = 5,
    /// The report could not be serialized.
    Serialization = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 99,
}

/// A lifted program.
pub struct CfgkatProgram {
    exp: Exp,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(CfgkatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::InvalidProgram(_) | Error::UnknownId(_) | Error::AlphabetMismatch(_) => CfgkatStatus::InvalidProgram,
            Error::TooManyTests { .. } => CfgkatStatus::TooManyTests,
            Error::Frontend(_) => CfgkatStatus::Frontend,
        };
        Failure(code, e.to_string())
    }
}

impl From<FrontendError> for Failure {
    fn from(e: FrontendError) -> Failure {
        Failure(CfgkatStatus::Frontend, e.to_string())
    }
}

/// Runs `f`, recording any failure or panic as the last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CfgkatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfgkatStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal error");
            CfgkatStatus::Internal
        }
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(CfgkatStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(CfgkatStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Null selects the indicator automatically, an empty string disables it.
unsafe fn indicator_choice(p: *const c_char) -> Result<IndicatorChoice, Failure> {
    if p.is_null() {
        return Ok(IndicatorChoice::Auto);
    }
    Ok(match text(p, "indicator")? {
        "" => IndicatorChoice::Disabled,
        name => IndicatorChoice::Named(name.to_string()),
    })
}

unsafe fn program<'a>(p: *const CfgkatProgram, what: &str) -> Result<&'a CfgkatProgram, Failure> {
    p.as_ref().ok_or_else(|| Failure(CfgkatStatus::NullArgument, format!("{what} is null")))
}

fn null_out(what: &str) -> Failure {
    Failure(CfgkatStatus::NullArgument, format!("{what} is null"))
}

/// Parses `source`, lifts function `function` and stores a new handle in
/// `*out`.
///
/// `indicator` may be null (detect automatically), empty (no indicator)
/// or a variable name.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn cfgkat_program_from_c(
    source: *const c_char,
    function: *const c_char,
    indicator: *const c_char,
    out: *mut *mut CfgkatProgram,
) -> CfgkatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        let name = text(function, "function")?;
        let lifted = lift_source(src, name, &indicator_choice(indicator)?)?;
        let report = cfgkat::syntax::validate(&lifted.exp);
        if !report.is_valid() {
            return Err(Error::InvalidProgram(report).into());
        }
        *out = Box::into_raw(Box::new(CfgkatProgram { exp: lifted.exp }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `program` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfgkat_program_free(program: *mut CfgkatProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of syntax nodes in the program, or 0 for null.
///
/// # Safety
/// `program` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cfgkat_program_size(program: *const CfgkatProgram) -> usize {
    program.as_ref().map_or(0, |p| p.exp.size())
}

fn report(a: &CfgkatProgram, b: &CfgkatProgram) -> Result<EquivalenceReport, Failure> {
    Ok(equiv(&a.exp, &b.exp)?)
}

/// Decides trace equivalence; stores the verdict in `*equivalent`.
///
/// # Safety
/// `left` and `right` are live handles; `equivalent` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cfgkat_equiv(
    left: *const CfgkatProgram,
    right: *const CfgkatProgram,
    equivalent: *mut bool,
) -> CfgkatStatus {
    guard(|| {
        let (a, b) = (program(left, "left")?, program(right, "right")?);
        let out = equivalent.as_mut().ok_or_else(|| null_out("equivalent"))?;
        *out = report(a, b)?.verdict;
        Ok(())
    })
}

/// Like [`cfgkat_equiv`], but stores the full report as a JSON string in
/// `*json`. Release it with [`cfgkat_string_free`].
///
/// # Safety
/// `left` and `right` are live handles; `json` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cfgkat_equiv_report_json(
    left: *const CfgkatProgram,
    right: *const CfgkatProgram,
    json: *mut *mut c_char,
) -> CfgkatStatus {
    guard(|| {
        if json.is_null() {
            return Err(null_out("json"));
        }
        *json = ptr::null_mut();
        let r = report(program(left, "left")?, program(right, "right")?)?;
        let s = serde_json::to_string(&r).map_err(|e| Failure(CfgkatStatus::Serialization, e.to_string()))?;
        let c = CString::new(s).map_err(|e| Failure(CfgkatStatus::Serialization, e.to_string()))?;
        *json = c.into_raw();
        Ok(())
    })
}

/// Compares function `function` of two source texts in one call.
///
/// With `auto_blind`, statements and conditions outside the supported
/// subset are replaced by numbered primitives from a table shared by both
/// sides. The indicator is detected automatically.
///
/// # Safety
/// String arguments must be NUL-terminated; `equivalent` is valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn cfgkat_equiv_sources(
    left_source: *const c_char,
    right_source: *const c_char,
    function: *const c_char,
    auto_blind: bool,
    equivalent: *mut bool,
) -> CfgkatStatus {
    guard(|| {
        let out = equivalent.as_mut().ok_or_else(|| null_out("equivalent"))?;
        let name = text(function, "function")?;
        let a = parse_function(text(left_source, "left_source")?, name)?;
        let b = parse_function(text(right_source, "right_source")?, name)?;
        let (la, lb, _) = lift_pair(&a, &b, &IndicatorChoice::Auto, auto_blind)?;
        *out = equiv(&la.exp, &lb.exp)?.verdict;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfgkat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message of the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cfgkat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
