//! C ABI for `compalg`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_parse`
//! style functions and released with the matching `*_free`. Every fallible
//! function returns a [`CompalgStatus`]; on failure a description is kept per
//! thread and can be read with [`compalg_last_error`]. Strings returned to the
//! caller are owned by the caller and released with [`compalg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use compalg::algebra::{alpha, beta, sigma, AlgebraElement, Sign};
use compalg::audit::{run_audit, AuditReport, Representation};
use compalg::chsh::{chsh_classical_max, chsh_quantum};
use compalg::class::{CompositionClass, Hbar};
use compalg::error::Error;
use compalg::parse::{parse_expression, Parsed};
use compalg::solver::{solve_coproduct, solver_base, CoproductReport, SolveOptions};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompalgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    ClassMismatch = 4,
    Unsupported = 5,
    NoSolution = 6,
    InsufficientRank = 7,
    Failed = 8,
    Panic = 9,
}

/// Which product [`compalg_element_product`] computes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompalgProduct {
    Alpha = 0,
    Sigma = 1,
    BetaPlus = 2,
    BetaMinus = 3,
}

/// A composition class with its value of ħ.
pub struct CompalgClass {
    inner: CompositionClass,
}

/// An element of a matrix or phase-space representation.
pub struct CompalgElement {
    inner: AlgebraElement,
}

/// Result of an identity audit.
pub struct CompalgAudit {
    inner: AuditReport,
}

/// Result of the coproduct solver.
pub struct CompalgSolution {
    inner: CoproductReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CompalgStatus {
    match e {
        Error::Syntax { .. } | Error::UnknownIdentifier { .. } => CompalgStatus::Parse,
        Error::ClassMismatch { .. } | Error::KindMismatch { .. } | Error::DimensionMismatch { .. } => {
            CompalgStatus::ClassMismatch
        }
        Error::Unsupported(_) | Error::FormalHbar => CompalgStatus::Unsupported,
        Error::NoSolution { .. } => CompalgStatus::NoSolution,
        Error::InsufficientRank(_) => CompalgStatus::InsufficientRank,
        _ => CompalgStatus::Failed,
    }
}

struct Fail(CompalgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CompalgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CompalgStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CompalgStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CompalgStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(CompalgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(CompalgStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(out: *mut T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(CompalgStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// The message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn compalg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn compalg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a class from `elliptic`, `parabolic` or `hyperbolic` and ħ given
/// as a rational (`"1"`, `"1/2"`) or `"formal"`.
///
/// # Safety
/// `name` and `hbar` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_class_new(
    name: *const c_char,
    hbar: *const c_char,
    out: *mut *mut CompalgClass,
) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let h = Hbar::parse(text(hbar, "hbar")?)?;
        let inner = CompositionClass::from_name(text(name, "name")?, h)?;
        *out = Box::into_raw(Box::new(CompalgClass { inner }));
        Ok(())
    })
}

/// # Safety
/// `class` must be null or a handle from [`compalg_class_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn compalg_class_free(class: *mut CompalgClass) {
    if !class.is_null() {
        drop(Box::from_raw(class));
    }
}

/// Parses a polynomial or matrix literal under `class`. `dof` is the
/// minimum number of degrees of freedom of a polynomial (0 for automatic).
///
/// # Safety
/// `class` must be a live handle, `expr` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_element_parse(
    class: *const CompalgClass,
    expr: *const c_char,
    dof: usize,
    out: *mut *mut CompalgElement,
) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let class = &handle(class, "class")?.inner;
        let hint = (dof > 0).then_some(dof);
        let inner = match parse_expression(text(expr, "expr")?, class.eps(), hint)? {
            Parsed::Phase(p) => AlgebraElement::phase(class, p)?,
            Parsed::Matrix(m) => AlgebraElement::matrix(class, m)?,
        };
        *out = Box::into_raw(Box::new(CompalgElement { inner }));
        Ok(())
    })
}

/// # Safety
/// `elem` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn compalg_element_free(elem: *mut CompalgElement) {
    if !elem.is_null() {
        drop(Box::from_raw(elem));
    }
}

/// Computes `f ∘ g` for the selected product into a new handle.
///
/// # Safety
/// `f` and `g` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_element_product(
    product: CompalgProduct,
    f: *const CompalgElement,
    g: *const CompalgElement,
    out: *mut *mut CompalgElement,
) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let (f, g) = (&handle(f, "f")?.inner, &handle(g, "g")?.inner);
        let inner = match product {
            CompalgProduct::Alpha => alpha(f, g)?,
            CompalgProduct::Sigma => sigma(f, g)?,
            CompalgProduct::BetaPlus => beta(f, g, Sign::Plus)?,
            CompalgProduct::BetaMinus => beta(f, g, Sign::Minus)?,
        };
        *out = Box::into_raw(Box::new(CompalgElement { inner }));
        Ok(())
    })
}

/// Writes whether `elem` is exactly zero.
///
/// # Safety
/// `elem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_element_is_zero(elem: *const CompalgElement, out: *mut bool) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = handle(elem, "elem")?.inner.is_zero();
        Ok(())
    })
}

/// Writes whether `a` and `b` are equal.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_element_equal(
    a: *const CompalgElement,
    b: *const CompalgElement,
    out: *mut bool,
) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let d = handle(a, "a")?.inner.sub(&handle(b, "b")?.inner)?;
        *out = d.is_zero();
        Ok(())
    })
}

/// The printed form of `elem`, or null for a null handle. Free with
/// [`compalg_string_free`].
///
/// # Safety
/// `elem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn compalg_element_to_string(elem: *const CompalgElement) -> *mut c_char {
    match elem.as_ref() {
        Some(e) => owned_string(e.inner.to_string()),
        None => ptr::null_mut(),
    }
}

/// Runs the identity audit on `representation` (`matrix`, `phase`,
/// `composite-matrix`, `composite-phase`).
///
/// # Safety
/// `class` must be a live handle, `representation` NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_audit_run(
    class: *const CompalgClass,
    representation: *const c_char,
    samples: usize,
    seed: u64,
    out: *mut *mut CompalgAudit,
) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let class = &handle(class, "class")?.inner;
        let rep = Representation::from_name(text(representation, "representation")?)?;
        let inner = run_audit(class, &rep, samples, seed)?;
        *out = Box::into_raw(Box::new(CompalgAudit { inner }));
        Ok(())
    })
}

/// Whether every identity held; false for a null handle.
///
/// # Safety
/// `audit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn compalg_audit_passed(audit: *const CompalgAudit) -> bool {
    audit.as_ref().is_some_and(|a| a.inner.pass)
}

/// The report as JSON. Free with [`compalg_string_free`].
///
/// # Safety
/// `audit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn compalg_audit_to_json(audit: *const CompalgAudit) -> *mut c_char {
    match audit.as_ref() {
        Some(a) => owned_string(a.inner.to_json()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `audit` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn compalg_audit_free(audit: *mut CompalgAudit) {
    if !audit.is_null() {
        drop(Box::from_raw(audit));
    }
}

/// Recovers the coproduct table for `representation` (`matrix` or `phase`).
///
/// # Safety
/// `class` must be a live handle, `representation` NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_solve_coproduct(
    class: *const CompalgClass,
    representation: *const c_char,
    seed: u64,
    out: *mut *mut CompalgSolution,
) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let class = &handle(class, "class")?.inner;
        let rep = text(representation, "representation")?;
        let probe = Representation::from_name(rep)?;
        compalg::audit::check_supported(class, &probe)?;
        let inner = solve_coproduct(class, &solver_base(rep)?, seed, &SolveOptions::default())?;
        *out = Box::into_raw(Box::new(CompalgSolution { inner }));
        Ok(())
    })
}

/// Looks up a solved table entry (`a11` … `b22`). Writes `fixed = false`
/// for a free entry; otherwise writes the value as `num/den`.
///
/// # Safety
/// `solution` must be a live handle, `name` NUL-terminated, all outputs
/// writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_solution_entry(
    solution: *const CompalgSolution,
    name: *const c_char,
    fixed: *mut bool,
    num: *mut i64,
    den: *mut i64,
) -> CompalgStatus {
    guard(|| {
        out_ptr(fixed, "fixed")?;
        out_ptr(num, "num")?;
        out_ptr(den, "den")?;
        let family = &handle(solution, "solution")?.inner.family;
        let name = text(name, "name")?;
        if !compalg::tensor::ENTRY_NAMES.contains(&name) {
            return Err(Fail(CompalgStatus::Unsupported, format!("no table entry `{name}`")));
        }
        match family.value(name) {
            Some(v) => {
                let (n, d) = (i64::try_from(v.numer()), i64::try_from(v.denom()));
                let (Ok(n), Ok(d)) = (n, d) else {
                    return Err(Fail(CompalgStatus::Failed, format!("{name} does not fit in 64 bits")));
                };
                *fixed = true;
                *num = n;
                *den = d;
            }
            None => {
                *fixed = false;
                *num = 0;
                *den = 1;
            }
        }
        Ok(())
    })
}

/// The derivation transcript and solution as JSON. Free with
/// [`compalg_string_free`].
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn compalg_solution_to_json(solution: *const CompalgSolution) -> *mut c_char {
    match solution.as_ref() {
        Some(s) => owned_string(s.inner.to_json()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `solution` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn compalg_solution_free(solution: *mut CompalgSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// CHSH value of the singlet at angles `a, a', b, b'` (radians).
///
/// # Safety
/// `angles` must point to four doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn compalg_chsh_quantum(angles: *const f64, out: *mut f64) -> CompalgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        if angles.is_null() {
            return Err(Fail(CompalgStatus::NullPointer, "angles is null".into()));
        }
        let a: [f64; 4] = std::slice::from_raw_parts(angles, 4).try_into().expect("four values");
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Fail(CompalgStatus::Unsupported, "angles must be finite".into()));
        }
        *out = chsh_quantum(a).value;
        Ok(())
    })
}

/// Best CHSH value over deterministic local strategies.
#[no_mangle]
pub extern "C" fn compalg_chsh_classical_max() -> f64 {
    chsh_classical_max().value
}
