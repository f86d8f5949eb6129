//! C interface. Orders are opaque handles; every call returns a status code
//! and writes results through out-pointers. The message for the most recent
//! failure on the calling thread is available from `qorder_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qorder::factor_engine::Limits;
use qorder::global_monoid::{classify, min_delta_check, ClassCase, MinDelta, MinDeltaInput, PicData};
use qorder::local_monoid::{
    atom_count_closed_form, enumerate_atoms, is_invertible, lattice_oracle_mul, star, validate, LocalTriple,
};
use qorder::order::{make_order, OrderContext};
use qorder::Error;

/// Opaque handle to an order `O_f`.
pub struct QorderOrder {
    ctx: OrderContext,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QorderStatus {
    Ok = 0,
    Argument = 1,
    Resource = 2,
    Invariant = 3,
    Data = 4,
    NullPointer = 5,
    Panic = 6,
}

/// The ideal `p^x (p^y Z + (z + tau) Z)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QorderTriple {
    pub p: i64,
    pub x: u32,
    pub y: u32,
    pub z: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QorderCase {
    HalfFactorial = 0,
    Squarefree = 1,
    NonSquarefree = 2,
    NonSquarefreeDyadic = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QorderClassification {
    pub case_: QorderCase,
    pub half_factorial: bool,
    /// Largest catenary degree.
    pub catenary: u32,
    /// Largest element of the set of distances, 0 when it is empty.
    pub max_distance: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QorderMinDelta {
    One = 1,
    Two = 2,
    Unknown = 0,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QorderStatus {
    match e {
        Error::Argument(_) => QorderStatus::Argument,
        Error::Overflow(_) | Error::Resource(_) => QorderStatus::Resource,
        Error::Invariant(_) => QorderStatus::Invariant,
        Error::Data(_) => QorderStatus::Data,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QorderStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QorderStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null)) => {
            set_error("null pointer argument".into());
            QorderStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            QorderStatus::Panic
        }
    }
}

enum Failure {
    Lib(Error),
    Null,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null)
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null);
    }
    p.write(v);
    Ok(())
}

fn to_local(t: &QorderTriple) -> LocalTriple {
    LocalTriple::new(t.p as i128, t.x, t.y, t.z as i128)
}

fn from_local(t: &LocalTriple) -> Result<QorderTriple, Failure> {
    let big = || Failure::Lib(Error::Overflow("triple does not fit in 64 bits"));
    Ok(QorderTriple {
        p: i64::try_from(t.p).map_err(|_| big())?,
        x: t.x,
        y: t.y,
        z: i64::try_from(t.z).map_err(|_| big())?,
    })
}

/// Creates the order of conductor `f` in `Q(sqrt d)`.
///
/// # Safety
/// `out` must be valid for writes. The handle is released with
/// `qorder_order_free`.
#[no_mangle]
pub unsafe extern "C" fn qorder_order_new(d: i64, f: i64, out: *mut *mut QorderOrder) -> QorderStatus {
    guard(|| {
        let ctx = make_order(d as i128, f as i128)?;
        write(out, Box::into_raw(Box::new(QorderOrder { ctx })))
    })
}

/// # Safety
/// `order` must come from `qorder_order_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qorder_order_free(order: *mut QorderOrder) {
    if !order.is_null() {
        drop(Box::from_raw(order));
    }
}

/// The closed-form product of two triples.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qorder_star(
    order: *const QorderOrder,
    a: *const QorderTriple,
    b: *const QorderTriple,
    out: *mut QorderTriple,
) -> QorderStatus {
    guard(|| {
        let o = deref(order)?;
        let r = star(&o.ctx, &to_local(deref(a)?), &to_local(deref(b)?))?;
        write(out, from_local(&r)?)
    })
}

/// The product computed by lattice multiplication.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qorder_lattice_mul(
    order: *const QorderOrder,
    a: *const QorderTriple,
    b: *const QorderTriple,
    out: *mut QorderTriple,
) -> QorderStatus {
    guard(|| {
        let o = deref(order)?;
        let (a, b) = (to_local(deref(a)?), to_local(deref(b)?));
        validate(&o.ctx, &a)?;
        validate(&o.ctx, &b)?;
        write(out, from_local(&lattice_oracle_mul(&o.ctx, &a, &b)?)?)
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qorder_is_invertible(
    order: *const QorderOrder,
    t: *const QorderTriple,
    out: *mut bool,
) -> QorderStatus {
    guard(|| {
        let o = deref(order)?;
        let t = to_local(deref(t)?);
        validate(&o.ctx, &t)?;
        write(out, is_invertible(&o.ctx, &t)?)
    })
}

/// Number of invertible atoms of norm `p^m`, from the closed form and by
/// enumeration up to the default modulus ceiling.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qorder_atom_count(
    order: *const QorderOrder,
    p: i64,
    m: u32,
    closed_form: *mut i64,
    brute_force: *mut i64,
) -> QorderStatus {
    guard(|| {
        let o = deref(order)?;
        let c = atom_count_closed_form(&o.ctx, p as i128, m)?;
        let b = enumerate_atoms(&o.ctx, p as i128, m, true, Limits::default().max_modulus)?.len();
        write(closed_form, c as i64)?;
        write(brute_force, b as i64)
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qorder_classify(order: *const QorderOrder, out: *mut QorderClassification) -> QorderStatus {
    guard(|| {
        let c = classify(&deref(order)?.ctx)?;
        let case_ = match c.case {
            ClassCase::HalfFactorial => QorderCase::HalfFactorial,
            ClassCase::Squarefree => QorderCase::Squarefree,
            ClassCase::NonSquarefreeGeneric => QorderCase::NonSquarefree,
            ClassCase::NonSquarefreeDyadic => QorderCase::NonSquarefreeDyadic,
        };
        write(
            out,
            QorderClassification {
                case_,
                half_factorial: c.half_factorial,
                catenary: c.predicted_c,
                max_distance: c.predicted_delta.iter().next_back().copied().unwrap_or(0),
            },
        )
    })
}

/// The min-delta verdict with `|Pic(O)|` given directly, or unknown when
/// `pic_order <= 0`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qorder_min_delta(
    order: *const QorderOrder,
    pic_order: i64,
    out: *mut QorderMinDelta,
) -> QorderStatus {
    guard(|| {
        let o = deref(order)?;
        let pic = PicData { pic_order: (pic_order > 0).then_some(pic_order as i128), ..Default::default() };
        let v = min_delta_check(&o.ctx, &MinDeltaInput::new(pic))?;
        write(
            out,
            match v.value {
                MinDelta::One => QorderMinDelta::One,
                MinDelta::Two => QorderMinDelta::Two,
                MinDelta::Unknown => QorderMinDelta::Unknown,
            },
        )
    })
}

/// Window sweep at `p` as a json document, the same as the `sweep`
/// subcommand prints. Release the string with `qorder_string_free`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qorder_sweep_json(
    order: *const QorderOrder,
    p: i64,
    bound: u32,
    invertible_only: bool,
    out: *mut *mut c_char,
) -> QorderStatus {
    guard(|| {
        let o = deref(order)?;
        let (d, f, p, b) = (o.ctx.d.to_string(), o.ctx.f.to_string(), p.to_string(), bound.to_string());
        let mut args = vec!["qorder", "sweep", "--d", &d, "--f", &f, "--p", &p, "--bound", &b, "--format", "json"];
        if invertible_only {
            args.push("--invertible");
        }
        let (mut text, mut err) = (Vec::new(), Vec::new());
        let code = qorder::cli::run(args, &mut text, &mut err);
        if code != 0 {
            let msg = String::from_utf8_lossy(&err).trim().trim_start_matches("error: ").to_string();
            return Err(Failure::Lib(match code {
                3 => Error::Resource(msg),
                4 => Error::Invariant(msg),
                _ => Error::Argument(msg),
            }));
        }
        let s = CString::new(text).map_err(|_| Failure::Lib(Error::Invariant("nul in json".into())))?;
        write(out, s.into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qorder_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qorder_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Reads the last error as a Rust string; for tests and Rust callers.
pub fn last_error_string() -> Option<String> {
    let p = qorder_last_error();
    if p.is_null() {
        None
    } else {
        // SAFETY: the pointer refers to the thread-local CString
        Some(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }
}
