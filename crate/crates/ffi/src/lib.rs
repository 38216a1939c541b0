//! C ABI over `coarse_clt`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_from_*` functions and released with the matching `*_free`. Every
//! fallible call returns a [`CcStatus`]; on failure a message is available
//! from [`cc_last_error`] on the same thread. Strings returned to the caller
//! are released with [`cc_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coarse_clt::actions::{ActionSpec, IsometricAction};
use coarse_clt::clt::{run_experiment, ExperimentConfig};
use coarse_clt::combings::free_group_combing;
use coarse_clt::sampler::{chunk_rng, SphereSampler};
use coarse_clt::spectral::SpectralData;
use coarse_clt::{load_graph_structure, Error, GraphStructure};
use libc::{c_char, c_double, size_t};
use rand_chacha::ChaCha20Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Malformed = 3,
    InvalidInput = 4,
    BudgetExceeded = 5,
    NotSemisimple = 6,
    BufferTooSmall = 7,
    Io = 8,
    Panic = 9,
}

/// Opaque graph structure.
pub struct CcGraph(GraphStructure);

/// Opaque sampler with its own random stream.
pub struct CcSampler {
    sampler: SphereSampler,
    rng: ChaCha20Rng,
}

/// Opaque isometric action.
pub struct CcAction(IsometricAction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CcStatus {
    match e {
        Error::Malformed(_) | Error::DanglingVertex { .. } | Error::UnknownLabel { .. } => CcStatus::Malformed,
        Error::BudgetExceeded { .. } => CcStatus::BudgetExceeded,
        Error::NotSemisimple { .. } | Error::NotAlmostSemisimple { .. } => CcStatus::NotSemisimple,
        Error::Io { .. } => CcStatus::Io,
        Error::Stage { source, .. } => status_of(source),
        _ => CcStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CcStatus, String)>) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CcStatus::Panic
        }
    }
}

fn lib(e: Error) -> (CcStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, (CcStatus, String)> {
    if p.is_null() {
        return Err((CcStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CcStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (CcStatus, String)> {
    p.as_ref().ok_or((CcStatus::NullPointer, "null handle".into()))
}

fn out_ptr<T>(p: *mut T) -> Result<(), (CcStatus, String)> {
    if p.is_null() {
        Err((CcStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn cc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an automaton document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_graph_from_json(json: *const c_char, out: *mut *mut CcGraph) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let g = load_graph_structure(str_arg(json)?).map_err(lib)?;
        *out = Box::into_raw(Box::new(CcGraph(g)));
        Ok(())
    })
}

/// No-backtracking automaton of the free group of the given rank.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_graph_free_combing(rank: size_t, out: *mut *mut CcGraph) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let g = free_group_combing(rank).map_err(lib)?;
        *out = Box::into_raw(Box::new(CcGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_graph_free(g: *mut CcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_graph_vertex_count(g: *const CcGraph, out: *mut size_t) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        *out = handle(g)?.0.vertex_count();
        Ok(())
    })
}

/// Exact number of length-`n` paths from `vertex`, as a decimal string.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable. Free the result with
/// [`cc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cc_graph_count_paths(
    g: *const CcGraph,
    vertex: size_t,
    n: size_t,
    out: *mut *mut c_char,
) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let c = handle(g)?.0.count_paths(vertex, n).map_err(lib)?;
        *out = into_c_string(c.to_string());
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_graph_leading_eigenvalue(g: *const CcGraph, out: *mut c_double) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        *out = coarse_clt::spectral::leading_eigenvalue(&handle(g)?.0).map_err(lib)?;
        Ok(())
    })
}

/// Spectral data as JSON.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable. Free the result with
/// [`cc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cc_graph_spectral_json(g: *const CcGraph, out: *mut *mut c_char) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let s = SpectralData::compute(&handle(g)?.0).map_err(lib)?;
        let text = serde_json::to_string(&s).map_err(|e| (CcStatus::Malformed, e.to_string()))?;
        *out = into_c_string(text);
        Ok(())
    })
}

/// Sampler for paths of length at most `max_len`, seeded with `seed`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_sampler_new(
    g: *const CcGraph,
    max_len: size_t,
    seed: u64,
    out: *mut *mut CcSampler,
) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let sampler = SphereSampler::new(&handle(g)?.0, max_len);
        *out = Box::into_raw(Box::new(CcSampler {
            sampler,
            rng: chunk_rng(seed, 0),
        }));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_sampler_free(s: *mut CcSampler) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Draws a uniform length-`n` path from the initial vertex and writes its
/// edge indices to `edges` (capacity `cap`); `len` receives `n`.
///
/// # Safety
/// `s` must be a live handle; `edges` must have room for `cap` entries;
/// `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_sampler_sample(
    s: *mut CcSampler,
    n: size_t,
    edges: *mut size_t,
    cap: size_t,
    len: *mut size_t,
) -> CcStatus {
    guard(|| {
        out_ptr(len)?;
        let s = s.as_mut().ok_or((CcStatus::NullPointer, "null handle".to_string()))?;
        if cap < n {
            *len = n;
            return Err((CcStatus::BufferTooSmall, format!("need room for {n} edges")));
        }
        if n > 0 {
            out_ptr(edges)?;
        }
        let p = s.sampler.sample(&mut s.rng, n).map_err(lib)?;
        for (i, &e) in p.edges.iter().enumerate() {
            *edges.add(i) = e;
        }
        *len = p.len();
        Ok(())
    })
}

/// Builds an action from its JSON specification (`{"kind": ..., "params": ...}`)
/// over the group of `g`.
///
/// # Safety
/// `g` must be a live handle, `spec_json` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cc_action_new(
    g: *const CcGraph,
    spec_json: *const c_char,
    out: *mut *mut CcAction,
) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let spec: ActionSpec =
            serde_json::from_str(str_arg(spec_json)?).map_err(|e| (CcStatus::Malformed, e.to_string()))?;
        let a = IsometricAction::new(&spec, handle(g)?.0.group()).map_err(lib)?;
        *out = Box::into_raw(Box::new(CcAction(a)));
        Ok(())
    })
}

/// # Safety
/// `a` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_action_free(a: *mut CcAction) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// `d(o, go)` for a space-separated word such as `"a b A"`.
///
/// # Safety
/// `a` must be a live handle, `word` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_action_displacement(a: *const CcAction, word: *const c_char, out: *mut c_double) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let a = &handle(a)?.0;
        let w = a.group().parse_word(str_arg(word)?).map_err(lib)?;
        *out = a.displacement(&w).map_err(lib)?;
        Ok(())
    })
}

/// Translation length of a space-separated word.
///
/// # Safety
/// `a` must be a live handle, `word` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_action_translation_length(
    a: *const CcAction,
    word: *const c_char,
    out: *mut c_double,
) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let a = &handle(a)?.0;
        let w = a.group().parse_word(str_arg(word)?).map_err(lib)?;
        *out = a.translation_length(&w).map_err(lib)?.value;
        Ok(())
    })
}

/// Runs an experiment from a JSON config (automaton paths resolve against
/// the working directory) and returns the report as JSON.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` writable. Free the
/// result with [`cc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cc_run_experiment_json(config_json: *const c_char, out: *mut *mut c_char) -> CcStatus {
    guard(|| {
        out_ptr(out)?;
        let cfg: ExperimentConfig =
            serde_json::from_str(str_arg(config_json)?).map_err(|e| (CcStatus::Malformed, e.to_string()))?;
        let output = run_experiment(&cfg, None).map_err(lib)?;
        let text = serde_json::to_string(&output.report).map_err(|e| (CcStatus::Malformed, e.to_string()))?;
        *out = into_c_string(text);
        Ok(())
    })
}
