//! C ABI over `factored-info`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or
//! `*_build` functions and released by the matching `*_free`. Every fallible
//! call returns an [`FiStatus`]; on failure the message is available from
//! [`fi_last_error_message`] on the same thread. Strings returned through
//! `char **` are owned by the caller and released with [`fi_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use factored_info::atlas::{self, SfmiAtlas};
use factored_info::json::{self, Units};
use factored_info::{dist, family, Distribution, Error, MarginFamily, Pairing};
use serde_json::Value;

/// Incremented on any incompatible change to the exported functions.
pub const FI_ABI_VERSION: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Mismatch = 5,
    CapExceeded = 6,
    ExactRequired = 7,
    Panic = 8,
}

/// A probability distribution over a finite product space.
pub struct FiDistribution(Distribution);

/// A family of variable subsets.
pub struct FiFamily(MarginFamily);

/// A bijection between the x and y variables of a paired space.
pub struct FiPairing(Pairing);

/// The SFMI polytopes for one alphabet, pair count and pairing.
pub struct FiAtlas(SfmiAtlas);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FiStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => FiStatus::Parse,
            Error::CapExceeded { .. } => FiStatus::CapExceeded,
            Error::ExactRequired(_) => FiStatus::ExactRequired,
            Error::SpaceMismatch(_) | Error::LengthMismatch { .. } => FiStatus::Mismatch,
            _ => FiStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> FiStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            FiStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let detail = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown".into());
            set_last_error(format!("internal panic: {detail}"));
            FiStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(FiStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn out_slot<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(FiStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn parse_json(text: *const c_char) -> Result<Value, Failure> {
    if text.is_null() {
        return Err(Failure(FiStatus::NullPointer, "json is NULL".into()));
    }
    let s = CStr::from_ptr(text)
        .to_str()
        .map_err(|e| Failure(FiStatus::InvalidUtf8, e.to_string()))?;
    serde_json::from_str(s).map_err(|e| Failure(FiStatus::Parse, format!("invalid JSON: {e}")))
}

fn to_c_string(v: &Value) -> Result<*mut c_char, Failure> {
    let s = serde_json::to_string(v).map_err(|e| Failure(FiStatus::Panic, e.to_string()))?;
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(FiStatus::Panic, e.to_string()))
}

fn units(bits: bool) -> Units {
    if bits {
        Units::Bits
    } else {
        Units::Nats
    }
}

/// Returns [`FI_ABI_VERSION`].
#[no_mangle]
pub extern "C" fn fi_abi_version() -> u32 {
    FI_ABI_VERSION
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn fi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn from_json<T>(
    json: *const c_char,
    out: *mut *mut T,
    parse: impl FnOnce(&Value) -> Result<T, Error>,
) -> FiStatus {
    guarded(|| {
        let slot = out_slot(out, "out")?;
        *slot = ptr::null_mut();
        let value = parse_json(json)?;
        *slot = Box::into_raw(Box::new(parse(&value)?));
        Ok(())
    })
}

unsafe fn free<T>(h: *mut T) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses a distribution document
/// (`{"cardinalities": [...], "entries": [{"state", "prob"}, ...]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_distribution_from_json(json: *const c_char, out: *mut *mut FiDistribution) -> FiStatus {
    from_json(json, out, |v| json::parse_distribution(v).map(FiDistribution))
}

/// Releases a distribution. NULL is ignored.
///
/// # Safety
/// `d` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fi_distribution_free(d: *mut FiDistribution) {
    free(d)
}

/// Parses a family document (`{"n": 3, "sets": [[1, 2], [2, 3]]}`, 1-based).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_family_from_json(json: *const c_char, out: *mut *mut FiFamily) -> FiStatus {
    from_json(json, out, |v| json::parse_family(v).map(FiFamily))
}

/// Releases a family. NULL is ignored.
///
/// # Safety
/// `f` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fi_family_free(f: *mut FiFamily) {
    free(f)
}

/// Parses a pairing document (`{"n": 2, "match": [2, 1]}`, 1-based).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_pairing_from_json(json: *const c_char, out: *mut *mut FiPairing) -> FiStatus {
    from_json(json, out, |v| json::parse_pairing(v).map(FiPairing))
}

/// Releases a pairing. NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fi_pairing_free(p: *mut FiPairing) {
    free(p)
}

/// Serializes a distribution in the same document format it is read from.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_distribution_to_json(d: *const FiDistribution, out: *mut *mut c_char) -> FiStatus {
    guarded(|| {
        let slot = out_slot(out, "out")?;
        *slot = to_c_string(&json::distribution_json(&borrow(d, "distribution")?.0))?;
        Ok(())
    })
}

/// Number of variables of the distribution's space.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_distribution_variable_count(d: *const FiDistribution, out: *mut usize) -> FiStatus {
    guarded(|| {
        *out_slot(out, "out")? = borrow(d, "distribution")?.0.space().n();
        Ok(())
    })
}

/// The identity pairing on `n` pairs.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_pairing_identity(n: usize, out: *mut *mut FiPairing) -> FiStatus {
    guarded(|| {
        let slot = out_slot(out, "out")?;
        *slot = ptr::null_mut();
        *slot = Box::into_raw(Box::new(FiPairing(Pairing::identity(n)?)));
        Ok(())
    })
}

unsafe fn measure(out: *mut f64, f: impl FnOnce() -> Result<f64, Failure>) -> FiStatus {
    guarded(|| {
        let slot = out_slot(out, "out")?;
        *slot = f()?;
        Ok(())
    })
}

/// Shannon entropy in nats.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_entropy(d: *const FiDistribution, out: *mut f64) -> FiStatus {
    measure(out, || Ok(dist::entropy(&borrow(d, "distribution")?.0)))
}

/// Multi-information in nats.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_multi_information(d: *const FiDistribution, out: *mut f64) -> FiStatus {
    measure(out, || Ok(dist::multi_information(&borrow(d, "distribution")?.0)))
}

/// Mutual information between the first and second half of the variables.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_block_mutual_information(d: *const FiDistribution, out: *mut f64) -> FiStatus {
    measure(out, || {
        let p = &borrow(d, "distribution")?.0;
        Ok(dist::block_mutual_information(
            p,
            &dist::BlockSplit::halves(p.space().n())?,
        )?)
    })
}

/// Average multi-information over all pairs of variables.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_fmi(d: *const FiDistribution, out: *mut f64) -> FiStatus {
    measure(out, || Ok(family::fmi(&borrow(d, "distribution")?.0)?))
}

/// Average multi-information over the sets of `fam`.
///
/// # Safety
/// `d` and `fam` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_i_lambda(d: *const FiDistribution, fam: *const FiFamily, out: *mut f64) -> FiStatus {
    measure(out, || {
        Ok(family::i_lambda(
            &borrow(d, "distribution")?.0,
            &borrow(fam, "family")?.0,
        )?)
    })
}

/// Average mutual information over the pairs `(x_i, y_partner(i))`.
///
/// # Safety
/// `d` and `pairing` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_sfmi(d: *const FiDistribution, pairing: *const FiPairing, out: *mut f64) -> FiStatus {
    measure(out, || {
        Ok(family::sfmi(
            &borrow(d, "distribution")?.0,
            &borrow(pairing, "pairing")?.0,
        )?)
    })
}

/// Exact test for maximal multi-information; needs rational weights.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_is_i_maximizer(d: *const FiDistribution, out: *mut bool) -> FiStatus {
    guarded(|| {
        let slot = out_slot(out, "out")?;
        *slot = atlas::is_i_maximizer(&borrow(d, "distribution")?.0)?;
        Ok(())
    })
}

/// Builds every SFMI polytope for `alphabet`-valued variables on `pairs`
/// pairs. A NULL `pairing` selects the identity.
///
/// # Safety
/// `pairing` must be NULL or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_atlas_build(
    alphabet: usize,
    pairs: usize,
    pairing: *const FiPairing,
    out: *mut *mut FiAtlas,
) -> FiStatus {
    guarded(|| {
        let slot = out_slot(out, "out")?;
        *slot = ptr::null_mut();
        let pairing = match pairing.as_ref() {
            Some(p) => p.0.clone(),
            None => Pairing::identity(pairs)?,
        };
        *slot = Box::into_raw(Box::new(FiAtlas(atlas::build_sfmi_atlas(alphabet, pairs, &pairing)?)));
        Ok(())
    })
}

/// Releases an atlas. NULL is ignored.
///
/// # Safety
/// `a` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fi_atlas_free(a: *mut FiAtlas) {
    free(a)
}

/// Number of polytopes and total number of code vertices.
///
/// # Safety
/// `a` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_atlas_counts(
    a: *const FiAtlas,
    polytopes: *mut usize,
    code_vertices: *mut usize,
) -> FiStatus {
    guarded(|| {
        let atlas = &borrow(a, "atlas")?.0;
        let p = out_slot(polytopes, "polytopes")?;
        let c = out_slot(code_vertices, "code_vertices")?;
        *p = atlas.polytopes.len();
        *c = atlas.code_vertex_count();
        Ok(())
    })
}

/// Full atlas report as JSON, with information values in bits when `bits`.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_atlas_to_json(a: *const FiAtlas, bits: bool, out: *mut *mut c_char) -> FiStatus {
    guarded(|| {
        let slot = out_slot(out, "out")?;
        *slot = to_c_string(&json::atlas_json(&borrow(a, "atlas")?.0, units(bits)))?;
        Ok(())
    })
}
