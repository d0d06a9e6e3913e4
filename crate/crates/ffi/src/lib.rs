//! C interface to `sawspec`. Fallible functions return a [`SawspecStatus`];
//! results are written through out-pointers. On failure the message is
//! available from [`sawspec_last_error`] until the next call on the same
//! thread. Handles are opaque and must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use sawspec::bias;
use sawspec::characters::CharacterTable;
use sawspec::correlations;
use sawspec::dedekind::{self, DedekindMethod, DftAlgorithm, Spectrum};
use sawspec::moments::{self, MomentKind};
use sawspec::phi_error;
use sawspec::primes::{self, PatternCensus};
use sawspec::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SawspecStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Precondition = 3,
    Resource = 4,
    Budget = 5,
    InvalidArgument = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Kinds accepted by [`sawspec_theoretical_moment`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SawspecMomentKind {
    C = 0,
    S = 1,
    R = 2,
}

/// Transform used by [`sawspec_spectrum_new`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SawspecDft {
    Naive = 0,
    ChirpZ = 1,
}

/// Character table modulo a prime together with the `A_{q,chi}` values.
pub struct SawspecCharacterTable(CharacterTable);

/// Imaginary parts of the Dedekind-sum spectrum.
pub struct SawspecSpectrum(Spectrum);

/// Consecutive-prime residue census.
pub struct SawspecCensus(PatternCensus);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SawspecStatus {
    match e {
        Error::Domain(_) => SawspecStatus::Domain,
        Error::Precondition(_) => SawspecStatus::Precondition,
        Error::Resource { .. } => SawspecStatus::Resource,
        Error::Budget { .. } => SawspecStatus::Budget,
        Error::Usage(_) => SawspecStatus::InvalidArgument,
        Error::Io(_) => SawspecStatus::Io,
    }
}

fn fail(status: SawspecStatus, msg: impl Into<String>) -> SawspecStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), SawspecStatus>) -> SawspecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SawspecStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(SawspecStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, SawspecStatus>;
}

impl<T> OrStatus<T> for sawspec::Result<T> {
    fn or_status(self) -> Result<T, SawspecStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), SawspecStatus> {
    if p.is_null() {
        Err(fail(SawspecStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn input_slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], SawspecStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(slice::from_raw_parts(p, len))
}

/// Message describing the last failure on this thread, or an empty string.
#[no_mangle]
pub extern "C" fn sawspec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sawspec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from a `sawspec_*` function returning an owned string,
/// or be null.
#[no_mangle]
pub unsafe extern "C" fn sawspec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact Dedekind sum `s_q(a) = num / den` in lowest terms.
///
/// # Safety
/// `num` and `den` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_dedekind_sum(q: u64, a: i64, num: *mut i64, den: *mut i64) -> SawspecStatus {
    guard(|| {
        non_null(num, "num")?;
        non_null(den, "den")?;
        let s = dedekind::dedekind_sum(q, a, DedekindMethod::Reciprocity).or_status()?;
        let n: i64 = s.numer().try_into().map_err(|_| fail(SawspecStatus::Resource, "numerator exceeds 64 bits"))?;
        let d: i64 = s.denom().try_into().map_err(|_| fail(SawspecStatus::Resource, "denominator exceeds 64 bits"))?;
        *num = n;
        *den = d;
        Ok(())
    })
}

/// Builds the character table for prime `q` with `A_{q,chi}` summed to
/// `a_cutoff`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_character_table_new(
    q: u64,
    a_cutoff: u64,
    out: *mut *mut SawspecCharacterTable,
) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let t = CharacterTable::build(q, a_cutoff).or_status()?;
        *out = Box::into_raw(Box::new(SawspecCharacterTable(t)));
        Ok(())
    })
}

/// # Safety
/// `table` must come from [`sawspec_character_table_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sawspec_character_table_free(table: *mut SawspecCharacterTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Modulus of a character table, or 0 for a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sawspec_character_table_q(table: *const SawspecCharacterTable) -> u64 {
    table.as_ref().map_or(0, |t| t.0.q())
}

/// Writes `C(k)` for `k = 1..q-1` into `out[0..q-1]`.
///
/// # Safety
/// `table` must be live; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sawspec_ck_all(table: *const SawspecCharacterTable, out: *mut f64, len: usize) -> SawspecStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(out, "out")?;
        let t = &(*table).0;
        let need = (t.q() - 1) as usize;
        if len < need {
            return Err(fail(SawspecStatus::BufferTooSmall, format!("need {need} slots, got {len}")));
        }
        let v = bias::ck_all_characters(t).or_status()?;
        slice::from_raw_parts_mut(out, need).copy_from_slice(v.values());
        Ok(())
    })
}

/// `C(k)` by the character route.
///
/// # Safety
/// `table` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_ck_point(table: *const SawspecCharacterTable, k: i64, out: *mut f64) -> SawspecStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(out, "out")?;
        *out = bias::ck_point_complex(&(*table).0, k).or_status()?.re;
        Ok(())
    })
}

/// `C(k)` for `k = 1..q-1` by the truncated sawtooth route with `N = n`.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sawspec_ck_truncated(q: u64, n: u64, out: *mut f64, len: usize) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = bias::ck_all_truncated(q, n).or_status()?;
        if len < v.values().len() {
            return Err(fail(SawspecStatus::BufferTooSmall, format!("need {} slots", v.values().len())));
        }
        slice::from_raw_parts_mut(out, v.values().len()).copy_from_slice(v.values());
        Ok(())
    })
}

/// `c2(q; (a, b))`.
///
/// # Safety
/// `table` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_c2_pair(
    table: *const SawspecCharacterTable,
    a: i64,
    b: i64,
    out: *mut f64,
) -> SawspecStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(out, "out")?;
        *out = bias::c2_pair(&(*table).0, a, b).or_status()?;
        Ok(())
    })
}

/// `c1` and `c2` of a residue pattern of length `len >= 2`.
///
/// # Safety
/// `table` must be live; `residues` must hold `len` values; outputs valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_pattern_constants(
    table: *const SawspecCharacterTable,
    residues: *const i64,
    len: usize,
    c1: *mut f64,
    c2: *mut f64,
) -> SawspecStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(c1, "c1")?;
        non_null(c2, "c2")?;
        let t = &(*table).0;
        let res = input_slice(residues, len, "residues")?;
        let p = bias::Pattern::new(t.q(), res).or_status()?;
        *c1 = bias::c1_pattern(&p);
        *c2 = bias::c2_pattern(t, &p).or_status()?;
        Ok(())
    })
}

/// Spectrum `Im s-hat_q(t)` for `t = 0..q-1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_spectrum_new(q: u64, dft: SawspecDft, out: *mut *mut SawspecSpectrum) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let alg = match dft {
            SawspecDft::Naive => DftAlgorithm::Naive,
            SawspecDft::ChirpZ => DftAlgorithm::ChirpZ,
        };
        let s = dedekind::spectrum_all(q, alg).or_status()?;
        *out = Box::into_raw(Box::new(SawspecSpectrum(s)));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must come from [`sawspec_spectrum_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sawspec_spectrum_free(spectrum: *mut SawspecSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of values (`q`), or 0 for a null handle.
///
/// # Safety
/// `spectrum` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn sawspec_spectrum_len(spectrum: *const SawspecSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.values().len())
}

/// Copies the spectrum into `out[0..q]`.
///
/// # Safety
/// `spectrum` must be live; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sawspec_spectrum_values(
    spectrum: *const SawspecSpectrum,
    out: *mut f64,
    len: usize,
) -> SawspecStatus {
    guard(|| {
        non_null(spectrum, "spectrum")?;
        non_null(out, "out")?;
        let v = (*spectrum).0.values();
        if len < v.len() {
            return Err(fail(SawspecStatus::BufferTooSmall, format!("need {} slots", v.len())));
        }
        slice::from_raw_parts_mut(out, v.len()).copy_from_slice(v);
        Ok(())
    })
}

/// Exact `B(moduli)` as a newly allocated `"num/den"` string (free with
/// [`sawspec_string_free`]) and as a double.
///
/// # Safety
/// `moduli` must hold `len` values; `text` and `value` valid for writes
/// (`text` may be null).
#[no_mangle]
pub unsafe extern "C" fn sawspec_b_exact(
    moduli: *const u64,
    len: usize,
    text: *mut *mut c_char,
    value: *mut f64,
) -> SawspecStatus {
    guard(|| {
        non_null(value, "value")?;
        let m = input_slice(moduli, len, "moduli")?;
        let v = correlations::b_exact(m).or_status()?;
        *value = v.to_f64();
        if !text.is_null() {
            *text = CString::new(v.to_fraction_string()).unwrap_or_default().into_raw();
        }
        Ok(())
    })
}

/// Lattice-sum estimate of `B(moduli)` with box size `k`.
///
/// # Safety
/// `moduli` must hold `len` values; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_b_lattice(moduli: *const u64, len: usize, k: u64, out: *mut f64) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        let m = input_slice(moduli, len, "moduli")?;
        *out = correlations::b_lattice_estimate(m, k).or_status()?;
        Ok(())
    })
}

/// `(1/q) sum_k prod_j psi(k n_j-bar / q)`.
///
/// # Safety
/// `moduli` must hold `len` values; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_discrete_correlation(
    q: u64,
    moduli: *const u64,
    len: usize,
    out: *mut f64,
) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        let m = input_slice(moduli, len, "moduli")?;
        *out = correlations::discrete_correlation(q, m).or_status()?;
        Ok(())
    })
}

/// Truncated theoretical moment of order `ell`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_theoretical_moment(
    kind: SawspecMomentKind,
    ell: u32,
    b: u64,
    out: *mut f64,
) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        let k = match kind {
            SawspecMomentKind::C => MomentKind::C,
            SawspecMomentKind::S => MomentKind::S,
            SawspecMomentKind::R => MomentKind::R,
        };
        *out = moments::theoretical_moment(k, ell, b).or_status()?.value;
        Ok(())
    })
}

/// `C(x; B)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_continuous_model(x: f64, b: u64, out: *mut f64) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = moments::continuous_model_eval(x, b).or_status()?;
        Ok(())
    })
}

/// `(1/y) int_0^y R~(u)^ell du`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_rtilde_moment(y: u64, ell: u32, out: *mut f64) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = phi_error::rtilde_moment_exact(y, ell).or_status()?;
        Ok(())
    })
}

/// Principal-value logarithmic integral.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_log_integral(x: f64, out: *mut f64) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = primes::log_integral(x).or_status()?;
        Ok(())
    })
}

/// Census of length-`r` residue patterns of consecutive primes `p_n <= x`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_census_new(x: u64, q: u64, r: usize, out: *mut *mut SawspecCensus) -> SawspecStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let c = primes::pattern_census(x, q, r).or_status()?;
        *out = Box::into_raw(Box::new(SawspecCensus(c)));
        Ok(())
    })
}

/// # Safety
/// `census` must come from [`sawspec_census_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sawspec_census_free(census: *mut SawspecCensus) {
    if !census.is_null() {
        drop(Box::from_raw(census));
    }
}

/// Count of one residue tuple of length `r`.
///
/// # Safety
/// `census` must be live; `residues` must hold `len` values; `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_census_count(
    census: *const SawspecCensus,
    residues: *const u64,
    len: usize,
    out: *mut u64,
) -> SawspecStatus {
    guard(|| {
        non_null(census, "census")?;
        non_null(out, "out")?;
        let c = &(*census).0;
        let key = input_slice(residues, len, "residues")?;
        if key.len() != c.r {
            return Err(fail(SawspecStatus::InvalidArgument, format!("expected {} residues", c.r)));
        }
        *out = c.count(key);
        Ok(())
    })
}

/// Sum of all counts in the census.
///
/// # Safety
/// `census` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sawspec_census_total(census: *const SawspecCensus, out: *mut u64) -> SawspecStatus {
    guard(|| {
        non_null(census, "census")?;
        non_null(out, "out")?;
        *out = (*census).0.total();
        Ok(())
    })
}
