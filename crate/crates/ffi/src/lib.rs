//! C ABI over the scheme constructions and simulations. Handles are opaque
//! pointers owned by the library; every entry point returns a status code
//! and leaves a human-readable message for `dcc_last_error` on failure.
//! Pointer arguments must be valid for the duration of each call; handles
//! are freed exactly once.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use designcoded::binmat::{self, BinaryMatrix, Cover};
use designcoded::caching::{deliver, FileLibrary};
use designcoded::designs;
use designcoded::gf::{prime_power, FieldTable};
use designcoded::mapreduce::{
    run_full_straggler, run_mapreduce, run_partial_straggler, ComputingConfig,
};
use designcoded::subspace;
use designcoded::Error;

/// Opaque scheme handle: a binary matrix with its identity-submatrix cover.
pub struct DccScheme {
    matrix: BinaryMatrix,
    cover: Cover,
}

/// Status codes returned by every entry point.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DccStatus {
    DccOk = 0,
    DccNullArgument = 1,
    DccInvalidParameter = 2,
    DccConstructionFailed = 3,
    DccVerificationFailed = 4,
    DccIoFailed = 5,
    DccPanic = 6,
}

/// Scheme dimensions and cover sizes.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DccParams {
    /// Number of users / compute nodes (matrix rows).
    pub users: u64,
    /// Subpacketization / file complexity (matrix columns).
    pub subfiles: u64,
    /// Ones per row (uncached subfiles per user).
    pub row_weight: u64,
    /// Cover size S.
    pub cover_size: u64,
    /// Identity submatrix size g (0 when non-uniform).
    pub identity_size: u64,
    /// Computation load r = users minus column weight.
    pub computation_load: u64,
}

/// An exact nonnegative ratio.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DccRatio {
    pub num: u64,
    pub den: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn status_of(err: &Error) -> DccStatus {
    match err {
        Error::Io(_) => DccStatus::DccIoFailed,
        Error::InvalidDesign(_) | Error::InvalidCover(_) => DccStatus::DccVerificationFailed,
        _ => DccStatus::DccInvalidParameter,
    }
}

fn guard(f: impl FnOnce() -> DccStatus) -> DccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            DccStatus::DccPanic
        }
    }
}

fn emit(out: *mut *mut DccScheme, built: designcoded::Result<(BinaryMatrix, Cover)>) -> DccStatus {
    if out.is_null() {
        set_error("null output handle");
        return DccStatus::DccNullArgument;
    }
    match built {
        Ok((matrix, cover)) => {
            let handle = Box::new(DccScheme { matrix, cover });
            unsafe { *out = Box::into_raw(handle) };
            DccStatus::DccOk
        }
        Err(e) => {
            set_error(&e.to_string());
            match status_of(&e) {
                DccStatus::DccInvalidParameter => DccStatus::DccInvalidParameter,
                other => other,
            }
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dcc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a scheme handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dcc_scheme_free(scheme: *mut DccScheme) {
    if !scheme.is_null() {
        drop(unsafe { Box::from_raw(scheme) });
    }
}

/// Symmetric BIBD scheme from the projective plane of prime-power order n.
#[no_mangle]
pub unsafe extern "C" fn dcc_build_bibd_projective(n: u64, out: *mut *mut DccScheme) -> DccStatus {
    guard(|| {
        emit(
            out,
            designs::construct_projective_bibd(n).and_then(|d| binmat::cover_bibd(&d)),
        )
    })
}

/// BIBD scheme from the affine plane of prime-power order n.
#[no_mangle]
pub unsafe extern "C" fn dcc_build_bibd_affine(n: u64, out: *mut *mut DccScheme) -> DccStatus {
    guard(|| {
        emit(
            out,
            designs::construct_affine_bibd(n).and_then(|d| binmat::cover_bibd(&d)),
        )
    })
}

/// Transversal design scheme TD(k, n) with k in {n, n+1}.
#[no_mangle]
pub unsafe extern "C" fn dcc_build_transversal(k: u64, n: u64, out: *mut *mut DccScheme) -> DccStatus {
    guard(|| {
        emit(
            out,
            designs::construct_transversal(k, n).and_then(|d| binmat::cover_transversal(&d)),
        )
    })
}

/// 3-(q^2+1, q+1, 1) scheme for prime-power q up to 5.
#[no_mangle]
pub unsafe extern "C" fn dcc_build_steiner3(q: u64, out: *mut *mut DccScheme) -> DccStatus {
    guard(|| {
        emit(
            out,
            designs::construct_steiner3(q).and_then(|d| binmat::cover_tdesign(&d)),
        )
    })
}

/// Trivial k-(v,k,1)_q subspace design scheme.
#[no_mangle]
pub unsafe extern "C" fn dcc_build_subspace(q: u64, v: u32, k: u32, out: *mut *mut DccScheme) -> DccStatus {
    guard(|| {
        let built = (|| {
            let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
            let field = FieldTable::new(p, m)?;
            let sd = subspace::trivial_subspace_design(&field, v as usize, k as usize)?;
            binmat::cover_subspace(&field, &sd)
        })();
        emit(out, built)
    })
}

/// Binomial computing matrix on k nodes with replication r.
#[no_mangle]
pub unsafe extern "C" fn dcc_build_binomial(k: u64, r: u64, out: *mut *mut DccScheme) -> DccStatus {
    guard(|| emit(out, binmat::man_matrix(k, r)))
}

/// Load matrix.txt and cover.txt from a scheme directory.
#[no_mangle]
pub unsafe extern "C" fn dcc_scheme_load(dir: *const c_char, out: *mut *mut DccScheme) -> DccStatus {
    guard(|| {
        if dir.is_null() {
            set_error("null directory");
            return DccStatus::DccNullArgument;
        }
        let Ok(dir) = unsafe { CStr::from_ptr(dir) }.to_str() else {
            set_error("directory path is not valid UTF-8");
            return DccStatus::DccInvalidParameter;
        };
        let built = (|| {
            let matrix_text = std::fs::read_to_string(Path::new(dir).join("matrix.txt"))?;
            let matrix = BinaryMatrix::parse(&matrix_text)?;
            let cover_text = std::fs::read_to_string(Path::new(dir).join("cover.txt"))?;
            let cover = Cover::parse(&cover_text, &matrix)?;
            Ok((matrix, cover))
        })();
        emit(out, built)
    })
}

/// Write matrix.txt and cover.txt into a directory (created if missing).
#[no_mangle]
pub unsafe extern "C" fn dcc_scheme_save(scheme: *const DccScheme, dir: *const c_char) -> DccStatus {
    guard(|| {
        if scheme.is_null() || dir.is_null() {
            set_error("null argument");
            return DccStatus::DccNullArgument;
        }
        let scheme = unsafe { &*scheme };
        let Ok(dir) = unsafe { CStr::from_ptr(dir) }.to_str() else {
            set_error("directory path is not valid UTF-8");
            return DccStatus::DccInvalidParameter;
        };
        let outcome = (|| -> designcoded::Result<()> {
            std::fs::create_dir_all(dir)?;
            std::fs::write(Path::new(dir).join("matrix.txt"), scheme.matrix.to_text())?;
            std::fs::write(
                Path::new(dir).join("cover.txt"),
                scheme.cover.to_text(&scheme.matrix),
            )?;
            Ok(())
        })();
        match outcome {
            Ok(()) => DccStatus::DccOk,
            Err(e) => {
                set_error(&e.to_string());
                DccStatus::DccIoFailed
            }
        }
    })
}

/// Scheme dimensions; requires constant column weight for the computation
/// load field.
#[no_mangle]
pub unsafe extern "C" fn dcc_scheme_params(
    scheme: *const DccScheme,
    out: *mut DccParams,
) -> DccStatus {
    guard(|| {
        if scheme.is_null() || out.is_null() {
            set_error("null argument");
            return DccStatus::DccNullArgument;
        }
        let scheme = unsafe { &*scheme };
        let Some(row_weight) = scheme.matrix.constant_row_weight() else {
            set_error("matrix does not have constant row weight");
            return DccStatus::DccInvalidParameter;
        };
        let Some(col_weight) = scheme.matrix.constant_col_weight() else {
            set_error("matrix does not have constant column weight");
            return DccStatus::DccInvalidParameter;
        };
        let params = DccParams {
            users: scheme.matrix.rows() as u64,
            subfiles: scheme.matrix.cols() as u64,
            row_weight: row_weight as u64,
            cover_size: scheme.cover.size() as u64,
            identity_size: scheme.cover.uniform_size.unwrap_or(0) as u64,
            computation_load: (scheme.matrix.rows() - col_weight) as u64,
        };
        unsafe { *out = params };
        DccStatus::DccOk
    })
}

/// Re-run the cover verifier and the counting identity.
#[no_mangle]
pub unsafe extern "C" fn dcc_scheme_verify(scheme: *const DccScheme) -> DccStatus {
    guard(|| {
        if scheme.is_null() {
            set_error("null scheme");
            return DccStatus::DccNullArgument;
        }
        let scheme = unsafe { &*scheme };
        let report = binmat::verify_cover(&scheme.matrix, &scheme.cover);
        if !report.ok {
            set_error(&format!(
                "{} identity violations, overlap {:?}, {} uncovered",
                report.identity_violations.len(),
                report.overlap_witness,
                report.uncovered.len()
            ));
            return DccStatus::DccVerificationFailed;
        }
        if !binmat::counting_identity_holds(&scheme.matrix, &scheme.cover) {
            set_error("counting identity S*g = F*(K-r) fails");
            return DccStatus::DccVerificationFailed;
        }
        DccStatus::DccOk
    })
}

fn ratio_from(value: &designcoded::rat::Rat, out: *mut DccRatio) -> DccStatus {
    use designcoded::rat::Rat;
    use std::str::FromStr;
    let reduced: Rat = value.clone();
    let num = u64::from_str(&reduced.numer().to_string());
    let den = u64::from_str(&reduced.denom().to_string());
    match (num, den) {
        (Ok(num), Ok(den)) => {
            unsafe { *out = DccRatio { num, den } };
            DccStatus::DccOk
        }
        _ => {
            set_error("ratio does not fit in 64 bits");
            DccStatus::DccInvalidParameter
        }
    }
}

/// Run placement and delivery over a random library and check that every
/// user decodes byte-exactly. On success `rate` carries S/F exactly.
#[no_mangle]
pub unsafe extern "C" fn dcc_simulate_caching(
    scheme: *const DccScheme,
    files: u32,
    subfile_len: u32,
    seed: u64,
    rate: *mut DccRatio,
) -> DccStatus {
    guard(|| {
        if scheme.is_null() || rate.is_null() {
            set_error("null argument");
            return DccStatus::DccNullArgument;
        }
        if files == 0 || subfile_len == 0 {
            set_error("files and subfile_len must be positive");
            return DccStatus::DccInvalidParameter;
        }
        let scheme = unsafe { &*scheme };
        let lib = FileLibrary::random(
            files as usize,
            scheme.matrix.cols(),
            subfile_len as usize,
            seed,
        );
        let demands: Vec<usize> = (0..scheme.matrix.rows())
            .map(|u| (seed as usize + u) % files as usize)
            .collect();
        match deliver(&scheme.matrix, &scheme.cover, &lib, &demands) {
            Ok((_, report)) => {
                if !report.decode_ok {
                    set_error("a user failed to decode its demand");
                    return DccStatus::DccVerificationFailed;
                }
                ratio_from(&report.rate, rate)
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Straggler modes for `dcc_simulate_mapreduce`.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DccStragglerMode {
    DccNoStragglers = 0,
    DccFullStragglers = 1,
    DccPartialStragglers = 2,
}

/// Run map/shuffle/reduce with beta functions per node and T-bit values;
/// `straggler_count` nodes (the lowest indices) straggle under the given
/// mode. On success `load` carries the exact measured communication load
/// and the reduce outputs matched the centralized oracle.
#[no_mangle]
pub unsafe extern "C" fn dcc_simulate_mapreduce(
    scheme: *const DccScheme,
    beta: u32,
    t_bits: u32,
    seed: u64,
    mode: DccStragglerMode,
    straggler_count: u32,
    load: *mut DccRatio,
) -> DccStatus {
    guard(|| {
        if scheme.is_null() || load.is_null() {
            set_error("null argument");
            return DccStatus::DccNullArgument;
        }
        let scheme = unsafe { &*scheme };
        let outcome = (|| {
            let q_total = beta as usize * scheme.matrix.rows();
            let cfg = ComputingConfig::new(&scheme.matrix, &scheme.cover, q_total, t_bits as usize)?;
            let file = FileLibrary::random(1, scheme.matrix.cols(), 64, seed)
                .files
                .remove(0);
            let stragglers: BTreeSet<usize> = (0..straggler_count as usize).collect();
            match mode {
                DccStragglerMode::DccNoStragglers => run_mapreduce(&cfg, &file, None),
                DccStragglerMode::DccFullStragglers => run_full_straggler(&cfg, &file, &stragglers),
                DccStragglerMode::DccPartialStragglers => {
                    run_partial_straggler(&cfg, &file, &stragglers)
                }
            }
        })();
        match outcome {
            Ok(run) => {
                if !run.reduce_ok {
                    set_error(&run.failures.join("; "));
                    return DccStatus::DccVerificationFailed;
                }
                ratio_from(&run.report.load, load)
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Gaussian binomial coefficient, exact in 64 bits.
#[no_mangle]
pub unsafe extern "C" fn dcc_gauss_binom(v: u64, k: u64, q: u64, out: *mut u64) -> DccStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output");
            return DccStatus::DccNullArgument;
        }
        match subspace::gauss_binom(v, k, q) {
            Ok(value) => {
                unsafe { *out = value };
                DccStatus::DccOk
            }
            Err(e) => {
                set_error(&e.to_string());
                DccStatus::DccInvalidParameter
            }
        }
    })
}

/// Render a comparison table ("compare-man", "straggler-designs", ...) as a
/// CSV string; free it with `dcc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn dcc_table_csv(name: *const c_char, out: *mut *mut c_char) -> DccStatus {
    guard(|| {
        if name.is_null() || out.is_null() {
            set_error("null argument");
            return DccStatus::DccNullArgument;
        }
        let Ok(name) = unsafe { CStr::from_ptr(name) }.to_str() else {
            set_error("table name is not valid UTF-8");
            return DccStatus::DccInvalidParameter;
        };
        match designcoded::cli::table_csv(name) {
            Ok(csv) => {
                let c = CString::new(csv.replace('\0', " ")).unwrap();
                unsafe { *out = c.into_raw() };
                DccStatus::DccOk
            }
            Err(e) => {
                set_error(&e.to_string());
                DccStatus::DccInvalidParameter
            }
        }
    })
}

/// Release a string returned by this library. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dcc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
