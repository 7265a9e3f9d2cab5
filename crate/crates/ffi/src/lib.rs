//! C interface to the comsr compressor.
//!
//! Databases and runs are opaque handles released with their `_free`
//! function. Every fallible call returns a [`ComsrStatus`]; on failure the
//! message is available from [`comsr_last_error_message`] on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`comsr_string_free`].

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use comsr::codec::{ArchiveFile, CodeSetFile, CoverOptions, CoverPolicy, PartialCost};
use comsr::compress::{run, CompressConfig, CompressionRun, Mode};
use comsr::rulemine::{SizeCaps, Thresholds};
use comsr::seqdb::{parse_spmf, SequenceDatabase};
use comsr::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ComsrStatus {
    COMSR_OK = 0,
    /// A required pointer argument was null.
    COMSR_ERR_NULL_ARGUMENT = 1,
    /// A string argument was not valid UTF-8.
    COMSR_ERR_UTF8 = 2,
    /// The SPMF text could not be parsed.
    COMSR_ERR_PARSE = 3,
    /// Thresholds, caps or database shape were rejected.
    COMSR_ERR_INVALID = 4,
    COMSR_ERR_IO = 5,
    /// An archive or code set was malformed or inconsistent.
    COMSR_ERR_DECODE = 6,
    /// An internal consistency check failed.
    COMSR_ERR_INTERNAL = 7,
    /// A Rust panic was caught at the boundary.
    COMSR_ERR_PANIC = 8,
}

use ComsrStatus::*;

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ComsrMode {
    /// Start from the 1x1 rules that meet the thresholds.
    COMSR_MODE_NON = 0,
    /// Start from every 1x1 rule with non-zero support.
    COMSR_MODE_FUL = 1,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ComsrCoverPolicy {
    COMSR_COVER_REPEAT = 0,
    COMSR_COVER_SINGLE = 1,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ComsrPartialCost {
    COMSR_PARTIAL_TWO = 0,
    COMSR_PARTIAL_UNIFORM = 1,
}

/// Parameters of one compression run. Enum fields must hold one of the
/// listed constants.
#[repr(C)]
#[derive(Copy, Clone, Debug)]
pub struct ComsrOptions {
    pub mode: ComsrMode,
    pub minsup: f64,
    pub minconf: f64,
    pub max_antecedent: usize,
    pub max_consequent: usize,
    pub cover: ComsrCoverPolicy,
    pub partial_cost: ComsrPartialCost,
}

/// Headline numbers of a finished run.
#[repr(C)]
#[derive(Copy, Clone, Debug, Default)]
pub struct ComsrRunSummary {
    pub mined_rule_count: usize,
    pub candidate_count: usize,
    pub accepted_count: usize,
    pub rejected_count: usize,
    pub initial_rule_count: usize,
    pub initial_rules_used: usize,
    pub final_rule_count: usize,
    pub initial_total: u64,
    pub model_length: u64,
    pub data_length: u64,
    pub residual_length: u64,
    pub total_length: u64,
    pub compression_ratio: f64,
    pub mining_seconds: f64,
    pub loop_seconds: f64,
}

/// Opaque sequence database.
pub struct ComsrDatabase {
    db: SequenceDatabase,
}

/// Opaque result of a compression run.
pub struct ComsrRun {
    run: CompressionRun,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(ComsrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => COMSR_ERR_PARSE,
            Error::Io(_) => COMSR_ERR_IO,
            Error::Decode(_) | Error::UsageMismatch(_) | Error::Json(_) => COMSR_ERR_DECODE,
            Error::Internal(_) => COMSR_ERR_INTERNAL,
            _ => COMSR_ERR_INVALID,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

/// Runs `body`, recording any error or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ComsrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            COMSR_OK
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {message}"));
            COMSR_ERR_PANIC
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(COMSR_ERR_NULL_ARGUMENT, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(COMSR_ERR_UTF8, format!("{name}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

fn into_c_string(text: String) -> Result<*mut c_char, Failure> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| Failure(COMSR_ERR_INTERNAL, "output contains a NUL byte".into()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn comsr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn comsr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses SPMF text into a new database.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_database_parse(text: *const c_char, out: *mut *mut ComsrDatabase) -> ComsrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let db = parse_spmf(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(ComsrDatabase { db }));
        Ok(())
    })
}

/// Reads an SPMF file into a new database.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_database_load(path: *const c_char, out: *mut *mut ComsrDatabase) -> ComsrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let db = SequenceDatabase::load(Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(ComsrDatabase { db }));
        Ok(())
    })
}

/// Releases a database. Null is ignored.
///
/// # Safety
/// `db` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn comsr_database_free(db: *mut ComsrDatabase) {
    if !db.is_null() {
        drop(Box::from_raw(db));
    }
}

/// Keeps only the first `limit` sequences.
///
/// # Safety
/// `db` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn comsr_database_truncate(db: *mut ComsrDatabase, limit: usize) -> ComsrStatus {
    guard(|| {
        out_arg(db, "db")?.db.truncate(limit);
        Ok(())
    })
}

/// Sequence count, distinct items and total item occurrences. Any of the
/// out-pointers may be null.
///
/// # Safety
/// `db` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_database_counts(
    db: *const ComsrDatabase,
    sequences: *mut usize,
    alphabet: *mut usize,
    total_items: *mut usize,
) -> ComsrStatus {
    guard(|| {
        let db = &ref_arg(db, "db")?.db;
        for (p, v) in [(sequences, db.len()), (alphabet, db.alphabet().len()), (total_items, db.total_items())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Writes the database back as normalized SPMF text.
///
/// # Safety
/// `db` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_database_to_spmf(db: *const ComsrDatabase, out: *mut *mut c_char) -> ComsrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        *out = into_c_string(ref_arg(db, "db")?.db.to_spmf())?;
        Ok(())
    })
}

/// Defaults: non mode, thresholds 0.5/0.5, caps 4x1, repeat cover, partial
/// cost two.
#[no_mangle]
pub extern "C" fn comsr_options_default() -> ComsrOptions {
    let caps = SizeCaps::default();
    ComsrOptions {
        mode: ComsrMode::COMSR_MODE_NON,
        minsup: 0.5,
        minconf: 0.5,
        max_antecedent: caps.max_antecedent,
        max_consequent: caps.max_consequent,
        cover: ComsrCoverPolicy::COMSR_COVER_REPEAT,
        partial_cost: ComsrPartialCost::COMSR_PARTIAL_TWO,
    }
}

impl ComsrOptions {
    fn config(&self) -> CompressConfig {
        CompressConfig {
            mode: match self.mode {
                ComsrMode::COMSR_MODE_NON => Mode::Non,
                ComsrMode::COMSR_MODE_FUL => Mode::Ful,
            },
            thresholds: Thresholds {
                minsup: self.minsup,
                minconf: self.minconf,
            },
            caps: SizeCaps {
                max_antecedent: self.max_antecedent,
                max_consequent: self.max_consequent,
            },
            cover: CoverOptions {
                policy: match self.cover {
                    ComsrCoverPolicy::COMSR_COVER_REPEAT => CoverPolicy::Repeat,
                    ComsrCoverPolicy::COMSR_COVER_SINGLE => CoverPolicy::Single,
                },
                partial_cost: match self.partial_cost {
                    ComsrPartialCost::COMSR_PARTIAL_TWO => PartialCost::Two,
                    ComsrPartialCost::COMSR_PARTIAL_UNIFORM => PartialCost::Uniform,
                },
            },
        }
    }
}

/// Runs the greedy selection. Null `options` means the defaults.
///
/// # Safety
/// `db` must be a live handle; `options` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_compress(
    db: *const ComsrDatabase,
    options: *const ComsrOptions,
    out: *mut *mut ComsrRun,
) -> ComsrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let db = &ref_arg(db, "db")?.db;
        let options = options.as_ref().copied().unwrap_or_else(|| comsr_options_default());
        let run = run(db, &options.config())?;
        *out = Box::into_raw(Box::new(ComsrRun { run }));
        Ok(())
    })
}

/// Releases a run. Null is ignored.
///
/// # Safety
/// `run` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn comsr_run_free(run: *mut ComsrRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// # Safety
/// `run` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_run_summary(run: *const ComsrRun, out: *mut ComsrRunSummary) -> ComsrStatus {
    guard(|| {
        let r = &ref_arg(run, "run")?.run;
        *out_arg(out, "out")? = ComsrRunSummary {
            mined_rule_count: r.mined_rule_count,
            candidate_count: r.candidate_count,
            accepted_count: r.accepted.len(),
            rejected_count: r.rejected,
            initial_rule_count: r.initial_code_size,
            initial_rules_used: r.initial_rules_used,
            final_rule_count: r.code_set.len(),
            initial_total: r.initial.total,
            model_length: r.final_length.model_length,
            data_length: r.final_length.data_length,
            residual_length: r.final_length.residual_length,
            total_length: r.final_length.total,
            compression_ratio: r.compression_ratio,
            mining_seconds: r.mining_seconds,
            loop_seconds: r.loop_seconds,
        };
        Ok(())
    })
}

unsafe fn run_text(
    run: *const ComsrRun,
    out: *mut *mut c_char,
    render: impl FnOnce(&CompressionRun) -> comsr::Result<String>,
) -> ComsrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        *out = into_c_string(render(&ref_arg(run, "run")?.run)?)?;
        Ok(())
    })
}

/// Run report as JSON.
///
/// # Safety
/// `run` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_run_report_json(run: *const ComsrRun, out: *mut *mut c_char) -> ComsrStatus {
    run_text(run, out, |r| Ok(serde_json::to_string_pretty(&r.report())?))
}

/// Final code set as JSON, readable by [`comsr_decode_json`].
///
/// # Safety
/// `run` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_run_codeset_json(run: *const ComsrRun, out: *mut *mut c_char) -> ComsrStatus {
    run_text(run, out, |r| CodeSetFile::to_json(&r.code_set))
}

/// Encoded database as JSON, readable by [`comsr_decode_json`].
///
/// # Safety
/// `run` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_run_archive_json(run: *const ComsrRun, out: *mut *mut c_char) -> ComsrStatus {
    run_text(run, out, |r| ArchiveFile::to_json(&r.encoded))
}

/// Decodes an archive with its code set into SPMF text.
///
/// # Safety
/// `archive` and `codeset` must be NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn comsr_decode_json(
    archive: *const c_char,
    codeset: *const c_char,
    out: *mut *mut c_char,
) -> ComsrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let enc = ArchiveFile::from_json(str_arg(archive, "archive")?)?;
        let code = CodeSetFile::from_json(str_arg(codeset, "codeset")?)?;
        let db = comsr::decode(&enc, &code).map_err(|e| Failure(COMSR_ERR_DECODE, e.to_string()))?;
        *out = into_c_string(db.to_spmf())?;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn comsr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
