//! C ABI over `pragmatic-rsa`.
//!
//! Objects cross the boundary as opaque handles that the caller owns and
//! releases with the matching `*_free` function. Every fallible call returns
//! a [`PrsaStatus`]; on failure the message is available from
//! [`prsa_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use pragmatic_rsa::harness::{self, evaluate_speaker, ExperimentConfig, Slice, SpeakerKind};
use pragmatic_rsa::pragmatic::train;
use pragmatic_rsa::scenes::{load_dataset, save_dataset};
use pragmatic_rsa::{load_taxonomy, Dataset, DisparityPolicy, Error, Taxonomy};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrsaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    IoError = 4,
    ParseError = 5,
    RuntimeError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrsaSpeaker {
    Literal = 0,
    Rational = 1,
    Pragmatic = 2,
    UpperBound = 3,
}

impl From<PrsaSpeaker> for SpeakerKind {
    fn from(s: PrsaSpeaker) -> Self {
        match s {
            PrsaSpeaker::Literal => SpeakerKind::S0,
            PrsaSpeaker::Rational => SpeakerKind::S1,
            PrsaSpeaker::Pragmatic => SpeakerKind::S1d,
            PrsaSpeaker::UpperBound => SpeakerKind::S1nd,
        }
    }
}

/// Accuracy per difficulty slice.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PrsaAccuracy {
    pub hard: f64,
    pub easy: f64,
    pub combined: f64,
}

pub struct PrsaTaxonomy(Taxonomy);
pub struct PrsaConfig(ExperimentConfig);
pub struct PrsaDataset(Dataset);
pub struct PrsaPolicy(DisparityPolicy);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> PrsaStatus {
    match err {
        Error::Io { .. } => PrsaStatus::IoError,
        Error::Parse { .. } | Error::Json(_) | Error::TaxonomyLoad { .. } => PrsaStatus::ParseError,
        e if e.is_config() => PrsaStatus::ConfigError,
        _ => PrsaStatus::RuntimeError,
    }
}

struct Failure(PrsaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PrsaStatus::NullArgument, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PrsaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PrsaStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            PrsaStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn string_arg(p: *const c_char, what: &str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure(PrsaStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn store<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next `prsa_*` call on the same thread.
#[no_mangle]
pub extern "C" fn prsa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn prsa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The built-in object/category taxonomy.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn prsa_taxonomy_new(out: *mut *mut PrsaTaxonomy) -> PrsaStatus {
    guard(|| store(out, PrsaTaxonomy(load_taxonomy()), "out"))
}

/// # Safety
/// `tax` must be null or a handle from [`prsa_taxonomy_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn prsa_taxonomy_free(tax: *mut PrsaTaxonomy) {
    release(tax)
}

/// Category of `token` (a category maps to itself). The result must be
/// released with [`prsa_string_free`].
///
/// # Safety
/// Pointers must be valid; `token` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn prsa_hypernym_of(
    tax: *const PrsaTaxonomy,
    token: *const c_char,
    out: *mut *mut c_char,
) -> PrsaStatus {
    guard(|| {
        let tax = borrow(tax, "tax")?;
        let token = string_arg(token, "token")?;
        let name = tax.0.hypernym_of(&token)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(name)
            .expect("token names have no nul")
            .into_raw();
        Ok(())
    })
}

/// Default experiment configuration.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn prsa_config_default(out: *mut *mut PrsaConfig) -> PrsaStatus {
    guard(|| store(out, PrsaConfig(ExperimentConfig::default()), "out"))
}

/// Configuration parsed from TOML text; unset fields keep their defaults.
///
/// # Safety
/// `toml` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prsa_config_from_toml(
    toml: *const c_char,
    out: *mut *mut PrsaConfig,
) -> PrsaStatus {
    guard(|| {
        let text = string_arg(toml, "toml")?;
        store(out, PrsaConfig(ExperimentConfig::from_toml(&text)?), "out")
    })
}

/// # Safety
/// `config` must be null or a live config handle.
#[no_mangle]
pub unsafe extern "C" fn prsa_config_free(config: *mut PrsaConfig) {
    release(config)
}

/// Generates the dataset described by `config` (or loads its `dataset` file).
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prsa_dataset_generate(
    config: *const PrsaConfig,
    tax: *const PrsaTaxonomy,
    out: *mut *mut PrsaDataset,
) -> PrsaStatus {
    guard(|| {
        let config = borrow(config, "config")?;
        let tax = borrow(tax, "tax")?;
        config.0.validate(&tax.0)?;
        store(
            out,
            PrsaDataset(harness::prepare_dataset(&config.0, &tax.0)?),
            "out",
        )
    })
}

/// # Safety
/// Handles must be live; `path` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn prsa_dataset_load(
    path: *const c_char,
    tax: *const PrsaTaxonomy,
    out: *mut *mut PrsaDataset,
) -> PrsaStatus {
    guard(|| {
        let path = string_arg(path, "path")?;
        let tax = borrow(tax, "tax")?;
        store(out, PrsaDataset(load_dataset(path, &tax.0)?), "out")
    })
}

/// # Safety
/// Handles must be live; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn prsa_dataset_save(
    dataset: *const PrsaDataset,
    path: *const c_char,
    tax: *const PrsaTaxonomy,
) -> PrsaStatus {
    guard(|| {
        let ds = borrow(dataset, "dataset")?;
        let path = string_arg(path, "path")?;
        let tax = borrow(tax, "tax")?;
        Ok(save_dataset(&ds.0, path, &tax.0)?)
    })
}

/// Split sizes. Any of the output pointers may be null.
///
/// # Safety
/// `dataset` must be live; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn prsa_dataset_sizes(
    dataset: *const PrsaDataset,
    train: *mut usize,
    val: *mut usize,
    test: *mut usize,
) -> PrsaStatus {
    guard(|| {
        let ds = &borrow(dataset, "dataset")?.0;
        for (out, n) in [
            (train, ds.train.len()),
            (val, ds.val.len()),
            (test, ds.test.len()),
        ] {
            if !out.is_null() {
                *out = n;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn prsa_dataset_free(dataset: *mut PrsaDataset) {
    release(dataset)
}

/// Trains the disparity layer for repeat `repeat` of `config` against the
/// configured listener and returns the best validation snapshot.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn prsa_train(
    dataset: *const PrsaDataset,
    config: *const PrsaConfig,
    tax: *const PrsaTaxonomy,
    repeat: u32,
    out: *mut *mut PrsaPolicy,
) -> PrsaStatus {
    guard(|| {
        let ds = borrow(dataset, "dataset")?;
        let config = borrow(config, "config")?;
        let tax = borrow(tax, "tax")?;
        let listener = config.0.listener(&tax.0)?;
        let (policy, _) = train(
            &ds.0,
            &listener,
            &config.0.train_config(repeat as usize),
            &tax.0,
        )?;
        store(out, PrsaPolicy(policy), "out")
    })
}

/// # Safety
/// Handles must be live; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn prsa_policy_save(
    policy: *const PrsaPolicy,
    path: *const c_char,
    tax: *const PrsaTaxonomy,
) -> PrsaStatus {
    guard(|| {
        let policy = borrow(policy, "policy")?;
        let path = string_arg(path, "path")?;
        let tax = borrow(tax, "tax")?;
        Ok(policy.0.save(path, &tax.0)?)
    })
}

/// # Safety
/// Handles must be live; `path` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn prsa_policy_load(
    path: *const c_char,
    tax: *const PrsaTaxonomy,
    out: *mut *mut PrsaPolicy,
) -> PrsaStatus {
    guard(|| {
        let path = string_arg(path, "path")?;
        let tax = borrow(tax, "tax")?;
        store(out, PrsaPolicy(DisparityPolicy::load(path, &tax.0)?), "out")
    })
}

/// Learned preference weight of `token`.
///
/// # Safety
/// Handles must be live; `token` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn prsa_policy_weight(
    policy: *const PrsaPolicy,
    token: *const c_char,
    tax: *const PrsaTaxonomy,
    out: *mut f64,
) -> PrsaStatus {
    guard(|| {
        let policy = borrow(policy, "policy")?;
        let token = string_arg(token, "token")?;
        let tax = borrow(tax, "tax")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = policy.0.weight(tax.0.try_id(&token)?);
        Ok(())
    })
}

/// # Safety
/// `policy` must be null or a live policy handle.
#[no_mangle]
pub unsafe extern "C" fn prsa_policy_free(policy: *mut PrsaPolicy) {
    release(policy)
}

/// Plays `speaker` against the configured listener on the test split.
/// `policy` may be null unless `speaker` is `Pragmatic`.
///
/// # Safety
/// Handles must be live (or null where allowed); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn prsa_evaluate(
    speaker: PrsaSpeaker,
    dataset: *const PrsaDataset,
    config: *const PrsaConfig,
    policy: *const PrsaPolicy,
    tax: *const PrsaTaxonomy,
    seed: u64,
    out: *mut PrsaAccuracy,
) -> PrsaStatus {
    guard(|| {
        let ds = borrow(dataset, "dataset")?;
        let config = borrow(config, "config")?;
        let tax = borrow(tax, "tax")?;
        let policy = policy.as_ref().map(|p| &p.0);
        if out.is_null() {
            return Err(null("out"));
        }
        let listener = config.0.listener(&tax.0)?;
        let eval = evaluate_speaker(
            speaker.into(),
            &ds.0.test,
            config.0.mode,
            &listener,
            policy,
            &tax.0,
            seed,
        )?;
        *out = PrsaAccuracy {
            hard: eval.accuracy(Slice::Hard),
            easy: eval.accuracy(Slice::Easy),
            combined: eval.accuracy(Slice::Combined),
        };
        Ok(())
    })
}

/// Full run: trains every repeat, evaluates all speakers and writes the
/// reports and checkpoints under `out_dir`. `combined` (nullable) receives
/// the Combined mean accuracy of each speaker in literal, rational,
/// pragmatic, upper-bound order.
///
/// # Safety
/// Handles must be live; `out_dir` must be NUL-terminated; a non-null
/// `combined` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn prsa_run_experiment(
    config: *const PrsaConfig,
    tax: *const PrsaTaxonomy,
    out_dir: *const c_char,
    combined: *mut f64,
) -> PrsaStatus {
    guard(|| {
        let config = borrow(config, "config")?;
        let tax = borrow(tax, "tax")?;
        let dir = PathBuf::from(string_arg(out_dir, "out_dir")?);
        let outcome = harness::run_experiment(&config.0, &tax.0, Some(&dir))?;
        if !combined.is_null() {
            for (i, kind) in SpeakerKind::ALL.into_iter().enumerate() {
                *combined.add(i) = outcome.accuracy.mean(kind, Slice::Combined);
            }
        }
        Ok(())
    })
}
