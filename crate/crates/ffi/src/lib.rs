//! C interface to `noma-sat`.
//!
//! Every fallible function returns an [`NsStatus`]; on failure the message is
//! available from [`ns_last_error`] on the same thread. Objects are opaque
//! handles released with their `_free` function. Passing a null handle or
//! output pointer yields `NS_STATUS_NULL_POINTER`.
//!
//! Non-null pointers must be valid for the access they describe: handles come
//! from this library and are freed once, `rates` spans `n` doubles and `toml`
//! is NUL-terminated. The functions are exported as safe `extern "C"` because
//! that contract is stated here once for C callers.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use noma_sat::config::load_str;
use noma_sat::precode::{feeder_bandwidth, FeederScheme};
use noma_sat::regions::{
    rate_ian, region_hk, region_orthogonal, region_two_user, unit_grid, DecodingMode, HkSplit, LinkPair, RatePair,
    RateRegion,
};
use noma_sat::syssim::{compare_schemes, jain_fairness, Comparison, Scheme, SimConfig};
use noma_sat::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsStatus {
    Ok = 0,
    InvalidArgument = 1,
    SingularChannel = 2,
    InsufficientUsers = 3,
    SizeLimit = 4,
    Config = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

pub const NS_MODE_IAN: u32 = 0;
pub const NS_MODE_SD: u32 = 1;
pub const NS_MODE_SND: u32 = 2;

pub const NS_FEEDER_SINGLE_LAYER: u32 = 0;
pub const NS_FEEDER_LDM: u32 = 1;
pub const NS_FEEDER_BROADCAST_MULTICAST: u32 = 2;

pub const NS_SCHEME_FOUR_COLOR: u32 = 0;
pub const NS_SCHEME_SINGLE_LAYER_PRECODING: u32 = 1;
pub const NS_SCHEME_MULTILAYER_NOMA: u32 = 2;
pub const NS_SCHEME_BROADCAST_MULTICAST: u32 = 3;

/// Scheduler code of rows whose scheme uses none.
pub const NS_SCHEDULER_NONE: i32 = -1;

/// Rate region (opaque).
pub struct NsRegion(RateRegion);

/// Simulation configuration (opaque).
pub struct NsSimConfig(SimConfig);

/// Result of [`ns_compare_schemes`] (opaque).
pub struct NsSummary(Comparison);

/// One aggregated scheme/scheduler row. `gain_vs_four_color_pct` is NaN when
/// the baseline was not simulated.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsSummaryRow {
    pub scheme: u32,
    /// Index into `min_gain_diff, max_gain_diff, collinear_min_gain, random`,
    /// or `NS_SCHEDULER_NONE`.
    pub scheduler: i32,
    pub drops: u64,
    pub mean_bps: f64,
    pub median_bps: f64,
    pub p10_bps: f64,
    pub mean_jain: f64,
    pub gain_vs_four_color_pct: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> NsStatus {
    match e {
        Error::InvalidArgument(_) => NsStatus::InvalidArgument,
        Error::SingularChannel { .. } => NsStatus::SingularChannel,
        Error::InsufficientUsers { .. } => NsStatus::InsufficientUsers,
        Error::SizeLimit(_) => NsStatus::SizeLimit,
        Error::Config(_) => NsStatus::Config,
        Error::Io { .. } => NsStatus::Io,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, catching panics and recording errors.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("{what} is null"));
            NsStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            NsStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: caller promises a valid, writable pointer when non-null.
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: caller promises a live handle when non-null.
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

/// Message of the last failed call on this thread; valid until the next
/// call into the library. Never null.
#[no_mangle]
pub extern "C" fn ns_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `log2(1 + snr / (1 + inr))`.
#[no_mangle]
pub extern "C" fn ns_rate_ian(snr: f64, inr: f64, out_rate: *mut f64) -> NsStatus {
    guard(|| {
        *out(out_rate, "out_rate")? = rate_ian(snr, inr)?;
        Ok(())
    })
}

fn link(s1: f64, s2: f64, i1: f64, i2: f64) -> Result<LinkPair, Fail> {
    Ok(LinkPair::new(s1, s2, i1, i2)?)
}

fn emit_region(r: RateRegion, out_region: *mut *mut NsRegion) -> Result<(), Fail> {
    *out(out_region, "out_region")? = Box::into_raw(Box::new(NsRegion(r)));
    Ok(())
}

/// Two-user region for `mode` (`NS_MODE_*`). Linear SNR/INR values.
#[no_mangle]
pub extern "C" fn ns_region_two_user(
    s1: f64,
    s2: f64,
    i1: f64,
    i2: f64,
    mode: u32,
    out_region: *mut *mut NsRegion,
) -> NsStatus {
    guard(|| {
        let mode = match mode {
            NS_MODE_IAN => DecodingMode::Ian,
            NS_MODE_SD => DecodingMode::Sd,
            NS_MODE_SND => DecodingMode::Snd,
            m => return Err(Error::InvalidArgument(format!("unknown mode {m}")).into()),
        };
        emit_region(region_two_user(&link(s1, s2, i1, i2)?, mode)?, out_region)
    })
}

/// Han–Kobayashi region over a power-split grid of the given step.
#[no_mangle]
pub extern "C" fn ns_region_hk(
    s1: f64,
    s2: f64,
    i1: f64,
    i2: f64,
    step: f64,
    out_region: *mut *mut NsRegion,
) -> NsStatus {
    guard(|| emit_region(region_hk(&link(s1, s2, i1, i2)?, &HkSplit::grid(step)?)?, out_region))
}

/// Frequency-division region with power scaling over a time-share grid.
#[no_mangle]
pub extern "C" fn ns_region_orthogonal(
    s1: f64,
    s2: f64,
    i1: f64,
    i2: f64,
    step: f64,
    out_region: *mut *mut NsRegion,
) -> NsStatus {
    guard(|| {
        emit_region(
            region_orthogonal(&link(s1, s2, i1, i2)?, &unit_grid(step)?)?,
            out_region,
        )
    })
}

/// Number of Pareto boundary points; 0 for a null handle.
#[no_mangle]
pub extern "C" fn ns_region_len(region: *const NsRegion) -> usize {
    handle(region, "region").map_or(0, |r| r.0.boundary().len())
}

/// Boundary point `index`, ordered by increasing `r1`.
#[no_mangle]
pub extern "C" fn ns_region_point(region: *const NsRegion, index: usize, r1: *mut f64, r2: *mut f64) -> NsStatus {
    guard(|| {
        let r = handle(region, "region")?;
        let p =
            r.0.boundary()
                .get(index)
                .ok_or_else(|| Error::InvalidArgument(format!("index {index} out of range")))?;
        *out(r1, "r1")? = p.r1;
        *out(r2, "r2")? = p.r2;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ns_region_max_sum(region: *const NsRegion, out_sum: *mut f64) -> NsStatus {
    guard(|| {
        *out(out_sum, "out_sum")? = handle(region, "region")?.0.max_sum_rate().0;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ns_region_contains(
    region: *const NsRegion,
    r1: f64,
    r2: f64,
    tol: f64,
    out_inside: *mut bool,
) -> NsStatus {
    guard(|| {
        *out(out_inside, "out_inside")? = handle(region, "region")?.0.contains_point(RatePair::new(r1, r2), tol);
        Ok(())
    })
}

/// Releases a region; null is ignored.
#[no_mangle]
pub extern "C" fn ns_region_free(region: *mut NsRegion) {
    if !region.is_null() {
        // SAFETY: produced by Box::into_raw in this library and freed once.
        drop(unsafe { Box::from_raw(region) });
    }
}

/// Feeder-link bandwidth in Hz for `scheme` (`NS_FEEDER_*`).
#[no_mangle]
pub extern "C" fn ns_feeder_bandwidth(scheme: u32, k: u64, b: f64, out_hz: *mut f64) -> NsStatus {
    guard(|| {
        let s = *FeederScheme::ALL
            .get(scheme as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown feeder scheme {scheme}")))?;
        *out(out_hz, "out_hz")? = feeder_bandwidth(s, k, b)?.total_hz;
        Ok(())
    })
}

/// Jain's fairness index of `n` rates.
#[no_mangle]
pub extern "C" fn ns_jain_fairness(rates: *const f64, n: usize, out_jain: *mut f64) -> NsStatus {
    guard(|| {
        if rates.is_null() {
            return Err(Fail::Null("rates"));
        }
        // SAFETY: caller provides `n` readable doubles.
        let v = unsafe { std::slice::from_raw_parts(rates, n) };
        *out(out_jain, "out_jain")? = jain_fairness(v)?;
        Ok(())
    })
}

/// Parses a TOML simulation configuration; absent keys take defaults.
#[no_mangle]
pub extern "C" fn ns_sim_config_from_toml(toml: *const c_char, out_config: *mut *mut NsSimConfig) -> NsStatus {
    guard(|| {
        if toml.is_null() {
            return Err(Fail::Null("toml"));
        }
        // SAFETY: caller provides a NUL-terminated string.
        let text = unsafe { CStr::from_ptr(toml) }
            .to_str()
            .map_err(|e| Error::Config(e.to_string()))?;
        let cfg: SimConfig = load_str(text, &[])?;
        cfg.validate()?;
        *out(out_config, "out_config")? = Box::into_raw(Box::new(NsSimConfig(cfg)));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ns_sim_config_free(config: *mut NsSimConfig) {
    if !config.is_null() {
        // SAFETY: produced by Box::into_raw in this library and freed once.
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Runs the Monte Carlo comparison.
#[no_mangle]
pub extern "C" fn ns_compare_schemes(config: *const NsSimConfig, out_summary: *mut *mut NsSummary) -> NsStatus {
    guard(|| {
        let slot = out(out_summary, "out_summary")?;
        *slot = ptr::null_mut();
        let cmp = compare_schemes(&handle(config, "config")?.0)?;
        *slot = Box::into_raw(Box::new(NsSummary(cmp)));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ns_summary_len(summary: *const NsSummary) -> usize {
    handle(summary, "summary").map_or(0, |s| s.0.rows.len())
}

/// Drops skipped after repeated singular channels.
#[no_mangle]
pub extern "C" fn ns_summary_skipped(summary: *const NsSummary) -> usize {
    handle(summary, "summary").map_or(0, |s| s.0.skipped)
}

#[no_mangle]
pub extern "C" fn ns_summary_row(summary: *const NsSummary, index: usize, out_row: *mut NsSummaryRow) -> NsStatus {
    guard(|| {
        let s = handle(summary, "summary")?;
        let r =
            s.0.rows
                .get(index)
                .ok_or_else(|| Error::InvalidArgument(format!("row {index} out of range")))?;
        let scheme = Scheme::ALL.iter().position(|&x| x == r.scheme).expect("known scheme") as u32;
        let scheduler = r.scheduler.map_or(NS_SCHEDULER_NONE, |p| {
            noma_sat::sched::PairingStrategy::ALL
                .iter()
                .position(|&x| x == p)
                .expect("known scheduler") as i32
        });
        *out(out_row, "out_row")? = NsSummaryRow {
            scheme,
            scheduler,
            drops: r.drops as u64,
            mean_bps: r.mean_bps,
            median_bps: r.median_bps,
            p10_bps: r.p10_bps,
            mean_jain: r.mean_jain,
            gain_vs_four_color_pct: r.gain_vs_four_color_pct.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ns_summary_free(summary: *mut NsSummary) {
    if !summary.is_null() {
        // SAFETY: produced by Box::into_raw in this library and freed once.
        drop(unsafe { Box::from_raw(summary) });
    }
}
