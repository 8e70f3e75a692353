//! C ABI for the dislac toolkit.
//!
//! Every function returns a [`DislacStatus`]; results go through out
//! pointers. On failure a description is kept per thread and can be read
//! with [`dislac_last_error`]. Panics never cross the boundary: they are
//! caught and reported as [`DislacStatus::Panic`].
//!
//! Objects are opaque handles created by `*_new`/`*_run` functions and
//! released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dislac::beamforming::{overhead_model, Role, TopologyKind};
use dislac::geometry::{
    delay_doppler_profile, feasibility_mask, link_observables, sample_constellation, slant_range,
    ConstellationSpec, GroundTerminal, SatelliteState,
};
use dislac::runner::{run_experiment, ExperimentSpec, RunManifest};
use dislac::waveform::{radar_metrics, required_config, OfdmConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DislacStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    /// A computation or run failed; see `dislac_last_error`.
    Failed = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DislacTopology {
    Ring = 0,
    Star = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DislacRole {
    Edge = 0,
    Central = 1,
}

/// OFDM numerology. Units: Hz, seconds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DislacOfdmConfig {
    pub delta_f: f64,
    pub n_subcarriers: u64,
    pub n_symbols: u64,
    pub t_pri: f64,
    pub fc: f64,
    pub cp: f64,
    pub scs: f64,
}

/// `r_max`, `delta_r` in km; `v_max` in km/s; `delta_v` in m/s.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DislacRadarMetrics {
    pub r_max: f64,
    pub delta_r: f64,
    pub v_max: f64,
    pub delta_v: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DislacWaveformBounds {
    /// Hz
    pub delta_f_max: f64,
    /// s
    pub t_pri_max: f64,
}

/// One satellite of a sampled constellation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DislacProfileRow {
    pub sat_id: u32,
    pub zenith_deg: f64,
    pub differential_delay_us: f64,
    pub doppler_hz: f64,
    pub delay_ok: bool,
    pub doppler_ok: bool,
}

/// Sampled constellation above one ground terminal.
pub struct DislacConstellation {
    satellites: Vec<SatelliteState>,
    terminal: GroundTerminal,
}

/// Result of an experiment run.
pub struct DislacRun {
    manifest_path: CString,
    artifacts: Vec<CString>,
    duration_s: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(DislacStatus, String);

impl Failure {
    fn failed(e: impl std::fmt::Display) -> Self {
        Self(DislacStatus::Failed, e.to_string())
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Self(DislacStatus::InvalidArgument, msg.into())
    }

    fn null(name: &str) -> Self {
        Self(DislacStatus::NullPointer, format!("`{name}` is NULL"))
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DislacStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DislacStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DislacStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| Failure::null(name))
}

unsafe fn in_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::null(name));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure(DislacStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

fn count(v: u64, name: &str) -> Result<usize, Failure> {
    usize::try_from(v).map_err(|_| Failure::invalid(format!("`{name}` too large")))
}

/// Description of the last failure on this thread, or NULL after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn dislac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dislac_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `config` must point to a valid config and `out` to writable memory.
#[no_mangle]
pub unsafe extern "C" fn dislac_radar_metrics(
    config: *const DislacOfdmConfig,
    out: *mut DislacRadarMetrics,
) -> DislacStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| Failure::null("config"))?;
        let out = out_ref(out, "out")?;
        let cfg = OfdmConfig {
            delta_f: c.delta_f,
            n_subcarriers: count(c.n_subcarriers, "n_subcarriers")?,
            n_symbols: count(c.n_symbols, "n_symbols")?,
            t_pri: c.t_pri,
            fc: c.fc,
            cp: c.cp,
            scs: c.scs,
        };
        let m = radar_metrics(&cfg).map_err(|e| Failure::invalid(e.to_string()))?;
        *out = DislacRadarMetrics {
            r_max: m.r_max,
            delta_r: m.delta_r,
            v_max: m.v_max,
            delta_v: m.delta_v,
        };
        Ok(())
    })
}

/// Largest subband spacing and Doppler interval for the unambiguous range
/// (km) and velocity (km/s) targets at carrier `fc` (Hz).
///
/// # Safety
/// `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn dislac_required_config(
    r_max_km: f64,
    v_max_km_s: f64,
    fc: f64,
    out: *mut DislacWaveformBounds,
) -> DislacStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let b = required_config(r_max_km, v_max_km_s, fc)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        *out = DislacWaveformBounds {
            delta_f_max: b.delta_f_max,
            t_pri_max: b.t_pri_max,
        };
        Ok(())
    })
}

/// Reference signaling overhead per node.
///
/// # Safety
/// `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn dislac_overhead_model(
    topology: DislacTopology,
    role: DislacRole,
    n_sats: u64,
    n_users: u64,
    out: *mut u64,
) -> DislacStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let kind = match topology {
            DislacTopology::Ring => TopologyKind::Ring,
            DislacTopology::Star => TopologyKind::Star,
        };
        let role = match role {
            DislacRole::Edge => Role::Edge,
            DislacRole::Central => Role::Central,
        };
        *out = overhead_model(kind, role, n_sats, n_users)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        Ok(())
    })
}

/// # Safety
/// `label` must be a NUL-terminated UTF-8 string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dislac_derive_seed(
    master: u64,
    label: *const c_char,
    index: u64,
    out: *mut u64,
) -> DislacStatus {
    guard(|| {
        let label = in_str(label, "label")?;
        *out_ref(out, "out")? = dislac::derive_seed(master, label, index);
        Ok(())
    })
}

/// Slant range (km) at `zenith_deg` to a shell at `altitude` km.
///
/// # Safety
/// `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn dislac_slant_range(
    zenith_deg: f64,
    altitude: f64,
    earth_radius: f64,
    out: *mut f64,
) -> DislacStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = slant_range(zenith_deg, altitude, earth_radius)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        Ok(())
    })
}

/// Samples `count` satellites above a terminal at (`lat`, `lon`) degrees on
/// the standard Earth sphere.
///
/// # Safety
/// `out` must point to writable memory. The handle written there must be
/// released with `dislac_constellation_free`.
#[no_mangle]
pub unsafe extern "C" fn dislac_constellation_new(
    count: u64,
    altitude: f64,
    speed: f64,
    zenith_min: f64,
    zenith_max: f64,
    seed: u64,
    lat: f64,
    lon: f64,
    out: *mut *mut DislacConstellation,
) -> DislacStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let spec = ConstellationSpec {
            count: self::count(count, "count")?,
            altitude,
            speed,
            zenith_min,
            zenith_max,
            ..ConstellationSpec::overhead_cluster(seed)
        };
        let terminal = GroundTerminal::from_lat_lon(lat, lon, spec.earth_radius);
        let satellites =
            sample_constellation(&spec, &terminal).map_err(|e| Failure::invalid(e.to_string()))?;
        *out = Box::into_raw(Box::new(DislacConstellation {
            satellites,
            terminal,
        }));
        Ok(())
    })
}

/// Number of satellites, 0 for NULL.
///
/// # Safety
/// `handle` must be NULL or a live constellation handle.
#[no_mangle]
pub unsafe extern "C" fn dislac_constellation_len(handle: *const DislacConstellation) -> usize {
    handle.as_ref().map_or(0, |h| h.satellites.len())
}

/// Writes one row per satellite into `rows` (capacity `capacity`) and the
/// row count into `written`. Fails with `BufferTooSmall` (and the needed
/// count in `written`) when the buffer is short.
///
/// # Safety
/// `handle` must be live, `rows` must have room for `capacity` rows and
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dislac_constellation_profile(
    handle: *const DislacConstellation,
    fc: f64,
    cp: f64,
    scs: f64,
    doppler_factor: f64,
    rows: *mut DislacProfileRow,
    capacity: usize,
    written: *mut usize,
) -> DislacStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| Failure::null("handle"))?;
        let written = out_ref(written, "written")?;
        *written = 0;
        let profile = delay_doppler_profile(&h.satellites, &h.terminal, fc)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        let mask = feasibility_mask(&profile, cp, scs, doppler_factor)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        if capacity < profile.len() {
            *written = profile.len();
            return Err(Failure(
                DislacStatus::BufferTooSmall,
                format!("need {} rows, got {capacity}", profile.len()),
            ));
        }
        if rows.is_null() {
            return Err(Failure::null("rows"));
        }
        let out = std::slice::from_raw_parts_mut(rows, capacity);
        for (i, ((sat, entry), ok)) in h.satellites.iter().zip(&profile).zip(&mask).enumerate() {
            let link = link_observables(sat, &h.terminal, fc).map_err(Failure::failed)?;
            out[i] = DislacProfileRow {
                sat_id: entry.sat_id,
                zenith_deg: link.zenith_angle,
                differential_delay_us: entry.differential_delay * 1e6,
                doppler_hz: entry.doppler,
                delay_ok: ok.delay_ok,
                doppler_ok: ok.doppler_ok,
            };
        }
        *written = profile.len();
        Ok(())
    })
}

/// # Safety
/// `handle` must be NULL or a handle from `dislac_constellation_new` not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn dislac_constellation_free(handle: *mut DislacConstellation) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Runs the experiment described by a TOML or JSON config document (a run
/// manifest also works). `output_dir` overrides the config's output
/// directory when not NULL.
///
/// # Safety
/// `config` must be a NUL-terminated UTF-8 string, `output_dir` NULL or
/// one, and `out` writable. Release the handle with `dislac_run_free`.
#[no_mangle]
pub unsafe extern "C" fn dislac_run(
    config: *const c_char,
    output_dir: *const c_char,
    out: *mut *mut DislacRun,
) -> DislacStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let text = in_str(config, "config")?;
        let mut spec = ExperimentSpec::parse(text).map_err(|e| Failure::invalid(e.to_string()))?;
        if !output_dir.is_null() {
            spec.output_dir = in_str(output_dir, "output_dir")?.into();
        }
        let manifest: RunManifest = run_experiment(&spec).map_err(Failure::failed)?;
        let c_path = |p: std::path::PathBuf| {
            CString::new(p.to_string_lossy().into_owned()).map_err(Failure::failed)
        };
        let run = DislacRun {
            manifest_path: c_path(manifest.path())?,
            artifacts: manifest
                .artifact_paths()
                .into_iter()
                .map(c_path)
                .collect::<Result<_, _>>()?,
            duration_s: manifest.duration_s,
        };
        *out = Box::into_raw(Box::new(run));
        Ok(())
    })
}

/// Path of the written manifest; owned by the handle.
///
/// # Safety
/// `handle` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn dislac_run_manifest_path(handle: *const DislacRun) -> *const c_char {
    handle
        .as_ref()
        .map_or(ptr::null(), |h| h.manifest_path.as_ptr())
}

/// # Safety
/// `handle` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn dislac_run_artifact_count(handle: *const DislacRun) -> usize {
    handle.as_ref().map_or(0, |h| h.artifacts.len())
}

/// Path of artifact `index`, NULL when out of range; owned by the handle.
///
/// # Safety
/// `handle` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn dislac_run_artifact_path(
    handle: *const DislacRun,
    index: usize,
) -> *const c_char {
    handle
        .as_ref()
        .and_then(|h| h.artifacts.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Wall-clock duration in seconds, NaN for NULL.
///
/// # Safety
/// `handle` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn dislac_run_duration(handle: *const DislacRun) -> f64 {
    handle.as_ref().map_or(f64::NAN, |h| h.duration_s)
}

/// # Safety
/// `handle` must be NULL or a handle from `dislac_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dislac_run_free(handle: *mut DislacRun) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
