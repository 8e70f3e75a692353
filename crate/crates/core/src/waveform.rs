//! OFDM radar metrics and inverse waveform design.
//!
//! All range quantities use the monostatic (two-way) convention. The
//! Doppler sampling interval `t_pri` is kept separate from `1 / delta_f`;
//! [`metrics_sweep`] ties them for illustration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::SPEED_OF_LIGHT_M_S;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveformError {
    #[error("invalid OFDM configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid sweep: {0}")]
    InvalidSweep(&'static str),
    #[error("design targets must be positive and finite")]
    InvalidTarget,
}

/// OFDM numerology relevant to sensing and positioning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfdmConfig {
    /// Subband spacing, Hz.
    pub delta_f: f64,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    /// Doppler sampling interval, s.
    pub t_pri: f64,
    /// Carrier, Hz.
    pub fc: f64,
    /// Cyclic prefix, s.
    pub cp: f64,
    /// Subcarrier spacing used for positioning feasibility, Hz.
    pub scs: f64,
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<(), WaveformError> {
        if !(self.delta_f > 0.0 && self.delta_f.is_finite()) {
            return Err(WaveformError::InvalidConfig("delta_f must be positive"));
        }
        if self.n_subcarriers == 0 {
            return Err(WaveformError::InvalidConfig("n_subcarriers must be >= 1"));
        }
        if self.n_symbols == 0 {
            return Err(WaveformError::InvalidConfig("n_symbols must be >= 1"));
        }
        if !(self.t_pri > 0.0 && self.t_pri.is_finite()) {
            return Err(WaveformError::InvalidConfig("t_pri must be positive"));
        }
        if !(self.fc > 0.0 && self.fc.is_finite()) {
            return Err(WaveformError::InvalidConfig("fc must be positive"));
        }
        Ok(())
    }
}

impl Default for OfdmConfig {
    /// 1 GHz carrier, 1024 subcarriers, 1 kHz subbands, `t_pri = 1 / delta_f`.
    fn default() -> Self {
        Self {
            delta_f: 1e3,
            n_subcarriers: 1024,
            n_symbols: 64,
            t_pri: 1e-3,
            fc: 1e9,
            cp: 1.6e-6,
            scs: 60e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadarMetrics {
    /// Maximum unambiguous range, km.
    pub r_max: f64,
    /// Range resolution, km.
    pub delta_r: f64,
    /// Maximum unambiguous velocity, km/s.
    pub v_max: f64,
    /// Velocity resolution, m/s.
    pub delta_v: f64,
}

/// Radar metrics of `cfg` with the exact speed of light.
pub fn radar_metrics(cfg: &OfdmConfig) -> Result<RadarMetrics, WaveformError> {
    radar_metrics_with_speed(cfg, SPEED_OF_LIGHT_M_S)
}

/// Radar metrics of `cfg` for propagation speed `c` (m/s).
pub fn radar_metrics_with_speed(cfg: &OfdmConfig, c: f64) -> Result<RadarMetrics, WaveformError> {
    cfg.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(WaveformError::InvalidConfig(
            "propagation speed must be positive",
        ));
    }
    let r_max_m = c / (2.0 * cfg.delta_f);
    let v_max_m_s = c / (4.0 * cfg.fc * cfg.t_pri);
    Ok(RadarMetrics {
        r_max: r_max_m / 1000.0,
        delta_r: r_max_m / cfg.n_subcarriers as f64 / 1000.0,
        v_max: v_max_m_s / 1000.0,
        delta_v: 2.0 * v_max_m_s / cfg.n_symbols as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta_f: f64,
    pub metrics: RadarMetrics,
}

/// Radar metrics over `levels` log-spaced subband spacings from
/// `delta_f_min` to `delta_f_max` (inclusive), with `t_pri = 1 / delta_f`.
pub fn metrics_sweep(
    delta_f_min: f64,
    delta_f_max: f64,
    levels: usize,
    template: &OfdmConfig,
) -> Result<Vec<SweepRow>, WaveformError> {
    metrics_sweep_with_speed(
        delta_f_min,
        delta_f_max,
        levels,
        template,
        SPEED_OF_LIGHT_M_S,
    )
}

pub fn metrics_sweep_with_speed(
    delta_f_min: f64,
    delta_f_max: f64,
    levels: usize,
    template: &OfdmConfig,
    c: f64,
) -> Result<Vec<SweepRow>, WaveformError> {
    if levels < 2 {
        return Err(WaveformError::InvalidSweep("need at least two levels"));
    }
    if !(delta_f_min > 0.0 && delta_f_min < delta_f_max && delta_f_max.is_finite()) {
        return Err(WaveformError::InvalidSweep(
            "need 0 < delta_f_min < delta_f_max",
        ));
    }
    let ratio = delta_f_max / delta_f_min;
    let last = (levels - 1) as f64;
    (0..levels)
        .map(|i| {
            let delta_f = match i {
                0 => delta_f_min,
                i if i == levels - 1 => delta_f_max,
                i => delta_f_min * ratio.powf(i as f64 / last),
            };
            let cfg = OfdmConfig {
                delta_f,
                t_pri: 1.0 / delta_f,
                ..*template
            };
            radar_metrics_with_speed(&cfg, c).map(|metrics| SweepRow { delta_f, metrics })
        })
        .collect()
}

/// Largest subband spacing and Doppler sampling interval meeting the targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveformBounds {
    /// Hz
    pub delta_f_max: f64,
    /// s
    pub t_pri_max: f64,
}

/// Inverts the unambiguous range (km) and velocity (km/s) requirements at
/// carrier `fc` Hz.
pub fn required_config(
    r_max_target: f64,
    v_max_target: f64,
    fc: f64,
) -> Result<WaveformBounds, WaveformError> {
    let ok = |x: f64| x > 0.0 && x.is_finite();
    if !(ok(r_max_target) && ok(v_max_target) && ok(fc)) {
        return Err(WaveformError::InvalidTarget);
    }
    Ok(WaveformBounds {
        delta_f_max: SPEED_OF_LIGHT_M_S / (2.0 * r_max_target * 1000.0),
        t_pri_max: SPEED_OF_LIGHT_M_S / (4.0 * fc * v_max_target * 1000.0),
    })
}
