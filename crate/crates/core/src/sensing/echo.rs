//! Monostatic OFDM echoes.
//!
//! Subcarrier, pulse and antenna indices are centred (`n - (N_sc - 1) / 2`
//! and so on), which makes the noiseless matched-filter response real at
//! zero offset and symmetric around the peak in delay and Doppler.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::scene::SensingScene;
use super::SensingError;
use crate::consts::SPEED_OF_LIGHT_KM_S;
use crate::runner::seed::{derive_seed, rng_from_seed};
use crate::waveform::OfdmConfig;

/// Parameters that generated one echo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoTruth {
    /// km
    pub range: f64,
    /// Round-trip delay, s.
    pub delay: f64,
    /// Hz
    pub doppler: f64,
    /// rad off broadside
    pub bearing: f64,
    pub amplitude: Complex64,
}

/// Echo tensor of one satellite, indexed `(subcarrier, pulse, antenna)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoData {
    pub node: usize,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    pub n_antennas: usize,
    pub data: Vec<Complex64>,
    pub truth: EchoTruth,
}

impl EchoData {
    pub fn at(&self, n: usize, m: usize, k: usize) -> Complex64 {
        self.data[(n * self.n_symbols + m) * self.n_antennas + k]
    }

    /// Number of resource elements times antennas.
    pub fn energy(&self) -> f64 {
        self.data.len() as f64
    }
}

pub(crate) fn centred(i: usize, len: usize) -> f64 {
    i as f64 - (len as f64 - 1.0) / 2.0
}

/// `exp(-j 2 pi n~ delta_f 2R/c)` for every subcarrier.
pub(crate) fn range_phases(cfg: &OfdmConfig, range: f64) -> Vec<Complex64> {
    let cycles = cfg.delta_f * 2.0 * range / SPEED_OF_LIGHT_KM_S;
    (0..cfg.n_subcarriers)
        .map(|n| Complex64::from_polar(1.0, -2.0 * PI * centred(n, cfg.n_subcarriers) * cycles))
        .collect()
}

/// `exp(+j 2 pi m~ t_pri f)` for every pulse.
pub(crate) fn doppler_phases(cfg: &OfdmConfig, doppler: f64) -> Vec<Complex64> {
    (0..cfg.n_symbols)
        .map(|m| {
            Complex64::from_polar(
                1.0,
                2.0 * PI * centred(m, cfg.n_symbols) * cfg.t_pri * doppler,
            )
        })
        .collect()
}

/// `exp(+j 2 pi d k~ sin(phi))` for every element.
pub(crate) fn steering(n_antennas: usize, spacing: f64, bearing: f64) -> Vec<Complex64> {
    let s = bearing.sin();
    (0..n_antennas)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * spacing * centred(k, n_antennas) * s))
        .collect()
}

/// Carrier phase `exp(-j 4 pi fc d / c)` of a target at `range` km.
pub(crate) fn carrier_phase(fc: f64, range: f64) -> Complex64 {
    let cycles = (2.0 * range / SPEED_OF_LIGHT_KM_S * fc).fract();
    Complex64::from_polar(1.0, -2.0 * PI * cycles)
}

/// Draws one echo per satellite for the scene's target state. Noise is
/// circular complex Gaussian with variance `10^(-snr_db / 10)` per sample,
/// the echo amplitude is one.
pub fn simulate_echoes(
    scene: &SensingScene,
    trial_seed: u64,
) -> Result<Vec<EchoData>, SensingError> {
    scene.validate()?;
    let cfg = &scene.waveform;
    let sigma = (scene.noise_variance() / 2.0).sqrt();
    let mut rng = rng_from_seed(derive_seed(trial_seed, "sensing-noise", 0));
    let (p, v) = (&scene.target_position, &scene.target_velocity);

    let echoes = scene
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let range = node.range_to(p);
            let truth = EchoTruth {
                range,
                delay: 2.0 * range / SPEED_OF_LIGHT_KM_S,
                doppler: node.doppler_to(p, v, cfg.fc),
                bearing: node.bearing_to(p),
                amplitude: carrier_phase(cfg.fc, range),
            };
            let rp = range_phases(cfg, range);
            let dp = doppler_phases(cfg, truth.doppler);
            let st = steering(node.n_antennas(), node.array.element_spacing, truth.bearing);
            let mut data = Vec::with_capacity(rp.len() * dp.len() * st.len());
            for r in &rp {
                for d in &dp {
                    let rd = truth.amplitude * r * d;
                    for a in &st {
                        let mut y = rd * a;
                        if sigma > 0.0 {
                            let re: f64 = StandardNormal.sample(&mut rng);
                            let im: f64 = StandardNormal.sample(&mut rng);
                            y += Complex64::new(re, im) * sigma;
                        }
                        data.push(y);
                    }
                }
            }
            EchoData {
                node: i,
                n_subcarriers: cfg.n_subcarriers,
                n_symbols: cfg.n_symbols,
                n_antennas: node.n_antennas(),
                data,
                truth,
            }
        })
        .collect();
    Ok(echoes)
}
