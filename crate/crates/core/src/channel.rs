//! Statistical channel model and hardening-bound ergodic rates.
//!
//! Each satellite-user pair is Rician with isotropic scattering: the mean is
//! a scaled unit-modulus ULA steering vector, the scattered part has
//! covariance `cov_scale * I`. Rates use the hardening bound, where only the
//! mean of the effective gain is treated as useful signal.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::{SPEED_OF_LIGHT_KM_S, SPEED_OF_LIGHT_M_S};
use crate::geometry::{GroundTerminal, SatelliteState};

/// Boltzmann constant, J/K.
const BOLTZMANN: f64 = 1.380_649e-23;
const REFERENCE_TEMPERATURE_K: f64 = 290.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid channel parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("user index {user} out of range ({users} users)")]
    UserOutOfRange { user: usize, users: usize },
}

/// Uniform linear array carried by every satellite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub n_elements: usize,
    /// Element spacing in wavelengths.
    pub element_spacing: f64,
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        Self {
            n_elements: 16,
            element_spacing: 0.5,
        }
    }
}

impl ArrayGeometry {
    /// Unit-modulus steering vector for direction cosine `cos_angle` between
    /// the look direction and the array axis. Phases are referenced to the
    /// array centre.
    pub fn steering(&self, cos_angle: f64) -> Vec<Complex64> {
        let centre = (self.n_elements as f64 - 1.0) / 2.0;
        (0..self.n_elements)
            .map(|k| {
                Complex64::from_polar(
                    1.0,
                    2.0 * PI * self.element_spacing * (k as f64 - centre) * cos_angle,
                )
            })
            .collect()
    }
}

/// First- and second-order statistics of one satellite-to-user channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub mean: Vec<Complex64>,
    /// Per-element variance of the scattered component, `gain / (1 + k)`.
    pub cov_scale: f64,
    /// Large-scale power gain.
    pub gain: f64,
    /// Rician factor (linear), may be infinite.
    pub rician_k: f64,
}

impl ChannelStats {
    /// Builds stats from a large-scale gain, Rician factor and steering
    /// vector (unit modulus entries).
    pub fn from_steering(gain: f64, rician_k: f64, steering: &[Complex64]) -> Self {
        let (los_share, cov_scale) = if rician_k.is_infinite() {
            (1.0, 0.0)
        } else {
            (rician_k / (1.0 + rician_k), gain / (1.0 + rician_k))
        };
        let amp = (gain * los_share).sqrt();
        Self {
            mean: steering.iter().map(|a| a * amp).collect(),
            cov_scale,
            gain,
            rician_k,
        }
    }

    pub fn mean_power(&self) -> f64 {
        self.mean.iter().map(|m| m.norm_sqr()).sum()
    }

    /// Average channel power `E ||h||^2`.
    pub fn total_power(&self) -> f64 {
        self.mean_power() + self.cov_scale * self.mean.len() as f64
    }
}

/// Receiver noise and bandwidth used to convert SINR into bit/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// W
    pub noise_power: f64,
    /// Hz
    pub bandwidth: f64,
}

impl NoiseModel {
    /// Thermal noise `k T0 B F` for noise figure `noise_figure_db`.
    pub fn thermal(bandwidth: f64, noise_figure_db: f64) -> Self {
        Self {
            noise_power: BOLTZMANN
                * REFERENCE_TEMPERATURE_K
                * bandwidth
                * db_to_linear(noise_figure_db),
            bandwidth,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Link-level parameters for [`channel_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Hz
    pub fc: f64,
    /// Linear Rician factor.
    pub rician_k: f64,
    /// Per-element transmit gain, dBi.
    pub tx_gain_db: f64,
    /// Terminal antenna gain, dBi.
    pub rx_gain_db: f64,
}

/// Free-space power gain `(c / (4 pi d fc))^2` times antenna gains; `range`
/// in km.
pub fn path_gain(
    range: f64,
    fc: f64,
    tx_gain_db: f64,
    rx_gain_db: f64,
) -> Result<f64, ChannelError> {
    if !(range > 0.0 && range.is_finite()) {
        return Err(ChannelError::InvalidParameter("range must be positive"));
    }
    if !(fc > 0.0) {
        return Err(ChannelError::InvalidParameter("carrier must be positive"));
    }
    let fs = SPEED_OF_LIGHT_M_S / (4.0 * PI * range * 1000.0 * fc);
    Ok(fs * fs * db_to_linear(tx_gain_db + rx_gain_db))
}

/// Statistical CSI of the link `sat -> ue`.
///
/// The array axis lies along the satellite's velocity (or an arbitrary
/// tangent axis for a static satellite). The mean carries the carrier phase
/// of the propagation path, so stacked means of distinct satellites add
/// with their true relative phases.
pub fn channel_stats(
    sat: &SatelliteState,
    ue: &GroundTerminal,
    geom: &ArrayGeometry,
    link: &LinkParams,
) -> Result<ChannelStats, ChannelError> {
    if geom.n_elements == 0 || !(geom.element_spacing > 0.0) {
        return Err(ChannelError::InvalidParameter(
            "array needs >= 1 element and positive spacing",
        ));
    }
    if !(link.rician_k >= 0.0) {
        return Err(ChannelError::InvalidParameter(
            "rician factor must be non-negative",
        ));
    }
    let los = ue.position - sat.position;
    let range = los.norm();
    let gain = path_gain(range, link.fc, link.tx_gain_db, link.rx_gain_db)?;
    let axis = if sat.velocity.norm() > 0.0 {
        sat.velocity.normalized()
    } else {
        let radial = sat.position.normalized();
        let helper = crate::geometry::EcefVector::new(0.0, 0.0, 1.0);
        let t = helper - radial * helper.dot(radial);
        if t.norm() > 1e-12 {
            t.normalized()
        } else {
            crate::geometry::EcefVector::new(1.0, 0.0, 0.0)
        }
    };
    let cos_angle = los.dot(axis) / range;
    let carrier_phase = Complex64::from_polar(
        1.0,
        -2.0 * PI * (range / SPEED_OF_LIGHT_KM_S * link.fc).fract(),
    );
    let steering: Vec<Complex64> = geom
        .steering(cos_angle)
        .into_iter()
        .map(|a| a * carrier_phase)
        .collect();
    Ok(ChannelStats::from_steering(gain, link.rician_k, &steering))
}

/// Statistics for every (satellite, user) pair, satellite-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsTable {
    n_sats: usize,
    n_users: usize,
    n_elements: usize,
    entries: Vec<ChannelStats>,
}

impl StatsTable {
    /// `entries[s * n_users + u]` holds the stats of satellite `s` to user `u`.
    pub fn new(
        n_sats: usize,
        n_users: usize,
        entries: Vec<ChannelStats>,
    ) -> Result<Self, ChannelError> {
        if n_sats == 0 || n_users == 0 {
            return Err(ChannelError::DimensionMismatch(
                "need at least one satellite and one user".into(),
            ));
        }
        if entries.len() != n_sats * n_users {
            return Err(ChannelError::DimensionMismatch(format!(
                "{} entries for {} satellites x {} users",
                entries.len(),
                n_sats,
                n_users
            )));
        }
        let n_elements = entries[0].mean.len();
        if n_elements == 0 || entries.iter().any(|e| e.mean.len() != n_elements) {
            return Err(ChannelError::DimensionMismatch(
                "inconsistent array sizes".into(),
            ));
        }
        let finite = entries.iter().all(|e| {
            e.cov_scale.is_finite()
                && e.cov_scale >= 0.0
                && e.mean.iter().all(|m| m.re.is_finite() && m.im.is_finite())
        });
        if !finite {
            return Err(ChannelError::InvalidParameter(
                "channel statistics must be finite",
            ));
        }
        Ok(Self {
            n_sats,
            n_users,
            n_elements,
            entries,
        })
    }

    /// Builds the table from satellite and user geometry.
    pub fn from_geometry(
        sats: &[SatelliteState],
        users: &[GroundTerminal],
        geom: &ArrayGeometry,
        link: &LinkParams,
    ) -> Result<Self, ChannelError> {
        let mut entries = Vec::with_capacity(sats.len() * users.len());
        for sat in sats {
            for ue in users {
                entries.push(channel_stats(sat, ue, geom, link)?);
            }
        }
        Self::new(sats.len(), users.len(), entries)
    }

    pub fn n_sats(&self) -> usize {
        self.n_sats
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn get(&self, sat: usize, user: usize) -> &ChannelStats {
        &self.entries[sat * self.n_users + user]
    }

    /// Sub-table restricted to the given satellites and users (in the given
    /// order).
    pub fn select(&self, sats: &[usize], users: &[usize]) -> Result<Self, ChannelError> {
        let entries = sats
            .iter()
            .flat_map(|&s| users.iter().map(move |&u| (s, u)))
            .map(|(s, u)| self.get(s, u).clone())
            .collect();
        Self::new(sats.len(), users.len(), entries)
    }

    /// Copy with every mean rotated by the common phase `exp(j theta)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let rot = Complex64::from_polar(1.0, theta);
        let entries = self
            .entries
            .iter()
            .map(|e| ChannelStats {
                mean: e.mean.iter().map(|m| m * rot).collect(),
                ..e.clone()
            })
            .collect();
        Self {
            entries,
            ..self.clone()
        }
    }
}

/// Per-satellite precoders. Block `s` is an `n_elements x n_users` matrix
/// stored column-major, so column `u` (the precoder `w_{s,u}`) is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    n_elements: usize,
    n_users: usize,
    blocks: Vec<Vec<Complex64>>,
}

impl BeamformerSet {
    pub fn zeros(n_sats: usize, n_elements: usize, n_users: usize) -> Self {
        Self {
            n_elements,
            n_users,
            blocks: vec![vec![Complex64::new(0.0, 0.0); n_elements * n_users]; n_sats],
        }
    }

    pub fn n_sats(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn column(&self, sat: usize, user: usize) -> &[Complex64] {
        let n = self.n_elements;
        &self.blocks[sat][user * n..(user + 1) * n]
    }

    pub fn column_mut(&mut self, sat: usize, user: usize) -> &mut [Complex64] {
        let n = self.n_elements;
        &mut self.blocks[sat][user * n..(user + 1) * n]
    }

    pub fn block(&self, sat: usize) -> &[Complex64] {
        &self.blocks[sat]
    }

    pub fn set_block(&mut self, sat: usize, block: Vec<Complex64>) {
        assert_eq!(block.len(), self.n_elements * self.n_users);
        self.blocks[sat] = block;
    }

    /// Transmit power `sum_u ||w_{s,u}||^2` of satellite `sat`.
    pub fn power(&self, sat: usize) -> f64 {
        self.blocks[sat].iter().map(|w| w.norm_sqr()).sum()
    }

    /// Copy with user `user`'s precoders (on all satellites) rotated by
    /// `exp(j theta)`.
    pub fn rotate_user(&self, user: usize, theta: f64) -> Self {
        let rot = Complex64::from_polar(1.0, theta);
        let mut out = self.clone();
        for s in 0..self.n_sats() {
            out.column_mut(s, user).iter_mut().for_each(|w| *w *= rot);
        }
        out
    }

    fn check_against(&self, stats: &StatsTable) -> Result<(), ChannelError> {
        if self.n_sats() != stats.n_sats()
            || self.n_users != stats.n_users()
            || self.n_elements != stats.n_elements()
        {
            return Err(ChannelError::DimensionMismatch(format!(
                "beamformers are {}x{}x{}, statistics are {}x{}x{}",
                self.n_sats(),
                self.n_elements,
                self.n_users,
                stats.n_sats(),
                stats.n_elements(),
                stats.n_users()
            )));
        }
        Ok(())
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // a^H b
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Per-satellite contribution to the cross-coupling aggregates that
/// determine every hardening-bound rate.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingAggregate {
    pub n_users: usize,
    /// `cross[u * U + v] = sum_s m_{s,u}^H w_{s,v}`.
    pub cross: Vec<Complex64>,
    /// `scatter[u] = sum_s cov_scale_{s,u} * P_s`.
    pub scatter: Vec<f64>,
}

impl CouplingAggregate {
    pub fn zeros(n_users: usize) -> Self {
        Self {
            n_users,
            cross: vec![Complex64::new(0.0, 0.0); n_users * n_users],
            scatter: vec![0.0; n_users],
        }
    }

    /// Contribution of satellite `sat` alone.
    pub fn local(stats: &StatsTable, sat: usize, block: &[Complex64]) -> Self {
        let (n, users) = (stats.n_elements(), stats.n_users());
        let power: f64 = block.iter().map(|w| w.norm_sqr()).sum();
        let mut agg = Self::zeros(users);
        for u in 0..users {
            let st = stats.get(sat, u);
            for v in 0..users {
                agg.cross[u * users + v] = inner(&st.mean, &block[v * n..(v + 1) * n]);
            }
            agg.scatter[u] = st.cov_scale * power;
        }
        agg
    }

    /// Aggregate over all satellites, reduced in satellite-index order.
    pub fn total(stats: &StatsTable, w: &BeamformerSet) -> Self {
        let mut agg = Self::zeros(stats.n_users());
        for s in 0..stats.n_sats() {
            agg.add(&Self::local(stats, s, w.block(s)));
        }
        agg
    }

    pub fn add(&mut self, other: &Self) {
        self.cross
            .iter_mut()
            .zip(&other.cross)
            .for_each(|(a, b)| *a += b);
        self.scatter
            .iter_mut()
            .zip(&other.scatter)
            .for_each(|(a, b)| *a += b);
    }

    pub fn sub(&mut self, other: &Self) {
        self.cross
            .iter_mut()
            .zip(&other.cross)
            .for_each(|(a, b)| *a -= b);
        self.scatter
            .iter_mut()
            .zip(&other.scatter)
            .for_each(|(a, b)| *a -= b);
    }

    pub fn cross(&self, u: usize, v: usize) -> Complex64 {
        self.cross[u * self.n_users + v]
    }

    /// Useful power, and interference-plus-noise power, of user `u`.
    pub fn signal_and_interference(&self, u: usize, noise_power: f64) -> (f64, f64) {
        let signal = self.cross(u, u).norm_sqr();
        let leakage: f64 = (0..self.n_users)
            .filter(|&v| v != u)
            .map(|v| self.cross(u, v).norm_sqr())
            .sum();
        (signal, leakage + self.scatter[u].max(0.0) + noise_power)
    }

    pub fn sinr(&self, u: usize, noise_power: f64) -> f64 {
        let (s, i) = self.signal_and_interference(u, noise_power);
        s / i
    }

    /// Hardening-bound rates of all users, bit/s.
    pub fn rates(&self, noise: &NoiseModel) -> Vec<f64> {
        (0..self.n_users)
            .map(|u| noise.bandwidth * (1.0 + self.sinr(u, noise.noise_power)).log2())
            .collect()
    }
}

/// Hardening-bound ergodic rate of `user`, bit/s.
pub fn hardening_rate(
    user: usize,
    beamformers: &BeamformerSet,
    stats: &StatsTable,
    noise: &NoiseModel,
) -> Result<f64, ChannelError> {
    beamformers.check_against(stats)?;
    if user >= stats.n_users() {
        return Err(ChannelError::UserOutOfRange {
            user,
            users: stats.n_users(),
        });
    }
    let agg = CouplingAggregate::total(stats, beamformers);
    Ok(noise.bandwidth * (1.0 + agg.sinr(user, noise.noise_power)).log2())
}

/// Hardening-bound rates of every user, bit/s.
pub fn hardening_rates(
    beamformers: &BeamformerSet,
    stats: &StatsTable,
    noise: &NoiseModel,
) -> Result<Vec<f64>, ChannelError> {
    beamformers.check_against(stats)?;
    Ok(CouplingAggregate::total(stats, beamformers).rates(noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EcefVector;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn los_stats(gain: f64, n: usize, k: f64, cos_angle: f64) -> ChannelStats {
        let geom = ArrayGeometry {
            n_elements: n,
            element_spacing: 0.5,
        };
        ChannelStats::from_steering(gain, k, &geom.steering(cos_angle))
    }

    #[test]
    fn free_space_examples() {
        let g = path_gain(600.0, 2e9, 0.0, 0.0).unwrap();
        let db = 10.0 * g.log10();
        let oracle = -20.0 * (4.0 * PI * 6e5 * 2e9 / SPEED_OF_LIGHT_M_S).log10();
        assert!((db + 154.0).abs() < 0.1, "{db}");
        assert_relative_eq!(db, oracle, epsilon = 1e-9);
        let g2 = path_gain(1200.0, 2e9, 0.0, 0.0).unwrap();
        assert!((10.0 * (g2 / g).log10() + 6.0206).abs() < 1e-3);
        let g3 = path_gain(600.0, 4e9, 0.0, 0.0).unwrap();
        assert!((10.0 * (g3 / g).log10() + 6.0206).abs() < 1e-3);
        assert!(path_gain(0.0, 2e9, 0.0, 0.0).is_err());
    }

    #[test]
    fn rician_limits() {
        let pure = los_stats(2.0, 8, f64::INFINITY, 0.3);
        assert_eq!(pure.cov_scale, 0.0);
        assert_relative_eq!(pure.mean_power(), 16.0, max_relative = 1e-12);
        let diffuse = los_stats(2.0, 8, 0.0, 0.3);
        assert!(diffuse.mean.iter().all(|m| m.norm() == 0.0));
        assert_eq!(diffuse.cov_scale, 2.0);
        let k10 = los_stats(3.0, 16, 10.0, -0.4);
        assert_relative_eq!(
            k10.mean_power(),
            3.0 * 16.0 * 10.0 / 11.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(k10.cov_scale, 3.0 / 11.0, max_relative = 1e-15);
    }

    #[test]
    fn geometry_stats_are_unit_modulus_scaled() {
        let ue = GroundTerminal {
            position: EcefVector::new(0.0, 0.0, 6371.0),
        };
        let sat = SatelliteState {
            id: 0,
            position: EcefVector::new(100.0, 0.0, 6970.0),
            velocity: EcefVector::new(7.5, 0.0, 0.0),
        };
        let link = LinkParams {
            fc: 2e9,
            rician_k: 10.0,
            tx_gain_db: 0.0,
            rx_gain_db: 0.0,
        };
        let st = channel_stats(&sat, &ue, &ArrayGeometry::default(), &link).unwrap();
        let amp = (st.gain * 10.0 / 11.0).sqrt();
        for m in &st.mean {
            assert_relative_eq!(m.norm(), amp, max_relative = 1e-12);
        }
        assert!(st.mean_power() <= st.gain * 16.0);
    }

    fn single_link(n: usize, gain: f64) -> StatsTable {
        StatsTable::new(1, 1, vec![los_stats(gain, n, f64::INFINITY, 0.1)]).unwrap()
    }

    #[test]
    fn zero_beamformers_give_zero_rate() {
        let stats = single_link(4, 1.0);
        let w = BeamformerSet::zeros(1, 4, 1);
        let noise = NoiseModel {
            noise_power: 1.0,
            bandwidth: 1e6,
        };
        assert_eq!(hardening_rate(0, &w, &stats, &noise).unwrap(), 0.0);
    }

    #[test]
    fn matched_filter_closed_form() {
        let (n, gain, p, sigma2, b) = (16, 2.5e-3, 4.0, 1e-2, 2e7);
        let stats = single_link(n, gain);
        let m = &stats.get(0, 0).mean;
        let scale = (p / stats.get(0, 0).mean_power()).sqrt();
        let mut w = BeamformerSet::zeros(1, n, 1);
        w.column_mut(0, 0)
            .iter_mut()
            .zip(m)
            .for_each(|(wi, mi)| *wi = mi * scale);
        let noise = NoiseModel {
            noise_power: sigma2,
            bandwidth: b,
        };
        let rate = hardening_rate(0, &w, &stats, &noise).unwrap();
        let expected = b * (1.0 + p * gain * n as f64 / sigma2).log2();
        assert_relative_eq!(rate, expected, max_relative = 1e-12);
    }

    #[test]
    fn symmetric_users_get_equal_rates() {
        let a = los_stats(1.0, 4, 5.0, 0.2);
        let b = los_stats(1.0, 4, 5.0, -0.2);
        let stats = StatsTable::new(1, 2, vec![a.clone(), b.clone()]).unwrap();
        let mut w = BeamformerSet::zeros(1, 4, 2);
        // Mirror-symmetric precoders: each matched to its own user.
        w.column_mut(0, 0).copy_from_slice(&a.mean);
        w.column_mut(0, 1).copy_from_slice(&b.mean);
        let noise = NoiseModel {
            noise_power: 0.5,
            bandwidth: 1.0,
        };
        let r = hardening_rates(&w, &stats, &noise).unwrap();
        assert_relative_eq!(r[0], r[1], max_relative = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let stats = single_link(4, 1.0);
        let w = BeamformerSet::zeros(1, 3, 1);
        let noise = NoiseModel {
            noise_power: 1.0,
            bandwidth: 1.0,
        };
        assert!(matches!(
            hardening_rate(0, &w, &stats, &noise),
            Err(ChannelError::DimensionMismatch(_))
        ));
        let w = BeamformerSet::zeros(1, 4, 1);
        assert!(matches!(
            hardening_rate(2, &w, &stats, &noise),
            Err(ChannelError::UserOutOfRange { .. })
        ));
    }

    #[test]
    fn thermal_noise_reference() {
        // -174 dBm/Hz at 290 K.
        let n = NoiseModel::thermal(1.0, 0.0);
        assert!((10.0 * (n.noise_power * 1e3).log10() + 173.98).abs() < 0.01);
    }

    fn arb_instance() -> impl Strategy<Value = (StatsTable, BeamformerSet)> {
        (1usize..3, 1usize..4, 1usize..5).prop_flat_map(|(s, u, n)| {
            let stats = proptest::collection::vec((0.1f64..2.0, 0.0f64..20.0, -1.0f64..1.0), s * u);
            let w = proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), s * u * n);
            (stats, w).prop_map(move |(st, wv)| {
                let entries = st
                    .into_iter()
                    .map(|(g, k, c)| los_stats(g, n, k, c))
                    .collect();
                let table = StatsTable::new(s, u, entries).unwrap();
                let mut bf = BeamformerSet::zeros(s, n, u);
                for sat in 0..s {
                    let block = wv[sat * u * n..(sat + 1) * u * n]
                        .iter()
                        .map(|&(re, im)| Complex64::new(re, im))
                        .collect();
                    bf.set_block(sat, block);
                }
                (table, bf)
            })
        })
    }

    proptest! {
        #[test]
        fn rate_invariant_to_user_phase((stats, w) in arb_instance(), theta in -PI..PI) {
            let noise = NoiseModel { noise_power: 0.3, bandwidth: 1.0 };
            let base = hardening_rates(&w, &stats, &noise).unwrap();
            for u in 0..stats.n_users() {
                let rotated = hardening_rates(&w.rotate_user(u, theta), &stats, &noise).unwrap();
                for (a, b) in base.iter().zip(&rotated) {
                    prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12));
                }
            }
        }

        #[test]
        fn rate_strictly_decreasing_in_noise((stats, w) in arb_instance(), s1 in 0.01f64..1.0, bump in 0.01f64..1.0) {
            let lo = NoiseModel { noise_power: s1, bandwidth: 1.0 };
            let hi = NoiseModel { noise_power: s1 + bump, bandwidth: 1.0 };
            let a = hardening_rates(&w, &stats, &lo).unwrap();
            let b = hardening_rates(&w, &stats, &hi).unwrap();
            let agg = CouplingAggregate::total(&stats, &w);
            for u in 0..stats.n_users() {
                if agg.cross(u, u).norm_sqr() > 1e-12 {
                    prop_assert!(b[u] < a[u]);
                } else {
                    prop_assert!(b[u] <= a[u]);
                }
            }
        }
    }
}
