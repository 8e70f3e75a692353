//! Planar sensing scene and the default four-satellite bench.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::SensingError;
use crate::channel::ArrayGeometry;
use crate::consts::SPEED_OF_LIGHT_KM_S;
use crate::waveform::{radar_metrics, OfdmConfig};

/// Plane coordinates, km or km/s.
pub type Vec2 = Vector2<f64>;

/// One sensing satellite.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingNode {
    pub position: Vec2,
    pub velocity: Vec2,
    /// Direction of the array broadside, radians from the x axis.
    pub boresight: f64,
    pub array: ArrayGeometry,
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

impl SensingNode {
    pub fn n_antennas(&self) -> usize {
        self.array.n_elements
    }

    /// Monostatic range (km) to `target`.
    pub fn range_to(&self, target: &Vec2) -> f64 {
        (target - self.position).norm()
    }

    /// Angle of `target` off broadside, radians in (-pi, pi].
    pub fn bearing_to(&self, target: &Vec2) -> f64 {
        let d = target - self.position;
        wrap_angle(d.y.atan2(d.x) - self.boresight)
    }

    /// Two-way Doppler (Hz) at carrier `fc`, positive when closing.
    pub fn doppler_to(&self, target: &Vec2, target_velocity: &Vec2, fc: f64) -> f64 {
        let d = target - self.position;
        let u = d / d.norm();
        2.0 * fc * u.dot(&(self.velocity - target_velocity)) / SPEED_OF_LIGHT_KM_S
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingScene {
    pub target_position: Vec2,
    pub target_velocity: Vec2,
    pub nodes: Vec<SensingNode>,
    pub waveform: OfdmConfig,
    /// Per-element, per-resource-element SNR; `+inf` disables noise.
    pub snr_db: f64,
}

impl SensingScene {
    pub fn validate(&self) -> Result<(), SensingError> {
        self.waveform.validate()?;
        if self.nodes.is_empty() {
            return Err(SensingError::InvalidScene(
                "need at least one satellite".into(),
            ));
        }
        let finite = |v: &Vec2| v.iter().all(|x| x.is_finite());
        if !finite(&self.target_position) || !finite(&self.target_velocity) {
            return Err(SensingError::InvalidScene(
                "target state must be finite".into(),
            ));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(SensingError::InvalidScene(
                "snr_db must be a number above -inf".into(),
            ));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.array.n_elements == 0 || !(n.array.element_spacing > 0.0) {
                return Err(SensingError::InvalidScene(format!(
                    "node {i}: array needs >= 1 element"
                )));
            }
            if !finite(&n.position) || !finite(&n.velocity) || !n.boresight.is_finite() {
                return Err(SensingError::InvalidScene(format!(
                    "node {i}: state must be finite"
                )));
            }
            if n.range_to(&self.target_position) <= 1e-9 {
                return Err(SensingError::InvalidScene(format!(
                    "node {i} coincides with the target"
                )));
            }
        }
        Ok(())
    }

    /// Noise variance for unit echo amplitude.
    pub fn noise_variance(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            10f64.powf(-self.snr_db / 10.0)
        }
    }

    /// Range resolution of the waveform, km.
    pub fn delta_r(&self) -> Result<f64, SensingError> {
        Ok(radar_metrics(&self.waveform)?.delta_r)
    }
}

/// Search region around the nominal target state and grid resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Half-width of the square position box, km.
    pub position_half_width: f64,
    /// Half-width of the square velocity box, km/s.
    pub velocity_half_width: f64,
    /// Velocity samples per axis on the DFE grid.
    pub velocity_points: usize,
    /// km
    pub range_step: f64,
    /// rad
    pub bearing_step: f64,
    /// Hz
    pub doppler_step: f64,
}

impl SearchConfig {
    /// Range step a quarter resolution cell, bearing step 0.5 degrees,
    /// Doppler step a quarter of `1 / (M t_pri)`; the DFE position grid uses
    /// the range step.
    pub fn for_waveform(
        waveform: &OfdmConfig,
        position_half_width: f64,
        velocity_half_width: f64,
        velocity_points: usize,
    ) -> Result<Self, SensingError> {
        let delta_r = radar_metrics(waveform)?.delta_r;
        Ok(Self {
            position_half_width,
            velocity_half_width,
            velocity_points,
            range_step: delta_r / 4.0,
            bearing_step: 0.5f64.to_radians(),
            doppler_step: 1.0 / (4.0 * waveform.n_symbols as f64 * waveform.t_pri),
        })
    }

    pub fn validate(&self) -> Result<(), SensingError> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !(pos(self.position_half_width)
            && pos(self.range_step)
            && pos(self.bearing_step)
            && pos(self.doppler_step))
        {
            return Err(SensingError::InvalidScene(
                "search box and steps must be positive".into(),
            ));
        }
        if !(self.velocity_half_width >= 0.0 && self.velocity_half_width.is_finite())
            || self.velocity_points == 0
        {
            return Err(SensingError::InvalidScene(
                "velocity box must be >= 0 with >= 1 point".into(),
            ));
        }
        Ok(())
    }
}

/// Four-satellite bench: satellites spread in angle around the nominal
/// target at the origin, every array facing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensingBench {
    /// Direction from the target to each satellite, degrees.
    pub angles_deg: Vec<f64>,
    /// km
    pub distances_km: Vec<f64>,
    /// Satellite speed along +x, km/s.
    pub satellite_speed: f64,
    /// Hz
    pub delta_f: f64,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    /// s
    pub t_pri: f64,
    /// Hz
    pub fc: f64,
    /// Wavelengths.
    pub element_spacing: f64,
    pub snr_db: f64,
    /// Truth is drawn uniformly in a box of this half-width, in range
    /// resolution cells.
    pub truth_half_width: f64,
    /// Search box half-width, in range resolution cells.
    pub search_half_width: f64,
    /// km/s
    pub velocity_half_width: f64,
    pub velocity_points: usize,
    pub n_antennas: Vec<usize>,
    pub trials: usize,
}

impl Default for SensingBench {
    fn default() -> Self {
        Self {
            angles_deg: vec![60.0, 80.0, 100.0, 120.0],
            distances_km: vec![50.0, 45.0, 55.0, 50.0],
            satellite_speed: 7.5,
            delta_f: 1.5e3,
            n_subcarriers: 16,
            n_symbols: 4,
            t_pri: 1.5e-6,
            fc: 6.662e9,
            element_spacing: 0.5,
            snr_db: -10.0,
            truth_half_width: 1.0,
            search_half_width: 3.0,
            velocity_half_width: 0.2,
            velocity_points: 3,
            n_antennas: vec![2, 3, 4, 6, 8, 16],
            trials: 500,
        }
    }
}

impl SensingBench {
    pub fn waveform(&self) -> OfdmConfig {
        OfdmConfig {
            delta_f: self.delta_f,
            n_subcarriers: self.n_subcarriers,
            n_symbols: self.n_symbols,
            t_pri: self.t_pri,
            fc: self.fc,
            ..OfdmConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SensingError> {
        if self.angles_deg.is_empty() || self.angles_deg.len() != self.distances_km.len() {
            return Err(SensingError::InvalidScene(
                "angles_deg and distances_km must have equal, nonzero length".into(),
            ));
        }
        if self
            .distances_km
            .iter()
            .any(|d| !(*d > 0.0 && d.is_finite()))
            || self.angles_deg.iter().any(|a| !a.is_finite())
        {
            return Err(SensingError::InvalidScene(
                "satellite distances must be positive and angles finite".into(),
            ));
        }
        if !(self.truth_half_width >= 0.0 && self.truth_half_width < self.search_half_width) {
            return Err(SensingError::InvalidScene(
                "need 0 <= truth_half_width < search_half_width".into(),
            ));
        }
        if !(self.velocity_half_width >= 0.0
            && self.velocity_half_width.is_finite()
            && self.satellite_speed.is_finite())
        {
            return Err(SensingError::InvalidScene(
                "velocities must be finite".into(),
            ));
        }
        if self.n_antennas.iter().any(|&n| n == 0) {
            return Err(SensingError::InvalidScene(
                "n_antennas entries must be >= 1".into(),
            ));
        }
        if self.trials == 0 {
            return Err(SensingError::NoTrials);
        }
        self.waveform().validate()?;
        Ok(())
    }

    /// Scene with `n_antennas` elements per satellite and the nominal target
    /// at rest at the origin.
    pub fn scene(&self, n_antennas: usize) -> Result<SensingScene, SensingError> {
        self.validate()?;
        let nodes = self
            .angles_deg
            .iter()
            .zip(&self.distances_km)
            .map(|(&a, &d)| {
                let theta = a.to_radians();
                SensingNode {
                    position: Vec2::new(d * theta.cos(), d * theta.sin()),
                    velocity: Vec2::new(self.satellite_speed, 0.0),
                    boresight: wrap_angle(theta + PI),
                    array: ArrayGeometry {
                        n_elements: n_antennas,
                        element_spacing: self.element_spacing,
                    },
                }
            })
            .collect();
        let scene = SensingScene {
            target_position: Vec2::zeros(),
            target_velocity: Vec2::zeros(),
            nodes,
            waveform: self.waveform(),
            snr_db: self.snr_db,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn search(&self) -> Result<SearchConfig, SensingError> {
        let delta_r = radar_metrics(&self.waveform())?.delta_r;
        SearchConfig::for_waveform(
            &self.waveform(),
            self.search_half_width * delta_r,
            self.velocity_half_width,
            self.velocity_points,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_nodes_face_the_target() {
        let scene = SensingBench::default().scene(4).unwrap();
        assert_eq!(scene.nodes.len(), 4);
        for n in &scene.nodes {
            assert!(n.bearing_to(&scene.target_position).abs() < 1e-12);
            assert_eq!(n.n_antennas(), 4);
        }
    }

    #[test]
    fn doppler_sign_convention() {
        let node = SensingNode {
            position: Vec2::new(0.0, 10.0),
            velocity: Vec2::new(0.0, -1.0),
            boresight: -PI / 2.0,
            array: ArrayGeometry::default(),
        };
        let target = Vec2::zeros();
        let f = node.doppler_to(&target, &Vec2::zeros(), 1e9);
        assert!((f - 2.0 * 1e9 / SPEED_OF_LIGHT_KM_S).abs() < 1e-6);
        // Target receding at the same speed cancels the closing motion.
        assert_eq!(node.doppler_to(&target, &Vec2::new(0.0, -1.0), 1e9), 0.0);
    }

    #[test]
    fn bearing_is_signed_off_broadside() {
        let node = SensingNode {
            position: Vec2::zeros(),
            velocity: Vec2::zeros(),
            boresight: 0.0,
            array: ArrayGeometry::default(),
        };
        assert!((node.bearing_to(&Vec2::new(1.0, 1.0)) - PI / 4.0).abs() < 1e-15);
        assert!((node.bearing_to(&Vec2::new(1.0, -1.0)) + PI / 4.0).abs() < 1e-15);
        assert_eq!(wrap_angle(-PI), PI);
    }

    #[test]
    fn invalid_benches() {
        let b = SensingBench {
            distances_km: vec![1.0],
            ..SensingBench::default()
        };
        assert!(b.scene(2).is_err());
        let b = SensingBench {
            truth_half_width: 5.0,
            ..SensingBench::default()
        };
        assert!(b.scene(2).is_err());
        assert!(SensingBench::default().scene(0).is_err());
        let mut scene = SensingBench::default().scene(2).unwrap();
        scene.target_position = scene.nodes[0].position;
        assert!(scene.validate().is_err());
    }
}
