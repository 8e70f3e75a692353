//! Seeded random beamforming instances: a user cluster under a handful of
//! overhead satellites.

use std::f64::consts::PI;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::BeamformingError;
use crate::channel::{db_to_linear, ArrayGeometry, LinkParams, NoiseModel, StatsTable};
use crate::consts::EARTH_RADIUS_KM;
use crate::geometry::{
    sample_constellation, tangent_basis, ConstellationSpec, GroundTerminal, SatelliteState,
};
use crate::runner::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamformingScenario {
    pub n_sats: usize,
    pub n_users: usize,
    /// km
    pub altitude: f64,
    /// km/s
    pub speed: f64,
    /// Satellites lie within this zenith angle of the cluster centre, degrees.
    pub zenith_max: f64,
    /// Users lie within this distance of the cluster centre, km.
    pub cluster_radius: f64,
    pub center_lat: f64,
    pub center_lon: f64,
    pub n_elements: usize,
    /// Element spacing in wavelengths.
    pub element_spacing: f64,
    /// Hz
    pub fc: f64,
    /// Per-satellite power budget, W.
    pub tx_power: f64,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub rician_k_db: f64,
    pub noise_figure_db: f64,
    /// Hz
    pub bandwidth: f64,
}

impl Default for BeamformingScenario {
    fn default() -> Self {
        Self {
            n_sats: 4,
            n_users: 4,
            altitude: 600.0,
            speed: 7.5,
            zenith_max: 30.0,
            cluster_radius: 20.0,
            center_lat: 45.0,
            center_lon: 10.0,
            n_elements: 16,
            element_spacing: 0.5,
            fc: 2e9,
            tx_power: 10.0,
            tx_gain_db: 6.0,
            rx_gain_db: 0.0,
            rician_k_db: 10.0,
            noise_figure_db: 7.0,
            bandwidth: 10e6,
        }
    }
}

/// One drawn instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub satellites: Vec<SatelliteState>,
    pub users: Vec<GroundTerminal>,
    pub stats: StatsTable,
    pub noise: NoiseModel,
    pub powers: Vec<f64>,
}

impl BeamformingScenario {
    pub fn validate(&self) -> Result<(), BeamformingError> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let ok = self.n_sats >= 1
            && self.n_users >= 1
            && self.n_elements >= 1
            && positive(self.altitude)
            && self.speed >= 0.0
            && positive(self.zenith_max)
            && self.zenith_max <= 90.0
            && self.cluster_radius >= 0.0
            && self.cluster_radius < EARTH_RADIUS_KM
            && positive(self.element_spacing)
            && positive(self.fc)
            && positive(self.tx_power)
            && positive(self.bandwidth)
            && [
                self.center_lat,
                self.center_lon,
                self.tx_gain_db,
                self.rx_gain_db,
                self.rician_k_db,
                self.noise_figure_db,
            ]
            .iter()
            .all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(BeamformingError::InvalidInput(format!(
                "invalid scenario {self:?}"
            )))
        }
    }

    /// Draws satellites and users from streams derived from `seed`.
    pub fn instance(&self, seed: u64) -> Result<Instance, BeamformingError> {
        self.validate()?;
        let centre =
            GroundTerminal::from_lat_lon(self.center_lat, self.center_lon, EARTH_RADIUS_KM);
        let spec = ConstellationSpec {
            count: self.n_sats,
            altitude: self.altitude,
            speed: self.speed,
            zenith_min: 0.0,
            zenith_max: self.zenith_max,
            earth_radius: EARTH_RADIUS_KM,
            seed: derive_seed(seed, "beamforming-sats", 0),
        };
        let satellites = sample_constellation(&spec, &centre)
            .map_err(|e| BeamformingError::InvalidInput(e.to_string()))?;

        let up = centre.position.normalized();
        let (east, north) = tangent_basis(up);
        let mut rng = rng_from_seed(derive_seed(seed, "beamforming-users", 0));
        let users: Vec<GroundTerminal> = (0..self.n_users)
            .map(|_| {
                let r = self.cluster_radius * rng.random::<f64>().sqrt();
                let az = 2.0 * PI * rng.random::<f64>();
                // Great-circle offset of arc length r.
                let angle = r / EARTH_RADIUS_KM;
                let dir = up * angle.cos() + (east * az.cos() + north * az.sin()) * angle.sin();
                GroundTerminal {
                    position: dir.normalized() * EARTH_RADIUS_KM,
                }
            })
            .collect();

        let geom = ArrayGeometry {
            n_elements: self.n_elements,
            element_spacing: self.element_spacing,
        };
        let link = LinkParams {
            fc: self.fc,
            rician_k: db_to_linear(self.rician_k_db),
            tx_gain_db: self.tx_gain_db,
            rx_gain_db: self.rx_gain_db,
        };
        let stats = StatsTable::from_geometry(&satellites, &users, &geom, &link)?;
        Ok(Instance {
            satellites,
            users,
            stats,
            noise: NoiseModel::thermal(self.bandwidth, self.noise_figure_db),
            powers: vec![self.tx_power; self.n_sats],
        })
    }
}
