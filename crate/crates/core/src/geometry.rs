//! Overhead constellation geometry: sampling, slant range, link delay and
//! Doppler, and OFDM feasibility masks for multi-satellite positioning.
//!
//! Earth is a perfect sphere of radius [`EARTH_RADIUS_KM`]; satellite motion
//! is frozen per snapshot.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::RngExt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::{EARTH_RADIUS_KM, SPEED_OF_LIGHT_KM_S};
use crate::runner::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid zenith cap [{min}, {max}] deg: need 0 <= min < max <= 90")]
    InvalidCap { min: f64, max: f64 },
    #[error("constellation count must be at least 1")]
    ZeroCount,
    #[error("altitude must be positive, got {0} km")]
    InvalidAltitude(f64),
    #[error("speed must be finite and non-negative, got {0} km/s")]
    InvalidSpeed(f64),
    #[error("zenith angle {0} deg outside [0, 90]")]
    InvalidZenith(f64),
    #[error("ground terminal is not on the Earth sphere (|p| = {0} km)")]
    OffSurface(f64),
    #[error("satellite and terminal positions coincide")]
    CoincidentPositions,
    #[error("satellite is not above the Earth surface (|p| = {0} km)")]
    BelowSurface(f64),
    #[error("empty satellite list")]
    EmptyList,
    #[error("invalid feasibility thresholds: {0}")]
    InvalidThreshold(&'static str),
}

/// Cartesian vector in an Earth-centered frame, kilometers (or km/s when
/// used as a velocity).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EcefVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for EcefVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for EcefVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for EcefVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for EcefVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Snapshot of one satellite: position in km, velocity in km/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteState {
    pub id: u32,
    pub position: EcefVector,
    pub velocity: EcefVector,
}

/// Static user terminal on the Earth sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTerminal {
    pub position: EcefVector,
}

impl GroundTerminal {
    /// Terminal at geocentric latitude/longitude (degrees) on a sphere of
    /// radius `earth_radius` km.
    pub fn from_lat_lon(lat_deg: f64, lon_deg: f64, earth_radius: f64) -> Self {
        let (lat, lon) = (lat_deg.to_radians(), lon_deg.to_radians());
        Self {
            position: EcefVector::new(
                earth_radius * lat.cos() * lon.cos(),
                earth_radius * lat.cos() * lon.sin(),
                earth_radius * lat.sin(),
            ),
        }
    }

    fn check_on_sphere(&self, earth_radius: f64) -> Result<(), GeometryError> {
        let r = self.position.norm();
        if !self.position.is_finite() || ((r - earth_radius) / earth_radius).abs() > 1e-9 {
            return Err(GeometryError::OffSurface(r));
        }
        Ok(())
    }
}

/// Parameters of a randomly sampled overhead constellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSpec {
    pub count: usize,
    /// km
    pub altitude: f64,
    /// km/s
    pub speed: f64,
    /// degrees
    pub zenith_min: f64,
    /// degrees
    pub zenith_max: f64,
    /// km
    #[serde(default = "default_earth_radius")]
    pub earth_radius: f64,
    pub seed: u64,
}

fn default_earth_radius() -> f64 {
    EARTH_RADIUS_KM
}

impl ConstellationSpec {
    /// 200 satellites at 600 km, 7.5 km/s, zenith 0-5 degrees.
    pub fn overhead_cluster(seed: u64) -> Self {
        Self {
            count: 200,
            altitude: 600.0,
            speed: 7.5,
            zenith_min: 0.0,
            zenith_max: 5.0,
            earth_radius: EARTH_RADIUS_KM,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.count == 0 {
            return Err(GeometryError::ZeroCount);
        }
        if !(self.altitude > 0.0 && self.altitude.is_finite()) {
            return Err(GeometryError::InvalidAltitude(self.altitude));
        }
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(GeometryError::InvalidSpeed(self.speed));
        }
        let (lo, hi) = (self.zenith_min, self.zenith_max);
        if !(lo >= 0.0 && lo < hi && hi <= 90.0) {
            return Err(GeometryError::InvalidCap { min: lo, max: hi });
        }
        Ok(())
    }
}

/// Observables of one satellite-to-terminal link.
///
/// Doppler sign convention: an approaching satellite yields a positive shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkObservables {
    /// km
    pub range: f64,
    /// seconds
    pub delay: f64,
    /// Hz
    pub doppler: f64,
    /// degrees, measured from the local vertical at the terminal
    pub zenith_angle: f64,
}

/// One entry of a delay/Doppler profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub sat_id: u32,
    /// seconds, relative to the earliest arrival
    pub differential_delay: f64,
    /// Hz
    pub doppler: f64,
}

/// Result of testing one profile entry against OFDM numerology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    pub delay_ok: bool,
    pub doppler_ok: bool,
}

/// An orthonormal pair spanning the plane perpendicular to unit vector `n`.
pub(crate) fn tangent_basis(n: EcefVector) -> (EcefVector, EcefVector) {
    // Pick the world axis least aligned with n.
    let helper = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        EcefVector::new(1.0, 0.0, 0.0)
    } else if n.y.abs() <= n.z.abs() {
        EcefVector::new(0.0, 1.0, 0.0)
    } else {
        EcefVector::new(0.0, 0.0, 1.0)
    };
    let e1 = (helper - n * helper.dot(n)).normalized();
    let e2 = n.cross(e1);
    (e1, e2)
}

/// Slant range (km) from a terminal on a sphere of radius `earth_radius` to
/// a shell at `altitude`, seen at `zenith_deg`.
pub fn slant_range(
    zenith_deg: f64,
    altitude: f64,
    earth_radius: f64,
) -> Result<f64, GeometryError> {
    if !(altitude >= 0.0) {
        return Err(GeometryError::InvalidAltitude(altitude));
    }
    if !(0.0..=90.0).contains(&zenith_deg) {
        return Err(GeometryError::InvalidZenith(zenith_deg));
    }
    Ok(slant_range_unchecked(
        zenith_deg.to_radians(),
        altitude,
        earth_radius,
    ))
}

fn slant_range_unchecked(zenith: f64, altitude: f64, r: f64) -> f64 {
    let shell = r + altitude;
    let (s, c) = zenith.sin_cos();
    (shell * shell - r * r * s * s).sqrt() - r * c
}

/// Samples `spec.count` satellites uniformly by solid angle over the zenith
/// cap above `ue`, each moving along a uniformly random tangent direction.
///
/// The output is a pure function of `(spec, ue)`.
pub fn sample_constellation(
    spec: &ConstellationSpec,
    ue: &GroundTerminal,
) -> Result<Vec<SatelliteState>, GeometryError> {
    spec.validate()?;
    ue.check_on_sphere(spec.earth_radius)?;

    let up = ue.position.normalized();
    let (east, north) = tangent_basis(up);
    let cos_hi = spec.zenith_min.to_radians().cos();
    let cos_lo = spec.zenith_max.to_radians().cos();
    let mut rng = rng_from_seed(derive_seed(spec.seed, "constellation", 0));

    let sats = (0..spec.count)
        .map(|i| {
            let u: f64 = rng.random();
            let cos_z = cos_hi - u * (cos_hi - cos_lo);
            let azimuth = 2.0 * PI * rng.random::<f64>();
            let heading = 2.0 * PI * rng.random::<f64>();

            let sin_z = (1.0 - cos_z * cos_z).max(0.0).sqrt();
            let zenith = cos_z.clamp(-1.0, 1.0).acos();
            let dir = up * cos_z + (east * azimuth.cos() + north * azimuth.sin()) * sin_z;
            let rho = slant_range_unchecked(zenith, spec.altitude, spec.earth_radius);
            let position = ue.position + dir * rho;

            let radial = position.normalized();
            let (t1, t2) = tangent_basis(radial);
            let mut v = t1 * heading.cos() + t2 * heading.sin();
            // Re-project to remove rounding drift off the tangent plane.
            v = (v - radial * v.dot(radial)).normalized();

            SatelliteState {
                id: i as u32,
                position,
                velocity: v * spec.speed,
            }
        })
        .collect();
    Ok(sats)
}

/// Range, delay, Doppler and zenith angle of the link `sat -> ue` at
/// carrier `fc` Hz.
pub fn link_observables(
    sat: &SatelliteState,
    ue: &GroundTerminal,
    fc: f64,
) -> Result<LinkObservables, GeometryError> {
    let r_sat = sat.position.norm();
    let r_ue = ue.position.norm();
    if !(r_sat > r_ue) {
        return Err(GeometryError::BelowSurface(r_sat));
    }
    let los = sat.position - ue.position;
    let range = los.norm();
    if range == 0.0 {
        return Err(GeometryError::CoincidentPositions);
    }
    let range_rate = los.dot(sat.velocity) / range;
    let doppler = -(fc / SPEED_OF_LIGHT_KM_S) * range_rate;
    let cos_z = (los.dot(ue.position) / (range * r_ue)).clamp(-1.0, 1.0);
    Ok(LinkObservables {
        range,
        delay: range / SPEED_OF_LIGHT_KM_S,
        doppler,
        zenith_angle: cos_z.acos().to_degrees(),
    })
}

/// Differential delay (earliest arrival subtracted) and Doppler for every
/// satellite, in input order.
pub fn delay_doppler_profile(
    sats: &[SatelliteState],
    ue: &GroundTerminal,
    fc: f64,
) -> Result<Vec<ProfileEntry>, GeometryError> {
    if sats.is_empty() {
        return Err(GeometryError::EmptyList);
    }
    let links = sats
        .iter()
        .map(|s| link_observables(s, ue, fc))
        .collect::<Result<Vec<_>, _>>()?;
    let min_delay = links.iter().map(|l| l.delay).fold(f64::INFINITY, f64::min);
    Ok(sats
        .iter()
        .zip(&links)
        .map(|(s, l)| ProfileEntry {
            sat_id: s.id,
            differential_delay: l.delay - min_delay,
            doppler: l.doppler,
        })
        .collect())
}

/// Tests each entry against the cyclic prefix `cp` (s) and the Doppler
/// tolerance `doppler_factor * scs` (Hz).
pub fn feasibility_mask(
    profile: &[ProfileEntry],
    cp: f64,
    scs: f64,
    doppler_factor: f64,
) -> Result<Vec<Feasibility>, GeometryError> {
    if !(cp > 0.0) {
        return Err(GeometryError::InvalidThreshold(
            "cyclic prefix must be positive",
        ));
    }
    if !(scs > 0.0) {
        return Err(GeometryError::InvalidThreshold(
            "subcarrier spacing must be positive",
        ));
    }
    if !(doppler_factor > 0.0 && doppler_factor <= 1.0) {
        return Err(GeometryError::InvalidThreshold(
            "doppler factor must lie in (0, 1]",
        ));
    }
    let doppler_limit = doppler_factor * scs;
    Ok(profile
        .iter()
        .map(|e| Feasibility {
            delay_ok: e.differential_delay <= cp,
            doppler_ok: e.doppler.abs() <= doppler_limit,
        })
        .collect())
}

/// Upper bound on |Doppler| for satellites of speed `speed` km/s inside a
/// cap of maximum zenith `zenith_max_deg`.
pub fn doppler_bound(
    fc: f64,
    speed: f64,
    zenith_max_deg: f64,
    altitude: f64,
    earth_radius: f64,
) -> f64 {
    fc / SPEED_OF_LIGHT_KM_S * speed * earth_radius * zenith_max_deg.to_radians().sin()
        / (earth_radius + altitude)
}
