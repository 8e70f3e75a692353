//! Physical constants shared by every module.

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Speed of light in km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = SPEED_OF_LIGHT_M_S / 1000.0;

/// Mean spherical Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Rounded propagation speed (3e8 m/s) common in radar link tables.
pub const NOMINAL_SPEED_OF_LIGHT_M_S: f64 = 3.0e8;
