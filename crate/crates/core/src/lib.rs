//! Deterministic simulation and analysis toolkit for cooperative LEO
//! multi-satellite communication, positioning and sensing.
//!
//! The crate is split along the three studies it supports:
//!
//! - [`geometry`]: overhead constellation sampling, slant range, delay,
//!   Doppler and OFDM feasibility masks.
//! - [`waveform`]: OFDM radar metrics and inverse waveform design.
//! - [`channel`] and [`beamforming`]: statistical CSI, hardening-bound rates,
//!   centralized/decentralized WMMSE and signaling overhead accounting.
//! - [`sensing`]: monostatic echo simulation and the single-satellite, LEF
//!   and DFE position estimators with a Monte Carlo RMSE bench.
//! - [`runner`]: configuration, seeding, CSV emission and experiment
//!   orchestration behind the `dislac` binary.

pub mod beamforming;
pub mod channel;
pub mod consts;
pub mod geometry;
pub mod runner;
pub mod sensing;
pub mod waveform;

pub use runner::derive_seed;
