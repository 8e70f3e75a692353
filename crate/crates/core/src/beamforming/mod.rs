//! Collaborative multi-satellite beamforming.
//!
//! WMMSE on the deterministic-equivalent (hardening bound) problem, solved
//! either by a central unit with global statistics or by the satellites
//! themselves over a Ring or Star inter-satellite topology, plus the
//! single-satellite-service (S3) baseline and signaling overhead
//! accounting.

mod decentralized;
mod overhead;
mod s3;
mod scenario;
mod wmmse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelError;

pub use crate::channel::BeamformerSet;
pub use decentralized::{wmmse_decentralized, DecentralizedOutput};
pub use overhead::{overhead_model, OverheadLedger, Role};
pub use s3::{s3_baseline, S3Output};
pub use scenario::{BeamformingScenario, Instance};
pub use wmmse::{wmmse_centralized, WmmseOutput};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeamformingError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("non-finite or invalid input: {0}")]
    InvalidInput(String),
    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),
    #[error("invalid overhead query: {0}")]
    InvalidRole(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Centralized,
    Ring,
    Star,
    S3,
}

impl TopologyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Centralized => "centralized",
            Self::Ring => "ring",
            Self::Star => "star",
            Self::S3 => "s3",
        }
    }
}

/// Coordination pattern among the satellites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub kind: TopologyKind,
    /// Star only.
    pub hub: Option<usize>,
    /// Ring only: visiting order, a permutation of all satellite ids.
    pub order: Vec<usize>,
}

impl Topology {
    pub fn centralized() -> Self {
        Self {
            kind: TopologyKind::Centralized,
            hub: None,
            order: Vec::new(),
        }
    }

    /// Ring visiting satellites in id order.
    pub fn ring(n_sats: usize) -> Self {
        Self {
            kind: TopologyKind::Ring,
            hub: None,
            order: (0..n_sats).collect(),
        }
    }

    pub fn ring_with_order(order: Vec<usize>) -> Self {
        Self {
            kind: TopologyKind::Ring,
            hub: None,
            order,
        }
    }

    pub fn star(hub: usize) -> Self {
        Self {
            kind: TopologyKind::Star,
            hub: Some(hub),
            order: Vec::new(),
        }
    }

    pub fn validate(&self, n_sats: usize) -> Result<(), BeamformingError> {
        match self.kind {
            TopologyKind::Ring => {
                let mut seen = vec![false; n_sats];
                let ok = self.order.len() == n_sats
                    && self
                        .order
                        .iter()
                        .all(|&s| s < n_sats && !std::mem::replace(&mut seen[s], true));
                if !ok {
                    return Err(BeamformingError::TopologyMismatch(format!(
                        "ring order {:?} is not a permutation of 0..{n_sats}",
                        self.order
                    )));
                }
            }
            TopologyKind::Star => match self.hub {
                Some(h) if h < n_sats => {}
                other => {
                    return Err(BeamformingError::TopologyMismatch(format!(
                        "star hub {other:?} invalid for {n_sats} satellites"
                    )))
                }
            },
            TopologyKind::Centralized | TopologyKind::S3 => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WmmseInit {
    /// Matched-filter precoders sharing each satellite's budget equally.
    MatchedFilterScaled,
    /// Complex Gaussian precoders scaled to the budget.
    RandomSeeded { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WmmseConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub init: WmmseInit,
    /// Block-coordinate sweeps used by the central unit to solve each
    /// beamformer subproblem.
    pub inner_sweeps: usize,
}

impl Default for WmmseConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            rel_tol: 1e-7,
            init: WmmseInit::MatchedFilterScaled,
            inner_sweeps: 10,
        }
    }
}

impl WmmseConfig {
    /// Fixed-count schedule used by the decentralized solvers.
    pub fn decentralized() -> Self {
        Self {
            max_iters: 16,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), BeamformingError> {
        if self.max_iters == 0 {
            return Err(BeamformingError::InvalidInput(
                "max_iters must be >= 1".into(),
            ));
        }
        if !(self.rel_tol > 0.0) {
            return Err(BeamformingError::InvalidInput(
                "rel_tol must be positive".into(),
            ));
        }
        if self.inner_sweeps == 0 {
            return Err(BeamformingError::InvalidInput(
                "inner_sweeps must be >= 1".into(),
            ));
        }
        Ok(())
    }
}
