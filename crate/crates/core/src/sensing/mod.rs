//! Multistatic sensing of a point target by several LEO satellites.
//!
//! The scene is planar: satellites and target share one plane, each
//! satellite carries a ULA and observes its own monostatic OFDM echo. Three
//! position estimators are compared:
//!
//! - single-satellite monostatic (range and bearing from one node),
//! - local-estimate-then-fusion (LEF): every node estimates locally, the
//!   fixes are fused by weighted least squares,
//! - data-fusion-then-estimate (DFE): matched-filter outputs of all nodes are
//!   added coherently over a common position/velocity grid.

mod dfe;
mod echo;
mod local;
mod monte_carlo;
mod processor;
mod scene;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::waveform::WaveformError;

pub use dfe::DfeEstimate;
pub use echo::{simulate_echoes, EchoData, EchoTruth};
pub use local::{fuse_lef, fuse_positions, LocalEstimate, PositionFix};
pub use monte_carlo::{bench, monte_carlo_rmse, SensingResult};
pub use processor::{Axis, Cube, NodeGrid, Processor};
pub use scene::{SearchConfig, SensingBench, SensingNode, SensingScene, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SensingError {
    #[error("invalid sensing scene: {0}")]
    InvalidScene(String),
    #[error(transparent)]
    Waveform(#[from] WaveformError),
    #[error("true target parameters fall outside the search grid of node {0}")]
    TruthOutsideGrid(usize),
    #[error("fusion needs at least two usable local fixes, got {0}")]
    InsufficientFixes(usize),
    #[error("every local covariance is singular")]
    SingularCovariance,
    #[error("{discarded} of {trials} trials discarded (limit 10%)")]
    TooManyDiscards { discarded: usize, trials: usize },
    #[error("trials must be >= 1")]
    NoTrials,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Estimator {
    #[serde(rename = "single-mono")]
    SingleMono,
    #[serde(rename = "lef")]
    Lef,
    #[serde(rename = "dfe")]
    Dfe,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::SingleMono, Estimator::Lef, Estimator::Dfe];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SingleMono => "single-mono",
            Self::Lef => "lef",
            Self::Dfe => "dfe",
        }
    }
}
