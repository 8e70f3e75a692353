//! Signaling overhead: analytic reference model and measured ledger.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BeamformingError, TopologyKind};

/// Node role in the overhead model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Edge,
    Central,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Edge => "edge",
            Self::Central => "central",
        }
    }
}

fn per_edge(n_users: u64) -> Option<u64> {
    1024u64
        .checked_mul(n_users)?
        .checked_mul(n_users.checked_add(2)?)
}

/// Reference overhead per node: `f(U) = 1024 U (U + 2)` for a Ring node or
/// Star edge, `(S - 1) f(U)` for the Star hub.
pub fn overhead_model(
    kind: TopologyKind,
    role: Role,
    n_sats: u64,
    n_users: u64,
) -> Result<u64, BeamformingError> {
    if n_users == 0 {
        return Err(BeamformingError::InvalidRole("U must be >= 1".into()));
    }
    let overflow =
        || BeamformingError::InvalidRole(format!("overhead overflows for S={n_sats}, U={n_users}"));
    let f = per_edge(n_users).ok_or_else(overflow)?;
    match (kind, role) {
        (TopologyKind::Ring, Role::Edge) | (TopologyKind::Star, Role::Edge) => Ok(f),
        (TopologyKind::Star, Role::Central) => {
            if n_sats < 2 {
                return Err(BeamformingError::InvalidRole(
                    "star hub needs S >= 2".into(),
                ));
            }
            (n_sats - 1).checked_mul(f).ok_or_else(overflow)
        }
        (kind, role) => Err(BeamformingError::InvalidRole(format!(
            "no {} role in a {} topology",
            role.as_str(),
            kind.as_str()
        ))),
    }
}

/// Real scalars and messages that crossed inter-satellite links during a
/// decentralized run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct OverheadLedger {
    pub sent: Vec<u64>,
    pub received: Vec<u64>,
    /// Message count per directed link `(from, to)`.
    pub messages: BTreeMap<(usize, usize), u64>,
    /// Sequential message hops, a latency proxy.
    pub hops: u64,
}

impl OverheadLedger {
    pub fn new(n_nodes: usize) -> Self {
        Self {
            sent: vec![0; n_nodes],
            received: vec![0; n_nodes],
            messages: BTreeMap::new(),
            hops: 0,
        }
    }

    /// One message of `reals` real scalars from `from` to `to`.
    pub fn record(&mut self, from: usize, to: usize, reals: u64) {
        self.sent[from] += reals;
        self.received[to] += reals;
        *self.messages.entry((from, to)).or_insert(0) += 1;
    }

    /// Counts a batch of messages that travel concurrently as one hop.
    pub fn hop(&mut self) {
        self.hops += 1;
    }

    pub fn node_total(&self, node: usize) -> u64 {
        self.sent[node] + self.received[node]
    }

    pub fn total_sent(&self) -> u64 {
        self.sent.iter().sum()
    }

    pub fn total_received(&self) -> u64 {
        self.received.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_sent() == 0
            && self.total_received() == 0
            && self.messages.is_empty()
            && self.hops == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_and_edge_values() {
        for (u, want) in [(4, 24576), (8, 81920), (16, 294912), (32, 1114112)] {
            assert_eq!(
                overhead_model(TopologyKind::Ring, Role::Edge, 4, u).unwrap(),
                want
            );
            for s in [2, 4, 16, 1000] {
                assert_eq!(
                    overhead_model(TopologyKind::Star, Role::Edge, s, u).unwrap(),
                    want
                );
            }
        }
    }

    #[test]
    fn hub_values() {
        assert_eq!(
            overhead_model(TopologyKind::Star, Role::Central, 16, 32).unwrap(),
            16711680
        );
        assert_eq!(
            overhead_model(TopologyKind::Star, Role::Central, 4, 4).unwrap(),
            73728
        );
        assert_eq!(
            overhead_model(TopologyKind::Star, Role::Central, 8, 4).unwrap(),
            172032
        );
    }

    #[test]
    fn invalid_queries() {
        assert!(overhead_model(TopologyKind::Ring, Role::Central, 4, 4).is_err());
        assert!(overhead_model(TopologyKind::Centralized, Role::Edge, 4, 4).is_err());
        assert!(overhead_model(TopologyKind::S3, Role::Edge, 4, 4).is_err());
        assert!(overhead_model(TopologyKind::Star, Role::Central, 1, 4).is_err());
        assert!(overhead_model(TopologyKind::Ring, Role::Edge, 4, 0).is_err());
        assert!(overhead_model(TopologyKind::Star, Role::Central, u64::MAX, 4).is_err());
    }

    #[test]
    fn ledger_conserves() {
        let mut l = OverheadLedger::new(3);
        l.record(0, 1, 10);
        l.record(1, 2, 7);
        l.record(0, 1, 3);
        assert_eq!(l.total_sent(), l.total_received());
        assert_eq!(l.messages[&(0, 1)], 2);
        assert_eq!(l.node_total(1), 20);
        assert!(!l.is_zero());
        assert!(OverheadLedger::new(2).is_zero());
    }
}
