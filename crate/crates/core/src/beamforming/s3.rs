//! Single-satellite service: each user is served by exactly one satellite.

use super::wmmse::{wmmse_centralized, Normalized};
use super::{BeamformingError, WmmseConfig};
use crate::channel::{BeamformerSet, CouplingAggregate, NoiseModel, StatsTable};

#[derive(Debug, Clone, PartialEq)]
pub struct S3Output {
    /// Serving satellite of every user.
    pub assignment: Vec<usize>,
    pub beamformers: BeamformerSet,
    /// Rates with interference from all satellites, bit/s.
    pub user_rates: Vec<f64>,
}

impl S3Output {
    pub fn sum_rate(&self) -> f64 {
        self.user_rates.iter().sum()
    }
}

/// Strongest satellite (by average channel power) for every user; ties go
/// to the lowest satellite id.
pub fn assign_users(stats: &StatsTable) -> Vec<usize> {
    (0..stats.n_users())
        .map(|u| {
            let mut best = 0;
            for s in 1..stats.n_sats() {
                if stats.get(s, u).total_power() > stats.get(best, u).total_power() {
                    best = s;
                }
            }
            best
        })
        .collect()
}

/// Each satellite runs WMMSE for its own users only, ignoring the others;
/// rates are then evaluated over the full interference picture.
pub fn s3_baseline(
    stats: &StatsTable,
    noise: &NoiseModel,
    powers: &[f64],
    cfg: &WmmseConfig,
) -> Result<S3Output, BeamformingError> {
    let problem = Normalized::new(stats, noise, powers)?;
    let assignment = assign_users(stats);
    let mut w = BeamformerSet::zeros(stats.n_sats(), stats.n_elements(), stats.n_users());
    for s in 0..stats.n_sats() {
        let served: Vec<usize> = (0..stats.n_users())
            .filter(|&u| assignment[u] == s)
            .collect();
        if served.is_empty() {
            continue;
        }
        let sub = stats.select(&[s], &served)?;
        let local = wmmse_centralized(&sub, noise, &[powers[s]], cfg)?;
        for (k, &u) in served.iter().enumerate() {
            w.column_mut(s, u)
                .copy_from_slice(local.beamformers.column(0, k));
        }
    }
    let agg = CouplingAggregate::total(&problem.stats, &w);
    Ok(S3Output {
        assignment,
        user_rates: problem.rates(&agg),
        beamformers: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::scenario::BeamformingScenario;
    use crate::channel::{ArrayGeometry, ChannelStats};

    #[test]
    fn single_satellite_equals_centralized() {
        let sc = BeamformingScenario {
            n_sats: 1,
            n_users: 3,
            ..BeamformingScenario::default()
        };
        let inst = sc.instance(3).unwrap();
        let cfg = WmmseConfig::default();
        let s3 = s3_baseline(&inst.stats, &inst.noise, &inst.powers, &cfg).unwrap();
        let central = wmmse_centralized(&inst.stats, &inst.noise, &inst.powers, &cfg).unwrap();
        assert_eq!(s3.beamformers, central.beamformers);
        assert_eq!(s3.user_rates, central.user_rates);
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let st = ChannelStats::from_steering(
            1.0,
            10.0,
            &ArrayGeometry {
                n_elements: 4,
                element_spacing: 0.5,
            }
            .steering(0.2),
        );
        let stats = StatsTable::new(3, 1, vec![st.clone(), st.clone(), st]).unwrap();
        assert_eq!(assign_users(&stats), vec![0]);
    }

    #[test]
    fn never_beats_centralized() {
        let sc = BeamformingScenario {
            n_sats: 3,
            n_users: 4,
            ..BeamformingScenario::default()
        };
        for seed in 0..3 {
            let inst = sc.instance(seed).unwrap();
            let cfg = WmmseConfig::default();
            let s3 = s3_baseline(&inst.stats, &inst.noise, &inst.powers, &cfg).unwrap();
            let central = wmmse_centralized(&inst.stats, &inst.noise, &inst.powers, &cfg).unwrap();
            assert!(s3.sum_rate() <= central.sum_rate() + 1e-6, "seed {seed}");
            for (s, &p) in inst.powers.iter().enumerate() {
                assert!(s3.beamformers.power(s) <= p + 1e-9);
            }
        }
    }
}
