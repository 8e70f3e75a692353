//! Decentralized WMMSE over inter-satellite links.
//!
//! Each satellite holds only its own statistics and precoder block. What
//! travels between satellites is the `U x U` cross-coupling aggregate, the
//! per-user scattered power and the receive scalars and MSE weights.
//!
//! * Ring: a token carrying `(G, q, g, lambda)` visits the satellites in
//!   order; each one replaces its block by the exact block minimizer and
//!   updates the running aggregate (one Gauss-Seidel sweep per iteration).
//! * Star: the hub broadcasts the aggregate and weights, every satellite
//!   proposes its block minimizer in parallel, and the hub picks the step
//!   along the joint proposal by exact line search on the (quadratic)
//!   surrogate before broadcasting it.

use num_complex::Complex64;
use rayon::prelude::*;

use super::overhead::OverheadLedger;
use super::wmmse::{wmmse_centralized, Normalized, Weights};
use super::{BeamformingError, Topology, TopologyKind, WmmseConfig};
use crate::channel::{inner, BeamformerSet, CouplingAggregate, NoiseModel, StatsTable};

#[derive(Debug, Clone, PartialEq)]
pub struct DecentralizedOutput {
    pub beamformers: BeamformerSet,
    /// Hardening sum rate (bit/s) after every iteration.
    pub rate_trace: Vec<f64>,
    pub user_rates: Vec<f64>,
    pub ledger: OverheadLedger,
}

impl DecentralizedOutput {
    pub fn sum_rate(&self) -> f64 {
        self.user_rates.iter().sum()
    }
}

/// Runs exactly `cfg.max_iters` iterations over a Ring or Star topology.
pub fn wmmse_decentralized(
    topology: &Topology,
    stats: &StatsTable,
    noise: &NoiseModel,
    powers: &[f64],
    cfg: &WmmseConfig,
) -> Result<DecentralizedOutput, BeamformingError> {
    if !matches!(topology.kind, TopologyKind::Ring | TopologyKind::Star) {
        return Err(BeamformingError::TopologyMismatch(format!(
            "decentralized WMMSE needs a ring or star topology, got {}",
            topology.kind.as_str()
        )));
    }
    topology.validate(stats.n_sats())?;
    cfg.validate()?;
    if stats.n_sats() == 1 {
        // Nothing to exchange.
        let out = wmmse_centralized(stats, noise, powers, cfg)?;
        return Ok(DecentralizedOutput {
            beamformers: out.beamformers,
            rate_trace: out.rate_trace,
            user_rates: out.user_rates,
            ledger: OverheadLedger::new(1),
        });
    }
    let problem = Normalized::new(stats, noise, powers)?;
    match topology.kind {
        TopologyKind::Ring => Ok(ring(&problem, &topology.order, cfg)),
        TopologyKind::Star => Ok(star(&problem, topology.hub.unwrap_or(0), cfg)),
        _ => unreachable!(),
    }
}

fn aggregate_reals(users: u64) -> u64 {
    2 * users * users + users
}

fn token_reals(users: u64) -> u64 {
    // (G, q) plus complex g and real lambda.
    aggregate_reals(users) + 3 * users
}

fn ring(problem: &Normalized, order: &[usize], cfg: &WmmseConfig) -> DecentralizedOutput {
    let users = problem.n_users() as u64;
    let last = *order.last().unwrap();
    let mut ledger = OverheadLedger::new(problem.n_sats());
    let mut w = problem.initial(cfg.init);

    // Accumulate the initial aggregate along the ring.
    let mut agg = CouplingAggregate::zeros(problem.n_users());
    for (i, &s) in order.iter().enumerate() {
        agg.add(&CouplingAggregate::local(&problem.stats, s, w.block(s)));
        if let Some(&next) = order.get(i + 1) {
            ledger.record(s, next, aggregate_reals(users));
            ledger.hop();
        }
    }

    let mut trace = Vec::with_capacity(cfg.max_iters);
    for _ in 0..cfg.max_iters {
        // The last node forms the weights and closes the ring.
        let weights = Weights::from_aggregate(&agg);
        let mut holder = last;
        for &s in order {
            ledger.record(holder, s, token_reals(users));
            ledger.hop();
            problem.gauss_seidel_sweep(&[s], &weights, &mut w, &mut agg);
            holder = s;
        }
        trace.push(problem.sum_rate(&agg));
    }
    DecentralizedOutput {
        user_rates: problem.rates(&agg),
        beamformers: w,
        rate_trace: trace,
        ledger,
    }
}

/// Proposal of one satellite in a Star iteration.
struct Proposal {
    delta: Vec<Complex64>,
    /// Change of the cross-coupling aggregate.
    delta_cross: Vec<Complex64>,
    /// `c_{s,u} Re<Delta_s, W_s>` per user.
    scatter_lin: Vec<f64>,
    /// `c_{s,u} ||Delta_s||^2` per user.
    scatter_quad: Vec<f64>,
}

fn propose(
    problem: &Normalized,
    s: usize,
    weights: &Weights,
    total: &CouplingAggregate,
    w: &BeamformerSet,
) -> Proposal {
    let old_block = w.block(s);
    let local = CouplingAggregate::local(&problem.stats, s, old_block);
    let block = problem.solve_block(s, weights, total, &local);
    let delta: Vec<Complex64> = block.iter().zip(old_block).map(|(b, o)| b - o).collect();
    let new_local = CouplingAggregate::local(&problem.stats, s, &block);
    let delta_cross = new_local
        .cross
        .iter()
        .zip(&local.cross)
        .map(|(a, b)| a - b)
        .collect();
    let lin = inner(&delta, old_block).re;
    let quad: f64 = delta.iter().map(|d| d.norm_sqr()).sum();
    let users = problem.n_users();
    let cov = |u: usize| problem.stats.get(s, u).cov_scale;
    Proposal {
        delta,
        delta_cross,
        scatter_lin: (0..users).map(|u| cov(u) * lin).collect(),
        scatter_quad: (0..users).map(|u| cov(u) * quad).collect(),
    }
}

fn star(problem: &Normalized, hub: usize, cfg: &WmmseConfig) -> DecentralizedOutput {
    let (n_sats, n_users) = (problem.n_sats(), problem.n_users());
    let users = n_users as u64;
    let edges: Vec<usize> = (0..n_sats).filter(|&s| s != hub).collect();
    let mut ledger = OverheadLedger::new(n_sats);
    let mut w = problem.initial(cfg.init);

    // Edges report their initial local aggregates; the hub reduces in id order.
    for &e in &edges {
        ledger.record(e, hub, aggregate_reals(users));
    }
    ledger.hop();
    let mut agg = CouplingAggregate::total(&problem.stats, &w);

    let mut trace = Vec::with_capacity(cfg.max_iters);
    for _ in 0..cfg.max_iters {
        let weights = Weights::from_aggregate(&agg);
        for &e in &edges {
            ledger.record(hub, e, token_reals(users));
        }
        ledger.hop();

        let proposals: Vec<Proposal> = (0..n_sats)
            .into_par_iter()
            .map(|s| propose(problem, s, &weights, &agg, &w))
            .collect();
        for &e in &edges {
            ledger.record(e, hub, 2 * users * users + 2 * users);
        }
        ledger.hop();

        // Hub: reduce in id order and minimize the surrogate along the step.
        let mut delta_cross = vec![Complex64::new(0.0, 0.0); n_users * n_users];
        let mut scatter_lin = vec![0.0; n_users];
        let mut scatter_quad = vec![0.0; n_users];
        for p in &proposals {
            delta_cross
                .iter_mut()
                .zip(&p.delta_cross)
                .for_each(|(a, b)| *a += b);
            scatter_lin
                .iter_mut()
                .zip(&p.scatter_lin)
                .for_each(|(a, b)| *a += b);
            scatter_quad
                .iter_mut()
                .zip(&p.scatter_quad)
                .for_each(|(a, b)| *a += b);
        }
        let (mut lin, mut quad) = (0.0, 0.0);
        for u in 0..n_users {
            let beta = weights.beta[u];
            for v in 0..n_users {
                let d = delta_cross[u * n_users + v];
                lin += beta * (agg.cross(u, v).conj() * d).re;
                quad += beta * d.norm_sqr();
            }
            lin += beta * scatter_lin[u];
            quad += beta * scatter_quad[u];
            lin -= weights.lambda[u] * (weights.g[u].conj() * delta_cross[u * n_users + u]).re;
        }
        let step = if quad > 0.0 {
            (-lin / quad).clamp(0.0, 1.0)
        } else if lin < 0.0 {
            1.0
        } else {
            0.0
        };
        for &e in &edges {
            ledger.record(hub, e, 1);
        }
        ledger.hop();

        for (s, p) in proposals.iter().enumerate() {
            let block: Vec<Complex64> = w
                .block(s)
                .iter()
                .zip(&p.delta)
                .map(|(o, d)| o + d * step)
                .collect();
            w.set_block(s, block);
        }
        for (i, d) in delta_cross.iter().enumerate() {
            agg.cross[i] += d * step;
        }
        for u in 0..n_users {
            agg.scatter[u] += 2.0 * step * scatter_lin[u] + step * step * scatter_quad[u];
        }
        trace.push(problem.sum_rate(&agg));
    }
    DecentralizedOutput {
        user_rates: problem.rates(&agg),
        beamformers: w,
        rate_trace: trace,
        ledger,
    }
}
