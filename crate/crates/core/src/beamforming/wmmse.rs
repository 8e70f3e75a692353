//! WMMSE core shared by the centralized, decentralized and S3 solvers.
//!
//! For fixed receive scalars `g_u` and MSE weights `lambda_u` the
//! beamformer subproblem is the convex quadratic
//! `sum_v w_v^H A w_v - 2 Re(b_v^H w_v)` with
//! `A = sum_u beta_u (m_u m_u^H + C_u)`, `beta_u = lambda_u |g_u|^2` and
//! `b_v = lambda_v g_v m_v`, under one power budget per satellite. Every
//! solver here works on satellite blocks: each block update is the exact
//! minimizer with the other blocks held fixed, found by bisection on that
//! satellite's dual variable.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::{BeamformingError, WmmseConfig, WmmseInit};
use crate::channel::{BeamformerSet, ChannelStats, CouplingAggregate, NoiseModel, StatsTable};
use crate::runner::seed::{derive_seed, rng_from_seed};

const BISECTION_TOL: f64 = 1e-10;

/// Result of a WMMSE run.
#[derive(Debug, Clone, PartialEq)]
pub struct WmmseOutput {
    pub beamformers: BeamformerSet,
    /// Hardening sum rate (bit/s) after every outer iteration.
    pub rate_trace: Vec<f64>,
    /// Final per-user rates, bit/s.
    pub user_rates: Vec<f64>,
}

impl WmmseOutput {
    pub fn sum_rate(&self) -> f64 {
        self.user_rates.iter().sum()
    }
}

/// Receive scalars and MSE weights derived from the coupling aggregate.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Weights {
    pub g: Vec<Complex64>,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Weights {
    /// MMSE receivers and inverse-MSE weights. Noise power is 1 in the
    /// normalized problem.
    pub fn from_aggregate(agg: &CouplingAggregate) -> Self {
        let users = agg.n_users;
        let mut w = Self {
            g: Vec::with_capacity(users),
            lambda: Vec::with_capacity(users),
            beta: Vec::with_capacity(users),
        };
        for u in 0..users {
            let (signal, rest) = agg.signal_and_interference(u, 1.0);
            let total = signal + rest;
            let g = agg.cross(u, u) / total;
            let mse = (rest / total).max(f64::MIN_POSITIVE);
            let lambda = 1.0 / mse;
            w.g.push(g);
            w.lambda.push(lambda);
            w.beta.push(lambda * g.norm_sqr());
        }
        w
    }
}

/// Problem with the channel scaled so that the noise power is one.
#[derive(Debug, Clone)]
pub(crate) struct Normalized {
    pub stats: StatsTable,
    pub powers: Vec<f64>,
    pub noise: NoiseModel,
}

impl Normalized {
    pub fn new(
        stats: &StatsTable,
        noise: &NoiseModel,
        powers: &[f64],
    ) -> Result<Self, BeamformingError> {
        if powers.len() != stats.n_sats() {
            return Err(BeamformingError::InvalidInput(format!(
                "{} power budgets for {} satellites",
                powers.len(),
                stats.n_sats()
            )));
        }
        if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(BeamformingError::InvalidInput(
                "power budgets must be finite and non-negative".into(),
            ));
        }
        if !(noise.noise_power > 0.0
            && noise.noise_power.is_finite()
            && noise.bandwidth > 0.0
            && noise.bandwidth.is_finite())
        {
            return Err(BeamformingError::InvalidInput(
                "noise power and bandwidth must be positive".into(),
            ));
        }
        let amp = noise.noise_power.sqrt().recip();
        let (s_count, u_count) = (stats.n_sats(), stats.n_users());
        let mut entries = Vec::with_capacity(s_count * u_count);
        for s in 0..s_count {
            for u in 0..u_count {
                let st = stats.get(s, u);
                entries.push(ChannelStats {
                    mean: st.mean.iter().map(|m| m * amp).collect(),
                    cov_scale: st.cov_scale / noise.noise_power,
                    gain: st.gain / noise.noise_power,
                    rician_k: st.rician_k,
                });
            }
        }
        let stats = StatsTable::new(s_count, u_count, entries)?;
        let normalized = Self {
            stats,
            powers: powers.to_vec(),
            noise: NoiseModel {
                noise_power: 1.0,
                bandwidth: noise.bandwidth,
            },
        };
        let finite = (0..s_count)
            .all(|s| (0..u_count).all(|u| normalized.stats.get(s, u).mean_power().is_finite()));
        if !finite {
            return Err(BeamformingError::InvalidInput(
                "channel statistics overflow after normalization".into(),
            ));
        }
        Ok(normalized)
    }

    pub fn n_sats(&self) -> usize {
        self.stats.n_sats()
    }

    pub fn n_users(&self) -> usize {
        self.stats.n_users()
    }

    pub fn n_elements(&self) -> usize {
        self.stats.n_elements()
    }

    pub fn rates(&self, agg: &CouplingAggregate) -> Vec<f64> {
        agg.rates(&self.noise)
    }

    pub fn sum_rate(&self, agg: &CouplingAggregate) -> f64 {
        self.rates(agg).iter().sum()
    }

    /// Initial precoders.
    pub fn initial(&self, init: WmmseInit) -> BeamformerSet {
        let (s_count, n, users) = (self.n_sats(), self.n_elements(), self.n_users());
        let mut w = BeamformerSet::zeros(s_count, n, users);
        match init {
            WmmseInit::MatchedFilterScaled => {
                for s in 0..s_count {
                    let per_user = self.powers[s] / users as f64;
                    for u in 0..users {
                        let st = self.stats.get(s, u);
                        let norm = st.mean_power().sqrt();
                        let col = w.column_mut(s, u);
                        if norm > 0.0 {
                            let k = (per_user.sqrt()) / norm;
                            col.iter_mut()
                                .zip(&st.mean)
                                .for_each(|(wi, mi)| *wi = mi * k);
                        } else {
                            // No line of sight: spread power evenly.
                            let k = (per_user / n as f64).sqrt();
                            col.iter_mut().for_each(|wi| *wi = Complex64::new(k, 0.0));
                        }
                    }
                }
            }
            WmmseInit::RandomSeeded { seed } => {
                let mut rng = rng_from_seed(derive_seed(seed, "wmmse-init", 0));
                for s in 0..s_count {
                    let mut block: Vec<Complex64> = (0..n * users)
                        .map(|_| {
                            Complex64::new(
                                StandardNormal.sample(&mut rng),
                                StandardNormal.sample(&mut rng),
                            )
                        })
                        .collect();
                    let p: f64 = block.iter().map(|x| x.norm_sqr()).sum();
                    let k = (self.powers[s] / p).sqrt();
                    block.iter_mut().for_each(|x| *x *= k);
                    w.set_block(s, block);
                }
            }
        }
        w
    }

    /// Exact minimizer of the beamformer subproblem over satellite `sat`'s
    /// block, all other blocks fixed. `total` is the coupling aggregate of
    /// the current precoders and `local` the contribution of `sat` to it.
    pub fn solve_block(
        &self,
        sat: usize,
        weights: &Weights,
        total: &CouplingAggregate,
        local: &CouplingAggregate,
    ) -> Vec<Complex64> {
        let (n, users) = (self.n_elements(), self.n_users());
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        let mut diag = 0.0;
        for u in 0..users {
            let st = self.stats.get(sat, u);
            let beta = weights.beta[u];
            if beta == 0.0 {
                continue;
            }
            for j in 0..n {
                let mj = st.mean[j].conj() * beta;
                for i in 0..n {
                    a[(i, j)] += st.mean[i] * mj;
                }
            }
            diag += beta * st.cov_scale;
        }
        for i in 0..n {
            a[(i, i)] += Complex64::new(diag, 0.0);
        }

        // Right-hand sides: b_{s,v} minus the coupling through the other
        // satellites' blocks.
        let mut rhs = DMatrix::<Complex64>::zeros(n, users);
        for v in 0..users {
            let own = self.stats.get(sat, v);
            let lead = weights.g[v] * weights.lambda[v];
            for i in 0..n {
                rhs[(i, v)] = own.mean[i] * lead;
            }
            for u in 0..users {
                let beta = weights.beta[u];
                if beta == 0.0 {
                    continue;
                }
                let others = (total.cross(u, v) - local.cross(u, v)) * beta;
                let st = self.stats.get(sat, u);
                for i in 0..n {
                    rhs[(i, v)] -= st.mean[i] * others;
                }
            }
        }

        let budget = self.powers[sat];
        let eig = SymmetricEigen::new(a);
        let z = eig.eigenvectors.adjoint() * &rhs;
        let row_energy: Vec<f64> = (0..n)
            .map(|i| z.row(i).iter().map(|x| x.norm_sqr()).sum())
            .collect();
        let total_energy: f64 = row_energy.iter().sum();
        let out_of = |mu: f64| -> Vec<Complex64> {
            let mut scaled = z.clone();
            for i in 0..n {
                let d = eig.eigenvalues[i] + mu;
                let inv = if d > 0.0 { 1.0 / d } else { 0.0 };
                scaled.row_mut(i).iter_mut().for_each(|x| *x *= inv);
            }
            let w = &eig.eigenvectors * scaled;
            w.as_slice().to_vec()
        };
        if total_energy == 0.0 || budget == 0.0 {
            return vec![Complex64::new(0.0, 0.0); n * users];
        }

        let power_at = |mu: f64| -> f64 {
            (0..n)
                .map(|i| {
                    let d = eig.eigenvalues[i] + mu;
                    if d > 0.0 {
                        row_energy[i] / (d * d)
                    } else if row_energy[i] > 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                })
                .sum()
        };

        let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let lambda_min = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if lambda_min > 1e-12 * lambda_max.max(1e-300) && power_at(0.0) <= budget {
            return out_of(0.0);
        }
        // power_at is decreasing in mu; power_at(hi) <= budget.
        let mut lo = 0.0;
        let mut hi = (total_energy / budget).sqrt();
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if power_at(mid) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
            let residual = budget - power_at(hi);
            if residual <= BISECTION_TOL * budget || hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        out_of(hi)
    }

    /// Value of the beamformer subproblem objective (up to a constant) at
    /// the precoders summarized by `agg`.
    pub fn surrogate(&self, weights: &Weights, agg: &CouplingAggregate) -> f64 {
        let users = self.n_users();
        let mut f = 0.0;
        for u in 0..users {
            let leak: f64 = (0..users).map(|v| agg.cross(u, v).norm_sqr()).sum();
            f += weights.beta[u] * (leak + agg.scatter[u]);
            f -= 2.0 * weights.lambda[u] * (weights.g[u].conj() * agg.cross(u, u)).re;
        }
        f
    }

    /// One Gauss-Seidel sweep over `order`, updating `w` and `agg` in place.
    pub fn gauss_seidel_sweep(
        &self,
        order: &[usize],
        weights: &Weights,
        w: &mut BeamformerSet,
        agg: &mut CouplingAggregate,
    ) {
        for &s in order {
            let old = CouplingAggregate::local(&self.stats, s, w.block(s));
            let block = self.solve_block(s, weights, agg, &old);
            let new = CouplingAggregate::local(&self.stats, s, &block);
            agg.sub(&old);
            agg.add(&new);
            w.set_block(s, block);
        }
    }
}

fn check_finite(w: &BeamformerSet) -> Result<(), BeamformingError> {
    let ok = (0..w.n_sats()).all(|s| {
        w.block(s)
            .iter()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    });
    if ok {
        Ok(())
    } else {
        Err(BeamformingError::InvalidInput(
            "iteration produced non-finite precoders".into(),
        ))
    }
}

/// Centralized WMMSE: a central unit holding all statistics alternates
/// receiver/weight updates with a beamformer step solved by up to
/// `cfg.inner_sweeps` block sweeps over the satellites.
pub fn wmmse_centralized(
    stats: &StatsTable,
    noise: &NoiseModel,
    powers: &[f64],
    cfg: &WmmseConfig,
) -> Result<WmmseOutput, BeamformingError> {
    cfg.validate()?;
    let problem = Normalized::new(stats, noise, powers)?;
    let order: Vec<usize> = (0..problem.n_sats()).collect();
    let mut w = problem.initial(cfg.init);
    let mut agg = CouplingAggregate::total(&problem.stats, &w);
    let mut trace = Vec::new();

    for _ in 0..cfg.max_iters {
        let weights = Weights::from_aggregate(&agg);
        let sweeps = if problem.n_sats() == 1 {
            1
        } else {
            cfg.inner_sweeps
        };
        let mut f_prev = problem.surrogate(&weights, &agg);
        for _ in 0..sweeps {
            problem.gauss_seidel_sweep(&order, &weights, &mut w, &mut agg);
            // Refresh against accumulated round-off from incremental updates.
            agg = CouplingAggregate::total(&problem.stats, &w);
            let f = problem.surrogate(&weights, &agg);
            if (f_prev - f).abs() <= 1e-12 * f.abs().max(1.0) {
                break;
            }
            f_prev = f;
        }
        check_finite(&w)?;
        let rate = problem.sum_rate(&agg);
        let converged = trace
            .last()
            .is_some_and(|&prev: &f64| (rate - prev).abs() <= cfg.rel_tol * prev.abs());
        trace.push(rate);
        if converged {
            break;
        }
    }

    Ok(WmmseOutput {
        user_rates: problem.rates(&agg),
        beamformers: w,
        rate_trace: trace,
    })
}
