//! Monte Carlo RMSE of the position estimators.

use rand::RngExt;
use rayon::prelude::*;
use serde::Serialize;

use super::echo::simulate_echoes;
use super::local::{fuse_lef, LocalEstimate};
use super::processor::{Cube, Processor};
use super::scene::{SearchConfig, SensingBench, SensingScene, Vec2};
use super::{Estimator, SensingError};
use crate::runner::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensingResult {
    pub estimator: Estimator,
    pub n_antennas: usize,
    pub trials: usize,
    pub discarded: usize,
    /// Position RMSE over the kept trials divided by the range resolution.
    pub rmse_over_delta_r: f64,
}

/// Squared position errors of one trial, `None` when discarded.
type TrialErrors = Vec<Option<f64>>;

fn run_trial(
    processor: &Processor,
    truth_half_width: f64,
    estimators: &[Estimator],
    master_seed: u64,
    index: u64,
) -> Result<TrialErrors, SensingError> {
    let seed = derive_seed(master_seed, "sensing-trial", index);
    let mut rng = rng_from_seed(derive_seed(seed, "sensing-truth", 0));
    let mut draw = |w: f64| {
        if w > 0.0 {
            -w + 2.0 * w * rng.random::<f64>()
        } else {
            0.0
        }
    };
    let vw = processor.search.velocity_half_width;
    let offset = Vec2::new(draw(truth_half_width), draw(truth_half_width));
    let v_offset = Vec2::new(draw(vw), draw(vw));
    let mut scene = processor.scene.clone();
    scene.target_position += offset;
    scene.target_velocity += v_offset;
    let truth = scene.target_position;

    let echoes = simulate_echoes(&scene, seed)?;
    if processor
        .covers(&echoes, &truth, &scene.target_velocity)
        .is_err()
    {
        return Ok(vec![None; estimators.len()]);
    }
    let needs_all = estimators.iter().any(|e| *e != Estimator::SingleMono);
    let cubes: Vec<Cube> = echoes
        .iter()
        .take(if needs_all { echoes.len() } else { 1 })
        .map(|e| processor.cube(e))
        .collect();
    let mut locals: Option<Vec<LocalEstimate>> = None;
    let mut local_estimates = || -> Vec<LocalEstimate> {
        locals
            .get_or_insert_with(|| {
                echoes
                    .iter()
                    .zip(&cubes)
                    .map(|(e, c)| processor.estimate_local_from_cube(e, c))
                    .collect()
            })
            .clone()
    };
    let sq = |p: Vec2| (p - truth).norm_squared();

    let mut out = Vec::with_capacity(estimators.len());
    for est in estimators {
        let err = match est {
            Estimator::SingleMono => Some(sq(processor
                .estimate_local_from_cube(&echoes[0], &cubes[0])
                .fix
                .position)),
            Estimator::Lef => fuse_lef(&local_estimates()).ok().map(sq),
            Estimator::Dfe => processor
                .estimate_dfe_from_cubes(&echoes, &cubes)
                .ok()
                .map(|d| sq(d.position)),
        };
        out.push(err);
    }
    Ok(out)
}

fn run(
    processor: &Processor,
    truth_half_width: f64,
    estimators: &[Estimator],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SensingResult>, SensingError> {
    if trials == 0 {
        return Err(SensingError::NoTrials);
    }
    let delta_r = processor.scene.delta_r()?;
    let outcomes: Vec<Result<TrialErrors, SensingError>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(processor, truth_half_width, estimators, master_seed, i))
        .collect();

    // Accumulate in trial order.
    let mut sums = vec![0.0; estimators.len()];
    let mut kept = vec![0usize; estimators.len()];
    for outcome in outcomes {
        for (k, err) in outcome?.into_iter().enumerate() {
            if let Some(e) = err {
                sums[k] += e;
                kept[k] += 1;
            }
        }
    }
    let n_antennas = processor.scene.nodes[0].n_antennas();
    estimators
        .iter()
        .enumerate()
        .map(|(k, &estimator)| {
            let discarded = trials - kept[k];
            if discarded * 10 > trials || kept[k] == 0 {
                return Err(SensingError::TooManyDiscards { discarded, trials });
            }
            Ok(SensingResult {
                estimator,
                n_antennas,
                trials,
                discarded,
                rmse_over_delta_r: (sums[k] / kept[k] as f64).sqrt() / delta_r,
            })
        })
        .collect()
}

/// RMSE of one estimator with the true target drawn uniformly within
/// `truth_half_width` km (and the search velocity box) of the scene's
/// target state.
pub fn monte_carlo_rmse(
    scene: &SensingScene,
    search: &SearchConfig,
    truth_half_width: f64,
    estimator: Estimator,
    trials: usize,
    master_seed: u64,
) -> Result<SensingResult, SensingError> {
    let processor = Processor::new(scene, search)?;
    Ok(run(
        &processor,
        truth_half_width,
        &[estimator],
        trials,
        master_seed,
    )?[0])
}

/// All three estimators on shared echoes for one array size of the bench.
pub fn bench(
    bench: &SensingBench,
    n_antennas: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SensingResult>, SensingError> {
    let scene = bench.scene(n_antennas)?;
    let processor = Processor::new(&scene, &bench.search()?)?;
    let truth_half_width = bench.truth_half_width * scene.delta_r()?;
    run(
        &processor,
        truth_half_width,
        &Estimator::ALL,
        trials,
        master_seed,
    )
}
