//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when
//! any criterion fails. Runs under `cargo test` (custom harness).
//!
//! Tolerances are pinned here, next to each check.

use std::fs;
use std::time::{Duration, Instant};

use dislac::beamforming::{
    overhead_model, wmmse_centralized, wmmse_decentralized, BeamformingScenario, Role, Topology,
    TopologyKind, WmmseConfig, WmmseInit,
};
use dislac::channel::{ArrayGeometry, ChannelStats, NoiseModel, StatsTable};
use dislac::consts::NOMINAL_SPEED_OF_LIGHT_M_S;
use dislac::runner::{
    compute_artifacts, run_experiment, Artifact, ExperimentName, ExperimentSpec, Field, RunManifest,
};
use dislac::sensing::{bench, simulate_echoes, Estimator, Processor, SensingBench, SensingResult};
use dislac::waveform::required_config;
use serde_json::json;

struct Outcome {
    pass: bool,
    detail: String,
}

fn float(f: &Field) -> f64 {
    match f {
        Field::Float(x) => *x,
        Field::Int(i) => *i as f64,
        other => panic!("not numeric: {other:?}"),
    }
}

fn text(f: &Field) -> &str {
    match f {
        Field::Text(s) => s,
        other => panic!("not text: {other:?}"),
    }
}

fn boolean(f: &Field) -> bool {
    match f {
        Field::Bool(b) => *b,
        other => panic!("not bool: {other:?}"),
    }
}

fn artifacts(name: ExperimentName, seed: u64, overrides: serde_json::Value) -> Vec<Artifact> {
    let spec = ExperimentSpec::with_defaults(name, seed, "unused")
        .with_overrides(overrides)
        .expect("valid overrides");
    compute_artifacts(&spec).expect("experiment runs")
}

/// A computed value reproduces a printed label when it lies within half a
/// unit of the label's last digit (ties admitted).
fn reproduces(value: f64, label: &str) -> bool {
    let decimals = label.split_once('.').map_or(0, |(_, d)| d.len()) as i32;
    let label: f64 = label.parse().unwrap();
    (value - label).abs() <= 0.5 * 10f64.powi(-decimals) * (1.0 + 1e-9)
}

fn fig4a_labels(speed: f64) -> (usize, Vec<String>) {
    let rows = &artifacts(
        ExperimentName::WaveformSweep,
        0,
        json!({ "propagation_speed": speed }),
    )[0]
    .rows;
    // Labelled columns: the 1st, 4th, 7th and 10th subband spacing.
    let labels = [
        (1, ["150.0", "25.6", "4.4", "0.7"]),
        (2, ["0.146", "0.025", "0.004", "0.001"]),
        (3, ["0.08", "0.44", "2.56", "15.00"]),
    ];
    let mut hits = 0;
    let mut misses = Vec::new();
    for (col, want) in labels {
        for (k, label) in want.iter().enumerate() {
            let v = float(&rows[3 * k][col]);
            if reproduces(v, label) {
                hits += 1;
            } else {
                misses.push(format!("{v:.5}!={label}"));
            }
        }
    }
    (hits, misses)
}

fn misses_suffix(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(" {}", items.join(", "))
    }
}

fn criterion_1() -> Outcome {
    let (hits, misses) = fig4a_labels(NOMINAL_SPEED_OF_LIGHT_M_S);
    let (exact_hits, _) = fig4a_labels(dislac::consts::SPEED_OF_LIGHT_M_S);
    Outcome {
        pass: hits == 12,
        detail: format!(
            "{hits}/12 labels at c=3e8 (exact c: {exact_hits}/12){}",
            misses_suffix(&misses)
        ),
    }
}

fn criterion_2() -> Outcome {
    let b = required_config(100.0, 7.5, 6.662e9).unwrap();
    let rel_1499 = (b.delta_f_max - 1499.0).abs() / 1499.0;
    let rel_1500 = (b.delta_f_max - 1500.0).abs() / 1500.0;
    Outcome {
        pass: rel_1499 < 1e-3 && rel_1500 < 1e-3,
        detail: format!(
            "delta_f_max = {:.3} Hz, {:.4}% from 1.5 kHz (tol 0.1%)",
            b.delta_f_max,
            100.0 * rel_1500
        ),
    }
}

fn criterion_3() -> Outcome {
    // Plotted values, transcribed from the figure data.
    let users = [4u64, 8, 16, 32];
    let edge = [24576u64, 81920, 294912, 1114112];
    let hub = [
        (4u64, [73728u64, 245760, 884736, 3342336]),
        (8, [172032, 573440, 2064384, 7798784]),
        (16, [368640, 1228800, 4423680, 16711680]),
    ];
    let mut matched = 0;
    for (k, &u) in users.iter().enumerate() {
        matched +=
            usize::from(overhead_model(TopologyKind::Ring, Role::Edge, 4, u).unwrap() == edge[k]);
        matched +=
            usize::from(overhead_model(TopologyKind::Star, Role::Edge, 8, u).unwrap() == edge[k]);
        for (s, values) in hub {
            matched += usize::from(
                overhead_model(TopologyKind::Star, Role::Central, s, u).unwrap() == values[k],
            );
        }
    }
    Outcome {
        pass: matched == 20,
        detail: format!("{matched}/20 plotted values exact"),
    }
}

fn criterion_4() -> Outcome {
    const DELAY_MAX_US: f64 = 7.0 + 0.1;
    const DOPPLER_MAX_HZ: f64 = 3990.0 * 1.01;
    let (mut max_delay, mut max_doppler) = (0.0f64, 0.0f64);
    let mut seeds_with_cp_violation = 0;
    let mut doppler_violations = 0;
    for seed in 0..20 {
        let rows = &artifacts(ExperimentName::DelayDoppler, seed, json!({}))[0].rows;
        assert_eq!(rows.len(), 200);
        for r in rows {
            max_delay = max_delay.max(float(&r[2]));
            max_doppler = max_doppler.max(float(&r[3]).abs());
            doppler_violations += usize::from(!boolean(&r[5]));
        }
        seeds_with_cp_violation += usize::from(rows.iter().any(|r| !boolean(&r[4])));
    }
    Outcome {
        pass: max_delay <= DELAY_MAX_US && max_doppler <= DOPPLER_MAX_HZ && seeds_with_cp_violation == 20 && doppler_violations == 0,
        detail: format!(
            "max delay {max_delay:.3} us (<= {DELAY_MAX_US}), max |doppler| {max_doppler:.1} Hz (<= {DOPPLER_MAX_HZ:.1}), \
             CP violated in {seeds_with_cp_violation}/20 seeds, {doppler_violations} Doppler violations"
        ),
    }
}

fn criterion_5() -> Outcome {
    const STAR_SLACK: f64 = 0.02;
    const S3_FACTOR: f64 = 1.5;
    const TRACE_TOL: f64 = 1e-9;
    let out = artifacts(
        ExperimentName::BeamformSweep,
        0,
        json!({ "n_sats": [2, 4], "n_users": [4], "instances": 20 }),
    );
    let mut ok = true;
    let mut parts = Vec::new();
    for s in [2.0, 4.0] {
        let rate = |scheme: &str| {
            out[0]
                .rows
                .iter()
                .find(|r| text(&r[0]) == scheme && float(&r[1]) == s)
                .map(|r| float(&r[3]))
                .unwrap()
        };
        let (c, ring, star, s3) = (rate("centralized"), rate("ring"), rate("star"), rate("s3"));
        ok &= c >= ring
            && ring >= star - STAR_SLACK * c
            && [c, ring, star].iter().all(|&r| r >= S3_FACTOR * s3);
        parts.push(format!(
            "S={s}: C {c:.4e} R {ring:.4e} St {star:.4e} S3 {s3:.4e} (C/S3 {:.2})",
            c / s3
        ));
    }
    // Centralized traces, per (S, instance).
    let mut worst = 0.0f64;
    let traces: Vec<&Vec<Field>> = out[1]
        .rows
        .iter()
        .filter(|r| text(&r[0]) == "centralized")
        .collect();
    for w in traces.windows(2) {
        let same_run = w[0][1] == w[1][1] && w[0][3] == w[1][3];
        if same_run {
            let (a, b) = (float(&w[0][5]), float(&w[1][5]));
            worst = worst.max((a - b) / a);
        }
    }
    ok &= worst <= TRACE_TOL;
    parts.push(format!("largest relative trace drop {worst:.1e}"));
    Outcome {
        pass: ok,
        detail: parts.join("; "),
    }
}

fn rmse(results: &[SensingResult], e: Estimator) -> f64 {
    results
        .iter()
        .find(|r| r.estimator == e)
        .unwrap()
        .rmse_over_delta_r
}

fn criterion_6() -> Outcome {
    const TRIALS: usize = 500;
    const N16_GAP: f64 = 0.15;
    const SEED_WINS: usize = 18;
    let b = SensingBench::default();
    let per_n: Vec<(usize, Vec<SensingResult>)> = b
        .n_antennas
        .iter()
        .map(|&n| (n, bench(&b, n, TRIALS, 0).unwrap()))
        .collect();
    let mut monotone = true;
    for e in Estimator::ALL {
        let curve: Vec<f64> = per_n.iter().map(|(_, r)| rmse(r, e)).collect();
        monotone &= curve.windows(2).all(|w| w[1] <= w[0]);
    }
    let mut wins = 0;
    for seed in 0..20u64 {
        let r = if seed == 0 {
            per_n[0].1.clone()
        } else {
            bench(&b, 2, TRIALS, seed).unwrap()
        };
        wins += usize::from(rmse(&r, Estimator::Dfe) < rmse(&r, Estimator::Lef));
    }
    let last = &per_n.last().unwrap().1;
    let gap = (rmse(last, Estimator::Lef) - rmse(last, Estimator::Dfe)).abs()
        / rmse(last, Estimator::Dfe);
    let table: Vec<String> = per_n
        .iter()
        .map(|(n, r)| {
            format!(
                "N={n}: {:.3}/{:.3}/{:.3}",
                rmse(r, Estimator::SingleMono),
                rmse(r, Estimator::Lef),
                rmse(r, Estimator::Dfe)
            )
        })
        .collect();
    Outcome {
        pass: monotone && wins >= SEED_WINS && gap < N16_GAP,
        detail: format!(
            "(a) nonincreasing {monotone}; (b) DFE<LEF in {wins}/20 seeds; (c) N=16 gap {:.1}%; single/LEF/DFE {}",
            100.0 * gap,
            table.join(" ")
        ),
    }
}

fn criterion_7() -> Outcome {
    // Single user, pure line of sight: rate of the matched filter at full power.
    let (n, gain, p, sigma2, bw) = (16, 3e-3, 2.0, 1e-2, 1e7);
    let steering = ArrayGeometry {
        n_elements: n,
        element_spacing: 0.5,
    }
    .steering(0.37);
    let stats = StatsTable::new(
        1,
        1,
        vec![ChannelStats::from_steering(gain, f64::INFINITY, &steering)],
    )
    .unwrap();
    let noise = NoiseModel {
        noise_power: sigma2,
        bandwidth: bw,
    };
    let cfg = WmmseConfig {
        init: WmmseInit::RandomSeeded { seed: 11 },
        ..WmmseConfig::default()
    };
    let got = wmmse_centralized(&stats, &noise, &[p], &cfg)
        .unwrap()
        .sum_rate();
    let closed_form = bw * (1.0 + p * gain * n as f64 / sigma2).log2();
    let mf_rel = (got - closed_form).abs() / closed_form;

    let b = SensingBench {
        snr_db: f64::INFINITY,
        ..SensingBench::default()
    };
    let scene = b.scene(8).unwrap();
    let processor = Processor::new(&scene, &b.search().unwrap()).unwrap();
    let echoes = simulate_echoes(&scene, 0).unwrap();
    let locals: Vec<_> = echoes.iter().map(|e| processor.estimate_local(e)).collect();
    let lef_err = (dislac::sensing::fuse_lef(&locals).unwrap() - scene.target_position).norm();
    let dfe_err =
        (processor.estimate_dfe(&echoes).unwrap().position - scene.target_position).norm();
    let sensing_ok = lef_err < 1e-9 && dfe_err < 1e-9;

    let sc = BeamformingScenario {
        n_sats: 1,
        n_users: 3,
        ..BeamformingScenario::default()
    };
    let inst = sc.instance(5).unwrap();
    let dcfg = WmmseConfig::decentralized();
    let central = wmmse_centralized(&inst.stats, &inst.noise, &inst.powers, &dcfg).unwrap();
    let mut bitwise = true;
    for topo in [Topology::ring(1), Topology::star(0)] {
        let d = wmmse_decentralized(&topo, &inst.stats, &inst.noise, &inst.powers, &dcfg).unwrap();
        bitwise &= d.beamformers == central.beamformers
            && d.user_rates == central.user_rates
            && d.ledger.is_zero();
    }
    Outcome {
        pass: mf_rel < 1e-6 && sensing_ok && bitwise,
        detail: format!(
            "MF rel err {mf_rel:.1e} (< 1e-6); noiseless LEF/DFE err {lef_err:.1e}/{dfe_err:.1e} km (< 1e-9); S=1 bitwise {bitwise}"
        ),
    }
}

fn criterion_8() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let reduced = |e: ExperimentName| match e {
        ExperimentName::BeamformSweep => json!({ "instances": 3 }),
        ExperimentName::OverheadSweep => json!({ "n_sats": [4, 8], "n_users": [4, 8] }),
        ExperimentName::SensingMc => json!({ "trials": 24, "n_antennas": [2, 4] }),
        _ => json!({}),
    };
    let mut identical = 0;
    let mut failures = Vec::new();
    for e in ExperimentName::ALL {
        let mut spec = ExperimentSpec::with_defaults(e, 42, root.path().join(format!("{e}-t1")))
            .with_overrides(reduced(e))
            .unwrap();
        spec.threads = Some(1);
        let first = run_experiment(&spec).unwrap();
        let mut all_same = true;
        for threads in [2, 4] {
            let mut again = RunManifest::read(&first.path()).unwrap().spec;
            again.output_dir = root.path().join(format!("{e}-t{threads}"));
            again.threads = Some(threads);
            let second = run_experiment(&again).unwrap();
            for (a, b) in first.artifact_paths().iter().zip(second.artifact_paths()) {
                all_same &= fs::read(a).unwrap() == fs::read(b).unwrap();
            }
            all_same &= first.artifacts == second.artifacts;
        }
        if all_same {
            identical += 1;
        } else {
            failures.push(e.to_string());
        }
    }
    Outcome {
        pass: identical == ExperimentName::ALL.len(),
        detail: format!(
            "{identical}/6 experiments byte-identical from manifest at 1/2/4 threads{}",
            misses_suffix(&failures)
        ),
    }
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 8] = [
        (
            1,
            "waveform metric labels",
            Duration::from_secs(1),
            criterion_1,
        ),
        (
            2,
            "inverse waveform design",
            Duration::from_secs(1),
            criterion_2,
        ),
        (
            3,
            "overhead model values",
            Duration::from_secs(1),
            criterion_3,
        ),
        (
            4,
            "constellation delay/Doppler bounds",
            Duration::from_secs(5),
            criterion_4,
        ),
        (
            5,
            "beamforming orderings",
            Duration::from_secs(120),
            criterion_5,
        ),
        (
            6,
            "sensing estimator orderings",
            Duration::from_secs(600),
            criterion_6,
        ),
        (
            7,
            "oracle equivalences",
            Duration::from_secs(600),
            criterion_7,
        ),
        (8, "determinism", Duration::from_secs(600), criterion_8),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= budget;
        failed += usize::from(!pass);
        println!(
            "criterion {id} {} {name}: {} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
