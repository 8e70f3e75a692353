//! The six experiments, their parameters and CSV schemas.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{typed, untyped, ExperimentSpec};
use super::csv::{ColumnType, Field, Schema};
use super::seed::derive_seed;
use super::RunnerError;
use crate::beamforming::{
    overhead_model, s3_baseline, wmmse_centralized, wmmse_decentralized, BeamformingScenario, Role,
    Topology, TopologyKind, WmmseConfig,
};
use crate::consts::{EARTH_RADIUS_KM, SPEED_OF_LIGHT_M_S};
use crate::geometry::{
    delay_doppler_profile, feasibility_mask, link_observables, sample_constellation,
    ConstellationSpec, GroundTerminal,
};
use crate::sensing::{bench, SensingBench};
use crate::waveform::{metrics_sweep_with_speed, required_config, OfdmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    DelayDoppler,
    WaveformSweep,
    WaveformDesign,
    BeamformSweep,
    OverheadSweep,
    SensingMc,
}

impl ExperimentName {
    pub const ALL: [Self; 6] = [
        Self::DelayDoppler,
        Self::WaveformSweep,
        Self::WaveformDesign,
        Self::BeamformSweep,
        Self::OverheadSweep,
        Self::SensingMc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DelayDoppler => "delay-doppler",
            Self::WaveformSweep => "waveform-sweep",
            Self::WaveformDesign => "waveform-design",
            Self::BeamformSweep => "beamform-sweep",
            Self::OverheadSweep => "overhead-sweep",
            Self::SensingMc => "sensing-mc",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::DelayDoppler => {
                "differential delay and Doppler of a random overhead constellation"
            }
            Self::WaveformSweep => "OFDM radar metrics over log-spaced subband spacings",
            Self::WaveformDesign => {
                "largest subband spacing and Doppler interval meeting range/velocity targets"
            }
            Self::BeamformSweep => "mean sum rate of centralized, ring, star and S3 beamforming",
            Self::OverheadSweep => "signaling overhead: reference model and measured ledger",
            Self::SensingMc => "Monte Carlo position RMSE of single, LEF and DFE estimators",
        }
    }

    /// Embedded defaults as a parameter document.
    pub fn default_parameters(self) -> Value {
        match self {
            Self::DelayDoppler => untyped(&DelayDopplerParams::default()),
            Self::WaveformSweep => untyped(&WaveformSweepParams::default()),
            Self::WaveformDesign => untyped(&WaveformDesignParams::default()),
            Self::BeamformSweep => untyped(&BeamformSweepParams::default()),
            Self::OverheadSweep => untyped(&OverheadSweepParams::default()),
            Self::SensingMc => untyped(&SensingBench::default()),
        }
    }

    /// Type-checks and validates a parameter document, returning it in
    /// canonical form.
    pub fn resolve(self, params: Value) -> Result<Value, RunnerError> {
        let s = self.as_str();
        Ok(match self {
            Self::DelayDoppler => untyped(&typed::<DelayDopplerParams>(s, &params)?.validated()?),
            Self::WaveformSweep => untyped(&typed::<WaveformSweepParams>(s, &params)?.validated()?),
            Self::WaveformDesign => {
                untyped(&typed::<WaveformDesignParams>(s, &params)?.validated()?)
            }
            Self::BeamformSweep => untyped(&typed::<BeamformSweepParams>(s, &params)?.validated()?),
            Self::OverheadSweep => untyped(&typed::<OverheadSweepParams>(s, &params)?.validated()?),
            Self::SensingMc => {
                let b = typed::<SensingBench>(s, &params)?;
                b.validate().map_err(|e| invalid(s, e))?;
                untyped(&b)
            }
        })
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = RunnerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| RunnerError::UnknownExperiment {
                name: s.to_string(),
                valid: Self::ALL
                    .iter()
                    .map(|e| e.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }
}

fn invalid(path: &str, err: impl fmt::Display) -> RunnerError {
    RunnerError::InvalidParameter {
        path: path.to_string(),
        message: err.to_string(),
    }
}

/// One CSV file produced by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub schema: Schema,
    pub rows: Vec<Vec<Field>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DelayDopplerParams {
    pub count: usize,
    /// km
    pub altitude: f64,
    /// km/s
    pub speed: f64,
    /// degrees
    pub zenith_min: f64,
    pub zenith_max: f64,
    /// km
    pub earth_radius: f64,
    /// Terminal location, degrees.
    pub ue_lat: f64,
    pub ue_lon: f64,
    /// Hz
    pub fc: f64,
    /// Cyclic prefix, s.
    pub cp: f64,
    /// Subcarrier spacing, Hz.
    pub scs: f64,
    pub doppler_factor: f64,
}

impl Default for DelayDopplerParams {
    fn default() -> Self {
        let c = ConstellationSpec::overhead_cluster(0);
        Self {
            count: c.count,
            altitude: c.altitude,
            speed: c.speed,
            zenith_min: c.zenith_min,
            zenith_max: c.zenith_max,
            earth_radius: EARTH_RADIUS_KM,
            ue_lat: 0.0,
            ue_lon: 0.0,
            fc: 2e9,
            cp: 1.6e-6,
            scs: 60e3,
            doppler_factor: 0.1,
        }
    }
}

impl DelayDopplerParams {
    pub fn constellation(&self, seed: u64) -> ConstellationSpec {
        ConstellationSpec {
            count: self.count,
            altitude: self.altitude,
            speed: self.speed,
            zenith_min: self.zenith_min,
            zenith_max: self.zenith_max,
            earth_radius: self.earth_radius,
            seed,
        }
    }

    fn validated(self) -> Result<Self, RunnerError> {
        let p = "delay-doppler";
        self.constellation(0)
            .validate()
            .map_err(|e| invalid(p, e))?;
        if !(self.fc > 0.0 && self.fc.is_finite()) {
            return Err(invalid(&format!("{p}.fc"), "must be positive"));
        }
        if !(self.earth_radius > 0.0 && self.earth_radius.is_finite()) {
            return Err(invalid(&format!("{p}.earth_radius"), "must be positive"));
        }
        feasibility_mask(&[], self.cp, self.scs, self.doppler_factor).map_err(|e| invalid(p, e))?;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformSweepParams {
    /// Hz
    pub delta_f_min: f64,
    pub delta_f_max: f64,
    pub levels: usize,
    pub fc: f64,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    /// m/s
    pub propagation_speed: f64,
}

impl Default for WaveformSweepParams {
    fn default() -> Self {
        let t = OfdmConfig::default();
        Self {
            delta_f_min: 1e3,
            delta_f_max: 200e3,
            levels: 10,
            fc: t.fc,
            n_subcarriers: t.n_subcarriers,
            n_symbols: t.n_symbols,
            propagation_speed: SPEED_OF_LIGHT_M_S,
        }
    }
}

impl WaveformSweepParams {
    fn template(&self) -> OfdmConfig {
        OfdmConfig {
            fc: self.fc,
            n_subcarriers: self.n_subcarriers,
            n_symbols: self.n_symbols,
            ..OfdmConfig::default()
        }
    }

    fn validated(self) -> Result<Self, RunnerError> {
        metrics_sweep_with_speed(
            self.delta_f_min,
            self.delta_f_max,
            self.levels.min(2),
            &self.template(),
            self.propagation_speed,
        )
        .map_err(|e| invalid("waveform-sweep", e))?;
        if self.levels < 2 {
            return Err(invalid("waveform-sweep.levels", "need at least two levels"));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformDesignParams {
    /// Unambiguous range targets, km.
    pub r_max_km: Vec<f64>,
    /// Unambiguous velocity target, km/s.
    pub v_max_km_s: f64,
    /// Hz
    pub fc: f64,
}

impl Default for WaveformDesignParams {
    fn default() -> Self {
        Self {
            r_max_km: vec![100.0],
            v_max_km_s: 7.5,
            fc: 6.662e9,
        }
    }
}

impl WaveformDesignParams {
    fn validated(self) -> Result<Self, RunnerError> {
        if self.r_max_km.is_empty() {
            return Err(invalid(
                "waveform-design.r_max_km",
                "need at least one target",
            ));
        }
        for (i, &r) in self.r_max_km.iter().enumerate() {
            required_config(r, self.v_max_km_s, self.fc)
                .map_err(|e| invalid(&format!("waveform-design.r_max_km[{i}]"), e))?;
        }
        Ok(self)
    }
}

fn default_schemes() -> Vec<TopologyKind> {
    vec![
        TopologyKind::Centralized,
        TopologyKind::Ring,
        TopologyKind::Star,
        TopologyKind::S3,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamformSweepParams {
    /// Link budget and geometry; its `n_sats` and `n_users` are replaced by
    /// the sweep lists.
    pub scenario: BeamformingScenario,
    pub n_sats: Vec<usize>,
    pub n_users: Vec<usize>,
    pub instances: usize,
    pub schemes: Vec<TopologyKind>,
    pub centralized_iters: usize,
    pub decentralized_iters: usize,
}

impl Default for BeamformSweepParams {
    fn default() -> Self {
        Self {
            scenario: BeamformingScenario::default(),
            n_sats: vec![2, 4],
            n_users: vec![4],
            instances: 20,
            schemes: default_schemes(),
            centralized_iters: WmmseConfig::default().max_iters,
            decentralized_iters: WmmseConfig::decentralized().max_iters,
        }
    }
}

fn check_sweep(
    section: &str,
    scenario: &BeamformingScenario,
    n_sats: &[usize],
    n_users: &[usize],
) -> Result<(), RunnerError> {
    if n_sats.is_empty() || n_users.is_empty() {
        return Err(invalid(section, "n_sats and n_users must be non-empty"));
    }
    for &s in n_sats {
        for &u in n_users {
            BeamformingScenario {
                n_sats: s,
                n_users: u,
                ..scenario.clone()
            }
            .validate()
            .map_err(|e| invalid(&format!("{section}.scenario"), e))?;
        }
    }
    Ok(())
}

impl BeamformSweepParams {
    fn validated(self) -> Result<Self, RunnerError> {
        let p = "beamform-sweep";
        check_sweep(p, &self.scenario, &self.n_sats, &self.n_users)?;
        if self.instances == 0 {
            return Err(invalid(&format!("{p}.instances"), "must be >= 1"));
        }
        if self.schemes.is_empty() {
            return Err(invalid(&format!("{p}.schemes"), "need at least one scheme"));
        }
        if self.centralized_iters == 0 || self.decentralized_iters == 0 {
            return Err(invalid(p, "iteration counts must be >= 1"));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverheadSweepParams {
    pub n_sats: Vec<usize>,
    pub n_users: Vec<usize>,
    /// Also run the decentralized solvers and report their ledgers.
    pub measured: bool,
    pub scenario: BeamformingScenario,
    pub decentralized_iters: usize,
}

impl Default for OverheadSweepParams {
    fn default() -> Self {
        Self {
            n_sats: vec![4, 8, 16],
            n_users: vec![4, 8, 16, 32],
            measured: true,
            scenario: BeamformingScenario::default(),
            decentralized_iters: WmmseConfig::decentralized().max_iters,
        }
    }
}

impl OverheadSweepParams {
    fn validated(self) -> Result<Self, RunnerError> {
        let p = "overhead-sweep";
        check_sweep(p, &self.scenario, &self.n_sats, &self.n_users)?;
        if self.n_sats.iter().any(|&s| s < 2) {
            return Err(invalid(
                &format!("{p}.n_sats"),
                "star topologies need S >= 2",
            ));
        }
        if self.decentralized_iters == 0 {
            return Err(invalid(&format!("{p}.decentralized_iters"), "must be >= 1"));
        }
        Ok(self)
    }
}

/// Runs the experiment and returns its artifacts in output order.
pub(crate) fn execute(spec: &ExperimentSpec) -> Result<Vec<Artifact>, RunnerError> {
    let section = spec.name.as_str();
    let seed = spec.master_seed;
    match spec.name {
        ExperimentName::DelayDoppler => delay_doppler(&typed(section, &spec.parameters)?, seed),
        ExperimentName::WaveformSweep => waveform_sweep(&typed(section, &spec.parameters)?),
        ExperimentName::WaveformDesign => waveform_design(&typed(section, &spec.parameters)?),
        ExperimentName::BeamformSweep => beamform_sweep(&typed(section, &spec.parameters)?, seed),
        ExperimentName::OverheadSweep => overhead_sweep(&typed(section, &spec.parameters)?, seed),
        ExperimentName::SensingMc => sensing_mc(&typed(section, &spec.parameters)?, seed),
    }
}

fn delay_doppler(p: &DelayDopplerParams, seed: u64) -> Result<Vec<Artifact>, RunnerError> {
    let ue = GroundTerminal::from_lat_lon(p.ue_lat, p.ue_lon, p.earth_radius);
    let sats = sample_constellation(&p.constellation(seed), &ue)?;
    let profile = delay_doppler_profile(&sats, &ue, p.fc)?;
    let mask = feasibility_mask(&profile, p.cp, p.scs, p.doppler_factor)?;
    let rows = sats
        .iter()
        .zip(&profile)
        .zip(&mask)
        .map(|((sat, entry), ok)| {
            let zenith = link_observables(sat, &ue, p.fc)?.zenith_angle;
            Ok(vec![
                Field::from(entry.sat_id),
                Field::from(zenith),
                Field::from(entry.differential_delay * 1e6),
                Field::from(entry.doppler),
                Field::from(ok.delay_ok),
                Field::from(ok.doppler_ok),
            ])
        })
        .collect::<Result<_, RunnerError>>()?;
    let schema = Schema::new(&[
        ("sat_id", ColumnType::Int),
        ("zenith_deg", ColumnType::Float),
        ("differential_delay_us", ColumnType::Float),
        ("doppler_hz", ColumnType::Float),
        ("delay_ok", ColumnType::Bool),
        ("doppler_ok", ColumnType::Bool),
    ]);
    Ok(vec![Artifact {
        file_name: "delay_doppler.csv".into(),
        schema,
        rows,
    }])
}

fn waveform_sweep(p: &WaveformSweepParams) -> Result<Vec<Artifact>, RunnerError> {
    let rows = metrics_sweep_with_speed(
        p.delta_f_min,
        p.delta_f_max,
        p.levels,
        &p.template(),
        p.propagation_speed,
    )?
    .into_iter()
    .map(|r| {
        vec![
            Field::from(r.delta_f),
            Field::from(r.metrics.r_max),
            Field::from(r.metrics.delta_r),
            Field::from(r.metrics.v_max),
            Field::from(r.metrics.delta_v),
        ]
    })
    .collect();
    let schema = Schema::new(&[
        ("delta_f_hz", ColumnType::Float),
        ("r_max_km", ColumnType::Float),
        ("delta_r_km", ColumnType::Float),
        ("v_max_km_s", ColumnType::Float),
        ("delta_v_m_s", ColumnType::Float),
    ]);
    Ok(vec![Artifact {
        file_name: "waveform_sweep.csv".into(),
        schema,
        rows,
    }])
}

fn waveform_design(p: &WaveformDesignParams) -> Result<Vec<Artifact>, RunnerError> {
    let rows = p
        .r_max_km
        .iter()
        .map(|&r| {
            let b = required_config(r, p.v_max_km_s, p.fc)?;
            Ok(vec![
                Field::from(r),
                Field::from(p.v_max_km_s),
                Field::from(p.fc),
                Field::from(b.delta_f_max),
                Field::from(b.t_pri_max),
            ])
        })
        .collect::<Result<_, RunnerError>>()?;
    let schema = Schema::new(&[
        ("r_max_km", ColumnType::Float),
        ("v_max_km_s", ColumnType::Float),
        ("fc_hz", ColumnType::Float),
        ("delta_f_max_hz", ColumnType::Float),
        ("t_pri_max_s", ColumnType::Float),
    ]);
    Ok(vec![Artifact {
        file_name: "waveform_design.csv".into(),
        schema,
        rows,
    }])
}

/// Sum rate and rate trace of one scheme on one instance.
fn run_scheme(
    kind: TopologyKind,
    inst: &crate::beamforming::Instance,
    centralized: &WmmseConfig,
    decentralized: &WmmseConfig,
) -> Result<(f64, Vec<f64>), RunnerError> {
    let (stats, noise, powers) = (&inst.stats, &inst.noise, &inst.powers[..]);
    Ok(match kind {
        TopologyKind::Centralized => {
            let out = wmmse_centralized(stats, noise, powers, centralized)?;
            (out.sum_rate(), out.rate_trace)
        }
        TopologyKind::Ring | TopologyKind::Star => {
            let topo = if kind == TopologyKind::Ring {
                Topology::ring(stats.n_sats())
            } else {
                Topology::star(0)
            };
            let out = wmmse_decentralized(&topo, stats, noise, powers, decentralized)?;
            (out.sum_rate(), out.rate_trace)
        }
        TopologyKind::S3 => {
            let out = s3_baseline(stats, noise, powers, centralized)?;
            (out.sum_rate(), Vec::new())
        }
    })
}

fn beamform_sweep(p: &BeamformSweepParams, seed: u64) -> Result<Vec<Artifact>, RunnerError> {
    let centralized = WmmseConfig {
        max_iters: p.centralized_iters,
        ..WmmseConfig::default()
    };
    let decentralized = WmmseConfig {
        max_iters: p.decentralized_iters,
        ..WmmseConfig::decentralized()
    };
    let mut rows = Vec::new();
    let mut trace_rows = Vec::new();
    for &s in &p.n_sats {
        for &u in &p.n_users {
            let scenario = BeamformingScenario {
                n_sats: s,
                n_users: u,
                ..p.scenario.clone()
            };
            let per_instance: Vec<Result<Vec<(f64, Vec<f64>)>, RunnerError>> = (0..p.instances
                as u64)
                .into_par_iter()
                .map(|i| {
                    let inst = scenario.instance(derive_seed(seed, "beamform-instance", i))?;
                    p.schemes
                        .iter()
                        .map(|&k| run_scheme(k, &inst, &centralized, &decentralized))
                        .collect()
                })
                .collect();
            let mut sums = vec![0.0; p.schemes.len()];
            for (i, outcome) in per_instance.into_iter().enumerate() {
                for (k, (rate, trace)) in outcome?.into_iter().enumerate() {
                    sums[k] += rate;
                    for (it, r) in trace.into_iter().enumerate() {
                        trace_rows.push(vec![
                            Field::from(p.schemes[k].as_str()),
                            Field::from(s),
                            Field::from(u),
                            Field::from(i),
                            Field::from(it + 1),
                            Field::from(r),
                        ]);
                    }
                }
            }
            for (k, kind) in p.schemes.iter().enumerate() {
                rows.push(vec![
                    Field::from(kind.as_str()),
                    Field::from(s),
                    Field::from(u),
                    Field::from(sums[k] / p.instances as f64),
                ]);
            }
        }
    }
    let schema = Schema::new(&[
        ("scheme", ColumnType::Text),
        ("S", ColumnType::Int),
        ("U", ColumnType::Int),
        ("sum_rate_bps", ColumnType::Float),
    ]);
    let trace_schema = Schema::new(&[
        ("scheme", ColumnType::Text),
        ("S", ColumnType::Int),
        ("U", ColumnType::Int),
        ("instance", ColumnType::Int),
        ("iteration", ColumnType::Int),
        ("sum_rate_bps", ColumnType::Float),
    ]);
    Ok(vec![
        Artifact {
            file_name: "beamform_sweep.csv".into(),
            schema,
            rows,
        },
        Artifact {
            file_name: "beamform_traces.csv".into(),
            schema: trace_schema,
            rows: trace_rows,
        },
    ])
}

fn overhead_schema(with_hops: bool) -> Schema {
    let mut cols = vec![
        ("topology", ColumnType::Text),
        ("role", ColumnType::Text),
        ("S", ColumnType::Int),
        ("U", ColumnType::Int),
        ("overhead_count", ColumnType::Int),
    ];
    if with_hops {
        cols.push(("hops", ColumnType::Int));
    }
    Schema::new(&cols)
}

fn overhead_sweep(p: &OverheadSweepParams, seed: u64) -> Result<Vec<Artifact>, RunnerError> {
    let series = [
        (TopologyKind::Ring, Role::Edge),
        (TopologyKind::Star, Role::Edge),
        (TopologyKind::Star, Role::Central),
    ];
    let mut model_rows = Vec::new();
    for &s in &p.n_sats {
        for &u in &p.n_users {
            for (kind, role) in series {
                let count = overhead_model(kind, role, s as u64, u as u64)?;
                model_rows.push(vec![
                    Field::from(kind.as_str()),
                    Field::from(role.as_str()),
                    Field::from(s),
                    Field::from(u),
                    Field::from(count),
                ]);
            }
        }
    }
    let mut artifacts = vec![Artifact {
        file_name: "overhead_model.csv".into(),
        schema: overhead_schema(false),
        rows: model_rows,
    }];
    if p.measured {
        let cfg = WmmseConfig {
            max_iters: p.decentralized_iters,
            ..WmmseConfig::decentralized()
        };
        let mut rows = Vec::new();
        for &s in &p.n_sats {
            for &u in &p.n_users {
                let scenario = BeamformingScenario {
                    n_sats: s,
                    n_users: u,
                    ..p.scenario.clone()
                };
                let inst = scenario.instance(derive_seed(seed, "overhead-instance", 0))?;
                let (stats, noise, powers) = (&inst.stats, &inst.noise, &inst.powers[..]);
                let ring =
                    wmmse_decentralized(&Topology::ring(s), stats, noise, powers, &cfg)?.ledger;
                let star =
                    wmmse_decentralized(&Topology::star(0), stats, noise, powers, &cfg)?.ledger;
                let ring_node = (0..s).map(|n| ring.node_total(n)).max().unwrap_or(0);
                let star_edge = (1..s).map(|n| star.node_total(n)).max().unwrap_or(0);
                for (kind, role, count, hops) in [
                    (TopologyKind::Ring, Role::Edge, ring_node, ring.hops),
                    (TopologyKind::Star, Role::Edge, star_edge, star.hops),
                    (
                        TopologyKind::Star,
                        Role::Central,
                        star.node_total(0),
                        star.hops,
                    ),
                ] {
                    rows.push(vec![
                        Field::from(kind.as_str()),
                        Field::from(role.as_str()),
                        Field::from(s),
                        Field::from(u),
                        Field::from(count),
                        Field::from(hops),
                    ]);
                }
            }
        }
        artifacts.push(Artifact {
            file_name: "overhead_measured.csv".into(),
            schema: overhead_schema(true),
            rows,
        });
    }
    Ok(artifacts)
}

fn sensing_mc(b: &SensingBench, seed: u64) -> Result<Vec<Artifact>, RunnerError> {
    let mut rows = Vec::new();
    for &n in &b.n_antennas {
        for r in bench(b, n, b.trials, seed)? {
            rows.push(vec![
                Field::from(r.estimator.as_str()),
                Field::from(r.n_antennas),
                Field::from(r.trials),
                Field::from(r.rmse_over_delta_r),
                Field::from(r.discarded),
            ]);
        }
    }
    let schema = Schema::new(&[
        ("estimator", ColumnType::Text),
        ("n_antennas", ColumnType::Int),
        ("trials", ColumnType::Int),
        ("rmse_over_delta_r", ColumnType::Float),
        ("discarded", ColumnType::Int),
    ]);
    Ok(vec![Artifact {
        file_name: "sensing_mc.csv".into(),
        schema,
        rows,
    }])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in ExperimentName::ALL {
            assert_eq!(e.as_str().parse::<ExperimentName>().unwrap(), e);
            assert_eq!(
                serde_json::to_value(e).unwrap(),
                Value::String(e.as_str().into())
            );
        }
    }

    #[test]
    fn defaults_resolve_to_themselves() {
        for e in ExperimentName::ALL {
            let d = e.default_parameters();
            assert_eq!(e.resolve(d.clone()).unwrap(), d, "{e}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        let bad = [
            (
                ExperimentName::DelayDoppler,
                serde_json::json!({"zenith_max": 0.0}),
            ),
            (
                ExperimentName::DelayDoppler,
                serde_json::json!({"cp": -1.0}),
            ),
            (
                ExperimentName::WaveformSweep,
                serde_json::json!({"levels": 1}),
            ),
            (
                ExperimentName::WaveformSweep,
                serde_json::json!({"delta_f_min": 5e5}),
            ),
            (
                ExperimentName::WaveformDesign,
                serde_json::json!({"r_max_km": []}),
            ),
            (
                ExperimentName::BeamformSweep,
                serde_json::json!({"instances": 0}),
            ),
            (
                ExperimentName::BeamformSweep,
                serde_json::json!({"schemes": ["mesh"]}),
            ),
            (
                ExperimentName::OverheadSweep,
                serde_json::json!({"n_sats": [1]}),
            ),
            (
                ExperimentName::SensingMc,
                serde_json::json!({"n_antennas": [0]}),
            ),
        ];
        for (e, patch) in bad {
            let mut p = e.default_parameters();
            super::super::config::merge(&mut p, patch.clone());
            assert!(e.resolve(p).is_err(), "{e} accepted {patch}");
        }
    }

    #[test]
    fn model_overhead_rows() {
        let p = OverheadSweepParams {
            measured: false,
            ..OverheadSweepParams::default()
        };
        let a = overhead_sweep(&p, 0).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].rows.len(), 3 * 4 * 3);
        assert!(a[0].rows.contains(&vec![
            Field::from("star"),
            Field::from("central"),
            Field::from(16usize),
            Field::from(32usize),
            Field::from(16711680u64),
        ]));
    }
}
