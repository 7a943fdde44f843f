//! Scenario runners: population traces, duration sweeps, the (σ, δt)
//! robustness grid and pulse previews.
//!
//! Sweep and grid points are independent and run on a rayon pool; results
//! are always ordered by point index.

use serde::{Deserialize, Serialize};

use crate::hamiltonian::{eigenframe, CorrectionSource, HamiltonianTrajectory, Level};
use crate::propagator::{
    max_intermediate_population, propagate, PropagationConfig, StateVector, TraceRecord,
};
use crate::pulses::{
    angular_from_mhz, sample_correction, sample_envelope, CorrectionParams, PulseFamily,
    PulseParams,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    PopulationTrace,
    EfficiencyVsDuration,
    RobustnessGrid,
    PulsePreview,
}

impl ScenarioKind {
    pub fn slug(self) -> &'static str {
        match self {
            ScenarioKind::PopulationTrace => "trace",
            ScenarioKind::EfficiencyVsDuration => "sweep",
            ScenarioKind::RobustnessGrid => "grid",
            ScenarioKind::PulsePreview => "pulses",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "stirap")]
    Stirap,
    #[serde(rename = "sa")]
    SaStirap,
    #[serde(rename = "exact-cd")]
    StirapPlusExactCd,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Stirap => "stirap",
            Protocol::SaStirap => "sa",
            Protocol::StirapPlusExactCd => "exact-cd",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "stirap" => Some(Protocol::Stirap),
            "sa" => Some(Protocol::SaStirap),
            "exact-cd" => Some(Protocol::StirapPlusExactCd),
            _ => None,
        }
    }

    /// Hamiltonian for this protocol with a correction matched to `pulse`.
    pub fn trajectory(
        self,
        pulse: PulseParams,
        correction: Option<CorrectionParams>,
    ) -> Result<HamiltonianTrajectory> {
        Ok(match self {
            Protocol::Stirap => HamiltonianTrajectory::stirap(pulse),
            Protocol::SaStirap => {
                let corr = correction.ok_or_else(|| {
                    Error::InvalidScenario("sa protocol requires correction parameters".into())
                })?;
                HamiltonianTrajectory::total(pulse, corr)
            }
            Protocol::StirapPlusExactCd => HamiltonianTrajectory::stirap_plus_exact_cd(pulse),
        })
    }
}

/// Ties σ and δt to the protocol duration when the duration changes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeScaling {
    pub sigma_over_duration: Option<f64>,
    pub delta_t_over_duration: Option<f64>,
}

impl TimeScaling {
    pub fn apply(&self, pulse: PulseParams, duration: f64) -> PulseParams {
        let mut out = pulse.with_duration(duration);
        if let Some(r) = self.sigma_over_duration {
            out.sigma = r * duration;
        }
        if let Some(r) = self.delta_t_over_duration {
            out.delta_t = r * duration;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DurationSweep {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub protocols: Vec<Protocol>,
}

impl DurationSweep {
    pub fn durations(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.points)
    }
}

/// (σ, δt) grid with `T = 6σ + 2δt` and a correction frozen at one reference point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSweep {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_points: usize,
    pub delta_t_points: usize,
    /// δt runs over `[0, delta_t_max_over_sigma · σ]` for each σ.
    pub delta_t_max_over_sigma: f64,
    pub reference_sigma: f64,
    pub reference_delta_t: f64,
}

impl Default for RobustnessSweep {
    fn default() -> Self {
        RobustnessSweep {
            sigma_min: 0.2,
            sigma_max: 1.0,
            sigma_points: 9,
            delta_t_points: 9,
            delta_t_max_over_sigma: 2.0,
            reference_sigma: 0.6,
            reference_delta_t: 0.6,
        }
    }
}

pub fn grid_duration(sigma: f64, delta_t: f64) -> f64 {
    6.0 * sigma + 2.0 * delta_t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Sweep {
    Duration(DurationSweep),
    Robustness(RobustnessSweep),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|−1⟩` for Gaussian pulses, the t = 0 dark state otherwise.
    #[default]
    FamilyDefault,
    Level(Level),
    DarkAtStart,
    Custom(StateVector),
}

impl InitialState {
    pub fn resolve(&self, pulse: &PulseParams) -> Result<StateVector> {
        match self {
            InitialState::FamilyDefault => match pulse.family {
                PulseFamily::Gaussian => Ok(StateVector::basis(Level::Minus)),
                _ => Ok(eigenframe(pulse, 0.0)?.dark),
            },
            InitialState::Level(level) => Ok(StateVector::basis(*level)),
            InitialState::DarkAtStart => Ok(eigenframe(pulse, 0.0)?.dark),
            InitialState::Custom(v) => Ok(*v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub pulse: PulseParams,
    #[serde(default)]
    pub scaling: TimeScaling,
    pub correction: Option<CorrectionParams>,
    pub protocol: Protocol,
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub initial_state: InitialState,
    pub propagation: PropagationConfig,
    /// Worker threads for sweeps; 0 uses all cores.
    pub workers: usize,
    pub preview_points: usize,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, pulse: PulseParams, protocol: Protocol) -> Self {
        ScenarioSpec {
            kind,
            pulse,
            scaling: TimeScaling::default(),
            correction: None,
            protocol,
            sweep: None,
            initial_state: InitialState::FamilyDefault,
            propagation: PropagationConfig::default(),
            workers: 0,
            preview_points: 401,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.kind != ScenarioKind::RobustnessGrid {
            self.pulse.validate()?;
        }
        if let Some(corr) = &self.correction {
            corr.validate()?;
        }
        let needs_correction = match self.kind {
            ScenarioKind::PopulationTrace => self.protocol == Protocol::SaStirap,
            ScenarioKind::EfficiencyVsDuration => match &self.sweep {
                Some(Sweep::Duration(s)) => s.protocols.contains(&Protocol::SaStirap),
                _ => false,
            },
            ScenarioKind::RobustnessGrid => true,
            ScenarioKind::PulsePreview => false,
        };
        if needs_correction && self.correction.is_none() {
            return bad("sa-STIRAP requires correction parameters (delta != 0)".into());
        }
        match (self.kind, &self.sweep) {
            (ScenarioKind::EfficiencyVsDuration, Some(Sweep::Duration(s))) => {
                if s.points == 0 || s.protocols.is_empty() {
                    return bad("empty sweep range".into());
                }
                if !(s.t_min > 0.0 && s.t_max >= s.t_min && s.t_max.is_finite()) {
                    return bad(format!(
                        "sweep range requires 0 < T_min <= T_max (got {}..{})",
                        s.t_min, s.t_max
                    ));
                }
            }
            (ScenarioKind::EfficiencyVsDuration, _) => {
                return bad("duration sweep requires a T sweep axis".into())
            }
            (ScenarioKind::RobustnessGrid, Some(Sweep::Robustness(g))) => {
                if self.pulse.family != PulseFamily::Gaussian {
                    return bad("robustness grid requires the Gaussian family".into());
                }
                if g.sigma_points == 0 || g.delta_t_points == 0 {
                    return bad("empty sweep range".into());
                }
                if !(g.sigma_min > 0.0 && g.sigma_max >= g.sigma_min) {
                    return bad("robustness grid requires 0 < sigma_min <= sigma_max".into());
                }
                if !(g.delta_t_max_over_sigma >= 0.0
                    && g.reference_sigma > 0.0
                    && g.reference_delta_t >= 0.0)
                {
                    return bad(
                        "robustness grid delta_t range and reference must be non-negative".into(),
                    );
                }
            }
            (ScenarioKind::RobustnessGrid, _) => {
                if self.pulse.family != PulseFamily::Gaussian {
                    return bad("robustness grid requires the Gaussian family".into());
                }
                return bad("robustness grid requires (sigma, delta_t) axes".into());
            }
            _ => {}
        }
        Ok(())
    }

    fn require(&self, kind: ScenarioKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidScenario(format!(
                "expected a {:?} scenario, got {:?}",
                kind, self.kind
            )));
        }
        self.validate()
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidScenario(format!("worker pool: {e}")))
    }
}

pub fn run_population_trace(spec: &ScenarioSpec) -> Result<TraceRecord> {
    spec.require(ScenarioKind::PopulationTrace)?;
    let traj = spec.protocol.trajectory(spec.pulse, spec.correction)?;
    let initial = spec.initial_state.resolve(&spec.pulse)?;
    propagate(&traj, &initial, &spec.propagation)
}

/// Named coordinate array.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Results of one protocol over every sweep cell, row-major in `SweepRecord::shape`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolSeries {
    pub protocol: Protocol,
    pub efficiency: Vec<f64>,
    pub max_intermediate: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub kind: ScenarioKind,
    pub axes: Vec<Axis>,
    pub shape: Vec<usize>,
    /// Per-cell coordinate column names, e.g. `["T_us"]`.
    pub columns: Vec<String>,
    /// Per-cell coordinates, one row per cell, matching `columns`.
    pub points: Vec<Vec<f64>>,
    pub series: Vec<ProtocolSeries>,
    pub metadata: serde_json::Value,
}

impl SweepRecord {
    pub fn cell_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn series(&self, protocol: Protocol) -> Option<&ProtocolSeries> {
        self.series.iter().find(|s| s.protocol == protocol)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn metadata(spec: &ScenarioSpec) -> serde_json::Value {
    serde_json::to_value(spec).unwrap_or(serde_json::Value::Null)
}

/// Runs `jobs` on the pool and returns `(efficiency, max_intermediate)` in job order.
fn run_jobs(spec: &ScenarioSpec, jobs: Vec<SweepJob>) -> Result<Vec<(f64, f64)>> {
    use rayon::prelude::*;
    let pool = spec.pool()?;
    pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let rec = propagate(&job.trajectory, &job.initial, &spec.propagation)?;
                Ok((rec.efficiency, max_intermediate_population(&rec)))
            })
            .collect()
    })
}

fn split_series(
    protocols: &[Protocol],
    results: Vec<(f64, f64)>,
    cells: usize,
) -> Vec<ProtocolSeries> {
    protocols
        .iter()
        .enumerate()
        .map(|(i, &protocol)| {
            let chunk = &results[i * cells..(i + 1) * cells];
            ProtocolSeries {
                protocol,
                efficiency: chunk.iter().map(|r| r.0).collect(),
                max_intermediate: chunk.iter().map(|r| r.1).collect(),
            }
        })
        .collect()
}

/// One propagation of a sweep.
#[derive(Clone, Debug)]
pub struct SweepJob {
    pub protocol: Protocol,
    pub trajectory: HamiltonianTrajectory,
    pub initial: StateVector,
}

/// Propagations of a duration sweep or robustness grid, protocol-major then
/// cell order, exactly as the runners execute them.
pub fn sweep_jobs(spec: &ScenarioSpec) -> Result<Vec<SweepJob>> {
    spec.validate()?;
    match &spec.sweep {
        Some(Sweep::Duration(sweep)) if spec.kind == ScenarioKind::EfficiencyVsDuration => {
            let durations = sweep.durations();
            let mut jobs = Vec::with_capacity(durations.len() * sweep.protocols.len());
            for &protocol in &sweep.protocols {
                for &duration in &durations {
                    let pulse = spec.scaling.apply(spec.pulse, duration);
                    jobs.push(SweepJob {
                        protocol,
                        trajectory: protocol.trajectory(pulse, spec.correction)?,
                        initial: spec.initial_state.resolve(&pulse)?,
                    });
                }
            }
            Ok(jobs)
        }
        Some(Sweep::Robustness(grid)) if spec.kind == ScenarioKind::RobustnessGrid => {
            let corr = spec.correction.expect("validated above");
            let reference = grid_pulse(
                spec.pulse.omega0,
                grid.reference_sigma,
                grid.reference_delta_t,
            );
            reference.validate()?;
            let cells = grid_cells(grid);
            let mut jobs = Vec::with_capacity(2 * cells.len());
            for protocol in GRID_PROTOCOLS {
                for p in &cells {
                    let pulse = grid_pulse(spec.pulse.omega0, p[0], p[1]);
                    let trajectory = match protocol {
                        Protocol::SaStirap => HamiltonianTrajectory::total_with(
                            pulse,
                            CorrectionSource::centered(reference, corr, pulse.duration),
                        ),
                        _ => HamiltonianTrajectory::stirap(pulse),
                    };
                    jobs.push(SweepJob {
                        protocol,
                        trajectory,
                        initial: spec.initial_state.resolve(&pulse)?,
                    });
                }
            }
            Ok(jobs)
        }
        _ => Err(Error::InvalidScenario(format!(
            "{:?} scenario has no sweep jobs",
            spec.kind
        ))),
    }
}

pub fn run_efficiency_sweep(spec: &ScenarioSpec) -> Result<SweepRecord> {
    spec.require(ScenarioKind::EfficiencyVsDuration)?;
    let Some(Sweep::Duration(sweep)) = &spec.sweep else {
        unreachable!("validated above");
    };
    let durations = sweep.durations();
    let results = run_jobs(spec, sweep_jobs(spec)?)?;
    Ok(SweepRecord {
        kind: ScenarioKind::EfficiencyVsDuration,
        shape: vec![durations.len()],
        columns: vec!["T_us".into()],
        points: durations.iter().map(|&t| vec![t]).collect(),
        series: split_series(&sweep.protocols, results, durations.len()),
        axes: vec![Axis {
            name: "T_us".into(),
            values: durations,
        }],
        metadata: metadata(spec),
    })
}

/// Gaussian pulse pair of a grid cell.
pub fn grid_pulse(omega0: f64, sigma: f64, delta_t: f64) -> PulseParams {
    PulseParams::gaussian(omega0, grid_duration(sigma, delta_t), sigma, delta_t)
}

const GRID_PROTOCOLS: [Protocol; 2] = [Protocol::Stirap, Protocol::SaStirap];

fn grid_axes(grid: &RobustnessSweep) -> (Vec<f64>, Vec<f64>) {
    (
        linspace(grid.sigma_min, grid.sigma_max, grid.sigma_points),
        linspace(0.0, grid.delta_t_max_over_sigma, grid.delta_t_points),
    )
}

/// `[σ, δt, T]` per cell, σ-major.
fn grid_cells(grid: &RobustnessSweep) -> Vec<Vec<f64>> {
    let (sigmas, ratios) = grid_axes(grid);
    let mut cells = Vec::with_capacity(sigmas.len() * ratios.len());
    for &sigma in &sigmas {
        for &ratio in &ratios {
            let delta_t = ratio * sigma;
            cells.push(vec![sigma, delta_t, grid_duration(sigma, delta_t)]);
        }
    }
    cells
}

pub fn run_robustness_grid(spec: &ScenarioSpec) -> Result<SweepRecord> {
    spec.require(ScenarioKind::RobustnessGrid)?;
    let Some(Sweep::Robustness(grid)) = &spec.sweep else {
        unreachable!("validated above");
    };
    let (sigmas, ratios) = grid_axes(grid);
    let points = grid_cells(grid);
    let results = run_jobs(spec, sweep_jobs(spec)?)?;
    Ok(SweepRecord {
        kind: ScenarioKind::RobustnessGrid,
        shape: vec![sigmas.len(), ratios.len()],
        columns: vec!["sigma_us".into(), "delta_t_us".into(), "T_us".into()],
        series: split_series(&GRID_PROTOCOLS, results, points.len()),
        points,
        axes: vec![
            Axis {
                name: "sigma_us".into(),
                values: sigmas,
            },
            Axis {
                name: "delta_t_over_sigma".into(),
                values: ratios,
            },
        ],
        metadata: metadata(spec),
    })
}

/// Envelope samples on a uniform grid, angular units (rad/μs).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreviewTable {
    pub times: Vec<f64>,
    pub omega_s: Vec<f64>,
    pub omega_p: Vec<f64>,
    /// `|Ω_a| = |Ω_b|`; absent when no detuning is configured.
    pub abs_omega_a: Option<Vec<f64>>,
    pub metadata: serde_json::Value,
}

pub fn run_pulse_preview(spec: &ScenarioSpec) -> Result<PreviewTable> {
    spec.require(ScenarioKind::PulsePreview)?;
    let times = linspace(0.0, spec.pulse.duration, spec.preview_points.max(2));
    let mut omega_s = Vec::with_capacity(times.len());
    let mut omega_p = Vec::with_capacity(times.len());
    for &t in &times {
        let env = sample_envelope(&spec.pulse, t)?;
        omega_s.push(env.omega_s);
        omega_p.push(env.omega_p);
    }
    let abs_omega_a = match &spec.correction {
        Some(corr) => Some(
            times
                .iter()
                .map(|&t| sample_correction(&spec.pulse, corr, t).map(|c| c.omega_a.norm()))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(PreviewTable {
        times,
        omega_s,
        omega_p,
        abs_omega_a,
        metadata: metadata(spec),
    })
}

/// Gaussian settings of the fast-transfer study: `Ω₀/2π = 2 MHz`,
/// `Δ/2π = 3 MHz`, `δt = T/10`, `σ = T/6`.
pub mod presets {
    use super::*;

    pub const OMEGA0_MHZ: f64 = 2.0;
    pub const DELTA_MHZ: f64 = 3.0;
    pub const DELTA_T_OVER_DURATION: f64 = 0.1;
    pub const SIGMA_OVER_DURATION: f64 = 1.0 / 6.0;

    pub fn gaussian_pulse(duration: f64) -> PulseParams {
        PulseParams::gaussian(
            angular_from_mhz(OMEGA0_MHZ),
            duration,
            SIGMA_OVER_DURATION * duration,
            DELTA_T_OVER_DURATION * duration,
        )
    }

    pub fn gaussian_scaling() -> TimeScaling {
        TimeScaling {
            sigma_over_duration: Some(SIGMA_OVER_DURATION),
            delta_t_over_duration: Some(DELTA_T_OVER_DURATION),
        }
    }

    pub fn correction() -> CorrectionParams {
        CorrectionParams::new(angular_from_mhz(DELTA_MHZ))
    }

    pub fn gaussian_trace(duration: f64, protocol: Protocol) -> ScenarioSpec {
        let mut spec = ScenarioSpec::new(
            ScenarioKind::PopulationTrace,
            gaussian_pulse(duration),
            protocol,
        );
        spec.scaling = gaussian_scaling();
        spec.correction = Some(correction());
        spec
    }

    pub fn gaussian_sweep(t_min: f64, t_max: f64, points: usize) -> ScenarioSpec {
        let mut spec = gaussian_trace(t_min, Protocol::SaStirap);
        spec.kind = ScenarioKind::EfficiencyVsDuration;
        spec.sweep = Some(Sweep::Duration(DurationSweep {
            t_min,
            t_max,
            points,
            protocols: vec![Protocol::Stirap, Protocol::SaStirap],
        }));
        spec
    }

    pub fn robustness_grid() -> ScenarioSpec {
        let grid = RobustnessSweep::default();
        let reference = grid_pulse(
            angular_from_mhz(OMEGA0_MHZ),
            grid.reference_sigma,
            grid.reference_delta_t,
        );
        let mut spec =
            ScenarioSpec::new(ScenarioKind::RobustnessGrid, reference, Protocol::SaStirap);
        spec.correction = Some(correction());
        spec.sweep = Some(Sweep::Robustness(grid));
        spec
    }
}
