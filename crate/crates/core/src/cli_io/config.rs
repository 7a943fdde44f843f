//! TOML run configuration.
//!
//! ```toml
//! family = "gaussian"
//! protocol = "sa"          # stirap | sa | exact-cd
//! omega0_mhz = 2.0         # Ω₀/2π
//! T_us = 2.0
//! dt_over_T = 0.1          # or delta_t_us
//! sigma_over_T = 0.1666666666666667  # or sigma_us
//! delta_mhz = 3.0          # Δ/2π
//!
//! [sweep]                  # `sweep` subcommand
//! T_min_us = 0.5
//! T_max_us = 6.0
//! points = 24
//!
//! [grid]                   # `grid` subcommand, all optional
//! sigma_points = 9
//! ```
//!
//! Unknown keys are errors. Every problem found is reported at once.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{
    grid_pulse, DurationSweep, InitialState, Protocol, RobustnessSweep, ScenarioKind, ScenarioSpec,
    Sweep, TimeScaling,
};
use crate::hamiltonian::Level;
use crate::propagator::{Method, PropagationConfig};
use crate::pulses::{angular_from_mhz, CorrectionParams, PulseFamily, PulseParams};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(rename = "T_min_us", skip_serializing_if = "Option::is_none")]
    pub t_min_us: Option<f64>,
    #[serde(rename = "T_max_us", skip_serializing_if = "Option::is_none")]
    pub t_max_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocols: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_t_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_t_max_over_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_sigma_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_delta_t_us: Option<f64>,
}

/// On-disk configuration, user units. Also the resolved echo written to metadata.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_mhz: Option<f64>,
    #[serde(rename = "T_us", skip_serializing_if = "Option::is_none")]
    pub t_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_us: Option<f64>,
    #[serde(rename = "sigma_over_T", skip_serializing_if = "Option::is_none")]
    pub sigma_over_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_t_us: Option<f64>,
    #[serde(rename = "dt_over_T", skip_serializing_if = "Option::is_none")]
    pub dt_over_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_a_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preview_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

/// Command-line overrides; any `Some` replaces the file value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub family: Option<String>,
    pub protocol: Option<String>,
    pub omega0_mhz: Option<f64>,
    pub t_us: Option<f64>,
    pub delta_mhz: Option<f64>,
    pub steps: Option<usize>,
    pub method: Option<String>,
    pub initial_state: Option<String>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub csv: Option<bool>,
    pub plot: Option<bool>,
}

impl Overrides {
    pub fn apply(&self, file: &mut ConfigFile) {
        fn set<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
            if value.is_some() {
                slot.clone_from(value);
            }
        }
        set(&mut file.family, &self.family);
        set(&mut file.protocol, &self.protocol);
        set(&mut file.omega0_mhz, &self.omega0_mhz);
        set(&mut file.t_us, &self.t_us);
        set(&mut file.delta_mhz, &self.delta_mhz);
        set(&mut file.steps, &self.steps);
        set(&mut file.method, &self.method);
        set(&mut file.initial_state, &self.initial_state);
        set(&mut file.workers, &self.workers);
        set(&mut file.output_dir, &self.output_dir);
        set(&mut file.csv, &self.csv);
        set(&mut file.plot, &self.plot);
    }
}

/// Fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub output_dir: PathBuf,
    pub csv: bool,
    pub plot: bool,
    /// Input with every default filled in, in user units.
    pub resolved: ConfigFile,
}

pub fn parse_config(
    kind: ScenarioKind,
    path: Option<&Path>,
    overrides: &Overrides,
) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    parse_with_overrides(kind, &text, overrides)
}

pub fn parse_config_str(kind: ScenarioKind, text: &str) -> Result<RunConfig> {
    parse_with_overrides(kind, text, &Overrides::default())
}

fn parse_with_overrides(
    kind: ScenarioKind,
    text: &str,
    overrides: &Overrides,
) -> Result<RunConfig> {
    let mut file: ConfigFile =
        toml::from_str(text).map_err(|e| Error::Config(vec![e.message().to_string()]))?;
    overrides.apply(&mut file);
    resolve(kind, file)
}

/// Resolved configuration as TOML; parsing it again gives the same `RunConfig`.
pub fn emit_config(config: &RunConfig) -> String {
    toml::to_string(&config.resolved).expect("config echo is always serializable")
}

fn parse_family(name: &str) -> Option<PulseFamily> {
    match name {
        "gaussian" => Some(PulseFamily::Gaussian),
        "exponential" => Some(PulseFamily::Exponential),
        "trigonometric" => Some(PulseFamily::Trigonometric),
        _ => None,
    }
}

fn parse_protocol(name: &str) -> Option<Protocol> {
    match name {
        "sa_stirap" | "sa-stirap" => Some(Protocol::SaStirap),
        "exact_cd" => Some(Protocol::StirapPlusExactCd),
        other => Protocol::parse(other),
    }
}

fn parse_method(name: &str) -> Option<Method> {
    match name {
        "magnus4" => Some(Method::Magnus4),
        "midpoint" => Some(Method::MidpointExponential),
        "rk4" => Some(Method::Rk4),
        _ => None,
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Magnus4 => "magnus4",
        Method::MidpointExponential => "midpoint",
        Method::Rk4 => "rk4",
    }
}

fn parse_initial(name: &str) -> Option<(InitialState, &'static str)> {
    match name {
        "default" => Some((InitialState::FamilyDefault, "default")),
        "m1" | "minus" => Some((InitialState::Level(Level::Minus), "m1")),
        "p1" | "plus" => Some((InitialState::Level(Level::Plus), "p1")),
        "0" | "zero" => Some((InitialState::Level(Level::Zero), "0")),
        "dark" => Some((InitialState::DarkAtStart, "dark")),
        _ => None,
    }
}

/// Collects problems instead of failing on the first one.
#[derive(Default)]
struct Problems {
    missing: Vec<&'static str>,
    invalid: Vec<String>,
}

impl Problems {
    fn require<T: Copy>(&mut self, value: Option<T>, name: &'static str) -> Option<T> {
        if value.is_none() {
            self.missing.push(name);
        }
        value
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.invalid.push(message());
        }
    }

    fn finish(self) -> Result<()> {
        let mut all = Vec::new();
        if !self.missing.is_empty() {
            all.push(format!(
                "missing required field(s): {}",
                self.missing.join(", ")
            ));
        }
        all.extend(self.invalid);
        if all.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(all))
        }
    }
}

/// Either an absolute width or a fraction of T; exactly one may be given.
fn width(
    p: &mut Problems,
    absolute: Option<f64>,
    ratio: Option<f64>,
    names: (&'static str, &'static str),
) -> Option<(Option<f64>, Option<f64>)> {
    match (absolute, ratio) {
        (Some(_), Some(_)) => {
            p.invalid
                .push(format!("give only one of {} and {}", names.0, names.1));
            None
        }
        (None, None) => {
            p.missing.push(names.0);
            None
        }
        pair => Some(pair),
    }
}

fn resolve(kind: ScenarioKind, mut file: ConfigFile) -> Result<RunConfig> {
    let mut p = Problems::default();

    if kind == ScenarioKind::RobustnessGrid && file.family.is_none() {
        file.family = Some("gaussian".into());
    }
    let family = match &file.family {
        Some(name) => {
            let f = parse_family(name);
            p.check(f.is_some(), || {
                format!("family must be gaussian, exponential or trigonometric (got {name:?})")
            });
            f
        }
        None => {
            p.missing.push("family");
            None
        }
    };
    if kind == ScenarioKind::RobustnessGrid {
        p.check(family.is_none_or(|f| f == PulseFamily::Gaussian), || {
            "robustness grid requires family = gaussian".into()
        });
    }

    let protocol = match (&file.protocol, kind) {
        (Some(name), _) => {
            let proto = parse_protocol(name);
            p.check(proto.is_some(), || {
                format!("protocol must be stirap, sa or exact-cd (got {name:?})")
            });
            proto
        }
        (None, ScenarioKind::PopulationTrace) => {
            p.missing.push("protocol");
            None
        }
        (None, ScenarioKind::RobustnessGrid) => Some(Protocol::SaStirap),
        (None, _) => None,
    };
    if let Some(proto) = protocol {
        file.protocol = Some(proto.name().into());
    }

    let omega0_mhz = p.require(file.omega0_mhz, "omega0_mhz");
    if let Some(w) = omega0_mhz {
        p.check(w.is_finite() && w > 0.0, || {
            format!("omega0 > 0 violated (omega0_mhz = {w})")
        });
    }

    // protocol duration the pulse pair is built for
    let mut duration = None;
    let mut sweep = None;
    match kind {
        ScenarioKind::PopulationTrace | ScenarioKind::PulsePreview => {
            duration = p.require(file.t_us, "T_us");
            if let Some(t) = duration {
                p.check(t.is_finite() && t > 0.0, || {
                    format!("T > 0 violated (T_us = {t})")
                });
            }
        }
        ScenarioKind::EfficiencyVsDuration => {
            let section = file.sweep.get_or_insert_with(SweepSection::default);
            let t_min = p.require(section.t_min_us, "sweep.T_min_us");
            let t_max = p.require(section.t_max_us, "sweep.T_max_us");
            let points = *section.points.get_or_insert(24);
            let names = section.protocols.get_or_insert_with(|| match protocol {
                Some(proto) => vec![proto.name().into()],
                None => vec!["stirap".into(), "sa".into()],
            });
            let mut protocols = Vec::new();
            for name in names.iter_mut() {
                match parse_protocol(name) {
                    Some(proto) => {
                        *name = proto.name().into();
                        protocols.push(proto);
                    }
                    None => p.invalid.push(format!(
                        "sweep.protocols entries must be stirap, sa or exact-cd (got {name:?})"
                    )),
                }
            }
            p.check(points >= 1 && !protocols.is_empty(), || {
                "empty sweep range".into()
            });
            if let (Some(lo), Some(hi)) = (t_min, t_max) {
                p.check(lo > 0.0 && hi >= lo && hi.is_finite(), || {
                    format!("sweep requires 0 < T_min_us <= T_max_us (got {lo}..{hi})")
                });
                duration = Some(lo);
                sweep = Some(Sweep::Duration(DurationSweep {
                    t_min: lo,
                    t_max: hi,
                    points,
                    protocols,
                }));
            }
        }
        ScenarioKind::RobustnessGrid => {
            let d = RobustnessSweep::default();
            let section = file.grid.get_or_insert_with(GridSection::default);
            let grid = RobustnessSweep {
                sigma_min: *section.sigma_min_us.get_or_insert(d.sigma_min),
                sigma_max: *section.sigma_max_us.get_or_insert(d.sigma_max),
                sigma_points: *section.sigma_points.get_or_insert(d.sigma_points),
                delta_t_points: *section.delta_t_points.get_or_insert(d.delta_t_points),
                delta_t_max_over_sigma: *section
                    .delta_t_max_over_sigma
                    .get_or_insert(d.delta_t_max_over_sigma),
                reference_sigma: *section.reference_sigma_us.get_or_insert(d.reference_sigma),
                reference_delta_t: *section
                    .reference_delta_t_us
                    .get_or_insert(d.reference_delta_t),
            };
            p.check(grid.sigma_points >= 1 && grid.delta_t_points >= 1, || {
                "empty sweep range".into()
            });
            p.check(
                grid.sigma_min > 0.0 && grid.sigma_max >= grid.sigma_min,
                || "grid requires 0 < sigma_min_us <= sigma_max_us".into(),
            );
            p.check(
                grid.delta_t_max_over_sigma >= 0.0
                    && grid.reference_sigma > 0.0
                    && grid.reference_delta_t >= 0.0,
                || "grid delta_t range and reference point must be non-negative".into(),
            );
            sweep = Some(Sweep::Robustness(grid));
        }
    }

    let mut scaling = TimeScaling::default();
    let mut sigma = 0.0;
    let mut delta_t = 0.0;
    if kind != ScenarioKind::RobustnessGrid {
        if let Some(f) = family {
            if f.uses_sigma() {
                if let Some(pair) = width(
                    &mut p,
                    file.sigma_us,
                    file.sigma_over_t,
                    ("sigma_us", "sigma_over_T"),
                ) {
                    match pair {
                        (Some(abs), _) => {
                            p.check(abs > 0.0, || {
                                format!("sigma > 0 violated (sigma_us = {abs})")
                            });
                            sigma = abs;
                        }
                        (_, Some(r)) => {
                            p.check(r > 0.0, || {
                                format!("sigma > 0 violated (sigma_over_T = {r})")
                            });
                            scaling.sigma_over_duration = Some(r);
                            sigma = r * duration.unwrap_or(0.0);
                        }
                        _ => unreachable!(),
                    }
                }
            } else {
                p.check(
                    file.sigma_us.is_none() && file.sigma_over_t.is_none(),
                    || format!("sigma does not apply to the {} family", f.name()),
                );
            }
            if f.uses_delta_t() {
                if let Some(pair) = width(
                    &mut p,
                    file.delta_t_us,
                    file.dt_over_t,
                    ("delta_t_us", "dt_over_T"),
                ) {
                    match pair {
                        (Some(abs), _) => {
                            p.check(abs >= 0.0, || {
                                format!("delta_t >= 0 violated (delta_t_us = {abs})")
                            });
                            delta_t = abs;
                        }
                        (_, Some(r)) => {
                            p.check(r >= 0.0, || {
                                format!("delta_t >= 0 violated (dt_over_T = {r})")
                            });
                            scaling.delta_t_over_duration = Some(r);
                            delta_t = r * duration.unwrap_or(0.0);
                        }
                        _ => unreachable!(),
                    }
                }
            } else {
                p.check(
                    file.delta_t_us.is_none() && file.dt_over_t.is_none(),
                    || format!("delta_t does not apply to the {} family", f.name()),
                );
            }
        }
    }

    let needs_delta = kind == ScenarioKind::RobustnessGrid
        || protocol == Some(Protocol::SaStirap) && kind == ScenarioKind::PopulationTrace
        || matches!(&sweep, Some(Sweep::Duration(s)) if s.protocols.contains(&Protocol::SaStirap));
    let correction = match file.delta_mhz {
        Some(d) => {
            p.check(d.is_finite() && d != 0.0, || {
                format!("delta != 0 violated (delta_mhz = {d})")
            });
            let phase_a = *file.phase_a_rad.get_or_insert(FRAC_PI_2);
            p.check(phase_a.is_finite(), || "phase_a_rad must be finite".into());
            Some(CorrectionParams {
                delta: angular_from_mhz(d),
                phase_a,
            })
        }
        None => {
            if needs_delta {
                p.missing.push("delta_mhz");
            }
            p.check(file.phase_a_rad.is_none(), || {
                "phase_a_rad requires delta_mhz".into()
            });
            None
        }
    };

    let initial_state =
        match parse_initial(file.initial_state.get_or_insert_with(|| "default".into())) {
            Some((state, canonical)) => {
                file.initial_state = Some(canonical.into());
                state
            }
            None => {
                p.invalid.push(format!(
                    "initial_state must be default, m1, p1, 0 or dark (got {:?})",
                    file.initial_state.as_deref().unwrap_or("")
                ));
                InitialState::FamilyDefault
            }
        };

    let defaults = PropagationConfig::default();
    let steps = *file.steps.get_or_insert(defaults.step_count);
    p.check(steps >= 1000, || {
        format!("steps >= 1000 violated (steps = {steps})")
    });
    let record_stride = *file.record_stride.get_or_insert(defaults.record_stride);
    p.check(record_stride >= 1, || "record_stride >= 1 violated".into());
    let method = match parse_method(
        file.method
            .get_or_insert_with(|| method_name(defaults.method).into()),
    ) {
        Some(m) => m,
        None => {
            p.invalid.push(format!(
                "method must be magnus4, midpoint or rk4 (got {:?})",
                file.method.as_deref().unwrap_or("")
            ));
            defaults.method
        }
    };
    let workers = *file.workers.get_or_insert(0);
    let preview_points = *file.preview_points.get_or_insert(401);
    p.check(preview_points >= 2, || {
        "preview_points >= 2 violated".into()
    });
    let output_dir = file
        .output_dir
        .get_or_insert_with(|| PathBuf::from("out"))
        .clone();
    let csv = *file.csv.get_or_insert(true);
    let plot = *file.plot.get_or_insert(false);

    p.finish()?;

    let family = family.expect("checked");
    let omega0 = angular_from_mhz(omega0_mhz.expect("checked"));
    let pulse = match kind {
        ScenarioKind::RobustnessGrid => {
            let Some(Sweep::Robustness(g)) = &sweep else {
                unreachable!()
            };
            grid_pulse(omega0, g.reference_sigma, g.reference_delta_t)
        }
        _ => PulseParams {
            family,
            omega0,
            duration: duration.expect("checked"),
            sigma,
            delta_t,
        },
    };
    let scenario = ScenarioSpec {
        kind,
        pulse,
        scaling,
        correction,
        protocol: protocol.unwrap_or(Protocol::SaStirap),
        sweep,
        initial_state,
        propagation: PropagationConfig {
            step_count: steps,
            method,
            record_stride,
        },
        workers,
        preview_points,
    };
    scenario
        .validate()
        .map_err(|e| Error::Config(vec![e.to_string()]))?;
    Ok(RunConfig {
        scenario,
        output_dir,
        csv,
        plot,
        resolved: file,
    })
}
