//! Time-dependent Schrödinger integration for 3×3 Hamiltonians.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::hamiltonian::Level;
use crate::linalg::expm_hermitian;
use crate::{Error, Mat3, Result, Vec3, C64};

/// Normalized amplitudes in the order `(|0⟩, |−1⟩, |+1⟩)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector(Vec3);

impl StateVector {
    pub fn basis(level: Level) -> Self {
        let mut v = Vec3::zeros();
        v[level.index()] = C64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn from_vec(amplitudes: Vec3) -> Self {
        StateVector(amplitudes)
    }

    pub fn from_array(amplitudes: [C64; 3]) -> Self {
        StateVector(Vec3::from(amplitudes))
    }

    pub fn amplitudes(&self) -> Vec3 {
        self.0
    }

    pub fn amplitude(&self, level: Level) -> C64 {
        self.0[level.index()]
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn populations(&self) -> [f64; 3] {
        [
            self.0[0].norm_sqr(),
            self.0[1].norm_sqr(),
            self.0[2].norm_sqr(),
        ]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.0[level.index()].norm_sqr()
    }

    /// Rescaled copy with unit norm.
    pub fn normalized(&self) -> Self {
        StateVector(self.0.normalize())
    }

    pub fn conj(&self) -> Self {
        StateVector(self.0.map(|z| z.conj()))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: [[f64; 2]; 3] = [0, 1, 2].map(|k| [self.0[k].re, self.0[k].im]);
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = <[[f64; 2]; 3]>::deserialize(d)?;
        Ok(StateVector::from_array(
            pairs.map(|[re, im]| C64::new(re, im)),
        ))
    }
}

/// Anything that supplies a Hamiltonian on `[0, duration]`.
pub trait Trajectory: Sync {
    fn duration(&self) -> f64;

    fn hamiltonian(&self, t: f64) -> Result<Mat3>;

    /// Carrier detuning (rad/μs) whose phase the step size must resolve.
    fn detuning(&self) -> Option<f64> {
        None
    }
}

/// Time-independent Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantHamiltonian {
    pub matrix: Mat3,
    pub duration: f64,
}

impl Trajectory for ConstantHamiltonian {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn hamiltonian(&self, _t: f64) -> Result<Mat3> {
        Ok(self.matrix)
    }
}

/// `H'(s) = conj(H(T − s))`.
///
/// Evolving `conj(ψ(T))` under this trajectory returns `conj(ψ(0))`.
pub struct TimeReversed<'a, T: ?Sized>(pub &'a T);

impl<T: Trajectory + ?Sized> Trajectory for TimeReversed<'_, T> {
    fn duration(&self) -> f64 {
        self.0.duration()
    }

    fn hamiltonian(&self, s: f64) -> Result<Mat3> {
        let t = (self.0.duration() - s).max(0.0);
        Ok(self.0.hamiltonian(t)?.map(|z| z.conj()))
    }

    fn detuning(&self) -> Option<f64> {
        self.0.detuning()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `U_k = exp(−i H(t_k + dt/2) dt)`, second order, exactly unitary.
    MidpointExponential,
    /// Fourth-order Magnus step on two Gauss–Legendre nodes, exactly unitary.
    Magnus4,
    /// Classical Runge–Kutta on the amplitudes; cross-check only.
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub step_count: usize,
    pub method: Method,
    pub record_stride: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            step_count: 20_000,
            method: Method::Magnus4,
            record_stride: 20,
        }
    }
}

impl PropagationConfig {
    pub fn with_method(self, method: Method) -> Self {
        PropagationConfig { method, ..self }
    }

    pub fn with_steps(self, step_count: usize) -> Self {
        PropagationConfig { step_count, ..self }
    }
}

/// Time-resolved populations of one propagation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    /// Recorded instants in μs, always including 0 and T.
    pub times: Vec<f64>,
    /// `[P(|0⟩), P(|−1⟩), P(|+1⟩)]` at each recorded instant.
    pub populations: Vec<[f64; 3]>,
    pub final_state: StateVector,
    pub efficiency: f64,
}

/// Final population of the target state `|+1⟩`.
pub fn transfer_efficiency(record: &TraceRecord) -> f64 {
    record.final_state.population(Level::Plus)
}

/// Largest recorded population of the intermediate state `|0⟩`.
pub fn max_intermediate_population(record: &TraceRecord) -> f64 {
    record
        .populations
        .iter()
        .map(|p| p[Level::Zero.index()])
        .fold(0.0, f64::max)
}

fn check_inputs<T: Trajectory + ?Sized>(
    traj: &T,
    initial: &StateVector,
    config: &PropagationConfig,
) -> Result<f64> {
    let norm = initial.norm();
    if norm.is_nan() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm });
    }
    if config.step_count == 0 || config.record_stride == 0 {
        return Err(Error::InvalidParams(
            "step_count and record_stride must be positive".into(),
        ));
    }
    let duration = traj.duration();
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParams(format!(
            "T > 0 violated (T = {duration})"
        )));
    }
    let dt = duration / config.step_count as f64;
    if let Some(delta) = traj.detuning().filter(|d| *d != 0.0) {
        let max = 0.02 * 2.0 * PI / delta.abs();
        if dt > max {
            return Err(Error::StepConstraint { step: dt, max });
        }
    }
    Ok(dt)
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6

/// Integrates `i dψ/dt = H(t) ψ` over `[0, T]` from `initial`.
pub fn propagate<T: Trajectory + ?Sized>(
    traj: &T,
    initial: &StateVector,
    config: &PropagationConfig,
) -> Result<TraceRecord> {
    let dt = check_inputs(traj, initial, config)?;
    let duration = traj.duration();
    let n = config.step_count;
    // k/n ≤ 1 exactly, so sample times never round past the end of the interval
    let time_at = |k: f64| duration * (k / n as f64);

    let capacity = n / config.record_stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut populations = Vec::with_capacity(capacity);
    let mut psi = initial.amplitudes();
    times.push(0.0);
    populations.push(StateVector(psi).populations());

    let minus_i = C64::new(0.0, -1.0);
    for k in 0..n {
        let kf = k as f64;
        psi = match config.method {
            Method::MidpointExponential => {
                let h = traj.hamiltonian(time_at(kf + 0.5))?;
                expm_hermitian(&h, dt) * psi
            }
            Method::Magnus4 => {
                let h1 = traj.hamiltonian(time_at(kf + 0.5 - GAUSS_OFFSET))?;
                let h2 = traj.hamiltonian(time_at(kf + 0.5 + GAUSS_OFFSET))?;
                // Ω = −i dt H_eff, H_eff = (H1 + H2)/2 − i (√3/12) dt [H2, H1]
                let comm = h2 * h1 - h1 * h2;
                let c = C64::new(0.0, -(3f64.sqrt() / 12.0) * dt);
                let h_eff = (h1 + h2) * C64::new(0.5, 0.0) + comm * c;
                expm_hermitian(&h_eff, dt) * psi
            }
            Method::Rk4 => {
                let h0 = traj.hamiltonian(time_at(kf))?;
                let hm = traj.hamiltonian(time_at(kf + 0.5))?;
                let h1 = traj.hamiltonian(time_at(kf + 1.0))?;
                let f = |h: &Mat3, v: &Vec3| (h * v) * minus_i;
                let half = C64::new(0.5 * dt, 0.0);
                let full = C64::new(dt, 0.0);
                let k1 = f(&h0, &psi);
                let k2 = f(&hm, &(psi + k1 * half));
                let k3 = f(&hm, &(psi + k2 * half));
                let k4 = f(&h1, &(psi + k3 * full));
                psi + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                    * C64::new(dt / 6.0, 0.0)
            }
        };
        if !psi.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                step: k + 1,
                t: time_at(kf + 1.0),
            });
        }
        let done = k + 1;
        if done % config.record_stride == 0 || done == n {
            times.push(time_at(done as f64));
            populations.push(StateVector(psi).populations());
        }
    }

    let final_state = StateVector(psi);
    Ok(TraceRecord {
        times,
        populations,
        efficiency: final_state.population(Level::Plus),
        final_state,
    })
}
