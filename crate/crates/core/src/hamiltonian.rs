//! Three-level Hamiltonians in the fixed basis `(|0⟩, |−1⟩, |+1⟩)`.
//!
//! Row/column 0 is the intermediate state `|0⟩`, which couples to `|−1⟩`
//! through the pump and to `|+1⟩` through the Stokes field.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::propagator::{StateVector, Trajectory};
use crate::pulses::{
    mixing_angle_rate, sample_correction, sample_envelope, CorrectionParams, CorrectionSample,
    PulseParams,
};
use crate::{Error, Mat3, Result, Vec3, C64};

/// Basis levels, in matrix row order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    /// Intermediate state `|0⟩`.
    Zero,
    /// Initial state `|−1⟩`.
    Minus,
    /// Target state `|+1⟩`.
    Plus,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Zero, Level::Minus, Level::Plus];

    pub const fn index(self) -> usize {
        match self {
            Level::Zero => 0,
            Level::Minus => 1,
            Level::Plus => 2,
        }
    }
}

const I: C64 = C64::new(0.0, 1.0);

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `H_st(t) = ½ [[0, Ω_P, Ω_S], [Ω_P, 0, 0], [Ω_S, 0, 0]]`.
pub fn h_stirap(params: &PulseParams, t: f64) -> Result<Mat3> {
    let env = sample_envelope(params, t)?;
    Ok(stirap_matrix(env.omega_p, env.omega_s))
}

fn stirap_matrix(omega_p: f64, omega_s: f64) -> Mat3 {
    let (p, s) = (real(0.5 * omega_p), real(0.5 * omega_s));
    let z = C64::new(0.0, 0.0);
    Mat3::new(z, p, s, p, z, z, s, z, z)
}

/// Correction Hamiltonian of the two detuned fields, phases `e^{±iΔt}` kept explicit.
pub fn h_sa_rotating(params: &PulseParams, corr: &CorrectionParams, t: f64) -> Result<Mat3> {
    let sample = sample_correction(params, corr, t)?;
    Ok(correction_matrix(&sample, corr.delta, t))
}

fn correction_matrix(sample: &CorrectionSample, delta: f64, t: f64) -> Mat3 {
    let up = C64::from_polar(0.5, delta * t);
    let down = up.conj();
    let z = C64::new(0.0, 0.0);
    let (a, b) = (sample.omega_a, sample.omega_b);
    Mat3::new(
        z,
        a.conj() * down,
        b * down,
        a * up,
        z,
        z,
        b.conj() * up,
        z,
        z,
    )
}

/// Mixing angle `θ = atan2(Ω_P, Ω_S)`, in `[0, π/2]` for non-negative envelopes.
pub fn mixing_angle(params: &PulseParams, t: f64) -> Result<f64> {
    let env = sample_envelope(params, t)?;
    if env.norm_sqr().is_nan() || env.norm_sqr() < f64::MIN_POSITIVE {
        return Err(Error::DegenerateEnvelope { t });
    }
    Ok(env.omega_p.atan2(env.omega_s))
}

/// Instantaneous eigenbasis of `H_st`.
///
/// Phase convention: `⟨−1|D⟩ ≥ 0` and `⟨0|B_±⟩ = 1/√2`; all components real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenFrame {
    pub dark: StateVector,
    pub bright_minus: StateVector,
    pub bright_plus: StateVector,
    /// Eigenvalues of `dark`, `bright_minus`, `bright_plus` in that order.
    pub eigenvalues: [f64; 3],
    pub theta: f64,
}

impl EigenFrame {
    pub fn vectors(&self) -> [&StateVector; 3] {
        [&self.dark, &self.bright_minus, &self.bright_plus]
    }
}

/// Components `(sin θ, cos θ, √(Ω_P² + Ω_S²))`, computed without trigonometry.
fn frame_components(params: &PulseParams, t: f64) -> Result<(f64, f64, f64)> {
    let env = sample_envelope(params, t)?;
    let n2 = env.norm_sqr();
    if n2.is_nan() || n2 < f64::MIN_POSITIVE {
        return Err(Error::DegenerateEnvelope { t });
    }
    let rms = n2.sqrt();
    Ok((env.omega_p / rms, env.omega_s / rms, rms))
}

fn real_vec(x0: f64, xm: f64, xp: f64) -> Vec3 {
    Vec3::new(real(x0), real(xm), real(xp))
}

pub fn eigenframe(params: &PulseParams, t: f64) -> Result<EigenFrame> {
    let (sin, cos, rms) = frame_components(params, t)?;
    let r = FRAC_1_SQRT_2;
    Ok(EigenFrame {
        dark: StateVector::from_vec(real_vec(0.0, cos, -sin)),
        bright_minus: StateVector::from_vec(real_vec(r, -r * sin, -r * cos)),
        bright_plus: StateVector::from_vec(real_vec(r, r * sin, r * cos)),
        eigenvalues: [0.0, -0.5 * rms, 0.5 * rms],
        theta: sin.atan2(cos),
    })
}

/// Exact transitionless-driving term
/// `H_cd = i Σ_n (|∂_t n⟩⟨n| − ⟨n|∂_t n⟩ |n⟩⟨n|)` summed over the eigenframe.
///
/// Frame vectors depend on time only through `θ`, so `|∂_t n⟩ = θ̇ ∂_θ|n⟩`
/// with the analytic `θ̇`. The result is `iθ̇ (|−1⟩⟨+1| − |+1⟩⟨−1|)`.
pub fn h_cd_exact(params: &PulseParams, t: f64) -> Result<Mat3> {
    let (sin, cos, _) = frame_components(params, t)?;
    let rate = mixing_angle_rate(params, t)?;
    let r = FRAC_1_SQRT_2;
    let frame = [
        (real_vec(0.0, cos, -sin), real_vec(0.0, -sin, -cos)),
        (
            real_vec(r, -r * sin, -r * cos),
            real_vec(0.0, -r * cos, r * sin),
        ),
        (
            real_vec(r, r * sin, r * cos),
            real_vec(0.0, r * cos, -r * sin),
        ),
    ];
    let mut h = Mat3::zeros();
    for (n, dn_dtheta) in frame {
        let dn = dn_dtheta * real(rate);
        let overlap = n.dotc(&dn);
        h += dn * n.adjoint() - n * n.adjoint() * overlap;
    }
    Ok(h * I)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryLabel {
    Stirap,
    SaCorrection,
    Total,
    ExactCd,
    StirapPlusExactCd,
}

/// Where the correction amplitudes come from.
///
/// `pulse` fixes the envelope shape the correction is derived from and must
/// span the protocol it is added to. The phases `e^{±iΔt}` use protocol time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrectionSource {
    pub pulse: PulseParams,
    pub params: CorrectionParams,
}

impl CorrectionSource {
    /// Correction computed from the same pulse pair it is added to.
    pub fn matched(pulse: PulseParams, params: CorrectionParams) -> Self {
        CorrectionSource { pulse, params }
    }

    /// Correction of `reference`'s shape (σ, δt) centered on a protocol of
    /// length `duration`, evaluated in closed form over the whole protocol.
    pub fn centered(reference: PulseParams, params: CorrectionParams, duration: f64) -> Self {
        CorrectionSource {
            pulse: reference.with_duration(duration),
            params,
        }
    }

    pub fn sample(&self, t: f64) -> Result<CorrectionSample> {
        sample_correction(&self.pulse, &self.params, t)
    }
}

/// A time-dependent 3×3 Hamiltonian on `[0, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HamiltonianTrajectory {
    pub label: TrajectoryLabel,
    pub pulse: PulseParams,
    pub correction: Option<CorrectionSource>,
}

impl HamiltonianTrajectory {
    pub fn stirap(pulse: PulseParams) -> Self {
        HamiltonianTrajectory {
            label: TrajectoryLabel::Stirap,
            pulse,
            correction: None,
        }
    }

    pub fn sa_correction(pulse: PulseParams, corr: CorrectionParams) -> Self {
        HamiltonianTrajectory {
            label: TrajectoryLabel::SaCorrection,
            pulse,
            correction: Some(CorrectionSource::matched(pulse, corr)),
        }
    }

    /// `H_st + H_sa` with the correction derived from `pulse` itself.
    pub fn total(pulse: PulseParams, corr: CorrectionParams) -> Self {
        Self::total_with(pulse, CorrectionSource::matched(pulse, corr))
    }

    pub fn total_with(pulse: PulseParams, source: CorrectionSource) -> Self {
        HamiltonianTrajectory {
            label: TrajectoryLabel::Total,
            pulse,
            correction: Some(source),
        }
    }

    pub fn exact_cd(pulse: PulseParams) -> Self {
        HamiltonianTrajectory {
            label: TrajectoryLabel::ExactCd,
            pulse,
            correction: None,
        }
    }

    pub fn stirap_plus_exact_cd(pulse: PulseParams) -> Self {
        HamiltonianTrajectory {
            label: TrajectoryLabel::StirapPlusExactCd,
            pulse,
            correction: None,
        }
    }

    fn correction_part(&self, t: f64) -> Result<Mat3> {
        let source = self.correction.as_ref().ok_or_else(|| {
            Error::InvalidScenario(format!(
                "{:?} trajectory needs correction parameters",
                self.label
            ))
        })?;
        Ok(correction_matrix(
            &source.sample(t)?,
            source.params.delta,
            t,
        ))
    }

    pub fn evaluate(&self, t: f64) -> Result<Mat3> {
        match self.label {
            TrajectoryLabel::Stirap => h_stirap(&self.pulse, t),
            TrajectoryLabel::SaCorrection => {
                self.pulse.check_range(t)?;
                self.correction_part(t)
            }
            TrajectoryLabel::Total => Ok(h_stirap(&self.pulse, t)? + self.correction_part(t)?),
            TrajectoryLabel::ExactCd => h_cd_exact(&self.pulse, t),
            TrajectoryLabel::StirapPlusExactCd => {
                Ok(h_stirap(&self.pulse, t)? + h_cd_exact(&self.pulse, t)?)
            }
        }
    }
}

impl Trajectory for HamiltonianTrajectory {
    fn duration(&self) -> f64 {
        self.pulse.duration
    }

    fn hamiltonian(&self, t: f64) -> Result<Mat3> {
        self.evaluate(t)
    }

    fn detuning(&self) -> Option<f64> {
        self.correction.map(|c| c.params.delta)
    }
}
