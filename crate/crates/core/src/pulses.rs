//! Raman pulse envelopes, the effective two-photon pulse and the
//! superadiabatic correction pair.
//!
//! Three envelope families are supported. Each returns closed-form values
//! and analytic time derivatives for the pump `Ω_P` and Stokes `Ω_S` fields:
//!
//! * Gaussian: `Ω_{S,P}(t) = Ω₀ exp[−(t − T/2 ± δt)²/σ²]`, Stokes centered at
//!   `T/2 − δt`, pump at `T/2 + δt`.
//! * Exponential: `Ω_S(t) = Ω₀ [1 + e^{−(t−T/2)/σ}]^{−1/2}`,
//!   `Ω_P(t) = Ω₀ [1 + e^{(t−T/2)/σ}]^{−1/2}`.
//! * Trigonometric: `Ω_S(t) = Ω₀ sin(πt/2T)`, `Ω_P(t) = Ω₀ cos(πt/2T)`.
//!
//! None of the envelopes is windowed, so the exponential and trigonometric
//! pairs are nonzero at both ends of `[0, T]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Converts a frequency quoted as `Ω/2π` in MHz to angular rad/μs.
pub fn angular_from_mhz(mhz_over_2pi: f64) -> f64 {
    2.0 * PI * mhz_over_2pi
}

/// Converts an angular frequency in rad/μs to `Ω/2π` in MHz.
pub fn mhz_from_angular(angular: f64) -> f64 {
    angular / (2.0 * PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseFamily {
    Gaussian,
    Exponential,
    Trigonometric,
}

impl PulseFamily {
    pub fn uses_sigma(self) -> bool {
        !matches!(self, PulseFamily::Trigonometric)
    }

    pub fn uses_delta_t(self) -> bool {
        matches!(self, PulseFamily::Gaussian)
    }

    pub fn name(self) -> &'static str {
        match self {
            PulseFamily::Gaussian => "gaussian",
            PulseFamily::Exponential => "exponential",
            PulseFamily::Trigonometric => "trigonometric",
        }
    }
}

/// Parameters of one Raman pulse pair.
///
/// `omega0` is in rad/μs; `duration`, `sigma` and `delta_t` are in μs.
/// `sigma` is ignored by the trigonometric family and `delta_t` (half the
/// Stokes–pump delay) is only used by the Gaussian family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    pub family: PulseFamily,
    pub omega0: f64,
    pub duration: f64,
    pub sigma: f64,
    pub delta_t: f64,
}

impl PulseParams {
    pub fn gaussian(omega0: f64, duration: f64, sigma: f64, delta_t: f64) -> Self {
        PulseParams {
            family: PulseFamily::Gaussian,
            omega0,
            duration,
            sigma,
            delta_t,
        }
    }

    pub fn exponential(omega0: f64, duration: f64, sigma: f64) -> Self {
        PulseParams {
            family: PulseFamily::Exponential,
            omega0,
            duration,
            sigma,
            delta_t: 0.0,
        }
    }

    pub fn trigonometric(omega0: f64, duration: f64) -> Self {
        PulseParams {
            family: PulseFamily::Trigonometric,
            omega0,
            duration,
            sigma: 0.0,
            delta_t: 0.0,
        }
    }

    /// Same pulse pair with a different total duration, other fields kept.
    pub fn with_duration(self, duration: f64) -> Self {
        PulseParams { duration, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega0 > 0 violated (omega0 = {})",
                self.omega0
            )));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InvalidParams(format!(
                "T > 0 violated (T = {})",
                self.duration
            )));
        }
        if self.family.uses_sigma() && !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "sigma > 0 violated (sigma = {})",
                self.sigma
            )));
        }
        if self.family.uses_delta_t() && !(self.delta_t.is_finite() && self.delta_t >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "delta_t >= 0 violated (delta_t = {})",
                self.delta_t
            )));
        }
        Ok(())
    }

    pub(crate) fn check_range(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 || t > self.duration {
            return Err(Error::TimeOutOfRange {
                t,
                duration: self.duration,
            });
        }
        Ok(())
    }
}

/// Envelope values (rad/μs) and their time derivatives (rad/μs²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeSample {
    pub omega_p: f64,
    pub omega_s: f64,
    pub d_omega_p: f64,
    pub d_omega_s: f64,
}

impl EnvelopeSample {
    /// `Ω_P² + Ω_S²`.
    pub fn norm_sqr(&self) -> f64 {
        self.omega_p * self.omega_p + self.omega_s * self.omega_s
    }

    /// `Ω̇_P Ω_S − Ω_P Ω̇_S`.
    pub fn wronskian(&self) -> f64 {
        self.d_omega_p * self.omega_s - self.omega_p * self.d_omega_s
    }
}

pub fn sample_envelope(params: &PulseParams, t: f64) -> Result<EnvelopeSample> {
    params.validate()?;
    params.check_range(t)?;
    let w0 = params.omega0;
    let half = 0.5 * params.duration;
    let sample = match params.family {
        PulseFamily::Gaussian => {
            let s2 = params.sigma * params.sigma;
            let xs = t - half + params.delta_t;
            let xp = t - half - params.delta_t;
            let omega_s = w0 * (-xs * xs / s2).exp();
            let omega_p = w0 * (-xp * xp / s2).exp();
            EnvelopeSample {
                omega_p,
                omega_s,
                d_omega_p: -2.0 * xp / s2 * omega_p,
                d_omega_s: -2.0 * xs / s2 * omega_s,
            }
        }
        PulseFamily::Exponential => {
            // Ω_S² = Ω₀² f(x), Ω_P² = Ω₀² (1 − f(x)) with f the logistic function.
            let x = (t - half) / params.sigma;
            let (f, g) = logistic_pair(x);
            let (sf, sg) = (f.sqrt(), g.sqrt());
            EnvelopeSample {
                omega_p: w0 * sg,
                omega_s: w0 * sf,
                d_omega_p: -w0 * sg * f / (2.0 * params.sigma),
                d_omega_s: w0 * sf * g / (2.0 * params.sigma),
            }
        }
        PulseFamily::Trigonometric => {
            let rate = PI / (2.0 * params.duration);
            let (sin, cos) = (rate * t).sin_cos();
            let sample = EnvelopeSample {
                omega_p: w0 * cos,
                omega_s: w0 * sin,
                d_omega_p: -w0 * rate * sin,
                d_omega_s: w0 * rate * cos,
            };
            assert!(
                sample.norm_sqr() > 0.0,
                "trigonometric pair vanished at t = {t}"
            );
            sample
        }
    };
    Ok(sample)
}

/// Returns `(1/(1+e^{−x}), 1/(1+e^{x}))` without overflow.
fn logistic_pair(x: f64) -> (f64, f64) {
    if x >= 0.0 {
        let e = (-x).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = x.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// Rate of change of the mixing angle, `θ̇ = (Ω̇_P Ω_S − Ω_P Ω̇_S)/(Ω_P² + Ω_S²)`.
pub fn mixing_angle_rate(params: &PulseParams, t: f64) -> Result<f64> {
    let env = sample_envelope(params, t)?;
    let den = env.norm_sqr();
    if den.is_nan() || den < f64::MIN_POSITIVE {
        return Err(Error::DegenerateEnvelope { t });
    }
    Ok(env.wronskian() / den)
}

/// Effective two-photon pulse `Ω_d(t) = −2i (Ω̇_P Ω_S − Ω_P Ω̇_S)/(Ω_P² + Ω_S²)`.
pub fn omega_d(params: &PulseParams, t: f64) -> Result<C64> {
    let rate = mixing_angle_rate(params, t)?;
    Ok(C64::new(0.0, -2.0 * rate))
}

/// Detuning and phase of the correction pair. `delta` is angular (rad/μs).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionParams {
    pub delta: f64,
    pub phase_a: f64,
}

impl CorrectionParams {
    pub const DEFAULT_PHASE_A: f64 = PI / 2.0;

    pub fn new(delta: f64) -> Self {
        CorrectionParams {
            delta,
            phase_a: Self::DEFAULT_PHASE_A,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta != 0.0) {
            return Err(Error::InvalidParams(format!(
                "delta != 0 violated (delta = {})",
                self.delta
            )));
        }
        if !self.phase_a.is_finite() {
            return Err(Error::InvalidParams("phase_a must be finite".into()));
        }
        Ok(())
    }
}

/// Complex Rabi frequencies of the two detuned correction fields (rad/μs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionSample {
    pub omega_a: C64,
    pub omega_b: C64,
}

impl CorrectionSample {
    pub const ZERO: CorrectionSample = CorrectionSample {
        omega_a: C64::new(0.0, 0.0),
        omega_b: C64::new(0.0, 0.0),
    };
}

/// `Ω_a = e^{iφ_a} √(2|Δ||Ω_d|)`, `Ω_b = √(2|Δ||Ω_d|)`.
pub fn sample_correction(
    params: &PulseParams,
    corr: &CorrectionParams,
    t: f64,
) -> Result<CorrectionSample> {
    corr.validate()?;
    let amplitude = (2.0 * corr.delta.abs() * omega_d(params, t)?.norm()).sqrt();
    Ok(CorrectionSample {
        omega_a: C64::from_polar(amplitude, corr.phase_a),
        omega_b: C64::new(amplitude, 0.0),
    })
}

/// Global adiabaticity figure of merit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdiabaticityFigure {
    pub value: f64,
    /// `true` when `Ω₀·T` stands in for `Ω₀·δt` (non-Gaussian families).
    pub proxy: bool,
}

/// `Ω₀·δt` for Gaussian pairs, `Ω₀·T` otherwise.
pub fn adiabaticity_figure(params: &PulseParams) -> AdiabaticityFigure {
    match params.family {
        PulseFamily::Gaussian => AdiabaticityFigure {
            value: params.omega0 * params.delta_t,
            proxy: false,
        },
        _ => AdiabaticityFigure {
            value: params.omega0 * params.duration,
            proxy: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian_ref(t_total: f64) -> PulseParams {
        PulseParams::gaussian(
            angular_from_mhz(2.0),
            t_total,
            t_total / 6.0,
            t_total / 10.0,
        )
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn gaussian_peak_and_crossing() {
        let p = gaussian_ref(2.0);
        let at_stokes = sample_envelope(&p, 1.0 - 0.2).unwrap();
        assert_eq!(at_stokes.omega_s, p.omega0);
        let mid = sample_envelope(&p, 1.0).unwrap();
        let expected = p.omega0 * (-(0.2f64 * 0.2) / (p.sigma * p.sigma)).exp();
        assert!(rel(mid.omega_s, expected) < 1e-15);
        assert_eq!(mid.omega_s, mid.omega_p);
    }

    #[test]
    fn trigonometric_start() {
        let p = PulseParams::trigonometric(angular_from_mhz(0.5), 2.0);
        let s = sample_envelope(&p, 0.0).unwrap();
        assert_eq!(s.omega_s, 0.0);
        assert_eq!(s.omega_p, p.omega0);
    }

    #[test]
    fn rejects_time_outside_protocol() {
        let p = gaussian_ref(2.0);
        assert!(matches!(
            sample_envelope(&p, -1e-9),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(matches!(
            sample_envelope(&p, 2.0 + 1e-9),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(sample_envelope(&p, 2.0).is_ok());
    }

    #[test]
    fn rejects_invalid_params() {
        let mut p = gaussian_ref(2.0);
        p.sigma = 0.0;
        assert!(matches!(
            sample_envelope(&p, 1.0),
            Err(Error::InvalidParams(_))
        ));
        let mut p = gaussian_ref(2.0);
        p.delta_t = -0.1;
        assert!(matches!(
            sample_envelope(&p, 1.0),
            Err(Error::InvalidParams(_))
        ));
        // sigma is irrelevant for the trigonometric pair
        let p = PulseParams::trigonometric(1.0, 2.0);
        assert!(sample_envelope(&p, 1.0).is_ok());
        assert!(CorrectionParams::new(0.0).validate().is_err());
    }

    #[test]
    fn degenerate_envelope_is_an_error() {
        // Gaussian tails underflow far from the centers.
        let p = PulseParams::gaussian(1.0, 200.0, 0.5, 0.0);
        assert!(matches!(
            omega_d(&p, 0.0),
            Err(Error::DegenerateEnvelope { .. })
        ));
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let h = 1e-6;
        let families = [
            gaussian_ref(2.0),
            gaussian_ref(1.25),
            PulseParams::exponential(angular_from_mhz(1.2), 2.0, 2.0 / 15.0),
            PulseParams::trigonometric(angular_from_mhz(0.5), 2.0),
        ];
        for p in families {
            for k in 1..200 {
                let t = p.duration * k as f64 / 200.0;
                let s = sample_envelope(&p, t).unwrap();
                let fwd = sample_envelope(&p, t + h).unwrap();
                let bwd = sample_envelope(&p, t - h).unwrap();
                let fd_p = (fwd.omega_p - bwd.omega_p) / (2.0 * h);
                let fd_s = (fwd.omega_s - bwd.omega_s) / (2.0 * h);
                // relative to the derivative scale Ω₀/τ, so zero crossings do not blow up
                let scale = p.omega0 / p.duration;
                assert!((fd_p - s.d_omega_p).abs() <= 1e-8 * s.d_omega_p.abs().max(scale));
                assert!((fd_s - s.d_omega_s).abs() <= 1e-8 * s.d_omega_s.abs().max(scale));
            }
        }
    }

    #[test]
    fn omega_d_closed_forms() {
        let p = PulseParams::trigonometric(angular_from_mhz(0.5), 2.0);
        for k in 0..=100 {
            let t = 2.0 * k as f64 / 100.0;
            assert!(rel(omega_d(&p, t).unwrap().norm(), PI / 2.0) < 1e-12);
        }
        let g = gaussian_ref(2.0);
        let peak = 4.0 * g.delta_t / (g.sigma * g.sigma);
        assert!(rel(omega_d(&g, 1.0).unwrap().norm(), peak) < 1e-12);
        for k in 0..=1000 {
            let t = 2.0 * k as f64 / 1000.0;
            let closed = peak / (peak * (t - 1.0)).cosh();
            assert!(rel(omega_d(&g, t).unwrap().norm(), closed) < 1e-10);
        }
        let e = PulseParams::exponential(angular_from_mhz(1.2), 2.0, 2.0 / 15.0);
        assert!(rel(omega_d(&e, 1.0).unwrap().norm(), 1.0 / (2.0 * e.sigma)) < 1e-12);
    }

    #[test]
    fn omega_d_phase_follows_wronskian_sign() {
        let g = gaussian_ref(2.0);
        for k in 0..=50 {
            let t = 2.0 * k as f64 / 50.0;
            let env = sample_envelope(&g, t).unwrap();
            if env.wronskian() > 0.0 {
                assert!((omega_d(&g, t).unwrap().arg() + PI / 2.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn correction_amplitude_reference_value() {
        let g = gaussian_ref(2.0);
        let corr = CorrectionParams::new(angular_from_mhz(3.0));
        let c = sample_correction(&g, &corr, 1.0).unwrap();
        assert!(rel(mhz_from_angular(c.omega_a.norm()), 2.6221) < 1e-4);
        assert!(rel(mhz_from_angular(c.omega_b.norm()), 2.6221) < 1e-4);

        let e = PulseParams::exponential(angular_from_mhz(1.2), 2.0, 2.0 / 15.0);
        let c = sample_correction(&e, &corr, 1.0).unwrap();
        assert!(rel(c.omega_a.norm(), (corr.delta / e.sigma).sqrt()) < 1e-12);

        let tr = PulseParams::trigonometric(angular_from_mhz(0.5), 2.0);
        let corr = CorrectionParams::new(angular_from_mhz(20.0));
        let expected = (2.0 * PI * corr.delta / 2.0).sqrt();
        for t in [0.0, 0.3, 1.0, 1.7, 2.0] {
            let c = sample_correction(&tr, &corr, t).unwrap();
            assert!(rel(c.omega_a.norm(), expected) < 1e-12);
        }
    }

    #[test]
    fn negative_detuning_uses_magnitude() {
        let g = gaussian_ref(2.0);
        let plus = sample_correction(&g, &CorrectionParams::new(3.0), 0.7).unwrap();
        let minus = sample_correction(&g, &CorrectionParams::new(-3.0), 0.7).unwrap();
        assert_eq!(plus, minus);
    }

    #[test]
    fn adiabaticity_figure_values() {
        let g = gaussian_ref(2.0);
        let fig = adiabaticity_figure(&g);
        assert!(!fig.proxy);
        assert!(rel(fig.value, 2.0 * PI * 0.4) < 1e-14);
        let mut g0 = g;
        g0.delta_t = 0.0;
        assert_eq!(adiabaticity_figure(&g0).value, 0.0);
        g0.omega0 = 0.0;
        assert_eq!(adiabaticity_figure(&g0).value, 0.0);
        let tr = PulseParams::trigonometric(2.0, 3.0);
        assert_eq!(
            adiabaticity_figure(&tr),
            AdiabaticityFigure {
                value: 6.0,
                proxy: true
            }
        );
    }

    fn any_params() -> impl Strategy<Value = PulseParams> {
        (
            0.1f64..30.0,
            0.3f64..8.0,
            0.05f64..0.4,
            0.0f64..0.3,
            0usize..3,
        )
            .prop_map(|(w0, t_total, sigma_frac, dt_frac, fam)| match fam {
                0 => PulseParams::gaussian(w0, t_total, sigma_frac * t_total, dt_frac * t_total),
                1 => PulseParams::exponential(w0, t_total, sigma_frac * t_total),
                _ => PulseParams::trigonometric(w0, t_total),
            })
    }

    proptest! {
        #[test]
        fn correction_pair_has_equal_magnitudes(
            p in any_params(),
            frac in 0.0f64..=1.0,
            delta in prop_oneof![-100.0f64..-0.1, 0.1f64..100.0],
            phase in -PI..PI,
        ) {
            let t = frac * p.duration;
            let corr = CorrectionParams { delta, phase_a: phase };
            let c = sample_correction(&p, &corr, t).unwrap();
            // same radical; only the polar→cartesian rounding separates them
            prop_assert!((c.omega_a.norm() - c.omega_b.norm()).abs() <= 4.0 * f64::EPSILON * c.omega_b.norm());
            if c.omega_b.norm() > 0.0 {
                let diff = (c.omega_a / c.omega_b).arg();
                prop_assert!((diff - phase).abs() < 1e-12);
            }
            let env = sample_envelope(&p, t).unwrap();
            prop_assert!(env.omega_p >= 0.0 && env.omega_s >= 0.0);
        }

        #[test]
        fn gaussian_mirror_symmetry(
            w0 in 0.1f64..30.0, t_total in 0.3f64..8.0, sf in 0.05f64..0.4,
            df in 0.0f64..0.3, frac in 0.0f64..=1.0,
        ) {
            let p = PulseParams::gaussian(w0, t_total, sf * t_total, df * t_total);
            let t = frac * t_total;
            let a = sample_envelope(&p, t).unwrap();
            let b = sample_envelope(&p, t_total - t).unwrap();
            prop_assert!((a.omega_s - b.omega_p).abs() <= 1e-12 * w0);
        }
    }
}
