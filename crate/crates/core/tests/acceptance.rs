//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Frequencies are quoted as `Ω/2π` in MHz and converted
//! to rad/μs before use.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;

use sastirap::experiments::{
    grid_pulse, presets, run_efficiency_sweep, run_population_trace, run_robustness_grid,
    sweep_jobs, InitialState, Protocol,
};
use sastirap::hamiltonian::{eigenframe, h_stirap, HamiltonianTrajectory, Level};
use sastirap::propagator::{
    max_intermediate_population, propagate, Method, PropagationConfig, StateVector,
};
use sastirap::pulses::{
    angular_from_mhz, mhz_from_angular, omega_d, sample_correction, sample_envelope, PulseParams,
};
use sastirap::Result;

/// sa − STIRAP efficiency at T = 1.25 μs with the Gaussian presets, from the first
/// converged run (Magnus-4, 20000 and 40000 steps agree to ~1e−11).
const FROZEN_MARGIN_T125: f64 = 0.652564;
const FROZEN_MARGIN_TOL: f64 = 1e-6;

const GRID_POINTS: usize = 1000;

fn grid(duration: f64) -> impl Iterator<Item = f64> {
    (0..GRID_POINTS).map(move |k| duration * k as f64 / (GRID_POINTS - 1) as f64)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

/// Gaussian sets of the duration study plus every robustness-grid cell.
fn reference_gaussians() -> Vec<PulseParams> {
    let mut sets: Vec<_> = [0.5, 1.25, 2.0, 5.5, 6.0, 20.0]
        .iter()
        .map(|&t| presets::gaussian_pulse(t))
        .collect();
    let omega0 = angular_from_mhz(presets::OMEGA0_MHZ);
    for i in 0..9 {
        let sigma = 0.2 + 0.1 * i as f64;
        for j in 0..9 {
            sets.push(grid_pulse(omega0, sigma, 0.25 * j as f64 * sigma));
        }
    }
    sets
}

fn reference_exponential() -> PulseParams {
    PulseParams::exponential(angular_from_mhz(1.2), 2.0, 2.0 / 15.0)
}

fn reference_trigonometric() -> PulseParams {
    PulseParams::trigonometric(angular_from_mhz(0.5), 2.0)
}

/// A propagation to re-check for integrator health.
#[derive(Clone)]
struct Run {
    label: String,
    trajectory: HamiltonianTrajectory,
    initial: StateVector,
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn ac1() -> Result<Outcome> {
    let pulse = presets::gaussian_pulse(2.0);
    let corr = presets::correction();
    let mut peak_a: f64 = 0.0;
    let mut peak_b: f64 = 0.0;
    let n = 200_001;
    for k in 0..n {
        let t = pulse.duration * k as f64 / (n - 1) as f64;
        let c = sample_correction(&pulse, &corr, t)?;
        peak_a = peak_a.max(c.omega_a.norm());
        peak_b = peak_b.max(c.omega_b.norm());
    }
    let (a, b) = (mhz_from_angular(peak_a), mhz_from_angular(peak_b));
    let err = rel(a, 2.6221).max(rel(b, 2.6221));
    outcome(
        err <= 1e-3,
        format!("|Ω_a|/2π = {a:.6} MHz, |Ω_b|/2π = {b:.6} MHz, rel err {err:.2e} vs 2.6221"),
    )
}

fn ac2() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for pulse in [
        reference_trigonometric(),
        PulseParams::trigonometric(angular_from_mhz(2.0), 0.7),
        PulseParams::trigonometric(angular_from_mhz(0.1), 9.0),
    ] {
        let target = PI / pulse.duration;
        for t in grid(pulse.duration) {
            worst = worst.max(rel(omega_d(&pulse, t)?.norm(), target));
        }
    }
    outcome(worst <= 1e-12, format!("max rel |Ω_d| − π/T = {worst:.2e}"))
}

fn ac3() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut sets = 0;
    for pulse in reference_gaussians() {
        let rate = 4.0 * pulse.delta_t / (pulse.sigma * pulse.sigma);
        for t in grid(pulse.duration) {
            let closed = rate / (rate * (t - pulse.duration / 2.0)).cosh();
            worst = worst.max(rel(omega_d(&pulse, t)?.norm(), closed));
        }
        sets += 1;
    }
    let e = reference_exponential();
    for t in grid(e.duration) {
        let x = (t - e.duration / 2.0) / (2.0 * e.sigma);
        let closed = 1.0 / (2.0 * e.sigma * x.cosh());
        worst = worst.max(rel(omega_d(&e, t)?.norm(), closed));
    }
    sets += 1;
    outcome(
        worst <= 1e-10,
        format!("{sets} parameter sets × {GRID_POINTS} points, max rel err {worst:.2e}"),
    )
}

fn ac4() -> Result<Outcome> {
    let mut null_ratio: f64 = 0.0;
    let mut eig_err: f64 = 0.0;
    let families = [
        presets::gaussian_pulse(2.0),
        reference_exponential(),
        reference_trigonometric(),
    ];
    for pulse in families {
        for t in grid(pulse.duration) {
            let h = h_stirap(&pulse, t)?;
            let frame = eigenframe(&pulse, t)?;
            null_ratio = null_ratio.max((h * frame.dark.amplitudes()).norm() / h.norm());

            let env = sample_envelope(&pulse, t)?;
            let half = 0.5 * env.norm_sqr().sqrt();
            let real = h.map(|z| z.re);
            let mut numeric: Vec<f64> = SymmetricEigen::new(real)
                .eigenvalues
                .iter()
                .copied()
                .collect();
            numeric.sort_by(f64::total_cmp);
            for (got, want) in numeric.iter().zip([-half, 0.0, half]) {
                eig_err = eig_err.max((got - want).abs());
            }
        }
    }
    outcome(
        null_ratio <= 1e-12 && eig_err <= 1e-12,
        format!("max ‖H|D⟩‖/‖H‖ = {null_ratio:.2e}, max eigenvalue err {eig_err:.2e} rad/μs"),
    )
}

fn ac5(runs: &mut Vec<Run>) -> Result<Outcome> {
    let mut worst: f64 = 1.0;
    let mut from_level = Vec::new();
    for t in [0.5, 1.25, 2.0] {
        let pulse = presets::gaussian_pulse(t);
        let traj = HamiltonianTrajectory::stirap_plus_exact_cd(pulse);
        let dark = InitialState::DarkAtStart.resolve(&pulse)?;
        let eff = propagate(&traj, &dark, &PropagationConfig::default())?.efficiency;
        worst = worst.min(eff);
        let minus = StateVector::basis(Level::Minus);
        let eff_m1 = propagate(&traj, &minus, &PropagationConfig::default())?.efficiency;
        from_level.push(format!("{t}: {:.2e}", 1.0 - eff_m1));
        runs.push(Run {
            label: format!("exact-cd dark T={t}"),
            trajectory: traj,
            initial: dark,
        });
        runs.push(Run {
            label: format!("exact-cd |−1⟩ T={t}"),
            trajectory: traj,
            initial: minus,
        });
    }
    outcome(
        worst >= 1.0 - 1e-6,
        format!(
            "from D(0): min efficiency 1 − {:.2e}; from |−1⟩ (tail leakage of D(0)): 1 − eff = [{}]",
            1.0 - worst,
            from_level.join(", ")
        ),
    )
}

fn ac6(runs: &mut Vec<Run>) -> Result<Outcome> {
    let spec = presets::gaussian_sweep(0.5, 6.0, 24);
    let rec = run_efficiency_sweep(&spec)?;
    let stirap = rec.series(Protocol::Stirap).expect("stirap series");
    let sa = rec.series(Protocol::SaStirap).expect("sa series");
    let worst_gap = sa
        .efficiency
        .iter()
        .zip(&stirap.efficiency)
        .map(|(a, s)| a - s)
        .fold(f64::INFINITY, f64::min);
    for job in sweep_jobs(&spec)? {
        runs.push(Run {
            label: format!("sweep {}", job.protocol.name()),
            trajectory: job.trajectory,
            initial: job.initial,
        });
    }

    let mut eff = [0.0; 2];
    for (i, protocol) in [Protocol::Stirap, Protocol::SaStirap]
        .into_iter()
        .enumerate()
    {
        let trace = presets::gaussian_trace(1.25, protocol);
        eff[i] = run_population_trace(&trace)?.efficiency;
        runs.push(Run {
            label: format!("{} T=1.25", protocol.name()),
            trajectory: protocol.trajectory(trace.pulse, trace.correction)?,
            initial: trace.initial_state.resolve(&trace.pulse)?,
        });
    }
    let margin = eff[1] - eff[0];
    outcome(
        worst_gap >= -0.02 && margin >= 0.2 && (margin - FROZEN_MARGIN_T125).abs() <= FROZEN_MARGIN_TOL,
        format!(
            "min(sa − stirap) over 24 points = {worst_gap:.4}; margin at 1.25 μs = {margin:.6} (frozen {FROZEN_MARGIN_T125})"
        ),
    )
}

fn ac7(runs: &mut Vec<Run>) -> Result<Outcome> {
    let spec = presets::gaussian_trace(20.0, Protocol::Stirap);
    let eff = run_population_trace(&spec)?.efficiency;
    runs.push(Run {
        label: "stirap T=20".into(),
        trajectory: HamiltonianTrajectory::stirap(spec.pulse),
        initial: spec.initial_state.resolve(&spec.pulse)?,
    });
    outcome(
        eff >= 0.99,
        format!("STIRAP efficiency at T = 20 μs: {eff:.6}"),
    )
}

fn ac8(runs: &mut Vec<Run>) -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for t in [1.25, 2.0] {
        let mut peak = [0.0; 2];
        for (i, protocol) in [Protocol::Stirap, Protocol::SaStirap]
            .into_iter()
            .enumerate()
        {
            let spec = presets::gaussian_trace(t, protocol);
            peak[i] = max_intermediate_population(&run_population_trace(&spec)?);
            runs.push(Run {
                label: format!("{} T={t}", protocol.name()),
                trajectory: protocol.trajectory(spec.pulse, spec.correction)?,
                initial: spec.initial_state.resolve(&spec.pulse)?,
            });
        }
        pass &= peak[1] <= peak[0];
        detail.push(format!("T={t}: sa {:.4} vs stirap {:.4}", peak[1], peak[0]));
    }
    outcome(pass, format!("max P(|0⟩): {}", detail.join("; ")))
}

fn ac9(runs: &mut Vec<Run>) -> Result<Outcome> {
    let spec = presets::robustness_grid();
    let rec = run_robustness_grid(&spec)?;
    let count = |p| {
        rec.series(p)
            .expect("series")
            .efficiency
            .iter()
            .filter(|&&e| e >= 0.9)
            .count()
    };
    let (s, a) = (count(Protocol::Stirap), count(Protocol::SaStirap));
    for job in sweep_jobs(&spec)? {
        runs.push(Run {
            label: format!("grid {}", job.protocol.name()),
            trajectory: job.trajectory,
            initial: job.initial,
        });
    }
    outcome(
        rec.cell_count() == 81 && a > s,
        format!(
            "cells with efficiency ≥ 0.9 of {}: sa {a}, stirap {s}",
            rec.cell_count()
        ),
    )
}

struct Health {
    drift: f64,
    doubling: f64,
    cross: f64,
}

fn max_pop_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.populations()
        .iter()
        .zip(b.populations())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn health(run: &Run) -> Result<Health> {
    let base = PropagationConfig::default();
    let reference = propagate(&run.trajectory, &run.initial, &base)?.final_state;
    let doubled = propagate(
        &run.trajectory,
        &run.initial,
        &base.with_steps(2 * base.step_count),
    )?
    .final_state;
    let rk4 = propagate(
        &run.trajectory,
        &run.initial,
        &base.with_method(Method::Rk4),
    )?
    .final_state;
    Ok(Health {
        drift: (reference.norm() - 1.0).abs(),
        doubling: max_pop_diff(&reference, &doubled),
        cross: max_pop_diff(&reference, &rk4),
    })
}

fn ac10(runs: &[Run]) -> Result<Outcome> {
    let results: Vec<Health> = runs.par_iter().map(health).collect::<Result<_>>()?;
    let worst = |f: fn(&Health) -> f64| {
        results
            .iter()
            .zip(runs)
            .map(|(h, r)| (f(h), r.label.as_str()))
            .fold((0.0, ""), |acc, x| if x.0 > acc.0 { x } else { acc })
    };
    let (drift, d_at) = worst(|h| h.drift);
    let (doubling, s_at) = worst(|h| h.doubling);
    let (cross, c_at) = worst(|h| h.cross);
    outcome(
        drift < 1e-9 && doubling < 1e-8 && cross < 1e-6,
        format!(
            "{} runs; norm drift {drift:.1e} ({d_at}), step doubling {doubling:.1e} ({s_at}), magnus4 vs rk4 {cross:.1e} ({c_at})",
            runs.len()
        ),
    )
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--quiet`; filtering by name is
    // not supported, so every invocation runs the full gate.
    let mut runs = Vec::new();
    let mut failures = 0;
    let mut report = |id: &str, name: &str, started: Instant, result: Result<Outcome>| {
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(o) => {
                if !o.pass {
                    failures += 1;
                }
                let verdict = if o.pass { "PASS" } else { "FAIL" };
                println!("{verdict} {id} {name} [{secs:.2}s]: {}", o.detail);
            }
            Err(e) => {
                failures += 1;
                println!("FAIL {id} {name} [{secs:.2}s]: error kind={} {e}", e.kind());
            }
        }
    };

    let t = Instant::now();
    report("AC1", "correction amplitude", t, ac1());
    let t = Instant::now();
    report("AC2", "constant two-photon pulse", t, ac2());
    let t = Instant::now();
    report("AC3", "closed-form vs direct Ω_d", t, ac3());
    let t = Instant::now();
    report("AC4", "dark-state nullity and eigenstructure", t, ac4());
    let t = Instant::now();
    report("AC5", "exact counterdiabatic transfer", t, ac5(&mut runs));
    let t = Instant::now();
    report("AC6", "protocol dominance", t, ac6(&mut runs));
    let t = Instant::now();
    report("AC7", "adiabatic limit", t, ac7(&mut runs));
    let t = Instant::now();
    report("AC8", "intermediate-state suppression", t, ac8(&mut runs));
    let t = Instant::now();
    report("AC9", "robustness-area extension", t, ac9(&mut runs));
    let t = Instant::now();
    report("AC10", "integrator health", t, ac10(&runs));

    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
