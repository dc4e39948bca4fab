//! Time integration of the lattice flow, used to validate stability
//! verdicts dynamically: i u̇ₙ = −[ε Δ₂uₙ − uₙ + |uₙ|^{p−1}uₙ − γ|uₙ|^{q−1}uₙ].
//!
//! The integrator is classical fixed-step RK4. Mass and energy are
//! conserved by the flow and monitored rather than enforced; the orbital
//! deviation min_α ‖u(t) − e^{iα}u(0)‖ measures departure from the initial
//! orbit with the free phase rotated out analytically.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::float::{abs, ln, powi, sqrt};
use crate::model::ModelParams;
use crate::rng::SplitMix64;
use crate::solver::LatticeProfile;
use crate::{Error, Result};

/// Amplitude beyond which the run is declared blown up.
const BLOWUP_AMPLITUDE: f64 = 1e6;

/// Integration state at one instant.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub t: f64,
    pub amplitudes: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionSample {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    /// min over phase α of ‖u(t) − e^{iα} u(0)‖₂.
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub samples: Vec<EvolutionSample>,
    pub diverged: bool,
    /// Some boundary site exceeded ten times the window tolerance.
    pub boundary_warning: bool,
    pub final_state: EvolutionState,
}

fn rhs(u: &[Complex], params: &ModelParams, out: &mut [Complex]) {
    let m = u.len();
    for j in 0..m {
        let left = if j > 0 { u[j - 1] } else { Complex::ZERO };
        let right = if j + 1 < m { u[j + 1] } else { Complex::ZERO };
        let lap = right + left - u[j].scale(2.0);
        let amp = u[j].abs();
        let nonlinear = 1.0 - powi(amp, params.p - 1) + params.gamma * powi(amp, params.q - 1);
        // du/dt = i (ε Δ₂u − f(u)).
        out[j] = (lap.scale(params.eps) - u[j].scale(nonlinear)).mul_i();
    }
}

fn conserved(u: &[Complex], params: &ModelParams) -> (f64, f64) {
    let m = u.len();
    let mut grad = 0.0;
    let mut onsite = 0.0;
    let mut mass = 0.0;
    for j in 0..=m {
        let here = if j < m { u[j] } else { Complex::ZERO };
        let prev = if j > 0 { u[j - 1] } else { Complex::ZERO };
        grad += (here - prev).abs2();
    }
    for z in u {
        let a = z.abs();
        onsite += -2.0 / (params.p as f64 + 1.0) * powi(a, params.p + 1)
            + 2.0 * params.gamma / (params.q as f64 + 1.0) * powi(a, params.q + 1);
        mass += z.abs2();
    }
    (params.eps * grad + onsite, mass)
}

/// Orbital deviation with the optimal phase rotated out:
/// ‖u‖² + ‖u₀‖² − 2|⟨u₀, u⟩|, square-rooted.
fn orbital_deviation(u: &[Complex], u0: &[Complex]) -> f64 {
    let mut nu = 0.0;
    let mut n0 = 0.0;
    let mut inner = Complex::ZERO;
    for (a, b) in u0.iter().zip(u) {
        nu += b.abs2();
        n0 += a.abs2();
        inner += a.conj() * *b;
    }
    sqrt((nu + n0 - 2.0 * inner.abs()).max(0.0))
}

/// Integrate from `initial` to `t_max` with fixed step `dt`, recording every
/// `stride`-th step (the initial instant is always recorded). Terminates
/// early with the `diverged` flag once any amplitude passes 1e6.
pub fn evolve(
    initial: &[Complex],
    params: &ModelParams,
    t_max: f64,
    dt: f64,
    stride: usize,
) -> Result<Evolution> {
    if !(dt > 0.0) || !(t_max > 0.0) {
        return Err(Error::InvalidParams(alloc::format!(
            "t_max and dt must be positive, got {t_max}, {dt}"
        )));
    }
    let stride = stride.max(1);
    let m = initial.len();
    let steps = libm::ceil(t_max / dt) as usize;
    let mut u = initial.to_vec();
    let u0 = initial.to_vec();

    let mut k1 = vec![Complex::ZERO; m];
    let mut k2 = vec![Complex::ZERO; m];
    let mut k3 = vec![Complex::ZERO; m];
    let mut k4 = vec![Complex::ZERO; m];
    let mut stage = vec![Complex::ZERO; m];

    let mut samples = Vec::with_capacity(steps / stride + 2);
    let record = |t: f64, u: &[Complex], samples: &mut Vec<EvolutionSample>| {
        let (energy, mass) = conserved(u, params);
        samples.push(EvolutionSample {
            t,
            mass,
            energy,
            deviation: orbital_deviation(u, &u0),
        });
    };
    record(0.0, &u, &mut samples);

    let mut diverged = false;
    let mut boundary_warning = false;
    let mut t = 0.0;
    for step in 1..=steps {
        rhs(&u, params, &mut k1);
        for j in 0..m {
            stage[j] = u[j] + k1[j].scale(0.5 * dt);
        }
        rhs(&stage, params, &mut k2);
        for j in 0..m {
            stage[j] = u[j] + k2[j].scale(0.5 * dt);
        }
        rhs(&stage, params, &mut k3);
        for j in 0..m {
            stage[j] = u[j] + k3[j].scale(dt);
        }
        rhs(&stage, params, &mut k4);
        for j in 0..m {
            u[j] += (k1[j] + (k2[j] + k3[j]).scale(2.0) + k4[j]).scale(dt / 6.0);
        }
        t = step as f64 * dt;

        let max_amp = u.iter().fold(0.0f64, |mx, z| mx.max(z.abs()));
        if !max_amp.is_finite() || max_amp > BLOWUP_AMPLITUDE {
            diverged = true;
            record(t, &u, &mut samples);
            break;
        }
        if u[0].abs().max(u[m - 1].abs()) > 1e-9 {
            boundary_warning = true;
        }
        if step % stride == 0 || step == steps {
            record(t, &u, &mut samples);
        }
    }

    Ok(Evolution {
        samples,
        diverged,
        boundary_warning,
        final_state: EvolutionState { t, amplitudes: u },
    })
}

/// Complex initial data from a real profile.
pub fn complex_state(profile: &LatticeProfile) -> Vec<Complex> {
    profile.values().iter().map(|&v| Complex::real(v)).collect()
}

/// Seeded uniform complex perturbation of relative size `rel_size`
/// (componentwise, scaled by the profile sup-norm).
pub fn perturbed_state(profile: &LatticeProfile, rel_size: f64, seed: u64) -> Vec<Complex> {
    let sup = profile
        .values()
        .iter()
        .fold(0.0f64, |mx, &v| mx.max(abs(v)));
    let mut rng = SplitMix64::new(seed);
    profile
        .values()
        .iter()
        .map(|&v| {
            Complex::new(
                v + rel_size * sup * rng.range(-1.0, 1.0),
                rel_size * sup * rng.range(-1.0, 1.0),
            )
        })
        .collect()
}

/// Least-squares slope of ln(deviation) over the automatically selected
/// exponential window: the rising segment ending where the deviation first
/// reaches a third of its maximum (clear of saturation) and reaching about
/// two decades back (clear of the start-up floor). A series that never
/// grows to twenty times its early baseline is reported as not growing.
pub fn growth_rate(samples: &[EvolutionSample]) -> Result<f64> {
    let dev: Vec<f64> = samples.iter().map(|s| s.deviation).collect();
    let max = dev.iter().fold(0.0f64, |m, &d| m.max(d));
    if max <= 0.0 {
        return Err(Error::NotGrowing);
    }

    // Early baseline: median positive deviation over the first tenth of the
    // run. An oscillating but bounded series has a baseline comparable to
    // its maximum; genuine exponential growth dwarfs it.
    let t_end = samples.last().ok_or(Error::NotGrowing)?.t;
    let mut early: Vec<f64> = samples
        .iter()
        .filter(|s| s.t <= 0.1 * t_end && s.deviation > 0.0)
        .map(|s| s.deviation)
        .collect();
    if early.is_empty() {
        return Err(Error::NotGrowing);
    }
    early.sort_by(f64::total_cmp);
    let baseline = early[early.len() / 2];
    if max < 20.0 * baseline {
        return Err(Error::NotGrowing);
    }

    let hi = max / 3.0;
    let j_hi = dev
        .iter()
        .position(|&d| d >= hi)
        .ok_or(Error::NotGrowing)?;
    let lo = (dev[j_hi] / 50.0).max(2.0 * baseline);
    let j_lo = (0..=j_hi).rev().find(|&j| dev[j] <= lo).unwrap_or(0);

    let window: Vec<(f64, f64)> = samples[j_lo..=j_hi]
        .iter()
        .filter(|s| s.deviation > 0.0)
        .map(|s| (s.t, ln(s.deviation)))
        .collect();
    if window.len() < 10 {
        return Err(Error::NotGrowing);
    }
    // Plain least squares on (t, ln d).
    let n = window.len() as f64;
    let st: f64 = window.iter().map(|(t, _)| t).sum();
    let sy: f64 = window.iter().map(|(_, y)| y).sum();
    let stt: f64 = window.iter().map(|(t, _)| t * t).sum();
    let sty: f64 = window.iter().map(|(t, y)| t * y).sum();
    let denom = n * stt - st * st;
    if denom == 0.0 {
        return Err(Error::NotGrowing);
    }
    Ok((n * sty - st * sy) / denom)
}
