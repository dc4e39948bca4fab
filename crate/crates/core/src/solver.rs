//! Steady states on a finite zero-padded window.
//!
//! A profile u solves ε(u_{n+1} − 2u_n + u_{n−1}) − u_n + |u_n|^{p−1}u_n −
//! γ|u_n|^{q−1}u_n = 0 with zero Dirichlet values outside the window. At
//! ε = 0 the code symbols placed at their root values solve this exactly;
//! Newton continuation carries the seed to ε > 0. Profiles decay like
//! ε^{|n|} away from the excited block, so a modest buffer of padding sites
//! keeps the truncation error below the boundary tolerance.

use alloc::vec;
use alloc::vec::Vec;

use crate::codes::Code;
use crate::float::abs;
use crate::linalg::SymTridiag;
use crate::model::{ModelParams, RootPair};
use crate::{Error, Result};

/// Real amplitudes on a finite window. `offset` is the lattice index of the
/// first stored site; everything outside the window is implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeProfile {
    offset: i64,
    values: Vec<f64>,
}

impl LatticeProfile {
    pub fn new(offset: i64, values: Vec<f64>) -> Self {
        assert!(!values.is_empty());
        Self { offset, values }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window(&self) -> usize {
        self.values.len()
    }

    /// Site value with zero padding outside the window.
    pub fn site(&self, n: i64) -> f64 {
        let j = n - self.offset;
        if j < 0 || j as usize >= self.values.len() {
            0.0
        } else {
            self.values[j as usize]
        }
    }

    pub fn norm2(&self) -> f64 {
        crate::float::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    /// Largest boundary amplitude, the truncation-quality figure.
    pub fn boundary_amplitude(&self) -> f64 {
        abs(self.values[0]).max(abs(*self.values.last().unwrap()))
    }

    /// Same profile with `extra` zero sites appended on each side.
    pub fn padded(&self, extra: usize) -> LatticeProfile {
        let mut values = vec![0.0; self.values.len() + 2 * extra];
        values[extra..extra + self.values.len()].copy_from_slice(&self.values);
        LatticeProfile {
            offset: self.offset - extra as i64,
            values,
        }
    }

    pub fn mirrored(&self) -> LatticeProfile {
        LatticeProfile {
            offset: self.offset,
            values: self.values.iter().rev().copied().collect(),
        }
    }

    pub fn negated(&self) -> LatticeProfile {
        LatticeProfile {
            offset: self.offset,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Knobs for the Newton solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Max-norm residual target.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest admissible boundary amplitude before the window is enlarged.
    pub boundary_tol: f64,
    /// Zero padding sites on each side of the code block.
    pub buffer: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            boundary_tol: 1e-10,
            buffer: 20,
        }
    }
}

/// Anticontinuum seed: the code's root values at sites 1..=N surrounded by
/// `buffer` zero sites on each side.
pub fn seed_profile(code: &Code, roots: &RootPair, buffer: usize) -> LatticeProfile {
    let n = code.len();
    let mut values = vec![0.0; n + 2 * buffer];
    for (j, s) in code.symbols().iter().enumerate() {
        values[buffer + j] = s.value(roots);
    }
    LatticeProfile::new(1 - buffer as i64, values)
}

/// Componentwise residual ε·Δ₂u − f(u) with zero Dirichlet boundaries.
pub fn residual(profile: &LatticeProfile, params: &ModelParams) -> Vec<f64> {
    let v = profile.values();
    let m = v.len();
    let mut r = vec![0.0; m];
    for j in 0..m {
        let left = if j > 0 { v[j - 1] } else { 0.0 };
        let right = if j + 1 < m { v[j + 1] } else { 0.0 };
        r[j] = params.eps * (right - 2.0 * v[j] + left) - params.f(v[j]);
    }
    r
}

pub fn residual_norm(profile: &LatticeProfile, params: &ModelParams) -> f64 {
    residual(profile, params)
        .iter()
        .fold(0.0f64, |m, &x| m.max(abs(x)))
}

/// The linearization L⁺ of the steady-state map at `profile`: symmetric
/// tridiagonal with diagonal 2ε + 1 − p|u|^{p−1} + γq|u|^{q−1} and
/// off-diagonal −ε. The Newton matrix is −L⁺.
pub fn jacobian(profile: &LatticeProfile, params: &ModelParams) -> SymTridiag {
    let diag = profile
        .values()
        .iter()
        .map(|&u| 2.0 * params.eps + params.f_prime(u))
        .collect();
    SymTridiag::with_constant_off(diag, -params.eps)
}

/// Newton iteration from `seed`, keeping the window large enough that the
/// boundary sites stay below `boundary_tol` (the buffer doubles on each of
/// up to three enlargements). The solved profile must reproduce the seed's
/// sign pattern on the seed's nonzero sites; continuation that drifts into
/// a different code's basin is reported as an error rather than returned.
pub fn newton_solve(
    seed: &LatticeProfile,
    params: &ModelParams,
    settings: &NewtonSettings,
) -> Result<LatticeProfile> {
    let mut current = seed.clone();
    let mut extra = settings.buffer.max(1);
    for _enlargement in 0..=3 {
        let (solved, _history) = newton_iterate(&current, params, settings.tol, settings.max_iter)?;
        if solved.boundary_amplitude() <= settings.boundary_tol {
            verify_sign_pattern(seed, &solved)?;
            return Ok(solved);
        }
        current = solved.padded(extra);
        extra *= 2;
    }
    Err(Error::WindowTooSmall)
}

/// Plain Newton loop; returns the solution and the residual max-norm after
/// each iteration (the 0th entry is the seed residual).
pub(crate) fn newton_iterate(
    seed: &LatticeProfile,
    params: &ModelParams,
    tol: f64,
    max_iter: usize,
) -> Result<(LatticeProfile, Vec<f64>)> {
    let mut u = seed.clone();
    let mut history = Vec::with_capacity(max_iter + 1);
    let mut res = residual(&u, params);
    let mut res_norm = res.iter().fold(0.0f64, |m, &x| m.max(abs(x)));
    history.push(res_norm);

    for _ in 0..max_iter {
        if res_norm < tol {
            return Ok((u, history));
        }
        // Newton step: (−L⁺) δ = −residual, i.e. L⁺ δ = residual.
        let lplus = jacobian(&u, params);
        let delta = lplus
            .solve(&res)
            .ok_or(Error::Numerical(alloc::string::String::from(
                "singular Newton Jacobian",
            )))?;
        let values: Vec<f64> = u
            .values()
            .iter()
            .zip(&delta)
            .map(|(v, d)| v + d)
            .collect();
        u = LatticeProfile::new(u.offset(), values);
        res = residual(&u, params);
        res_norm = res.iter().fold(0.0f64, |m, &x| m.max(abs(x)));
        history.push(res_norm);
        if !res_norm.is_finite() {
            break;
        }
    }
    if res_norm < tol {
        Ok((u, history))
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual: res_norm,
        })
    }
}

/// The solved profile must keep the seed's signs on every site where the
/// seed is nonzero; padding sites inherit the nearest interior sign and are
/// not constrained.
fn verify_sign_pattern(seed: &LatticeProfile, solved: &LatticeProfile) -> Result<()> {
    for (j, &s) in seed.values().iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let n = seed.offset() + j as i64;
        let v = solved.site(n);
        if v == 0.0 || (v > 0.0) != (s > 0.0) {
            return Err(Error::SignPatternBroken);
        }
    }
    Ok(())
}
