//! Pseudo-arclength continuation of ILM branches in the coupling ε.
//!
//! Natural continuation in ε fails where a branch folds back, so the branch
//! is parameterized by arclength in the extended space (u, ε): each step
//! predicts along the unit tangent and corrects on the hyperplane
//! perpendicular to it, with the bordered Jacobian [[−L⁺, Δ₂u], [tᵀ]]
//! staying regular through folds.
//!
//! Two kinds of events are watched along the way:
//!
//! - a **fold**, where the tangent's ε-component changes sign; located by a
//!   secant step on dε/ds.
//! - a **pitchfork**, where an eigenvalue of L⁺ crosses zero while the
//!   branch keeps moving in ε, and the critical eigenvector is antisymmetric
//!   under the reflection (or sign-flipped reflection) that the junction
//!   profile respects; located by bisection on the crossing eigenvalue.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::codes::{Code, Symbol};
use crate::float::{abs, sqrt};
use crate::linalg::{lu_solve, Mat};
use crate::model::{ModelParams, RootPair};
use crate::solver::{newton_iterate, residual, seed_profile, LatticeProfile};
use crate::spectrum::{build_full_ops, classify, full_eigs, Verdict};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationSettings {
    pub step_init: f64,
    pub step_min: f64,
    pub step_max: f64,
    /// Corrector convergence target (max-norm of the lattice residual).
    pub tol: f64,
    pub corrector_max_iter: usize,
    pub max_points: usize,
    /// Padding sites on each side of the code block.
    pub buffer: usize,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            step_init: 1e-3,
            step_min: 1e-6,
            step_max: 5e-3,
            tol: 1e-10,
            corrector_max_iter: 10,
            max_points: 4000,
            buffer: 20,
        }
    }
}

/// One accepted point of a branch, with the diagnostics the event detectors
/// consume.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub eps: f64,
    pub profile: LatticeProfile,
    pub mass: f64,
    pub energy: f64,
    pub verdict: Verdict,
    /// Smallest singular value of the Newton Jacobian (= min |eigenvalue| of L⁺).
    pub jac_min_sv: f64,
    /// ε-component of the unit tangent, the fold indicator.
    pub deps_ds: f64,
    /// Cumulative arclength along the branch.
    pub arc: f64,
    /// Number of negative eigenvalues of L⁺.
    pub jac_neg_count: usize,
    /// Signed eigenvalue of L⁺ closest to zero, the pitchfork indicator.
    pub jac_crit_eig: f64,
    /// ⟨Rv, v⟩/‖v‖² for the critical eigenvector v and window reflection R:
    /// +1 flags antisymmetry under −R, −1 antisymmetry under R.
    pub crit_reflect_score: f64,
    /// ‖Ru − u‖/‖u‖: how far the profile is from plain reflection symmetry.
    pub mismatch_r: f64,
    /// ‖Ru + u‖/‖u‖: how far from sign-flipped reflection symmetry.
    pub mismatch_neg_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Fold,
    Pitchfork,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationEvent {
    pub kind: EventKind,
    pub eps_at: f64,
    pub detail: String,
}

/// Fold scan over consecutive points: the tangent's ε-component changes
/// sign. The location comes from one secant step on dε/ds, integrated to a
/// quadratic estimate of ε at the turning point.
pub fn detect_fold(points: &[BranchPoint]) -> Option<BifurcationEvent> {
    for pair in points.windows(2) {
        let (p0, p1) = (&pair[0], &pair[1]);
        let (t0, t1) = (p0.deps_ds, p1.deps_ds);
        // A tangent sampled exactly at zero is the turning point itself.
        let eps_at = if t1 == 0.0 {
            p1.eps
        } else if t0 == 0.0 {
            p0.eps
        } else if (t0 > 0.0) != (t1 > 0.0) {
            let h = p1.arc - p0.arc;
            p0.eps + 0.5 * h * t0 * t0 / (t0 - t1)
        } else {
            continue;
        };
        return Some(BifurcationEvent {
            kind: EventKind::Fold,
            eps_at,
            detail: String::from("merging branch unidentified"),
        });
    }
    None
}

/// Pitchfork scan over consecutive points: an L⁺ eigenvalue crosses zero
/// while dε/ds keeps its sign, and the critical eigenvector is antisymmetric
/// under the reflection the nearby profile respects. The location is the
/// secant zero of the crossing eigenvalue; live continuation refines it by
/// bisection afterwards.
pub fn detect_pitchfork(points: &[BranchPoint]) -> Option<BifurcationEvent> {
    for pair in points.windows(2) {
        let (p0, p1) = (&pair[0], &pair[1]);
        let (m0, m1) = (p0.jac_crit_eig, p1.jac_crit_eig);
        let zero_hit = m0 == 0.0 || m1 == 0.0;
        // The inertia change guards against the nearest-to-zero eigenvalue
        // switching identity without any actual crossing.
        if p0.jac_neg_count == p1.jac_neg_count && !zero_hit {
            continue;
        }
        if p0.deps_ds != 0.0 && p1.deps_ds != 0.0 && (p0.deps_ds > 0.0) != (p1.deps_ds > 0.0) {
            continue; // the fold detector owns this interval
        }
        if !zero_hit && (m0 > 0.0) == (m1 > 0.0) {
            continue;
        }
        // The point nearer the crossing carries the cleaner eigenvector.
        let near = if abs(m0) < abs(m1) { p0 } else { p1 };
        let score = near.crit_reflect_score;
        let symmetric_enough = if score > 0.8 {
            near.mismatch_neg_r < 0.5
        } else if score < -0.8 {
            near.mismatch_r < 0.5
        } else {
            false
        };
        if !symmetric_enough {
            continue;
        }
        let eps_at = if m0 == 0.0 {
            p0.eps
        } else if m1 == 0.0 {
            p1.eps
        } else {
            p0.eps + (p1.eps - p0.eps) * m0 / (m0 - m1)
        };
        let which = if score > 0.0 { "-R" } else { "R" };
        return Some(BifurcationEvent {
            kind: EventKind::Pitchfork,
            eps_at,
            detail: format!("connects {which}-symmetric branches"),
        });
    }
    None
}

/// Continue the branch of `code` from the anticontinuum limit up to
/// `eps_max`, tagging stability at every accepted point and recording fold
/// and pitchfork events.
pub fn continue_branch(
    code: &Code,
    params_base: &ModelParams,
    eps_max: f64,
    step: f64,
    settings: &ContinuationSettings,
) -> Result<(Vec<BranchPoint>, Vec<BifurcationEvent>)> {
    if !(eps_max > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "eps_max and step must be positive, got {eps_max}, {step}"
        )));
    }
    let roots = params_base.find_roots()?;

    // First point by natural continuation from the anticontinuum seed.
    let eps0 = step;
    let params0 = params_base.with_eps(eps0);
    let seed = seed_profile(code, &roots, settings.buffer);
    let (u0, _) = newton_iterate(&seed, &params0, settings.tol, 50)
        .map_err(|e| Error::InitialSolveFailed(format!("{e}")))?;

    // Initial tangent from du/dε = (L⁺)⁻¹ Δ₂u, oriented toward growing ε.
    let lplus = crate::solver::jacobian(&u0, &params0);
    let rhs = delta2(u0.values());
    let du = lplus
        .solve(&rhs)
        .ok_or_else(|| Error::InitialSolveFailed(String::from("singular Jacobian at start")))?;
    let mut tangent = make_tangent(du, 1.0);

    let mut points: Vec<BranchPoint> = Vec::new();
    let mut events: Vec<BifurcationEvent> = Vec::new();
    let first = branch_point(&u0, params_base, eps0, &roots, tangent.eps, 0.0)?;
    points.push(first);

    let mut ds = step.min(settings.step_max);
    let mut current = u0;
    let mut eps = eps0;
    let mut arc = 0.0;

    while points.len() < settings.max_points {
        let last = points.last().unwrap();
        if last.eps >= eps_max {
            break;
        }
        // Branch came back to the anticontinuum side: stop, name the partner,
        // and settle the event kind. A turning point traversed along an
        // asymmetric pair is a pitchfork junction, not a fold: the branch
        // returns as its own R- or −R-image. A fold proper merges two
        // branches that are not symmetry-related.
        if points.len() > 3 && last.eps < eps0 {
            if let Some(partner) = read_code(&last.profile, &roots) {
                if let Some(ev) = events.iter_mut().find(|e| e.kind == EventKind::Fold) {
                    if partner.canonical() == code.canonical() {
                        let image = if partner == code.reversed() {
                            "R"
                        } else {
                            "-R"
                        };
                        ev.kind = EventKind::Pitchfork;
                        ev.detail = format!(
                            "asymmetric pair rejoins its {image}-image at a symmetric junction"
                        );
                    } else {
                        ev.detail = format!("merges with branch {partner}");
                    }
                }
            }
            break;
        }

        // Predictor.
        let pred_vals: Vec<f64> = current
            .values()
            .iter()
            .zip(&tangent.du)
            .map(|(u, t)| u + ds * t)
            .collect();
        let pred_profile = LatticeProfile::new(current.offset(), pred_vals);
        let pred_eps = eps + ds * tangent.eps;

        match correct(
            &pred_profile,
            pred_eps,
            params_base,
            &tangent,
            ds,
            settings,
        ) {
            Ok((u_new, eps_new, iters)) => {
                // New tangent keeps the previous orientation.
                let params_new = params_base.with_eps(eps_new);
                let t_new = next_tangent(&u_new, &params_new, &tangent)?;
                arc += ds;
                let point = branch_point(&u_new, params_base, eps_new, &roots, t_new.eps, arc)?;
                points.push(point);
                current = u_new;
                eps = eps_new;
                tangent = t_new;

                // Event checks over the freshly completed interval.
                let tail = &points[points.len() - 2..];
                if let Some(ev) = detect_fold(tail) {
                    if !near_existing(&events, ev.eps_at) {
                        events.push(ev);
                    }
                } else if let Some(mut ev) = detect_pitchfork(tail) {
                    if !near_existing(&events, ev.eps_at) {
                        if let Some(refined) = bisect_pitchfork(
                            &points[points.len() - 2],
                            &points[points.len() - 1],
                            params_base,
                            settings,
                        ) {
                            ev.eps_at = refined;
                        }
                        events.push(ev);
                    }
                }

                if iters <= 3 {
                    ds = (ds * 1.3).min(settings.step_max);
                }
            }
            Err(_) => {
                ds *= 0.5;
                if ds < settings.step_min {
                    break;
                }
            }
        }
    }

    Ok((points, events))
}

struct Tangent {
    du: Vec<f64>,
    eps: f64,
}

fn make_tangent(du: Vec<f64>, deps: f64) -> Tangent {
    let norm = sqrt(du.iter().map(|x| x * x).sum::<f64>() + deps * deps);
    Tangent {
        du: du.iter().map(|x| x / norm).collect(),
        eps: deps / norm,
    }
}

fn delta2(u: &[f64]) -> Vec<f64> {
    let m = u.len();
    (0..m)
        .map(|j| {
            let left = if j > 0 { u[j - 1] } else { 0.0 };
            let right = if j + 1 < m { u[j + 1] } else { 0.0 };
            right - 2.0 * u[j] + left
        })
        .collect()
}

/// Bordered system for the new unit tangent: G_u t_u + G_ε t_ε = 0 with
/// ⟨t_prev, t⟩ = 1, then normalized.
fn next_tangent(u: &LatticeProfile, params: &ModelParams, prev: &Tangent) -> Result<Tangent> {
    let m = u.window();
    let a = bordered_matrix(u, params, prev);
    let mut rhs = alloc::vec![0.0; m + 1];
    rhs[m] = 1.0;
    let sol = lu_solve(&a, &rhs).ok_or_else(|| {
        Error::Numerical(String::from("singular bordered system for the tangent"))
    })?;
    Ok(make_tangent(sol[..m].to_vec(), sol[m]))
}

/// The (M+1)×(M+1) bordered matrix [[−L⁺, Δ₂u], [t_uᵀ, t_ε]].
fn bordered_matrix(u: &LatticeProfile, params: &ModelParams, t: &Tangent) -> Mat {
    let m = u.window();
    let lplus = crate::solver::jacobian(u, params);
    let g_eps = delta2(u.values());
    let mut a = Mat::zeros(m + 1, m + 1);
    for i in 0..m {
        a.set(i, i, -lplus.diag[i]);
        if i > 0 {
            a.set(i, i - 1, -lplus.off[i - 1]);
        }
        if i + 1 < m {
            a.set(i, i + 1, -lplus.off[i]);
        }
        a.set(i, m, g_eps[i]);
        a.set(m, i, t.du[i]);
    }
    a.set(m, m, t.eps);
    a
}

/// Newton corrector on the extended system: lattice residual plus the
/// arclength hyperplane ⟨t, x − x_pred⟩ = 0 through the predictor.
fn correct(
    pred: &LatticeProfile,
    pred_eps: f64,
    params_base: &ModelParams,
    tangent: &Tangent,
    _ds: f64,
    settings: &ContinuationSettings,
) -> Result<(LatticeProfile, f64, usize)> {
    let m = pred.window();
    let mut u = pred.clone();
    let mut eps = pred_eps;

    for iter in 0..settings.corrector_max_iter {
        if eps <= 0.0 || !eps.is_finite() {
            return Err(Error::Numerical(String::from("corrector left eps > 0")));
        }
        let params = params_base.with_eps(eps);
        let res = residual(&u, &params);
        let plane: f64 = u
            .values()
            .iter()
            .zip(pred.values())
            .zip(&tangent.du)
            .map(|((a, b), t)| (a - b) * t)
            .sum::<f64>()
            + (eps - pred_eps) * tangent.eps;
        let res_norm = res.iter().fold(abs(plane), |mx, &x| mx.max(abs(x)));
        if res_norm < settings.tol {
            return Ok((u, eps, iter));
        }

        let a = bordered_matrix(&u, &params, tangent);
        let mut rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        rhs.push(-plane);
        let delta = lu_solve(&a, &rhs)
            .ok_or_else(|| Error::Numerical(String::from("singular corrector system")))?;
        let vals: Vec<f64> = u
            .values()
            .iter()
            .zip(&delta[..m])
            .map(|(v, d)| v + d)
            .collect();
        u = LatticeProfile::new(u.offset(), vals);
        eps += delta[m];
    }
    Err(Error::NoConvergence {
        iterations: settings.corrector_max_iter,
        residual: f64::NAN,
    })
}

/// Assemble the per-point diagnostics.
fn branch_point(
    u: &LatticeProfile,
    params_base: &ModelParams,
    eps: f64,
    roots: &RootPair,
    deps_ds: f64,
    arc: f64,
) -> Result<BranchPoint> {
    let params = params_base.with_eps(eps);
    let conserved = params.energy_mass(u);
    let ops = build_full_ops(u, &params);

    let verdict = match full_eigs(&ops).and_then(|eig| classify(&ops, &eig, u, roots)) {
        Ok(report) => report.verdict,
        Err(_) => Verdict::Inconclusive,
    };

    let lplus = ops.l_plus;
    let evals = lplus.eigenvalues();
    let mut crit = evals[0];
    for &ev in &evals {
        if abs(ev) < abs(crit) {
            crit = ev;
        }
    }
    let neg_count = evals.iter().filter(|&&ev| ev < -1e-12).count();

    // Reflection diagnostics for the pitchfork test.
    let vals = u.values();
    let norm = u.norm2();
    let mut diff_r = 0.0;
    let mut diff_neg_r = 0.0;
    let mlen = vals.len();
    for j in 0..mlen {
        let r = vals[mlen - 1 - j];
        diff_r += (r - vals[j]) * (r - vals[j]);
        diff_neg_r += (r + vals[j]) * (r + vals[j]);
    }
    let mismatch_r = sqrt(diff_r) / norm;
    let mismatch_neg_r = sqrt(diff_neg_r) / norm;

    let crit_reflect_score = match lplus.eigenvector(crit) {
        Some(v) => {
            let dot: f64 = v.iter().zip(v.iter().rev()).map(|(a, b)| a * b).sum();
            let nrm: f64 = v.iter().map(|x| x * x).sum();
            dot / nrm
        }
        None => 0.0,
    };

    Ok(BranchPoint {
        eps,
        profile: u.clone(),
        mass: conserved.mass,
        energy: conserved.energy,
        verdict,
        jac_min_sv: abs(crit),
        deps_ds,
        arc,
        jac_neg_count: neg_count,
        jac_crit_eig: crit,
        crit_reflect_score,
        mismatch_r,
        mismatch_neg_r,
    })
}

fn near_existing(events: &[BifurcationEvent], eps_at: f64) -> bool {
    events.iter().any(|e| abs(e.eps_at - eps_at) < 5e-3)
}

/// Bisect in ε between two bracketing branch points on the sign of the L⁺
/// eigenvalue nearest zero, re-solving at fixed ε from the nearer profile.
fn bisect_pitchfork(
    p0: &BranchPoint,
    p1: &BranchPoint,
    params_base: &ModelParams,
    settings: &ContinuationSettings,
) -> Option<f64> {
    let sign0 = p0.jac_crit_eig > 0.0;
    let (mut lo, mut hi) = (p0.eps, p1.eps);
    let mut guess = p0.profile.clone();
    for _ in 0..24 {
        if abs(hi - lo) < 1e-6 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let params = params_base.with_eps(mid);
        let Ok((u, _)) = newton_iterate(&guess, &params, settings.tol, 30) else {
            return None;
        };
        let lplus = crate::solver::jacobian(&u, &params);
        let evals = lplus.eigenvalues();
        let mut crit = evals[0];
        for &ev in &evals {
            if abs(ev) < abs(crit) {
                crit = ev;
            }
        }
        if (crit > 0.0) == sign0 {
            lo = mid;
        } else {
            hi = mid;
        }
        guess = u;
    }
    Some(0.5 * (lo + hi))
}

/// Try to read a code off a near-anticontinuum profile: the contiguous run
/// of sites whose amplitude is within 30% of a root value.
fn read_code(profile: &LatticeProfile, roots: &RootPair) -> Option<Code> {
    let mut symbols: Vec<Symbol> = Vec::new();
    let mut in_block = false;
    let mut done = false;
    for &v in profile.values() {
        let av = abs(v);
        let near_small = abs(av - roots.small) < 0.3 * roots.small;
        let near_large = abs(av - roots.large) < 0.3 * roots.large;
        if near_small || near_large {
            if done {
                return None; // second block: not a single mode
            }
            in_block = true;
            let sym = match (near_small, v > 0.0) {
                (true, true) => Symbol::SmallPlus,
                (true, false) => Symbol::SmallMinus,
                (false, true) => Symbol::LargePlus,
                (false, false) => Symbol::LargeMinus,
            };
            symbols.push(sym);
        } else if av < 0.5 * roots.small {
            if in_block {
                in_block = false;
                done = true;
            }
        } else {
            return None; // amplitude between the root values: unreadable
        }
    }
    Code::new(symbols).ok()
}
