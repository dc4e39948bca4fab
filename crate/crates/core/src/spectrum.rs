//! Spectral stability of a steady lattice state.
//!
//! Linearizing the flow about a real profile u and separating variables
//! leads to the pair of symmetric tridiagonal operators L⁻ and L⁺ with
//! diagonals
//!
//!   Dₙ⁻ = 2ε + 1 − |uₙ|^{p−1} + γ|uₙ|^{q−1},
//!   Dₙ⁺ = 2ε + 1 − p|uₙ|^{p−1} + γq|uₙ|^{q−1},
//!
//! off-diagonal −ε, and the eigenvalue problem L⁺L⁻w = λw with λ = ω².
//! The state is spectrally stable when every ω is real, i.e. every λ is
//! real and nonnegative. L⁻ annihilates the profile itself (the phase
//! mode), so one λ = 0 is always present and is identified by eigenvector
//! overlap with u, never by magnitude.
//!
//! Near the anticontinuum limit the O(ε) eigenvalues are governed by the
//! N×N reduction on the excited block: L̃⁻ has diagonal
//! D̃ₙ⁻ = (ũ_{n−1} + ũ_{n+1})/ũₙ with zero boundary values and off-diagonal
//! −1, and L̃⁺ is diagonal with entries f′(a) or f′(A) per symbol. The full
//! eigenvalues satisfy λ = ε λ̃ + O(ε²) for simple λ̃.
//!
//! Negative-index bookkeeping: with σ the sign indicator of ⟨(L⁺)⁻¹u, u⟩,
//! the counts of complex pairs N_c, of real negative λ split by Krein sign
//! N_r±, and of real positive λ split by Krein sign N_i± obey
//!
//!   N_c + N_r⁻ + N_i⁻ = n(L⁺) − σ,
//!   N_c + N_r⁺ + N_i⁻ = n(L⁻),
//!
//! where n(·) counts negative eigenvalues. These identities, the Sturm law
//! n(L̃⁻) = flips(code), and the symbol law n(L̃⁺) = K are exposed here both
//! as computations and as analytic predictions for the four solvable code
//! families.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::codes::Code;
use crate::complex::Complex;
use crate::float::abs;
use crate::linalg::{eigen, Eigen, Inertia, Mat, SymTridiag};
use crate::model::{ModelParams, RootPair};
use crate::solver::LatticeProfile;
use crate::{Error, Result};

/// Relative threshold declaring an eigenvalue's imaginary part genuine.
const COMPLEX_TOL: f64 = 1e-9;
/// Relative threshold for real-negative classification.
const NEG_TOL: f64 = 1e-9;
/// Relative threshold under which eigenvalues count as zero.
const ZERO_TOL: f64 = 1e-8;
/// Zero-cluster threshold for the reduced problem. A defective double zero
/// perturbs numerically at the sqrt of machine precision (~1.5e-8), so the
/// cluster test needs headroom above ZERO_TOL; genuine nonzero reduced
/// eigenvalues sit many orders higher.
const ZERO_CLUSTER_TOL: f64 = 1e-7;
/// Two eigenvalues closer than this (relative) make the reduced verdict
/// unreliable: multiple eigenvalues may pick up complex corrections.
const COINCIDENCE_TOL: f64 = 1e-8;
/// Relative degeneracy threshold for σ, scaled by a² + A².
const SIGMA_DEGENERACY_TOL: f64 = 1e-9;
/// Minimum eigenvector overlap with the profile that identifies the phase mode.
const PHASE_OVERLAP: f64 = 0.999;

/// The linearization operators about a solved profile.
#[derive(Debug, Clone)]
pub struct LinearOps {
    pub l_minus: SymTridiag,
    pub l_plus: SymTridiag,
}

/// The N×N anticontinuum reduction: tridiagonal L̃⁻ and diagonal L̃⁺.
#[derive(Debug, Clone)]
pub struct TruncatedPencil {
    pub l_minus: SymTridiag,
    pub l_plus_diag: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KreinSign {
    Positive,
    Negative,
    Degenerate,
}

/// Sign indicator of ⟨(L⁺)⁻¹u, u⟩: 1 when negative, 0 when positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaClass {
    Zero,
    One,
    Degenerate,
}

impl SigmaClass {
    pub fn from_quantity(quantity: f64, amplitude_scale: f64) -> SigmaClass {
        if abs(quantity) < SIGMA_DEGENERACY_TOL * amplitude_scale {
            SigmaClass::Degenerate
        } else if quantity < 0.0 {
            SigmaClass::One
        } else {
            SigmaClass::Zero
        }
    }

    pub fn indicator(self) -> Option<usize> {
        match self {
            SigmaClass::Zero => Some(0),
            SigmaClass::One => Some(1),
            SigmaClass::Degenerate => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

/// Eigenvalue counts split by Krein signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IndexCounts {
    /// Complex quadruples, counted once per conjugate pair with Im λ > 0.
    pub n_c: usize,
    /// Real negative λ with positive Krein quadratic form.
    pub n_r_plus: usize,
    /// Real negative λ with negative Krein quadratic form.
    pub n_r_minus: usize,
    /// Real positive λ with positive Krein quadratic form.
    pub n_i_plus: usize,
    /// Real positive λ with negative Krein quadratic form.
    pub n_i_minus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KreinEntry {
    pub lambda: f64,
    pub sign: KreinSign,
}

/// Everything the stability analysis of one state produces.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// λ = ω², sorted by (Re, Im).
    pub eigenvalues: Vec<Complex>,
    /// Principal square roots ω of the eigenvalues.
    pub omega: Vec<Complex>,
    /// Krein data for every real eigenvalue other than the phase mode.
    pub krein: Vec<KreinEntry>,
    pub counts: IndexCounts,
    pub n_l_plus: usize,
    pub n_l_minus: usize,
    pub sigma: SigmaClass,
    pub verdict: Verdict,
    /// ‖L⁻u‖ / ‖u‖, the phase-mode identification residual.
    pub zero_mode_check: f64,
    /// Index of the identified phase-mode eigenvalue in `eigenvalues`.
    pub zero_mode_index: Option<usize>,
    pub diagnostic: Option<String>,
}

/// Build L⁻ and L⁺ for a profile.
pub fn build_full_ops(profile: &LatticeProfile, params: &ModelParams) -> LinearOps {
    let diag_minus = profile
        .values()
        .iter()
        .map(|&u| {
            let au = abs(u);
            2.0 * params.eps + 1.0 - crate::float::powi(au, params.p - 1)
                + params.gamma * crate::float::powi(au, params.q - 1)
        })
        .collect();
    LinearOps {
        l_minus: SymTridiag::with_constant_off(diag_minus, -params.eps),
        l_plus: crate::solver::jacobian(profile, params),
    }
}

/// Build the N×N reduced pencil straight from a code and its root values.
pub fn build_truncated(code: &Code, roots: &RootPair) -> TruncatedPencil {
    let amps = code.amplitudes(roots);
    let n = amps.len();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let left = if i > 0 { amps[i - 1] } else { 0.0 };
        let right = if i + 1 < n { amps[i + 1] } else { 0.0 };
        diag.push((left + right) / amps[i]);
    }
    let l_plus_diag = code
        .symbols()
        .iter()
        .map(|s| roots.slope(s.is_small()))
        .collect();
    TruncatedPencil {
        l_minus: SymTridiag::with_constant_off(diag, -1.0),
        l_plus_diag,
    }
}

impl TruncatedPencil {
    pub fn n(&self) -> usize {
        self.l_plus_diag.len()
    }

    /// L̃⁺ as a tridiagonal operator (zero off-diagonal).
    pub fn l_plus(&self) -> SymTridiag {
        SymTridiag::with_constant_off(self.l_plus_diag.clone(), 0.0)
    }
}

/// Dense product of two symmetric tridiagonal operators.
fn tridiag_product(a: &SymTridiag, b: &SymTridiag) -> Mat {
    let n = a.n();
    let mut out = Mat::zeros(n, n);
    let a_entry = |i: usize, k: usize| -> f64 {
        if i == k {
            a.diag[i]
        } else if k + 1 == i {
            a.off[k]
        } else if i + 1 == k {
            a.off[i]
        } else {
            0.0
        }
    };
    for i in 0..n {
        let k_lo = i.saturating_sub(1);
        let k_hi = (i + 1).min(n - 1);
        for k in k_lo..=k_hi {
            let aik = a_entry(i, k);
            if aik == 0.0 {
                continue;
            }
            if k > 0 {
                out.add_to(i, k - 1, aik * b.off[k - 1]);
            }
            out.add_to(i, k, aik * b.diag[k]);
            if k + 1 < n {
                out.add_to(i, k + 1, aik * b.off[k]);
            }
        }
    }
    out
}

/// Eigenvalues and eigenvectors of the reduced product L̃⁺L̃⁻; the structural
/// zero with eigenvector ũ is always among them.
pub fn truncated_eigs(pencil: &TruncatedPencil) -> Result<Eigen> {
    let n = pencil.n();
    let mut product = Mat::zeros(n, n);
    for i in 0..n {
        let scale = pencil.l_plus_diag[i];
        if i > 0 {
            product.set(i, i - 1, scale * pencil.l_minus.off[i - 1]);
        }
        product.set(i, i, scale * pencil.l_minus.diag[i]);
        if i + 1 < n {
            product.set(i, i + 1, scale * pencil.l_minus.off[i]);
        }
    }
    eigen(&product)
}

/// Eigenvalues and eigenvectors of the full product L⁺L⁻ on the window.
pub fn full_eigs(ops: &LinearOps) -> Result<Eigen> {
    eigen(&tridiag_product(&ops.l_plus, &ops.l_minus))
}

/// Sign of ⟨(L⁺)⁻¹w, w⟩ for the eigenvector of a real eigenvalue.
/// `degeneracy_tol` is an absolute threshold on the quadratic form per unit
/// ‖w‖².
pub fn krein_signature(
    eigvec: &[f64],
    l_plus: &SymTridiag,
    degeneracy_tol: f64,
) -> Result<KreinSign> {
    let bound = l_plus.bound().max(1.0);
    let near_zero = l_plus.count_below(1e-12 * bound) - l_plus.count_below(-1e-12 * bound);
    if near_zero > 0 {
        return Err(Error::SingularLplus);
    }
    let x = l_plus.solve(eigvec).ok_or(Error::SingularLplus)?;
    let form: f64 = x.iter().zip(eigvec).map(|(a, b)| a * b).sum();
    let w2: f64 = eigvec.iter().map(|v| v * v).sum();
    if abs(form) < degeneracy_tol * w2 {
        Ok(KreinSign::Degenerate)
    } else if form > 0.0 {
        Ok(KreinSign::Positive)
    } else {
        Ok(KreinSign::Negative)
    }
}

/// The closed form of ⟨(L̃⁺)⁻¹ũ, ũ⟩ for a code with K small symbols:
/// K·a²/f′(a) + (N−K)·A²/f′(A).
pub fn sigma_quantity(code: &Code, roots: &RootPair) -> f64 {
    let k = code.small_count() as f64;
    let n = code.len() as f64;
    k * roots.small * roots.small / roots.df_small
        + (n - k) * roots.large * roots.large / roots.df_large
}

/// σ classification for a code, with the degeneracy scale a² + A².
pub fn sigma_class_for(code: &Code, roots: &RootPair) -> SigmaClass {
    let scale = roots.small * roots.small + roots.large * roots.large;
    SigmaClass::from_quantity(sigma_quantity(code, roots), scale)
}

/// Eigenvalue sign counts of a symmetric tridiagonal operator.
pub fn inertia(matrix: &SymTridiag, zero_tol: f64) -> Inertia {
    matrix.inertia(zero_tol)
}

/// Analytic inertia of the reduced pencil for the four solvable families:
/// all-large codes, all-small codes, sign-definite mixed codes, and
/// sign-alternating mixed codes. Everything else is out of reach.
pub fn predict_inertia(code: &Code, roots: &RootPair) -> Result<Inertia> {
    let n = code.len();
    let flips = code.flips();
    let k = code.small_count();
    if code.all_large() {
        return Ok(Inertia {
            neg: flips,
            zero: 1,
            pos: n - flips - 1,
        });
    }
    if code.all_small() {
        return Ok(Inertia {
            neg: n - flips - 1,
            zero: 1,
            pos: flips,
        });
    }
    let sigma0 = sigma_class_for(code, roots)
        .indicator()
        .ok_or(Error::NotApplicable("sigma quantity is degenerate"))?;
    if code.sign_definite() {
        Ok(Inertia {
            neg: k - sigma0,
            zero: 1,
            pos: n - k - (1 - sigma0),
        })
    } else if code.sign_alternating() {
        Ok(Inertia {
            neg: n - k - (1 - sigma0),
            zero: 1,
            pos: k - sigma0,
        })
    } else {
        Err(Error::NotApplicable(
            "code is neither sign-definite nor sign-alternating",
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremFamily {
    /// Sign-definite code with exactly one small symbol: the constrained
    /// energy-minimizer candidate.
    OneSmallSignDefinite,
    /// Sign-alternating code with exactly one large symbol: spectrally stable
    /// without being a constrained minimizer when the inequality holds.
    OneLargeAlternating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck {
    pub family: TheoremFamily,
    pub quantity: f64,
    pub satisfied: bool,
    pub predicted_stable: bool,
}

/// Evaluate the two closed-form stability criteria on the code shapes they
/// cover: a²/f′(a) + (N−1)A²/f′(A) < 0 for one small symbol among large
/// ones, and (N−1)a²/f′(a) + A²/f′(A) > 0 for one large symbol among
/// alternating small ones.
pub fn theorem_conditions(code: &Code, roots: &RootPair) -> Result<TheoremCheck> {
    let n = code.len() as f64;
    let ra = roots.small * roots.small / roots.df_small;
    let rb = roots.large * roots.large / roots.df_large;
    if code.sign_definite() && code.small_count() == 1 {
        let quantity = ra + (n - 1.0) * rb;
        let satisfied = quantity < 0.0;
        return Ok(TheoremCheck {
            family: TheoremFamily::OneSmallSignDefinite,
            quantity,
            satisfied,
            predicted_stable: satisfied,
        });
    }
    if code.sign_alternating() && code.len() - code.small_count() == 1 {
        let quantity = (n - 1.0) * ra + rb;
        let satisfied = quantity > 0.0;
        return Ok(TheoremCheck {
            family: TheoremFamily::OneLargeAlternating,
            quantity,
            satisfied,
            predicted_stable: satisfied,
        });
    }
    Err(Error::NotApplicable(
        "code does not match either analyzed shape",
    ))
}

fn lambda_scale(eig: &Eigen) -> f64 {
    let mut m = 0.0f64;
    for j in 0..eig.n() {
        m = m.max(crate::float::hypot(eig.re[j], eig.im[j]));
    }
    m.max(1.0)
}

/// Classify the full spectrum of a solved profile into a stability report.
///
/// The phase mode is identified by eigenvector overlap with the profile.
/// Degenerate σ, an unidentifiable or multiple zero eigenvalue, or a
/// violated count identity all yield `Inconclusive` with a diagnostic;
/// otherwise the verdict is `Stable` exactly when no complex pair and no
/// real negative eigenvalue remains.
pub fn classify(
    ops: &LinearOps,
    eig: &Eigen,
    profile: &LatticeProfile,
    roots: &RootPair,
) -> Result<SpectrumReport> {
    let m = eig.n();
    let scale = lambda_scale(eig);
    let tol_zero = ZERO_TOL * scale;
    let tol_neg = NEG_TOL * scale;
    let tol_im = COMPLEX_TOL * scale;

    let u = profile.values();
    let u_norm = profile.norm2();
    let lminus_u = ops.l_minus.mul_vec(u);
    let zero_mode_check =
        crate::float::sqrt(lminus_u.iter().map(|v| v * v).sum::<f64>()) / u_norm;

    // Phase mode by maximal overlap among real eigenvectors.
    let mut best: Option<(usize, f64)> = None;
    for j in 0..m {
        if !eig.is_real(j) {
            continue;
        }
        let v = eig.vectors.column(j);
        let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        let overlap = abs(dot) / u_norm; // eigenvectors are unit-norm
        if best.map_or(true, |(_, o)| overlap > o) {
            best = Some((j, overlap));
        }
    }

    let mut diagnostic: Option<String> = None;
    let mut inconclusive = false;

    let zero_mode_index = match best {
        Some((j, overlap)) if overlap >= PHASE_OVERLAP => {
            if abs(eig.re[j]) > tol_zero {
                inconclusive = true;
                diagnostic = Some(format!(
                    "phase-mode eigenvalue {:.3e} is not numerically zero",
                    eig.re[j]
                ));
            }
            Some(j)
        }
        Some((_, overlap)) => {
            inconclusive = true;
            diagnostic = Some(format!(
                "no eigenvector overlaps the profile (best overlap {overlap:.6})"
            ));
            None
        }
        None => {
            inconclusive = true;
            diagnostic = Some(String::from("no real eigenvector found for the phase mode"));
            None
        }
    };

    // Zero multiplicity beyond the phase mode.
    let near_zero = (0..m)
        .filter(|&j| crate::float::hypot(eig.re[j], eig.im[j]) < tol_zero)
        .count();
    if near_zero > 1 && !inconclusive {
        inconclusive = true;
        diagnostic = Some(format!("zero eigenvalue has multiplicity {near_zero}"));
    }

    // σ from the full operator.
    let amp_scale = roots.small * roots.small + roots.large * roots.large;
    let bound = ops.l_plus.bound().max(1.0);
    let lp_near_zero =
        ops.l_plus.count_below(1e-12 * bound) - ops.l_plus.count_below(-1e-12 * bound);
    if lp_near_zero > 0 {
        return Err(Error::SingularLplus);
    }
    let lp_inv_u = ops
        .l_plus
        .solve(u)
        .ok_or(Error::SingularLplus)?;
    let sigma_qty: f64 = lp_inv_u.iter().zip(u).map(|(a, b)| a * b).sum();
    let sigma = SigmaClass::from_quantity(sigma_qty, amp_scale);
    if sigma == SigmaClass::Degenerate && !inconclusive {
        inconclusive = true;
        diagnostic = Some(String::from("sigma quantity is degenerate"));
    }

    // Count and Krein-classify everything except the phase mode.
    let mut counts = IndexCounts::default();
    let mut krein = Vec::new();
    let mut unstable = false;
    let mut j = 0;
    while j < m {
        if Some(j) == zero_mode_index {
            j += 1;
            continue;
        }
        if !eig.is_real(j) && abs(eig.im[j]) > tol_im {
            // One count per conjugate pair.
            if eig.im[j] > 0.0 {
                counts.n_c += 1;
                unstable = true;
            }
            j += 1;
            continue;
        }
        let lambda = eig.re[j];
        let v = if eig.is_real(j) {
            eig.vectors.column(j)
        } else {
            // Treat a sub-tolerance imaginary part as real, using the real part.
            eig.vectors.column(j)
        };
        let sign = krein_signature(&v, &ops.l_plus, SIGMA_DEGENERACY_TOL)?;
        if sign == KreinSign::Degenerate && !inconclusive {
            inconclusive = true;
            diagnostic = Some(format!("degenerate Krein form at lambda = {lambda:.6e}"));
        }
        krein.push(KreinEntry { lambda, sign });
        if lambda < -tol_neg {
            unstable = true;
            match sign {
                KreinSign::Positive => counts.n_r_plus += 1,
                _ => counts.n_r_minus += 1,
            }
        } else if lambda > tol_neg {
            match sign {
                KreinSign::Positive => counts.n_i_plus += 1,
                _ => counts.n_i_minus += 1,
            }
        }
        j += 1;
    }

    // Negative eigenvalue counts of the operators themselves.
    let n_l_plus = ops.l_plus.inertia(tol_zero.min(1e-8)).neg;
    let n_l_minus = ops.l_minus.inertia(tol_zero.min(1e-8)).neg;

    // The two completeness identities.
    if let Some(s) = sigma.indicator() {
        let lhs1 = counts.n_c + counts.n_r_minus + counts.n_i_minus;
        let lhs2 = counts.n_c + counts.n_r_plus + counts.n_i_minus;
        if (lhs1 + s != n_l_plus || lhs2 != n_l_minus) && !inconclusive {
            inconclusive = true;
            diagnostic = Some(format!(
                "count identities violated: N_c+N_r^-+N_i^- = {lhs1} vs n(L+)-sigma = {}, \
                 N_c+N_r^++N_i^- = {lhs2} vs n(L-) = {n_l_minus}",
                n_l_plus as i64 - s as i64
            ));
        }
    }

    let verdict = if inconclusive {
        Verdict::Inconclusive
    } else if unstable {
        Verdict::Unstable
    } else {
        Verdict::Stable
    };

    let eigenvalues: Vec<Complex> = (0..m).map(|j| Complex::new(eig.re[j], eig.im[j])).collect();
    let omega = eigenvalues.iter().map(|l| l.sqrt()).collect();

    Ok(SpectrumReport {
        eigenvalues,
        omega,
        krein,
        counts,
        n_l_plus,
        n_l_minus,
        sigma,
        verdict,
        zero_mode_check,
        zero_mode_index,
        diagnostic,
    })
}

/// Truncated-problem verdict for one code: `Stable` when all nonzero λ̃ are
/// real positive with a simple zero, `Unstable` on any robust negative or
/// complex eigenvalue, `Inconclusive` when σ degenerates, the zero is
/// multiple, or two eigenvalues coincide (their corrections may leave the
/// real axis).
pub fn truncated_verdict(pencil: &TruncatedPencil, code: &Code, roots: &RootPair) -> Result<(Verdict, Eigen, Option<String>)> {
    let eig = truncated_eigs(pencil)?;
    let n = eig.n();
    let scale = lambda_scale(&eig);
    let sigma = sigma_class_for(code, roots);
    // A degenerate σ certifies a zero of multiplicity at least two, and the
    // defective cluster can be triple. Numerical splitting of a defective
    // m-fold zero scales like (machine ε)^{1/m}, so the cluster radius must
    // be loosened well past the generic threshold in that case.
    let tol_zero = if sigma == SigmaClass::Degenerate {
        1e-4 * scale
    } else {
        ZERO_CLUSTER_TOL * scale
    };
    let tol_neg = NEG_TOL * scale;
    let tol_im = COMPLEX_TOL * scale;

    let mut any_complex = false;
    let mut any_negative = false;
    let mut zero_count = 0usize;
    for j in 0..n {
        let mag = crate::float::hypot(eig.re[j], eig.im[j]);
        if mag < tol_zero {
            zero_count += 1;
            continue;
        }
        if abs(eig.im[j]) > tol_im {
            any_complex = true;
        } else if eig.re[j] < -tol_neg {
            any_negative = true;
        }
    }

    let mut coincident = false;
    for i in 0..n {
        for j in i + 1..n {
            let d = crate::float::hypot(eig.re[i] - eig.re[j], eig.im[i] - eig.im[j]);
            if d < COINCIDENCE_TOL * scale {
                coincident = true;
            }
        }
    }

    if any_complex || any_negative {
        let note = if any_complex {
            Some(String::from("complex eigenvalues"))
        } else {
            Some(String::from("real negative eigenvalue"))
        };
        return Ok((Verdict::Unstable, eig, note));
    }
    if zero_count != 1 || sigma == SigmaClass::Degenerate || coincident {
        let note = if sigma == SigmaClass::Degenerate {
            Some(String::from("sigma degenerate: zero eigenvalue at least double"))
        } else if zero_count != 1 {
            Some(format!("zero eigenvalue multiplicity {zero_count}"))
        } else {
            Some(String::from("coincident eigenvalues"))
        };
        return Ok((Verdict::Inconclusive, eig, note));
    }
    Ok((Verdict::Stable, eig, None))
}
