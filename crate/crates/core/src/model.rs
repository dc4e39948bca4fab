//! On-site nonlinearity of the competing-powers lattice and its derived
//! quantities.
//!
//! At the anticontinuum limit every site sits at a root of
//!
//!   f(u) = u (1 − |u|^{p−1} + γ |u|^{q−1}),
//!
//! which for γ ∈ (0, γ_{p,q}) has exactly five real roots
//! {0, ±a, ±A} with 0 < a < u_{p,q} < A, f′(a) < 0 and f′(A) > 0. At
//! γ = γ_{p,q} the two positive roots collide at u_{p,q}; above it only the
//! zero state survives, so no localized states exist at all.

use alloc::format;

use crate::float::{abs, powf, powi};
use crate::solver::LatticeProfile;
use crate::{Error, Result};

/// Hard cap on the root-polish loop; in practice a handful of Newton steps
/// suffice once the bisection bracket is tight.
const ROOT_MAX_ITER: usize = 200;

/// Residual level required of the refined roots. Refinement continues past
/// this to machine precision because root error is amplified by 1/f′ in the
/// spectral quantities downstream.
const ROOT_TOL: f64 = 1e-13;

/// Normalized lattice parameters: integer powers 2 ≤ p < q, defocusing
/// strength γ ∈ (0, γ_{p,q}), coupling ε ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: u32,
    pub q: u32,
    pub gamma: f64,
    pub eps: f64,
}

/// The two positive roots of f and the local data attached to them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair {
    /// Smaller nonzero root a.
    pub small: f64,
    /// Larger nonzero root A.
    pub large: f64,
    /// f′(a), negative for every admissible γ.
    pub df_small: f64,
    /// f′(A), positive for every admissible γ.
    pub df_large: f64,
    /// Critical coupling γ_{p,q} for these powers.
    pub gamma_crit: f64,
    /// Double-root location u_{p,q} separating the two roots.
    pub u_double: f64,
}

/// Raw physical constants of the unnormalized lattice equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Inter-site coupling C.
    pub coupling: f64,
    /// Focusing coefficient κ in front of the power-p term.
    pub focusing: f64,
    /// Defocusing coefficient Γ in front of the power-q term.
    pub defocusing: f64,
    /// Oscillation frequency ω.
    pub omega: f64,
}

/// Conserved functionals of a lattice state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    /// Energy H.
    pub energy: f64,
    /// Mass (squared ℓ² norm) Q.
    pub mass: f64,
    /// Augmented energy Λ = H + Q, whose critical points are the steady states.
    pub augmented: f64,
}

fn check_powers(p: u32, q: u32) -> Result<()> {
    if p < 2 || q <= p {
        return Err(Error::InvalidParams(format!(
            "powers must satisfy 2 <= p < q, got p={p}, q={q}"
        )));
    }
    Ok(())
}

/// Critical defocusing strength γ_{p,q} above which f has no nonzero roots:
/// ((p−1)/(q−1)) · ((q−p)/(q−1))^{(q−p)/(p−1)}.
pub fn gamma_crit(p: u32, q: u32) -> Result<f64> {
    check_powers(p, q)?;
    let (pf, qf) = (p as f64, q as f64);
    Ok((pf - 1.0) / (qf - 1.0) * powf((qf - pf) / (qf - 1.0), (qf - pf) / (pf - 1.0)))
}

/// Location u_{p,q} = ((q−1)/(q−p))^{1/(p−1)} where the two positive roots
/// merge at γ = γ_{p,q}.
pub fn u_double_root(p: u32, q: u32) -> Result<f64> {
    check_powers(p, q)?;
    let (pf, qf) = (p as f64, q as f64);
    Ok(powf((qf - 1.0) / (qf - pf), 1.0 / (pf - 1.0)))
}

impl ModelParams {
    /// Validates powers, γ > 0 (the γ = 0 boundary is excluded) and ε ≥ 0.
    /// Whether γ clears γ_{p,q} is checked by [`ModelParams::find_roots`].
    pub fn new(p: u32, q: u32, gamma: f64, eps: f64) -> Result<Self> {
        check_powers(p, q)?;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParams(format!(
                "eps must be nonnegative and finite, got {eps}"
            )));
        }
        Ok(Self { p, q, gamma, eps })
    }

    pub fn with_eps(self, eps: f64) -> Self {
        Self { eps, ..self }
    }

    /// The on-site function f(u) = u(1 − |u|^{p−1} + γ|u|^{q−1}); odd in u.
    pub fn f(&self, u: f64) -> f64 {
        let au = abs(u);
        u * (1.0 - powi(au, self.p - 1) + self.gamma * powi(au, self.q - 1))
    }

    /// f′(u) = 1 − p|u|^{p−1} + γq|u|^{q−1}; even in u.
    pub fn f_prime(&self, u: f64) -> f64 {
        let au = abs(u);
        1.0 - self.p as f64 * powi(au, self.p - 1)
            + self.gamma * self.q as f64 * powi(au, self.q - 1)
    }

    pub fn gamma_crit(&self) -> f64 {
        gamma_crit(self.p, self.q).expect("powers validated at construction")
    }

    /// Both positive roots of f, bracketed on either side of u_{p,q} and
    /// polished to machine precision by safeguarded Newton.
    pub fn find_roots(&self) -> Result<RootPair> {
        let gc = self.gamma_crit();
        if self.gamma >= gc {
            return Err(Error::NoCompetingRoots {
                gamma: self.gamma,
                gamma_crit: gc,
            });
        }
        let u_mid = u_double_root(self.p, self.q)?;

        // f > 0 on (0, a), f < 0 on (a, A), f > 0 beyond A.
        let small = self.refine_root(1e-12 * u_mid, u_mid)?;

        let mut hi = 2.0 * u_mid;
        let mut guard = 0;
        while self.f(hi) <= 0.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::Numerical(format!(
                    "no sign change found for the larger root below u = {hi}"
                )));
            }
        }
        let large = self.refine_root(u_mid, hi)?;

        let df_small = self.f_prime(small);
        let df_large = self.f_prime(large);
        if df_small >= 0.0 || df_large <= 0.0 {
            return Err(Error::Numerical(format!(
                "root slopes have unexpected signs: f'(a)={df_small}, f'(A)={df_large}"
            )));
        }
        Ok(RootPair {
            small,
            large,
            df_small,
            df_large,
            gamma_crit: gc,
            u_double: u_mid,
        })
    }

    /// Refine a root inside a sign-changing bracket: bisection down to
    /// machine width, then Newton polish keeping the smallest |f| seen.
    /// The residual target is relative to f's evaluation magnitude — for
    /// γ → 0 the larger root grows without bound and |f| near it cannot be
    /// driven below the cancellation floor of the power terms.
    fn refine_root(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let mut flo = self.f(lo);
        let fhi = self.f(hi);
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if flo * fhi > 0.0 {
            return Err(Error::Numerical(format!(
                "root bracket [{lo}, {hi}] does not change sign"
            )));
        }

        for _ in 0..ROOT_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break; // bracket at machine width
            }
            let fm = self.f(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }

        let mut x = 0.5 * (lo + hi);
        let mut best = (x, abs(self.f(x)));
        for _ in 0..8 {
            let dfx = self.f_prime(x);
            if dfx == 0.0 {
                break;
            }
            let next = x - self.f(x) / dfx;
            if !next.is_finite() {
                break;
            }
            x = next;
            let fx = abs(self.f(x));
            if fx < best.1 {
                best = (x, fx);
            } else {
                break;
            }
        }

        let (root, fres) = best;
        let eval_scale = abs(root)
            * (1.0 + powi(abs(root), self.p - 1) + self.gamma * powi(abs(root), self.q - 1));
        if fres <= ROOT_TOL * eval_scale.max(1.0) {
            Ok(root)
        } else {
            Err(Error::Numerical(format!(
                "root refinement stalled at |f| = {fres:e}"
            )))
        }
    }

    /// Conserved energy, mass, and augmented energy of a real lattice state
    /// with zero Dirichlet padding outside the window.
    pub fn energy_mass(&self, profile: &LatticeProfile) -> Conserved {
        let values = profile.values();
        let m = values.len();
        let mut grad = 0.0;
        let mut onsite = 0.0;
        let mut mass = 0.0;
        for j in 0..=m {
            let here = if j < m { values[j] } else { 0.0 };
            let prev = if j > 0 { values[j - 1] } else { 0.0 };
            let d = here - prev;
            grad += d * d;
        }
        for &u in values {
            let au = abs(u);
            onsite += -2.0 / (self.p as f64 + 1.0) * powi(au, self.p + 1)
                + 2.0 * self.gamma / (self.q as f64 + 1.0) * powi(au, self.q + 1);
            mass += u * u;
        }
        let energy = self.eps * grad + onsite;
        Conserved {
            energy,
            mass,
            augmented: energy + mass,
        }
    }
}

impl PhysicalParams {
    pub fn new(coupling: f64, focusing: f64, defocusing: f64, omega: f64) -> Result<Self> {
        for (name, v) in [
            ("coupling", coupling),
            ("focusing", focusing),
            ("defocusing", defocusing),
            ("omega", omega),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            coupling,
            focusing,
            defocusing,
            omega,
        })
    }

    /// Map to normalized parameters: after rescaling time by ω and amplitude
    /// by (ω/κ)^{1/(p−1)}, the lattice runs at ε = C/ω and
    /// γ = (Γ/ω)(ω/κ)^{(q−1)/(p−1)}. Returns the parameters and the
    /// amplitude scale relating physical to normalized states.
    pub fn normalize(&self, p: u32, q: u32) -> Result<(ModelParams, f64)> {
        check_powers(p, q)?;
        let (pf, qf) = (p as f64, q as f64);
        let eps = self.coupling / self.omega;
        let ratio = self.omega / self.focusing;
        let gamma = self.defocusing / self.omega * powf(ratio, (qf - 1.0) / (pf - 1.0));
        let scale = powf(ratio, 1.0 / (pf - 1.0));
        let params = ModelParams::new(p, q, gamma, eps)?;
        Ok((params, scale))
    }
}

/// Convenience: amplitude looked up by root kind.
impl RootPair {
    pub fn amplitude(&self, small: bool) -> f64 {
        if small {
            self.small
        } else {
            self.large
        }
    }

    pub fn slope(&self, small: bool) -> f64 {
        if small {
            self.df_small
        } else {
            self.df_large
        }
    }
}

/// Roots for γ = δ·γ_{p,q}; the usual way the scan tables are parameterized.
pub fn params_at_delta(p: u32, q: u32, delta: f64, eps: f64) -> Result<ModelParams> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!(
            "delta must lie strictly inside (0, 1), got {delta}"
        )));
    }
    let gc = gamma_crit(p, q)?;
    ModelParams::new(p, q, delta * gc, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u32, q: u32, gamma: f64) -> ModelParams {
        ModelParams::new(p, q, gamma, 0.0).unwrap()
    }

    #[test]
    fn gamma_crit_closed_forms() {
        assert_eq!(gamma_crit(2, 3).unwrap(), 0.25);
        assert_eq!(gamma_crit(3, 5).unwrap(), 0.25);
        let expected = 2.0 / (3.0 * 3.0f64.sqrt());
        assert!((gamma_crit(3, 4).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn double_root_closed_forms() {
        assert!((u_double_root(2, 3).unwrap() - 2.0).abs() < 1e-15);
        assert!((u_double_root(3, 5).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((u_double_root(3, 4).unwrap() - 3.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn double_root_annihilates_f_and_fprime_at_critical_gamma() {
        for (p, q) in [(2, 3), (3, 4), (3, 5), (3, 6), (4, 7), (2, 5)] {
            let gc = gamma_crit(p, q).unwrap();
            let u = u_double_root(p, q).unwrap();
            let m = ModelParams::new(p, q, gc, 0.0).unwrap();
            assert!(m.f(u).abs() < 1e-10, "(p,q)=({p},{q}): f={}", m.f(u));
            assert!(
                m.f_prime(u).abs() < 1e-10,
                "(p,q)=({p},{q}): f'={}",
                m.f_prime(u)
            );
        }
    }

    #[test]
    fn f_examples() {
        let m = params(3, 5, 0.2);
        assert_eq!(m.f(0.0), 0.0);
        assert!((m.f(1.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn f_is_odd_and_fprime_even() {
        let m = params(3, 4, 0.2);
        let mut rng = crate::rng::SplitMix64::new(8);
        for _ in 0..200 {
            let u = rng.range(-4.0, 4.0);
            assert!((m.f(-u) + m.f(u)).abs() < 1e-12 * (1.0 + m.f(u).abs()));
            assert!((m.f_prime(-u) - m.f_prime(u)).abs() < 1e-12);
        }
    }

    #[test]
    fn fprime_at_zero_is_one() {
        assert_eq!(params(2, 3, 0.1).f_prime(0.0), 1.0);
    }

    #[test]
    fn roots_quartic_case_closed_form() {
        // (p,q) = (3,5): biquadratic 1 - u^2 + γ u^4, roots u^2 = (5∓√5)/2 at γ = 0.2.
        let m = params(3, 5, 0.2);
        let roots = m.find_roots().unwrap();
        let a_exact = ((5.0 - 5.0f64.sqrt()) / 2.0).sqrt();
        let big_exact = ((5.0 + 5.0f64.sqrt()) / 2.0).sqrt();
        assert!((roots.small - a_exact).abs() < 1e-12);
        assert!((roots.large - big_exact).abs() < 1e-12);
        assert!(roots.df_small < 0.0);
        assert!(roots.df_large > 0.0);
        assert!(m.f(roots.small).abs() < 1e-13);
        assert!(m.f(roots.large).abs() < 1e-13);
    }

    #[test]
    fn roots_quadratic_case_closed_form() {
        // (p,q) = (2,3): 1 - u + γ u^2, roots 4 ∓ 2√2 at γ = 0.125.
        let m = params(2, 3, 0.125);
        let roots = m.find_roots().unwrap();
        assert!((roots.small - (4.0 - 2.0 * 2.0f64.sqrt())).abs() < 1e-12);
        assert!((roots.large - (4.0 + 2.0 * 2.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn boundary_gamma_rejected() {
        let m = params(2, 3, 0.25);
        assert!(matches!(
            m.find_roots(),
            Err(Error::NoCompetingRoots { .. })
        ));
        assert!(ModelParams::new(2, 3, 0.0, 0.0).is_err());
        assert!(ModelParams::new(2, 3, -0.1, 0.0).is_err());
        assert!(ModelParams::new(3, 3, 0.1, 0.0).is_err());
        assert!(ModelParams::new(1, 3, 0.1, 0.0).is_err());
    }

    #[test]
    fn root_ordering_across_parameter_sweep() {
        for (p, q) in [(2, 3), (3, 4), (3, 5), (3, 6), (2, 7), (4, 6)] {
            let gc = gamma_crit(p, q).unwrap();
            let u_mid = u_double_root(p, q).unwrap();
            for delta in [0.05, 0.3, 0.5, 0.7, 0.9, 0.99] {
                let m = ModelParams::new(p, q, delta * gc, 0.0).unwrap();
                let r = m.find_roots().unwrap();
                assert!(
                    0.0 < r.small && r.small < u_mid && u_mid < r.large,
                    "(p,q,delta)=({p},{q},{delta})"
                );
                assert!(r.df_small < 0.0 && r.df_large > 0.0);
            }
        }
    }

    #[test]
    fn normalize_physical_examples() {
        let unity = PhysicalParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let (m, scale) = unity.normalize(2, 3).unwrap();
        assert_eq!((m.eps, m.gamma, scale), (1.0, 1.0, 1.0));

        let ph = PhysicalParams::new(0.1, 1.0, 0.2, 1.0).unwrap();
        let (m, scale) = ph.normalize(3, 4).unwrap();
        assert!((m.eps - 0.1).abs() < 1e-15);
        assert!((m.gamma - 0.2).abs() < 1e-15);
        assert!((scale - 1.0).abs() < 1e-15);

        let ph = PhysicalParams::new(1.0, 4.0, 1.0, 2.0).unwrap();
        let (m, scale) = ph.normalize(2, 3).unwrap();
        assert!((m.eps - 0.5).abs() < 1e-15);
        assert!((m.gamma - 0.125).abs() < 1e-15);
        assert!((scale - 0.5).abs() < 1e-15);

        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn normalized_single_site_state_solves_physical_equation() {
        // A single-site steady state of the normalized lattice, scaled back by
        // the amplitude factor, must satisfy the physical steady equation.
        let ph = PhysicalParams::new(0.0125, 3.0, 0.7, 2.5).unwrap();
        let (m, scale) = ph.normalize(3, 4).unwrap();
        let roots = m.find_roots().unwrap();
        let settings = crate::solver::NewtonSettings::default();
        let code = crate::codes::Code::parse("A+").unwrap();
        let seed = crate::solver::seed_profile(&code, &roots, settings.buffer);
        let u = crate::solver::newton_solve(&seed, &m, &settings).unwrap();

        // Physical residual: CΔ2Φ − ωΦ + κ|Φ|^{p−1}Φ − Γ|Φ|^{q−1}Φ.
        let vals = u.values();
        let mut worst = 0.0f64;
        for j in 0..vals.len() {
            let phi = scale * vals[j];
            let left = if j > 0 { scale * vals[j - 1] } else { 0.0 };
            let right = if j + 1 < vals.len() { scale * vals[j + 1] } else { 0.0 };
            let res = ph.coupling * (right - 2.0 * phi + left) - ph.omega * phi
                + ph.focusing * phi.abs().powi(2) * phi
                - ph.defocusing * phi.abs().powi(3) * phi;
            worst = worst.max(res.abs());
        }
        assert!(worst < 1e-9, "physical residual {worst:e}");
    }

    #[test]
    fn energy_mass_examples() {
        let m = params(3, 5, 0.2);
        let zero = LatticeProfile::new(0, alloc::vec![0.0; 7]);
        let c = m.energy_mass(&zero);
        assert_eq!((c.energy, c.mass, c.augmented), (0.0, 0.0, 0.0));

        let single = LatticeProfile::new(0, alloc::vec![0.0, 1.0, 0.0]);
        let c = m.energy_mass(&single);
        let expected_h = -2.0 / 4.0 + 2.0 * 0.2 / 6.0;
        assert!((c.energy - expected_h).abs() < 1e-15);
        assert!((c.mass - 1.0).abs() < 1e-15);
        assert!((c.augmented - (expected_h + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn energy_mass_invariant_under_sign_flip_and_reflection() {
        let m = ModelParams::new(3, 4, 0.2, 0.13).unwrap();
        let mut rng = crate::rng::SplitMix64::new(21);
        for _ in 0..50 {
            let vals: alloc::vec::Vec<f64> = (0..9).map(|_| rng.range(-2.0, 2.0)).collect();
            let base = LatticeProfile::new(-4, vals.clone());
            let flipped = LatticeProfile::new(-4, vals.iter().map(|v| -v).collect());
            let reflected = LatticeProfile::new(-4, vals.iter().rev().copied().collect());
            let c0 = m.energy_mass(&base);
            for other in [flipped, reflected] {
                let c = m.energy_mass(&other);
                assert!((c.energy - c0.energy).abs() < 1e-12);
                assert!((c.mass - c0.mass).abs() < 1e-12);
            }
        }
    }
}
