//! Bulk stability classification over code-length / coupling-strength grids,
//! and eigenvalue sweeps of one code across γ.

use alloc::string::String;
use alloc::vec::Vec;

use crate::codes::{enumerate_irreducible, Code};
use crate::complex::Complex;
use crate::float::{abs, hypot};
use crate::model::{gamma_crit, ModelParams, RootPair};
use crate::solver::{newton_solve, seed_profile, NewtonSettings};
use crate::spectrum::{
    build_full_ops, build_truncated, classify, full_eigs, truncated_eigs, truncated_verdict,
    Verdict,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanMode {
    /// Classify from the reduced N×N pencil only (the table-generation mode).
    TruncatedOnly,
    /// Solve the lattice at the given ε and classify the full spectrum.
    FullAtEps(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRequest {
    pub p: u32,
    pub q: u32,
    /// Relative couplings δ with γ = δ·γ_{p,q}, each strictly inside (0, 1).
    pub deltas: Vec<f64>,
    pub n_min: usize,
    pub n_max: usize,
    pub mode: ScanMode,
}

/// Verdict bucket contents for one (N, δ) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub delta: f64,
    pub stable: Vec<Code>,
    pub inconclusive: Vec<Code>,
    pub total_checked: usize,
}

/// Per-code outcome, the unit of work a scan distributes.
#[derive(Debug, Clone)]
pub struct CodeOutcome {
    pub code: Code,
    pub verdict: Verdict,
    pub eigenvalues: Vec<Complex>,
    pub note: Option<String>,
}

/// Classify a single code at fixed parameters. Numerical failures are not
/// fatal: they land in the outcome as `Inconclusive` with a note.
pub fn classify_code(
    params: &ModelParams,
    roots: &RootPair,
    code: &Code,
    mode: ScanMode,
) -> CodeOutcome {
    match classify_code_inner(params, roots, code, mode) {
        Ok(outcome) => outcome,
        Err(err) => CodeOutcome {
            code: code.clone(),
            verdict: Verdict::Inconclusive,
            eigenvalues: Vec::new(),
            note: Some(alloc::format!("numerical failure: {err}")),
        },
    }
}

fn classify_code_inner(
    params: &ModelParams,
    roots: &RootPair,
    code: &Code,
    mode: ScanMode,
) -> Result<CodeOutcome> {
    match mode {
        ScanMode::TruncatedOnly => {
            let pencil = build_truncated(code, roots);
            let (verdict, eig, note) = truncated_verdict(&pencil, code, roots)?;
            let eigenvalues = (0..eig.n())
                .map(|j| Complex::new(eig.re[j], eig.im[j]))
                .collect();
            Ok(CodeOutcome {
                code: code.clone(),
                verdict,
                eigenvalues,
                note,
            })
        }
        ScanMode::FullAtEps(eps) => {
            let params = params.with_eps(eps);
            let settings = NewtonSettings::default();
            let seed = seed_profile(code, roots, settings.buffer);
            let profile = newton_solve(&seed, &params, &settings)?;
            let ops = build_full_ops(&profile, &params);
            let eig = full_eigs(&ops)?;
            let report = classify(&ops, &eig, &profile, roots)?;
            Ok(CodeOutcome {
                code: code.clone(),
                verdict: report.verdict,
                eigenvalues: report.eigenvalues,
                note: report.diagnostic,
            })
        }
    }
}

/// Run the scan over every (N, δ) cell. Codes are enumerated once per
/// length; rows come out in (N, δ) order with the stable and inconclusive
/// lists in enumeration (lexicographic) order, so the output is
/// reproducible byte for byte.
pub fn run_scan(req: &ScanRequest) -> Result<Vec<ScanRow>> {
    if req.n_min == 0 || req.n_min > req.n_max {
        return Err(Error::InvalidParams(alloc::format!(
            "bad length range {}..={}",
            req.n_min,
            req.n_max
        )));
    }
    for &d in &req.deltas {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidParams(alloc::format!(
                "delta {d} outside (0, 1)"
            )));
        }
    }
    let gc = gamma_crit(req.p, req.q)?;
    let mut rows = Vec::new();
    for n in req.n_min..=req.n_max {
        let codes = enumerate_irreducible(n)?;
        for &delta in &req.deltas {
            let params = ModelParams::new(req.p, req.q, delta * gc, 0.0)?;
            let roots = params.find_roots()?;
            let mut stable = Vec::new();
            let mut inconclusive = Vec::new();
            for code in &codes {
                let outcome = classify_code(&params, &roots, code, req.mode);
                match outcome.verdict {
                    Verdict::Stable => stable.push(outcome.code),
                    Verdict::Inconclusive => inconclusive.push(outcome.code),
                    Verdict::Unstable => {}
                }
            }
            rows.push(ScanRow {
                n,
                delta,
                stable,
                inconclusive,
                total_checked: codes.len(),
            });
        }
    }
    Ok(rows)
}

/// Class tag of one reduced eigenvalue along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigClass {
    Zero,
    RealNegative,
    RealPositive,
    ComplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifiedEig {
    pub value: Complex,
    pub class: EigClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub gamma: f64,
    pub eigenvalues: Vec<ClassifiedEig>,
}

/// Reduced eigenvalues of one code on a γ grid, each tagged by class.
/// The grid must lie strictly inside (0, γ_{p,q}).
pub fn sweep_gamma(code: &Code, p: u32, q: u32, gammas: &[f64]) -> Result<Vec<SweepPoint>> {
    let gc = gamma_crit(p, q)?;
    let mut out = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        if !(gamma > 0.0 && gamma < gc) {
            return Err(Error::InvalidParams(alloc::format!(
                "gamma {gamma} outside (0, {gc})"
            )));
        }
        let params = ModelParams::new(p, q, gamma, 0.0)?;
        let roots = params.find_roots()?;
        let pencil = build_truncated(code, &roots);
        let eig = truncated_eigs(&pencil)?;
        let scale = (0..eig.n())
            .map(|j| hypot(eig.re[j], eig.im[j]))
            .fold(1.0f64, f64::max);
        let eigenvalues = (0..eig.n())
            .map(|j| {
                let value = Complex::new(eig.re[j], eig.im[j]);
                let class = if value.abs() < 1e-8 * scale {
                    EigClass::Zero
                } else if abs(value.im) > 1e-9 * scale {
                    EigClass::ComplexPair
                } else if value.re < 0.0 {
                    EigClass::RealNegative
                } else {
                    EigClass::RealPositive
                };
                ClassifiedEig { value, class }
            })
            .collect();
        out.push(SweepPoint { gamma, eigenvalues });
    }
    Ok(out)
}

/// Uniform γ grid of `points` values δ_j·γ_{p,q} with δ_j = j/(points+1),
/// strictly inside the admissible interval.
pub fn uniform_gamma_grid(p: u32, q: u32, points: usize) -> Result<Vec<f64>> {
    let gc = gamma_crit(p, q)?;
    Ok((1..=points)
        .map(|j| gc * j as f64 / (points as f64 + 1.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{uniform_large, uniform_small, StackedCode, StackedVariant};
    use alloc::vec;

    fn canon(text: &str) -> Code {
        Code::parse(text).unwrap().canonical()
    }

    fn stacked(n: usize, m: usize, variant: StackedVariant) -> Code {
        StackedCode::new(n, m, variant).unwrap().expand().canonical()
    }

    #[test]
    fn quadratic_cubic_n3_near_critical() {
        // (p,q) = (2,3), δ = 0.96, N = 3: exactly the all-large word, the
        // alternating small word, and the two stacked modes.
        let req = ScanRequest {
            p: 2,
            q: 3,
            deltas: vec![0.96],
            n_min: 3,
            n_max: 3,
            mode: ScanMode::TruncatedOnly,
        };
        let rows = run_scan(&req).unwrap();
        assert_eq!(rows.len(), 1);
        let mut expected = vec![
            uniform_large(3).unwrap().canonical(),
            uniform_small(3).unwrap().canonical(),
            stacked(2, 1, StackedVariant::Minus),
            stacked(1, 2, StackedVariant::Plus),
        ];
        expected.sort();
        assert_eq!(rows[0].stable, expected);
        assert_eq!(rows[0].total_checked, 20);
    }

    #[test]
    fn cubic_quartic_n4_mid_coupling() {
        let req = ScanRequest {
            p: 3,
            q: 4,
            deltas: vec![0.6],
            n_min: 4,
            n_max: 4,
            mode: ScanMode::TruncatedOnly,
        };
        let rows = run_scan(&req).unwrap();
        let mut expected = vec![
            uniform_large(4).unwrap().canonical(),
            uniform_small(4).unwrap().canonical(),
            stacked(3, 1, StackedVariant::Minus),
            stacked(2, 2, StackedVariant::Minus),
            canon("a+,A-,A-,a+"),
        ];
        expected.sort();
        assert_eq!(rows[0].stable, expected);
    }

    #[test]
    fn biquadratic_equal_count_codes_are_inconclusive() {
        let req = ScanRequest {
            p: 3,
            q: 5,
            deltas: vec![0.4],
            n_min: 2,
            n_max: 2,
            mode: ScanMode::TruncatedOnly,
        };
        let rows = run_scan(&req).unwrap();
        let mut expected_stable = vec![
            uniform_large(2).unwrap().canonical(),
            uniform_small(2).unwrap().canonical(),
        ];
        expected_stable.sort();
        assert_eq!(rows[0].stable, expected_stable);
        for text in ["A+,a-", "A+,a+"] {
            assert!(
                rows[0].inconclusive.contains(&canon(text)),
                "{text} missing from inconclusive"
            );
        }
    }

    #[test]
    fn equal_count_codes_inconclusive_across_lengths_at_3_5() {
        let req = ScanRequest {
            p: 3,
            q: 5,
            deltas: vec![0.3],
            n_min: 2,
            n_max: 6,
            mode: ScanMode::TruncatedOnly,
        };
        for row in run_scan(&req).unwrap() {
            for code in &row.stable {
                assert_ne!(
                    2 * code.small_count(),
                    code.len(),
                    "equal-count code {code} escaped the degeneracy bucket"
                );
            }
        }
    }

    #[test]
    fn universal_rows_present_everywhere() {
        for (p, q) in [(2, 3), (3, 4), (3, 5), (3, 6)] {
            let req = ScanRequest {
                p,
                q,
                deltas: vec![0.2, 0.96],
                n_min: 1,
                n_max: 5,
                mode: ScanMode::TruncatedOnly,
            };
            for row in run_scan(&req).unwrap() {
                let all_large = uniform_large(row.n).unwrap().canonical();
                let all_small = uniform_small(row.n).unwrap().canonical();
                assert!(row.stable.contains(&all_large), "({p},{q}) N={}", row.n);
                assert!(row.stable.contains(&all_small), "({p},{q}) N={}", row.n);
            }
        }
    }

    #[test]
    fn odd_length_center_stacked_modes_stable_near_critical() {
        // Near γ_{p,q} the (k+1, k) stacked mode with a leading minus block
        // is stable for odd N = 2k+1.
        for (p, q) in [(2, 3), (3, 4), (3, 5), (3, 6)] {
            for k in 1..=2usize {
                let n = 2 * k + 1;
                let req = ScanRequest {
                    p,
                    q,
                    deltas: vec![0.96],
                    n_min: n,
                    n_max: n,
                    mode: ScanMode::TruncatedOnly,
                };
                let rows = run_scan(&req).unwrap();
                let target = stacked(k + 1, k, StackedVariant::Minus);
                assert!(
                    rows[0].stable.contains(&target),
                    "({p},{q}) N={n} missing stacked ({},{})",
                    k + 1,
                    k
                );
            }
        }
    }

    #[test]
    fn scan_rows_are_deterministic() {
        let req = ScanRequest {
            p: 3,
            q: 4,
            deltas: vec![0.2, 0.6],
            n_min: 1,
            n_max: 4,
            mode: ScanMode::TruncatedOnly,
        };
        let a = run_scan(&req).unwrap();
        let b = run_scan(&req).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn full_mode_agrees_with_truncated_on_two_site_codes() {
        let params = ModelParams::new(3, 4, 0.2, 0.0).unwrap();
        let roots = params.find_roots().unwrap();
        for (text, want) in [
            ("A+,A+", Verdict::Stable),
            ("a+,a-", Verdict::Stable),
            ("A+,A-", Verdict::Unstable),
            ("a+,a+", Verdict::Unstable),
        ] {
            let code = Code::parse(text).unwrap();
            let trunc = classify_code(&params, &roots, &code, ScanMode::TruncatedOnly);
            let full = classify_code(&params, &roots, &code, ScanMode::FullAtEps(0.01));
            assert_eq!(trunc.verdict, want, "{text} truncated");
            assert_eq!(full.verdict, want, "{text} full");
        }
    }

    #[test]
    fn all_large_block_positive_along_any_sweep() {
        let code = uniform_large(5).unwrap();
        for (p, q) in [(2u32, 3u32), (3, 4), (3, 6)] {
            let grid = uniform_gamma_grid(p, q, 12).unwrap();
            for pt in sweep_gamma(&code, p, q, &grid).unwrap() {
                for e in &pt.eigenvalues {
                    assert!(
                        matches!(e.class, EigClass::Zero | EigClass::RealPositive),
                        "({p},{q}) gamma={}: {:?}",
                        pt.gamma,
                        e
                    );
                }
            }
        }
    }

    #[test]
    fn sweep_grid_is_validated() {
        let code = Code::parse("A+,a-").unwrap();
        assert!(sweep_gamma(&code, 2, 3, &[0.3]).is_err());
        let grid = uniform_gamma_grid(2, 3, 10).unwrap();
        assert_eq!(grid.len(), 10);
        let points = sweep_gamma(&code, 2, 3, &grid).unwrap();
        assert_eq!(points.len(), 10);
        for pt in &points {
            assert_eq!(pt.eigenvalues.len(), 2);
            assert!(pt
                .eigenvalues
                .iter()
                .any(|e| e.class == EigClass::Zero));
        }
    }
}
