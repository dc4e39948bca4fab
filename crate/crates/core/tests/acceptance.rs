//! End-to-end acceptance suite. Each test prints one PASS/FAIL line for its
//! criterion (run with `--nocapture` to see the PASS lines; failures carry
//! the same detail in the panic message).

use ilm_core::codes::{
    count_irreducible, enumerate_irreducible, uniform_large, uniform_small, Code, StackedCode,
    StackedVariant,
};
use ilm_core::complex::Complex;
use ilm_core::continuation::{continue_branch, ContinuationSettings, EventKind};
use ilm_core::dynamics::{complex_state, evolve, growth_rate, perturbed_state};
use ilm_core::model::{gamma_crit, ModelParams};
use ilm_core::rng::SplitMix64;
use ilm_core::scan::{run_scan, sweep_gamma, EigClass, ScanMode, ScanRequest};
use ilm_core::solver::{newton_solve, seed_profile, NewtonSettings};
use ilm_core::spectrum::{
    build_full_ops, build_truncated, classify, full_eigs, inertia, sigma_quantity, truncated_eigs,
    SigmaClass, Verdict,
};

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion:02} ({name}): {status} — {detail}");
    assert!(pass, "criterion {criterion:02} ({name}): FAIL — {detail}");
}

fn canon(text: &str) -> Code {
    Code::parse(text).unwrap().canonical()
}

fn stacked(n: usize, m: usize, v: StackedVariant) -> Code {
    StackedCode::new(n, m, v).unwrap().expand().canonical()
}

#[test]
fn criterion_01_critical_coupling() {
    let g23 = gamma_crit(2, 3).unwrap();
    let g35 = gamma_crit(3, 5).unwrap();
    let g34 = gamma_crit(3, 4).unwrap();
    let g34_exact = 2.0 / (3.0 * 3.0f64.sqrt());
    let pass = g23 == 0.25 && g35 == 0.25 && (g34 - g34_exact).abs() < 1e-12;
    report(
        1,
        "critical coupling",
        pass,
        &format!("gamma_crit(2,3)={g23}, (3,5)={g35}, (3,4)={g34} vs 2/(3*sqrt(3))={g34_exact}"),
    );
}

#[test]
fn criterion_02_roots_closed_form() {
    let m35 = ModelParams::new(3, 5, 0.2, 0.0).unwrap();
    let r35 = m35.find_roots().unwrap();
    let a35 = ((5.0 - 5.0f64.sqrt()) / 2.0).sqrt();
    let big35 = ((5.0 + 5.0f64.sqrt()) / 2.0).sqrt();

    let m23 = ModelParams::new(2, 3, 0.125, 0.0).unwrap();
    let r23 = m23.find_roots().unwrap();
    let a23 = 4.0 - 2.0 * 2.0f64.sqrt();
    let big23 = 4.0 + 2.0 * 2.0f64.sqrt();

    let worst = (r35.small - a35)
        .abs()
        .max((r35.large - big35).abs())
        .max((r23.small - a23).abs())
        .max((r23.large - big23).abs());
    report(
        2,
        "roots vs closed forms",
        worst < 1e-10,
        &format!("worst deviation {worst:.3e} (tolerance 1e-10)"),
    );
}

#[test]
fn criterion_03_code_counts() {
    let counts: Vec<usize> = (1..=3)
        .map(|n| enumerate_irreducible(n).unwrap().len())
        .collect();

    // Closed form vs enumeration for even N up to 10.
    let mut even_ok = true;
    for n in [2usize, 4, 6, 8, 10] {
        let enumerated = enumerate_irreducible(n).unwrap().len() as u64;
        if enumerated != count_irreducible(n).unwrap() {
            even_ok = false;
        }
    }

    // Discrepancy report for N = 3: enumeration is the ground truth.
    let enum3 = counts[2] as u64;
    let formula3 = count_irreducible(3).unwrap();
    let discrepancy_exists = enum3 != formula3;
    println!(
        "criterion 03 note: enumeration(N=3) = {enum3}, closed-form = {formula3}; \
         the two agree, so the expected enumeration value 18 and the expected \
         formula discrepancy cannot both hold"
    );

    let pass = counts == vec![2, 6, 18] && even_ok && discrepancy_exists;
    report(
        3,
        "code counts",
        pass,
        &format!(
            "enumeration N=1..3 gives {counts:?} (stated expectation [2, 6, 18]); \
             even-N formula agreement: {even_ok}; N=3 formula-vs-enumeration \
             discrepancy present: {discrepancy_exists} (enumeration and the \
             closed form both give 20; an independent Burnside count over the \
             four-element symmetry group confirms 20)"
        ),
    );
}

#[test]
fn criterion_04_hand_verified_pencils() {
    let params = ModelParams::new(3, 4, 0.2, 0.0).unwrap();
    let roots = params.find_roots().unwrap();
    let cases = [
        ("a+,a-", -2.0 * roots.df_small, Verdict::Stable),
        ("A+,A+", 2.0 * roots.df_large, Verdict::Stable),
        ("A+,A-", -2.0 * roots.df_large, Verdict::Unstable),
    ];
    let mut worst = 0.0f64;
    let mut verdicts_ok = true;
    for (text, nonzero, expected) in cases {
        let code = Code::parse(text).unwrap();
        let pencil = build_truncated(&code, &roots);
        let eig = truncated_eigs(&pencil).unwrap();
        let mut re = eig.re.clone();
        re.sort_by(f64::total_cmp);
        let mut want = vec![0.0, nonzero];
        want.sort_by(f64::total_cmp);
        for (g, w) in re.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
        let (verdict, _, _) =
            ilm_core::spectrum::truncated_verdict(&pencil, &code, &roots).unwrap();
        if verdict != expected {
            verdicts_ok = false;
        }
    }
    report(
        4,
        "hand-verified 2x2 pencils",
        worst < 1e-12 && verdicts_ok,
        &format!("worst eigenvalue deviation {worst:.3e}; verdicts correct: {verdicts_ok}"),
    );
}

#[test]
fn criterion_05_inertia_laws() {
    let params = ModelParams::new(3, 4, 0.5 * gamma_crit(3, 4).unwrap(), 0.0).unwrap();
    let roots = params.find_roots().unwrap();
    let mut rng = SplitMix64::new(2026);
    let mut checked = 0;
    let mut failures = 0;
    for _ in 0..200 {
        let n = 1 + rng.below(8);
        let syms: Vec<ilm_core::codes::Symbol> = (0..n)
            .map(|_| ilm_core::codes::Symbol::ALL[rng.below(4)])
            .collect();
        let code = Code::new(syms).unwrap();
        let pencil = build_truncated(&code, &roots);
        let im = inertia(&pencil.l_minus, 1e-10);
        let ip = inertia(&pencil.l_plus(), 1e-10);
        let flips = code.flips();
        let k = code.small_count();
        let ok = (im.neg, im.zero, im.pos) == (flips, 1, n - flips - 1)
            && (ip.neg, ip.zero, ip.pos) == (k, 0, n - k);
        checked += 1;
        if !ok {
            failures += 1;
        }
    }
    report(
        5,
        "Sturm and symbol inertia laws",
        failures == 0,
        &format!("{checked} random codes checked, {failures} failures"),
    );
}

#[test]
fn criterion_06_index_identities() {
    let params = ModelParams::new(3, 4, 0.5 * gamma_crit(3, 4).unwrap(), 0.01).unwrap();
    let roots = params.find_roots().unwrap();
    let settings = NewtonSettings::default();
    let mut checked = 0usize;
    let mut degenerate = 0usize;
    let mut violations: Vec<String> = Vec::new();

    for n in 1..=5 {
        for code in enumerate_irreducible(n).unwrap() {
            if ilm_core::spectrum::sigma_class_for(&code, &roots) == SigmaClass::Degenerate {
                degenerate += 1;
                continue;
            }
            let seed = seed_profile(&code, &roots, settings.buffer);
            let profile = newton_solve(&seed, &params, &settings).unwrap();
            let ops = build_full_ops(&profile, &params);
            let eig = full_eigs(&ops).unwrap();
            let report_data = classify(&ops, &eig, &profile, &roots).unwrap();
            let sigma = match report_data.sigma.indicator() {
                Some(s) => s,
                None => {
                    degenerate += 1;
                    continue;
                }
            };
            let c = report_data.counts;
            let lhs1 = c.n_c + c.n_r_minus + c.n_i_minus;
            let lhs2 = c.n_c + c.n_r_plus + c.n_i_minus;
            let rhs1 = report_data.n_l_plus as i64 - sigma as i64;
            if lhs1 as i64 != rhs1 || lhs2 != report_data.n_l_minus {
                violations.push(format!(
                    "{code}: N_c={} N_r+={} N_r-={} N_i-={} vs n(L+)={} sigma={} n(L-)={}",
                    c.n_c,
                    c.n_r_plus,
                    c.n_r_minus,
                    c.n_i_minus,
                    report_data.n_l_plus,
                    sigma,
                    report_data.n_l_minus
                ));
            }
            checked += 1;
        }
    }
    report(
        6,
        "index-count identities",
        violations.is_empty(),
        &format!(
            "{checked} non-degenerate codes verified ({degenerate} skipped as degenerate); \
             violations: {violations:?}"
        ),
    );
}

#[test]
fn criterion_07_eigenvalue_scaling() {
    let base = ModelParams::new(3, 4, 0.2, 0.0).unwrap();
    let roots = base.find_roots().unwrap();
    let code = Code::parse("A+,A+").unwrap();
    let settings = NewtonSettings::default();
    let lambda_reduced = 2.0 * roots.df_large;

    let err_at = |eps: f64| -> f64 {
        let params = base.with_eps(eps);
        let seed = seed_profile(&code, &roots, settings.buffer);
        let profile = newton_solve(&seed, &params, &settings).unwrap();
        let ops = build_full_ops(&profile, &params);
        let eig = full_eigs(&ops).unwrap();
        let rep = classify(&ops, &eig, &profile, &roots).unwrap();
        let mut smallest = f64::MAX;
        for (j, l) in rep.eigenvalues.iter().enumerate() {
            if Some(j) == rep.zero_mode_index {
                continue;
            }
            if l.re.abs() < smallest.abs() {
                smallest = l.re;
            }
        }
        (smallest / eps - lambda_reduced).abs()
    };

    let e1 = err_at(1e-2);
    let e2 = err_at(5e-3);
    let ratio = e1 / e2;

    // Context: the halving law is the first-order consequence of
    // lambda = eps * lambda_reduced + O(eps^2); show that the ratio
    // converges to 2 as eps shrinks, whatever it is at the pinned pair.
    let e3 = err_at(2.5e-3);
    let e4 = err_at(1.25e-3);
    println!(
        "criterion 07 note: error ratios along eps/2 steps: {:.3}, {:.3}, {:.3} \
         (1e-2->5e-3->2.5e-3->1.25e-3); the cascade approaches 2, so the O(eps) \
         law holds but the pinned pair sits outside its asymptotic window",
        ratio,
        e2 / e3,
        e3 / e4
    );

    let pass = (1.6..=2.4).contains(&ratio);
    report(
        7,
        "eigenvalue scaling in eps",
        pass,
        &format!(
            "|lambda/eps - lambda_reduced|: {e1:.3e} at 1e-2, {e2:.3e} at 5e-3, ratio {ratio:.3} \
             (want 2 +/- 20%); continued cascade {:.3}, {:.3} approaches 2",
            e2 / e3,
            e3 / e4
        ),
    );
}

#[test]
fn criterion_08_biquadratic_sigma_identity() {
    let gc = gamma_crit(3, 5).unwrap();
    let mut rng = SplitMix64::new(90);
    let mut worst_sigma = 0.0f64;
    let mut worst_sum = 0.0f64;
    for _ in 0..10 {
        let gamma = rng.range(0.1, 0.9) * gc;
        let params = ModelParams::new(3, 5, gamma, 0.0).unwrap();
        let roots = params.find_roots().unwrap();
        // a^2 + A^2 = 1/gamma in the biquadratic case.
        worst_sum = worst_sum
            .max((roots.small * roots.small + roots.large * roots.large - 1.0 / gamma).abs());
        for _ in 0..5 {
            // Random equal-count code of even length.
            let k = 1 + rng.below(4);
            let n = 2 * k;
            let mut syms = Vec::with_capacity(n);
            let mut smalls = 0;
            let mut larges = 0;
            for _ in 0..n {
                let pick_small = if smalls == k {
                    false
                } else if larges == k {
                    true
                } else {
                    rng.below(2) == 0
                };
                let sign_plus = rng.below(2) == 0;
                let sym = match (pick_small, sign_plus) {
                    (true, true) => ilm_core::codes::Symbol::SmallPlus,
                    (true, false) => ilm_core::codes::Symbol::SmallMinus,
                    (false, true) => ilm_core::codes::Symbol::LargePlus,
                    (false, false) => ilm_core::codes::Symbol::LargeMinus,
                };
                if pick_small {
                    smalls += 1;
                } else {
                    larges += 1;
                }
                syms.push(sym);
            }
            let code = Code::new(syms).unwrap();
            worst_sigma = worst_sigma.max(sigma_quantity(&code, &roots).abs());
        }
    }
    let pass = worst_sigma < 1e-12 && worst_sum < 1e-12;
    report(
        8,
        "equal-count sigma identity at (3,5)",
        pass,
        &format!("max |sigma| = {worst_sigma:.3e}, max |a^2+A^2-1/gamma| = {worst_sum:.3e}"),
    );
}

#[test]
fn criterion_09_table_reproduction() {
    let mut mismatches: Vec<String> = Vec::new();

    // Quadratic-cubic case, lengths 1..=3, all five table columns: exact sets.
    {
        let req = ScanRequest {
            p: 2,
            q: 3,
            deltas: vec![0.2, 0.4, 0.6, 0.96, 0.996],
            n_min: 1,
            n_max: 3,
            mode: ScanMode::TruncatedOnly,
        };
        let rows = run_scan(&req).unwrap();
        for row in rows {
            let mut expected: Vec<Code> = match row.n {
                1 => vec![canon("a+"), canon("A+")],
                2 => vec![
                    uniform_large(2).unwrap().canonical(),
                    uniform_small(2).unwrap().canonical(),
                    stacked(1, 1, StackedVariant::Minus),
                ],
                3 => {
                    let mut v = vec![
                        uniform_large(3).unwrap().canonical(),
                        uniform_small(3).unwrap().canonical(),
                        stacked(2, 1, StackedVariant::Minus),
                    ];
                    if row.delta < 0.9 {
                        v.push(stacked(1, 2, StackedVariant::Minus));
                        v.push(canon("a+,A-,a+"));
                    } else {
                        v.push(stacked(1, 2, StackedVariant::Plus));
                    }
                    v
                }
                _ => unreachable!(),
            };
            expected.sort();
            if row.stable != expected {
                mismatches.push(format!(
                    "(2,3) N={} delta={}: got {:?}, want {:?}",
                    row.n,
                    row.delta,
                    row.stable.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    expected.iter().map(|c| c.to_string()).collect::<Vec<_>>()
                ));
            }
        }
    }

    // Cubic-quartic case, lengths 1..=6: every cell is fully listed, so the
    // comparison is exact set equality.
    {
        let req = ScanRequest {
            p: 3,
            q: 4,
            deltas: vec![0.2, 0.4, 0.6, 0.96, 0.996],
            n_min: 1,
            n_max: 6,
            mode: ScanMode::TruncatedOnly,
        };
        let rows = run_scan(&req).unwrap();
        for row in rows {
            let near_critical = row.delta > 0.9;
            let mut expected: Vec<Code> = vec![
                uniform_large(row.n).unwrap().canonical(),
                uniform_small(row.n).unwrap().canonical(),
            ];
            match (row.n, row.delta) {
                (1, _) => {}
                (2, _) => expected.push(stacked(1, 1, StackedVariant::Minus)),
                (3, d) => {
                    expected.push(stacked(2, 1, StackedVariant::Minus));
                    if d == 0.2 {
                        expected.push(canon("A+,a-,a-"));
                    }
                }
                (4, _) if !near_critical => {
                    expected.push(stacked(3, 1, StackedVariant::Minus));
                    expected.push(stacked(2, 2, StackedVariant::Minus));
                    expected.push(canon("a+,A-,A-,a+"));
                }
                (4, _) => {}
                (5, d) => {
                    if d == 0.2 || d == 0.4 {
                        expected.push(stacked(3, 2, StackedVariant::Minus));
                        expected.push(stacked(2, 3, StackedVariant::Minus));
                        expected.push(canon("a+,a-,A+,A+,a-"));
                        expected.push(canon("a+,A-,A-,A-,a+"));
                    }
                    if d == 0.2 {
                        expected.push(stacked(4, 1, StackedVariant::Minus));
                    }
                    if near_critical {
                        expected.push(stacked(3, 2, StackedVariant::Minus));
                    }
                }
                (6, d) => {
                    if d == 0.2 {
                        expected.push(stacked(5, 1, StackedVariant::Minus));
                        expected.push(stacked(3, 3, StackedVariant::Minus));
                        expected.push(stacked(4, 2, StackedVariant::Minus));
                        expected.push(canon("a+,a-,A+,A+,A+,a-"));
                        expected.push(canon("A+,A+,a-,a-,A+,A+"));
                        expected.push(canon("a+,a-,a-,A+,A+,a-"));
                        expected.push(canon("a+,A-,A-,A-,A-,a+"));
                    }
                    if d == 0.4 {
                        expected.push(stacked(3, 3, StackedVariant::Minus));
                        expected.push(canon("a+,a-,A+,A+,A+,a-"));
                    }
                }
                _ => unreachable!(),
            }
            expected.sort();
            expected.dedup();
            if row.stable != expected {
                mismatches.push(format!(
                    "(3,4) N={} delta={}: got {:?}, want {:?}",
                    row.n,
                    row.delta,
                    row.stable.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    expected.iter().map(|c| c.to_string()).collect::<Vec<_>>()
                ));
            }
        }
    }

    // Biquadratic case: the equal-count entries highlighted in the tables
    // must come out inconclusive (double zero eigenvalue).
    {
        let req = ScanRequest {
            p: 3,
            q: 5,
            deltas: vec![0.2, 0.4, 0.6, 0.96, 0.996],
            n_min: 2,
            n_max: 4,
            mode: ScanMode::TruncatedOnly,
        };
        let rows = run_scan(&req).unwrap();
        for row in &rows {
            let red: Vec<Code> = match (row.n, row.delta) {
                (2, _) => vec![
                    stacked(1, 1, StackedVariant::Minus),
                    stacked(1, 1, StackedVariant::Plus),
                ],
                (4, 0.2) => vec![
                    stacked(2, 2, StackedVariant::Minus),
                    stacked(2, 2, StackedVariant::Plus),
                    canon("a+,A-,A-,a+"),
                    canon("A+,A+,a-,a-"),
                    canon("A+,a+,a-,A+"),
                    canon("a+,A+,A+,a-"),
                ],
                (4, 0.4) | (4, 0.6) => vec![
                    stacked(2, 2, StackedVariant::Minus),
                    stacked(2, 2, StackedVariant::Plus),
                    canon("a+,A-,A-,a+"),
                    canon("A+,a+,a-,A+"),
                    canon("a+,A+,A+,a-"),
                ],
                (4, _) => vec![
                    stacked(2, 2, StackedVariant::Plus),
                    canon("A+,a+,a-,A+"),
                    canon("a+,A+,A+,a-"),
                ],
                _ => vec![],
            };
            for code in red {
                if !row.inconclusive.contains(&code) {
                    mismatches.push(format!(
                        "(3,5) N={} delta={}: red entry {code} not inconclusive",
                        row.n, row.delta
                    ));
                }
            }
        }
    }

    report(
        9,
        "stable-code table reproduction",
        mismatches.is_empty(),
        &format!("mismatches: {mismatches:?}"),
    );
}

#[test]
fn criterion_10_sweep_properties() {
    // 40-point grid spanning the admissible interval.
    let grid = |p: u32, q: u32| -> Vec<f64> {
        let gc = gamma_crit(p, q).unwrap();
        (0..40)
            .map(|j| gc * (0.02 + (0.998 - 0.02) * j as f64 / 39.0))
            .collect()
    };
    let has = |pt: &ilm_core::scan::SweepPoint, class: EigClass| {
        pt.eigenvalues.iter().any(|e| e.class == class)
    };

    let a55 = stacked(5, 5, StackedVariant::Plus);
    let pts34 = sweep_gamma(&a55, 3, 4, &grid(3, 4)).unwrap();
    let all_negative = pts34.iter().all(|pt| has(pt, EigClass::RealNegative));

    let pts36 = sweep_gamma(&a55, 3, 6, &grid(3, 6)).unwrap();
    let top = &pts36[36..]; // top 10% of the grid
    let top_clean = top.iter().all(|pt| !has(pt, EigClass::RealNegative));

    let a54 = stacked(5, 4, StackedVariant::Minus);
    let pts54 = sweep_gamma(&a54, 3, 4, &grid(3, 4)).unwrap();
    let complex_inside = pts54[1..39].iter().any(|pt| has(pt, EigClass::ComplexPair));
    let extremes_clean =
        !has(&pts54[0], EigClass::ComplexPair) && !has(&pts54[39], EigClass::ComplexPair);

    let pass = all_negative && top_clean && complex_inside && extremes_clean;
    report(
        10,
        "gamma-sweep structure",
        pass,
        &format!(
            "stacked(5,5)+ at (3,4) negative everywhere: {all_negative}; at (3,6) top-10% free \
             of negatives: {top_clean}; stacked(5,4)- at (3,4) complex inside: {complex_inside}, \
             extremes clean: {extremes_clean}"
        ),
    );
}

#[test]
fn criterion_11_bifurcation_events() {
    let code = Code::parse("A+,a-").unwrap();
    let settings = ContinuationSettings::default();

    let run = |gamma: f64| -> (Option<(EventKind, f64)>, f64) {
        let params = ModelParams::new(3, 4, gamma, 0.0).unwrap();
        let (points, events) = continue_branch(&code, &params, 0.2, 1e-3, &settings).unwrap();
        let eps_max = points.iter().map(|p| p.eps).fold(f64::MIN, f64::max);
        (events.first().map(|e| (e.kind, e.eps_at)), eps_max)
    };

    let (fold_ev, fold_reach) = run(0.12);
    let (pitch_ev, pitch_reach) = run(0.22);

    let fold_ok = matches!(fold_ev, Some((EventKind::Fold, e)) if (e - 0.105).abs() <= 0.01);
    let pitch_ok =
        matches!(pitch_ev, Some((EventKind::Pitchfork, e)) if (e - 0.099).abs() <= 0.01);

    // Diagnostic context: rescaling both gammas by
    // gamma_crit(3,4)/gamma_crit(2,3) reproduces the expected locations and
    // event kinds, which suggests the expected inputs were recorded in units
    // of gamma_crit(2,3). Report that check alongside the literal one.
    let gc34 = gamma_crit(3, 4).unwrap();
    let (fold_alt, _) = run(4.0 * 0.12 * gc34);
    let (pitch_alt, _) = run(4.0 * 0.22 * gc34);
    println!(
        "criterion 11 note: at gammas 0.12 and 0.22 the events are {fold_ev:?} (reach {fold_reach:.4}) \
         and {pitch_ev:?} (reach {pitch_reach:.4}); with both gammas rescaled by \
         gamma_crit(3,4)/gamma_crit(2,3) they are {fold_alt:?} and {pitch_alt:?}, matching the \
         expected locations 0.105 and 0.099"
    );

    report(
        11,
        "fold and pitchfork locations",
        fold_ok && pitch_ok,
        &format!(
            "gamma=0.12 expects Fold at 0.105 +/- 0.01, got {fold_ev:?}; gamma=0.22 expects \
             Pitchfork at 0.099 +/- 0.01, got {pitch_ev:?} (rescaled-gamma runs give \
             {fold_alt:?} and {pitch_alt:?})"
        ),
    );
}

#[test]
fn criterion_12_dynamics() {
    let base = ModelParams::new(3, 4, 0.2, 0.01).unwrap();
    let roots = base.find_roots().unwrap();
    let settings = NewtonSettings::default();
    let solve = |text: &str| {
        let code = Code::parse(text).unwrap();
        newton_solve(&seed_profile(&code, &roots, settings.buffer), &base, &settings).unwrap()
    };

    // Stationary state: deviation and mass drift stay tiny.
    let stationary = solve("A+,A+");
    let norm = stationary.norm2();
    let ev = evolve(&complex_state(&stationary), &base, 50.0, 1e-3, 50).unwrap();
    let max_dev = ev.samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let q0 = ev.samples[0].mass;
    let max_drift = ev
        .samples
        .iter()
        .map(|s| (s.mass - q0).abs() / q0)
        .fold(0.0, f64::max);
    let stationary_ok = max_dev < 1e-6 * norm && max_drift < 1e-6;

    // Perturbed unstable state: growth rate within a factor of two of the
    // spectral prediction.
    let unstable = solve("A+,A-");
    let ops = build_full_ops(&unstable, &base);
    let eig = full_eigs(&ops).unwrap();
    let mut rate_spec = 0.0f64;
    for j in 0..eig.n() {
        let omega = Complex::new(eig.re[j], eig.im[j]).sqrt();
        rate_spec = rate_spec.max(omega.im.abs());
    }
    let evu = evolve(&perturbed_state(&unstable, 1e-3, 42), &base, 50.0, 1e-3, 50).unwrap();
    let rate = growth_rate(&evu.samples).unwrap();
    let growth_ok = rate > rate_spec / 2.0 && rate < rate_spec * 2.0;

    // Perturbed stable state: bounded.
    let stable = solve("a+,a-");
    let evs = evolve(&perturbed_state(&stable, 1e-3, 42), &base, 50.0, 1e-3, 50).unwrap();
    let stable_norm = stable.norm2();
    let bounded = !evs.diverged
        && evs
            .samples
            .iter()
            .all(|s| s.deviation < 1e-2 * stable_norm);

    let pass = stationary_ok && growth_ok && bounded;
    report(
        12,
        "dynamical validation",
        pass,
        &format!(
            "stationary: max deviation {max_dev:.3e} (norm {norm:.3}), mass drift {max_drift:.3e}; \
             unstable growth {rate:.4} vs spectral {rate_spec:.4}; stable run bounded: {bounded}"
        ),
    );
}
