//! The eight subcommands, each a thin adapter over the library operations.

use ilm_core::codes::{count_irreducible, enumerate_irreducible, Code};
use ilm_core::continuation::{continue_branch, ContinuationSettings, EventKind};
use ilm_core::dynamics::{complex_state, evolve, growth_rate, perturbed_state};
use ilm_core::model::{gamma_crit, ModelParams, RootPair};
use ilm_core::scan::{classify_code, CodeOutcome, ScanMode, ScanRow, SweepPoint};
use ilm_core::solver::{newton_solve, seed_profile, LatticeProfile, NewtonSettings};
use ilm_core::spectrum::{
    build_full_ops, build_truncated, classify, full_eigs, truncated_verdict, KreinSign,
    SigmaClass, SpectrumReport, Verdict,
};

use crate::args::{Opt, Schema, UsageError, Values};
use crate::output::{envelope, field, fmt_f64, Csv, Json};
use crate::CliError;

pub const SCHEMAS: &[Schema] = &[
    Schema {
        command: "roots",
        about: "nonzero on-site states a < A and their slopes",
        opts: &[
            Opt { name: "p", takes_value: true, default: None, help: "focusing power (integer >= 2)" },
            Opt { name: "q", takes_value: true, default: None, help: "defocusing power (integer > p)" },
            Opt { name: "gamma", takes_value: true, default: None, help: "defocusing strength in (0, gamma_crit)" },
        ],
    },
    Schema {
        command: "codes",
        about: "irreducible codes of a given length",
        opts: &[
            Opt { name: "n", takes_value: true, default: None, help: "code length (>= 1)" },
            Opt { name: "count-only", takes_value: false, default: None, help: "print only the number of irreducible codes" },
            Opt { name: "max-n", takes_value: true, default: Some("10"), help: "largest admissible length" },
            Opt { name: "format", takes_value: true, default: Some("json"), help: "json, csv, or table" },
        ],
    },
    Schema {
        command: "solve",
        about: "Newton-continued steady state from the anticontinuum seed",
        opts: &[
            Opt { name: "p", takes_value: true, default: None, help: "focusing power" },
            Opt { name: "q", takes_value: true, default: None, help: "defocusing power" },
            Opt { name: "gamma", takes_value: true, default: None, help: "defocusing strength" },
            Opt { name: "eps", takes_value: true, default: None, help: "inter-site coupling (>= 0)" },
            Opt { name: "code", takes_value: true, default: None, help: "code, e.g. \"A+,a-\"" },
            Opt { name: "buffer", takes_value: true, default: Some("20"), help: "zero-padding sites per side" },
            Opt { name: "tol", takes_value: true, default: Some("1e-12"), help: "Newton residual tolerance" },
            Opt { name: "max-iter", takes_value: true, default: Some("50"), help: "Newton iteration cap" },
            Opt { name: "boundary-tol", takes_value: true, default: Some("1e-10"), help: "largest admissible boundary amplitude" },
            Opt { name: "out", takes_value: true, default: None, help: "write the profile CSV here instead of stdout" },
        ],
    },
    Schema {
        command: "spectrum",
        about: "stability spectrum of one code (reduced or full problem)",
        opts: &[
            Opt { name: "p", takes_value: true, default: None, help: "focusing power" },
            Opt { name: "q", takes_value: true, default: None, help: "defocusing power" },
            Opt { name: "gamma", takes_value: true, default: None, help: "defocusing strength" },
            Opt { name: "code", takes_value: true, default: None, help: "code, e.g. \"a+,a-\"" },
            Opt { name: "truncated", takes_value: false, default: None, help: "use the N x N anticontinuum reduction" },
            Opt { name: "eps", takes_value: true, default: None, help: "coupling for the full problem" },
            Opt { name: "profile-file", takes_value: true, default: None, help: "CSV profile (n,u_n) to analyze instead of re-solving" },
            Opt { name: "buffer", takes_value: true, default: Some("20"), help: "zero-padding sites per side" },
        ],
    },
    Schema {
        command: "branch",
        about: "pseudo-arclength continuation in eps with event detection",
        opts: &[
            Opt { name: "p", takes_value: true, default: None, help: "focusing power" },
            Opt { name: "q", takes_value: true, default: None, help: "defocusing power" },
            Opt { name: "gamma", takes_value: true, default: None, help: "defocusing strength" },
            Opt { name: "code", takes_value: true, default: None, help: "code at the anticontinuum end" },
            Opt { name: "eps-max", takes_value: true, default: None, help: "continuation stops past this coupling" },
            Opt { name: "step", takes_value: true, default: Some("1e-3"), help: "initial arclength step" },
            Opt { name: "out", takes_value: true, default: Some("branch.csv"), help: "branch CSV output path" },
        ],
    },
    Schema {
        command: "scan",
        about: "classify all irreducible codes over an (N, delta) grid",
        opts: &[
            Opt { name: "p", takes_value: true, default: None, help: "focusing power" },
            Opt { name: "q", takes_value: true, default: None, help: "defocusing power" },
            Opt { name: "delta", takes_value: true, default: None, help: "comma-separated relative couplings in (0,1)" },
            Opt { name: "n", takes_value: true, default: None, help: "single code length (shorthand for n-min = n-max)" },
            Opt { name: "n-min", takes_value: true, default: None, help: "smallest code length" },
            Opt { name: "n-max", takes_value: true, default: None, help: "largest code length" },
            Opt { name: "mode", takes_value: true, default: Some("truncated"), help: "truncated or full" },
            Opt { name: "eps", takes_value: true, default: Some("0.01"), help: "coupling used by --mode full" },
            Opt { name: "threads", takes_value: true, default: Some("1"), help: "worker threads over the code list" },
            Opt { name: "format", takes_value: true, default: Some("csv"), help: "csv or table" },
        ],
    },
    Schema {
        command: "sweep",
        about: "reduced eigenvalues of one code across gamma",
        opts: &[
            Opt { name: "p", takes_value: true, default: None, help: "focusing power" },
            Opt { name: "q", takes_value: true, default: None, help: "defocusing power" },
            Opt { name: "code", takes_value: true, default: None, help: "code to sweep" },
            Opt { name: "points", takes_value: true, default: Some("40"), help: "number of grid points" },
            Opt { name: "delta-min", takes_value: true, default: Some("0.02"), help: "lowest gamma as a fraction of gamma_crit" },
            Opt { name: "delta-max", takes_value: true, default: Some("0.998"), help: "highest gamma as a fraction of gamma_crit" },
        ],
    },
    Schema {
        command: "evolve",
        about: "RK4 time integration with conservation monitoring",
        opts: &[
            Opt { name: "p", takes_value: true, default: None, help: "focusing power" },
            Opt { name: "q", takes_value: true, default: None, help: "defocusing power" },
            Opt { name: "gamma", takes_value: true, default: None, help: "defocusing strength" },
            Opt { name: "eps", takes_value: true, default: None, help: "inter-site coupling" },
            Opt { name: "code", takes_value: true, default: None, help: "code of the initial steady state" },
            Opt { name: "t-max", takes_value: true, default: Some("50"), help: "integration horizon" },
            Opt { name: "dt", takes_value: true, default: Some("1e-3"), help: "fixed time step" },
            Opt { name: "perturb", takes_value: true, default: None, help: "relative size of a random complex perturbation" },
            Opt { name: "seed", takes_value: true, default: Some("1"), help: "perturbation seed" },
            Opt { name: "stride", takes_value: true, default: Some("50"), help: "record every this many steps" },
            Opt { name: "summary", takes_value: false, default: None, help: "print a JSON summary instead of the CSV series" },
            Opt { name: "out", takes_value: true, default: None, help: "write the CSV series here" },
        ],
    },
];

pub fn schema(command: &str) -> Option<&'static Schema> {
    SCHEMAS.iter().find(|s| s.command == command)
}

fn model(values: &Values) -> Result<ModelParams, CliError> {
    let p = values.u32("p")?;
    let q = values.u32("q")?;
    let gamma = values.f64("gamma")?;
    // Domain-level validation belongs to the library; its error decides
    // whether this is a usage problem (exit 1).
    Ok(ModelParams::new(p, q, gamma, 0.0)?)
}

fn parse_code(values: &Values) -> Result<Code, CliError> {
    Ok(Code::parse(values.require_str("code")?)?)
}

fn write_or_print(path: Option<&str>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Usage(UsageError(format!("cannot write {p}: {e}")))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn cmd_roots(values: &Values) -> Result<(), CliError> {
    let params = model(values)?;
    let roots = params.find_roots()?;
    let doc = envelope(vec![
        field("p", Json::Int(params.p as i64)),
        field("q", Json::Int(params.q as i64)),
        field("gamma", Json::Float(params.gamma)),
        field("a", Json::Float(roots.small)),
        field("A", Json::Float(roots.large)),
        field("df_a", Json::Float(roots.df_small)),
        field("df_A", Json::Float(roots.df_large)),
        field("gamma_crit", Json::Float(roots.gamma_crit)),
        field("u_double", Json::Float(roots.u_double)),
    ]);
    println!("{}", doc.render());
    Ok(())
}

pub fn cmd_codes(values: &Values) -> Result<(), CliError> {
    let n = values.usize("n")?;
    let max_n = values.usize("max-n")?;
    if n == 0 || n > max_n {
        return Err(CliError::Usage(UsageError(format!(
            "--n must lie in 1..={max_n} (raise --max-n up to 12 if needed)"
        ))));
    }
    if values.flag("count-only") {
        println!("{}", count_irreducible(n)?);
        return Ok(());
    }
    let codes = enumerate_irreducible(n)?;
    match values.require_str("format")? {
        "json" => {
            let doc = envelope(vec![
                field("n", Json::Int(n as i64)),
                field("count", Json::Int(codes.len() as i64)),
                field(
                    "codes",
                    Json::Array(codes.iter().map(|c| Json::str(c.to_string())).collect()),
                ),
            ]);
            println!("{}", doc.render());
        }
        "csv" => {
            let mut csv = Csv::new(&["code"]);
            for c in &codes {
                csv.row(&[c.to_string()]);
            }
            print!("{}", csv.finish());
        }
        "table" => {
            for c in &codes {
                println!("{c}");
            }
        }
        other => {
            return Err(CliError::Usage(UsageError(format!(
                "unknown format {other:?}"
            ))))
        }
    }
    Ok(())
}

fn profile_csv(profile: &LatticeProfile) -> String {
    let mut csv = Csv::new(&["n", "u_n"]);
    for (j, &u) in profile.values().iter().enumerate() {
        csv.row(&[(profile.offset() + j as i64).to_string(), fmt_f64(u)]);
    }
    csv.finish()
}

fn newton_settings(values: &Values) -> Result<NewtonSettings, CliError> {
    Ok(NewtonSettings {
        tol: values.f64("tol").unwrap_or(1e-12),
        max_iter: values.usize("max-iter").unwrap_or(50),
        boundary_tol: values.f64("boundary-tol").unwrap_or(1e-10),
        buffer: values.usize("buffer")?,
    })
}

fn solve_state(
    values: &Values,
    params: &ModelParams,
    roots: &RootPair,
) -> Result<LatticeProfile, CliError> {
    let code = parse_code(values)?;
    let buffer = values.usize("buffer").unwrap_or(20);
    let settings = NewtonSettings {
        buffer,
        ..NewtonSettings::default()
    };
    let seed = seed_profile(&code, roots, settings.buffer);
    Ok(newton_solve(&seed, params, &settings)?)
}

pub fn cmd_solve(values: &Values) -> Result<(), CliError> {
    let params = model(values)?.with_eps(values.f64("eps")?);
    if params.eps < 0.0 {
        return Err(CliError::Usage(UsageError(String::from(
            "--eps must be nonnegative",
        ))));
    }
    let roots = params.find_roots()?;
    let code = parse_code(values)?;
    let settings = newton_settings(values)?;
    let seed = seed_profile(&code, &roots, settings.buffer);
    let profile = newton_solve(&seed, &params, &settings)?;
    write_or_print(values.str_opt("out"), &profile_csv(&profile))
}

fn read_profile_csv(path: &str) -> Result<LatticeProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(UsageError(format!("cannot read {path}: {e}"))))?;
    let mut offset: Option<i64> = None;
    let mut expected_next: i64 = 0;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && line.starts_with("n,") {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (n_text, u_text) = line.split_once(',').ok_or_else(|| {
            CliError::Usage(UsageError(format!("{path}:{}: expected n,u_n", lineno + 1)))
        })?;
        let n: i64 = n_text.trim().parse().map_err(|_| {
            CliError::Usage(UsageError(format!("{path}:{}: bad site index", lineno + 1)))
        })?;
        let u: f64 = u_text.trim().parse().map_err(|_| {
            CliError::Usage(UsageError(format!("{path}:{}: bad amplitude", lineno + 1)))
        })?;
        match offset {
            None => {
                offset = Some(n);
                expected_next = n + 1;
            }
            Some(_) => {
                if n != expected_next {
                    return Err(CliError::Usage(UsageError(format!(
                        "{path}:{}: sites must be contiguous",
                        lineno + 1
                    ))));
                }
                expected_next += 1;
            }
        }
        values.push(u);
    }
    let offset =
        offset.ok_or_else(|| CliError::Usage(UsageError(format!("{path}: empty profile"))))?;
    Ok(LatticeProfile::new(offset, values))
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Stable => "Stable",
        Verdict::Unstable => "Unstable",
        Verdict::Inconclusive => "Inconclusive",
    }
}

fn sigma_str(s: SigmaClass) -> &'static str {
    match s {
        SigmaClass::Zero => "0",
        SigmaClass::One => "1",
        SigmaClass::Degenerate => "degenerate",
    }
}

fn full_report_json(eps: f64, report: &SpectrumReport) -> Json {
    let eigenvalues = Json::Array(
        report
            .eigenvalues
            .iter()
            .map(|l| Json::complex(l.re, l.im))
            .collect(),
    );
    let omega = Json::Array(
        report
            .omega
            .iter()
            .map(|w| Json::complex(w.re, w.im))
            .collect(),
    );
    let krein = Json::Array(
        report
            .krein
            .iter()
            .map(|k| {
                Json::Object(vec![
                    field("lambda", Json::Float(k.lambda)),
                    field(
                        "sign",
                        Json::str(match k.sign {
                            KreinSign::Positive => "positive",
                            KreinSign::Negative => "negative",
                            KreinSign::Degenerate => "degenerate",
                        }),
                    ),
                ])
            })
            .collect(),
    );
    let counts = Json::Object(vec![
        field("n_c", Json::Int(report.counts.n_c as i64)),
        field("n_r_plus", Json::Int(report.counts.n_r_plus as i64)),
        field("n_r_minus", Json::Int(report.counts.n_r_minus as i64)),
        field("n_i_plus", Json::Int(report.counts.n_i_plus as i64)),
        field("n_i_minus", Json::Int(report.counts.n_i_minus as i64)),
    ]);
    envelope(vec![
        field("mode", Json::str("full")),
        field("eps", Json::Float(eps)),
        field("eigenvalues", eigenvalues),
        field("omega", omega),
        field("krein", krein),
        field("counts", counts),
        field("n_l_plus", Json::Int(report.n_l_plus as i64)),
        field("n_l_minus", Json::Int(report.n_l_minus as i64)),
        field("sigma", Json::str(sigma_str(report.sigma))),
        field("verdict", Json::str(verdict_str(report.verdict))),
        field("zero_mode_check", Json::Float(report.zero_mode_check)),
        field(
            "zero_mode_index",
            match report.zero_mode_index {
                Some(i) => Json::Int(i as i64),
                None => Json::Null,
            },
        ),
        field(
            "diagnostic",
            match &report.diagnostic {
                Some(d) => Json::str(d.clone()),
                None => Json::Null,
            },
        ),
    ])
}

pub fn cmd_spectrum(values: &Values) -> Result<(), CliError> {
    let params = model(values)?;
    let roots = params.find_roots()?;
    let code = parse_code(values)?;
    let truncated = values.flag("truncated");
    let eps = values.f64_opt("eps")?;
    if truncated == eps.is_some() {
        return Err(CliError::Usage(UsageError(String::from(
            "pass exactly one of --truncated or --eps",
        ))));
    }

    if truncated {
        let pencil = build_truncated(&code, &roots);
        let (verdict, eig, note) = truncated_verdict(&pencil, &code, &roots)?;
        let eigenvalues = Json::Array(
            (0..eig.n())
                .map(|j| Json::complex(eig.re[j], eig.im[j]))
                .collect(),
        );
        // Krein data for the real nonzero eigenvalues.
        let scale = (0..eig.n())
            .map(|j| (eig.re[j].powi(2) + eig.im[j].powi(2)).sqrt())
            .fold(1.0f64, f64::max);
        let l_plus = pencil.l_plus();
        let mut krein = Vec::new();
        for j in 0..eig.n() {
            if !eig.is_real(j) || eig.re[j].abs() < 1e-7 * scale {
                continue;
            }
            let sign = ilm_core::spectrum::krein_signature(&eig.real_vector(j), &l_plus, 1e-9)?;
            krein.push(Json::Object(vec![
                field("lambda", Json::Float(eig.re[j])),
                field(
                    "sign",
                    Json::str(match sign {
                        KreinSign::Positive => "positive",
                        KreinSign::Negative => "negative",
                        KreinSign::Degenerate => "degenerate",
                    }),
                ),
            ]));
        }
        let doc = envelope(vec![
            field("mode", Json::str("truncated")),
            field("code", Json::str(code.to_string())),
            field("eigenvalues", eigenvalues),
            field("krein", Json::Array(krein)),
            field(
                "sigma",
                Json::str(sigma_str(ilm_core::spectrum::sigma_class_for(&code, &roots))),
            ),
            field("verdict", Json::str(verdict_str(verdict))),
            field(
                "note",
                match note {
                    Some(n) => Json::str(n),
                    None => Json::Null,
                },
            ),
        ]);
        println!("{}", doc.render());
        return Ok(());
    }

    let eps = eps.unwrap();
    let params = params.with_eps(eps);
    let profile = match values.str_opt("profile-file") {
        Some(path) => read_profile_csv(path)?,
        None => solve_state(values, &params, &roots)?,
    };
    let ops = build_full_ops(&profile, &params);
    let eig = full_eigs(&ops)?;
    let report = classify(&ops, &eig, &profile, &roots)?;
    println!("{}", full_report_json(eps, &report).render());
    Ok(())
}

pub fn cmd_branch(values: &Values) -> Result<(), CliError> {
    let params = model(values)?;
    let code = parse_code(values)?;
    let eps_max = values.f64("eps-max")?;
    let step = values.f64("step")?;
    let settings = ContinuationSettings::default();
    let (points, events) = continue_branch(&code, &params, eps_max, step, &settings)?;

    let mut csv = Csv::new(&["eps", "Q", "H", "verdict", "jac_min_sv"]);
    for p in &points {
        csv.row(&[
            fmt_f64(p.eps),
            fmt_f64(p.mass),
            fmt_f64(p.energy),
            verdict_str(p.verdict).to_string(),
            fmt_f64(p.jac_min_sv),
        ]);
    }
    let out = values.require_str("out")?;
    std::fs::write(out, csv.finish())
        .map_err(|e| CliError::Usage(UsageError(format!("cannot write {out}: {e}"))))?;

    let events_json = Json::Array(
        events
            .iter()
            .map(|e| {
                Json::Object(vec![
                    field(
                        "kind",
                        Json::str(match e.kind {
                            EventKind::Fold => "Fold",
                            EventKind::Pitchfork => "Pitchfork",
                        }),
                    ),
                    field("eps_at", Json::Float(e.eps_at)),
                    field("detail", Json::str(e.detail.clone())),
                ])
            })
            .collect(),
    );
    let doc = envelope(vec![
        field("code", Json::str(code.to_string())),
        field("gamma", Json::Float(params.gamma)),
        field("points", Json::Int(points.len() as i64)),
        field("eps_reached", Json::Float(points.iter().map(|p| p.eps).fold(f64::MIN, f64::max))),
        field("events", events_json),
        field("csv", Json::str(out)),
    ]);
    println!("{}", doc.render());
    Ok(())
}

fn scan_request(values: &Values) -> Result<ilm_core::scan::ScanRequest, CliError> {
    let p = values.u32("p")?;
    let q = values.u32("q")?;
    let deltas: Vec<f64> = values
        .require_str("delta")?
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| UsageError(format!("bad delta value {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let (n_min, n_max) = match values.str_opt("n") {
        Some(_) => {
            let n = values.usize("n")?;
            (n, n)
        }
        None => (values.usize("n-min")?, values.usize("n-max")?),
    };
    let mode = match values.require_str("mode")? {
        "truncated" => ScanMode::TruncatedOnly,
        "full" => ScanMode::FullAtEps(values.f64("eps")?),
        other => {
            return Err(CliError::Usage(UsageError(format!(
                "unknown mode {other:?} (expected truncated or full)"
            ))))
        }
    };
    Ok(ilm_core::scan::ScanRequest {
        p,
        q,
        deltas,
        n_min,
        n_max,
        mode,
    })
}

/// Scan with worker threads over each cell's code list; chunks are joined
/// in order, so the result is identical to the sequential scan.
fn scan_parallel(
    req: &ilm_core::scan::ScanRequest,
    threads: usize,
) -> Result<Vec<ScanRow>, CliError> {
    let gc = gamma_crit(req.p, req.q)?;
    let mut rows = Vec::new();
    for n in req.n_min..=req.n_max {
        let codes = enumerate_irreducible(n)?;
        for &delta in &req.deltas {
            let params = ModelParams::new(req.p, req.q, delta * gc, 0.0)?;
            let roots = params.find_roots()?;
            let chunk = codes.len().div_ceil(threads.max(1));
            let outcomes: Vec<CodeOutcome> = std::thread::scope(|scope| {
                let handles: Vec<_> = codes
                    .chunks(chunk.max(1))
                    .map(|slice| {
                        let params = &params;
                        let roots = &roots;
                        let mode = req.mode;
                        scope.spawn(move || {
                            slice
                                .iter()
                                .map(|code| classify_code(params, roots, code, mode))
                                .collect::<Vec<_>>()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("scan worker panicked"))
                    .collect()
            });
            let mut stable = Vec::new();
            let mut inconclusive = Vec::new();
            for outcome in outcomes {
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

pub fn cmd_scan(values: &Values) -> Result<(), CliError> {
    let req = scan_request(values)?;
    let threads = values.usize("threads")?;
    let rows = if threads > 1 {
        scan_parallel(&req, threads)?
    } else {
        ilm_core::scan::run_scan(&req)?
    };

    match values.require_str("format")? {
        "csv" => {
            let mut csv = Csv::new(&["N", "delta", "code", "verdict"]);
            for row in &rows {
                for code in &row.stable {
                    csv.row(&[
                        row.n.to_string(),
                        fmt_f64(row.delta),
                        code.to_string(),
                        String::from("Stable"),
                    ]);
                }
                for code in &row.inconclusive {
                    csv.row(&[
                        row.n.to_string(),
                        fmt_f64(row.delta),
                        code.to_string(),
                        String::from("Inconclusive"),
                    ]);
                }
            }
            print!("{}", csv.finish());
        }
        "table" => {
            for row in &rows {
                println!(
                    "N = {}, delta = {} ({} codes checked)",
                    row.n, row.delta, row.total_checked
                );
                let stable: Vec<String> = row.stable.iter().map(|c| c.to_string()).collect();
                println!("  stable       [{}]: {}", stable.len(), stable.join("  "));
                if !row.inconclusive.is_empty() {
                    let inc: Vec<String> =
                        row.inconclusive.iter().map(|c| c.to_string()).collect();
                    println!("  inconclusive [{}]: {}", inc.len(), inc.join("  "));
                }
            }
        }
        other => {
            return Err(CliError::Usage(UsageError(format!(
                "unknown format {other:?}"
            ))))
        }
    }
    Ok(())
}

pub fn cmd_sweep(values: &Values) -> Result<(), CliError> {
    let p = values.u32("p")?;
    let q = values.u32("q")?;
    let code = parse_code(values)?;
    let points = values.usize("points")?;
    let dmin = values.f64("delta-min")?;
    let dmax = values.f64("delta-max")?;
    if points < 2 || !(0.0 < dmin && dmin < dmax && dmax < 1.0) {
        return Err(CliError::Usage(UsageError(String::from(
            "need --points >= 2 and 0 < delta-min < delta-max < 1",
        ))));
    }
    let gc = gamma_crit(p, q)?;
    let grid: Vec<f64> = (0..points)
        .map(|j| gc * (dmin + (dmax - dmin) * j as f64 / (points as f64 - 1.0)))
        .collect();
    let sweep: Vec<SweepPoint> = ilm_core::scan::sweep_gamma(&code, p, q, &grid)?;

    let mut csv = Csv::new(&["gamma", "index", "re", "im", "class"]);
    for pt in &sweep {
        for (idx, e) in pt.eigenvalues.iter().enumerate() {
            let class = match e.class {
                ilm_core::scan::EigClass::Zero => "zero",
                ilm_core::scan::EigClass::RealNegative => "real-negative",
                ilm_core::scan::EigClass::RealPositive => "real-positive",
                ilm_core::scan::EigClass::ComplexPair => "complex",
            };
            csv.row(&[
                fmt_f64(pt.gamma),
                idx.to_string(),
                fmt_f64(e.value.re),
                fmt_f64(e.value.im),
                class.to_string(),
            ]);
        }
    }
    print!("{}", csv.finish());
    Ok(())
}

pub fn cmd_evolve(values: &Values) -> Result<(), CliError> {
    let params = model(values)?.with_eps(values.f64("eps")?);
    let roots = params.find_roots()?;
    let profile = solve_state(values, &params, &roots)?;
    let initial = match values.f64_opt("perturb")? {
        Some(size) => perturbed_state(&profile, size, values.u64("seed")?),
        None => complex_state(&profile),
    };
    let t_max = values.f64("t-max")?;
    let dt = values.f64("dt")?;
    let stride = values.usize("stride")?;
    let evolution = evolve(&initial, &params, t_max, dt, stride)?;

    let mut csv = Csv::new(&["t", "Q", "H", "deviation"]);
    for s in &evolution.samples {
        csv.row(&[
            fmt_f64(s.t),
            fmt_f64(s.mass),
            fmt_f64(s.energy),
            fmt_f64(s.deviation),
        ]);
    }
    let csv_text = csv.finish();

    if values.flag("summary") {
        if let Some(path) = values.str_opt("out") {
            std::fs::write(path, &csv_text)
                .map_err(|e| CliError::Usage(UsageError(format!("cannot write {path}: {e}"))))?;
        }
        let q0 = evolution.samples.first().map(|s| s.mass).unwrap_or(0.0);
        let q_drift = evolution
            .samples
            .iter()
            .map(|s| (s.mass - q0).abs() / q0.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let rate = match growth_rate(&evolution.samples) {
            Ok(r) => Json::Float(r),
            Err(_) => Json::Null,
        };
        let doc = envelope(vec![
            field("t_max", Json::Float(t_max)),
            field("samples", Json::Int(evolution.samples.len() as i64)),
            field("diverged", Json::Bool(evolution.diverged)),
            field("boundary_warning", Json::Bool(evolution.boundary_warning)),
            field("mass_drift", Json::Float(q_drift)),
            field("growth_rate", rate),
            field(
                "max_deviation",
                Json::Float(
                    evolution
                        .samples
                        .iter()
                        .map(|s| s.deviation)
                        .fold(0.0, f64::max),
                ),
            ),
        ]);
        println!("{}", doc.render());
        Ok(())
    } else {
        write_or_print(values.str_opt("out"), &csv_text)
    }
}
