use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use freefactor_core::algebra::Element;
use freefactor_core::classify::Verdict;
use freefactor_core::expansion::{ef_exact, ef_lower_bound_certificate};
use freefactor_core::figures::{figure1 as figure1_data, figure2 as figure2_data};
use freefactor_core::groups::{modular_invariant_group, type_candidates};
use freefactor_core::modular::{build_modular, witness_check};
use freefactor_core::random::{random_centered, random_element};
use freefactor_core::{
    build_fock, classify_pair, parse_algebras, parse_pair, run_verify, InputError, StateAlgebra,
    VerifyConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INCONCLUSIVE: u8 = 4;
pub const EXIT_VERIFY_FAILED: u8 = 5;

/// Tolerance on the modular conjugation residual.
const RESIDUAL_TOL: f64 = 1e-9;
/// Tolerance on centered alternating moments.
const MOMENT_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(anyhow::Error),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        if e.is_parse_error() {
            CliError::Parse(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Io)
}

fn load_all(path: &Path) -> Result<Vec<StateAlgebra>, CliError> {
    Ok(parse_algebras(&read_input(path)?)?)
}

fn load_pair(path: &Path) -> Result<(StateAlgebra, StateAlgebra), CliError> {
    Ok(parse_pair(&read_input(path)?)?)
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .context("writing to stdout")
        .map_err(CliError::Io)
}

fn emit_json(v: &serde_json::Value) -> Result<(), CliError> {
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(v).expect("json value")
    ))
}

pub fn ef(path: &Path, json: bool) -> Result<u8, CliError> {
    let algebras = load_all(path)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for a in &algebras {
        let e = ef_exact(a).map_err(validation)?;
        let certificate = ef_lower_bound_certificate(a).map_err(validation)?;
        writeln!(text, "{}", a.label).unwrap();
        writeln!(text, "  ef^2 = {e}").unwrap();
        writeln!(text, "  ef = {}", fmt_float(e.value_f64())).unwrap();
        writeln!(
            text,
            "  all weights <= 1/2, certifying ef >= 1: {}",
            if certificate { "yes" } else { "no" }
        )
        .unwrap();
        rows.push(json!({
            "label": a.label,
            "ef_squared": e,
            "ef": e.value_f64().is_finite().then(|| e.value_f64()),
            "half_weight_certificate": certificate,
        }));
    }
    if json {
        emit_json(&json!({ "algebras": rows }))?;
    } else {
        emit(&text)?;
    }
    Ok(EXIT_OK)
}

fn fmt_float(x: f64) -> String {
    freefactor_core::figures::format_significant(x, 12)
}

pub fn classify(path: &Path, json: bool) -> Result<u8, CliError> {
    let (a, b) = load_pair(path)?;
    let report = classify_pair(&a, &b).map_err(validation)?;
    if json {
        emit(&format!("{}\n", report.to_json()))?;
    } else {
        let mut text = String::new();
        writeln!(text, "{} * {}", report.labels[0], report.labels[1]).unwrap();
        for (label, e) in report.labels.iter().zip(&report.ef_values) {
            writeln!(text, "  ef^2({label}) = {e}").unwrap();
        }
        for (label, g) in report.labels.iter().zip(&report.invariant_groups) {
            writeln!(text, "  I({label}) = {g}").unwrap();
        }
        for c in &report.hypothesis_log {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(text, "  [{mark}] {}: {}", c.name, c.detail).unwrap();
        }
        writeln!(text, "{}", report.verdict).unwrap();
        if let (Some(t), Some(c)) = (&report.t_invariant, &report.type_candidates) {
            match t.generator() {
                Some(g) => writeln!(text, "T = {t}  (generator {})", fmt_float(g)).unwrap(),
                None => writeln!(text, "T = {t}").unwrap(),
            }
            writeln!(text, "{c}").unwrap();
        }
        emit(&text)?;
    }
    Ok(match report.verdict {
        Verdict::Certified => EXIT_OK,
        Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
    })
}

pub fn invariant(path: &Path, json: bool) -> Result<u8, CliError> {
    let algebras = load_all(path)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut all_witnessed = true;
    for a in &algebras {
        let g = modular_invariant_group(a).map_err(validation)?;
        let witness = if a.is_diffuse() {
            None
        } else {
            let flow = build_modular(a).map_err(validation)?;
            Some(witness_check(&flow, &g, 0).map_err(|e| e.to_string()))
        };
        writeln!(text, "{}", a.label).unwrap();
        writeln!(text, "  I = {g}").unwrap();
        if let Some(gen) = g.generator() {
            writeln!(text, "  generator = {}", fmt_float(gen)).unwrap();
        }
        writeln!(text, "  types if T = I: {}", type_candidates(&g)).unwrap();
        match &witness {
            Some(Ok(())) => writeln!(text, "  modular witness: ok").unwrap(),
            Some(Err(e)) => {
                all_witnessed = false;
                writeln!(text, "  modular witness: FAILED ({e})").unwrap()
            }
            None => writeln!(text, "  modular witness: not applicable").unwrap(),
        }
        rows.push(json!({
            "label": a.label,
            "group": g,
            "witness": match &witness {
                Some(Ok(())) => json!("ok"),
                Some(Err(e)) => json!({ "failed": e }),
                None => json!(null),
            },
        }));
    }
    if json {
        emit_json(&json!({ "algebras": rows }))?;
    } else {
        emit(&text)?;
    }
    Ok(if all_witnessed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn check_grid(n: usize, flag: &str) -> Result<(), CliError> {
    if n < 2 {
        return Err(validation(format!("--{flag} must be at least 2")));
    }
    Ok(())
}

fn write_csv(series: &freefactor_core::CsvSeries, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => series
            .write_file(p)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(CliError::Io),
        None => emit(&series.to_csv_string()),
    }
}

pub fn figure1(samples: usize, out: Option<&Path>) -> Result<u8, CliError> {
    check_grid(samples, "samples")?;
    write_csv(&figure1_data(samples), out)?;
    Ok(EXIT_OK)
}

pub fn figure2(
    grid: usize,
    out: Option<&Path>,
    boundary_out: Option<&Path>,
) -> Result<u8, CliError> {
    check_grid(grid, "grid")?;
    let fig = figure2_data(grid);
    write_csv(&fig.region, out)?;
    let boundary_path: Option<PathBuf> = match (boundary_out, out) {
        (Some(b), _) => Some(b.to_path_buf()),
        (None, Some(o)) => Some(PathBuf::from(format!("{}.boundary.csv", o.display()))),
        (None, None) => None,
    };
    if boundary_path.is_none() {
        emit("\n")?;
    }
    write_csv(&fig.boundary, boundary_path.as_deref())?;
    Ok(EXIT_OK)
}

pub fn fock(path: &Path, len: usize, t: f64, seed: u64, json: bool) -> Result<u8, CliError> {
    let (a, b) = load_pair(path)?;
    let fock = build_fock(&a, &b, len).map_err(validation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = [
        a.blocks().map_err(validation)?,
        b.blocks().map_err(validation)?,
    ];

    let mut residuals = Vec::new();
    for (iota, shape) in shapes.iter().enumerate() {
        let x: Element = random_element(&mut rng, shape);
        residuals.push(
            fock.vacuum_modular_residual(iota, &x, t)
                .map_err(validation)?,
        );
    }
    let ca = random_centered(&mut rng, shapes[0]);
    let cb = random_centered(&mut rng, shapes[1]);
    let mut moments: Vec<(&str, Option<f64>)> = Vec::new();
    let words: [(&str, Vec<(usize, Element)>); 2] = [
        ("phi(ab)", vec![(0, ca.clone()), (1, cb.clone())]),
        (
            "phi(abab)",
            vec![(0, ca.clone()), (1, cb.clone()), (0, ca), (1, cb)],
        ),
    ];
    for (name, word) in words {
        let value = if word.len() <= len {
            Some(fock.free_moment(&word).map_err(validation)?.norm())
        } else {
            None
        };
        moments.push((name, value));
    }
    let ok = residuals.iter().all(|r| *r <= RESIDUAL_TOL)
        && moments
            .iter()
            .all(|(_, m)| m.is_none_or(|v| v <= MOMENT_TOL));

    if json {
        emit_json(&json!({
            "dim": fock.dim(),
            "max_len": len,
            "t": t,
            "modular_residuals": { a.label.clone(): residuals[0], b.label.clone(): residuals[1] },
            "centered_moments": moments.iter().map(|(n, v)| json!({ "word": n, "abs": v })).collect::<Vec<_>>(),
            "ok": ok,
        }))?;
    } else {
        let mut text = String::new();
        writeln!(text, "dim = {}", fock.dim()).unwrap();
        for (label, r) in [&a.label, &b.label].iter().zip(&residuals) {
            writeln!(
                text,
                "modular conjugation residual for {label} at t = {t}: {r:.3e}"
            )
            .unwrap();
        }
        for (name, v) in &moments {
            match v {
                Some(v) => writeln!(text, "centered moment |{name}| = {v:.3e}").unwrap(),
                None => writeln!(
                    text,
                    "centered moment {name}: skipped (word longer than --len)"
                )
                .unwrap(),
            }
        }
        writeln!(text, "{}", if ok { "ok" } else { "FAILED" }).unwrap();
        emit(&text)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

pub fn verify(trials: usize, seed: u64, json: bool) -> Result<u8, CliError> {
    let report = run_verify(&VerifyConfig {
        trials,
        seed,
        ..VerifyConfig::default()
    });
    if json {
        emit(&format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ))?;
    } else {
        let mut text = String::new();
        writeln!(text, "seed {seed}, {trials} trials per suite").unwrap();
        for s in &report.suites {
            writeln!(text, "{s}").unwrap();
        }
        let passed = report.suites.iter().filter(|s| s.passed()).count();
        writeln!(text, "{passed}/{} suites passed", report.suites.len()).unwrap();
        emit(&text)?;
    }
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}
