//! Batch front end: load a problem file, check the parameter conditions, run
//! the solver and write a CSV trace plus a key=value summary.

pub mod file;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use splitep::equilibrium::verify_bifunction_axioms;
use splitep::mapping::{verify_class, MappingClass, CLASS_TOL};
use splitep::oracle::solve_solution_set;
use splitep::solver::{mode_reduce, run, ConditionReport, Status};

pub use file::{load, parse, Loaded, ProblemFile};
pub use output::{write_summary, write_trace, OracleView};

pub const EXIT_CONVERGED: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_MAX_ITER: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_DIVERGED: u8 = 4;

pub const VERIFY_SAMPLES: usize = 200;
pub const VERIFY_POWERS: usize = 16;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("parse error at `{field}` (line {line}, column {column}): {message}")]
    Parse {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported file version {0}")]
    Version(u32),

    #[error(transparent)]
    Invalid(#[from] splitep::Error),

    #[error("conditions not met: {}", .0.failure_summary())]
    Conditions(ConditionReport),

    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

pub fn exit_code(status: Status) -> u8 {
    match status {
        Status::Converged => EXIT_CONVERGED,
        Status::MaxIter => EXIT_MAX_ITER,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::Diverged => EXIT_DIVERGED,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs the solver. The summary goes to `summary` if given, else to `out`.
pub fn solve_command(
    path: &Path,
    trace: Option<&Path>,
    summary: Option<&Path>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let loaded = load(path, seed)?;
    let result = run(&loaded.problem, &loaded.config, &loaded.x1)?;

    // the oracle sees the same reduced instance as the engine
    let reduced = mode_reduce(&loaded.problem, loaded.config.mode, loaded.config.seed)?;
    let oracle = OracleView::from_solution(solve_solution_set(&reduced), &loaded.x1);

    if let Some(p) = trace {
        let mut w = create(p)?;
        write_trace(&mut w, &result, oracle.target())?;
        w.flush()?;
    }
    match summary {
        Some(p) => {
            let mut w = create(p)?;
            write_summary(&mut w, &result, &oracle)?;
            w.flush()?;
        }
        None => write_summary(out, &result, &oracle)?,
    }
    Ok(exit_code(result.status))
}

/// Samples the bifunction axioms and the mapping class claims; 0 iff all hold.
pub fn verify_command(path: &Path, seed: Option<u64>, out: &mut dyn Write) -> Result<u8, CliError> {
    let loaded = load(path, seed)?;
    let p = &loaded.problem;
    let seed = loaded.config.seed;
    let mut ok = true;

    let pieces = [("f", &p.f, p.dim_h1), ("g", &p.g, p.dim_h2)];
    for (name, fams, dim) in pieces {
        for (i, f) in fams.iter().enumerate() {
            let report = verify_bifunction_axioms(f, dim, VERIFY_SAMPLES, seed)?;
            for c in &report.checks {
                writeln!(
                    out,
                    "{name}[{i}] {} worst={:.6e} {}",
                    c.name,
                    c.worst_violation,
                    verdict(c.passed)
                )?;
            }
            ok &= report.passed();
        }
    }
    for (i, s) in p.s.iter().enumerate() {
        let report = verify_class(
            s,
            MappingClass::TotalAsymptoticallyStrict,
            &p.c,
            p.dim_h1,
            VERIFY_POWERS,
            VERIFY_SAMPLES,
            seed,
        )?;
        // the class definitions presuppose S(C) inside C
        let mapping_ok = report.passed() && report.domain_violation <= CLASS_TOL;
        writeln!(
            out,
            "S[{i}] taspc worst_slack={:.6e} domain_violation={:.6e} {}",
            report.worst(),
            report.domain_violation,
            verdict(mapping_ok)
        )?;
        ok &= mapping_ok;
    }
    writeln!(out, "result={}", verdict(ok))?;
    Ok(if ok { EXIT_CONVERGED } else { EXIT_FAILURE })
}

/// Loads and checks the file, listing every condition clause.
pub fn validate_command(path: &Path, out: &mut dyn Write) -> Result<u8, CliError> {
    let loaded = load(path, None)?;
    let reduced = mode_reduce(&loaded.problem, loaded.config.mode, loaded.config.seed)?;
    let report = splitep::solver::validate_config(&reduced, &loaded.config);
    for c in &report.checks {
        writeln!(out, "({}) {}: {} {}", c.condition, c.clause, c.detail, verdict(c.passed))?;
    }
    writeln!(out, "gamma={:.17e}", loaded.config.gamma)?;
    writeln!(out, "result=pass")?;
    Ok(EXIT_CONVERGED)
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}
