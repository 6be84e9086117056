//! Trace CSV and key=value summary.

use std::io::{self, Write};

use splitep::oracle::{AnalyticSolutionSet, SolutionSet};
use splitep::solver::RunResult;
use splitep::space::Vector;

pub const TRACE_COLUMNS: [&str; 7] = ["n", "step", "y", "u", "split", "fixed_point", "theta"];
pub const ORACLE_COLUMN: &str = "distance_to_oracle";

/// Full round-trip precision, so traces diff byte-for-byte.
fn num(x: f64) -> String {
    format!("{x:.17e}")
}

fn point(x: &Vector) -> String {
    x.iter().map(|&c| num(c)).collect::<Vec<_>>().join(",")
}

/// What the analytic solver could say about the instance.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleView {
    /// Projection of `x1` onto the solution set.
    Target(Vector),
    Empty,
    Unavailable(String),
}

impl OracleView {
    pub fn from_solution(set: splitep::Result<AnalyticSolutionSet>, x1: &Vector) -> Self {
        match set {
            Ok(s) if matches!(s.set, SolutionSet::Empty) => OracleView::Empty,
            Ok(s) => match splitep::oracle::project_onto_solution_set(&s, x1) {
                Ok(t) => OracleView::Target(t),
                Err(e) => OracleView::Unavailable(e.to_string()),
            },
            Err(e) => OracleView::Unavailable(e.to_string()),
        }
    }

    pub fn target(&self) -> Option<&Vector> {
        match self {
            OracleView::Target(t) => Some(t),
            _ => None,
        }
    }
}

/// One row per step; the oracle column appears only when a target exists.
/// Distances are measured from `x_{n+1}`.
pub fn write_trace<W: Write + ?Sized>(w: &mut W, result: &RunResult, target: Option<&Vector>) -> io::Result<()> {
    let mut header = TRACE_COLUMNS.join(",");
    if target.is_some() {
        header.push(',');
        header.push_str(ORACLE_COLUMN);
    }
    writeln!(w, "{header}")?;
    for rec in &result.trace {
        let mut row = rec.n.to_string();
        for r in rec.residuals.as_array() {
            row.push(',');
            row.push_str(&num(r));
        }
        row.push(',');
        row.push_str(&num(rec.theta));
        if let Some(t) = target {
            row.push(',');
            row.push_str(&num(rec.x_next.dist(t)));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

pub fn write_summary<W: Write + ?Sized>(w: &mut W, result: &RunResult, oracle: &OracleView) -> io::Result<()> {
    writeln!(w, "status={}", result.status.as_str())?;
    writeln!(w, "iterations={}", result.iterations)?;
    writeln!(w, "final_point={}", point(&result.final_point))?;
    if let Some(last) = result.trace.last() {
        let names = &TRACE_COLUMNS[1..6];
        for (name, r) in names.iter().zip(last.residuals.as_array()) {
            writeln!(w, "residual_{name}={}", num(r))?;
        }
        writeln!(w, "theta={}", num(last.theta))?;
    }
    match oracle {
        OracleView::Target(t) => {
            writeln!(w, "oracle=available")?;
            writeln!(w, "oracle_point={}", point(t))?;
            writeln!(w, "oracle_distance={}", num(result.final_point.dist(t)))?;
        }
        OracleView::Empty => writeln!(w, "oracle=empty")?,
        OracleView::Unavailable(_) => writeln!(w, "oracle=unavailable")?,
    }
    if let Some(e) = &result.failure {
        writeln!(w, "failure={e}")?;
    }
    Ok(())
}
