//! CSV artifacts. Every file starts with a `# config_hash=<hex>` line and
//! floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fracpq_core::{BarrierCheck, BarrierCheckReport, ExponentFit, GridFunction, Outcome, PrincipleVerdict, SingularStage};

use crate::error::{Error, Result};

pub const SOLUTION_CSV: &str = "solution.csv";
pub const FIT_CSV: &str = "fit.csv";
pub const VERDICT_CSV: &str = "verdicts.csv";
pub const STAGES_CSV: &str = "stages.csv";
pub const BARRIER_CSV: &str = "barrier.csv";
pub const AGGREGATE_CSV: &str = "aggregate.csv";

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A table waiting to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, hash: &str) -> Result<PathBuf> {
        let path = dir.join(self.name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "# config_hash={hash}").map_err(|e| Error::io(&path, e))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

pub fn solution_table(u: &GridFunction) -> Table {
    let grid = u.grid();
    let mut t = Table::new(SOLUTION_CSV, &["x", "u", "d"]);
    for i in grid.index_of_a()..=grid.index_of_b() {
        t.push(vec![fmt_f64(grid.x(i)), fmt_f64(u.value(i)), fmt_f64(grid.node_distance(i))]);
    }
    t
}

pub fn fit_table(fits: &[(String, ExponentFit)], n: usize, hash: &str) -> Table {
    let mut t = Table::new(
        FIT_CSV,
        &["kind", "side", "d_lo", "d_hi", "exponent", "r_squared", "n", "config_hash"],
    );
    for (kind, fit) in fits {
        t.push(vec![
            kind.clone(),
            fit.side.as_str().into(),
            fmt_f64(fit.window.d_lo),
            fmt_f64(fit.window.d_hi),
            fmt_f64(fit.exponent),
            fmt_f64(fit.r_squared),
            n.to_string(),
            hash.into(),
        ]);
    }
    t
}

pub fn passed_field(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Pass => "true",
        Outcome::Fail => "false",
        Outcome::NotApplicable => "n/a",
    }
}

pub fn verdict_table(verdicts: &[PrincipleVerdict], n: usize, hash: &str) -> Table {
    let mut t = Table::new(
        VERDICT_CSV,
        &["name", "passed", "margin", "n", "refinement_ratio", "config_hash"],
    );
    for v in verdicts {
        t.push(vec![
            v.name.clone(),
            passed_field(v.outcome).into(),
            fmt_f64(v.margin),
            n.to_string(),
            v.refinement_ratio.map(fmt_f64).unwrap_or_default(),
            hash.into(),
        ]);
    }
    t
}

pub fn stages_table(stages: &[SingularStage]) -> Table {
    let mut t = Table::new(
        STAGES_CSV,
        &[
            "eps",
            "outer_iterations",
            "inner_iterations",
            "residual_sup",
            "sup_difference",
            "monotonicity_violation",
            "converged",
        ],
    );
    for s in stages {
        t.push(vec![
            fmt_f64(s.eps),
            s.outer_iterations.to_string(),
            s.report.iterations.to_string(),
            fmt_f64(s.report.residual_sup),
            fmt_f64(s.sup_difference),
            fmt_f64(s.monotonicity_violation),
            s.report.converged.to_string(),
        ]);
    }
    t
}

pub fn barrier_table(reports: &[BarrierCheckReport]) -> Table {
    let mut t = Table::new(
        BARRIER_CSV,
        &[
            "check",
            "alpha",
            "kappa",
            "rho",
            "band",
            "coarse_n",
            "fine_n",
            "inf_scaled_p_value",
            "inf_scaled_p_value_fine",
            "sup_q_value",
            "sup_q_value_fine",
            "refinement_ratio",
            "passed",
        ],
    );
    for r in reports {
        t.push(vec![
            match r.check {
                BarrierCheck::Supersolution => "supersolution",
                BarrierCheck::QBounded => "q_bounded",
            }
            .into(),
            fmt_f64(r.alpha),
            fmt_f64(r.kappa),
            fmt_f64(r.rho),
            fmt_f64(r.band),
            r.coarse_n.to_string(),
            r.fine_n.to_string(),
            fmt_f64(r.inf_scaled_p_value),
            fmt_f64(r.inf_scaled_p_value_fine),
            fmt_f64(r.sup_q_value),
            fmt_f64(r.sup_q_value_fine),
            fmt_f64(r.refinement_ratio),
            r.passed.to_string(),
        ]);
    }
    t
}

/// Writes all tables into `dir`, creating it first.
pub fn write_all(dir: &Path, hash: &str, tables: &[Table]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    tables.iter().map(|t| t.write(dir, hash)).collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        let back: f64 = fmt_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }
}
