//! One sub-run per swept value, each in its own directory, plus an
//! aggregate table written once all sub-runs are done.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::artifacts::{self, fmt_f64, Table, AGGREGATE_CSV};
use crate::config::{Settings, Value};
use crate::error::{Error, Result};
use crate::pipeline::{self, RunOutcome};
use crate::report;

/// Worker count: `FRACPQ_THREADS` if set, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("FRACPQ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn sub_run(settings: &Settings, index: usize, value: f64) -> Result<RunOutcome> {
    let spec = settings.sweep.as_ref().expect("sweep settings");
    let mut cfg = settings.config.clone();
    cfg.set_number(&spec.key, value)?;
    cfg.set("experiment.kind", Value::Str(spec.kind.as_str().into()))?;
    let dir = settings.out_dir.join(format!("run_{index:03}"));
    cfg.set("out_dir", Value::Str(dir.to_string_lossy().into_owned()))?;
    pipeline::run(&cfg.resolve()?)
}

pub fn run_sweep(settings: &Settings) -> Result<RunOutcome> {
    let spec = settings
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep.key", "missing"))?;
    let start = Instant::now();
    let values = &spec.values;
    let results: Mutex<Vec<Option<Result<RunOutcome>>>> = Mutex::new((0..values.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = worker_count().min(values.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= values.len() {
                    break;
                }
                let r = sub_run(settings, k, values[k]);
                results.lock().expect("sweep results")[k] = Some(r);
            });
        }
    });
    let results: Vec<Result<RunOutcome>> = results
        .into_inner()
        .expect("sweep results")
        .into_iter()
        .map(|r| r.expect("every value ran"))
        .collect();

    let mut table = Table::new(
        AGGREGATE_CSV,
        &["value", "status", "exponent", "sup_u", "min_increment", "min_margin", "out_dir"],
    );
    let mut notes = Vec::new();
    let mut verdicts = Vec::new();
    let mut converged = true;
    let mut previous: Option<&fracpq_core::GridFunction> = None;
    for (k, (value, r)) in values.iter().zip(&results).enumerate() {
        match r {
            Ok(out) => {
                let sup = out.solution.as_ref().map(|u| u.interior_sup());
                let increment = match (previous, out.solution.as_ref()) {
                    (Some(prev), Some(u)) if prev.same_grid(u) => Some(
                        u.grid()
                            .interior()
                            .map(|i| u.value(i) - prev.value(i))
                            .fold(f64::INFINITY, f64::min),
                    ),
                    _ => None,
                };
                let margin = out
                    .verdicts
                    .iter()
                    .filter(|v| v.applicable())
                    .map(|v| v.margin)
                    .fold(f64::INFINITY, f64::min);
                table.push(vec![
                    fmt_f64(*value),
                    if out.success() { "ok" } else { "failed" }.into(),
                    out.fits.first().map(|(_, f)| fmt_f64(f.exponent)).unwrap_or_default(),
                    sup.map(fmt_f64).unwrap_or_default(),
                    increment.map(fmt_f64).unwrap_or_default(),
                    if margin.is_finite() { fmt_f64(margin) } else { String::new() },
                    out.out_dir.to_string_lossy().into_owned(),
                ]);
                converged &= out.converged;
                verdicts.extend(out.verdicts.iter().cloned().map(|mut v| {
                    v.name = format!("{} [{} = {value}]", v.name, spec.key);
                    v
                }));
                previous = out.solution.as_ref();
            }
            Err(e) => {
                converged = false;
                notes.push(format!("sub-run {k} ({} = {value}) failed: {e}", spec.key));
                table.push(vec![
                    fmt_f64(*value),
                    "error".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                previous = None;
            }
        }
    }
    let mut files = artifacts::write_all(&settings.out_dir, &settings.hash, &[table])?;
    let mut outcome = RunOutcome {
        kind: settings.kind,
        out_dir: settings.out_dir.clone(),
        files: Vec::new(),
        verdicts,
        fits: Vec::new(),
        solution: None,
        converged,
        wall_time: start.elapsed().as_secs_f64(),
        notes,
    };
    let report_path = settings.out_dir.join(report::RUN_REPORT);
    artifacts::write_text(&report_path, &report::run_report(settings, &outcome))?;
    files.push(report_path);
    outcome.files = files;
    Ok(outcome)
}
