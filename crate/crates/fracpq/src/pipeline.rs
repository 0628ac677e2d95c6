//! Experiment pipelines. Each computes everything in memory and only then
//! writes its artifacts, so a failing run leaves no partial CSVs behind.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use fracpq_core::solver::singular_limit_with;
use fracpq_core::verifiers::{CACCIOPPOLI, SINGULAR_SCP, STRONG_MAX};
use fracpq_core::{
    fit_boundary_exponent, verify_barrier_q_bounded, verify_barrier_super, verify_caccioppoli,
    verify_singular_scp, verify_strong_comparison, verify_strong_max, verify_weak_comparison,
    BarrierCheckReport, CaccioppoliInput, DirichletSolver, ExponentFit, Grid, GridFunction,
    Interval, Outcome, PrincipleVerdict, SingularLimit, SingularParams, SolveReport,
    Truncation, WeightKind, Witness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artifacts::{self, Table};
use crate::config::{ExperimentKind, Rhs, Settings};
use crate::error::{Error, Result};
use crate::report;

pub const MONOTONE_IN_EPS: &str = "monotonicity in ε";

/// Result of one experiment run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub kind: ExperimentKind,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub verdicts: Vec<PrincipleVerdict>,
    pub fits: Vec<(String, ExponentFit)>,
    pub solution: Option<GridFunction>,
    pub converged: bool,
    pub wall_time: f64,
    pub notes: Vec<String>,
}

impl RunOutcome {
    /// Solver converged and no applicable verdict failed.
    pub fn success(&self) -> bool {
        self.converged && self.verdicts.iter().all(|v| v.outcome != Outcome::Fail)
    }
}

/// Everything a pipeline computed, before it is written.
struct Computed {
    tables: Vec<Table>,
    verdicts: Vec<PrincipleVerdict>,
    fits: Vec<(String, ExponentFit)>,
    solution: Option<GridFunction>,
    converged: bool,
    notes: Vec<String>,
}

impl Computed {
    fn new() -> Self {
        Computed {
            tables: Vec::new(),
            verdicts: Vec::new(),
            fits: Vec::new(),
            solution: None,
            converged: true,
            notes: Vec::new(),
        }
    }
}

pub fn run(settings: &Settings) -> Result<RunOutcome> {
    if settings.kind == ExperimentKind::Sweep {
        return crate::sweep::run_sweep(settings);
    }
    let start = Instant::now();
    let mut c = match settings.kind {
        ExperimentKind::Solve => solve(settings)?,
        ExperimentKind::Singular => singular(settings)?,
        ExperimentKind::Exponent => exponent(settings)?,
        ExperimentKind::Barrier => barrier(settings)?,
        ExperimentKind::Principles => principles(settings)?,
        ExperimentKind::Sweep => unreachable!(),
    };
    let n = settings.grid.n();
    c.tables.push(artifacts::fit_table(&c.fits, n, &settings.hash));
    c.tables.push(artifacts::verdict_table(&c.verdicts, n, &settings.hash));
    let wall_time = start.elapsed().as_secs_f64();
    let mut files = artifacts::write_all(&settings.out_dir, &settings.hash, &c.tables)?;
    let mut outcome = RunOutcome {
        kind: settings.kind,
        out_dir: settings.out_dir.clone(),
        files: Vec::new(),
        verdicts: c.verdicts,
        fits: c.fits,
        solution: c.solution,
        converged: c.converged,
        wall_time,
        notes: c.notes,
    };
    let report_path = settings.out_dir.join(report::RUN_REPORT);
    artifacts::write_text(&report_path, &report::run_report(settings, &outcome))?;
    files.push(report_path);
    outcome.files = files;
    Ok(outcome)
}

fn source(settings: &Settings, grid: &Arc<Grid>) -> GridFunction {
    GridFunction::from_interior_fn(grid.clone(), |x| settings.rhs.at(x))
}

fn timed<T>(f: impl FnOnce() -> fracpq_core::Result<(T, SolveReport)>) -> Result<(T, SolveReport)> {
    let start = Instant::now();
    let (value, mut report) = f()?;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((value, report))
}

fn solve_on(settings: &Settings, grid: &Arc<Grid>, f: &GridFunction) -> Result<(GridFunction, SolveReport)> {
    let mut solver = DirichletSolver::new(grid.clone(), settings.params)?;
    timed(|| solver.solve(f, None, &settings.solver))
}

fn add_fit(c: &mut Computed, settings: &Settings, kind: &str, u: &GridFunction) {
    match fit_boundary_exponent(u, settings.window, settings.side) {
        Ok(fit) => c.fits.push((kind.to_string(), fit)),
        Err(e) => c.notes.push(format!("no {kind} exponent fit: {e}")),
    }
}

fn non_convergence(c: &mut Computed, what: &str, report: &SolveReport) {
    if !report.converged {
        c.converged = false;
        c.notes.push(format!(
            "{what} did not converge: residual {:e} after {} iterations (tolerance {:e})",
            report.residual_sup, report.iterations, report.tolerance
        ));
    }
}

fn solve(settings: &Settings) -> Result<Computed> {
    let mut c = Computed::new();
    let grid = &settings.grid;
    let f = source(settings, grid);
    let (u, report) = solve_on(settings, grid, &f)?;
    non_convergence(&mut c, "solve", &report);
    add_fit(&mut c, settings, "regular", &u);
    if settings.grid.interior().all(|i| f.value(i) >= 0.0) {
        c.verdicts.push(verify_strong_max(&u, settings.principles.tol));
    }
    c.notes.push(format!("solver wall time {:.3} s", report.wall_time));
    c.tables.push(artifacts::solution_table(&u));
    c.solution = Some(u);
    Ok(c)
}

fn background(settings: &Settings, grid: &Arc<Grid>, lift: f64) -> Option<GridFunction> {
    let g = match settings.rhs {
        Rhs::Singular(g) => g,
        _ => 0.0,
    } + lift;
    (g > 0.0).then(|| GridFunction::from_interior_fn(grid.clone(), |_| g))
}

fn singular_limit(settings: &Settings, grid: &Arc<Grid>, lift: f64, sp: &SingularParams) -> Result<SingularLimit> {
    let setup = settings.singular.as_ref().ok_or_else(|| Error::config("singular.gamma", "missing"))?;
    let mut solver = DirichletSolver::new(grid.clone(), settings.params)?;
    let bg = background(settings, grid, lift);
    Ok(singular_limit_with(&mut solver, sp, &setup.schedule, bg.as_ref(), &settings.solver)?)
}

fn singular(settings: &Settings) -> Result<Computed> {
    let mut c = Computed::new();
    let setup = settings.singular.as_ref().ok_or_else(|| Error::config("singular.gamma", "missing"))?;
    let start = Instant::now();
    let limit = singular_limit(settings, &settings.grid, 0.0, &setup.params)?;
    let elapsed = start.elapsed().as_secs_f64();
    if !limit.converged {
        c.converged = false;
        c.notes.push("a stage of the ε-schedule did not converge".into());
    }
    let kind = if setup.params.strongly_singular(&settings.params) {
        "singular_strong"
    } else {
        "singular_mild"
    };
    add_fit(&mut c, settings, kind, &limit.solution);
    if let Some(mu) = setup.params.predicted_exponent(&settings.params) {
        c.notes.push(format!("predicted boundary exponent {mu:.4}"));
    }
    c.verdicts.push(monotonicity_verdict(&limit, settings));
    c.verdicts.push(verify_strong_max(&limit.solution, settings.principles.tol));
    c.notes.push(format!("{} ε-stages in {elapsed:.3} s", limit.stages.len()));
    c.tables.push(artifacts::solution_table(&limit.solution));
    c.tables.push(artifacts::stages_table(&limit.stages));
    c.solution = Some(limit.solution);
    Ok(c)
}

fn monotonicity_verdict(limit: &SingularLimit, settings: &Settings) -> PrincipleVerdict {
    let tol = settings.solver.tol.unwrap_or(1e-8);
    let (worst, stage) = limit
        .stages
        .iter()
        .enumerate()
        .map(|(k, s)| (s.monotonicity_violation, k))
        .fold((0.0f64, 0), |a, b| if b.0 > a.0 { b } else { a });
    let margin = 10.0 * tol - worst;
    let passed = limit.monotone && margin >= 0.0;
    PrincipleVerdict {
        name: MONOTONE_IN_EPS.into(),
        outcome: if passed { Outcome::Pass } else { Outcome::Fail },
        witness: (!passed).then(|| Witness {
            index: stage,
            x: limit.stages[stage].eps,
            values: vec![worst],
        }),
        margin,
        refinement_ratio: None,
        details: format!("{} stages, largest decrease {worst:e}", limit.stages.len()),
    }
}

fn exponent(settings: &Settings) -> Result<Computed> {
    if matches!(settings.rhs, Rhs::Singular(_)) {
        singular(settings)
    } else {
        solve(settings)
    }
}

fn barrier(settings: &Settings) -> Result<Computed> {
    let mut c = Computed::new();
    let setup = settings.barrier.ok_or_else(|| Error::config("barrier.alpha", "missing"))?;
    let grid = &settings.grid;
    let params = &settings.params;
    let mut reports: Vec<BarrierCheckReport> = vec![verify_barrier_super(grid, &setup.spec, params, setup.band)?];
    match verify_barrier_q_bounded(grid, params, setup.band, None, setup.spec.kappa, setup.spec.rho) {
        Ok(r) => reports.push(r),
        Err(e) => c.notes.push(format!("q-boundedness check skipped: {e}")),
    }
    c.verdicts.extend(reports.iter().map(|r| r.verdict()));
    c.tables.push(artifacts::barrier_table(&reports));
    Ok(c)
}

/// Middle half of `Ω`.
fn middle(grid: &Grid) -> Interval {
    let l = grid.b() - grid.a();
    Interval::new(grid.a() + 0.25 * l, grid.b() - 0.25 * l)
}

fn tent(grid: &Arc<Grid>, region: Interval) -> GridFunction {
    let (m, r) = (region.midpoint(), 0.5 * region.len());
    GridFunction::from_interior_fn(grid.clone(), |x| (1.0 - (x - m).abs() / r).max(0.0))
}

fn random_levels(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> [f64; 4] {
    [0; 4].map(|_| rng.gen_range(lo..hi))
}

fn piecewise(grid: &Arc<Grid>, levels: &[f64; 4]) -> GridFunction {
    let (a, l) = (grid.a(), grid.b() - grid.a());
    GridFunction::from_interior_fn(grid.clone(), |x| {
        let k = ((x - a) / l * 4.0).floor().clamp(0.0, 3.0) as usize;
        levels[k]
    })
}

fn principles(settings: &Settings) -> Result<Computed> {
    let mut c = Computed::new();
    let grid = &settings.grid;
    let params = &settings.params;
    let opts = &settings.solver;
    let ps = settings.principles;
    let tol = ps.tol;
    let zero = GridFunction::zeros(grid.clone());
    let mut solver = DirichletSolver::with_exterior(zero.clone(), *params)?;

    let f = source(settings, grid);
    let (u, report) = timed(|| solver.solve(&f, None, opts))?;
    non_convergence(&mut c, "base solve", &report);
    let nonneg = grid.interior().all(|i| f.value(i) >= 0.0);
    if nonneg {
        c.verdicts.push(verify_strong_max(&u, tol));
    } else {
        c.verdicts.push(not_applicable(STRONG_MAX, "the source changes sign"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut worst: Option<PrincipleVerdict> = None;
    for _ in 0..ps.pairs {
        let base = random_levels(&mut rng, -1.0, 1.0);
        let lift = random_levels(&mut rng, 0.0, 1.0);
        let upper = [0, 1, 2, 3].map(|k| base[k] + lift[k]);
        let (f1, f2) = (piecewise(grid, &base), piecewise(grid, &upper));
        let (u1, r1) = timed(|| solver.solve(&f1, None, opts))?;
        let (u2, r2) = timed(|| solver.solve(&f2, None, opts))?;
        non_convergence(&mut c, "comparison solve", &r1);
        non_convergence(&mut c, "comparison solve", &r2);
        let v = verify_weak_comparison(&u1, &u2, &f1, &f2, tol)?;
        let replace = match &worst {
            None => true,
            Some(w) => (v.outcome == Outcome::Fail && w.outcome != Outcome::Fail) || (v.outcome == w.outcome && v.margin < w.margin),
        };
        if replace {
            worst = Some(v);
        }
    }
    if let Some(mut w) = worst {
        w.details = format!("worst of {} seeded pairs: {}", ps.pairs, w.details);
        c.verdicts.push(w);
    }

    let lifted = GridFunction::from_interior_fn(grid.clone(), |x| settings.rhs.at(x) + 1.0);
    let (upper, r) = timed(|| solver.solve(&lifted, None, opts))?;
    non_convergence(&mut c, "comparison solve", &r);
    let f_sup = grid.interior().map(|i| lifted.value(i).abs()).fold(0.0, f64::max);
    let k_bound = ps.k_bound.unwrap_or(10.0 * (1.0 + f_sup));
    c.verdicts.push(verify_strong_comparison(&upper, &u, params, k_bound, ps.k1, tol)?);

    let region = middle(grid);
    let fine_grid = Arc::new(grid.refined()?);
    let f_fine = source(settings, &fine_grid);
    let (u_fine, r) = solve_on(settings, &fine_grid, &f_fine)?;
    non_convergence(&mut c, "fine solve", &r);
    let level = 0.8 * u.interior_sup();
    let (psi, psi_fine) = (tent(grid, region), tent(&fine_grid, region));
    for (truncation, tag) in [(Truncation::Plus, "+"), (Truncation::Minus, "-")] {
        let coarse = CaccioppoliInput { u: &u, level, cutoff: &psi, region, source: &f, truncation };
        let fine = CaccioppoliInput { u: &u_fine, level, cutoff: &psi_fine, region, source: &f_fine, truncation };
        let mut v = verify_caccioppoli(&coarse, &fine, params)?;
        v.name = format!("{CACCIOPPOLI} ({tag})");
        c.verdicts.push(v);
    }

    c.verdicts.push(singular_scp(settings)?);
    c.tables.push(artifacts::solution_table(&u));
    c.solution = Some(u);
    Ok(c)
}

fn not_applicable(name: &str, why: &str) -> PrincipleVerdict {
    PrincipleVerdict {
        name: name.into(),
        outcome: Outcome::NotApplicable,
        witness: None,
        margin: 0.0,
        refinement_ratio: None,
        details: why.into(),
    }
}

fn singular_scp(settings: &Settings) -> Result<PrincipleVerdict> {
    let params = &settings.params;
    if !(params.p > 2.0 && params.q > 2.0) {
        return Ok(not_applicable(
            SINGULAR_SCP,
            &format!("requires p, q > 2 (p = {}, q = {})", params.p, params.q),
        ));
    }
    let grid = &settings.grid;
    let sp = settings
        .singular
        .as_ref()
        .map(|s| s.params)
        .unwrap_or_else(|| SingularParams::new(0.0, 0.5, WeightKind::PureDistance));
    let v = singular_limit(settings, grid, 0.5, &sp)?;
    let w = singular_limit(settings, grid, 0.0, &sp)?;
    let g = background(settings, grid, 0.0).unwrap_or_else(|| GridFunction::zeros(grid.clone()));
    let pair = fracpq_core::SingularPair {
        v: &v.solution,
        w: &w.solution,
        g: &g,
        delta: sp.delta,
    };
    let band = 0.2 * (grid.b() - grid.a());
    Ok(verify_singular_scp(&pair, params, middle(grid), band, 1e-6, settings.principles.tol)?)
}
