use std::sync::Arc;

use fracpq_core::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn grid(n: usize) -> Arc<Grid> {
    Arc::new(Grid::new(-1.0, 1.0, n, 2.0).unwrap())
}

fn params() -> OperatorParams {
    OperatorParams::new(2.0, 2.0, 0.6, 0.3).unwrap()
}

fn seeded(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(20_251),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Piecewise-constant source from four levels on quarters of Ω.
fn source(g: &Arc<Grid>, levels: &[f64]) -> GridFunction {
    let n = levels.len() as f64;
    GridFunction::from_interior_fn(g.clone(), |x| {
        let k = (((x + 1.0) / 2.0) * n).floor().clamp(0.0, n - 1.0) as usize;
        levels[k]
    })
}

proptest! {
    #![proptest_config(seeded(20))]

    #[test]
    fn weak_comparison_on_random_ordered_sources(
        base in prop::collection::vec(-1.0f64..1.0, 4),
        lift in prop::collection::vec(0.0f64..1.0, 4),
    ) {
        let g = grid(64);
        let upper: Vec<f64> = base.iter().zip(&lift).map(|(a, b)| a + b).collect();
        let (f1, f2) = (source(&g, &base), source(&g, &upper));
        let opts = SolverOptions::with_tol(1e-10);
        let zero = GridFunction::zeros(g.clone());
        let (u1, _) = solve_dirichlet(&f1, &zero, &params(), &opts).unwrap();
        let (u2, _) = solve_dirichlet(&f2, &zero, &params(), &opts).unwrap();
        let v = verify_weak_comparison(&u1, &u2, &f1, &f2, 1e-10).unwrap();
        prop_assert!(v.passed(), "{:?}", v);
    }

    #[test]
    fn nonnegative_sources_give_positive_solutions(levels in prop::collection::vec(0.0f64..2.0, 4)) {
        prop_assume!(levels.iter().any(|&v| v > 1e-3));
        let g = grid(64);
        let f = source(&g, &levels);
        let zero = GridFunction::zeros(g.clone());
        let (u, _) = solve_dirichlet(&f, &zero, &params(), &SolverOptions::with_tol(1e-10)).unwrap();
        let v = verify_strong_max(&u, 1e-12);
        prop_assert!(v.passed() && u.interior_min() > 0.0, "{:?}", v);
    }

    #[test]
    fn failure_witness_reevaluates(node in 0usize..64, frac in 0.0f64..0.5) {
        let g = grid(64);
        let (mut u, _) = solve_constant_rhs(&g, 1.0, &params(), &SolverOptions::default()).unwrap();
        let i = g.interior().start + node;
        u.values_mut()[i] = -frac;
        let v = verify_strong_max(&u, 1e-8);
        prop_assert_eq!(v.outcome, Outcome::Fail);
        let w = v.witness.expect("failures carry a witness");
        prop_assert_eq!(w.index, i);
        prop_assert_eq!(w.values[0], u.value(w.index));
        prop_assert_eq!(w.x, g.x(i));
    }
}

#[test]
fn verdicts_are_deterministic() {
    let g = grid(128);
    let p = OperatorParams::new(2.0, 2.0, 0.75, 0.35).unwrap();
    let run = || {
        let (u, _) = solve_constant_rhs(&g, 2.0, &p, &SolverOptions::default()).unwrap();
        let (v, _) = solve_constant_rhs(&g, 1.0, &p, &SolverOptions::default()).unwrap();
        verify_strong_comparison(&u, &v, &p, 10.0, 1e3, 1e-8).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn strong_comparison_counterexample_fails() {
    let g = grid(128);
    let p = OperatorParams::new(2.0, 2.0, 0.75, 0.35).unwrap();
    let (u, _) = solve_constant_rhs(&g, 2.0, &p, &SolverOptions::default()).unwrap();
    // Touching from below at one node: not a solution pair, and not strictly ordered.
    let mut v = u.scaled(0.5);
    let i = g.interior().start + 40;
    v.values_mut()[i] = u.value(i);
    let verdict = verify_strong_comparison(&u, &v, &p, 1e6, 1e6, 1e-8).unwrap();
    assert_ne!(verdict.outcome, Outcome::Pass);
    if verdict.outcome == Outcome::Fail {
        assert_eq!(verdict.witness.unwrap().index, i);
    }
}

#[test]
fn singular_solution_dominates_its_floor() {
    let g = grid(64);
    let sp = SingularParams::new(0.0, 0.5, WeightKind::PureDistance);
    for eps in [1.0, 0.1] {
        let run = solve_singular_eps(&g, &sp, eps, &params(), &SolverOptions::default()).unwrap();
        assert!(run.theta > 0.0);
        for i in g.interior() {
            assert!(run.solution.value(i) >= run.floor.value(i));
        }
        assert!(run.floor.interior_min() > 0.0);
    }
}

#[test]
fn singular_scp_on_ordered_backgrounds() {
    let g = grid(128);
    let p = OperatorParams::new(3.0, 3.0, 0.5, 0.4).unwrap();
    let sp = SingularParams::new(0.0, 0.5, WeightKind::PureDistance);
    let sched = geometric_schedule(1.0, 0.5, 1e-3).unwrap();
    let opts = SolverOptions::with_tol(1e-10);
    let zero = GridFunction::zeros(g.clone());
    let lift = GridFunction::from_interior_fn(g.clone(), |_| 0.5);
    let mut s = DirichletSolver::new(g.clone(), p).unwrap();
    let v = solver::singular_limit_with(&mut s, &sp, &sched, Some(&lift), &opts).unwrap();
    let w = solver::singular_limit_with(&mut s, &sp, &sched, Some(&zero), &opts).unwrap();
    let pair = SingularPair { v: &v.solution, w: &w.solution, g: &zero, delta: 0.5 };
    let verdict = verify_singular_scp(&pair, &p, Interval::new(-0.5, 0.5), 0.4, 1e-6, 1e-8).unwrap();
    assert!(verdict.passed(), "{verdict:?}");
    // Swapped roles: v below w on K.
    let swapped = SingularPair { v: &w.solution, w: &v.solution, g: &zero, delta: 0.5 };
    let verdict = verify_singular_scp(&swapped, &p, Interval::new(-0.5, 0.5), 0.4, 1e-6, 1e-8).unwrap();
    assert_ne!(verdict.outcome, Outcome::Pass);
}
