use std::sync::Arc;

use fracpq_core::*;

#[test]
fn regular_exponent_within_estimator_band() {
    let params = OperatorParams::new(2.0, 2.0, 0.75, 0.35).unwrap();
    let grid = Arc::new(Grid::new(0.0, 0.1, 2048, 0.1).unwrap());
    let (u, report) = solve_constant_rhs(&grid, 1.0, &params, &SolverOptions::default()).unwrap();
    assert!(report.converged);
    let fit = fit_boundary_exponent(&u, FitWindow::default_for(&grid), FitSide::Both).unwrap();
    assert!((fit.exponent - params.s1).abs() <= 0.07, "{fit:?}");
    assert!(fit.r_squared > 0.99, "{fit:?}");
}
