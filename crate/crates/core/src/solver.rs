//! Energy minimization for the Dirichlet problem and the ε-regularized
//! singular problem.
//!
//! The discrete energy is
//! `E(u) = (1/p) A_p(u,u) + (1/q) A_q(u,u) - h Σ f_i u_i`, whose gradient with
//! respect to the interior values is exactly the collocation residual
//! `h (eval_p + eval_q - f)`. It is minimized by damped Newton steps with an
//! Armijo backtracking line search, so every accepted step lowers the energy.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{ExteriorRule, Grid, GridFunction};
use crate::linalg::{Cholesky, DenseMatrix};
use crate::math::{abs, abs_pow, powf};
use crate::operators::{residual_with, Kernel, OperatorParams};

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Residual tolerance; `None` means `1e-8 (1 + sup|f|)`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub outer_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: None,
            max_iter: 200,
            outer_max_iter: 200,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol: Some(tol),
            ..Default::default()
        }
    }

    fn residual_tol(&self, f_sup: f64) -> f64 {
        self.tol.unwrap_or(1e-8 * (1.0 + f_sup))
    }

    fn outer_tol(&self) -> f64 {
        self.tol.unwrap_or(1e-8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_energy: f64,
    pub residual_sup: f64,
    pub converged: bool,
    /// Wall-clock seconds; filled in by callers that own a clock.
    pub wall_time: f64,
    /// Tolerance the residual was held to.
    pub tolerance: f64,
    /// Energy after each accepted step, starting with the initial guess.
    pub energy_history: Vec<f64>,
}

fn check_options(options: &SolverOptions) -> Result<()> {
    if let Some(t) = options.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::param("solver.tol", format!("need tol > 0, got {t}")));
        }
    }
    if options.max_iter == 0 {
        return Err(Error::param("solver.max_iter", "need at least one iteration"));
    }
    Ok(())
}

fn interior_sup(grid: &Grid, values: &[f64]) -> f64 {
    grid.interior().map(|i| abs(values[i])).fold(0.0, f64::max)
}

/// Discrete energy of `u` (up to the constant from exterior-exterior pairs).
pub fn energy(u: &GridFunction, f: &GridFunction, params: &OperatorParams) -> Result<f64> {
    u.check_same_grid(f)?;
    let kp = Kernel::new(u.grid(), params.p, params.s1)?;
    let kq = Kernel::new(u.grid(), params.q, params.s2)?;
    Ok(energy_with(u, f.values(), &kp, &kq))
}

fn energy_with(u: &GridFunction, f: &[f64], kp: &Kernel, kq: &Kernel) -> f64 {
    let grid = u.grid();
    let g = u.exterior().datum();
    let values = u.values();
    let mut source = 0.0;
    for i in grid.interior() {
        source += f[i] * values[i];
    }
    kp.interior_energy(grid, values, g) + kq.interior_energy(grid, values, g)
        - grid.spacing() * source
}

/// Reusable solver for `(-Δ)_p^{s1} u + (-Δ)_q^{s2} u = f` in `Ω`, `u = g`
/// outside, on a fixed grid. For `p = q = 2` the Hessian factorization is
/// computed once and shared by every solve.
#[derive(Debug, Clone)]
pub struct DirichletSolver {
    grid: Arc<Grid>,
    params: OperatorParams,
    kp: Kernel,
    kq: Kernel,
    exterior: GridFunction,
    linear_factor: Option<Cholesky>,
}

impl DirichletSolver {
    /// Homogeneous exterior datum `g = 0`.
    pub fn new(grid: Arc<Grid>, params: OperatorParams) -> Result<Self> {
        let exterior = GridFunction::zeros(grid.clone());
        Self::with_exterior(exterior, params)
    }

    /// Exterior datum taken from the non-interior nodes of `g` and its far-field
    /// rule; interior values of `g` are ignored.
    pub fn with_exterior(g: GridFunction, params: OperatorParams) -> Result<Self> {
        let grid = g.grid_arc().clone();
        let kp = Kernel::new(&grid, params.p, params.s1)?;
        let kq = Kernel::new(&grid, params.q, params.s2)?;
        let mut exterior = g;
        let interior = grid.interior();
        for i in interior {
            exterior.values_mut()[i] = 0.0;
        }
        Ok(DirichletSolver {
            grid,
            params,
            kp,
            kq,
            exterior,
            linear_factor: None,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    fn with_interior(&self, interior: &[f64]) -> GridFunction {
        let mut u = self.exterior.clone();
        let start = self.grid.interior().start;
        u.values_mut()[start..start + interior.len()].copy_from_slice(interior);
        u
    }

    fn hessian(&self, u: &GridFunction) -> DenseMatrix {
        let grid = &self.grid;
        let interior = grid.interior();
        let start = interior.start;
        let n = grid.n();
        let h = grid.spacing();
        let g = u.exterior().datum();
        let values = u.values();
        let mut hess = DenseMatrix::zeros(n);
        for kernel in [&self.kp, &self.kq] {
            let l = kernel.l();
            let e = l - 2.0;
            let c = 2.0 * h * (l - 1.0);
            for a in 0..n {
                let i = start + a;
                let (row, far) = if e < 0.0 {
                    curvature_row_clamped(kernel, values, g, i)
                } else {
                    kernel.curvature_row(values, g, i)
                };
                hess.add(a, a, c * (row + far));
                for b in 0..a {
                    let j = start + b;
                    let t = clamp_small(values[i] - values[j], e);
                    let v = -c * abs_pow(t, e) * kernel.offset_weight(a - b);
                    hess.add(a, b, v);
                    hess.add(b, a, v);
                }
            }
        }
        hess
    }

    fn linear_factor(&mut self) -> Result<&Cholesky> {
        if self.linear_factor.is_none() {
            let u = self.exterior.clone();
            let hess = self.hessian(&u);
            self.linear_factor = Some(Cholesky::factor(&hess, 0.0)?);
        }
        Ok(self.linear_factor.as_ref().expect("factor computed above"))
    }

    /// Minimizes the energy for source `f`, starting from `initial` (interior
    /// values only are used) or from zero.
    pub fn solve(
        &mut self,
        f: &GridFunction,
        initial: Option<&GridFunction>,
        options: &SolverOptions,
    ) -> Result<(GridFunction, SolveReport)> {
        check_options(options)?;
        if !f.same_grid(&self.exterior) {
            return Err(Error::GridMismatch);
        }
        let start = self.grid.interior().start;
        let n = self.grid.n();
        let mut x: Vec<f64> = match initial {
            Some(u0) => {
                if !u0.same_grid(&self.exterior) {
                    return Err(Error::GridMismatch);
                }
                u0.values()[start..start + n].to_vec()
            }
            None => vec![0.0; n],
        };
        let fv = f.values();
        let tol = options.residual_tol(interior_sup(&self.grid, fv));
        let mut u = self.with_interior(&x);
        let mut e = energy_with(&u, fv, &self.kp, &self.kq);
        let mut history = vec![e];
        let mut lambda = 0.0f64;
        let mut iterations = 0;
        let mut res = residual_with(&u, fv, &self.kp, &self.kq);
        let mut converged = res.sup_norm <= tol;
        while !converged && iterations < options.max_iter {
            iterations += 1;
            let step = self.newton_direction(&u, &res.values, &mut lambda)?;
            let slope: f64 = step.iter().zip(&res.values).map(|(d, r)| d * r).sum();
            let mut accepted = None;
            if slope < 0.0 {
                let mut t = 1.0;
                for halving in 0..MAX_HALVINGS {
                    let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, di)| xi + t * di).collect();
                    let ut = self.with_interior(&trial);
                    let et = energy_with(&ut, fv, &self.kp, &self.kq);
                    let sufficient = et <= e + ARMIJO * t * slope;
                    // Near the minimizer the energy decrease drops below rounding;
                    // the full step is then judged by the residual instead.
                    let rounding = halving == 0
                        && !sufficient
                        && et - e <= 1e-12 * (abs(e) + abs(slope))
                        && residual_with(&ut, fv, &self.kp, &self.kq).sup_norm < res.sup_norm;
                    if sufficient || rounding {
                        accepted = Some((trial, ut, et, t));
                        break;
                    }
                    t *= 0.5;
                }
            }
            match accepted {
                Some((trial, ut, et, t)) => {
                    x = trial;
                    u = ut;
                    e = et;
                    history.push(e);
                    if t == 1.0 {
                        lambda *= 0.1;
                    } else if t < 0.25 {
                        lambda = (lambda * 10.0).max(1e-10);
                    }
                    res = residual_with(&u, fv, &self.kp, &self.kq);
                    converged = res.sup_norm <= tol;
                }
                None => {
                    if self.params.is_linear() || lambda > 1e8 {
                        break;
                    }
                    lambda = (lambda * 100.0).max(1e-8);
                }
            }
        }
        let report = SolveReport {
            iterations,
            final_energy: e,
            residual_sup: res.sup_norm,
            converged,
            wall_time: 0.0,
            tolerance: tol,
            energy_history: history,
        };
        Ok((u, report))
    }

    fn newton_direction(&mut self, u: &GridFunction, grad: &[f64], lambda: &mut f64) -> Result<Vec<f64>> {
        if self.params.is_linear() {
            let factor = self.linear_factor()?;
            return Ok(factor.solve(grad).into_iter().map(|v| -v).collect());
        }
        let hess = self.hessian(u);
        let n = hess.dim();
        let max_diag = (0..n).map(|i| hess.get(i, i)).fold(0.0, f64::max);
        // Scale of the Hessian for unit jumps, used when it degenerates at flat data.
        let floor = 2.0 * self.grid.spacing() * self.kp.offset_weight(1) * 1e-6;
        let scale = max_diag.max(floor);
        for _ in 0..40 {
            let shift = *lambda * scale;
            match Cholesky::factor(&hess, shift) {
                Ok(factor) => return Ok(factor.solve(grad).into_iter().map(|v| -v).collect()),
                Err(_) => *lambda = (*lambda * 10.0).max(1e-12),
            }
        }
        Err(Error::NotPositiveDefinite(0))
    }
}

#[inline]
fn clamp_small(t: f64, e: f64) -> f64 {
    if e < 0.0 && abs(t) < 1e-12 {
        1e-12
    } else {
        t
    }
}

fn curvature_row_clamped(kernel: &Kernel, values: &[f64], g: f64, i: usize) -> (f64, f64) {
    let m = values.len();
    let e = kernel.l() - 2.0;
    let ui = values[i];
    let mut acc = 0.0;
    for k in 1..m {
        if k <= i {
            acc += abs_pow(clamp_small(ui - values[i - k], e), e) * kernel.offset_weight(k);
        }
        if i + k < m {
            acc += abs_pow(clamp_small(ui - values[i + k], e), e) * kernel.offset_weight(k);
        }
    }
    (acc, abs_pow(clamp_small(ui - g, e), e) * kernel.farfield(i))
}

/// Solves the Dirichlet problem with source `f` and exterior datum `g` from a zero initial guess.
pub fn solve_dirichlet(
    f: &GridFunction,
    g: &GridFunction,
    params: &OperatorParams,
    options: &SolverOptions,
) -> Result<(GridFunction, SolveReport)> {
    let mut solver = DirichletSolver::with_exterior(g.clone(), *params)?;
    solver.solve(f, None, options)
}

/// `w_θ`: the solution with constant source `θ ≥ 0` and zero exterior datum.
pub fn solve_constant_rhs(
    grid: &Arc<Grid>,
    theta: f64,
    params: &OperatorParams,
    options: &SolverOptions,
) -> Result<(GridFunction, SolveReport)> {
    let mut solver = DirichletSolver::new(grid.clone(), *params)?;
    constant_rhs_with(&mut solver, theta, options)
}

fn constant_rhs_with(
    solver: &mut DirichletSolver,
    theta: f64,
    options: &SolverOptions,
) -> Result<(GridFunction, SolveReport)> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::param("theta", format!("need θ ≥ 0, got {theta}")));
    }
    let f = GridFunction::from_interior_fn(solver.grid.clone(), |_| theta);
    solver.solve(&f, None, options)
}

/// Shape of the singular weight `K_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `K_γ = d^{-γ}`.
    PureDistance,
    /// `K_γ = c d^{-γ}`; `c = 0` gives the degenerate weight `K ≡ 0`.
    Scaled(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularParams {
    pub gamma: f64,
    pub delta: f64,
    pub weight: WeightKind,
}

impl SingularParams {
    pub fn new(gamma: f64, delta: f64, weight: WeightKind) -> Self {
        SingularParams {
            gamma,
            delta,
            weight,
        }
    }

    pub fn validate(&self, params: &OperatorParams) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma < params.p * params.s1) {
            return Err(Error::param(
                "singular.gamma",
                format!("need 0 ≤ γ < p s1 = {}, got {}", params.p * params.s1, self.gamma),
            ));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::param("singular.delta", format!("need δ > 0, got {}", self.delta)));
        }
        if let WeightKind::Scaled(c) = self.weight {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::param("singular.weight", format!("need c ≥ 0, got {c}")));
            }
        }
        Ok(())
    }

    /// Bounds `(C1, C2)` with `C1 d^{-γ} ≤ K_γ ≤ C2 d^{-γ}`.
    pub fn bounds(&self) -> (f64, f64) {
        match self.weight {
            WeightKind::PureDistance => (1.0, 1.0),
            WeightKind::Scaled(c) => (c, c),
        }
    }

    /// `α_{γ,δ} = (p s1 - γ)/(p - 1 + δ)`.
    pub fn alpha_gd(&self, params: &OperatorParams) -> f64 {
        (params.p * params.s1 - self.gamma) / (params.p - 1.0 + self.delta)
    }

    /// Is `γ - s1 (1 - δ) > 0` (the strongly singular regime)?
    pub fn strongly_singular(&self, params: &OperatorParams) -> bool {
        self.gamma - params.s1 * (1.0 - self.delta) > 0.0
    }

    /// Boundary exponent predicted for the minimal solution when it is a
    /// single number: `α_{γ,δ}` in the strongly singular case away from the
    /// resonance `γ = p s1 - q' s2 (p - 1 + δ)`, `s1` (as the supremum of the
    /// admissible exponents) in the mild case, `None` at resonance.
    pub fn predicted_exponent(&self, params: &OperatorParams) -> Option<f64> {
        if self.strongly_singular(params) {
            let resonance = params.p * params.s1 - params.q_prime_s2() * (params.p - 1.0 + self.delta);
            if abs(self.gamma - resonance) < 1e-12 {
                None
            } else {
                Some(self.alpha_gd(params))
            }
        } else {
            Some(params.s1)
        }
    }

    fn base_weight(&self, d: f64) -> f64 {
        let c = match self.weight {
            WeightKind::PureDistance => 1.0,
            WeightKind::Scaled(c) => c,
        };
        if c == 0.0 || d <= 0.0 {
            0.0
        } else if self.gamma == 0.0 {
            c
        } else {
            c * powf(d, -self.gamma)
        }
    }
}

/// Nodal values of `K_{γ,ε} = (K_γ^{-1/γ} + ε^{1/α_{γ,δ}})^{-γ}` (zero off `Ω`).
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedWeight {
    pub base: SingularParams,
    pub eps: f64,
    pub alpha_gd: f64,
    pub values: Vec<f64>,
}

impl RegularizedWeight {
    pub fn interior_inf(&self, grid: &Grid) -> f64 {
        grid.interior().map(|i| self.values[i]).fold(f64::INFINITY, f64::min)
    }
}

/// Builds `K_{γ,ε}` on the grid. For `γ = 0` the weight is returned unchanged.
pub fn regularized_weight(
    grid: &Grid,
    sp: &SingularParams,
    eps: f64,
    params: &OperatorParams,
) -> Result<RegularizedWeight> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("singular.eps", format!("need ε > 0, got {eps}")));
    }
    sp.validate(params)?;
    let alpha_gd = sp.alpha_gd(params);
    let shift = powf(eps, 1.0 / alpha_gd);
    let mut values = vec![0.0; grid.len()];
    for i in grid.interior() {
        let k = sp.base_weight(grid.distance(grid.x(i)));
        values[i] = if k > 0.0 && sp.gamma > 0.0 {
            powf(powf(k, -1.0 / sp.gamma) + shift, -sp.gamma)
        } else {
            k
        };
    }
    Ok(RegularizedWeight {
        base: *sp,
        eps,
        alpha_gd,
        values,
    })
}

/// Outcome of one ε-regularized singular solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSolve {
    pub solution: GridFunction,
    pub report: SolveReport,
    /// Starting subsolution `w_θ` and its `θ`.
    pub floor: GridFunction,
    pub theta: f64,
    pub outer_iterations: usize,
    /// `sup |T(u^k) - u^k|` at the last outer iteration.
    pub outer_change: f64,
    /// Relaxation factor of the outer fixed point.
    pub relaxation: f64,
}

/// Frozen-source data for one regularized problem.
struct SingularSource<'a> {
    weight: &'a RegularizedWeight,
    background: Option<&'a GridFunction>,
    delta: f64,
}

impl SingularSource<'_> {
    fn fill(&self, grid: &Grid, u: &GridFunction, out: &mut GridFunction) {
        let eps = self.weight.eps;
        let values = out.values_mut();
        for i in grid.interior() {
            let ui = u.value(i).max(0.0);
            let mut f = self.weight.values[i];
            if f != 0.0 {
                f *= powf(ui + eps, -self.delta);
            }
            if let Some(g) = self.background {
                f += g.value(i);
            }
            values[i] = f;
        }
    }
}

/// Default `θ` of the starting subsolution.
fn default_theta(weight: &RegularizedWeight, grid: &Grid, delta: f64) -> f64 {
    let inf = weight.interior_inf(grid);
    if !(inf > 0.0) {
        return 0.0;
    }
    1e-3 * (1.0 + (inf * powf(weight.eps, -delta)).min(1.0))
}

/// Solves `(-Δ)_p^{s1} v + (-Δ)_q^{s2} v = K_{γ,ε} (v + ε)^{-δ}`, `v = 0` outside.
pub fn solve_singular_eps(
    grid: &Arc<Grid>,
    sp: &SingularParams,
    eps: f64,
    params: &OperatorParams,
    options: &SolverOptions,
) -> Result<SingularSolve> {
    let mut solver = DirichletSolver::new(grid.clone(), *params)?;
    solve_singular_with(&mut solver, sp, eps, None, None, options)
}

/// As [`solve_singular_eps`] with an optional nonnegative background source
/// `g` added to the singular term and an optional starting guess (which must
/// be a subsolution for the monotone floor to hold).
pub fn solve_singular_with(
    solver: &mut DirichletSolver,
    sp: &SingularParams,
    eps: f64,
    background: Option<&GridFunction>,
    start: Option<&GridFunction>,
    options: &SolverOptions,
) -> Result<SingularSolve> {
    check_options(options)?;
    let params = *solver.params();
    let grid = solver.grid().clone();
    let weight = regularized_weight(&grid, sp, eps, &params)?;
    if let Some(g) = background {
        if !g.same_grid(&GridFunction::zeros(grid.clone())) {
            return Err(Error::GridMismatch);
        }
        if grid.interior().any(|i| g.value(i) < 0.0) {
            return Err(Error::param("background", "background source must be nonnegative"));
        }
    }
    let theta = default_theta(&weight, &grid, sp.delta);
    let (floor, _) = constant_rhs_with(solver, theta, options)?;
    let source = SingularSource {
        weight: &weight,
        background,
        delta: sp.delta,
    };
    // Relaxation that balances the linearized fixed-point spectrum [-δ/(q-1), 0].
    let lipschitz = sp.delta / (params.q - 1.0);
    let relaxation = 2.0 / (2.0 + lipschitz);
    let outer_tol = options.outer_tol();

    let mut u = start.cloned().unwrap_or_else(|| floor.clone());
    let mut f = GridFunction::zeros(grid.clone());
    let mut last: Option<(GridFunction, SolveReport)> = None;
    let mut outer_change = f64::INFINITY;
    let mut outer_iterations = 0;
    let mut inner_ok = true;
    let mut iterations = 0;
    while outer_iterations < options.outer_max_iter {
        outer_iterations += 1;
        source.fill(&grid, &u, &mut f);
        let (next, report) = solver.solve(&f, Some(&u), options)?;
        iterations += report.iterations;
        inner_ok = report.converged;
        outer_change = grid
            .interior()
            .map(|i| abs(next.value(i) - u.value(i)))
            .fold(0.0, f64::max);
        let done = outer_change <= outer_tol || !inner_ok;
        if !done {
            let values = u.values_mut();
            for i in grid.interior() {
                values[i] += relaxation * (next.value(i) - values[i]);
            }
        }
        last = Some((next, report));
        if done {
            break;
        }
    }
    let (solution, mut report) = last.expect("at least one outer iteration");
    report.iterations = iterations;
    report.converged = inner_ok && outer_change <= outer_tol;
    Ok(SingularSolve {
        solution,
        report,
        floor,
        theta,
        outer_iterations,
        outer_change,
        relaxation,
    })
}

/// One stage of the ε → 0 continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularStage {
    pub eps: f64,
    pub report: SolveReport,
    pub outer_iterations: usize,
    /// `sup |v_j - v_{j-1}|` (zero for the first stage).
    pub sup_difference: f64,
    /// `max (v_{j-1} - v_j)_+`, the violation of nodal monotonicity.
    pub monotonicity_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularLimit {
    pub solution: GridFunction,
    pub stages: Vec<SingularStage>,
    /// Every stage nondecreasing within `10 tol`.
    pub monotone: bool,
    pub converged: bool,
}

/// Geometric schedule `ε_j = ε0 f^j`, stopping at (and including) `ε_min`.
pub fn geometric_schedule(eps0: f64, factor: f64, eps_min: f64) -> Result<Vec<f64>> {
    if !(eps0 > 0.0 && eps_min > 0.0 && eps_min <= eps0) {
        return Err(Error::param("singular.eps0", "need 0 < eps_min ≤ eps0"));
    }
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::param("singular.eps_factor", "need 0 < factor < 1"));
    }
    let mut out = vec![eps0];
    let mut e = eps0;
    while e > eps_min * (1.0 + 1e-12) {
        e = (e * factor).max(eps_min);
        out.push(e);
    }
    Ok(out)
}

/// Runs the schedule, warm-starting each stage from the previous solution
/// (a subsolution for the smaller ε), and checks nodal monotonicity.
pub fn solve_singular_limit(
    grid: &Arc<Grid>,
    sp: &SingularParams,
    schedule: &[f64],
    params: &OperatorParams,
    options: &SolverOptions,
) -> Result<SingularLimit> {
    let mut solver = DirichletSolver::new(grid.clone(), *params)?;
    singular_limit_with(&mut solver, sp, schedule, None, options)
}

pub fn singular_limit_with(
    solver: &mut DirichletSolver,
    sp: &SingularParams,
    schedule: &[f64],
    background: Option<&GridFunction>,
    options: &SolverOptions,
) -> Result<SingularLimit> {
    if schedule.is_empty() {
        return Err(Error::param("singular.eps", "empty ε schedule"));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("singular.eps", "ε schedule must be strictly decreasing"));
    }
    let grid = solver.grid().clone();
    let mut stages = Vec::with_capacity(schedule.len());
    let mut previous: Option<GridFunction> = None;
    let mut monotone = true;
    let mut converged = true;
    for &eps in schedule {
        let run = solve_singular_with(solver, sp, eps, background, previous.as_ref(), options)?;
        let tol = options.outer_tol();
        let (sup_difference, violation) = match &previous {
            Some(prev) => grid.interior().fold((0.0f64, 0.0f64), |(d, v), i| {
                let diff = run.solution.value(i) - prev.value(i);
                (d.max(abs(diff)), v.max(-diff))
            }),
            None => (0.0, 0.0),
        };
        monotone &= violation <= 10.0 * tol;
        converged &= run.report.converged;
        stages.push(SingularStage {
            eps,
            report: run.report,
            outer_iterations: run.outer_iterations,
            sup_difference,
            monotonicity_violation: violation.max(0.0),
        });
        previous = Some(run.solution);
    }
    Ok(SingularLimit {
        solution: previous.expect("nonempty schedule"),
        stages,
        monotone,
        converged,
    })
}

/// Zero-exterior grid function with the given interior values.
pub fn interior_function(grid: &Arc<Grid>, interior: &[f64]) -> Result<GridFunction> {
    if interior.len() != grid.n() {
        return Err(Error::param("values", "interior value count mismatch"));
    }
    let mut values = vec![0.0; grid.len()];
    let start = grid.interior().start;
    values[start..start + interior.len()].copy_from_slice(interior);
    GridFunction::new(grid.clone(), values, ExteriorRule::ZeroBeyondHalo)
}
