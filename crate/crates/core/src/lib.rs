//! Discrete fractional (p,q)-Laplacian on bounded intervals.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerical
//! kernels: mesh and barrier geometry, singular-kernel quadrature for
//! `(-Δ)_p^{s1} + (-Δ)_q^{s2}`, convex energy minimization for the Dirichlet,
//! constant-source and ε-regularized singular problems, regularity
//! estimators, and executable checks of comparison/maximum principles.
//! File formats, configuration and the command line live in the `fracpq`
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod estimators;
pub mod geometry;
pub mod linalg;
mod math;
pub mod operators;
pub mod solver;
pub mod verifiers;

pub use error::{Error, Result};
pub use estimators::{
    fit_boundary_exponent, holder_quotient, hopf_quotient, second_diff_quotient, ExponentFit,
    FitSide, FitWindow, HolderEstimate,
};
pub use geometry::{barrier_function, BarrierSpec, ExteriorRule, Grid, GridFunction, Interval};
pub use operators::{
    eval_pointwise, farfield_weight, near_field_factor, gagliardo_seminorm, residual, tail, weak_form, Kernel,
    OperatorParams, TailSpec, WeakResidual,
};
pub use solver::{
    energy, geometric_schedule, regularized_weight, solve_constant_rhs, solve_dirichlet,
    solve_singular_eps, solve_singular_limit, solve_singular_with, DirichletSolver,
    RegularizedWeight, SingularLimit, SingularParams, SingularSolve, SingularStage, SolveReport,
    SolverOptions, WeightKind,
};
pub use verifiers::{
    caccioppoli_terms, verify_barrier_q_bounded, verify_barrier_super, verify_caccioppoli,
    verify_singular_scp, verify_strong_comparison, verify_strong_max, verify_weak_comparison,
    BarrierCheck, BarrierCheckReport, CaccioppoliInput, CaccioppoliTerms, Outcome,
    PrincipleVerdict, SingularPair, Truncation, Witness,
};
