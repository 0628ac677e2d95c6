//! Interval domains, the meshed box with exterior halo, distance functions
//! and the shifted distance-power barriers.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::math::{abs, ceil, powf};

/// Smallest accepted interior node count.
pub const MIN_INTERIOR_NODES: usize = 16;

/// Closed interval `[lo, hi]` used to select nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// The centred sub-interval with `fraction` of the length.
    pub fn scaled(&self, fraction: f64) -> Self {
        let c = self.midpoint();
        let r = 0.5 * fraction * self.len();
        Interval::new(c - r, c + r)
    }
}

/// Uniform mesh of the box `[a - Λ, b + Λ]` around `Ω = (a, b)`.
///
/// The spacing is `h = (b - a)/(n + 1)`, so both endpoints of `Ω` are nodes,
/// and the halo is rounded up to a whole number of spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    halo: f64,
    h: f64,
    halo_nodes: usize,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize, halo: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::param("domain", format!("need a < b, got a={a}, b={b}")));
        }
        if n < MIN_INTERIOR_NODES {
            return Err(Error::param(
                "grid.n",
                format!("need at least {MIN_INTERIOR_NODES} interior nodes, got {n}"),
            ));
        }
        if !(halo.is_finite() && halo >= b - a) {
            return Err(Error::param(
                "grid.halo",
                format!("halo must be at least b - a = {}, got {halo}", b - a),
            ));
        }
        let len = b - a;
        let h = len / (n + 1) as f64;
        // Tolerate halos that are a whole number of spacings up to rounding.
        let halo_nodes = ceil(halo / h - 1e-9) as usize;
        let total = n + 2 + 2 * halo_nodes;
        let mut nodes = Vec::with_capacity(total);
        for k in 0..total {
            let offset = k as f64 - halo_nodes as f64;
            nodes.push(a + len * offset / (n + 1) as f64);
        }
        nodes[halo_nodes] = a;
        nodes[halo_nodes + n + 1] = b;
        Ok(Grid {
            a,
            b,
            n,
            halo: halo_nodes as f64 * h,
            h,
            halo_nodes,
            nodes,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Interior node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Effective halo width (a multiple of the spacing).
    pub fn halo(&self) -> f64 {
        self.halo
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Indices of nodes strictly inside `Ω`.
    pub fn interior(&self) -> Range<usize> {
        self.halo_nodes + 1..self.halo_nodes + 1 + self.n
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.interior().contains(&i)
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.a, self.b)
    }

    /// The meshed box `[x_lo, x_hi]`.
    pub fn bounds(&self) -> Interval {
        Interval::new(self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn index_of_a(&self) -> usize {
        self.halo_nodes
    }

    pub fn index_of_b(&self) -> usize {
        self.halo_nodes + self.n + 1
    }

    /// `d(x) = dist(x, ℝ \ Ω)`.
    #[inline]
    pub fn distance(&self, x: f64) -> f64 {
        let d = (x - self.a).min(self.b - x);
        if d > 0.0 {
            d
        } else {
            0.0
        }
    }

    /// Distance of node `i`; exactly zero on non-interior nodes.
    #[inline]
    pub fn node_distance(&self, i: usize) -> f64 {
        if self.is_interior(i) {
            self.distance(self.nodes[i])
        } else {
            0.0
        }
    }

    /// Signed distance extended by `-dist(x, ∂Ω)` on the exterior band of
    /// width `rho` and by the constant `-rho` beyond it.
    pub fn extended_distance(&self, rho: f64, x: f64) -> f64 {
        if x > self.a && x < self.b {
            return self.distance(x);
        }
        let out = (self.a - x).max(x - self.b);
        if out < rho {
            -out
        } else {
            -rho
        }
    }

    /// Default exterior band `min(0.25 (b - a), halo / 2)`.
    pub fn default_band(&self) -> f64 {
        (0.25 * (self.b - self.a)).min(0.5 * self.halo)
    }

    /// Interior indices whose distance lies in `[lo, hi]`.
    pub fn nodes_with_distance(&self, lo: f64, hi: f64) -> impl Iterator<Item = usize> + '_ {
        self.interior().filter(move |&i| {
            let d = self.distance(self.nodes[i]);
            d >= lo && d <= hi
        })
    }

    /// Indices of nodes inside `region`.
    pub fn nodes_in(&self, region: Interval) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| region.contains(self.nodes[i]))
    }

    /// The same domain with twice as many cells.
    pub fn refined(&self) -> Result<Grid> {
        Grid::new(self.a, self.b, 2 * self.n + 1, self.halo)
    }

    /// Is `x` an integer multiple of the spacing (to relative 1e-9)?
    pub fn spacing_multiple(&self, x: f64) -> Option<usize> {
        let k = x / self.h;
        let r = crate::math::round(k);
        if r >= 1.0 && abs(k - r) <= 1e-9 * r.max(1.0) {
            Some(r as usize)
        } else {
            None
        }
    }
}

/// Values prescribed beyond the meshed box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExteriorRule {
    /// Zero beyond the halo; far-field integrals use the closed form with datum 0.
    ZeroBeyondHalo,
    /// A constant datum `g` beyond the halo (the halo itself carries nodal data).
    Prescribed(f64),
}

impl ExteriorRule {
    pub fn datum(&self) -> f64 {
        match self {
            ExteriorRule::ZeroBeyondHalo => 0.0,
            ExteriorRule::Prescribed(g) => *g,
        }
    }
}

/// Nodal values on a grid plus the rule for the far field.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    exterior: ExteriorRule,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, exterior: ExteriorRule) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(
                "values",
                format!("expected {} nodal values, got {}", grid.len(), values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if !exterior.datum().is_finite() {
            return Err(Error::param("exterior", "datum must be finite"));
        }
        Ok(GridFunction {
            grid,
            values,
            exterior,
        })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = alloc::vec![0.0; grid.len()];
        GridFunction {
            grid,
            values,
            exterior: ExteriorRule::ZeroBeyondHalo,
        }
    }

    /// `c` at every node and beyond the box.
    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let values = alloc::vec![c; grid.len()];
        let exterior = if c == 0.0 {
            ExteriorRule::ZeroBeyondHalo
        } else {
            ExteriorRule::Prescribed(c)
        };
        GridFunction {
            grid,
            values,
            exterior,
        }
    }

    /// Samples `f` at interior nodes and sets every other node to zero.
    pub fn from_interior_fn(grid: Arc<Grid>, mut f: impl FnMut(f64) -> f64) -> Self {
        let mut values = alloc::vec![0.0; grid.len()];
        for i in grid.interior() {
            values[i] = f(grid.x(i));
        }
        GridFunction {
            grid,
            values,
            exterior: ExteriorRule::ZeroBeyondHalo,
        }
    }

    /// Samples `f` at every node of the box.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64, exterior: ExteriorRule) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        GridFunction::new(grid, values, exterior)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn exterior(&self) -> ExteriorRule {
        self.exterior
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// A copy with every value multiplied by `t` (including the far field).
    pub fn scaled(&self, t: f64) -> GridFunction {
        let exterior = match self.exterior {
            ExteriorRule::ZeroBeyondHalo => ExteriorRule::ZeroBeyondHalo,
            ExteriorRule::Prescribed(g) => ExteriorRule::Prescribed(t * g),
        };
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| t * v).collect(),
            exterior,
        }
    }

    /// Maximum of `|u|` over interior nodes.
    pub fn interior_sup(&self) -> f64 {
        self.grid
            .interior()
            .map(|i| abs(self.values[i]))
            .fold(0.0, f64::max)
    }

    pub fn interior_min(&self) -> f64 {
        self.grid
            .interior()
            .map(|i| self.values[i])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Parameters of `w̄_ρ(x) = (d_e(x) + κ^{1/α})_+^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    pub alpha: f64,
    pub kappa: f64,
    pub rho: f64,
}

impl BarrierSpec {
    pub fn new(alpha: f64, kappa: f64, rho: f64) -> Self {
        BarrierSpec { alpha, kappa, rho }
    }

    /// Checks the barrier parameters against `grid`. `α = 1` is accepted so the barrier can
    /// reproduce `d_+` itself.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("barrier.alpha", format!("need 0 < α ≤ 1, got {}", self.alpha)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::param("barrier.kappa", format!("need κ ≥ 0, got {}", self.kappa)));
        }
        if !(self.rho > 0.0 && self.rho < 0.5 * (grid.b() - grid.a())) {
            return Err(Error::param(
                "barrier.rho",
                format!("need 0 < ρ < (b - a)/2, got {}", self.rho),
            ));
        }
        Ok(())
    }

    /// `κ^{1/α}`.
    pub fn shift(&self) -> f64 {
        if self.kappa == 0.0 {
            0.0
        } else {
            powf(self.kappa, 1.0 / self.alpha)
        }
    }

    /// Pointwise barrier value.
    pub fn value(&self, grid: &Grid, x: f64) -> f64 {
        let outside = (grid.a() - x).max(x - grid.b());
        if outside >= self.rho {
            return 0.0;
        }
        let t = grid.extended_distance(self.rho, x) + self.shift();
        if t > 0.0 {
            powf(t, self.alpha)
        } else {
            0.0
        }
    }
}

/// Nodal barrier `w̄_ρ` with zero far field.
pub fn barrier_function(grid: &Arc<Grid>, spec: &BarrierSpec) -> Result<GridFunction> {
    spec.validate(grid)?;
    let values = grid.nodes().iter().map(|&x| spec.value(grid, x)).collect();
    GridFunction::new(grid.clone(), values, ExteriorRule::ZeroBeyondHalo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize, halo: f64) -> Arc<Grid> {
        Arc::new(Grid::new(a, b, n, halo).unwrap())
    }

    #[test]
    fn build_grid_invariants() {
        let g = grid(-1.0, 1.0, 128, 2.0);
        let h = g.spacing();
        assert!((h - 2.0 / 129.0).abs() < 1e-15);
        let m = g.len();
        let span = g.bounds().len();
        assert!((span / (m - 1) as f64 - h).abs() <= 1e-12 * h);
        for w in g.nodes().windows(2) {
            assert!(((w[1] - w[0]) - h).abs() <= 1e-12);
        }
        for i in 0..m {
            let x = g.x(i);
            if g.is_interior(i) {
                assert!(x > -1.0 && x < 1.0);
            } else {
                assert!(x <= -1.0 || x >= 1.0);
            }
        }
        assert_eq!(g.interior().len(), 128);
        assert!(g.halo() >= 2.0);
        assert_eq!(g.x(g.index_of_a()), -1.0);
        assert_eq!(g.x(g.index_of_b()), 1.0);
    }

    #[test]
    fn minimal_grid_is_accepted() {
        let g = grid(0.0, 1.0, 16, 1.0);
        assert_eq!(g.interior().len(), 16);
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(Grid::new(1.0, -1.0, 128, 2.0).is_err());
        assert!(Grid::new(0.0, 1.0, 15, 1.0).is_err());
        assert!(Grid::new(0.0, 1.0, 32, 0.5).is_err());
    }

    #[test]
    fn distance_examples() {
        let g = grid(-1.0, 1.0, 64, 2.0);
        assert_eq!(g.distance(0.0), 1.0);
        assert!((g.distance(0.9) - 0.1).abs() < 1e-15);
        assert_eq!(g.distance(2.0), 0.0);
    }

    #[test]
    fn extended_distance_examples() {
        let g = grid(-1.0, 1.0, 64, 2.0);
        assert_eq!(g.extended_distance(0.5, 0.5), 0.5);
        assert!((g.extended_distance(0.5, 1.2) + 0.2).abs() < 1e-15);
        assert_eq!(g.extended_distance(0.5, 3.0), -0.5);
    }

    #[test]
    fn barrier_examples() {
        let g = grid(-1.0, 1.0, 64, 2.0);
        let s = BarrierSpec::new(0.5, 0.0, 0.5);
        assert!((s.value(&g, -0.75) - 0.5).abs() < 1e-15);
        assert_eq!(s.value(&g, 1.7), 0.0);
        let s = BarrierSpec::new(0.5, 0.04, 0.5);
        let expected = libm::sqrt(0.5 + 0.0016);
        assert!((s.value(&g, 0.5) - expected).abs() < 1e-15);
        assert!((expected - 0.70824).abs() < 1e-5);
    }

    #[test]
    fn barrier_with_unit_alpha_is_distance() {
        let g = grid(-1.0, 1.0, 64, 2.0);
        let w = barrier_function(&g, &BarrierSpec::new(1.0, 0.0, 0.3)).unwrap();
        for i in g.interior() {
            assert_eq!(w.value(i), g.distance(g.x(i)));
        }
    }

    #[test]
    fn barrier_spec_validation() {
        let g = grid(-1.0, 1.0, 64, 2.0);
        assert!(BarrierSpec::new(0.0, 0.0, 0.3).validate(&g).is_err());
        assert!(BarrierSpec::new(0.5, -1.0, 0.3).validate(&g).is_err());
        assert!(BarrierSpec::new(0.5, 0.0, 1.0).validate(&g).is_err());
    }

    #[test]
    fn spacing_multiples() {
        let g = grid(0.0, 1.0, 99, 1.0);
        assert_eq!(g.spacing_multiple(0.03), Some(3));
        assert_eq!(g.spacing_multiple(0.035), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn distance_is_one_lipschitz(x in -3.0f64..3.0, y in -3.0f64..3.0) {
                let g = Grid::new(-1.0, 1.0, 32, 2.0).unwrap();
                prop_assert!((g.distance(x) - g.distance(y)).abs() <= (x - y).abs() + 1e-15);
            }

            #[test]
            fn barrier_monotone_in_kappa(k1 in 0.0f64..0.2, dk in 0.0f64..0.2, alpha in 0.05f64..1.0) {
                let g = grid(-1.0, 1.0, 32, 2.0);
                let lo = barrier_function(&g, &BarrierSpec::new(alpha, k1, 0.5)).unwrap();
                let hi = barrier_function(&g, &BarrierSpec::new(alpha, k1 + dk, 0.5)).unwrap();
                for i in 0..g.len() {
                    prop_assert!(hi.value(i) >= lo.value(i));
                }
            }
        }
    }
}
