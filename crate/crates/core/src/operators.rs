//! Collocation quadrature for the singular kernels `|x - y|^{-1-ls}`.
//!
//! Every node sum runs over the whole meshed box with weight `h`, pairs the
//! offsets `i ± k` before accumulating, and visits `k` in ascending order, so
//! results are bitwise reproducible. Mass beyond the box is handled by the
//! closed-form far-field weight with the exterior datum of the function.
//!
//! The nearest-neighbour weight carries the factor `1 - ζ(1 + ls - l)`, the
//! zeta correction of the Riemann sum of `t^{l-1-ls}` at the origin. Without
//! it the sum misses the singular cell and is only `O(h^{l-ls})` accurate on
//! smooth data.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Grid, GridFunction, Interval};
use crate::math::{abs, abs_pow, powf, signed_pow, zeta};

/// `(p, q, s1, s2)` of `(-Δ)_p^{s1} + (-Δ)_q^{s2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub p: f64,
    pub q: f64,
    pub s1: f64,
    pub s2: f64,
}

impl OperatorParams {
    pub fn new(p: f64, q: f64, s1: f64, s2: f64) -> Result<Self> {
        if !(q > 1.0 && q <= p && p.is_finite()) {
            return Err(Error::param("operator", format!("need 1 < q ≤ p < ∞, got p={p}, q={q}")));
        }
        if !(s2 > 0.0 && s2 <= s1 && s1 < 1.0) {
            return Err(Error::param(
                "operator",
                format!("need 0 < s2 ≤ s1 < 1, got s1={s1}, s2={s2}"),
            ));
        }
        Ok(OperatorParams { p, q, s1, s2 })
    }

    /// True in the regime `2 ≤ q ≤ p` covered by the regularity theory.
    pub fn verification_grade(&self) -> bool {
        self.q >= 2.0
    }

    /// `q' s2` with `q' = q/(q - 1)`.
    pub fn q_prime_s2(&self) -> f64 {
        self.q / (self.q - 1.0) * self.s2
    }

    /// The two `(l, s)` pairs of the operator.
    pub fn terms(&self) -> [(f64, f64); 2] {
        [(self.p, self.s1), (self.q, self.s2)]
    }

    pub fn is_linear(&self) -> bool {
        self.p == 2.0 && self.q == 2.0
    }
}

fn check_ls(l: f64, s: f64) -> Result<()> {
    if !(l > 1.0 && l.is_finite()) {
        return Err(Error::param("l", format!("need l > 1, got {l}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", format!("need 0 < s < 1, got {s}")));
    }
    Ok(())
}

/// `∫_{y ∉ box} |x - y|^{-1-ls} dy` for a point `x` inside the box.
#[inline]
pub fn farfield_at(bounds: Interval, x: f64, ls: f64) -> f64 {
    (powf(bounds.hi - x, -ls) + powf(x - bounds.lo, -ls)) / ls
}

/// Far-field weight of node `i`: `((x_hi - x_i)^{-ls} + (x_i - x_lo)^{-ls})/(ls)`.
///
/// At the box ends one of the two terms is infinite; the weight is then only
/// ever multiplied by a zero jump for the problems studied here.
pub fn farfield_weight(grid: &Grid, i: usize, l: f64, s: f64) -> f64 {
    farfield_at(grid.bounds(), grid.x(i), l * s)
}

/// `1 - ζ(1 + ls - l)`, applied to the offset-one weight.
pub fn near_field_factor(l: f64, s: f64) -> f64 {
    1.0 - zeta(1.0 + l * s - l)
}

/// Precomputed offset weights `h (k h)^{-1-ls}` (offset one scaled by
/// [`near_field_factor`]) and far-field weights for one `(l, s)` pair on one grid.
#[derive(Debug, Clone)]
pub struct Kernel {
    l: f64,
    s: f64,
    h: f64,
    offsets: Vec<f64>,
    farfield: Vec<f64>,
}

impl Kernel {
    pub fn new(grid: &Grid, l: f64, s: f64) -> Result<Self> {
        check_ls(l, s)?;
        let m = grid.len();
        let h = grid.spacing();
        let e = -1.0 - l * s;
        let mut offsets = Vec::with_capacity(m);
        offsets.push(0.0);
        for k in 1..m {
            offsets.push(h * powf(k as f64 * h, e));
        }
        if m > 1 {
            offsets[1] *= near_field_factor(l, s);
        }
        let farfield = (0..m)
            .map(|i| {
                if i == 0 || i + 1 == m {
                    // Box ends: only the outer half-line touches these nodes.
                    f64::INFINITY
                } else {
                    farfield_weight(grid, i, l, s)
                }
            })
            .collect();
        Ok(Kernel {
            l,
            s,
            h,
            offsets,
            farfield,
        })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `h (k h)^{-1-ls}`.
    #[inline]
    pub fn offset_weight(&self, k: usize) -> f64 {
        self.offsets[k]
    }

    #[inline]
    pub fn farfield(&self, i: usize) -> f64 {
        self.farfield[i]
    }

    /// Collocation value of `(-Δ)_l^s u` at node `i`.
    pub fn apply(&self, values: &[f64], datum: f64, i: usize) -> f64 {
        let m = values.len();
        let l = self.l;
        let ui = values[i];
        let mut acc = 0.0;
        let both = i.min(m - 1 - i);
        for k in 1..=both {
            let pair = signed_pow(ui - values[i + k], l) + signed_pow(ui - values[i - k], l);
            acc += pair * self.offsets[k];
        }
        if i + both + 1 < m {
            for k in both + 1..m - i {
                acc += signed_pow(ui - values[i + k], l) * self.offsets[k];
            }
        } else {
            for k in both + 1..=i {
                acc += signed_pow(ui - values[i - k], l) * self.offsets[k];
            }
        }
        let jump = signed_pow(ui - datum, l);
        let far = if jump == 0.0 { 0.0 } else { jump * self.farfield[i] };
        2.0 * acc + 2.0 * far
    }

    /// `Σ_j |u_i - u_j|^{l-2} w_{|i-j|}` over the row, and the far-field
    /// coefficient `|u_i - g|^{l-2} W_i`; the pieces of the Hessian diagonal.
    pub(crate) fn curvature_row(&self, values: &[f64], datum: f64, i: usize) -> (f64, f64) {
        let m = values.len();
        let e = self.l - 2.0;
        let ui = values[i];
        let mut acc = 0.0;
        for (k, w) in self.offsets.iter().enumerate().skip(1) {
            if k <= i {
                acc += abs_pow(ui - values[i - k], e) * w;
            }
            if i + k < m {
                acc += abs_pow(ui - values[i + k], e) * w;
            }
            if k > i && i + k >= m {
                break;
            }
        }
        (acc, abs_pow(ui - datum, e) * self.farfield[i])
    }

    /// `(1/l)` times the part of `A_l(u, u)` that involves interior nodes.
    pub(crate) fn interior_energy(&self, grid: &Grid, values: &[f64], datum: f64) -> f64 {
        let m = values.len();
        let l = self.l;
        let interior = grid.interior();
        let mut pairs = 0.0;
        let mut far = 0.0;
        for i in interior.clone() {
            let ui = values[i];
            // Interior-interior pairs once (j > i), interior-exterior pairs once.
            let mut row = 0.0;
            for (k, w) in self.offsets.iter().enumerate().skip(1) {
                if i + k < m {
                    row += abs_pow(ui - values[i + k], l) * w;
                }
                if k <= i && !interior.contains(&(i - k)) {
                    row += abs_pow(ui - values[i - k], l) * w;
                }
                if k > i && i + k >= m {
                    break;
                }
            }
            pairs += row;
            far += abs_pow(ui - datum, l) * self.farfield[i];
        }
        // Pairs with j > i exterior were counted from the interior side only.
        2.0 * self.h * (pairs + far) / l
    }
}

/// `(-Δ)_l^s u` at node `i`: `2 Σ_{j≠i} [u_i - u_j]^{l-1} |x_i - x_j|^{-1-ls} h`
/// (offset one corrected) plus the far-field contribution of the exterior datum.
pub fn eval_pointwise(u: &GridFunction, l: f64, s: f64, i: usize) -> Result<f64> {
    check_ls(l, s)?;
    let grid = u.grid();
    if i >= grid.len() {
        return Err(Error::param("i", format!("node {i} outside the box")));
    }
    let values = u.values();
    let m = values.len();
    let h = grid.spacing();
    let e = -1.0 - l * s;
    let ui = values[i];
    let near = near_field_factor(l, s);
    let mut acc = 0.0;
    for k in 1..m {
        let mut w = h * powf(k as f64 * h, e);
        if k == 1 {
            w *= near;
        }
        let mut pair = 0.0;
        let mut any = false;
        if i + k < m {
            pair += signed_pow(ui - values[i + k], l);
            any = true;
        }
        if k <= i {
            pair += signed_pow(ui - values[i - k], l);
            any = true;
        }
        if !any {
            break;
        }
        acc += pair * w;
    }
    let jump = signed_pow(ui - u.exterior().datum(), l);
    let far = if jump == 0.0 {
        0.0
    } else {
        jump * farfield_weight(grid, i, l, s)
    };
    Ok(2.0 * acc + 2.0 * far)
}

/// Discrete `A_l(u, v)` over the box pairs (each unordered pair twice) plus
/// the pairs with one point beyond the box.
pub fn weak_form(u: &GridFunction, v: &GridFunction, l: f64, s: f64) -> Result<f64> {
    check_ls(l, s)?;
    u.check_same_grid(v)?;
    let kernel = Kernel::new(u.grid(), l, s)?;
    let uv = u.values();
    let vv = v.values();
    let m = uv.len();
    let gu = u.exterior().datum();
    let gv = v.exterior().datum();
    let h = u.grid().spacing();
    let mut pairs = 0.0;
    let mut far = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for k in 1..m - i {
            let j = i + k;
            row += signed_pow(uv[i] - uv[j], l) * (vv[i] - vv[j]) * kernel.offset_weight(k);
        }
        pairs += row;
        let jump = signed_pow(uv[i] - gu, l) * (vv[i] - gv);
        if jump != 0.0 {
            far += jump * kernel.farfield(i);
        }
    }
    Ok(2.0 * h * pairs + 2.0 * h * far)
}

/// Per-interior-node residual of the collocated weak equation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakResidual {
    /// `r_i = h (eval_p + eval_q - f_i)` for interior nodes, in index order.
    pub values: Vec<f64>,
    /// `max_i |r_i| / h`.
    pub sup_norm: f64,
}

/// Residual of `(-Δ)_p^{s1} u + (-Δ)_q^{s2} u = f` tested against nodal hats.
pub fn residual(u: &GridFunction, f: &GridFunction, params: &OperatorParams) -> Result<WeakResidual> {
    u.check_same_grid(f)?;
    let kp = Kernel::new(u.grid(), params.p, params.s1)?;
    let kq = Kernel::new(u.grid(), params.q, params.s2)?;
    Ok(residual_with(u, f.values(), &kp, &kq))
}

pub(crate) fn residual_with(u: &GridFunction, f: &[f64], kp: &Kernel, kq: &Kernel) -> WeakResidual {
    let grid = u.grid();
    let h = grid.spacing();
    let g = u.exterior().datum();
    let mut values = Vec::with_capacity(grid.n());
    let mut sup = 0.0f64;
    for i in grid.interior() {
        let op = kp.apply(u.values(), g, i) + kq.apply(u.values(), g, i);
        let r = op - f[i];
        sup = sup.max(abs(r));
        values.push(h * r);
    }
    WeakResidual {
        values,
        sup_norm: sup,
    }
}

/// Parameters of `T_{m,α}(u; x0, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSpec {
    pub m: f64,
    pub alpha: f64,
    pub center: f64,
    pub radius: f64,
}

/// `∫_lo^hi |x0 - y|^{-1-α} dy` for an interval on one side of `x0`.
fn kernel_mass(x0: f64, lo: f64, hi: f64, alpha: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo >= x0 {
        (powf(lo - x0, -alpha) - powf(hi - x0, -alpha)) / alpha
    } else {
        (powf(x0 - hi, -alpha) - powf(x0 - lo, -alpha)) / alpha
    }
}

/// Nonlocal tail `(R^α ∫_{ℝ \ B_R(x0)} |u|^m |x0 - y|^{-1-α} dy)^{1/m}`.
///
/// `u` is taken piecewise constant on the node cells (clipped to the box)
/// and the kernel is integrated exactly on each cell piece; beyond the box
/// `u` equals its exterior datum.
pub fn tail(u: &GridFunction, spec: &TailSpec) -> Result<f64> {
    if !(spec.m > 1.0) {
        return Err(Error::param("tail.m", format!("need m > 1, got {}", spec.m)));
    }
    if !(spec.alpha > 0.0) {
        return Err(Error::param("tail.alpha", format!("need α > 0, got {}", spec.alpha)));
    }
    if !(spec.radius > 0.0) {
        return Err(Error::param("tail.radius", format!("need R > 0, got {}", spec.radius)));
    }
    if !spec.center.is_finite() {
        return Err(Error::param("tail.center", "center must be finite"));
    }
    let grid = u.grid();
    let bounds = grid.bounds();
    let h = grid.spacing();
    let (x0, r, alpha) = (spec.center, spec.radius, spec.alpha);
    let left_edge = x0 - r;
    let right_edge = x0 + r;
    let mut integral = 0.0;
    for (j, &x) in grid.nodes().iter().enumerate() {
        let weight = abs_pow(u.value(j), spec.m);
        if weight == 0.0 {
            continue;
        }
        let lo = (x - 0.5 * h).max(bounds.lo);
        let hi = (x + 0.5 * h).min(bounds.hi);
        let mass = kernel_mass(x0, lo, hi.min(left_edge), alpha)
            + kernel_mass(x0, lo.max(right_edge), hi, alpha);
        integral += weight * mass;
    }
    let g = abs_pow(u.exterior().datum(), spec.m);
    if g != 0.0 {
        let right_start = bounds.hi.max(right_edge);
        let left_end = bounds.lo.min(left_edge);
        integral += g * (powf(right_start - x0, -alpha) + powf(x0 - left_end, -alpha)) / alpha;
    }
    Ok(powf(powf(r, alpha) * integral, 1.0 / spec.m))
}

/// `[u]_{W^{s,l}(E)} = (h² Σ_{i≠j ∈ E} |u_i - u_j|^l |x_i - x_j|^{-1-ls})^{1/l}`.
pub fn gagliardo_seminorm(u: &GridFunction, s: f64, l: f64, region: Interval) -> Result<f64> {
    check_ls(l, s)?;
    let grid = u.grid();
    let bounds = grid.bounds();
    if region.lo < bounds.lo - 1e-12 || region.hi > bounds.hi + 1e-12 {
        return Err(Error::param("region", "region must lie within the meshed box"));
    }
    let h = grid.spacing();
    let e = -1.0 - l * s;
    let idx: Vec<usize> = grid.nodes_in(region).collect();
    let mut acc = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        let mut row = 0.0;
        for &j in idx.get(a + 1..).unwrap_or(&[]) {
            row += abs_pow(u.value(i) - u.value(j), l) * h * powf((j - i) as f64 * h, e);
        }
        acc += row;
    }
    let total = 2.0 * h * acc;
    Ok(powf(total, 1.0 / l))
}

/// Quadrature of `∫_{y ≤ a} [ux - u(y)]^{l-1} |x - y|^{-1-ls} dy` for a point
/// `x > a` carrying the value `ux`: the exterior share of the node sum (the
/// boundary node split in half with `Ω`) plus the far field beyond the box.
pub fn left_exterior_term(u: &GridFunction, l: f64, s: f64, x: f64, ux: f64) -> Result<f64> {
    check_ls(l, s)?;
    let grid = u.grid();
    if !(x > grid.a() && x < grid.bounds().hi) {
        return Err(Error::param("x", "need a < x inside the box"));
    }
    let h = grid.spacing();
    let e = -1.0 - l * s;
    let ia = grid.index_of_a();
    let mut acc = 0.0;
    // Ascending distance from x.
    for j in (0..=ia).rev() {
        let w = if j == ia { 0.5 * h } else { h };
        acc += signed_pow(ux - u.value(j), l) * w * powf(x - grid.x(j), e);
    }
    let jump = signed_pow(ux - u.exterior().datum(), l);
    if jump != 0.0 {
        acc += jump * powf(x - grid.bounds().lo, -l * s) / (l * s);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{barrier_function, BarrierSpec, ExteriorRule};
    use alloc::sync::Arc;

    fn grid(a: f64, b: f64, n: usize, halo: f64) -> Arc<Grid> {
        Arc::new(Grid::new(a, b, n, halo).unwrap())
    }

    #[test]
    fn farfield_examples() {
        let b = Interval::new(-3.0, 3.0);
        assert!((farfield_at(b, 0.0, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        // 2 · 3^{-1/2} / 0.5
        let expected = 2.0 * libm::pow(3.0, -0.5) / 0.5;
        assert!((farfield_at(b, 0.0, 0.5) - expected).abs() < 1e-14);
        assert!((expected - 2.3094).abs() < 1e-4);
        let mut last = f64::INFINITY;
        for ls in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let w = farfield_at(b, 0.0, ls);
            assert!(w < last);
            last = w;
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let g = grid(-1.0, 1.0, 32, 2.0);
        let u = GridFunction::constant(g.clone(), 3.5);
        for i in 0..g.len() {
            assert_eq!(eval_pointwise(&u, 2.5, 0.4, i).unwrap(), 0.0);
        }
    }

    #[test]
    fn odd_function_vanishes_at_centre() {
        let g = grid(-1.0, 1.0, 33, 2.0);
        let c = g.interior().start + 16;
        assert_eq!(g.x(c), 0.0);
        let u = GridFunction::from_fn(g.clone(), |x| x * x * x - 0.3 * x, ExteriorRule::ZeroBeyondHalo)
            .unwrap();
        let v = eval_pointwise(&u, 2.0, 0.6, c).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn kernel_matches_free_function() {
        let g = grid(0.0, 1.0, 40, 1.0);
        let u = GridFunction::from_interior_fn(g.clone(), |x| libm::sin(3.0 * x) + x);
        let k = Kernel::new(&g, 3.0, 0.3).unwrap();
        for i in g.interior() {
            let a = k.apply(u.values(), 0.0, i);
            let b = eval_pointwise(&u, 3.0, 0.3, i).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn weak_form_trivial_cases() {
        let g = grid(-1.0, 1.0, 24, 2.0);
        let c = GridFunction::constant(g.clone(), 1.0);
        let v = GridFunction::from_interior_fn(g.clone(), |x| 1.0 - x * x);
        assert_eq!(weak_form(&c, &v, 2.0, 0.5).unwrap(), 0.0);
        let z = GridFunction::zeros(g.clone());
        assert_eq!(weak_form(&v, &z, 3.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn weak_form_rejects_mismatched_grids() {
        let u = GridFunction::zeros(grid(-1.0, 1.0, 24, 2.0));
        let v = GridFunction::zeros(grid(-1.0, 1.0, 25, 2.0));
        assert_eq!(weak_form(&u, &v, 2.0, 0.5), Err(Error::GridMismatch));
    }

    #[test]
    fn quadratic_weak_form_is_corrected_gagliardo_energy_plus_farfield() {
        let g = grid(-1.0, 1.0, 48, 2.0);
        let u = GridFunction::from_interior_fn(g.clone(), |x| libm::cos(x) - libm::cos(1.0));
        let s = 0.4;
        let w = weak_form(&u, &u, 2.0, s).unwrap();
        let semi = gagliardo_seminorm(&u, s, 2.0, g.bounds()).unwrap();
        let mut far = 0.0;
        for i in g.interior() {
            far += u.value(i) * u.value(i) * farfield_weight(&g, i, 2.0, s);
        }
        // The weak form carries the near-field correction on adjacent pairs.
        let h = g.spacing();
        let w1 = h * libm::pow(h, -1.0 - 2.0 * s) * (near_field_factor(2.0, s) - 1.0);
        let mut near = 0.0;
        for i in 0..g.len() - 1 {
            let d = u.value(i) - u.value(i + 1);
            near += d * d * w1;
        }
        let expected = semi * semi + 2.0 * h * (far + near);
        assert!((w - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn corrected_quadrature_converges_at_second_order() {
        // Self-convergence at x = 0 for x² e^{-8x²} (zero at the centre, so
        // the box ends contribute nothing); the plain Riemann sum would give
        // ratios near 2^{2-2s} ≈ 1.7 here.
        let s = 0.6;
        let values: Vec<f64> = [63usize, 127, 255, 511]
            .iter()
            .map(|&n| {
                let g = grid(-1.0, 1.0, n, 4.0);
                let u = GridFunction::from_fn(g.clone(), |x| x * x * libm::exp(-8.0 * x * x), ExteriorRule::ZeroBeyondHalo)
                    .unwrap();
                let c = (0..g.len()).find(|&i| g.x(i).abs() < 1e-12).unwrap();
                eval_pointwise(&u, 2.0, s, c).unwrap()
            })
            .collect();
        let r1 = (values[0] - values[1]).abs() / (values[1] - values[2]).abs();
        let r2 = (values[1] - values[2]).abs() / (values[2] - values[3]).abs();
        assert!(r1 > 3.0 && r2 > 3.0, "{r1} {r2} {values:?}");
    }

    #[test]
    fn near_field_factor_values() {
        // ζ(0.5) ≈ -1.4603545, ζ(-0.5) ≈ -0.2078862.
        assert!((near_field_factor(2.0, 0.75) - 2.460_354_508_809_586_8).abs() < 1e-12);
        assert!((near_field_factor(3.0, 0.5) - 1.207_886_224_977_354_6).abs() < 1e-12);
        assert!(near_field_factor(2.0, 0.1) > 1.0);
    }

    #[test]
    fn residual_trivial_cases() {
        let g = grid(-1.0, 1.0, 20, 2.0);
        let params = OperatorParams::new(2.0, 2.0, 0.5, 0.3).unwrap();
        let z = GridFunction::zeros(g.clone());
        let r = residual(&z, &z, &params).unwrap();
        assert_eq!(r.sup_norm, 0.0);
        assert!(r.values.iter().all(|&v| v == 0.0));
        assert_eq!(r.values.len(), 20);
        let one = GridFunction::from_interior_fn(g.clone(), |_| 1.0);
        let r = residual(&z, &one, &params).unwrap();
        assert_eq!(r.sup_norm, 1.0);
    }

    #[test]
    fn tail_examples() {
        let g = grid(-1.0, 1.0, 64, 2.0);
        let z = GridFunction::zeros(g.clone());
        let spec = TailSpec {
            m: 2.0,
            alpha: 1.0,
            center: 0.0,
            radius: 0.5,
        };
        assert_eq!(tail(&z, &spec).unwrap(), 0.0);
        let one = GridFunction::constant(g.clone(), 1.0);
        for r in [0.1, 0.5, 1.3, 4.0] {
            let t = tail(&one, &TailSpec { radius: r, ..spec }).unwrap();
            assert!((t - libm::sqrt(2.0)).abs() < 1e-10, "R={r}: {t}");
        }
        let bump = GridFunction::from_interior_fn(g.clone(), |x| if x.abs() < 0.3 { 1.0 } else { 0.0 });
        assert_eq!(tail(&bump, &TailSpec { radius: 0.5, ..spec }).unwrap(), 0.0);
    }

    #[test]
    fn tail_rejects_bad_spec() {
        let g = grid(-1.0, 1.0, 32, 2.0);
        let z = GridFunction::zeros(g);
        let spec = TailSpec {
            m: 1.0,
            alpha: 1.0,
            center: 0.0,
            radius: 0.5,
        };
        assert!(tail(&z, &spec).is_err());
        assert!(tail(&z, &TailSpec { m: 2.0, radius: 0.0, ..spec }).is_err());
    }

    #[test]
    fn gagliardo_of_linear_function() {
        // [x]^2 over [0,1] with l = 2, s = 1/2 is ∫∫ 1 = 1.
        let mut last = None;
        for n in [99, 199] {
            let g = grid(0.0, 1.0, n, 1.0);
            let u = GridFunction::from_fn(g.clone(), |x| x, ExteriorRule::Prescribed(0.0)).unwrap();
            let v = gagliardo_seminorm(&u, 0.5, 2.0, Interval::new(0.0, 1.0)).unwrap();
            // Node sums give N/(N-1) for N nodes in [0, 1].
            let nodes = (n + 2) as f64;
            assert!((v * v - nodes / (nodes - 1.0)).abs() < 1e-12);
            if let Some(prev) = last {
                let change: f64 = (v - prev) / prev;
                assert!(change.abs() <= 0.02);
            }
            last = Some(v);
        }
        let g = grid(0.0, 1.0, 40, 1.0);
        let c = GridFunction::constant(g, 2.0);
        assert_eq!(gagliardo_seminorm(&c, 0.3, 2.5, Interval::new(0.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn left_exterior_term_matches_closed_form() {
        // L1(x) = (x + κ^{1/α})^{α(q-1) - q s2} / (q s2); here ≡ 2.
        let g = grid(0.0, 2.0, 2048, 2.0);
        let spec = BarrierSpec::new(0.5, 0.0, 0.5);
        let w = barrier_function(&g, &spec).unwrap();
        for x in [0.25, 0.5, 1.0] {
            let ux = libm::sqrt(x);
            let q = left_exterior_term(&w, 2.0, 0.25, x, ux).unwrap();
            assert!((q - 2.0).abs() / 2.0 < 1e-3, "x={x}: {q}");
        }
    }

    #[test]
    fn params_validation() {
        assert!(OperatorParams::new(2.0, 3.0, 0.5, 0.4).is_err());
        assert!(OperatorParams::new(3.0, 2.0, 0.4, 0.5).is_err());
        assert!(OperatorParams::new(3.0, 1.0, 0.5, 0.4).is_err());
        let p = OperatorParams::new(3.0, 1.5, 0.5, 0.4).unwrap();
        assert!(!p.verification_grade());
        let p = OperatorParams::new(2.0, 2.0, 0.75, 0.35).unwrap();
        assert!(p.verification_grade());
        assert!((p.q_prime_s2() - 0.7).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn homogeneity(t in 0.1f64..10.0, l in 1.5f64..4.0, s in 0.1f64..0.9, seed in 0u64..1000) {
                let g = grid(-1.0, 1.0, 24, 2.0);
                let u = GridFunction::from_interior_fn(g.clone(), |x| libm::sin(x * (1.0 + seed as f64 * 0.01)) + 1.2);
                let tu = u.scaled(t);
                for i in g.interior() {
                    let a = eval_pointwise(&tu, l, s, i).unwrap();
                    let b = libm::pow(t, l - 1.0) * eval_pointwise(&u, l, s, i).unwrap();
                    prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
                }
            }

            #[test]
            fn translation_equivariance(shift in 1usize..5, s in 0.1f64..0.9, l in 1.5f64..3.5) {
                let g = grid(-1.0, 1.0, 40, 2.0);
                let h = g.spacing();
                let dx = shift as f64 * h;
                let moved = grid(-1.0 + dx, 1.0 + dx, 40, 2.0);
                let f = |x: f64| (1.0 - x * x).max(0.0) + 0.3 * x;
                let u = GridFunction::from_fn(g.clone(), f, ExteriorRule::ZeroBeyondHalo).unwrap();
                let v = GridFunction::from_fn(moved.clone(), |x| f(x - dx), ExteriorRule::ZeroBeyondHalo).unwrap();
                for i in 1..g.len() - 1 {
                    let a = eval_pointwise(&u, l, s, i).unwrap();
                    let b = eval_pointwise(&v, l, s, i).unwrap();
                    prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} vs {}", a, b);
                }
            }

            #[test]
            fn positive_at_strict_maximum(l in 1.5f64..4.0, s in 0.1f64..0.9, peak in 1.0f64..3.0) {
                let g = grid(-1.0, 1.0, 24, 2.0);
                let c = g.interior().start + 12;
                let mut u = GridFunction::from_interior_fn(g.clone(), |x| 0.5 * (1.0 - x * x));
                u.values_mut()[c] = peak;
                prop_assert!(eval_pointwise(&u, l, s, c).unwrap() > 0.0);
            }

            #[test]
            fn quadratic_weak_form_is_symmetric(s in 0.1f64..0.9, a in -2.0f64..2.0) {
                let g = grid(-1.0, 1.0, 20, 2.0);
                let u = GridFunction::from_interior_fn(g.clone(), |x| libm::exp(a * x));
                let v = GridFunction::from_interior_fn(g.clone(), |x| 1.0 - x * x);
                prop_assert_eq!(weak_form(&u, &v, 2.0, s).unwrap(), weak_form(&v, &u, 2.0, s).unwrap());
            }
        }
    }
}
