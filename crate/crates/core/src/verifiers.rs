//! Executable checks of maximum and comparison principles, barrier
//! asymptotics and the Caccioppoli inequality on computed grid functions.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimators::{fit_boundary_exponent, hopf_quotient, FitSide, FitWindow};
use crate::geometry::{barrier_function, BarrierSpec, Grid, GridFunction, Interval};
use crate::math::{abs, abs_pow, powf};
use crate::operators::{Kernel, OperatorParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    NotApplicable,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::NotApplicable => "not applicable",
        }
    }
}

/// Node where a check failed, with the values it was decided on.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub index: usize,
    pub x: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipleVerdict {
    pub name: String,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// Worst-case slack of the deciding inequality (negative on failure).
    pub margin: f64,
    pub refinement_ratio: Option<f64>,
    pub details: String,
}

impl PrincipleVerdict {
    fn new(name: &str, outcome: Outcome, margin: f64, details: String) -> Self {
        PrincipleVerdict {
            name: String::from(name),
            outcome,
            witness: None,
            margin,
            refinement_ratio: None,
            details,
        }
    }

    fn with_witness(mut self, grid: &Grid, index: usize, values: Vec<f64>) -> Self {
        self.witness = Some(Witness {
            index,
            x: grid.x(index),
            values,
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn applicable(&self) -> bool {
        self.outcome != Outcome::NotApplicable
    }
}

pub const STRONG_MAX: &str = "strong maximum principle";
pub const WEAK_COMPARISON: &str = "weak comparison principle";
pub const STRONG_COMPARISON: &str = "strong comparison principle";
pub const BARRIER_SUPER: &str = "barrier supersolution bound";
pub const BARRIER_Q_BOUNDED: &str = "barrier q-operator boundedness";
pub const CACCIOPPOLI: &str = "Caccioppoli inequality";
pub const SINGULAR_SCP: &str = "singular strong comparison principle";

fn argmin(grid: &Grid, f: impl Fn(usize) -> f64) -> (usize, f64) {
    let mut best = (grid.interior().start, f64::INFINITY);
    for i in grid.interior() {
        let v = f(i);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// `(-Δ)_p^{s1} u + (-Δ)_q^{s2} u` and `(-Δ)_q^{s2} u` at interior nodes.
fn operator_values(u: &GridFunction, params: &OperatorParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = u.grid();
    let kp = Kernel::new(grid, params.p, params.s1)?;
    let kq = Kernel::new(grid, params.q, params.s2)?;
    let g = u.exterior().datum();
    let mut full = Vec::with_capacity(grid.n());
    let mut q_part = Vec::with_capacity(grid.n());
    for i in grid.interior() {
        let q = kq.apply(u.values(), g, i);
        full.push(kp.apply(u.values(), g, i) + q);
        q_part.push(q);
    }
    Ok((full, q_part))
}

/// Either `u ≡ 0` (`sup |u| ≤ tol`) or `min_Ω u > tol`.
pub fn verify_strong_max(u: &GridFunction, tol: f64) -> PrincipleVerdict {
    let grid = u.grid();
    let sup = u.interior_sup();
    if sup <= tol {
        return PrincipleVerdict::new(STRONG_MAX, Outcome::Pass, tol - sup, format!("u vanishes: sup|u| = {sup:e}"));
    }
    let (i, min) = argmin(grid, |i| u.value(i));
    let margin = min - tol;
    if margin > 0.0 {
        PrincipleVerdict::new(STRONG_MAX, Outcome::Pass, margin, format!("min u = {min:e}"))
    } else {
        PrincipleVerdict::new(STRONG_MAX, Outcome::Fail, margin, format!("u ≢ 0 but min u = {min:e}"))
            .with_witness(grid, i, vec![min])
    }
}

/// `u1 ≤ u2 + 10 tol` everywhere, for solutions with sources `f1 ≤ f2`.
pub fn verify_weak_comparison(
    u1: &GridFunction,
    u2: &GridFunction,
    f1: &GridFunction,
    f2: &GridFunction,
    tol: f64,
) -> Result<PrincipleVerdict> {
    for other in [u2, f1, f2] {
        if !u1.same_grid(other) {
            return Err(Error::GridMismatch);
        }
    }
    let grid = u1.grid();
    if let Some(i) = grid.interior().find(|&i| f1.value(i) > f2.value(i)) {
        return Err(Error::Precondition(format!(
            "sources are not ordered: f1 = {} > f2 = {} at node {i}",
            f1.value(i),
            f2.value(i)
        )));
    }
    let (i, margin) = argmin(grid, |i| u2.value(i) - u1.value(i));
    let exterior_gap = (0..grid.len())
        .filter(|&j| !grid.is_interior(j))
        .map(|j| u2.value(j) - u1.value(j))
        .fold(f64::INFINITY, f64::min);
    let slack = 10.0 * tol;
    if margin >= -slack && exterior_gap >= -slack {
        Ok(PrincipleVerdict::new(
            WEAK_COMPARISON,
            Outcome::Pass,
            margin,
            format!("min(u2 - u1) = {margin:e}"),
        ))
    } else {
        Ok(PrincipleVerdict::new(
            WEAK_COMPARISON,
            Outcome::Fail,
            margin.min(exterior_gap),
            format!("u1 exceeds u2 by {:e}", -margin.min(exterior_gap)),
        )
        .with_witness(grid, i, vec![u1.value(i), u2.value(i)]))
    }
}

/// Strong comparison: `u > v` in `Ω`, and `(u - v)/d^{s1}` bounded below
/// when `s1 ≠ q' s2`. The hypotheses (sources bounded by `k_bound`, ordered,
/// and `(-Δ)_q^{s2} v ≥ -k1`) are sampled at the nodes; if they fail the
/// verdict is "not applicable".
pub fn verify_strong_comparison(
    u: &GridFunction,
    v: &GridFunction,
    params: &OperatorParams,
    k_bound: f64,
    k1: f64,
    tol: f64,
) -> Result<PrincipleVerdict> {
    if !u.same_grid(v) {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid();
    let gap_sup = grid.interior().map(|i| abs(u.value(i) - v.value(i))).fold(0.0, f64::max);
    if gap_sup <= tol {
        return Err(Error::Precondition(String::from("u and v coincide; the principle needs u ≢ v")));
    }
    let (fu, _) = operator_values(u, params)?;
    let (fv, qv) = operator_values(v, params)?;
    let source_sup = fu.iter().chain(&fv).map(|x| abs(*x)).fold(0.0, f64::max);
    let ordered_slack = fu
        .iter()
        .zip(&fv)
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min);
    let q_min = qv.iter().copied().fold(f64::INFINITY, f64::min);
    let gate_tol = 1e3 * tol * (1.0 + source_sup);
    if source_sup > k_bound || ordered_slack < -gate_tol || q_min < -k1 {
        return Ok(PrincipleVerdict::new(
            STRONG_COMPARISON,
            Outcome::NotApplicable,
            0.0,
            format!(
                "hypotheses not met: sup|f| = {source_sup:e} (K = {k_bound}), min(f_u - f_v) = {ordered_slack:e}, min (-Δ)_q v = {q_min:e} (K1 = {k1})"
            ),
        ));
    }
    let (i, gap) = argmin(grid, |i| u.value(i) - v.value(i));
    let resonant = abs(params.s1 - params.q_prime_s2()) < 1e-12;
    let (j, quotient) = if resonant {
        (i, f64::INFINITY)
    } else {
        argmin(grid, |i| (u.value(i) - v.value(i)) / powf(grid.node_distance(i), params.s1))
    };
    let margin = (gap - tol).min(quotient - tol);
    let mut details = format!("min(u - v) = {gap:e}");
    if resonant {
        details += "; s1 = q's2, the d^{s1} quotient clause is skipped";
    } else {
        details += &format!("; min (u - v)/d^s1 = {quotient:e}");
    }
    if margin > 0.0 {
        Ok(PrincipleVerdict::new(STRONG_COMPARISON, Outcome::Pass, margin, details))
    } else {
        let (k, val) = if gap - tol <= quotient - tol { (i, gap) } else { (j, quotient) };
        Ok(PrincipleVerdict::new(STRONG_COMPARISON, Outcome::Fail, margin, details)
            .with_witness(grid, k, vec![u.value(k), v.value(k), val]))
    }
}

/// Which barrier statement a [`BarrierCheckReport`] decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierCheck {
    /// `inf (-Δ)_p^{s1} w̄ · (d + κ^{1/α})^{ps1 - α(p-1)} > 0`, stable under refinement.
    Supersolution,
    /// `sup |(-Δ)_q^{s2} w̄|` bounded under refinement.
    QBounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierCheckReport {
    pub check: BarrierCheck,
    pub alpha: f64,
    pub kappa: f64,
    pub rho: f64,
    /// Width of the band `{d < band}` the extrema are taken over.
    pub band: f64,
    pub coarse_n: usize,
    pub fine_n: usize,
    /// Values on the coarse grid.
    pub inf_scaled_p_value: f64,
    pub sup_q_value: f64,
    /// Values on the fine grid.
    pub inf_scaled_p_value_fine: f64,
    pub sup_q_value_fine: f64,
    /// Fine over coarse value of the decided quantity.
    pub refinement_ratio: f64,
    pub passed: bool,
    pub band_nodes: usize,
}

impl BarrierCheckReport {
    pub fn verdict(&self) -> PrincipleVerdict {
        let (name, value, fine, margin) = match self.check {
            BarrierCheck::Supersolution => (
                BARRIER_SUPER,
                self.inf_scaled_p_value,
                self.inf_scaled_p_value_fine,
                self.refinement_ratio - 0.8,
            ),
            BarrierCheck::QBounded => (BARRIER_Q_BOUNDED, self.sup_q_value, self.sup_q_value_fine, 1.2 - self.refinement_ratio),
        };
        let mut v = PrincipleVerdict::new(
            name,
            if self.passed { Outcome::Pass } else { Outcome::Fail },
            margin,
            format!(
                "alpha = {}, kappa = {}, band = {}: n = {} gives {value:e}, n = {} gives {fine:e}",
                self.alpha, self.kappa, self.band, self.coarse_n, self.fine_n
            ),
        );
        v.refinement_ratio = Some(self.refinement_ratio);
        if !self.passed {
            v.witness = Some(Witness {
                index: self.fine_n,
                x: self.band,
                values: vec![value, fine],
            });
        }
        v
    }
}

struct BandValues {
    inf_scaled_p: f64,
    sup_q: f64,
    nodes: usize,
}

fn barrier_band_values(grid: &Arc<Grid>, spec: &BarrierSpec, params: &OperatorParams, band: f64) -> Result<BandValues> {
    spec.validate(grid)?;
    let w = barrier_function(grid, spec)?;
    let kp = Kernel::new(grid, params.p, params.s1)?;
    let kq = Kernel::new(grid, params.q, params.s2)?;
    let shift = spec.shift();
    let exponent = params.p * params.s1 - spec.alpha * (params.p - 1.0);
    let mut inf = f64::INFINITY;
    let mut sup = 0.0f64;
    let mut nodes = 0;
    for i in grid.interior() {
        let d = grid.distance(grid.x(i));
        if d >= band {
            continue;
        }
        nodes += 1;
        let p_val = kp.apply(w.values(), 0.0, i);
        inf = inf.min(p_val * powf(d + shift, exponent));
        sup = sup.max(abs(kq.apply(w.values(), 0.0, i)));
    }
    if nodes == 0 {
        return Err(Error::param("band", "no interior node lies in the band"));
    }
    Ok(BandValues {
        inf_scaled_p: inf,
        sup_q: sup,
        nodes,
    })
}

fn check_band(grid: &Grid, band: f64) -> Result<()> {
    if !(band > 0.0 && band < 0.5 * (grid.b() - grid.a())) {
        return Err(Error::param("band", format!("need 0 < band < (b - a)/2, got {band}")));
    }
    Ok(())
}

fn doubled(grid: &Grid) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::new(grid.a(), grid.b(), 2 * grid.n(), grid.halo())?))
}

fn barrier_report(
    check: BarrierCheck,
    grid: &Grid,
    spec: &BarrierSpec,
    params: &OperatorParams,
    band: f64,
) -> Result<BarrierCheckReport> {
    check_band(grid, band)?;
    let coarse_grid = Arc::new(grid.clone());
    let fine_grid = doubled(grid)?;
    let coarse = barrier_band_values(&coarse_grid, spec, params, band)?;
    let fine = barrier_band_values(&fine_grid, spec, params, band)?;
    let (refinement_ratio, passed) = match check {
        BarrierCheck::Supersolution => {
            let r = fine.inf_scaled_p / coarse.inf_scaled_p;
            (r, coarse.inf_scaled_p > 0.0 && fine.inf_scaled_p > 0.0 && r >= 0.8)
        }
        BarrierCheck::QBounded => {
            let r = fine.sup_q / coarse.sup_q;
            (r, fine.sup_q.is_finite() && r <= 1.2)
        }
    };
    Ok(BarrierCheckReport {
        check,
        alpha: spec.alpha,
        kappa: spec.kappa,
        rho: spec.rho,
        band,
        coarse_n: coarse_grid.n(),
        fine_n: fine_grid.n(),
        inf_scaled_p_value: coarse.inf_scaled_p,
        sup_q_value: coarse.sup_q,
        inf_scaled_p_value_fine: fine.inf_scaled_p,
        sup_q_value_fine: fine.sup_q,
        refinement_ratio,
        passed,
        band_nodes: coarse.nodes,
    })
}

/// Empirical supersolution constant of `w̄_ρ` on `{d < band}` at `n` and `2n`.
pub fn verify_barrier_super(
    grid: &Grid,
    spec: &BarrierSpec,
    params: &OperatorParams,
    band: f64,
) -> Result<BarrierCheckReport> {
    if spec.alpha >= params.s1 {
        return Err(Error::param(
            "barrier.alpha",
            format!("need α < s1 = {}, got {}", params.s1, spec.alpha),
        ));
    }
    barrier_report(BarrierCheck::Supersolution, grid, spec, params, band)
}

/// Boundedness of `(-Δ)_q^{s2} w̄_ρ` on `{d < band}` at `n` and `2n`.
/// `alpha` defaults to `s1`.
pub fn verify_barrier_q_bounded(
    grid: &Grid,
    params: &OperatorParams,
    band: f64,
    alpha: Option<f64>,
    kappa: f64,
    rho: f64,
) -> Result<BarrierCheckReport> {
    let alpha = alpha.unwrap_or(params.s1);
    if !(alpha >= params.s2 && alpha < 1.0) {
        return Err(Error::param("barrier.alpha", format!("need s2 ≤ α < 1, got {alpha}")));
    }
    if abs(alpha - params.q_prime_s2()) < 1e-6 {
        return Err(Error::param(
            "barrier.alpha",
            format!("α = q' s2 = {} is the excluded resonance", params.q_prime_s2()),
        ));
    }
    let spec = BarrierSpec::new(alpha, kappa, rho);
    barrier_report(BarrierCheck::QBounded, grid, &spec, params, band)
}

/// Which truncation `(u - k)_±` the Caccioppoli check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Plus,
    Minus,
}

impl Truncation {
    fn apply(&self, u: f64, k: f64) -> f64 {
        match self {
            Truncation::Plus => (u - k).max(0.0),
            Truncation::Minus => (k - u).max(0.0),
        }
    }
}

/// Data of one Caccioppoli evaluation.
#[derive(Debug, Clone, Copy)]
pub struct CaccioppoliInput<'a> {
    pub u: &'a GridFunction,
    pub level: f64,
    pub cutoff: &'a GridFunction,
    pub region: Interval,
    pub source: &'a GridFunction,
    pub truncation: Truncation,
}

/// Both sides of the discrete Caccioppoli inequality without its constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaccioppoliTerms {
    pub lhs: f64,
    pub energy: f64,
    pub tail: f64,
    pub source: f64,
    /// `lhs / (energy + tail + source)`, zero when both sides vanish.
    pub ratio: f64,
}

impl CaccioppoliTerms {
    pub fn rhs(&self) -> f64 {
        self.energy + self.tail + self.source
    }
}

pub fn caccioppoli_terms(input: &CaccioppoliInput<'_>, params: &OperatorParams) -> Result<CaccioppoliTerms> {
    let u = input.u;
    for other in [input.cutoff, input.source] {
        if !u.same_grid(other) {
            return Err(Error::GridMismatch);
        }
    }
    let grid = u.grid();
    let h = grid.spacing();
    let in_region: Vec<bool> = grid.nodes().iter().map(|&x| input.region.contains(x)).collect();
    for i in 0..grid.len() {
        let psi = input.cutoff.value(i);
        if !(-1e-12..=1.0 + 1e-12).contains(&psi) {
            return Err(Error::param("cutoff", format!("ψ = {psi} at node {i} is outside [0, 1]")));
        }
        if psi != 0.0 && !in_region[i] {
            return Err(Error::param("cutoff", format!("ψ is nonzero at node {i} outside the region")));
        }
    }
    if grid.nodes_in(input.region).any(|i| !grid.is_interior(i)) {
        return Err(Error::param("region", "the region must lie inside Ω"));
    }
    let w: Vec<f64> = u.values().iter().map(|&v| input.truncation.apply(v, input.level)).collect();
    let w_far = input.truncation.apply(u.exterior().datum(), input.level);
    let psi = input.cutoff.values();
    let region: Vec<usize> = (0..grid.len()).filter(|&i| in_region[i]).collect();
    let support: Vec<usize> = region.iter().copied().filter(|&i| psi[i] != 0.0).collect();
    let p = params.p;
    let weight = |k: usize, ls: f64| h * powf(k as f64 * h, -1.0 - ls);

    let mut lhs = 0.0;
    let mut energy = 0.0;
    for (a, &i) in region.iter().enumerate() {
        for &j in region.get(a + 1..).unwrap_or(&[]) {
            let k = j - i;
            lhs += abs_pow(w[i] * psi[i] - w[j] * psi[j], p) * weight(k, p * params.s1);
            for (l, s) in params.terms() {
                let dpsi = abs_pow(psi[i] - psi[j], l);
                if dpsi != 0.0 {
                    energy += dpsi * (abs_pow(w[i], l) + abs_pow(w[j], l)) * weight(k, l * s);
                }
            }
        }
    }
    // Each unordered pair appears twice in the double integral.
    lhs *= 2.0 * h;
    energy *= 2.0 * h;

    let mass: f64 = region.iter().map(|&i| w[i] * abs_pow(psi[i], p)).sum::<f64>() * h;
    let mut tail = 0.0;
    if mass > 0.0 {
        for (l, s) in params.terms() {
            let mut worst = 0.0f64;
            for &y in &support {
                let mut acc = 0.0;
                for x in 0..grid.len() {
                    if in_region[x] || w[x] == 0.0 {
                        continue;
                    }
                    acc += abs_pow(w[x], l - 1.0) * weight(x.abs_diff(y), l * s);
                }
                if w_far != 0.0 {
                    acc += abs_pow(w_far, l - 1.0) * crate::operators::farfield_weight(grid, y, l, s);
                }
                worst = worst.max(acc);
            }
            tail += worst * mass;
        }
    }
    let source: f64 = grid
        .interior()
        .map(|i| abs(input.source.value(i)) * w[i] * abs_pow(psi[i], p))
        .sum::<f64>()
        * h;
    let rhs = energy + tail + source;
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(CaccioppoliTerms {
        lhs,
        energy,
        tail,
        source,
        ratio,
    })
}

/// The Caccioppoli ratio is finite on both resolutions and grows by at most
/// `1.2×` from the coarse to the fine one.
pub fn verify_caccioppoli(
    coarse: &CaccioppoliInput<'_>,
    fine: &CaccioppoliInput<'_>,
    params: &OperatorParams,
) -> Result<PrincipleVerdict> {
    let c = caccioppoli_terms(coarse, params)?;
    let f = caccioppoli_terms(fine, params)?;
    let growth = if c.ratio == 0.0 && f.ratio == 0.0 {
        1.0
    } else {
        f.ratio / c.ratio
    };
    let details = format!(
        "ratio {:e} (n = {}) and {:e} (n = {})",
        c.ratio,
        coarse.u.grid().n(),
        f.ratio,
        fine.u.grid().n()
    );
    let ok = c.ratio.is_finite() && f.ratio.is_finite() && growth <= 1.2;
    let mut v = PrincipleVerdict::new(
        CACCIOPPOLI,
        if ok { Outcome::Pass } else { Outcome::Fail },
        1.2 - growth,
        details,
    );
    v.refinement_ratio = Some(growth);
    if !ok {
        let grid = fine.u.grid();
        let i = grid.nodes_in(fine.region).next().unwrap_or(grid.interior().start);
        v = v.with_witness(grid, i, vec![c.ratio, f.ratio]);
    }
    Ok(v)
}

/// Data of the singular strong comparison check: `v` solves with source
/// at least `v^{-δ} + g`, `w` with source at most `w^{-δ} + g`.
#[derive(Debug, Clone, Copy)]
pub struct SingularPair<'a> {
    pub v: &'a GridFunction,
    pub w: &'a GridFunction,
    pub g: &'a GridFunction,
    pub delta: f64,
}

/// `inf_K (v - w) > 0` for the compact set `K`, or `v ≡ w`.
///
/// Gates reported as "not applicable": `p, q > 2`; the floor `v ≥ η d^{s1}`
/// (positive Hopf quotient on `{d < band}` and a boundary exponent at most
/// `s1 + 0.1`); the sampled source inequalities within `source_tol`.
pub fn verify_singular_scp(
    pair: &SingularPair<'_>,
    params: &OperatorParams,
    compact: Interval,
    band: f64,
    source_tol: f64,
    tol: f64,
) -> Result<PrincipleVerdict> {
    let (v, w) = (pair.v, pair.w);
    if !v.same_grid(w) || !v.same_grid(pair.g) {
        return Err(Error::GridMismatch);
    }
    let grid = v.grid();
    let na = |why: String| Ok(PrincipleVerdict::new(SINGULAR_SCP, Outcome::NotApplicable, 0.0, why));
    if !(params.p > 2.0 && params.q > 2.0) {
        return na(format!("requires p, q > 2 (p = {}, q = {})", params.p, params.q));
    }
    let eta = hopf_quotient(v, band, params.s1)?;
    if !(eta > tol) {
        return na(format!("no d^s1 floor: min v/d^s1 = {eta:e}"));
    }
    let window = FitWindow::new(4.0 * grid.spacing(), band);
    let fit = fit_boundary_exponent(v, window, FitSide::Both)?;
    if fit.exponent > params.s1 + 0.1 {
        return na(format!(
            "no d^s1 floor: v decays like d^{:.3} at the boundary",
            fit.exponent
        ));
    }
    let (fv, _) = operator_values(v, params)?;
    let (fw, _) = operator_values(w, params)?;
    let start = grid.interior().start;
    for i in grid.interior() {
        let a = i - start;
        let sv = powf(v.value(i), -pair.delta) + pair.g.value(i);
        let sw = powf(w.value(i), -pair.delta) + pair.g.value(i);
        if fv[a] < sv - source_tol * (1.0 + sv) || fw[a] > sw + source_tol * (1.0 + sw) {
            return na(format!("source inequalities fail at x = {}", grid.x(i)));
        }
    }
    let threshold = ((params.p * params.s1 - 1.0) / (params.p - 2.0)).max((params.q * params.s2 - 1.0) / (params.q - 2.0));
    let gap_sup = grid.interior().map(|i| abs(v.value(i) - w.value(i))).fold(0.0, f64::max);
    let details = format!("η = {eta:e}, Hölder threshold {threshold:.3} recorded, not asserted");
    if gap_sup <= tol {
        return Ok(PrincipleVerdict::new(SINGULAR_SCP, Outcome::Pass, tol - gap_sup, details + "; v ≡ w"));
    }
    let mut worst = (usize::MAX, f64::INFINITY);
    for i in grid.nodes_in(compact) {
        let d = v.value(i) - w.value(i);
        if d < worst.1 {
            worst = (i, d);
        }
    }
    if worst.0 == usize::MAX {
        return Err(Error::param("compact", "no node lies in the compact set"));
    }
    let margin = worst.1 - tol;
    let details = details + &format!("; inf_K (v - w) = {:e}", worst.1);
    if margin > 0.0 {
        Ok(PrincipleVerdict::new(SINGULAR_SCP, Outcome::Pass, margin, details))
    } else {
        Ok(PrincipleVerdict::new(SINGULAR_SCP, Outcome::Fail, margin, details)
            .with_witness(grid, worst.0, vec![v.value(worst.0), w.value(worst.0)]))
    }
}
