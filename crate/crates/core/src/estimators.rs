//! Empirical regularity measurements on grid functions.

use alloc::format;

use crate::error::{Error, Result};
use crate::geometry::{Grid, GridFunction, Interval};
use crate::math::{abs, abs_pow, ln, powf};

/// Fewest nodes accepted by [`fit_boundary_exponent`].
pub const MIN_FIT_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitSide {
    Left,
    Right,
    Both,
}

impl FitSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitSide::Left => "left",
            FitSide::Right => "right",
            FitSide::Both => "both",
        }
    }
}

/// Distance range `[d_lo, d_hi]` of a boundary fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub d_lo: f64,
    pub d_hi: f64,
}

impl FitWindow {
    pub fn new(d_lo: f64, d_hi: f64) -> Self {
        FitWindow { d_lo, d_hi }
    }

    /// `[4h, 0.1 (b - a)]`.
    pub fn default_for(grid: &Grid) -> Self {
        FitWindow {
            d_lo: 4.0 * grid.spacing(),
            d_hi: 0.1 * (grid.b() - grid.a()),
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let h = grid.spacing();
        let slack = 1e-9 * h;
        if !(self.d_lo >= 2.0 * h - slack) {
            return Err(Error::param("fit.window", format!("need d_lo ≥ 2h = {}", 2.0 * h)));
        }
        if !(self.d_hi <= 0.25 * (grid.b() - grid.a()) + slack) {
            return Err(Error::param("fit.window", "need d_hi ≤ (b - a)/4"));
        }
        if !(self.d_lo < self.d_hi) {
            return Err(Error::param("fit.window", "need d_lo < d_hi"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: FitWindow,
    pub side: FitSide,
    pub sample_count: usize,
}

/// Least-squares slope of `log u` against `log d` over the window nodes.
pub fn fit_boundary_exponent(u: &GridFunction, window: FitWindow, side: FitSide) -> Result<ExponentFit> {
    let grid = u.grid();
    window.validate(grid)?;
    let mid = 0.5 * (grid.a() + grid.b());
    let (mut n, mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0usize, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in grid.nodes_with_distance(window.d_lo, window.d_hi) {
        let x = grid.x(i);
        let keep = match side {
            FitSide::Left => x < mid,
            FitSide::Right => x > mid,
            FitSide::Both => true,
        };
        if !keep {
            continue;
        }
        let v = u.value(i);
        if !(v > 0.0) {
            return Err(Error::NonPositive { index: i, value: v });
        }
        let lx = ln(grid.distance(x));
        let ly = ln(v);
        n += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    if n < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            found: n,
            required: MIN_FIT_SAMPLES,
        });
    }
    let nf = n as f64;
    let cxx = sxx - sx * sx / nf;
    let cxy = sxy - sx * sy / nf;
    let cyy = syy - sy * sy / nf;
    let exponent = cxy / cxx;
    let intercept = (sy - exponent * sx) / nf;
    let r_squared = if cyy > 0.0 {
        ((cxy * cxy) / (cxx * cyy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ExponentFit {
        exponent,
        intercept,
        r_squared,
        window,
        side,
        sample_count: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderEstimate {
    pub sigma: f64,
    pub quotient_sup: f64,
    pub region: Interval,
}

/// `max |u(x) - u(y)| / |x - y|^σ` over node pairs in `region` at least `2h` apart.
pub fn holder_quotient(u: &GridFunction, sigma: f64, region: Interval) -> Result<HolderEstimate> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::param("sigma", format!("need 0 < σ ≤ 1, got {sigma}")));
    }
    let grid = u.grid();
    let h = grid.spacing();
    let idx: alloc::vec::Vec<usize> = grid.nodes_in(region).collect();
    let values = u.values();
    let mut best = 0.0f64;
    for (a, &i) in idx.iter().enumerate() {
        for &j in idx.get(a + 2..).unwrap_or(&[]) {
            let dx = grid.x(j) - grid.x(i);
            if dx < 2.0 * h * (1.0 - 1e-9) {
                continue;
            }
            best = best.max(abs(values[j] - values[i]) / powf(dx, sigma));
        }
    }
    Ok(HolderEstimate {
        sigma,
        quotient_sup: best,
        region,
    })
}

/// `min u/d^{s1}` over interior nodes with `d < rho`.
pub fn hopf_quotient(u: &GridFunction, rho: f64, s1: f64) -> Result<f64> {
    let grid = u.grid();
    let h = grid.spacing();
    if !(rho > 2.0 * h && rho < 0.25 * (grid.b() - grid.a()) * (1.0 + 1e-12)) {
        return Err(Error::param("rho", format!("need 2h < ρ < (b - a)/4, got {rho}")));
    }
    let mut min = f64::INFINITY;
    for i in grid.interior() {
        let d = grid.distance(grid.x(i));
        if d < rho {
            min = min.min(u.value(i) / powf(d, s1));
        }
    }
    if min.is_infinite() {
        return Err(Error::TooFewSamples { found: 0, required: 1 });
    }
    Ok(min)
}

/// `(h Σ |u(x+2t) - 2u(x+t) + u(x)|^m / t^{βm})^{1/m}` over nodes `x` in `region`,
/// with step `t = h_step`.
pub fn second_diff_quotient(u: &GridFunction, h_step: f64, beta: f64, m: f64, region: Interval) -> Result<f64> {
    let grid = u.grid();
    if !(beta > 0.0 && beta < 2.0 + 1e-12) {
        return Err(Error::param("beta", format!("need 0 < β ≤ 2, got {beta}")));
    }
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::param("m", format!("need m ≥ 1, got {m}")));
    }
    let k = grid
        .spacing_multiple(h_step)
        .ok_or_else(|| Error::param("h_step", "step must be a positive multiple of the grid spacing"))?;
    let values = u.values();
    let scale = powf(h_step, beta);
    let mut acc = 0.0;
    for i in grid.nodes_in(region) {
        if i + 2 * k >= values.len() {
            return Err(Error::param("region", "region plus two steps leaves the meshed box"));
        }
        let d2 = values[i + 2 * k] - 2.0 * values[i + k] + values[i];
        acc += abs_pow(d2 / scale, m);
    }
    Ok(powf(grid.spacing() * acc, 1.0 / m))
}
