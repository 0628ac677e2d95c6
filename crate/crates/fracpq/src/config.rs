//! Experiment configuration: a flat set of dotted keys read from TOML.
//!
//! ```toml
//! out_dir = "out/regular"
//! seed = 7
//!
//! [experiment]
//! kind = "solve"
//!
//! [domain]
//! a = 0.0
//! b = 0.1
//!
//! [grid]
//! n = 2048
//!
//! [operator]
//! p = 2.0
//! q = 2.0
//! s1 = 0.75
//! s2 = 0.35
//!
//! [rhs]
//! kind = "constant"
//! value = 1.0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fracpq_core::{
    geometric_schedule, BarrierSpec, FitSide, FitWindow, Grid, OperatorParams, SingularParams,
    SolverOptions, WeightKind,
};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Type {
    Float,
    Int,
    Str,
    Floats,
    Pairs,
}

const KEYS: &[(&str, Type)] = &[
    ("barrier.alpha", Type::Float),
    ("barrier.band", Type::Float),
    ("barrier.kappa", Type::Float),
    ("barrier.rho", Type::Float),
    ("domain.a", Type::Float),
    ("domain.b", Type::Float),
    ("experiment.kind", Type::Str),
    ("fit.d_hi", Type::Float),
    ("fit.d_lo", Type::Float),
    ("fit.side", Type::Str),
    ("grid.halo", Type::Float),
    ("grid.n", Type::Int),
    ("operator.p", Type::Float),
    ("operator.q", Type::Float),
    ("operator.s1", Type::Float),
    ("operator.s2", Type::Float),
    ("out_dir", Type::Str),
    ("principles.k1", Type::Float),
    ("principles.k_bound", Type::Float),
    ("principles.pairs", Type::Int),
    ("principles.tol", Type::Float),
    ("quad.pair_order", Type::Str),
    ("quad.tolerance", Type::Float),
    ("rhs.kind", Type::Str),
    ("rhs.table", Type::Pairs),
    ("rhs.value", Type::Float),
    ("seed", Type::Int),
    ("singular.delta", Type::Float),
    ("singular.eps", Type::Float),
    ("singular.eps0", Type::Float),
    ("singular.eps_factor", Type::Float),
    ("singular.eps_min", Type::Float),
    ("singular.gamma", Type::Float),
    ("singular.weight", Type::Str),
    ("singular.weight_scale", Type::Float),
    ("solver.max_iter", Type::Int),
    ("solver.outer_max_iter", Type::Int),
    ("solver.tol", Type::Float),
    ("sweep.key", Type::Str),
    ("sweep.kind", Type::Str),
    ("sweep.values", Type::Floats),
];

/// Keys left out of the config hash: they place output, not results.
const UNHASHED: &[&str] = &["out_dir"];

fn key_type(key: &str) -> Option<Type> {
    KEYS.iter().find(|(k, _)| *k == key).map(|(_, t)| *t)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Str(String),
    Floats(Vec<f64>),
    Pairs(Vec<(f64, f64)>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Floats(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            Value::Pairs(v) => {
                let parts: Vec<String> = v.iter().map(|(x, y)| format!("[{x:?}, {y:?}]")).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

fn as_float(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::config(key, format!("expected a number, got {v}"))),
    }
}

fn convert(key: &str, ty: Type, v: &toml::Value) -> Result<Value> {
    Ok(match ty {
        Type::Float => Value::Float(as_float(key, v)?),
        Type::Int => match v {
            toml::Value::Integer(i) => Value::Int(*i),
            _ => return Err(Error::config(key, format!("expected an integer, got {v}"))),
        },
        Type::Str => match v {
            toml::Value::String(s) => Value::Str(s.clone()),
            _ => return Err(Error::config(key, format!("expected a string, got {v}"))),
        },
        Type::Floats => match v {
            toml::Value::Array(items) => {
                Value::Floats(items.iter().map(|x| as_float(key, x)).collect::<Result<_>>()?)
            }
            _ => return Err(Error::config(key, format!("expected an array of numbers, got {v}"))),
        },
        Type::Pairs => match v {
            toml::Value::Array(items) => Value::Pairs(
                items
                    .iter()
                    .map(|item| match item.as_array().map(|a| a.as_slice()) {
                        Some([x, y]) => Ok((as_float(key, x)?, as_float(key, y)?)),
                        _ => Err(Error::config(key, "expected [x, value] pairs")),
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(Error::config(key, format!("expected an array of pairs, got {v}"))),
        },
    })
}

/// Parses a command-line or sweep value for `key`.
fn parse_scalar(key: &str, ty: Type, text: &str) -> Result<Value> {
    let bad = || Error::config(key, format!("cannot parse `{text}`"));
    Ok(match ty {
        Type::Float => Value::Float(text.trim().parse().map_err(|_| bad())?),
        Type::Int => Value::Int(text.trim().parse().map_err(|_| bad())?),
        Type::Str => Value::Str(text.to_string()),
        Type::Floats | Type::Pairs => return Err(Error::config(key, "not a scalar key")),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Solve,
    Singular,
    Barrier,
    Principles,
    Exponent,
    Sweep,
}

impl ExperimentKind {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "solve" => ExperimentKind::Solve,
            "singular" => ExperimentKind::Singular,
            "barrier" => ExperimentKind::Barrier,
            "principles" => ExperimentKind::Principles,
            "exponent" => ExperimentKind::Exponent,
            "sweep" => ExperimentKind::Sweep,
            other => return Err(Error::config("experiment.kind", format!("unknown kind `{other}`"))),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Singular => "singular",
            ExperimentKind::Barrier => "barrier",
            ExperimentKind::Principles => "principles",
            ExperimentKind::Exponent => "exponent",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

/// Raw configuration: validated key names and value types, nothing more.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let mut entries = BTreeMap::new();
        for (name, value) in &table {
            match value {
                toml::Value::Table(inner) => {
                    for (sub, v) in inner {
                        let key = format!("{name}.{sub}");
                        insert(&mut entries, &key, v)?;
                    }
                }
                v => insert(&mut entries, name, v)?,
            }
        }
        Ok(ExperimentConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn set(&mut self, key: &str, value: Value) -> Result<()> {
        let ty = key_type(key).ok_or_else(|| Error::config(key, "unknown key"))?;
        let ok = matches!(
            (ty, &value),
            (Type::Float, Value::Float(_))
                | (Type::Int, Value::Int(_))
                | (Type::Str, Value::Str(_))
                | (Type::Floats, Value::Floats(_))
                | (Type::Pairs, Value::Pairs(_))
        );
        let value = match (ty, value) {
            (Type::Float, Value::Int(i)) => Value::Float(i as f64),
            (_, v) if ok => v,
            (_, v) => return Err(Error::config(key, format!("wrong value type {v}"))),
        };
        self.entries.insert(key.to_string(), value);
        Ok(())
    }

    /// Sets a scalar key from its textual form.
    pub fn set_text(&mut self, key: &str, text: &str) -> Result<()> {
        let ty = key_type(key).ok_or_else(|| Error::config(key, "unknown key"))?;
        let value = parse_scalar(key, ty, text)?;
        self.set(key, value)
    }

    /// Sets a numeric scalar key (integers are accepted for integer keys).
    pub fn set_number(&mut self, key: &str, x: f64) -> Result<()> {
        match key_type(key) {
            Some(Type::Int) if x.fract() == 0.0 => self.set(key, Value::Int(x as i64)),
            Some(Type::Float) => self.set(key, Value::Float(x)),
            Some(_) => Err(Error::config(key, format!("cannot take the number {x}"))),
            None => Err(Error::config(key, "unknown key")),
        }
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.remove(key);
    }

    /// Sorted `key = value` lines of every hashed entry.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            if UNHASHED.contains(&k.as_str()) {
                continue;
            }
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    /// Hex SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn float(&self, key: &str) -> Option<f64> {
        match self.entries.get(key) {
            Some(Value::Float(x)) => Some(*x),
            _ => None,
        }
    }

    fn require_float(&self, key: &str) -> Result<f64> {
        self.float(key).ok_or_else(|| Error::config(key, "missing"))
    }

    fn int(&self, key: &str) -> Option<i64> {
        match self.entries.get(key) {
            Some(Value::Int(i)) => Some(*i),
            _ => None,
        }
    }

    fn str(&self, key: &str) -> Option<&str> {
        match self.entries.get(key) {
            Some(Value::Str(s)) => Some(s),
            _ => None,
        }
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        ExperimentKind::parse(self.str("experiment.kind").ok_or_else(|| Error::config("experiment.kind", "missing"))?)
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.str("out_dir").unwrap_or("out"))
    }

    pub fn seed(&self) -> u64 {
        self.int("seed").unwrap_or(0) as u64
    }

    /// Checks every key against the preconditions of the computation it
    /// feeds and returns the typed settings.
    pub fn resolve(&self) -> Result<Settings> {
        let kind = self.kind()?;
        let a = self.require_float("domain.a")?;
        let b = self.require_float("domain.b")?;
        let n = self.int("grid.n").ok_or_else(|| Error::config("grid.n", "missing"))?;
        if n <= 0 {
            return Err(Error::config("grid.n", format!("need a positive node count, got {n}")));
        }
        let halo = self.float("grid.halo").unwrap_or(b - a);
        let grid = Arc::new(Grid::new(a, b, n as usize, halo).map_err(Error::keyed)?);
        let params = OperatorParams::new(
            self.require_float("operator.p")?,
            self.require_float("operator.q")?,
            self.require_float("operator.s1")?,
            self.require_float("operator.s2")?,
        )
        .map_err(|e| match e {
            fracpq_core::Error::InvalidParameter { reason, .. } => Error::config("operator", reason),
            other => Error::Core(other),
        })?;

        if let Some(order) = self.str("quad.pair_order") {
            if order != "ascending" {
                return Err(Error::config("quad.pair_order", "only `ascending` is supported"));
            }
        }
        if let Some(t) = self.float("quad.tolerance") {
            if !(t >= 0.0) {
                return Err(Error::config("quad.tolerance", "need a nonnegative tolerance"));
            }
        }

        let mut solver = SolverOptions::default();
        if let Some(tol) = self.float("solver.tol") {
            if !(tol > 0.0) {
                return Err(Error::config("solver.tol", format!("need tol > 0, got {tol}")));
            }
            solver.tol = Some(tol);
        }
        for (key, slot) in [
            ("solver.max_iter", &mut solver.max_iter),
            ("solver.outer_max_iter", &mut solver.outer_max_iter),
        ] {
            if let Some(v) = self.int(key) {
                if v <= 0 {
                    return Err(Error::config(key, format!("need a positive count, got {v}")));
                }
                *slot = v as usize;
            }
        }

        let rhs = self.rhs()?;
        let singular = self.singular(&params)?;
        let needs_singular = match kind {
            ExperimentKind::Singular => true,
            ExperimentKind::Exponent => matches!(rhs, Rhs::Singular(_)),
            _ => false,
        };
        if needs_singular && singular.is_none() {
            return Err(Error::config("singular.gamma", "the singular problem needs singular.gamma and singular.delta"));
        }
        if matches!(rhs, Rhs::Singular(_)) && matches!(kind, ExperimentKind::Solve) {
            return Err(Error::config("rhs.kind", "`singular` sources need experiment kind singular or exponent"));
        }

        let barrier = self.barrier(&grid, &params, kind)?;

        let d_lo = self.float("fit.d_lo");
        let d_hi = self.float("fit.d_hi");
        let default_window = FitWindow::default_for(&grid);
        let window = FitWindow::new(d_lo.unwrap_or(default_window.d_lo), d_hi.unwrap_or(default_window.d_hi));
        window.validate(&grid).map_err(|e| match e {
            fracpq_core::Error::InvalidParameter { reason, .. } => Error::config("fit.d_lo", reason),
            other => Error::Core(other),
        })?;
        let side = match self.str("fit.side").unwrap_or("both") {
            "left" => FitSide::Left,
            "right" => FitSide::Right,
            "both" => FitSide::Both,
            other => return Err(Error::config("fit.side", format!("unknown side `{other}`"))),
        };

        let principles = PrincipleSettings {
            pairs: match self.int("principles.pairs") {
                Some(p) if p > 0 => p as usize,
                Some(p) => return Err(Error::config("principles.pairs", format!("need a positive count, got {p}"))),
                None => 20,
            },
            tol: positive(self, "principles.tol", 1e-8)?,
            k_bound: self.float("principles.k_bound"),
            k1: positive(self, "principles.k1", 1e6)?,
        };

        let sweep = if kind == ExperimentKind::Sweep {
            let key = self.str("sweep.key").ok_or_else(|| Error::config("sweep.key", "missing"))?;
            match key_type(key) {
                Some(Type::Float) | Some(Type::Int) => {}
                Some(_) => return Err(Error::config("sweep.key", format!("`{key}` is not a numeric scalar key"))),
                None => return Err(Error::config("sweep.key", format!("unknown key `{key}`"))),
            }
            let values = match self.entries.get("sweep.values") {
                Some(Value::Floats(v)) if !v.is_empty() => v.clone(),
                Some(Value::Floats(_)) => return Err(Error::config("sweep.values", "empty values list")),
                _ => return Err(Error::config("sweep.values", "missing")),
            };
            let sub_kind = ExperimentKind::parse(self.str("sweep.kind").unwrap_or("solve"))
                .map_err(|e| match e {
                    Error::Config { reason, .. } => Error::config("sweep.kind", reason),
                    other => other,
                })?;
            if sub_kind == ExperimentKind::Sweep {
                return Err(Error::config("sweep.kind", "sweeps do not nest"));
            }
            // Every sub-run must be valid before any runs.
            for &v in &values {
                let mut sub = self.clone();
                sub.set_number(key, v)?;
                sub.set("experiment.kind", Value::Str(sub_kind.as_str().into()))?;
                sub.resolve()?;
            }
            Some(SweepSpec {
                key: key.to_string(),
                values,
                kind: sub_kind,
            })
        } else {
            None
        };

        Ok(Settings {
            kind,
            grid,
            params,
            rhs,
            solver,
            singular,
            barrier,
            window,
            side,
            principles,
            sweep,
            seed: self.seed(),
            out_dir: self.out_dir(),
            hash: self.hash(),
            config: self.clone(),
        })
    }

    fn rhs(&self) -> Result<Rhs> {
        let value = self.float("rhs.value");
        Ok(match self.str("rhs.kind").unwrap_or("constant") {
            "constant" => Rhs::Constant(value.unwrap_or(1.0)),
            "expression-table" => {
                let table = match self.entries.get("rhs.table") {
                    Some(Value::Pairs(t)) if t.len() >= 2 => t.clone(),
                    _ => return Err(Error::config("rhs.table", "need at least two [x, value] pairs")),
                };
                if table.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(Error::config("rhs.table", "x values must increase strictly"));
                }
                Rhs::Table(table)
            }
            "singular" => {
                let g = value.unwrap_or(0.0);
                if !(g >= 0.0) {
                    return Err(Error::config("rhs.value", "the background source must be nonnegative"));
                }
                Rhs::Singular(g)
            }
            other => return Err(Error::config("rhs.kind", format!("unknown kind `{other}`"))),
        })
    }

    fn singular(&self, params: &OperatorParams) -> Result<Option<SingularSetup>> {
        let (Some(gamma), Some(delta)) = (self.float("singular.gamma"), self.float("singular.delta")) else {
            return Ok(None);
        };
        let weight = match self.str("singular.weight").unwrap_or("distance") {
            "distance" => WeightKind::PureDistance,
            "scaled" => WeightKind::Scaled(self.float("singular.weight_scale").unwrap_or(1.0)),
            other => return Err(Error::config("singular.weight", format!("unknown weight `{other}`"))),
        };
        let sp = SingularParams::new(gamma, delta, weight);
        sp.validate(params).map_err(Error::keyed)?;
        let schedule = match self.float("singular.eps") {
            Some(eps) if eps > 0.0 && eps.is_finite() => vec![eps],
            Some(eps) => return Err(Error::config("singular.eps", format!("need ε > 0, got {eps}"))),
            None => geometric_schedule(
                self.float("singular.eps0").unwrap_or(1.0),
                self.float("singular.eps_factor").unwrap_or(0.5),
                self.float("singular.eps_min").unwrap_or(1e-3),
            )
            .map_err(Error::keyed)?,
        };
        Ok(Some(SingularSetup { params: sp, schedule }))
    }

    fn barrier(&self, grid: &Grid, params: &OperatorParams, kind: ExperimentKind) -> Result<Option<BarrierSetup>> {
        let alpha = self.float("barrier.alpha");
        if alpha.is_none() && kind == ExperimentKind::Barrier {
            return Err(Error::config("barrier.alpha", "missing"));
        }
        let Some(alpha) = alpha else { return Ok(None) };
        let kappa = self.float("barrier.kappa").unwrap_or(0.0);
        let rho = self.float("barrier.rho").unwrap_or_else(|| grid.default_band());
        let spec = BarrierSpec::new(alpha, kappa, rho);
        spec.validate(grid).map_err(Error::keyed)?;
        if alpha >= params.s1 || alpha >= 1.0 {
            return Err(Error::config("barrier.alpha", format!("need α < s1 = {}, got {alpha}", params.s1)));
        }
        let band = self.float("barrier.band").unwrap_or(rho);
        if !(band > 0.0 && band < 0.5 * (grid.b() - grid.a())) {
            return Err(Error::config("barrier.band", format!("need 0 < band < (b - a)/2, got {band}")));
        }
        if rho > grid.halo() {
            return Err(Error::config("barrier.rho", "the barrier band must lie inside the halo"));
        }
        Ok(Some(BarrierSetup { spec, band }))
    }
}

fn insert(entries: &mut BTreeMap<String, Value>, key: &str, v: &toml::Value) -> Result<()> {
    let ty = key_type(key).ok_or_else(|| Error::config(key, "unknown key"))?;
    entries.insert(key.to_string(), convert(key, ty, v)?);
    Ok(())
}

fn positive(cfg: &ExperimentConfig, key: &str, default: f64) -> Result<f64> {
    match cfg.float(key) {
        Some(v) if v > 0.0 && v.is_finite() => Ok(v),
        Some(v) => Err(Error::config(key, format!("need a positive value, got {v}"))),
        None => Ok(default),
    }
}

/// Right-hand side of the regular problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    Constant(f64),
    /// Piecewise-linear interpolation of `(x, f)` pairs, constant beyond the ends.
    Table(Vec<(f64, f64)>),
    /// Singular source `K_{γ,ε} (v + ε)^{-δ}` plus a constant background.
    Singular(f64),
}

impl Rhs {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            Rhs::Constant(c) | Rhs::Singular(c) => *c,
            Rhs::Table(t) => {
                let (first, last) = (t[0], t[t.len() - 1]);
                if x <= first.0 {
                    return first.1;
                }
                if x >= last.0 {
                    return last.1;
                }
                let k = t.partition_point(|p| p.0 <= x);
                let (x0, y0) = t[k - 1];
                let (x1, y1) = t[k];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularSetup {
    pub params: SingularParams,
    pub schedule: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSetup {
    pub spec: BarrierSpec,
    pub band: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipleSettings {
    pub pairs: usize,
    pub tol: f64,
    /// Bound on the sampled sources for strong comparison; defaults from the data.
    pub k_bound: Option<f64>,
    pub k1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub key: String,
    pub values: Vec<f64>,
    pub kind: ExperimentKind,
}

/// Validated, typed view of an [`ExperimentConfig`].
#[derive(Debug, Clone)]
pub struct Settings {
    pub kind: ExperimentKind,
    pub grid: Arc<Grid>,
    pub params: OperatorParams,
    pub rhs: Rhs,
    pub solver: SolverOptions,
    pub singular: Option<SingularSetup>,
    pub barrier: Option<BarrierSetup>,
    pub window: FitWindow,
    pub side: FitSide,
    pub principles: PrincipleSettings,
    pub sweep: Option<SweepSpec>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub hash: String,
    pub config: ExperimentConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        out_dir = "out/x"
        [experiment]
        kind = "solve"
        [domain]
        a = 0
        b = 1.0
        [grid]
        n = 64
        [operator]
        p = 2.0
        q = 2.0
        s1 = 0.75
        s2 = 0.35
    "#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
        let s = cfg.resolve().unwrap();
        assert_eq!(s.kind, ExperimentKind::Solve);
        assert_eq!(s.grid.n(), 64);
        assert_eq!(s.rhs, Rhs::Constant(1.0));
        assert_eq!(cfg.get("domain.a"), Some(&Value::Float(0.0)));
    }

    #[test]
    fn hash_is_canonical() {
        let a = ExperimentConfig::from_toml_str(BASE).unwrap();
        let reordered = BASE.replace("p = 2.0\n        q = 2.0", "q = 2\n        p = 2");
        let b = ExperimentConfig::from_toml_str(&reordered).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let mut c = a.clone();
        c.set_text("out_dir", "elsewhere").unwrap();
        assert_eq!(a.hash(), c.hash());
        c.set_text("grid.n", "65").unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            ("n = 64", "n = 4", "grid.n"),
            ("s1 = 0.75", "s1 = 0.2", "operator"),
            ("kind = \"solve\"", "kind = \"fly\"", "experiment.kind"),
            ("n = 64", "n = 64\n        colour = 3", "grid.colour"),
            ("n = 64", "n = 6.5", "grid.n"),
        ];
        for (from, to, key) in cases {
            let text = BASE.replace(from, to);
            let err = ExperimentConfig::from_toml_str(&text).and_then(|c| c.resolve().map(|_| ()));
            match err {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{to}"),
                other => panic!("{to}: {other:?}"),
            }
        }
    }

    #[test]
    fn sweep_validation() {
        let text = BASE.replace("kind = \"solve\"", "kind = \"sweep\"")
            + "[sweep]\nkey = \"rhs.value\"\nvalues = []\nkind = \"solve\"\n";
        let err = ExperimentConfig::from_toml_str(&text).unwrap().resolve().unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "sweep.values"));
        let text = text.replace("values = []", "values = [1, 2]");
        let s = ExperimentConfig::from_toml_str(&text).unwrap().resolve().unwrap();
        assert_eq!(s.sweep.unwrap().values, vec![1.0, 2.0]);
        let bad = text.replace("rhs.value", "fit.side");
        assert!(ExperimentConfig::from_toml_str(&bad).unwrap().resolve().is_err());
    }

    #[test]
    fn table_rhs_interpolates() {
        let rhs = Rhs::Table(vec![(0.0, 0.0), (1.0, 2.0)]);
        assert_eq!(rhs.at(-1.0), 0.0);
        assert_eq!(rhs.at(0.25), 0.5);
        assert_eq!(rhs.at(3.0), 2.0);
    }
}
