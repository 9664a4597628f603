//! Run configuration documents.
//!
//! A config is a TOML document:
//!
//! ```toml
//! case = "ND"            # or "DN"
//! p = 4.5
//! n_max = 80
//! method = "inverse"     # approx | inverse | truncated | oracle | all
//! initial = "default"    # "ones", or { file = "start.txt" }
//! output_format = "csv"  # csv | tsv | pretty
//!
//! [mu]
//! expr = "20^k"
//!
//! [nu]
//! values = [20.0, 400.0]  # one entry per active index
//!
//! [stop]
//! sig_digits = 6
//! rel_tol = 5e-7
//! max_iter = 100000
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::{Table, Value};

use crate::chain::{active_indices, BoundaryCase, GridFn, Problem};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::operator::default_initial;
use crate::stop::StopRule;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Values(Vec<f64>),
    Expr(String),
}

impl WeightSpec {
    /// Evaluates the weights over grid indices `indices`.
    pub fn evaluate(&self, key: &str, indices: std::ops::RangeInclusive<usize>) -> Result<Vec<f64>> {
        let out = match self {
            WeightSpec::Values(v) => {
                let expected = indices.clone().count();
                if v.len() != expected {
                    return Err(Error::Config(format!(
                        "`{key}.values`: expected {expected} entries, found {}",
                        v.len()
                    )));
                }
                v.clone()
            }
            WeightSpec::Expr(src) => {
                let e = Expr::parse(src).map_err(|err| Error::Config(format!("`{key}.expr`: {err}")))?;
                indices.clone().map(|k| e.eval(k as f64)).collect()
            }
        };
        for (k, w) in indices.zip(&out) {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::Config(format!(
                    "`{key}`: weight at k = {k} is {w}; weights must be positive and finite"
                )));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Approx,
    Inverse,
    Truncated,
    Oracle,
    All,
}

impl Method {
    pub const NAMES: [&'static str; 5] = ["approx", "inverse", "truncated", "oracle", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Method::Approx => "approx",
            Method::Inverse => "inverse",
            Method::Truncated => "truncated",
            Method::Oracle => "oracle",
            Method::All => "all",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "approx" => Ok(Method::Approx),
            "inverse" => Ok(Method::Inverse),
            "truncated" => Ok(Method::Truncated),
            "oracle" => Ok(Method::Oracle),
            "all" => Ok(Method::All),
            _ => Err(format!("invalid value {s:?} (expected one of {})", Method::NAMES.join(", "))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Tsv,
    Pretty,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Tsv => "tsv",
            OutputFormat::Pretty => "pretty",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "tsv" => Ok(OutputFormat::Tsv),
            "pretty" => Ok(OutputFormat::Pretty),
            _ => Err(format!("invalid value {s:?} (expected one of csv, tsv, pretty)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Default,
    Ones,
    /// Whitespace-separated values, one per active index.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: BoundaryCase,
    pub p: f64,
    pub n_max: usize,
    pub mu: WeightSpec,
    pub nu: WeightSpec,
    pub method: Method,
    pub initial: InitialSpec,
    pub stop: StopRule,
    pub output_format: OutputFormat,
    /// Steps of the truncated-family bounds for `method = "truncated"`.
    pub truncated_steps: usize,
}

pub const DEFAULT_TRUNCATED_STEPS: usize = 5;

impl RunConfig {
    pub fn problem(&self) -> Result<Problem> {
        let indices = active_indices(self.case, self.n_max)
            .map_err(|_| Error::Config("`n_max`: the DN case needs n_max >= 1".into()))?;
        let mu = self.mu.evaluate("mu", indices.clone())?;
        let nu = self.nu.evaluate("nu", indices)?;
        Problem::new(self.case, self.p, mu, nu)
    }

    /// The starting function; relative file paths resolve against `base_dir`.
    pub fn initial_fn(&self, problem: &Problem, base_dir: &Path) -> Result<GridFn> {
        let f = match &self.initial {
            InitialSpec::Default => default_initial(problem),
            InitialSpec::Ones => problem.ones(),
            InitialSpec::File(path) => {
                let full = if path.is_relative() { base_dir.join(path) } else { path.clone() };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Io(format!("{}: {e}", full.display())))?;
                let values = text
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::Config(format!("`initial.file`: cannot parse {t:?} as a number")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if values.len() != problem.len() {
                    return Err(Error::Config(format!(
                        "`initial.file`: expected {} values, found {}",
                        problem.len(),
                        values.len()
                    )));
                }
                GridFn::new(values)?
            }
        };
        f.ensure_positive()?;
        Ok(f)
    }

    /// Canonical TOML text; `parse_config` reads it back to an equal value.
    pub fn to_toml_string(&self) -> String {
        let mut t = Table::new();
        t.insert("case".into(), Value::String(self.case.to_string()));
        t.insert("p".into(), Value::Float(self.p));
        t.insert("n_max".into(), Value::Integer(self.n_max as i64));
        t.insert("method".into(), Value::String(self.method.name().into()));
        t.insert(
            "initial".into(),
            match &self.initial {
                InitialSpec::Default => Value::String("default".into()),
                InitialSpec::Ones => Value::String("ones".into()),
                InitialSpec::File(p) => {
                    let mut f = Table::new();
                    f.insert("file".into(), Value::String(p.to_string_lossy().into_owned()));
                    Value::Table(f)
                }
            },
        );
        t.insert("output_format".into(), Value::String(self.output_format.name().into()));
        t.insert("truncated_steps".into(), Value::Integer(self.truncated_steps as i64));
        t.insert("mu".into(), weight_table(&self.mu));
        t.insert("nu".into(), weight_table(&self.nu));
        let mut stop = Table::new();
        stop.insert("sig_digits".into(), Value::Integer(self.stop.sig_digits as i64));
        stop.insert("rel_tol".into(), Value::Float(self.stop.rel_tol));
        stop.insert("max_iter".into(), Value::Integer(self.stop.max_iter as i64));
        stop.insert("residual_tol".into(), Value::Float(self.stop.residual_tol));
        t.insert("stop".into(), Value::Table(stop));
        toml::to_string(&t).expect("a plain table always serializes")
    }
}

fn weight_table(w: &WeightSpec) -> Value {
    let mut t = Table::new();
    match w {
        WeightSpec::Values(v) => {
            t.insert("values".into(), Value::Array(v.iter().map(|x| Value::Float(*x)).collect()));
        }
        WeightSpec::Expr(e) => {
            t.insert("expr".into(), Value::String(e.clone()));
        }
    }
    Value::Table(t)
}

/// Parses and validates a config document, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let mut keys = Keys::new(&doc, "");
    let case = match keys.opt_str("case")? {
        None | Some("ND") => BoundaryCase::ND,
        Some("DN") => BoundaryCase::DN,
        Some(other) => return Err(cfg("case", format!("invalid value {other:?} (expected ND or DN)"))),
    };
    let p = keys.req_f64("p")?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(cfg("p", format!("p must exceed 1 (got {p})")));
    }
    let n_max = keys.req_usize("n_max")?;
    let mu = keys.weight("mu")?;
    let nu = keys.weight("nu")?;
    let method = match keys.opt_str("method")? {
        None => Method::All,
        Some(s) => s.parse().map_err(|m| cfg("method", m))?,
    };
    let output_format = match keys.opt_str("output_format")? {
        None => OutputFormat::Csv,
        Some(s) => s.parse().map_err(|m| cfg("output_format", m))?,
    };
    let initial = match doc.get("initial") {
        None => InitialSpec::Default,
        Some(Value::String(s)) if s == "default" => InitialSpec::Default,
        Some(Value::String(s)) if s == "ones" => InitialSpec::Ones,
        Some(Value::String(s)) => {
            return Err(cfg(
                "initial",
                format!("invalid value {s:?} (expected \"default\", \"ones\" or {{ file = \"...\" }})"),
            ))
        }
        Some(Value::Table(t)) => {
            let mut sub = Keys::new(t, "initial");
            let path = sub.req_str("file")?.to_owned();
            sub.finish()?;
            InitialSpec::File(PathBuf::from(path))
        }
        Some(v) => return Err(cfg("initial", format!("expected a string or table, found {}", v.type_str()))),
    };
    keys.seen("initial");
    let truncated_steps = keys.opt_usize("truncated_steps")?.unwrap_or(DEFAULT_TRUNCATED_STEPS);
    if truncated_steps < 1 {
        return Err(cfg("truncated_steps", "must be at least 1"));
    }
    let mut stop = StopRule::default();
    if let Some(v) = doc.get("stop") {
        let t = v
            .as_table()
            .ok_or_else(|| cfg("stop", format!("expected a table, found {}", v.type_str())))?;
        let mut sub = Keys::new(t, "stop");
        if let Some(d) = sub.opt_usize("sig_digits")? {
            stop.sig_digits = u32::try_from(d).map_err(|_| cfg("stop.sig_digits", "out of range"))?;
        }
        if let Some(r) = sub.opt_f64("rel_tol")? {
            stop.rel_tol = r;
        }
        if let Some(m) = sub.opt_usize("max_iter")? {
            stop.max_iter = m;
        }
        if let Some(r) = sub.opt_f64("residual_tol")? {
            stop.residual_tol = r;
        }
        sub.finish()?;
        stop.validate().map_err(|e| cfg("stop", e.to_string()))?;
    }
    keys.seen("stop");
    keys.finish()?;

    let config = RunConfig {
        case,
        p,
        n_max,
        mu,
        nu,
        method,
        initial,
        stop,
        output_format,
        truncated_steps,
    };
    config.problem()?;
    Ok(config)
}

fn cfg(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{path}`: {msg}"))
}

/// Typed access to one table, remembering which keys were consumed.
struct Keys<'a> {
    table: &'a Table,
    prefix: &'a str,
    used: Vec<&'a str>,
}

impl<'a> Keys<'a> {
    fn new(table: &'a Table, prefix: &'a str) -> Self {
        Keys {
            table,
            prefix,
            used: Vec::new(),
        }
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_owned()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn seen(&mut self, key: &'a str) {
        self.used.push(key);
    }

    fn get(&mut self, key: &'a str) -> Option<&'a Value> {
        self.used.push(key);
        self.table.get(key)
    }

    fn missing(&self, key: &str) -> Error {
        Error::Config(format!("missing required key `{}`", self.path(key)))
    }

    fn mismatch(&self, key: &str, want: &str, v: &Value) -> Error {
        cfg(&self.path(key), format!("expected {want}, found {}", v.type_str()))
    }

    fn opt_str(&mut self, key: &'a str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(self.mismatch(key, "a string", v)),
        }
    }

    fn req_str(&mut self, key: &'a str) -> Result<&'a str> {
        self.opt_str(key)?.ok_or_else(|| self.missing(key))
    }

    fn opt_f64(&mut self, key: &'a str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(self.mismatch(key, "a number", v)),
        }
    }

    fn req_f64(&mut self, key: &'a str) -> Result<f64> {
        self.opt_f64(key)?.ok_or_else(|| self.missing(key))
    }

    fn opt_usize(&mut self, key: &'a str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(v) => Err(self.mismatch(key, "a nonnegative integer", v)),
        }
    }

    fn req_usize(&mut self, key: &'a str) -> Result<usize> {
        self.opt_usize(key)?.ok_or_else(|| self.missing(key))
    }

    fn weight(&mut self, key: &'a str) -> Result<WeightSpec> {
        let t = match self.get(key) {
            None => return Err(self.missing(key)),
            Some(Value::Table(t)) => t,
            Some(v) => return Err(self.mismatch(key, "a table with `expr` or `values`", v)),
        };
        let path = self.path(key);
        let spec = match (t.get("expr"), t.get("values")) {
            (Some(_), Some(_)) => return Err(cfg(&path, "give exactly one of `expr` and `values`")),
            (None, None) => return Err(Error::Config(format!("missing required key `{path}.expr` or `{path}.values`"))),
            (Some(Value::String(s)), None) => WeightSpec::Expr(s.clone()),
            (Some(v), None) => return Err(cfg(&format!("{path}.expr"), format!("expected a string, found {}", v.type_str()))),
            (None, Some(Value::Array(a))) => WeightSpec::Values(
                a.iter()
                    .enumerate()
                    .map(|(i, v)| match v {
                        Value::Float(x) => Ok(*x),
                        Value::Integer(n) => Ok(*n as f64),
                        other => Err(cfg(&format!("{path}.values[{i}]"), format!("expected a number, found {}", other.type_str()))),
                    })
                    .collect::<Result<_>>()?,
            ),
            (None, Some(v)) => return Err(cfg(&format!("{path}.values"), format!("expected an array, found {}", v.type_str()))),
        };
        if let Some(extra) = t.keys().find(|k| *k != "expr" && *k != "values") {
            return Err(Error::Config(format!("unknown key `{path}.{extra}`")));
        }
        Ok(spec)
    }

    fn finish(&self) -> Result<()> {
        match self.table.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("unknown key `{}`", self.path(k)))),
            None => Ok(()),
        }
    }
}
