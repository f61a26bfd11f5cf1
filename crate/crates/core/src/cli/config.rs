//! Run configuration: `key = value` files merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::calculus::{BuiltinLagrangian, Point, ScalarField};
use crate::dsl::DslField;
use crate::error::{Error, Result};
use crate::flow::{IntegratorConfig, Method};
use crate::structure::{ChartDim, StructureKind};

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "n",
    "structure",
    "lagrangian.builtin",
    "lagrangian.expr",
    "x0",
    "method",
    "dt",
    "t_end",
    "abs_tol",
    "rel_tol",
    "dt_min",
    "dt_max",
    "out",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LagrangianSource {
    Builtin(String),
    Expr(String),
}

impl LagrangianSource {
    pub fn build(&self, dim: ChartDim) -> Result<Box<dyn ScalarField>> {
        match self {
            LagrangianSource::Builtin(spec) => {
                let b: BuiltinLagrangian = spec.parse()?;
                Ok(Box::new(b.into_field(dim)?))
            }
            LagrangianSource::Expr(src) => Ok(Box::new(DslField::parse(src, dim)?)),
        }
    }

    /// Expression text, for caret rendering of errors.
    pub fn expr_source(&self) -> Option<&str> {
        match self {
            LagrangianSource::Expr(s) => Some(s),
            LagrangianSource::Builtin(_) => None,
        }
    }
}

/// Settings as read from one source, before defaults are applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub n: Option<usize>,
    pub structure: Option<StructureKind>,
    pub builtin: Option<String>,
    pub expr: Option<String>,
    pub x0: Option<Vec<f64>>,
    pub method: Option<Method>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub dt_min: Option<f64>,
    pub dt_max: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse '{value}'")))
}

pub fn parse_vector(value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|t| parse_number::<f64>("x0", t.trim())).collect()
}

impl PartialConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PartialConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidArgument(format!(
                    "config line {}: expected 'key = value'",
                    lineno + 1
                )));
            };
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidArgument(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = Some(parse_number(key, value)?),
            "structure" => self.structure = Some(value.parse()?),
            "lagrangian.builtin" => self.builtin = Some(value.to_string()),
            "lagrangian.expr" => self.expr = Some(value.to_string()),
            "x0" => self.x0 = Some(parse_vector(value)?),
            "method" => self.method = Some(value.parse()?),
            "dt" => self.dt = Some(parse_number(key, value)?),
            "t_end" => self.t_end = Some(parse_number(key, value)?),
            "abs_tol" => self.abs_tol = Some(parse_number(key, value)?),
            "rel_tol" => self.rel_tol = Some(parse_number(key, value)?),
            "dt_min" => self.dt_min = Some(parse_number(key, value)?),
            "dt_max" => self.dt_max = Some(parse_number(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = Some(parse_number(key, value)?),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown key '{key}' (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    fn lagrangian(&self) -> Result<Option<LagrangianSource>> {
        match (&self.builtin, &self.expr) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "give either a builtin or an expression Lagrangian, not both".into(),
            )),
            (Some(b), None) => Ok(Some(LagrangianSource::Builtin(b.clone()))),
            (None, Some(e)) => Ok(Some(LagrangianSource::Expr(e.clone()))),
            (None, None) => Ok(None),
        }
    }
}

/// Fully resolved settings, echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub structure: StructureKind,
    pub lagrangian: LagrangianSource,
    pub x0: Vec<f64>,
    pub integrator: IntegratorConfig,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    /// Applies `flags` over `file` over the defaults. A Lagrangian given on
    /// the command line replaces the file's regardless of kind.
    pub fn resolve(file: &PartialConfig, flags: &PartialConfig) -> Result<Self> {
        let n = flags.n.or(file.n).unwrap_or(1);
        let dim = ChartDim::new(n)?;
        let lagrangian = match flags.lagrangian()? {
            Some(l) => l,
            None => file
                .lagrangian()?
                .unwrap_or_else(|| LagrangianSource::Builtin("free_quadratic".into())),
        };
        let x0 = match flags.x0.clone().or_else(|| file.x0.clone()) {
            Some(v) => v,
            None => {
                let mut v = vec![0.0; dim.total()];
                v[0] = 1.0;
                v
            }
        };
        if x0.len() != dim.total() {
            return Err(Error::InvalidArgument(format!(
                "x0 has {} entries, expected 4n = {}",
                x0.len(),
                dim.total()
            )));
        }
        let d = IntegratorConfig::default();
        let pick = |f: Option<f64>, c: Option<f64>, default: f64| f.or(c).unwrap_or(default);
        let integrator = IntegratorConfig {
            method: flags.method.or(file.method).unwrap_or(d.method),
            dt: pick(flags.dt, file.dt, d.dt),
            t_end: pick(flags.t_end, file.t_end, d.t_end),
            abs_tol: pick(flags.abs_tol, file.abs_tol, d.abs_tol),
            rel_tol: pick(flags.rel_tol, file.rel_tol, d.rel_tol),
            dt_min: pick(flags.dt_min, file.dt_min, d.dt_min),
            dt_max: pick(flags.dt_max, file.dt_max, d.dt_max),
        };
        integrator.validate()?;
        Ok(RunConfig {
            n,
            structure: flags.structure.or(file.structure).unwrap_or(StructureKind::F),
            lagrangian,
            x0,
            integrator,
            out: flags.out.clone().or_else(|| file.out.clone()),
            seed: flags.seed.or(file.seed).unwrap_or(0),
        })
    }

    pub fn dim(&self) -> ChartDim {
        ChartDim::new(self.n).expect("validated in resolve")
    }

    pub fn point(&self) -> Result<Point> {
        Point::from_slice(&self.x0)
    }
}
