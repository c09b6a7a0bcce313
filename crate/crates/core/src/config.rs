//! Run configuration in a flat `key = value` format with `[section]` headers.
//!
//! Grammar, one item per line:
//!
//! ```text
//! line    = blank | comment | section | entry
//! comment = "#" any*
//! section = "[" name "]"
//! entry   = key "=" value
//! ```
//!
//! Lists are comma separated. Keys may also be written as `section.key`
//! outside any section, which is the form accepted by `--set`.

use crate::error::{Error, Result};
use crate::fluxes::FluxKind;
use crate::predictor::GuessKind;
use crate::problems::{self, PhysicsOverrides, ProblemSpec};
use crate::solver::{Pipeline, SchemeConfig, VelocityVariable};
use std::fmt::Write;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutAxis {
    /// Row of cells at fixed `y`, varying `x`.
    X,
    /// Column of cells at fixed `x`, varying `y`.
    Y,
}

/// One-dimensional cut through the nearest row or column of cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut {
    pub axis: CutAxis,
    /// Transverse coordinate.
    pub at: f64,
}

impl FromStr for Cut {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (k, v) = s
            .split_once('@')
            .ok_or_else(|| Error::Config(format!("cut '{s}' is not of the form x@<y> or y@<x>")))?;
        let axis = match k.trim() {
            "x" => CutAxis::X,
            "y" => CutAxis::Y,
            other => return Err(Error::Config(format!("unknown cut axis '{other}'"))),
        };
        Ok(Self {
            axis,
            at: parse_value("cut", v)?,
        })
    }
}

impl std::fmt::Display for Cut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = match self.axis {
            CutAxis::X => "x",
            CutAxis::Y => "y",
        };
        write!(f, "{a}@{}", self.at)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputPlan {
    pub dir: Option<PathBuf>,
    /// Times of field snapshots; the final time is always written.
    pub snapshots: Vec<f64>,
    pub cuts: Vec<Cut>,
    /// Primitive variables written to cuts and compared; empty means all.
    pub variables: Vec<String>,
    /// Variable of error norms in convergence studies.
    pub error_variable: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub physics: PhysicsOverrides,
    pub periodic: bool,
    pub degree: Option<usize>,
    pub pipeline: Pipeline,
    pub flux: Option<FluxKind>,
    pub guess: Option<GuessKind>,
    pub velocity: Option<VelocityVariable>,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub picard_iterations: Option<usize>,
    pub picard_tolerance: Option<f64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub t_final: Option<f64>,
    pub max_steps: Option<u64>,
    pub seed: u64,
    pub output: OutputPlan,
}

impl RunConfig {
    pub fn new(problem: &str) -> Self {
        Self {
            problem: problem.to_string(),
            physics: PhysicsOverrides::default(),
            periodic: false,
            degree: None,
            pipeline: Pipeline::Primitive,
            flux: None,
            guess: None,
            velocity: None,
            cfl: None,
            dt: None,
            picard_iterations: None,
            picard_tolerance: None,
            nx: None,
            ny: None,
            t_final: None,
            max_steps: None,
            seed: 0,
            output: OutputPlan {
                dir: None,
                snapshots: Vec::new(),
                cuts: Vec::new(),
                variables: Vec::new(),
                error_variable: None,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg: Option<Self> = None;
        let mut pending = Vec::new();
        let mut section = String::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                section = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse {
                        line: k + 1,
                        message: format!("unterminated section header '{line}'"),
                    })?
                    .trim()
                    .to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: k + 1,
                message: format!("expected key = value, found '{line}'"),
            })?;
            let key = key.trim();
            let full = if section.is_empty() || key.contains('.') {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if full == "problem.id" {
                cfg = Some(Self::new(value.trim()));
            } else {
                pending.push((k + 1, full, value.trim().to_string()));
            }
        }
        let mut cfg = cfg.ok_or_else(|| Error::Parse {
            line: 0,
            message: "missing problem.id".into(),
        })?;
        for (line, key, value) in pending {
            cfg.set(&key, &value).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies `section.key = value`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "problem.id" => self.problem = value.to_string(),
            "problem.periodic" => self.periodic = parse_value(key, value)?,
            "physics.gamma" => self.physics.gamma = parse_opt(key, opt(value))?,
            "physics.kappa" => self.physics.kappa = parse_opt(key, opt(value))?,
            "physics.friction" => self.physics.friction = parse_opt(key, opt(value))?,
            "physics.relaxation" => self.physics.relaxation = parse_opt(key, opt(value))?,
            "scheme.degree" => self.degree = parse_opt(key, opt(value))?,
            "scheme.pipeline" => self.pipeline = value.parse()?,
            "scheme.flux" => self.flux = opt(value).map(str::parse).transpose()?,
            "scheme.guess" => self.guess = opt(value).map(str::parse).transpose()?,
            "scheme.velocity" => self.velocity = opt(value).map(str::parse).transpose()?,
            "scheme.cfl" => self.cfl = parse_opt(key, opt(value))?,
            "scheme.dt" => self.dt = parse_opt(key, opt(value))?,
            "scheme.picard_iterations" => self.picard_iterations = parse_opt(key, opt(value))?,
            "scheme.picard_tolerance" => self.picard_tolerance = parse_opt(key, opt(value))?,
            "grid.nx" => self.nx = parse_opt(key, opt(value))?,
            "grid.ny" => self.ny = parse_opt(key, opt(value))?,
            "run.t_final" => self.t_final = parse_opt(key, opt(value))?,
            "run.max_steps" => self.max_steps = parse_opt(key, opt(value))?,
            "run.seed" => self.seed = parse_value(key, value)?,
            "output.dir" => self.output.dir = opt(value).map(PathBuf::from),
            "output.snapshots" => self.output.snapshots = parse_list(key, value)?,
            "output.cuts" => self.output.cuts = split_list(value).map(str::parse).collect::<Result<_>>()?,
            "output.variables" => self.output.variables = split_list(value).map(String::from).collect(),
            "output.error_variable" => self.output.error_variable = opt(value).map(String::from),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                let _ = writeln!(s, "{key} = {v}");
            }
        };
        let join = |v: Vec<String>| Some(v.join(", "));
        put("[problem]\nid", Some(self.problem.clone()));
        put("periodic", Some(self.periodic.to_string()));
        put("\n[physics]\ngamma", Some(show(self.physics.gamma)));
        put("kappa", Some(show(self.physics.kappa)));
        put("friction", Some(show(self.physics.friction)));
        put("relaxation", Some(show(self.physics.relaxation)));
        put("\n[scheme]\ndegree", Some(show(self.degree)));
        put("pipeline", Some(self.pipeline.to_string()));
        put("flux", Some(show(self.flux)));
        put("guess", Some(show(self.guess)));
        put("velocity", Some(show(self.velocity)));
        put("cfl", Some(show(self.cfl)));
        put("dt", Some(show(self.dt)));
        put("picard_iterations", Some(show(self.picard_iterations)));
        put("picard_tolerance", Some(show(self.picard_tolerance)));
        put("\n[grid]\nnx", Some(show(self.nx)));
        put("ny", Some(show(self.ny)));
        put("\n[run]\nt_final", Some(show(self.t_final)));
        put("max_steps", Some(show(self.max_steps)));
        put("seed", Some(self.seed.to_string()));
        put(
            "\n[output]\ndir",
            Some(show(self.output.dir.as_ref().map(|p| p.display().to_string()))),
        );
        put("snapshots", join(self.output.snapshots.iter().map(f64::to_string).collect()));
        put("cuts", join(self.output.cuts.iter().map(Cut::to_string).collect()));
        put("variables", join(self.output.variables.clone()));
        put("error_variable", Some(show(self.output.error_variable.clone())));
        s
    }

    /// Problem with physical overrides and the periodic variant applied.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let mut p = problems::problem(&self.problem, &self.physics)?;
        if self.periodic {
            p = p.with_boundaries(crate::boundary::BoundarySet::uniform(crate::boundary::Boundary::Periodic));
            p.reference = problems::ReferenceKind::None;
        }
        Ok(p)
    }

    pub fn scheme(&self, problem: &ProblemSpec) -> SchemeConfig<f64> {
        let d = problem.defaults;
        let degree = self.degree.unwrap_or(d.degree);
        let mut s = SchemeConfig::new(degree);
        s.pipeline = self.pipeline;
        s.flux = self.flux.unwrap_or(d.flux);
        s.guess = self.guess.unwrap_or(d.guess);
        s.velocity = self.velocity.unwrap_or(d.velocity);
        s.cfl = self.cfl.unwrap_or(d.cfl);
        s.fixed_dt = self.dt;
        if let Some(n) = self.picard_iterations {
            s.picard.max_iterations = n;
        }
        if let Some(t) = self.picard_tolerance {
            s.picard.tolerance = t;
        }
        s
    }

    pub fn grid_size(&self, problem: &ProblemSpec) -> (usize, usize) {
        let nx = self.nx.unwrap_or(problem.nx);
        let ny = if problem.dims == 1 {
            1
        } else {
            self.ny.unwrap_or_else(|| {
                if self.nx.is_some() {
                    (nx * problem.ny).div_ceil(problem.nx)
                } else {
                    problem.ny
                }
            })
        };
        (nx, ny)
    }

    pub fn final_time(&self, problem: &ProblemSpec) -> f64 {
        self.t_final.unwrap_or(problem.t_final)
    }
}

fn opt(v: &str) -> Option<&str> {
    if v.is_empty() || v == "auto" {
        None
    } else {
        Some(v)
    }
}

fn show<V: std::fmt::Display>(v: Option<V>) -> String {
    v.map_or_else(|| "auto".to_string(), |v| v.to_string())
}

fn parse_value<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for {key}")))
}

fn parse_opt<V: FromStr>(key: &str, value: Option<&str>) -> Result<Option<V>> {
    value.map(|v| parse_value(key, v)).transpose()
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_list<V: FromStr>(key: &str, value: &str) -> Result<Vec<V>> {
    split_list(value).map(|v| parse_value(key, v)).collect()
}
