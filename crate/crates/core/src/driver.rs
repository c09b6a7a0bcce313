//! Runs, convergence studies, profile comparisons and their file outputs.

use crate::boundary::cell_average_with;
use crate::config::{Cut, CutAxis, RunConfig};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::io::write_atomic;
use crate::problems::analysis::{error_norm, shock_position, total_variation, ConvergenceReport, Norm};
use crate::problems::reference::ReferenceProfile;
use crate::problems::riemann_euler::ExactEuler;
use crate::problems::riemann_rhd::ExactRhd;
use crate::problems::{ProblemSpec, ReferenceKind};
use crate::solver::{Pipeline, Solver, StepReport};
use crate::systems::HyperbolicSystem;
use rayon::prelude::*;
use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Quadrature points per axis for exact cell averages.
const EXACT_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct VariableNorm {
    pub name: String,
    pub l1: f64,
    pub l2: f64,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub problem: String,
    pub pipeline: Pipeline,
    pub cells: usize,
    pub steps: u64,
    pub final_time: f64,
    pub wall_time: f64,
    /// Conserved to primitive conversions of the scheme.
    pub conversions: u64,
    /// Conversions for output and error analysis.
    pub diagnostic_conversions: u64,
    /// Predictions per number of Picard sweeps.
    pub picard_histogram: Vec<u64>,
    pub guess_fallbacks: u64,
    pub unconverged: u64,
    pub norms: Vec<VariableNorm>,
    pub outputs: Vec<PathBuf>,
}

impl RunReport {
    pub fn norm(&self, name: &str) -> Option<&VariableNorm> {
        self.norms.iter().find(|n| n.name == name)
    }

    /// Text form without the wall time, so that repeated runs agree.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem = {}", self.problem);
        let _ = writeln!(s, "pipeline = {}", self.pipeline);
        let _ = writeln!(s, "cells = {}", self.cells);
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "final_time = {:.16e}", self.final_time);
        let _ = writeln!(s, "conversions = {}", self.conversions);
        let _ = writeln!(s, "diagnostic_conversions = {}", self.diagnostic_conversions);
        let hist: Vec<String> = self.picard_histogram.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "picard_histogram = {}", hist.join(", "));
        let _ = writeln!(s, "guess_fallbacks = {}", self.guess_fallbacks);
        let _ = writeln!(s, "unconverged = {}", self.unconverged);
        for n in &self.norms {
            let _ = writeln!(s, "error.{} = L1 {:.10e}, L2 {:.10e}", n.name, n.l1, n.l2);
        }
        s
    }
}

/// A configured solver together with its problem.
pub struct Run {
    pub config: RunConfig,
    pub problem: ProblemSpec,
    pub solver: Solver<f64>,
    pub t_final: f64,
}

impl Run {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let problem = config.problem_spec()?;
        let scheme = config.scheme(&problem);
        let (nx, ny) = config.grid_size(&problem);
        let t_final = config.final_time(&problem);
        if !(t_final >= 0.0) {
            return Err(Error::Config(format!("final time {t_final} is negative")));
        }
        let solver = problem.solver(scheme, nx, ny)?;
        Ok(Self {
            config: config.clone(),
            problem,
            solver,
            t_final,
        })
    }

    /// Advances to `t`, honouring the step limit. Returns false once the
    /// limit is reached.
    pub fn advance_to(&mut self, t: f64, mut observer: impl FnMut(&Solver<f64>, &StepReport)) -> Result<bool> {
        let eps = f64::EPSILON * 64.0 * t.abs().max(1.0);
        while self.solver.time() < t - eps {
            if self.config.max_steps.is_some_and(|m| self.solver.steps() as u64 >= m) {
                return Ok(false);
            }
            let rep = self.solver.step(Some(t))?;
            observer(&self.solver, &rep);
        }
        self.solver.set_time(self.solver.time().max(t));
        Ok(true)
    }

    pub fn primitive_names(&self) -> Vec<String> {
        self.solver.sys.primitive_names().iter().map(|s| s.to_string()).collect()
    }

    fn selected(&self, names: &[String]) -> Result<Vec<(usize, String)>> {
        let all = self.primitive_names();
        if self.config.output.variables.is_empty() {
            return Ok(all.into_iter().enumerate().collect());
        }
        self.config
            .output
            .variables
            .iter()
            .map(|v| {
                names
                    .iter()
                    .position(|n| n == v)
                    .map(|k| (k, v.clone()))
                    .ok_or_else(|| Error::Config(format!("unknown variable '{v}' for {}", self.solver.sys.name())))
            })
            .collect()
    }

    /// Primitive values from the cell averages along the cut, or along the
    /// whole line in one dimension.
    pub fn cut(&self, cut: Option<Cut>) -> Result<ReferenceProfile> {
        let prims = self.solver.primitive_averages()?;
        self.cut_of(&prims, cut)
    }

    fn cut_of(&self, prims: &Field<f64>, cut: Option<Cut>) -> Result<ReferenceProfile> {
        let g = &self.solver.grid;
        let vars = self.selected(&self.primitive_names())?;
        let axis = cut.map_or(CutAxis::X, |c| c.axis);
        let nearest = |at: f64, lo: f64, d: f64, n: usize| ((at - lo) / d - 0.5).round().clamp(0.0, n as f64 - 1.0) as isize;
        let mut rows = Vec::new();
        let mut push = |i: isize, j: isize, s: f64| {
            let v = prims.get(i, j);
            let mut r = vec![s];
            r.extend(vars.iter().map(|(k, _)| v[*k]));
            rows.push(r);
        };
        match axis {
            CutAxis::X => {
                let j = match (cut, g.dims) {
                    (Some(c), 2) => nearest(c.at, g.y0, g.dy, g.ny),
                    _ => 0,
                };
                for i in 0..g.nx as isize {
                    push(i, j, g.center(i, j).0);
                }
            }
            CutAxis::Y => {
                if g.dims == 1 {
                    return Err(Error::Config("a cut along y needs a two-dimensional grid".into()));
                }
                let i = nearest(cut.map_or(0.0, |c| c.at), g.x0, g.dx, g.nx);
                for j in 0..g.ny as isize {
                    push(i, j, g.center(i, j).1);
                }
            }
        }
        let mut columns = vec![if axis == CutAxis::X { "x" } else { "y" }.to_string()];
        columns.extend(vars.into_iter().map(|(_, n)| n));
        ReferenceProfile::new(self.solver.sys.name(), self.solver.time(), columns, rows)
    }

    /// Field snapshot: header, then `x y` and the primitive variables of
    /// every cell in row-major order.
    pub fn snapshot_text(&self, prims: &Field<f64>) -> String {
        let g = &self.solver.grid;
        let mut s = String::new();
        let _ = writeln!(s, "# problem: {}", self.problem.id);
        let _ = writeln!(s, "# time: {:.16e}", self.solver.time());
        let _ = writeln!(
            s,
            "# grid: {} {} {} {:.16e} {:.16e} {:.16e} {:.16e}",
            g.dims,
            g.nx,
            g.ny,
            g.x0,
            g.x0 + g.dx * g.nx as f64,
            g.y0,
            g.y0 + g.dy * g.ny as f64
        );
        let _ = writeln!(s, "# columns: x y {}", self.primitive_names().join(" "));
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                let (x, y) = g.center(i, j);
                let _ = write!(s, "{x:.16e} {y:.16e}");
                for v in prims.get(i, j) {
                    let _ = write!(s, " {v:.16e}");
                }
                s.push('\n');
            }
        }
        s
    }

    /// Error norms against the problem reference at the current time.
    pub fn norms(&self) -> Result<Vec<VariableNorm>> {
        let sys = &self.solver.sys;
        let g = &self.solver.grid;
        let nv = sys.nvar();
        let vol = g.dx * g.dy;
        let t = self.solver.time();
        let per_cell = |names: &[&str], num: &dyn Fn(isize, isize, &mut [f64]), exact: &dyn Fn(isize, isize, &mut [f64])| {
            let mut a = vec![Vec::new(); nv];
            let mut b = vec![Vec::new(); nv];
            let (mut u, mut r) = (vec![0.0; nv], vec![0.0; nv]);
            for j in 0..g.ny as isize {
                for i in 0..g.nx as isize {
                    num(i, j, &mut u);
                    exact(i, j, &mut r);
                    for k in 0..nv {
                        a[k].push(u[k]);
                        b[k].push(r[k]);
                    }
                }
            }
            let wanted = &self.config.output.variables;
            names
                .iter()
                .enumerate()
                .filter(|(_, n)| wanted.is_empty() || wanted.iter().any(|w| w == *n))
                .map(|(k, n)| VariableNorm {
                    name: n.to_string(),
                    l1: error_norm(&a[k], &b[k], vol, Norm::L1),
                    l2: error_norm(&a[k], &b[k], vol, Norm::L2),
                })
                .collect::<Vec<_>>()
        };
        match &self.problem.reference {
            ReferenceKind::Analytic(f) => {
                let q = self.solver.conserved();
                Ok(per_cell(
                    sys.conserved_names(),
                    &|i, j, out| out.copy_from_slice(q.get(i, j)),
                    &|i, j, out| {
                        let mut v = vec![0.0; nv];
                        cell_average_with(g, i, j, nv, EXACT_POINTS, out, |x, y, o| {
                            f(x, y, t, &mut v);
                            sys.prim_to_cons(&v, o);
                        })
                    },
                ))
            }
            ReferenceKind::ExactRiemann(f) => {
                let prims = self.solver.primitive_averages()?;
                Ok(per_cell(
                    sys.primitive_names(),
                    &|i, j, out| out.copy_from_slice(prims.get(i, j)),
                    &|i, j, out| cell_average_with(g, i, j, nv, EXACT_POINTS, out, |x, y, o| f(x, y, t, o)),
                ))
            }
            ReferenceKind::File(path) => {
                if !path.exists() {
                    return Ok(Vec::new());
                }
                let reference = ReferenceProfile::load(path)?;
                if (reference.time - t).abs() > 1e-9 * t.max(1.0) || g.dims != 1 {
                    return Ok(Vec::new());
                }
                let prims = self.solver.primitive_averages()?;
                let wanted = &self.config.output.variables;
                let mut out = Vec::new();
                for (k, name) in sys.primitive_names().iter().enumerate() {
                    let Some(col) = reference.column(name) else { continue };
                    if !wanted.is_empty() && !wanted.iter().any(|w| w == name) {
                        continue;
                    }
                    let a: Vec<f64> = (0..g.nx as isize).map(|i| prims.get(i, 0)[k]).collect();
                    let b: Vec<f64> = (0..g.nx as isize).map(|i| reference.interpolate(col, g.center(i, 0).0)).collect();
                    out.push(VariableNorm {
                        name: name.to_string(),
                        l1: error_norm(&a, &b, vol, Norm::L1),
                        l2: error_norm(&a, &b, vol, Norm::L2),
                    });
                }
                Ok(out)
            }
            ReferenceKind::None => Ok(Vec::new()),
        }
    }

    fn write_outputs(&self, dir: &Path, index: usize, outputs: &mut Vec<PathBuf>) -> Result<()> {
        let prims = self.solver.primitive_averages()?;
        let snap = dir.join(format!("snapshot_{index:04}.dat"));
        write_atomic(&snap, self.snapshot_text(&prims).as_bytes())?;
        outputs.push(snap);
        let mut cuts: Vec<Option<Cut>> = self.config.output.cuts.iter().copied().map(Some).collect();
        if self.solver.grid.dims == 1 && cuts.is_empty() {
            cuts.push(None);
        }
        for cut in cuts {
            let name = match cut {
                Some(c) => format!("cut_{index:04}_{c}.dat"),
                None => format!("profile_{index:04}.dat"),
            };
            let path = dir.join(name);
            self.cut_of(&prims, cut)?.save(&path)?;
            outputs.push(path);
        }
        Ok(())
    }
}

/// Executes a run, writing the declared outputs, and returns its report
/// together with the final state.
pub fn execute(config: &RunConfig) -> Result<(RunReport, Run)> {
    let start = Instant::now();
    let mut run = Run::new(config)?;
    let dir = config.output.dir.clone();
    let mut outputs = Vec::new();
    if let Some(d) = &dir {
        let path = d.join("config.ini");
        write_atomic(&path, config.to_text().as_bytes())?;
        outputs.push(path);
    }
    let mut times: Vec<f64> = config
        .output
        .snapshots
        .iter()
        .copied()
        .filter(|&t| t >= 0.0 && t < run.t_final)
        .collect();
    times.sort_by(f64::total_cmp);
    times.push(run.t_final);
    let mut index = 0;
    for t in times {
        let more = run.advance_to(t, |_, _| {})?;
        if let Some(d) = &dir {
            run.write_outputs(d, index, &mut outputs)?;
            index += 1;
        }
        if !more {
            break;
        }
    }
    let norms = run.norms()?;
    let s = &run.solver;
    let steps = s.steps() as u64;
    let cells = s.grid.ncells();
    if s.scheme.pipeline == Pipeline::Primitive {
        assert_eq!(
            s.counter.solver_count(),
            steps * cells as u64,
            "primitive pipeline must convert exactly once per cell and step"
        );
    }
    let report = RunReport {
        problem: run.problem.id.clone(),
        pipeline: s.scheme.pipeline,
        cells,
        steps,
        final_time: s.time(),
        wall_time: start.elapsed().as_secs_f64(),
        conversions: s.counter.solver_count(),
        diagnostic_conversions: s.counter.diagnostic_count(),
        picard_histogram: s.picard_histogram().to_vec(),
        guess_fallbacks: s.guess_fallbacks(),
        unconverged: s.unconverged_predictions(),
        norms,
        outputs,
    };
    if let Some(d) = &dir {
        let path = d.join("report.txt");
        write_atomic(&path, report.to_text().as_bytes())?;
    }
    Ok((report, run))
}

/// Error of `variable` on each grid of the sequence. Grid members run in
/// parallel.
pub fn convergence(template: &RunConfig, grids: &[usize]) -> Result<ConvergenceReport> {
    let problem = template.problem_spec()?;
    let variable = template
        .output
        .error_variable
        .clone()
        .unwrap_or_else(|| problem.error_variable.to_string());
    let errors: Vec<(usize, f64, f64)> = grids
        .par_iter()
        .map(|&n| {
            let mut cfg = template.clone();
            cfg.nx = Some(n);
            cfg.ny = None;
            cfg.output.dir = None;
            cfg.output.snapshots.clear();
            cfg.output.variables = vec![variable.clone()];
            let (report, _) = execute(&cfg)?;
            let e = report
                .norm(&variable)
                .ok_or_else(|| Error::Config(format!("no reference error for '{variable}' in {}", cfg.problem)))?;
            Ok((n, e.l1, e.l2))
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceReport::from_errors(&errors))
}

pub fn write_convergence(report: &ConvergenceReport, dir: &Path) -> Result<()> {
    write_atomic(&dir.join("convergence.txt"), report.to_text().as_bytes())?;
    write_atomic(&dir.join("convergence.csv"), report.to_csv().as_bytes())?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub variable: String,
    pub run: String,
    pub l1_reference: Option<f64>,
    pub total_variation: f64,
    pub shock_position: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// L1 distance between the two runs per variable.
    pub distances: Vec<(String, f64)>,
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.10e}"));
        let mut s = String::from("variable,run,l1_reference,total_variation,shock_position\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{:.10e},{}",
                r.variable,
                r.run,
                opt(r.l1_reference),
                r.total_variation,
                opt(r.shock_position)
            );
        }
        for (v, d) in &self.distances {
            let _ = writeln!(s, "{v},a-b,{d:.10e},,");
        }
        s
    }

    pub fn row(&self, variable: &str, run: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.variable == variable && r.run == run)
    }
}

/// L1 distance of column `col` of `p` to column `rcol` of `r`, sampled at
/// the coordinates of `p` with the mean spacing as weight.
pub fn profile_distance(p: &ReferenceProfile, col: usize, r: &ReferenceProfile, rcol: usize) -> f64 {
    let x = p.x();
    let h = if x.len() > 1 {
        (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64
    } else {
        1.0
    };
    let a = p.values(col);
    let b: Vec<f64> = x.iter().map(|&xi| r.interpolate(rcol, xi)).collect();
    error_norm(&a, &b, h, Norm::L1)
}

/// Compares two profiles with each other and with an optional reference
/// for the named variables, or all shared ones when `variables` is empty.
pub fn compare(
    a: &ReferenceProfile,
    b: &ReferenceProfile,
    reference: Option<&ReferenceProfile>,
    variables: &[String],
) -> Result<Comparison> {
    let names: Vec<String> = if variables.is_empty() {
        a.columns[1..].iter().filter(|c| b.column(c).is_some()).cloned().collect()
    } else {
        variables.to_vec()
    };
    let mut rows = Vec::new();
    let mut distances = Vec::new();
    for name in &names {
        let missing = |which: &str| Error::Config(format!("variable '{name}' missing from {which}"));
        let ca = a.column(name).ok_or_else(|| missing("the first profile"))?;
        let cb = b.column(name).ok_or_else(|| missing("the second profile"))?;
        let rc = match reference {
            Some(r) => Some(r.column(name).ok_or_else(|| missing("the reference"))?),
            None => None,
        };
        for (label, p, c) in [("a", a, ca), ("b", b, cb)] {
            let v = p.values(c);
            rows.push(ComparisonRow {
                variable: name.clone(),
                run: label.into(),
                l1_reference: reference.zip(rc).map(|(r, rc)| profile_distance(p, c, r, rc)),
                total_variation: total_variation(&v),
                shock_position: shock_position(&p.x(), &v, None),
            });
        }
        distances.push((name.clone(), profile_distance(a, ca, b, cb)));
    }
    Ok(Comparison { rows, distances })
}

/// Exact solution of a Riemann problem sampled at `n` cell centres on
/// `[range.0, range.1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactRiemannRequest {
    /// `euler` or `rhd`.
    pub system: String,
    /// `(rho, u, p)` on either side.
    pub left: [f64; 3],
    pub right: [f64; 3],
    pub gamma: f64,
    pub x0: f64,
    pub range: (f64, f64),
    pub time: f64,
    pub cells: usize,
}

pub fn exact_riemann_profile(req: &ExactRiemannRequest) -> Result<ReferenceProfile> {
    if req.cells == 0 || !(req.range.1 > req.range.0) {
        return Err(Error::Config("sampling needs at least one cell on a non-empty range".into()));
    }
    let sample: Box<dyn Fn(f64) -> [f64; 3]> = match req.system.as_str() {
        "euler" => {
            let rp = ExactEuler::new(req.left, req.right, req.gamma)?;
            Box::new(move |xi| rp.sample(xi))
        }
        "rhd" => {
            let rp = ExactRhd::new(req.left, req.right, req.gamma)?;
            Box::new(move |xi| rp.sample(xi))
        }
        other => return Err(Error::Config(format!("no exact Riemann solver for '{other}'"))),
    };
    let h = (req.range.1 - req.range.0) / req.cells as f64;
    let rows = (0..req.cells)
        .map(|k| {
            let x = req.range.0 + (k as f64 + 0.5) * h;
            let s = if req.time > 0.0 {
                sample((x - req.x0) / req.time)
            } else if x < req.x0 {
                req.left
            } else {
                req.right
            };
            vec![x, s[0], s[1], s[2]]
        })
        .collect();
    let columns = ["x", "rho", "vx", "p"].iter().map(|s| s.to_string()).collect();
    ReferenceProfile::new(&req.system, req.time, columns, rows)
}

/// Exact profile of a registered problem with an exact Riemann solution.
pub fn exact_problem_profile(problem: &ProblemSpec, time: f64, cells: usize) -> Result<ReferenceProfile> {
    let ReferenceKind::ExactRiemann(f) = &problem.reference else {
        return Err(Error::Config(format!("problem '{}' has no exact Riemann solution", problem.id)));
    };
    let sys = problem.system::<f64>();
    let names = sys.primitive_names();
    let h = (problem.x[1] - problem.x[0]) / cells as f64;
    let mut v = vec![0.0; sys.nvar()];
    let rows = (0..cells)
        .map(|k| {
            let x = problem.x[0] + (k as f64 + 0.5) * h;
            f(x, 0.0, time, &mut v);
            let mut r = vec![x];
            r.extend_from_slice(&v);
            r
        })
        .collect();
    let mut columns = vec!["x".to_string()];
    columns.extend(names.iter().map(|s| s.to_string()));
    ReferenceProfile::new(sys.name(), time, columns, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(problem: &str, nx: usize) -> RunConfig {
        let mut c = RunConfig::new(problem);
        c.nx = Some(nx);
        c.degree = Some(2);
        c
    }

    #[test]
    fn uniform_run_is_steady_and_counted() {
        let mut c = small("uniform", 20);
        c.max_steps = Some(10);
        c.t_final = Some(10.0);
        let (rep, run) = execute(&c).unwrap();
        assert_eq!(rep.steps, 10);
        assert_eq!(rep.conversions, 10 * 20);
        for n in &rep.norms {
            assert!(n.l1 < 1e-13, "{} {}", n.name, n.l1);
        }
        let p = run.cut(None).unwrap();
        assert!(p.values(1).iter().all(|&r| (r - 1.0).abs() < 1e-13));
    }

    #[test]
    fn outputs_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small("sod", 50);
        c.t_final = Some(0.05);
        c.output.snapshots = vec![0.02];
        let read = |d: &Path| {
            let mut names: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).collect();
            names.sort();
            names.iter().map(|p| std::fs::read(p).unwrap()).collect::<Vec<_>>()
        };
        c.output.dir = Some(dir.path().join("a"));
        let (rep, _) = execute(&c).unwrap();
        assert!(rep.outputs.iter().any(|p| p.ends_with("snapshot_0001.dat")));
        c.output.dir = Some(dir.path().join("b"));
        execute(&c).unwrap();
        let a = read(&dir.path().join("a"));
        let b = read(&dir.path().join("b"));
        assert_eq!(a.len(), b.len());
        // config.ini differs in the output directory only.
        assert_eq!(a[1..], b[1..]);
        let profile = ReferenceProfile::load(&dir.path().join("a/profile_0001.dat")).unwrap();
        assert_eq!(profile.len(), 50);
        assert!((profile.time - 0.05).abs() < 1e-15);
    }

    #[test]
    fn snapshot_layout() {
        let mut c = small("vortex", 8);
        c.max_steps = Some(0);
        let run = Run::new(&c).unwrap();
        let prims = run.solver.primitive_averages().unwrap();
        let text = run.snapshot_text(&prims);
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 64);
        let first: Vec<f64> = data[0].split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(first.len(), 7);
        assert!((first[0] - 0.625).abs() < 1e-15 && (first[1] - 0.625).abs() < 1e-15);
        let second: Vec<f64> = data[1].split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert!((second[0] - 1.875).abs() < 1e-15);
    }

    #[test]
    fn cuts_pick_the_nearest_row() {
        let mut c = small("vortex", 10);
        c.output.variables = vec!["rho".into()];
        let run = Run::new(&c).unwrap();
        let cut = run.cut(Some(Cut { axis: CutAxis::X, at: 5.2 })).unwrap();
        assert_eq!(cut.columns, vec!["x", "rho"]);
        assert_eq!(cut.len(), 10);
        let col = run.cut(Some(Cut { axis: CutAxis::Y, at: 0.1 })).unwrap();
        assert_eq!(col.columns[0], "y");
        let prims = run.solver.primitive_averages().unwrap();
        assert_eq!(cut.rows[3][1], prims.get(3, 5)[0]);
        assert_eq!(col.rows[3][1], prims.get(0, 3)[0]);
    }

    #[test]
    fn identical_profiles_compare_equal() {
        let rows: Vec<Vec<f64>> = (0..20).map(|k| vec![k as f64, if k < 10 { 1.0 } else { 0.1 }]).collect();
        let p = ReferenceProfile::new("euler", 0.1, vec!["x".into(), "rho".into()], rows).unwrap();
        let c = compare(&p, &p, Some(&p), &[]).unwrap();
        assert_eq!(c.distances, vec![("rho".to_string(), 0.0)]);
        let a = c.row("rho", "a").unwrap();
        assert_eq!(a.l1_reference, Some(0.0));
        assert_eq!(a.shock_position, Some(9.5));
        assert!(c.to_csv().lines().count() == 4);
    }

    #[test]
    fn exact_profiles_of_sod() {
        let req = ExactRiemannRequest {
            system: "euler".into(),
            left: [1.0, 0.0, 1.0],
            right: [0.125, 0.0, 0.1],
            gamma: 1.4,
            x0: 0.5,
            range: (0.0, 1.0),
            time: 0.2,
            cells: 100,
        };
        let a = exact_riemann_profile(&req).unwrap();
        let p = crate::problems::problem("sod", &Default::default()).unwrap();
        let b = exact_problem_profile(&p, 0.2, 100).unwrap();
        for k in 0..100 {
            assert!((a.rows[k][1] - b.rows[k][1]).abs() < 1e-14);
        }
        assert!(exact_problem_profile(&crate::problems::problem("vortex", &Default::default()).unwrap(), 0.1, 10).is_err());
    }
}
