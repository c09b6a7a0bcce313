//! One-step finite-volume update driven by the local space-time predictor.

use crate::basis::{NodalBasis, PredictorOperators};
use crate::boundary::{Boundary, BoundarySet, Side, Variables};
use crate::counter::ConversionCounter;
use crate::error::{Error, Result};
use crate::fluxes::{validate_flux, FluxEvaluator, FluxKind};
use crate::grid::{Field, Grid, Region};
use crate::linalg::SmallMatrix;
use crate::predictor::{
    differentiate_axis, CellPredictor, GuessKind, InitialGuess, PicardSettings, PredictorVariables,
    PredictorWorkspace, StepGeometry,
};
use crate::real::Real;
use crate::systems::{zero_state, Axis, HyperbolicSystem, SystemSpec};
use crate::weno::{DataKind, WenoOperators, WenoParams};
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

/// Variables that are reconstructed and predicted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// Reconstruction and prediction in primitive variables.
    Primitive,
    /// Reconstruction and prediction in conserved variables.
    Conserved,
}

impl std::str::FromStr for Pipeline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prim" | "primitive" => Ok(Self::Primitive),
            "cons" | "conserved" => Ok(Self::Conserved),
            other => Err(Error::Config(format!("unknown pipeline '{other}'"))),
        }
    }
}

impl std::fmt::Display for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Primitive => "prim",
            Self::Conserved => "cons",
        })
    }
}

/// Velocity variable reconstructed for relativistic systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VelocityVariable {
    /// Three-velocity `v`.
    Velocity,
    /// Spatial part of the four-velocity `W v`.
    FourVelocity,
}

impl std::str::FromStr for VelocityVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v" => Ok(Self::Velocity),
            "wv" => Ok(Self::FourVelocity),
            other => Err(Error::Config(format!("unknown velocity variable '{other}'"))),
        }
    }
}

impl std::fmt::Display for VelocityVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Velocity => "v",
            Self::FourVelocity => "wv",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SchemeConfig<T> {
    /// Polynomial degree `M` of reconstruction and predictor.
    pub degree: usize,
    pub pipeline: Pipeline,
    pub flux: FluxKind,
    pub guess: GuessKind,
    pub velocity: VelocityVariable,
    pub cfl: T,
    /// Overrides the CFL time step.
    pub fixed_dt: Option<T>,
    pub picard: PicardSettings<T>,
    pub weno: WenoParams<T>,
}

impl<T: Real> SchemeConfig<T> {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            pipeline: Pipeline::Primitive,
            flux: FluxKind::Rusanov,
            guess: GuessKind::MusclCn,
            velocity: VelocityVariable::Velocity,
            cfl: T::lit(0.5),
            fixed_dt: None,
            picard: PicardSettings::for_degree(degree),
            weno: WenoParams::default(),
        }
    }

    pub fn validate(&self, sys: &SystemSpec<T>) -> Result<()> {
        if !(1..=crate::basis::MAX_DEGREE).contains(&self.degree) {
            return Err(Error::Config(format!("degree {} outside 1..=5", self.degree)));
        }
        validate_flux(sys, self.flux)?;
        if !(self.cfl > T::zero()) {
            return Err(Error::Config("cfl must be positive".into()));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > T::zero()) {
                return Err(Error::Config("fixed dt must be positive".into()));
            }
        }
        if self.velocity == VelocityVariable::FourVelocity && sys.lorentz_slots().is_none() {
            return Err(Error::Config(format!("velocity variable wv needs a relativistic system, got {}", sys.name())));
        }
        if self.picard.max_iterations == 0 {
            return Err(Error::Config("at least one Picard iteration is required".into()));
        }
        Ok(())
    }
}

/// Per-step predictor statistics.
#[derive(Clone, Debug, Default)]
pub struct StepReport {
    pub dt: f64,
    pub picard_histogram: Vec<u64>,
    pub fallbacks: u64,
    pub unconverged: u64,
}

pub struct Solver<T: Real> {
    pub sys: SystemSpec<T>,
    pub grid: Grid<T>,
    pub boundaries: BoundarySet<T>,
    pub scheme: SchemeConfig<T>,
    pub counter: ConversionCounter,
    basis: NodalBasis<T>,
    ops: PredictorOperators<T>,
    weno: WenoOperators<T>,
    flux: FluxEvaluator<T>,
    time: T,
    steps: usize,
    /// Conserved averages.
    q: Field<T>,
    q_next: Field<T>,
    /// Primitive point values at cell centres (primitive pipeline).
    centers: Field<T>,
    xbuf: Field<T>,
    recon: Field<T>,
    /// Space-time nodal primitive values of the active cells.
    st_prim: Field<T>,
    /// Space-time nodal values of the predicted variables.
    st: Field<T>,
    previous: Option<(Field<T>, T)>,
    face_x: Vec<T>,
    face_y: Vec<T>,
    histogram: Vec<u64>,
    fallbacks: u64,
    unconverged: u64,
}

const FACE_WIDTH: usize = 2;

impl<T: Real> Solver<T> {
    /// Creates a solver with conserved averages from `init`, which receives
    /// cell indices and writes conserved averages.
    pub fn new(
        sys: SystemSpec<T>,
        grid: Grid<T>,
        boundaries: BoundarySet<T>,
        scheme: SchemeConfig<T>,
        mut init: impl FnMut(isize, isize, &mut [T]),
    ) -> Result<Self> {
        scheme.validate(&sys)?;
        let m = scheme.degree;
        let basis = NodalBasis::new(m)?;
        let ops = PredictorOperators::new(&basis)?;
        let weno = WenoOperators::new(&basis, scheme.weno)?;
        let nv = sys.nvar();
        let n = m + 1;
        let nsp = n.pow(grid.dims as u32);
        let layout = grid.layout(m + 1);
        let mut q = Field::new(layout, nv);
        for j in 0..grid.ny as isize {
            for i in 0..grid.nx as isize {
                init(i, j, q.get_mut(i, j));
            }
        }
        let st_layout = grid.layout(1);
        Ok(Self {
            flux: FluxEvaluator::new(scheme.flux),
            q_next: q.clone(),
            centers: Field::new(layout, nv),
            xbuf: Field::new(layout, n * nv),
            recon: Field::new(layout, nsp * nv),
            st_prim: Field::new(st_layout, nsp * n * nv),
            st: Field::new(st_layout, nsp * n * nv),
            previous: None,
            face_x: vec![T::zero(); (grid.nx + 1) * grid.ny * FACE_WIDTH * nv],
            face_y: vec![T::zero(); grid.nx * (grid.ny + 1) * FACE_WIDTH * nv],
            histogram: vec![0; scheme.picard.max_iterations + 1],
            fallbacks: 0,
            unconverged: 0,
            counter: ConversionCounter::new(),
            q,
            sys,
            grid,
            boundaries,
            scheme,
            basis,
            ops,
            weno,
            time: T::zero(),
            steps: 0,
        })
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn set_time(&mut self, t: T) {
        self.time = t;
    }

    pub fn conserved(&self) -> &Field<T> {
        &self.q
    }

    pub fn conserved_mut(&mut self) -> &mut Field<T> {
        &mut self.q
    }

    pub fn picard_histogram(&self) -> &[u64] {
        &self.histogram
    }

    pub fn guess_fallbacks(&self) -> u64 {
        self.fallbacks
    }

    pub fn unconverged_predictions(&self) -> u64 {
        self.unconverged
    }

    pub fn basis(&self) -> &NodalBasis<T> {
        &self.basis
    }

    /// Primitive cell-centre values of the interior from the cell averages,
    /// counted as diagnostic conversions.
    pub fn primitive_averages(&self) -> Result<Field<T>> {
        let mut v = Field::new(self.grid.layout(0), self.sys.nvar());
        for j in 0..self.grid.ny as isize {
            for i in 0..self.grid.nx as isize {
                self.counter
                    .convert_diagnostic(&self.sys, self.q.get(i, j), v.get_mut(i, j))
                    .map_err(|e| Error::Recovery {
                        cell: (i, j),
                        reason: e.reason,
                    })?;
            }
        }
        Ok(v)
    }

    /// Sum of `q dx dy` over the interior.
    pub fn totals(&self) -> Vec<T> {
        let nv = self.sys.nvar();
        let mut tot = vec![T::zero(); nv];
        let vol = self.grid.dx * self.grid.dy;
        for j in 0..self.grid.ny as isize {
            for i in 0..self.grid.nx as isize {
                for (t, &x) in tot.iter_mut().zip(self.q.get(i, j)) {
                    *t += x * vol;
                }
            }
        }
        tot
    }

    fn cfl_dt(&self, states: &Field<T>) -> T {
        let g = &self.grid;
        let sys = &self.sys;
        let rate = (0..g.ny as isize)
            .into_par_iter()
            .map(|j| {
                let mut best = T::zero();
                for i in 0..g.nx as isize {
                    let v = states.get(i, j);
                    let mut r = T::zero();
                    for &ax in g.axes() {
                        r += sys.max_signal_speed(v, ax) / g.spacing(ax);
                    }
                    best = best.max(r);
                }
                best
            })
            .reduce(T::zero, |a, b| a.max(b));
        self.scheme.cfl / rate
    }

    /// Advances one step, never past `t_end`. Returns the step size.
    pub fn step(&mut self, t_end: Option<T>) -> Result<StepReport> {
        let m = self.scheme.degree;
        let nv = self.sys.nvar();
        let dims = self.grid.dims;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let active = Region::with_ring(dims, nx, ny);
        let interior = Region::interior(dims, nx, ny);
        let n = m + 1;
        let nsp = n.pow(dims as u32);

        let mut dt;
        match self.scheme.pipeline {
            Pipeline::Primitive => {
                self.boundaries
                    .fill(&self.sys, &self.grid, &mut self.q, self.time, Variables::ConservedAverages, m);
                self.weno
                    .reconstruct_region(DataKind::Averages, &self.q, interior, &mut self.xbuf, &mut self.recon);
                self.centre_values()?;
                dt = self.cfl_dt(&self.centers);
                dt = self.clip_dt(dt, t_end);
                self.boundaries.fill(
                    &self.sys,
                    &self.grid,
                    &mut self.centers,
                    self.time,
                    Variables::PrimitivePoints,
                    m + 1,
                );
                let slots = match self.scheme.velocity {
                    VelocityVariable::FourVelocity => self.sys.lorentz_slots(),
                    VelocityVariable::Velocity => None,
                };
                if let Some(s) = slots {
                    for c in self.centers.data.chunks_exact_mut(nv) {
                        to_four_velocity(c, s);
                    }
                }
                self.weno
                    .reconstruct_region(DataKind::Points, &self.centers, active, &mut self.xbuf, &mut self.recon);
                if let Some(s) = slots {
                    for (i, j) in active.cells() {
                        for c in self.recon.get_mut(i, j).chunks_exact_mut(nv) {
                            from_four_velocity(c, s);
                        }
                    }
                }
            }
            Pipeline::Conserved => {
                self.boundaries.fill(
                    &self.sys,
                    &self.grid,
                    &mut self.q,
                    self.time,
                    Variables::ConservedAverages,
                    m + 1,
                );
                let mut v = Field::new(self.grid.layout(0), nv);
                for j in 0..ny as isize {
                    for i in 0..nx as isize {
                        self.counter
                            .convert(&self.sys, self.q.get(i, j), v.get_mut(i, j))
                            .map_err(|e| Error::Recovery {
                                cell: (i, j),
                                reason: e.reason,
                            })?;
                    }
                }
                dt = self.cfl_dt(&v);
                dt = self.clip_dt(dt, t_end);
                self.weno
                    .reconstruct_region(DataKind::Averages, &self.q, active, &mut self.xbuf, &mut self.recon);
            }
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::NonFinite {
                cell: (0, 0),
                step: self.steps as u64,
            });
        }

        self.predict(dt, active, nsp)?;
        self.assemble_faces()?;
        self.update(dt)?;

        std::mem::swap(&mut self.q, &mut self.q_next);
        self.time += dt;
        self.steps += 1;
        Ok(StepReport {
            dt: dt.to_f64_lossy(),
            picard_histogram: self.histogram.clone(),
            fallbacks: self.fallbacks,
            unconverged: self.unconverged,
        })
    }

    fn clip_dt(&self, dt: T, t_end: Option<T>) -> T {
        let dt = self.scheme.fixed_dt.unwrap_or(dt);
        match t_end {
            Some(te) if self.time + dt > te => te - self.time,
            _ => dt,
        }
    }

    /// Centre values of the reconstructed conserved polynomials, converted
    /// once per cell.
    fn centre_values(&mut self) -> Result<()> {
        let nv = self.sys.nvar();
        let n = self.basis.len();
        let dims = self.grid.dims;
        let c = self.basis.center_values().to_vec();
        let recon = &self.recon;
        let sys = &self.sys;
        let counter = &self.counter;
        let layout = self.centers.layout;
        let row_len = self.centers.row_len();
        let nx = self.grid.nx as isize;
        let ny = self.grid.ny as isize;
        self.centers
            .data
            .par_chunks_mut(row_len)
            .enumerate()
            .try_for_each(|(r, row)| {
                let j = r as isize - layout.gy as isize;
                if j < 0 || j >= ny {
                    return Ok(());
                }
                let mut qc = zero_state::<T>();
                for i in 0..nx {
                    let nodal = recon.get(i, j);
                    qc[..nv].iter_mut().for_each(|x| *x = T::zero());
                    if dims == 1 {
                        for a in 0..n {
                            for v in 0..nv {
                                qc[v] += c[a] * nodal[a * nv + v];
                            }
                        }
                    } else {
                        for b in 0..n {
                            for a in 0..n {
                                let w = c[a] * c[b];
                                for v in 0..nv {
                                    qc[v] += w * nodal[(a + n * b) * nv + v];
                                }
                            }
                        }
                    }
                    let k = (i + layout.gx as isize) as usize * nv;
                    counter
                        .convert(sys, &qc[..nv], &mut row[k..k + nv])
                        .map_err(|e| Error::Recovery {
                            cell: (i, j),
                            reason: e.reason,
                        })?;
                }
                Ok(())
            })
    }

    fn predict(&mut self, dt: T, active: Region, nsp: usize) -> Result<()> {
        let nv = self.sys.nvar();
        let n = self.basis.len();
        let variables = match self.scheme.pipeline {
            Pipeline::Primitive => PredictorVariables::Primitive,
            Pipeline::Conserved => PredictorVariables::Conserved,
        };
        let pred = CellPredictor {
            sys: &self.sys,
            basis: &self.basis,
            ops: &self.ops,
            dims: self.grid.dims,
            variables,
            settings: self.scheme.picard,
        };
        let mut ratio = [dt / self.grid.dx, T::zero()];
        if self.grid.dims == 2 {
            ratio[1] = dt / self.grid.dy;
        }
        let geom = StepGeometry { dt, ratio };
        let extrap: Option<(SmallMatrix<T>, &Field<T>)> = match (&self.previous, self.scheme.guess) {
            (Some((prev, dt_old)), GuessKind::AdamsBashforth) => {
                Some((self.basis.extrapolation_matrix(dt / *dt_old), prev))
            }
            _ => None,
        };
        let guess_kind = self.scheme.guess;
        let len = nsp * n * nv;
        let hist: Vec<AtomicU64> = (0..self.histogram.len()).map(|_| AtomicU64::new(0)).collect();
        let fallbacks = AtomicU64::new(0);
        let unconverged = AtomicU64::new(0);
        let recon = &self.recon;
        let counter = &self.counter;
        let layout = self.st.layout;
        let row_len = self.st.row_len();
        let conserved = variables == PredictorVariables::Conserved;
        let grid = &self.grid;
        let boundaries = &self.boundaries;
        let sys = &self.sys;
        let nodes = self.basis.nodes();
        let t0 = self.time;
        let dims = self.grid.dims;
        self.st
            .data
            .par_chunks_mut(row_len)
            .zip(self.st_prim.data.par_chunks_mut(row_len))
            .enumerate()
            .try_for_each_init(
                || PredictorWorkspace::new(len),
                |ws, (r, (row, prow))| -> Result<()> {
                    let j = r as isize - layout.gy as isize;
                    if !active.rows().contains(&j) {
                        return Ok(());
                    }
                    for i in active.cols(j) {
                        let k = (i + layout.gx as isize) as usize * len;
                        let out = &mut row[k..k + len];
                        let guess = match (&extrap, guess_kind) {
                            (Some((e, prev)), _) => InitialGuess::Extrapolate {
                                previous: prev.get(i, j),
                                matrix: e,
                            },
                            (None, GuessKind::Constant) => InitialGuess::Constant,
                            _ => InitialGuess::MusclCn,
                        };
                        let owner = boundaries.owner(grid, i, j).map(|(_, b)| b);
                        if let Some(Boundary::Reflecting) = owner {
                            continue;
                        }
                        if let Some(Boundary::Dirichlet(f)) = owner {
                            let (x0, y0) = grid.corner(i, j);
                            let ny = if dims == 2 { n } else { 1 };
                            for t in 0..n {
                                for b in 0..ny {
                                    for a in 0..n {
                                        let s = k + (a + n * b + nsp * t) * nv;
                                        let (v, q) = (&mut prow[s..s + nv], &mut row[s..s + nv]);
                                        let y = if dims == 2 { y0 + nodes[b] * grid.dy } else { y0 };
                                        f(x0 + nodes[a] * grid.dx, y, t0 + nodes[t] * dt, v);
                                        if conserved {
                                            sys.prim_to_cons(v, q);
                                        } else {
                                            q.copy_from_slice(v);
                                        }
                                    }
                                }
                            }
                            continue;
                        }
                        let prim_out = if conserved { Some(&mut prow[k..k + len]) } else { None };
                        let stats = pred
                            .predict(recon.get(i, j), geom, guess, ws, out, prim_out)
                            .map_err(|reason| Error::Predictor { cell: (i, j), reason })?;
                        counter.add_solver(stats.conversions);
                        hist[stats.iterations.min(hist.len() - 1)].fetch_add(1, Ordering::Relaxed);
                        if stats.fell_back {
                            fallbacks.fetch_add(1, Ordering::Relaxed);
                        }
                        if !stats.converged {
                            unconverged.fetch_add(1, Ordering::Relaxed);
                        }
                        if !conserved {
                            prow[k..k + len].copy_from_slice(&row[k..k + len]);
                        }
                    }
                    Ok(())
                },
            )?;
        self.mirror_reflecting(active);
        for (h, a) in self.histogram.iter_mut().zip(&hist) {
            *h += a.load(Ordering::Relaxed);
        }
        self.fallbacks += fallbacks.load(Ordering::Relaxed);
        self.unconverged += unconverged.load(Ordering::Relaxed);
        if guess_kind == GuessKind::AdamsBashforth {
            match &mut self.previous {
                Some((prev, old)) => {
                    prev.data.copy_from_slice(&self.st.data);
                    *old = dt;
                }
                None => self.previous = Some((self.st.clone(), dt)),
            }
        }
        Ok(())
    }

    /// Ring cells behind a reflecting wall take the mirror image of the
    /// predictor of their interior neighbour.
    fn mirror_reflecting(&mut self, active: Region) {
        let nv = self.sys.nvar();
        let n = self.basis.len();
        let dims = self.grid.dims;
        let nsp = n.pow(dims as u32);
        let ny_nodes = if dims == 2 { n } else { 1 };
        let (nx, ny) = (self.grid.nx as isize, self.grid.ny as isize);
        for (i, j) in active.cells() {
            let Some((side, Boundary::Reflecting)) = self.boundaries.owner(&self.grid, i, j) else {
                continue;
            };
            let (src, axis) = match side {
                Side::Left => ((0, j), Axis::X),
                Side::Right => ((nx - 1, j), Axis::X),
                Side::Bottom => ((i, 0), Axis::Y),
                Side::Top => ((i, ny - 1), Axis::Y),
            };
            for field in [&mut self.st, &mut self.st_prim] {
                let from = field.get(src.0, src.1).to_vec();
                let to = field.get_mut(i, j);
                for t in 0..n {
                    for b in 0..ny_nodes {
                        for a in 0..n {
                            let (ma, mb) = if axis == Axis::X { (n - 1 - a, b) } else { (a, n - 1 - b) };
                            let d = (a + n * b + nsp * t) * nv;
                            let s = (ma + n * mb + nsp * t) * nv;
                            to[d..d + nv].copy_from_slice(&from[s..s + nv]);
                            self.sys.reflect(&mut to[d..d + nv], axis);
                        }
                    }
                }
            }
        }
    }

    /// Space-time integrals of the numerical flux and path jump on every
    /// face. x faces are indexed by the cell to their right.
    fn assemble_faces(&mut self) -> Result<()> {
        let nv = self.sys.nvar();
        let n = self.basis.len();
        let dims = self.grid.dims;
        let nsp = n.pow(dims as u32);
        let nx = self.grid.nx;
        let st = &self.st_prim;
        let sys = &self.sys;
        let flux = &self.flux;
        let w = self.basis.weights();
        let lv = self.basis.right_values();
        let rv = self.basis.left_values();
        let fw = FACE_WIDTH * nv;
        let ntrans = if dims == 2 { n } else { 1 };
        // x faces
        self.face_x
            .par_chunks_mut((nx + 1) * fw)
            .enumerate()
            .try_for_each(|(j, row)| {
                let j = j as isize;
                for i in 0..=nx as isize {
                    let left = st.get(i - 1, j);
                    let right = st.get(i, j);
                    let out = &mut row[i as usize * fw..(i as usize + 1) * fw];
                    face_integral(sys, flux, Axis::X, n, ntrans, w, lv, rv, nv, left, right, out, |t, b, a| {
                        a + n * b + nsp * t
                    })
                    .map_err(|e| face_error(e, (i, j)))?;
                }
                Ok::<(), Error>(())
            })?;
        if dims == 1 {
            return Ok(());
        }
        self.face_y
            .par_chunks_mut(nx * fw)
            .enumerate()
            .try_for_each(|(jf, row)| {
                let j = jf as isize;
                for i in 0..nx as isize {
                    let below = st.get(i, j - 1);
                    let above = st.get(i, j);
                    let out = &mut row[i as usize * fw..(i as usize + 1) * fw];
                    face_integral(sys, flux, Axis::Y, n, n, w, lv, rv, nv, below, above, out, |t, a, b| {
                        a + n * b + nsp * t
                    })
                    .map_err(|e| face_error(e, (i, j)))?;
                }
                Ok::<(), Error>(())
            })?;
        Ok(())
    }

    fn update(&mut self, dt: T) -> Result<()> {
        let nv = self.sys.nvar();
        let n = self.basis.len();
        let dims = self.grid.dims;
        let nsp = n.pow(dims as u32);
        let nst = nsp * n;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let fw = FACE_WIDTH * nv;
        let half = T::lit(0.5);
        let rx = dt / self.grid.dx;
        let ry = if dims == 2 { dt / self.grid.dy } else { T::zero() };
        let sys = &self.sys;
        let volume_terms = sys.has_source() || sys.has_nonconservative();
        let q = &self.q;
        let fx = &self.face_x;
        let fy = &self.face_y;
        let st = &self.st;
        let st_prim = &self.st_prim;
        let basis = &self.basis;
        let pipeline = self.scheme.pipeline;
        let layout = self.q_next.layout;
        let row_len = self.q_next.row_len();
        let steps = self.steps;
        let weights: Vec<T> = (0..nst)
            .map(|k| {
                let w = basis.weights();
                let a = k % n;
                let rest = k / n;
                if dims == 1 {
                    w[a] * w[rest]
                } else {
                    w[a] * w[rest % n] * w[rest / n]
                }
            })
            .collect();
        let spacing = [self.grid.dx, self.grid.dy];
        self.q_next
            .data
            .par_chunks_mut(row_len)
            .enumerate()
            .try_for_each_init(
                || (vec![T::zero(); nst * nv], vec![T::zero(); nst * nv]),
                |(grad_x, grad_y), (r, row)| {
                    let j = r as isize - layout.gy as isize;
                    if j < 0 || j >= ny as isize {
                        return Ok(());
                    }
                    for i in 0..nx as isize {
                        let k = (i + layout.gx as isize) as usize * nv;
                        let out = &mut row[k..k + nv];
                        out.copy_from_slice(q.get(i, j));
                        let fl = &fx[(j as usize * (nx + 1) + i as usize) * fw..][..fw];
                        let fr = &fx[(j as usize * (nx + 1) + i as usize + 1) * fw..][..fw];
                        for v in 0..nv {
                            out[v] -= rx * (fr[v] - fl[v] + half * (fr[nv + v] + fl[nv + v]));
                        }
                        if dims == 2 {
                            let fb = &fy[(j as usize * nx + i as usize) * fw..][..fw];
                            let ft = &fy[((j as usize + 1) * nx + i as usize) * fw..][..fw];
                            for v in 0..nv {
                                out[v] -= ry * (ft[v] - fb[v] + half * (ft[nv + v] + fb[nv + v]));
                            }
                        }
                        if volume_terms {
                            let mut acc = zero_state::<T>();
                            volume_integral(
                                sys,
                                basis,
                                dims,
                                pipeline,
                                st.get(i, j),
                                st_prim.get(i, j),
                                &weights,
                                spacing,
                                grad_x,
                                grad_y,
                                &mut acc[..nv],
                            );
                            for v in 0..nv {
                                out[v] += dt * acc[v];
                            }
                        }
                        if out.iter().any(|x| !x.is_finite()) {
                            return Err(Error::NonFinite { cell: (i, j), step: steps as u64 });
                        }
                    }
                    Ok(())
                },
            )
    }

    /// Advances to `t_end`, calling `observer` after every step.
    pub fn run_until(&mut self, t_end: T, mut observer: impl FnMut(&Self, &StepReport)) -> Result<()> {
        let eps = T::epsilon() * T::lit(64.0) * t_end.abs().max(T::one());
        while self.time < t_end - eps {
            let rep = self.step(Some(t_end))?;
            observer(self, &rep);
        }
        self.time = self.time.max(t_end);
        Ok(())
    }
}

fn face_error(e: Error, cell: (isize, isize)) -> Error {
    match e {
        Error::Flux(reason) => Error::Predictor {
            cell,
            reason: format!("face flux: {reason}"),
        },
        other => other,
    }
}

/// Quadrature of flux and jump over one face. `node(t, transverse,
/// normal)` maps node indices to the space-time array of either cell.
#[allow(clippy::too_many_arguments)]
#[inline]
fn face_integral<T: Real>(
    sys: &SystemSpec<T>,
    flux: &FluxEvaluator<T>,
    axis: Axis,
    n: usize,
    ntrans: usize,
    w: &[T],
    left_end: &[T],
    right_end: &[T],
    nv: usize,
    left: &[T],
    right: &[T],
    out: &mut [T],
    node: impl Fn(usize, usize, usize) -> usize,
) -> Result<()> {
    out.iter_mut().for_each(|x| *x = T::zero());
    let mut vl = zero_state::<T>();
    let mut vr = zero_state::<T>();
    let mut f = zero_state::<T>();
    let mut d = zero_state::<T>();
    for t in 0..n {
        for b in 0..ntrans {
            let wt = if ntrans == 1 { w[t] } else { w[t] * w[b] };
            vl[..nv].iter_mut().for_each(|x| *x = T::zero());
            vr[..nv].iter_mut().for_each(|x| *x = T::zero());
            for a in 0..n {
                let k = node(t, b, a) * nv;
                let (el, er) = (left_end[a], right_end[a]);
                for v in 0..nv {
                    vl[v] += el * left[k + v];
                    vr[v] += er * right[k + v];
                }
            }
            flux.evaluate(sys, &vl[..nv], &vr[..nv], axis, &mut f[..nv], &mut d[..nv])?;
            for v in 0..nv {
                out[v] += wt * f[v];
                out[nv + v] += wt * d[v];
            }
        }
    }
    Ok(())
}

/// Space-time average of `S - P` over one cell, `P` being the smooth part
/// of the non-conservative product.
#[allow(clippy::too_many_arguments)]
fn volume_integral<T: Real>(
    sys: &SystemSpec<T>,
    basis: &NodalBasis<T>,
    dims: usize,
    pipeline: Pipeline,
    st: &[T],
    st_prim: &[T],
    weights: &[T],
    spacing: [T; 2],
    grad_x: &mut [T],
    grad_y: &mut [T],
    out: &mut [T],
) {
    let nv = sys.nvar();
    let n = basis.len();
    let nst = weights.len();
    let ncp = sys.has_nonconservative();
    let src = sys.has_source();
    if ncp {
        let d = basis.derivative_matrix();
        let field = match pipeline {
            Pipeline::Primitive => st_prim,
            Pipeline::Conserved => st,
        };
        differentiate_axis(d, field, nv, n, 1, nst, grad_x);
        if dims == 2 {
            differentiate_axis(d, field, nv, n, n, nst, grad_y);
        }
    }
    let mut s = zero_state::<T>();
    let mut mg = zero_state::<T>();
    let mut b = zero_state::<T>();
    let mut m = SmallMatrix::zeros(nv);
    for k in 0..nst {
        let v = &st_prim[k * nv..(k + 1) * nv];
        let w = weights[k];
        if src {
            sys.source(v, &mut s[..nv]);
            for c in 0..nv {
                out[c] += w * s[c];
            }
        }
        if ncp {
            if pipeline == Pipeline::Primitive {
                sys.jacobian_m(v, &mut m);
            }
            for (dim, grad) in [&*grad_x, &*grad_y].into_iter().enumerate().take(dims) {
                let g = &grad[k * nv..(k + 1) * nv];
                let inv = T::one() / spacing[dim];
                match pipeline {
                    Pipeline::Primitive => m.mul_vec(g, &mut mg[..nv]),
                    Pipeline::Conserved => mg[..nv].copy_from_slice(g),
                }
                for c in 0..nv {
                    mg[c] *= inv;
                }
                b[..nv].iter_mut().for_each(|x| *x = T::zero());
                sys.ncp_apply(v, Axis::from_index(dim), &mg[..nv], &mut b[..nv]);
                for c in 0..nv {
                    out[c] -= w * b[c];
                }
            }
        }
    }
}

fn to_four_velocity<T: Real>(v: &mut [T], s: [usize; 3]) {
    let v2 = v[s[0]] * v[s[0]] + v[s[1]] * v[s[1]] + v[s[2]] * v[s[2]];
    let w = T::one() / (T::one() - v2).sqrt();
    for k in s {
        v[k] *= w;
    }
}

fn from_four_velocity<T: Real>(v: &mut [T], s: [usize; 3]) {
    let u2 = v[s[0]] * v[s[0]] + v[s[1]] * v[s[1]] + v[s[2]] * v[s[2]];
    let w = (T::one() + u2).sqrt();
    for k in s {
        v[k] /= w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Boundary;
    use crate::systems::{BaerNunziato, Euler, Rhd, Rmhd};

    fn uniform_states() -> Vec<(SystemSpec<f64>, Vec<f64>)> {
        vec![
            (SystemSpec::Euler(Euler::new(1.4)), vec![1.2, 0.3, -0.2, 0.1, 0.9]),
            (SystemSpec::Rhd(Rhd::new(5.0 / 3.0)), vec![1.0, 0.3, 0.2, 0.1, 2.0]),
            (
                SystemSpec::Rmhd(Rmhd::new(5.0 / 3.0, 10.0)),
                vec![1.0, 0.2, 0.1, 0.0, 1.0, 0.5, 0.3, 0.1, 0.0],
            ),
            (
                SystemSpec::BaerNunziato(BaerNunziato::new(1.4, 0.0, 1.4, 0.0)),
                vec![1.0, 0.1, 0.2, 0.0, 1.0, 0.5, 0.1, 0.2, 0.0, 1.0, 0.4],
            ),
        ]
    }

    fn solver_for(
        sys: SystemSpec<f64>,
        dims: usize,
        bc: Boundary<f64>,
        scheme: SchemeConfig<f64>,
        init: impl Fn(f64, f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Solver<f64> {
        let grid = Grid::new(dims, 8, 6, [0.0, 1.0], [0.0, 1.0]).unwrap();
        let g = grid.clone();
        let nv = sys.nvar();
        let s2 = sys.clone();
        Solver::new(sys, grid, BoundarySet::uniform(bc), scheme, move |i, j, q| {
            let (x, y) = g.center(i, j);
            let mut v = vec![0.0; nv];
            init(x, y, &mut v);
            s2.prim_to_cons(&v, q);
        })
        .unwrap()
    }

    #[test]
    fn uniform_state_is_preserved() {
        for (sys, state) in uniform_states() {
            for pipeline in [Pipeline::Primitive, Pipeline::Conserved] {
                for flux in [FluxKind::Rusanov, FluxKind::Osher] {
                    if validate_flux(&sys, flux).is_err() {
                        continue;
                    }
                    for (dims, bc) in [(1, Boundary::Outflow), (2, Boundary::Periodic), (2, Boundary::Outflow)] {
                        let mut scheme = SchemeConfig::new(2);
                        scheme.pipeline = pipeline;
                        scheme.flux = flux;
                        let st = state.clone();
                        let mut s = solver_for(sys.clone(), dims, bc, scheme, move |_, _, v| v.copy_from_slice(&st));
                        let q0 = s.conserved().interior();
                        for _ in 0..2 {
                            s.step(None).unwrap();
                        }
                        let q1 = s.conserved().interior();
                        for (a, b) in q0.iter().zip(&q1) {
                            assert!(
                                (a - b).abs() < 1e-13 * a.abs().max(1.0),
                                "{} {pipeline} {flux} d={dims}: {a} {b}",
                                sys.name()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn periodic_mass_is_conserved() {
        let sys = SystemSpec::Euler(Euler::new(1.4));
        for pipeline in [Pipeline::Primitive, Pipeline::Conserved] {
            let mut scheme = SchemeConfig::new(3);
            scheme.pipeline = pipeline;
            let mut s = solver_for(sys.clone(), 2, Boundary::Periodic, scheme, |x, y, v| {
                let r = 1.0 + 0.2 * (std::f64::consts::TAU * (x + y)).sin();
                v.copy_from_slice(&[r, 0.5, 0.3, 0.0, 1.0 + 0.1 * (std::f64::consts::TAU * x).cos()]);
            });
            let m0 = s.totals();
            for _ in 0..5 {
                s.step(None).unwrap();
            }
            let m1 = s.totals();
            for (a, b) in m0.iter().zip(&m1) {
                assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} {b}");
            }
        }
    }

    #[test]
    fn primitive_pipeline_converts_once_per_cell() {
        let sys = SystemSpec::Euler(Euler::new(1.4));
        let mut s = solver_for(sys, 2, Boundary::Periodic, SchemeConfig::new(3), |x, _, v| {
            v.copy_from_slice(&[1.0 + 0.1 * x, 0.2, 0.0, 0.0, 1.0]);
        });
        s.step(None).unwrap();
        s.step(None).unwrap();
        assert_eq!(s.counter.solver_count(), 2 * 48);
    }

    #[test]
    fn cfl_time_step_for_rest_state() {
        let sys = SystemSpec::Euler(Euler::new(1.4));
        let grid = Grid::new(1, 10, 1, [0.0, 1.0], [0.0, 1.0]).unwrap();
        let mut s = Solver::new(sys.clone(), grid, BoundarySet::uniform(Boundary::Periodic), SchemeConfig::new(2), |_, _, q| {
            sys.prim_to_cons(&[1.0, 0.0, 0.0, 0.0, 1.0], q)
        })
        .unwrap();
        let rep = s.step(None).unwrap();
        assert!((rep.dt - 0.5 * 0.1 / 1.4f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn osher_rejected_for_rmhd() {
        let sys = SystemSpec::Rmhd(Rmhd::<f64>::new(5.0 / 3.0, 10.0));
        let mut scheme = SchemeConfig::new(2);
        scheme.flux = FluxKind::Osher;
        assert!(scheme.validate(&sys).is_err());
    }
}
