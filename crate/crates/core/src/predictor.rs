//! Local space-time predictor.
//!
//! Inside each cell the reconstructed spatial polynomial is evolved over
//! one time step by a weak formulation in time with upwinding at `t^n`,
//! solved by fixed-point iteration on nodal values. In primitive form the
//! equations are advanced as `dV/dt + C_i dV/dx_i = M^-1 S`; in conserved
//! form as `dQ/dt + dF_i/dx_i + B_i dQ/dx_i = S`.

use crate::basis::{NodalBasis, PredictorOperators};
use crate::linalg::SmallMatrix;
use crate::real::Real;
use crate::systems::{primitive_rate, zero_state, Axis, HyperbolicSystem};

/// Variables the predictor evolves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredictorVariables {
    Primitive,
    Conserved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuessKind {
    /// Spatial data copied to every time node.
    Constant,
    /// Linear-in-time guess from the quasi-linear rate, with
    /// Crank–Nicolson treatment of the source.
    MusclCn,
    /// Extrapolation of the previous step's space-time solution.
    AdamsBashforth,
}

impl std::str::FromStr for GuessKind {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constant" => Ok(Self::Constant),
            "muscl-cn" | "muscl" => Ok(Self::MusclCn),
            "ab" | "adams-bashforth" => Ok(Self::AdamsBashforth),
            other => Err(crate::error::Error::Config(format!("unknown initial guess '{other}'"))),
        }
    }
}

impl std::fmt::Display for GuessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::MusclCn => "muscl-cn",
            Self::AdamsBashforth => "ab",
        })
    }
}

/// Initial guess actually supplied for one cell.
#[derive(Clone, Copy, Debug)]
pub enum InitialGuess<'a, T> {
    Constant,
    MusclCn,
    /// Previous space-time nodal values and the time extrapolation matrix
    /// for the current step.
    Extrapolate { previous: &'a [T], matrix: &'a SmallMatrix<T> },
}

#[derive(Clone, Copy, Debug)]
pub struct PicardSettings<T> {
    pub max_iterations: usize,
    pub tolerance: T,
}

impl<T: Real> PicardSettings<T> {
    pub fn for_degree(m: usize) -> Self {
        Self {
            max_iterations: m + 2,
            tolerance: T::tolerance(1e-11),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PicardStats {
    pub iterations: usize,
    pub converged: bool,
    /// The extrapolated guess was inadmissible and replaced.
    pub fell_back: bool,
    /// Conserved to primitive conversions performed.
    pub conversions: u64,
}

/// Scratch space reused across cells.
#[derive(Clone, Debug)]
pub struct PredictorWorkspace<T> {
    flux: [Vec<T>; 2],
    dflux: [Vec<T>; 2],
    dstate: [Vec<T>; 2],
    prim: Vec<T>,
    rate: Vec<T>,
    next: Vec<T>,
}

impl<T: Real> PredictorWorkspace<T> {
    pub fn new(len: usize) -> Self {
        let z = || vec![T::zero(); len];
        Self {
            flux: [z(), z()],
            dflux: [z(), z()],
            dstate: [z(), z()],
            prim: z(),
            rate: z(),
            next: z(),
        }
    }
}

/// Applies the nodal derivative matrix along `axis` of a tensor array of
/// `n^dims` (or `n^(dims+1)`) nodes with `nv` values per node.
pub fn differentiate_axis<T: Real>(
    d: &SmallMatrix<T>,
    src: &[T],
    nv: usize,
    n: usize,
    stride: usize,
    total_nodes: usize,
    out: &mut [T],
) {
    for base in 0..total_nodes {
        if !(base / stride).is_multiple_of(n) {
            continue;
        }
        for i in 0..n {
            let row = d.row(i);
            let o = (base + i * stride) * nv;
            for v in 0..nv {
                let mut acc = T::zero();
                for (j, &dij) in row.iter().enumerate() {
                    acc += dij * src[(base + j * stride) * nv + v];
                }
                out[o + v] = acc;
            }
        }
    }
}

/// Predictor for one system, degree and dimension.
pub struct CellPredictor<'a, T, S: ?Sized> {
    pub sys: &'a S,
    pub basis: &'a NodalBasis<T>,
    pub ops: &'a PredictorOperators<T>,
    pub dims: usize,
    pub variables: PredictorVariables,
    pub settings: PicardSettings<T>,
}

/// Geometry and time step of one cell.
#[derive(Clone, Copy, Debug)]
pub struct StepGeometry<T> {
    pub dt: T,
    /// `dt / dx_i`
    pub ratio: [T; 2],
}

impl<'a, T: Real, S: HyperbolicSystem<T> + ?Sized> CellPredictor<'a, T, S> {
    #[inline]
    pub fn spatial_nodes(&self) -> usize {
        self.basis.len().pow(self.dims as u32)
    }

    #[inline]
    pub fn spacetime_nodes(&self) -> usize {
        self.spatial_nodes() * self.basis.len()
    }

    /// Evolves the spatial nodal data `initial` (`n^d x nv`) and writes the
    /// space-time nodal values (`n^(d+1) x nv`, time slowest) into `out`.
    /// In conserved mode the primitive values at the nodes are written to
    /// `prim_out`.
    pub fn predict(
        &self,
        initial: &[T],
        geom: StepGeometry<T>,
        guess: InitialGuess<'_, T>,
        ws: &mut PredictorWorkspace<T>,
        out: &mut [T],
        prim_out: Option<&mut [T]>,
    ) -> Result<PicardStats, String> {
        let mut stats = PicardStats::default();
        let nv = self.sys.nvar();
        let nsp = self.spatial_nodes();
        let n = self.basis.len();
        match guess {
            InitialGuess::Constant => self.constant_guess(initial, out),
            InitialGuess::MusclCn => self.muscl_guess(initial, geom, ws, out, &mut stats)?,
            InitialGuess::Extrapolate { previous, matrix: e } => {
                for sp in 0..nsp {
                    for a in 0..n {
                        let o = (sp + nsp * a) * nv;
                        for v in 0..nv {
                            let mut acc = T::zero();
                            for b in 0..n {
                                acc += e[(a, b)] * previous[(sp + nsp * b) * nv + v];
                            }
                            out[o + v] = acc;
                        }
                    }
                }
                if !self.guess_admissible(out) {
                    stats.fell_back = true;
                    self.muscl_guess(initial, geom, ws, out, &mut stats)?;
                }
            }
        }
        let first = self.iterate(initial, geom, ws, out, &mut stats);
        if let Err(e) = first {
            if stats.fell_back || !matches!(guess, InitialGuess::Extrapolate { .. }) {
                return Err(e);
            }
            // conserved extrapolation that could not be inverted
            stats.fell_back = true;
            self.muscl_guess(initial, geom, ws, out, &mut stats)?;
            self.iterate(initial, geom, ws, out, &mut stats)?;
        }
        if let Some(prim) = prim_out {
            match self.variables {
                PredictorVariables::Primitive => prim[..out.len()].copy_from_slice(out),
                PredictorVariables::Conserved => {
                    for k in 0..nsp * n {
                        self.sys
                            .cons_to_prim(&out[k * nv..(k + 1) * nv], &mut prim[k * nv..(k + 1) * nv])
                            .map_err(|e| e.reason)?;
                        stats.conversions += 1;
                    }
                }
            }
        }
        Ok(stats)
    }

    fn constant_guess(&self, initial: &[T], out: &mut [T]) {
        let len = initial.len();
        for a in 0..self.basis.len() {
            out[a * len..(a + 1) * len].copy_from_slice(initial);
        }
    }

    fn guess_admissible(&self, st: &[T]) -> bool {
        if self.variables == PredictorVariables::Conserved {
            return st.iter().all(|x| x.is_finite());
        }
        let nv = self.sys.nvar();
        st.chunks_exact(nv).all(|v| self.sys.admissible(v).is_ok())
    }

    /// Rate `dt * d/dt` of the state at every node of `states` (`nodes`
    /// nodes laid out as a tensor array in space, optionally stacked in
    /// time).
    fn nodal_rates(
        &self,
        states: &[T],
        nodes: usize,
        geom: StepGeometry<T>,
        ws: &mut PredictorWorkspace<T>,
        stats: &mut PicardStats,
    ) -> Result<(), String> {
        let nv = self.sys.nvar();
        let n = self.basis.len();
        let d = self.basis.derivative_matrix();
        let ncp = self.sys.has_nonconservative();
        let len = nodes * nv;
        let prim: &[T] = match self.variables {
            PredictorVariables::Primitive => states,
            PredictorVariables::Conserved => {
                for k in 0..nodes {
                    self.sys
                        .cons_to_prim(&states[k * nv..(k + 1) * nv], &mut ws.prim[k * nv..(k + 1) * nv])
                        .map_err(|e| e.reason)?;
                }
                stats.conversions += nodes as u64;
                &ws.prim[..len]
            }
        };
        for dim in 0..self.dims {
            let axis = Axis::from_index(dim);
            let stride = n.pow(dim as u32);
            for k in 0..nodes {
                self.sys.flux(&prim[k * nv..(k + 1) * nv], axis, &mut ws.flux[dim][k * nv..(k + 1) * nv]);
            }
            differentiate_axis(d, &ws.flux[dim][..len], nv, n, stride, nodes, &mut ws.dflux[dim][..len]);
            let r = geom.ratio[dim];
            for x in ws.dflux[dim][..len].iter_mut() {
                *x *= r;
            }
            if ncp {
                differentiate_axis(d, &states[..len], nv, n, stride, nodes, &mut ws.dstate[dim][..len]);
                for x in ws.dstate[dim][..len].iter_mut() {
                    *x *= r;
                }
            }
        }
        let dims = self.dims;
        match self.variables {
            PredictorVariables::Primitive => {
                for k in 0..nodes {
                    let sl = k * nv..(k + 1) * nv;
                    let dfl: [&[T]; 2] = [&ws.dflux[0][sl.clone()], &ws.dflux[1][sl.clone()]];
                    let dvl: [&[T]; 2] = [&ws.dstate[0][sl.clone()], &ws.dstate[1][sl.clone()]];
                    let dv: &[&[T]] = if ncp { &dvl[..dims] } else { &[] };
                    primitive_rate(self.sys, &prim[sl.clone()], geom.dt, &dfl[..dims], dv, &mut ws.rate[sl])
                        .map_err(|e| e.reason)?;
                }
            }
            PredictorVariables::Conserved => {
                let has_source = self.sys.has_source();
                let mut s = zero_state::<T>();
                for k in 0..nodes {
                    let sl = k * nv..(k + 1) * nv;
                    let v = &prim[sl.clone()];
                    if has_source {
                        self.sys.source(v, &mut s[..nv]);
                    } else {
                        s[..nv].iter_mut().for_each(|x| *x = T::zero());
                    }
                    let mut r = zero_state::<T>();
                    for c in 0..nv {
                        r[c] = geom.dt * s[c];
                    }
                    for dim in 0..dims {
                        for c in 0..nv {
                            r[c] -= ws.dflux[dim][k * nv + c];
                        }
                        if ncp {
                            let mut b = zero_state::<T>();
                            self.sys.ncp_apply(v, Axis::from_index(dim), &ws.dstate[dim][sl.clone()], &mut b[..nv]);
                            for c in 0..nv {
                                r[c] -= b[c];
                            }
                        }
                    }
                    ws.rate[sl].copy_from_slice(&r[..nv]);
                }
            }
        }
        Ok(())
    }

    fn muscl_guess(
        &self,
        initial: &[T],
        geom: StepGeometry<T>,
        ws: &mut PredictorWorkspace<T>,
        out: &mut [T],
        stats: &mut PicardStats,
    ) -> Result<(), String> {
        let nv = self.sys.nvar();
        let nsp = self.spatial_nodes();
        let n = self.basis.len();
        let len = nsp * nv;
        self.nodal_rates(initial, nsp, geom, ws, stats)?;
        let (rate, growth) = (&ws.rate, &mut ws.next);
        growth[..len].copy_from_slice(&rate[..len]);
        if self.sys.has_source() && self.variables == PredictorVariables::Primitive {
            // replace the explicit source by its trapezoidal average
            for sp in 0..nsp {
                let sl = sp * nv..(sp + 1) * nv;
                let mut end = zero_state::<T>();
                for c in 0..nv {
                    end[c] = initial[sp * nv + c] + growth[sp * nv + c];
                }
                if self.sys.admissible(&end[..nv]).is_err() {
                    continue;
                }
                let mut s0 = zero_state::<T>();
                let mut s1 = zero_state::<T>();
                primitive_rate(self.sys, &initial[sl.clone()], geom.dt, &[], &[], &mut s0[..nv])
                    .map_err(|e| e.reason)?;
                primitive_rate(self.sys, &end[..nv], geom.dt, &[], &[], &mut s1[..nv]).map_err(|e| e.reason)?;
                for c in 0..nv {
                    growth[sp * nv + c] += T::lit(0.5) * (s1[c] - s0[c]);
                }
            }
        }
        let tau = self.basis.nodes();
        for a in 0..n {
            for k in 0..len {
                out[a * len + k] = initial[k] + tau[a] * growth[k];
            }
        }
        Ok(())
    }

    fn iterate(
        &self,
        initial: &[T],
        geom: StepGeometry<T>,
        ws: &mut PredictorWorkspace<T>,
        out: &mut [T],
        stats: &mut PicardStats,
    ) -> Result<(), String> {
        let nv = self.sys.nvar();
        let nsp = self.spatial_nodes();
        let n = self.basis.len();
        let nst = nsp * n;
        let len = nst * nv;
        let p = &self.ops.picard;
        stats.converged = false;
        for it in 0..self.settings.max_iterations {
            self.nodal_rates(&out[..len], nst, geom, ws, stats)?;
            let mut change = T::zero();
            let mut size = T::zero();
            for sp in 0..nsp {
                for a in 0..n {
                    let o = (sp + nsp * a) * nv;
                    for v in 0..nv {
                        let mut acc = initial[sp * nv + v];
                        for b in 0..n {
                            acc += p[(a, b)] * ws.rate[(sp + nsp * b) * nv + v];
                        }
                        ws.next[o + v] = acc;
                        change = change.max((acc - out[o + v]).abs());
                        size = size.max(acc.abs());
                    }
                }
            }
            out[..len].copy_from_slice(&ws.next[..len]);
            stats.iterations = it + 1;
            if !change.is_finite() {
                return Err("non-finite predictor iterate".into());
            }
            if self.variables == PredictorVariables::Primitive {
                for k in 0..nst {
                    self.sys
                        .admissible(&out[k * nv..(k + 1) * nv])
                        .map_err(|e| format!("node {k}: {}", e.reason))?;
                }
            }
            if change <= self.settings.tolerance * size.max(T::min_positive_value()) {
                stats.converged = true;
                break;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{Euler, Rmhd};

    fn setup(m: usize) -> (NodalBasis<f64>, PredictorOperators<f64>) {
        let b = NodalBasis::new(m).unwrap();
        let o = PredictorOperators::new(&b).unwrap();
        (b, o)
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let sys = Euler::<f64>::new(1.4);
        let (b, ops) = setup(3);
        for dims in 1..=2 {
            let pred = CellPredictor {
                sys: &sys,
                basis: &b,
                ops: &ops,
                dims,
                variables: PredictorVariables::Primitive,
                settings: PicardSettings::for_degree(3),
            };
            let nsp = pred.spatial_nodes();
            let state = [1.2, 0.3, -0.2, 0.0, 0.9];
            let init: Vec<f64> = (0..nsp).flat_map(|_| state).collect();
            let mut out = vec![0.0; pred.spacetime_nodes() * 5];
            let mut ws = PredictorWorkspace::new(out.len());
            let geom = StepGeometry { dt: 0.1, ratio: [1.0, 1.0] };
            let stats = pred
                .predict(&init, geom, InitialGuess::MusclCn, &mut ws, &mut out, None)
                .unwrap();
            assert!(stats.converged);
            for node in out.chunks(5) {
                for (a, b) in node.iter().zip(state) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn stiff_cleaning_source_follows_exponential_decay() {
        // Phi' = -kappa Phi, exact value at the time nodes
        let sys = Rmhd::<f64>::new(5.0 / 3.0, 10.0);
        let m = 3;
        let (b, ops) = setup(m);
        let pred = CellPredictor {
            sys: &sys,
            basis: &b,
            ops: &ops,
            dims: 1,
            variables: PredictorVariables::Primitive,
            settings: PicardSettings { max_iterations: 40, tolerance: 1e-14 },
        };
        let mut errs = Vec::new();
        for dt in [0.05, 0.025, 0.0125] {
            let state = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.2];
            let init: Vec<f64> = (0..m + 1).flat_map(|_| state).collect();
            let mut out = vec![0.0; (m + 1) * (m + 1) * 9];
            let mut ws = PredictorWorkspace::new(out.len());
            let geom = StepGeometry { dt, ratio: [1.0, 0.0] };
            pred.predict(&init, geom, InitialGuess::Constant, &mut ws, &mut out, None).unwrap();
            let mut err: f64 = 0.0;
            for a in 0..=m {
                let exact = 0.2 * (-10.0 * dt * b.nodes()[a]).exp();
                err = err.max((out[(a * (m + 1)) * 9 + 8] - exact).abs());
            }
            errs.push(err);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > m as f64 + 1.0 - 0.3, "errors {errs:?}");
        }
    }

    #[test]
    fn linear_advection_of_smooth_profile() {
        // Euler with uniform velocity and pressure advects density exactly
        let sys = Euler::<f64>::new(1.4);
        let m = 3;
        let (b, ops) = setup(m);
        let pred = CellPredictor {
            sys: &sys,
            basis: &b,
            ops: &ops,
            dims: 1,
            variables: PredictorVariables::Primitive,
            settings: PicardSettings { max_iterations: 60, tolerance: 1e-14 },
        };
        let (u, dx, dt) = (1.0, 0.1, 0.02);
        let rho = |x: f64| 1.0 + 0.2 * x;
        let init: Vec<f64> = b.nodes().iter().flat_map(|&xi| [rho(xi * dx), u, 0.0, 0.0, 1.0]).collect();
        let mut out = vec![0.0; (m + 1) * (m + 1) * 5];
        let mut ws = PredictorWorkspace::new(out.len());
        let geom = StepGeometry { dt, ratio: [dt / dx, 0.0] };
        let st = pred.predict(&init, geom, InitialGuess::MusclCn, &mut ws, &mut out, None).unwrap();
        assert!(st.converged);
        for a in 0..=m {
            for (i, &xi) in b.nodes().iter().enumerate() {
                let t = dt * b.nodes()[a];
                let v = out[(i + (m + 1) * a) * 5];
                assert!((v - rho(xi * dx - u * t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conserved_variant_matches_primitive_for_linear_problem() {
        let sys = Euler::<f64>::new(1.4);
        let m = 2;
        let (b, ops) = setup(m);
        let mk = |variables| CellPredictor {
            sys: &sys,
            basis: &b,
            ops: &ops,
            dims: 1,
            variables,
            settings: PicardSettings { max_iterations: 60, tolerance: 1e-14 },
        };
        let prim: Vec<f64> = b.nodes().iter().flat_map(|&xi| [1.0 + 0.1 * xi, 0.5, 0.0, 0.0, 1.0]).collect();
        let mut cons = vec![0.0; prim.len()];
        for (v, q) in prim.chunks(5).zip(cons.chunks_mut(5)) {
            sys.prim_to_cons(v, q);
        }
        let geom = StepGeometry { dt: 0.01, ratio: [0.1, 0.0] };
        let len = (m + 1) * (m + 1) * 5;
        let mut ws = PredictorWorkspace::new(len);
        let mut outp = vec![0.0; len];
        mk(PredictorVariables::Primitive)
            .predict(&prim, geom, InitialGuess::Constant, &mut ws, &mut outp, None)
            .unwrap();
        let mut outq = vec![0.0; len];
        let mut outv = vec![0.0; len];
        let st = mk(PredictorVariables::Conserved)
            .predict(&cons, geom, InitialGuess::Constant, &mut ws, &mut outq, Some(&mut outv))
            .unwrap();
        assert!(st.conversions >= (len / 5) as u64);
        for (a, b) in outp.iter().zip(&outv) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
