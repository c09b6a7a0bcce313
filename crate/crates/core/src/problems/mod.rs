//! Initial and boundary data of the benchmark problems, exact solutions and
//! error analysis.

pub mod alfven;
pub mod analysis;
pub mod reference;
pub mod riemann_euler;
pub mod riemann_rhd;

use crate::boundary::{cell_average, Boundary, BoundarySet, StateFn};
use crate::error::{Error, Result};
use crate::fluxes::FluxKind;
use crate::grid::Grid;
use crate::predictor::GuessKind;
use crate::real::Real;
use crate::solver::{Pipeline, SchemeConfig, Solver, VelocityVariable};
use crate::systems::{BaerNunziato, Euler, HyperbolicSystem, Rhd, Rmhd, SystemSpec};
use alfven::AlfvenWave;
use riemann_euler::ExactEuler;
use riemann_rhd::ExactRhd;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

/// Primitive state at `(x, y)`.
pub type PrimFn = Arc<dyn Fn(f64, f64, &mut [f64]) + Send + Sync>;
/// Primitive state at `(x, y, t)`.
pub type ExactFn = Arc<dyn Fn(f64, f64, f64, &mut [f64]) + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Euler,
    Rhd,
    Rmhd,
    BaerNunziato,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Euler => "euler",
            Self::Rhd => "rhd",
            Self::Rmhd => "rmhd",
            Self::BaerNunziato => "bn",
        }
    }
}

/// Physical parameters of a system.
#[derive(Clone, Debug, PartialEq)]
pub struct Physics {
    pub kind: SystemKind,
    pub gamma: f64,
    /// Divergence-cleaning damping rate.
    pub kappa: f64,
    /// Solid and gas adiabatic indices.
    pub phase_gamma: [f64; 2],
    /// Solid and gas stiffening pressures.
    pub phase_pi: [f64; 2],
    pub friction: f64,
    pub relaxation: f64,
}

impl Physics {
    pub fn new(kind: SystemKind, gamma: f64) -> Self {
        Self {
            kind,
            gamma,
            kappa: 10.0,
            phase_gamma: [1.4, 1.4],
            phase_pi: [0.0, 0.0],
            friction: 0.0,
            relaxation: 0.0,
        }
    }

    pub fn build<T: Real>(&self) -> SystemSpec<T> {
        match self.kind {
            SystemKind::Euler => SystemSpec::Euler(Euler::new(self.gamma)),
            SystemKind::Rhd => SystemSpec::Rhd(Rhd::new(self.gamma)),
            SystemKind::Rmhd => SystemSpec::Rmhd(Rmhd::new(self.gamma, self.kappa)),
            SystemKind::BaerNunziato => SystemSpec::BaerNunziato(
                BaerNunziato::new(self.phase_gamma[0], self.phase_pi[0], self.phase_gamma[1], self.phase_pi[1])
                    .with_relaxation(self.friction, self.relaxation),
            ),
        }
    }
}

/// Optional physical parameter overrides.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhysicsOverrides {
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub friction: Option<f64>,
    pub relaxation: Option<f64>,
}

/// Recommended scheme settings of a problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeDefaults {
    pub degree: usize,
    pub flux: FluxKind,
    pub guess: GuessKind,
    pub velocity: VelocityVariable,
    pub cfl: f64,
}

impl SchemeDefaults {
    pub fn scheme<T: Real>(&self, pipeline: Pipeline) -> SchemeConfig<T> {
        let mut s = SchemeConfig::new(self.degree);
        s.pipeline = pipeline;
        s.flux = self.flux;
        s.guess = self.guess;
        s.velocity = self.velocity;
        s.cfl = T::lit(self.cfl);
        s
    }
}

#[derive(Clone)]
pub enum ReferenceKind {
    /// Closed-form solution.
    Analytic(ExactFn),
    /// Exact Riemann solution, sampled in `x` only.
    ExactRiemann(ExactFn),
    /// Sampled profile file.
    File(PathBuf),
    None,
}

impl std::fmt::Debug for ReferenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Analytic(_) => f.write_str("analytic"),
            Self::ExactRiemann(_) => f.write_str("exact-riemann"),
            Self::File(p) => write!(f, "file({})", p.display()),
            Self::None => f.write_str("none"),
        }
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub id: String,
    pub physics: Physics,
    pub dims: usize,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub t_final: f64,
    pub boundaries: BoundarySet<f64>,
    pub initial: PrimFn,
    pub reference: ReferenceKind,
    pub defaults: SchemeDefaults,
    /// Variable of convergence and error studies.
    pub error_variable: &'static str,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("physics", &self.physics)
            .field("dims", &self.dims)
            .field("x", &self.x)
            .field("y", &self.y)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("t_final", &self.t_final)
            .field("boundaries", &self.boundaries)
            .field("reference", &self.reference)
            .finish()
    }
}

/// Identifiers accepted by [`problem`].
pub const PROBLEMS: &[&str] = &[
    "uniform", "vortex", "sod", "blast", "dmr", "rhd-rp1", "rhd-rp2", "rhd-kh", "alfven", "alfven-1d", "rmhd-rp1",
    "rmhd-rp2", "rotor", "bnrp1", "bnrp2", "bnrp3", "bnrp5", "bnrp6",
];

/// Directory holding the shipped reference profiles.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

impl ProblemSpec {
    pub fn grid<T: Real>(&self, nx: usize, ny: usize) -> Result<Grid<T>> {
        Grid::new(
            self.dims,
            nx,
            ny,
            [T::lit(self.x[0]), T::lit(self.x[1])],
            [T::lit(self.y[0]), T::lit(self.y[1])],
        )
    }

    pub fn system<T: Real>(&self) -> SystemSpec<T> {
        self.physics.build()
    }

    /// Conserved cell averages of the initial data by the three-point rule
    /// per axis.
    pub fn initial_average<T: Real>(&self, sys: &SystemSpec<T>, grid: &Grid<T>, i: isize, j: isize, q: &mut [T]) {
        let nv = sys.nvar();
        let init = &self.initial;
        cell_average(grid, i, j, nv, q, |x, y, out| {
            let mut v = [0.0f64; crate::linalg::MAX_VARS];
            init(x.to_f64_lossy(), y.to_f64_lossy(), &mut v[..nv]);
            let mut vt = crate::systems::zero_state::<T>();
            for k in 0..nv {
                vt[k] = T::lit(v[k]);
            }
            sys.prim_to_cons(&vt[..nv], out);
        });
    }

    pub fn solver<T: Real>(&self, scheme: SchemeConfig<T>, nx: usize, ny: usize) -> Result<Solver<T>> {
        let sys = self.system::<T>();
        let grid = self.grid::<T>(nx, ny)?;
        let bcs = cast_boundaries(&self.boundaries);
        let (s2, g2) = (sys.clone(), grid.clone());
        Solver::new(sys, grid, bcs, scheme, |i, j, q| self.initial_average(&s2, &g2, i, j, q))
    }

    /// Exact primitive solution at `(x, y, t)` if one is known.
    pub fn exact(&self) -> Option<&ExactFn> {
        match &self.reference {
            ReferenceKind::Analytic(f) | ReferenceKind::ExactRiemann(f) => Some(f),
            _ => None,
        }
    }

    pub fn with_boundaries(mut self, b: BoundarySet<f64>) -> Self {
        self.boundaries = b;
        self
    }
}

fn cast_boundary<T: Real>(b: &Boundary<f64>) -> Boundary<T> {
    match b {
        Boundary::Periodic => Boundary::Periodic,
        Boundary::Outflow => Boundary::Outflow,
        Boundary::Reflecting => Boundary::Reflecting,
        Boundary::Dirichlet(f) => {
            let f = f.clone();
            let g: StateFn<T> = Arc::new(move |x: T, y: T, t: T, out: &mut [T]| {
                let mut v = [0.0f64; crate::linalg::MAX_VARS];
                let n = out.len();
                f(x.to_f64_lossy(), y.to_f64_lossy(), t.to_f64_lossy(), &mut v[..n]);
                for k in 0..n {
                    out[k] = T::lit(v[k]);
                }
            });
            Boundary::Dirichlet(g)
        }
        Boundary::Split { at, before, after } => Boundary::Split {
            at: T::lit(*at),
            before: Box::new(cast_boundary(before)),
            after: Box::new(cast_boundary(after)),
        },
    }
}

pub fn cast_boundaries<T: Real>(b: &BoundarySet<f64>) -> BoundarySet<T> {
    BoundarySet {
        left: cast_boundary(&b.left),
        right: cast_boundary(&b.right),
        bottom: cast_boundary(&b.bottom),
        top: cast_boundary(&b.top),
    }
}

fn defaults(degree: usize, flux: FluxKind) -> SchemeDefaults {
    SchemeDefaults {
        degree,
        flux,
        guess: GuessKind::MusclCn,
        velocity: VelocityVariable::Velocity,
        cfl: 0.5,
    }
}

/// Two constant states split at `x0`.
fn riemann_data(x0: f64, left: Vec<f64>, right: Vec<f64>) -> PrimFn {
    Arc::new(move |x, _, out| out.copy_from_slice(if x < x0 { &left } else { &right }))
}

fn one_d(id: &str, physics: Physics, x: [f64; 2], nx: usize, t_final: f64, initial: PrimFn, bc: Boundary<f64>) -> ProblemSpec {
    ProblemSpec {
        id: id.to_string(),
        physics,
        dims: 1,
        x,
        y: [0.0, 1.0],
        nx,
        ny: 1,
        t_final,
        boundaries: BoundarySet::uniform(bc),
        initial,
        reference: ReferenceKind::None,
        defaults: defaults(3, FluxKind::Rusanov),
        error_variable: "rho",
    }
}

/// Looks up a problem by identifier, applying physical overrides.
pub fn problem(id: &str, overrides: &PhysicsOverrides) -> Result<ProblemSpec> {
    let with = |mut p: Physics| {
        if let Some(g) = overrides.gamma {
            p.gamma = g;
        }
        if let Some(k) = overrides.kappa {
            p.kappa = k;
        }
        if let Some(f) = overrides.friction {
            p.friction = f;
        }
        if let Some(r) = overrides.relaxation {
            p.relaxation = r;
        }
        p
    };
    let spec = match id {
        "uniform" => {
            let ph = with(Physics::new(SystemKind::Euler, 1.4));
            let init: PrimFn = Arc::new(|_, _, out| out.copy_from_slice(&[1.0, 0.5, 0.0, 0.0, 1.0]));
            let mut p = one_d(id, ph, [0.0, 1.0], 50, 0.1, init.clone(), Boundary::Periodic);
            p.reference = ReferenceKind::Analytic(Arc::new(move |x, y, _, out| init(x, y, out)));
            p
        }
        "vortex" => vortex(with(Physics::new(SystemKind::Euler, 1.4))),
        "sod" => {
            let ph = with(Physics::new(SystemKind::Euler, 1.4));
            euler_riemann(id, ph, [0.0, 1.0], 0.5, [1.0, 0.0, 1.0], [0.125, 0.0, 0.1], 400, 0.2)?
        }
        "blast" => {
            let ph = with(Physics::new(SystemKind::Euler, 1.4));
            let init: PrimFn = Arc::new(|x, _, out| {
                let p = if x < -0.4 {
                    1e3
                } else if x < 0.4 {
                    1e-2
                } else {
                    1e2
                };
                out.copy_from_slice(&[1.0, 0.0, 0.0, 0.0, p]);
            });
            one_d(id, ph, [-0.5, 0.5], 500, 0.038, init, Boundary::Reflecting)
        }
        "dmr" => double_mach(with(Physics::new(SystemKind::Euler, 1.4))),
        "rhd-rp1" => {
            let ph = with(Physics::new(SystemKind::Rhd, 5.0 / 3.0));
            rhd_riemann(id, ph, [1.0, -0.6, 10.0], [10.0, 0.5, 20.0], 300, 3)?
        }
        "rhd-rp2" => {
            let ph = with(Physics::new(SystemKind::Rhd, 5.0 / 3.0));
            let mut p = rhd_riemann(id, ph, [1e-3, 0.0, 1.0], [1e-3, 0.0, 1e-5], 500, 2)?;
            p.defaults.cfl = 0.3;
            p
        }
        "rhd-kh" => kelvin_helmholtz(with(Physics::new(SystemKind::Rhd, 4.0 / 3.0))),
        "alfven" | "alfven-1d" => alfven(id, with(Physics::new(SystemKind::Rmhd, 5.0 / 3.0))),
        "rmhd-rp1" => {
            let ph = with(Physics::new(SystemKind::Rmhd, 2.0));
            rmhd_riemann(
                id,
                ph,
                vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 1.0, 0.0, 0.0],
                vec![0.125, 0.0, 0.0, 0.0, 0.1, 0.5, -1.0, 0.0, 0.0],
                0.4,
            )
        }
        "rmhd-rp2" => {
            let ph = with(Physics::new(SystemKind::Rmhd, 5.0 / 3.0));
            rmhd_riemann(
                id,
                ph,
                vec![1.08, 0.4, 0.3, 0.2, 0.95, 2.0, 0.3, 0.3, 0.0],
                vec![1.0, -0.45, -0.2, 0.2, 1.0, 2.0, -0.7, 0.5, 0.0],
                0.55,
            )
        }
        "rotor" => rotor(with(Physics::new(SystemKind::Rmhd, 4.0 / 3.0))),
        "bnrp1" => bn_riemann(
            id,
            overrides,
            [1.4, 0.0, 1.4, 0.0],
            [1.0, 0.0, 1.0, 0.5, 0.0, 1.0, 0.4],
            [2.0, 0.0, 2.0, 1.5, 0.0, 2.0, 0.8],
            0.10,
            FluxKind::Osher,
        ),
        "bnrp2" => bn_riemann(
            id,
            overrides,
            [3.0, 100.0, 1.4, 0.0],
            [800.0, 0.0, 500.0, 1.5, 0.0, 2.0, 0.4],
            [1000.0, 0.0, 600.0, 1.0, 0.0, 1.0, 0.3],
            0.10,
            FluxKind::Osher,
        ),
        "bnrp3" => bn_riemann(
            id,
            overrides,
            [1.4, 0.0, 1.4, 0.0],
            [1.0, 0.9, 2.5, 1.0, 0.0, 1.0, 0.9],
            [1.0, 0.0, 1.0, 1.2, 1.0, 2.0, 0.2],
            0.10,
            FluxKind::Osher,
        ),
        "bnrp5" => bn_riemann(
            id,
            overrides,
            [1.4, 0.0, 1.4, 0.0],
            [1.0, 0.0, 1.0, 0.2, 0.0, 0.3, 0.8],
            [1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.3],
            0.20,
            FluxKind::Rusanov,
        ),
        "bnrp6" => bn_riemann(
            id,
            overrides,
            [1.4, 0.0, 1.4, 0.0],
            [0.2068, 1.4166, 0.0416, 0.5806, 1.5833, 1.375, 0.1],
            [2.2263, 0.9366, 6.0, 0.4890, -0.70138, 0.986, 0.2],
            0.10,
            FluxKind::Osher,
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown problem '{other}', expected one of: {}",
                PROBLEMS.join(", ")
            )))
        }
    };
    Ok(spec)
}

fn vortex(ph: Physics) -> ProblemSpec {
    let g = ph.gamma;
    let eps = 5.0;
    let state = move |x: f64, y: f64, t: f64, out: &mut [f64]| {
        let wrap = |d: f64| d - 10.0 * ((d + 5.0) / 10.0).floor();
        let dx = wrap(x - 5.0 - t);
        let dy = wrap(y - 5.0 - t);
        let r2 = dx * dx + dy * dy;
        let dt = -eps * eps * (g - 1.0) / (8.0 * g * PI * PI) * (1.0 - r2).exp();
        let e = eps / (2.0 * PI) * (0.5 * (1.0 - r2)).exp();
        out.copy_from_slice(&[
            (1.0 + dt).powf(1.0 / (g - 1.0)),
            1.0 - dy * e,
            1.0 + dx * e,
            0.0,
            (1.0 + dt).powf(g / (g - 1.0)),
        ]);
    };
    ProblemSpec {
        id: "vortex".into(),
        physics: ph,
        dims: 2,
        x: [0.0, 10.0],
        y: [0.0, 10.0],
        nx: 100,
        ny: 100,
        t_final: 1.0,
        boundaries: BoundarySet::uniform(Boundary::Periodic),
        initial: Arc::new(move |x, y, out| state(x, y, 0.0, out)),
        reference: ReferenceKind::Analytic(Arc::new(state)),
        defaults: defaults(2, FluxKind::Osher),
        error_variable: "rho",
    }
}

#[allow(clippy::too_many_arguments)]
fn euler_riemann(
    id: &str,
    ph: Physics,
    x: [f64; 2],
    x0: f64,
    left: [f64; 3],
    right: [f64; 3],
    nx: usize,
    t_final: f64,
) -> Result<ProblemSpec> {
    let rp = ExactEuler::new(left, right, ph.gamma)?;
    let init = riemann_data(x0, vec![left[0], left[1], 0.0, 0.0, left[2]], vec![right[0], right[1], 0.0, 0.0, right[2]]);
    let mut p = one_d(id, ph, x, nx, t_final, init, Boundary::Outflow);
    p.reference = ReferenceKind::ExactRiemann(Arc::new(move |x, _, t, out| {
        let s = if t > 0.0 {
            rp.sample((x - x0) / t)
        } else if x < x0 {
            left
        } else {
            right
        };
        out.copy_from_slice(&[s[0], s[1], 0.0, 0.0, s[2]]);
    }));
    Ok(p)
}

fn rhd_riemann(id: &str, ph: Physics, left: [f64; 3], right: [f64; 3], nx: usize, degree: usize) -> Result<ProblemSpec> {
    let rp = ExactRhd::new(left, right, ph.gamma)?;
    let init = riemann_data(0.0, vec![left[0], left[1], 0.0, 0.0, left[2]], vec![right[0], right[1], 0.0, 0.0, right[2]]);
    let mut p = one_d(id, ph, [-0.5, 0.5], nx, 0.4, init, Boundary::Outflow);
    p.defaults.degree = degree;
    p.reference = ReferenceKind::ExactRiemann(Arc::new(move |x, _, t, out| {
        let s = if t > 0.0 {
            rp.sample(x / t)
        } else if x < 0.0 {
            left
        } else {
            right
        };
        out.copy_from_slice(&[s[0], s[1], 0.0, 0.0, s[2]]);
    }));
    Ok(p)
}

fn rmhd_riemann(id: &str, ph: Physics, left: Vec<f64>, right: Vec<f64>, t_final: f64) -> ProblemSpec {
    let mut p = one_d(id, ph, [-0.5, 0.5], 400, t_final, riemann_data(0.0, left, right), Boundary::Outflow);
    p.reference = ReferenceKind::File(data_dir().join(format!("{id}.dat")));
    p
}

/// `left` and `right` are `(rho_s, u_s, p_s, rho_g, u_g, p_g, phi_s)`;
/// `eos` is `(gamma_s, pi_s, gamma_g, pi_g)`.
fn bn_riemann(
    id: &str,
    overrides: &PhysicsOverrides,
    eos: [f64; 4],
    left: [f64; 7],
    right: [f64; 7],
    t_final: f64,
    flux: FluxKind,
) -> ProblemSpec {
    let mut ph = Physics::new(SystemKind::BaerNunziato, eos[0]);
    ph.phase_gamma = [eos[0], eos[2]];
    ph.phase_pi = [eos[1], eos[3]];
    ph.friction = overrides.friction.unwrap_or(0.0);
    ph.relaxation = overrides.relaxation.unwrap_or(0.0);
    let expand = |s: [f64; 7]| vec![s[0], s[1], 0.0, 0.0, s[2], s[3], s[4], 0.0, 0.0, s[5], s[6]];
    let mut p = one_d(id, ph, [-0.5, 0.5], 300, t_final, riemann_data(0.0, expand(left), expand(right)), Boundary::Outflow);
    p.defaults.flux = flux;
    p.error_variable = "rho1";
    p.reference = ReferenceKind::File(data_dir().join(format!("{id}.dat")));
    p
}

fn double_mach(ph: Physics) -> ProblemSpec {
    let g = ph.gamma;
    let s3 = 3f64.sqrt();
    let post = [8.0 / g, 8.25 * 0.5 * s3, -8.25 * 0.5, 0.0, 116.5 / g];
    let pre = [1.0, 0.0, 0.0, 0.0, 1.0 / g];
    let shock = move |y: f64, t: f64| 1.0 / 6.0 + (y + 20.0 * t) / s3;
    let exact = move |x: f64, y: f64, t: f64, out: &mut [f64]| {
        out.copy_from_slice(if x < shock(y, t) { &post } else { &pre });
    };
    let post_state: StateFn<f64> = Arc::new(move |_, _, _, out: &mut [f64]| out.copy_from_slice(&post));
    let moving: StateFn<f64> = Arc::new(exact);
    ProblemSpec {
        id: "dmr".into(),
        physics: ph,
        dims: 2,
        x: [0.0, 3.0],
        y: [0.0, 1.0],
        nx: 1200,
        ny: 300,
        t_final: 0.2,
        boundaries: BoundarySet {
            left: Boundary::Dirichlet(post_state.clone()),
            right: Boundary::Outflow,
            bottom: Boundary::Split {
                at: 1.0 / 6.0,
                before: Box::new(Boundary::Dirichlet(post_state)),
                after: Box::new(Boundary::Reflecting),
            },
            top: Boundary::Dirichlet(moving),
        },
        initial: Arc::new(move |x, y, out| exact(x, y, 0.0, out)),
        reference: ReferenceKind::None,
        defaults: defaults(3, FluxKind::Rusanov),
        error_variable: "rho",
    }
}

fn kelvin_helmholtz(ph: Physics) -> ProblemSpec {
    let (rho0, rho1, vs, a, eta, sigma) = (0.505, 0.495, 0.5, 0.01, 0.1, 0.1);
    let init: PrimFn = Arc::new(move |x, y, out| {
        let (rho, vx, vy) = if y > 0.0 {
            let t = ((y - 0.5) / a).tanh();
            (
                rho0 + rho1 * t,
                vs * t,
                eta * vs * (2.0 * PI * x).sin() * (-(y - 0.5).powi(2) / sigma).exp(),
            )
        } else {
            let t = ((y + 0.5) / a).tanh();
            (
                rho0 - rho1 * t,
                -vs * t,
                -eta * vs * (2.0 * PI * x).sin() * (-(y + 0.5).powi(2) / sigma).exp(),
            )
        };
        out.copy_from_slice(&[rho, vx, vy, 0.0, 1.0]);
    });
    ProblemSpec {
        id: "rhd-kh".into(),
        physics: ph,
        dims: 2,
        x: [-0.5, 0.5],
        y: [-1.0, 1.0],
        nx: 200,
        ny: 400,
        t_final: 2.0,
        boundaries: BoundarySet::uniform(Boundary::Periodic),
        initial: init,
        reference: ReferenceKind::None,
        defaults: defaults(3, FluxKind::Osher),
        error_variable: "rho",
    }
}

fn alfven(id: &str, ph: Physics) -> ProblemSpec {
    let wave = AlfvenWave::new(ph.gamma);
    let two_d = id == "alfven";
    let exact = move |x: f64, _y: f64, t: f64, out: &mut [f64]| wave.state(x, t, out);
    ProblemSpec {
        id: id.into(),
        physics: ph,
        dims: if two_d { 2 } else { 1 },
        x: [0.0, 2.0 * PI],
        y: [0.0, 2.0 * PI],
        nx: 50,
        ny: if two_d { 50 } else { 1 },
        t_final: wave.period(),
        boundaries: BoundarySet::uniform(Boundary::Periodic),
        initial: Arc::new(move |x, y, out| exact(x, y, 0.0, out)),
        reference: ReferenceKind::Analytic(Arc::new(exact)),
        defaults: SchemeDefaults {
            degree: 3,
            flux: FluxKind::Rusanov,
            guess: GuessKind::AdamsBashforth,
            velocity: VelocityVariable::Velocity,
            cfl: if two_d { 0.5 } else { 0.25 },
        },
        error_variable: "By",
    }
}

fn rotor(ph: Physics) -> ProblemSpec {
    let init: PrimFn = Arc::new(|x, y, out| {
        let r = (x * x + y * y).sqrt();
        let (rho, w) = if r <= 0.1 { (10.0, 9.3) } else { (1.0, 0.0) };
        out.copy_from_slice(&[rho, -w * y, w * x, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    });
    ProblemSpec {
        id: "rotor".into(),
        physics: ph,
        dims: 2,
        x: [-0.6, 0.6],
        y: [-0.6, 0.6],
        nx: 300,
        ny: 300,
        t_final: 0.4,
        boundaries: BoundarySet::uniform(Boundary::Outflow),
        initial: init,
        reference: ReferenceKind::None,
        defaults: defaults(3, FluxKind::Rusanov),
        error_variable: "rho",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn every_problem_builds_admissible_averages() {
        for id in PROBLEMS {
            let p = problem(id, &PhysicsOverrides::default()).unwrap();
            let sys = p.system::<f64>();
            let grid = p.grid::<f64>(20, 10).unwrap();
            let mut q = vec![0.0; sys.nvar()];
            let mut v = vec![0.0; sys.nvar()];
            for j in 0..grid.ny as isize {
                for i in 0..grid.nx as isize {
                    p.initial_average(&sys, &grid, i, j, &mut q);
                    sys.cons_to_prim(&q, &mut v).unwrap();
                    sys.admissible(&v).unwrap();
                }
            }
        }
    }

    #[test]
    fn unknown_problem_is_rejected() {
        assert!(problem("nope", &PhysicsOverrides::default()).is_err());
    }

    #[test]
    fn vortex_entropy_is_uniform() {
        let p = problem("vortex", &PhysicsOverrides::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut v = [0.0; 5];
        for _ in 0..200 {
            (p.initial)(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), &mut v);
            assert!((v[4] / v[0].powf(1.4) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_data_match_formulas() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let none = PhysicsOverrides::default();
        let kh = problem("rhd-kh", &none).unwrap();
        let rotor = problem("rotor", &none).unwrap();
        let blast = problem("blast", &none).unwrap();
        for _ in 0..10 {
            let (x, y) = (rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0));
            let mut v = [0.0; 5];
            (kh.initial)(x, y, &mut v);
            let (t, s) = if y > 0.0 { (((y - 0.5) / 0.01f64).tanh(), 1.0) } else { (((y + 0.5) / 0.01f64).tanh(), -1.0) };
            let yc: f64 = if y > 0.0 { y - 0.5 } else { y + 0.5 };
            assert!((v[0] - (0.505 + s * 0.495 * t)).abs() < 1e-14);
            assert!((v[1] - s * 0.5 * t).abs() < 1e-14);
            assert!((v[2] - s * 0.05 * (2.0 * PI * x).sin() * (-yc * yc / 0.1).exp()).abs() < 1e-14);

            let (x, y) = (rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15));
            let mut w = [0.0; 9];
            (rotor.initial)(x, y, &mut w);
            let inside = (x * x + y * y).sqrt() <= 0.1;
            assert_eq!(w[0], if inside { 10.0 } else { 1.0 });
            assert_eq!(w[1], if inside { -9.3 * y } else { 0.0 });
            assert_eq!(w[5], 1.0);

            let x = rng.gen_range(-0.5..0.5);
            (blast.initial)(x, 0.0, &mut v);
            let p = if x < -0.4 { 1e3 } else if x < 0.4 { 1e-2 } else { 1e2 };
            assert_eq!(v[4], p);
        }
    }

    #[test]
    fn double_mach_boundaries_follow_the_shock() {
        let p = problem("dmr", &PhysicsOverrides::default()).unwrap();
        let Boundary::Dirichlet(top) = &p.boundaries.top else {
            panic!("top boundary")
        };
        let mut v = [0.0; 5];
        let xs = 1.0 / 6.0 + (1.0 + 20.0 * 0.1) / 3f64.sqrt();
        top(xs - 0.01, 1.0, 0.1, &mut v);
        assert!((v[0] - 8.0 / 1.4).abs() < 1e-14);
        top(xs + 0.01, 1.0, 0.1, &mut v);
        assert_eq!(v[0], 1.0);
    }
}
