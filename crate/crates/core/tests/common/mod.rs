#![allow(dead_code)]

use ader::basis::{NodalBasis, PredictorOperators};
use ader::predictor::{CellPredictor, InitialGuess, PicardSettings, PredictorVariables, PredictorWorkspace, StepGeometry};
use ader::problems::{problem, PhysicsOverrides};
use ader::systems::{BaerNunziato, Euler, HyperbolicSystem, Rhd, Rmhd, SystemSpec};
use rand::Rng;

pub fn all_systems() -> Vec<SystemSpec<f64>> {
    vec![
        SystemSpec::Euler(Euler::new(1.4)),
        SystemSpec::Rhd(Rhd::new(5.0 / 3.0)),
        SystemSpec::Rmhd(Rmhd::new(5.0 / 3.0, 10.0)),
        SystemSpec::BaerNunziato(BaerNunziato::new(3.0, 100.0, 1.4, 0.0)),
    ]
}

/// Velocity with |v| <= vmax in a random direction.
fn velocity(rng: &mut impl Rng, vmax: f64) -> [f64; 3] {
    loop {
        let d: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            let s = rng.gen_range(0.0..vmax) / n;
            return [d[0] * s, d[1] * s, d[2] * s];
        }
    }
}

/// Random admissible primitive state; relativistic speeds obey |v| <= 0.99.
pub fn random_state(sys: &SystemSpec<f64>, rng: &mut impl Rng) -> Vec<f64> {
    let mut pos = |lo: f64, hi: f64| 10f64.powf(rng.gen_range(lo..hi));
    match sys {
        SystemSpec::Euler(_) => {
            let (rho, p) = (pos(-2.0, 2.0), pos(-2.0, 2.0));
            let v = velocity(rng, 10.0);
            vec![rho, v[0], v[1], v[2], p]
        }
        SystemSpec::Rhd(_) => {
            let (rho, p) = (pos(-2.0, 2.0), pos(-2.0, 2.0));
            let v = velocity(rng, 0.99);
            vec![rho, v[0], v[1], v[2], p]
        }
        SystemSpec::Rmhd(_) => {
            let (rho, p) = (pos(-1.0, 1.0), pos(-1.0, 1.0));
            let v = velocity(rng, 0.99);
            let b = velocity(rng, 3.0);
            vec![rho, v[0], v[1], v[2], p, b[0], b[1], b[2], rng.gen_range(-0.5..0.5)]
        }
        SystemSpec::BaerNunziato(_) => {
            let (r1, p1, r2, p2) = (pos(2.0, 3.5), pos(-1.0, 3.0), pos(-1.0, 1.0), pos(-1.0, 2.0));
            let (v1, v2) = (velocity(rng, 5.0), velocity(rng, 5.0));
            vec![r1, v1[0], v1[1], v1[2], p1, r2, v2[0], v2[1], v2[2], p2, rng.gen_range(0.01..0.99)]
        }
    }
}

/// Largest relative difference after one conversion cycle.
pub fn roundtrip_defect(sys: &SystemSpec<f64>, v: &[f64]) -> f64 {
    let nv = sys.nvar();
    let mut q = vec![0.0; nv];
    let mut back = vec![0.0; nv];
    sys.prim_to_cons(v, &mut q);
    sys.cons_to_prim(&q, &mut back).expect("admissible state");
    let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    v.iter().zip(&back).map(|(a, b)| (a - b).abs() / scale).fold(0.0, f64::max)
}

/// Predictor error against the exact translating vortex on one cell of
/// width `h`, with `dt = 0.4 h`.
pub fn vortex_predictor_error(m: usize, h: f64) -> f64 {
    let spec = problem("vortex", &PhysicsOverrides::default()).unwrap();
    let exact = spec.exact().unwrap().clone();
    let sys = SystemSpec::Euler(Euler::new(1.4));
    let basis = NodalBasis::<f64>::new(m).unwrap();
    let ops = PredictorOperators::new(&basis).unwrap();
    let pred = CellPredictor {
        sys: &sys,
        basis: &basis,
        ops: &ops,
        dims: 2,
        variables: PredictorVariables::Primitive,
        settings: PicardSettings { max_iterations: 50, tolerance: 1e-14 },
    };
    let n = m + 1;
    let nsp = n * n;
    let (x0, y0) = (5.3, 4.6);
    let dt = 0.4 * h;
    let nodes = basis.nodes().to_vec();
    let mut initial = vec![0.0; nsp * 5];
    for b in 0..n {
        for a in 0..n {
            let k = a + n * b;
            exact(x0 + nodes[a] * h, y0 + nodes[b] * h, 0.0, &mut initial[k * 5..(k + 1) * 5]);
        }
    }
    let mut out = vec![0.0; nsp * n * 5];
    let mut ws = PredictorWorkspace::new(out.len());
    let geom = StepGeometry { dt, ratio: [dt / h, dt / h] };
    pred.predict(&initial, geom, InitialGuess::MusclCn, &mut ws, &mut out, None).unwrap();
    let mut err = 0.0f64;
    let mut v = [0.0; 5];
    for t in 0..n {
        for b in 0..n {
            for a in 0..n {
                let k = a + n * b + nsp * t;
                exact(x0 + nodes[a] * h, y0 + nodes[b] * h, nodes[t] * dt, &mut v);
                for c in 0..5 {
                    err = err.max((out[k * 5 + c] - v[c]).abs());
                }
            }
        }
    }
    err
}
