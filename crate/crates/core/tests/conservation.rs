use ader::config::RunConfig;
use ader::driver::Run;
use ader::solver::Pipeline;

/// Totals of the periodic variant of a Riemann problem before and after
/// `steps` steps.
fn periodic_totals(id: &str, pipeline: Pipeline, steps: u64) -> (Vec<f64>, Vec<f64>) {
    let mut cfg = RunConfig::new(id);
    cfg.periodic = true;
    cfg.nx = Some(100);
    cfg.pipeline = pipeline;
    cfg.max_steps = Some(steps);
    let mut run = Run::new(&cfg).unwrap();
    let before = run.solver.totals();
    run.advance_to(1.0, |_, _| {}).unwrap();
    assert_eq!(run.solver.steps() as u64, steps);
    (before, run.solver.totals())
}

#[test]
fn phase_masses_and_total_momentum_are_conserved() {
    for id in ["bnrp1", "bnrp2", "bnrp5"] {
        for pipeline in [Pipeline::Primitive, Pipeline::Conserved] {
            let (a, b) = periodic_totals(id, pipeline, 20);
            for k in [0, 5] {
                assert!((a[k] - b[k]).abs() < 1e-11 * a[k].abs().max(1.0), "{id} {pipeline} component {k}");
            }
            let momentum = |t: &[f64]| t[1] + t[6];
            assert!(
                (momentum(&a) - momentum(&b)).abs() < 1e-10,
                "{id} {pipeline}: {:e}",
                momentum(&a) - momentum(&b)
            );
            // single phase momentum is exchanged through the interface terms
            assert!((a[1] - b[1]).abs() > 1e-12 || id == "bnrp5");
        }
    }
}

#[test]
fn euler_totals_are_conserved_on_periodic_grids() {
    for pipeline in [Pipeline::Primitive, Pipeline::Conserved] {
        let (a, b) = periodic_totals("sod", pipeline, 30);
        for k in 0..5 {
            assert!((a[k] - b[k]).abs() < 1e-12, "{pipeline} {k}");
        }
    }
}
