//! Path-conservative numerical fluxes along the straight segment in
//! primitive variables,
//! `Psi(s) = V_L + s (V_R - V_L)`, integrated with three Gauss–Legendre
//! points.

use crate::basis::{gauss_legendre, QuadratureRule};
use crate::eigen::{abs_matrix_numeric, abs_matrix_spectral};
use crate::error::{Error, Result};
use crate::linalg::SmallMatrix;
use crate::real::Real;
use crate::systems::{flux_jacobian_fd, zero_state, Axis, HyperbolicSystem, SystemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxKind {
    Rusanov,
    Osher,
}

impl std::str::FromStr for FluxKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rusanov" => Ok(Self::Rusanov),
            "osher" => Ok(Self::Osher),
            other => Err(Error::Config(format!("unknown flux '{other}'"))),
        }
    }
}

impl std::fmt::Display for FluxKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rusanov => "rusanov",
            Self::Osher => "osher",
        })
    }
}

/// Face flux evaluator for one system and flux choice.
#[derive(Clone, Debug)]
pub struct FluxEvaluator<T> {
    pub kind: FluxKind,
    path: QuadratureRule<T>,
}

impl<T: Real> FluxEvaluator<T> {
    pub fn new(kind: FluxKind) -> Self {
        Self {
            kind,
            path: gauss_legendre(3).expect("three point rule"),
        }
    }

    /// Computes the conservative flux `flux` and the path jump
    /// `jump = int_0^1 B(Psi) M(Psi) dPsi/ds ds` between the traces `vl`
    /// and `vr`.
    pub fn evaluate<S: HyperbolicSystem<T> + ?Sized>(
        &self,
        sys: &S,
        vl: &[T],
        vr: &[T],
        axis: Axis,
        flux: &mut [T],
        jump: &mut [T],
    ) -> Result<()> {
        let n = sys.nvar();
        let half = T::lit(0.5);
        let mut dv = zero_state::<T>();
        for k in 0..n {
            dv[k] = vr[k] - vl[k];
        }
        let ncp = sys.has_nonconservative();
        jump[..n].iter_mut().for_each(|x| *x = T::zero());
        let mut mtilde = SmallMatrix::zeros(n);
        let mut dissipation = SmallMatrix::zeros(n);
        let mut psi = zero_state::<T>();
        let mut mk = SmallMatrix::zeros(n);
        let mut mdv = zero_state::<T>();
        for (&s, &w) in self.path.nodes.iter().zip(&self.path.weights) {
            for k in 0..n {
                psi[k] = vl[k] + s * dv[k];
            }
            sys.jacobian_m(&psi[..n], &mut mk);
            mtilde.add_scaled(w, &mk);
            if ncp {
                mk.mul_vec(&dv[..n], &mut mdv[..n]);
                let mut b = zero_state::<T>();
                sys.ncp_apply(&psi[..n], axis, &mdv[..n], &mut b[..n]);
                for k in 0..n {
                    jump[k] += w * b[k];
                }
            }
            if self.kind == FluxKind::Osher {
                let abs_a = abs_quasilinear(sys, &psi[..n], axis, &mk)?;
                dissipation.add_scaled(w, &abs_a);
            }
        }
        let mut dq = zero_state::<T>();
        mtilde.mul_vec(&dv[..n], &mut dq[..n]);
        let mut fl = zero_state::<T>();
        let mut fr = zero_state::<T>();
        sys.flux(vl, axis, &mut fl[..n]);
        sys.flux(vr, axis, &mut fr[..n]);
        match self.kind {
            FluxKind::Rusanov => {
                let s = sys.max_signal_speed(vl, axis).max(sys.max_signal_speed(vr, axis));
                for k in 0..n {
                    flux[k] = half * (fl[k] + fr[k]) - half * s * dq[k];
                }
            }
            FluxKind::Osher => {
                let mut d = zero_state::<T>();
                dissipation.mul_vec(&dq[..n], &mut d[..n]);
                for k in 0..n {
                    flux[k] = half * (fl[k] + fr[k]) - half * d[k];
                }
            }
        }
        Ok(())
    }
}

/// `|A|` for `A = (dF/dV + B M) M^-1` at state `v` with `M` given.
pub fn abs_quasilinear<T: Real, S: HyperbolicSystem<T> + ?Sized>(
    sys: &S,
    v: &[T],
    axis: Axis,
    m: &SmallMatrix<T>,
) -> Result<SmallMatrix<T>> {
    let n = sys.nvar();
    let mut a = SmallMatrix::zeros(n);
    flux_jacobian_fd(sys, v, axis, &mut a);
    if sys.has_nonconservative() {
        // B M has a single non-zero column block per system; form it directly
        let b = sys.ncp_matrix(v, axis);
        a.add_scaled(T::one(), &b.matmul(m));
    }
    let minv = m
        .inverse()
        .ok_or_else(|| Error::Flux("singular primitive Jacobian on path".into()))?;
    let a = a.matmul(&minv);
    let mut lam = zero_state::<T>();
    if sys.eigenvalues(v, axis, &mut lam[..n]) {
        Ok(abs_matrix_spectral(&a, &lam[..n]))
    } else {
        abs_matrix_numeric(&a).map_err(|e| Error::Flux(e.to_string()))
    }
}

/// Path-averaged Jacobian `M~ = int_0^1 M(Psi(s)) ds`.
pub fn roe_matrix<T: Real, S: HyperbolicSystem<T> + ?Sized>(sys: &S, vl: &[T], vr: &[T]) -> SmallMatrix<T> {
    let n = sys.nvar();
    let rule = gauss_legendre::<T>(3).expect("three point rule");
    let mut mt = SmallMatrix::zeros(n);
    let mut mk = SmallMatrix::zeros(n);
    let mut psi = zero_state::<T>();
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        for k in 0..n {
            psi[k] = vl[k] + s * (vr[k] - vl[k]);
        }
        sys.jacobian_m(&psi[..n], &mut mk);
        mt.add_scaled(w, &mk);
    }
    mt
}

/// Checks that a flux choice is available for a system.
pub fn validate_flux<T: Real>(sys: &SystemSpec<T>, kind: FluxKind) -> Result<()> {
    if kind == FluxKind::Osher && !sys.supports_osher() {
        return Err(Error::Config(format!(
            "the Osher flux is not available for the {} system",
            sys.name()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{BaerNunziato, Euler, Rhd, Rmhd};

    fn cases() -> Vec<(SystemSpec<f64>, Vec<f64>, Vec<f64>)> {
        vec![
            (
                SystemSpec::Euler(Euler::new(1.4)),
                vec![1.0, 0.75, 0.1, 0.0, 1.0],
                vec![0.125, 0.0, -0.2, 0.0, 0.1],
            ),
            (
                SystemSpec::Rhd(Rhd::new(5.0 / 3.0)),
                vec![1.0, -0.6, 0.0, 0.1, 10.0],
                vec![10.0, 0.5, 0.1, 0.0, 20.0],
            ),
            (
                SystemSpec::Rmhd(Rmhd::new(2.0, 10.0)),
                vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 1.0, 0.0, 0.0],
                vec![0.125, 0.0, 0.0, 0.0, 0.1, 0.5, -1.0, 0.0, 0.1],
            ),
            (
                SystemSpec::BaerNunziato(BaerNunziato::new(1.4, 0.0, 1.4, 0.0)),
                vec![1.0, 0.1, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 0.0, 1.0, 0.4],
                vec![2.0, 0.0, 0.0, 0.0, 2.0, 1.5, -0.1, 0.0, 0.0, 2.0, 0.8],
            ),
        ]
    }

    #[test]
    fn consistency_with_physical_flux() {
        for (sys, vl, _) in cases() {
            let n = sys.nvar();
            for kind in [FluxKind::Rusanov, FluxKind::Osher] {
                if validate_flux(&sys, kind).is_err() {
                    continue;
                }
                let ev = FluxEvaluator::new(kind);
                let mut f = vec![0.0; n];
                let mut d = vec![0.0; n];
                ev.evaluate(&sys, &vl, &vl, Axis::X, &mut f, &mut d).unwrap();
                let mut fe = vec![0.0; n];
                sys.flux(&vl, Axis::X, &mut fe);
                for k in 0..n {
                    assert!((f[k] - fe[k]).abs() < 1e-13 * (1.0 + fe[k].abs()));
                    assert_eq!(d[k], 0.0);
                }
            }
        }
    }

    #[test]
    fn path_jump_is_antisymmetric() {
        for (sys, vl, vr) in cases() {
            let n = sys.nvar();
            let ev = FluxEvaluator::new(FluxKind::Rusanov);
            let (mut f, mut d1, mut d2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            ev.evaluate(&sys, &vl, &vr, Axis::X, &mut f, &mut d1).unwrap();
            ev.evaluate(&sys, &vr, &vl, Axis::X, &mut f, &mut d2).unwrap();
            for k in 0..n {
                assert!((d1[k] + d2[k]).abs() < 1e-14 * (1.0 + d1[k].abs()));
            }
        }
    }

    fn roe_defect(sys: &SystemSpec<f64>, vl: &[f64], vr: &[f64]) -> f64 {
        let n = sys.nvar();
        let mt = roe_matrix(sys, vl, vr);
        let mut ql = vec![0.0; n];
        let mut qr = vec![0.0; n];
        sys.prim_to_cons(vl, &mut ql);
        sys.prim_to_cons(vr, &mut qr);
        let dv: Vec<f64> = vr.iter().zip(vl).map(|(a, b)| a - b).collect();
        let mut dq = vec![0.0; n];
        mt.mul_vec(&dv, &mut dq);
        (0..n)
            .map(|k| (dq[k] - (qr[k] - ql[k])).abs() / (qr[k] - ql[k]).abs().max(1.0))
            .fold(0.0, f64::max)
    }

    #[test]
    fn roe_property_of_path_matrix() {
        let (euler, vl, vr) = cases().swap_remove(0);
        assert!(roe_defect(&euler, &vl, &vr) <= 1e-3);
        for (sys, vl, vr) in cases() {
            let small: Vec<f64> = vl.iter().zip(&vr).map(|(a, b)| a + 0.05 * (b - a)).collect();
            assert!(roe_defect(&sys, &vl, &small) <= 1e-6, "{}", sys.name());
        }
    }

    proptest::proptest! {
        #[test]
        fn roe_property_on_random_euler_pairs(
            r in proptest::array::uniform2(0.1f64..10.0),
            u in proptest::array::uniform2(-2.0f64..2.0),
            w in proptest::array::uniform2(-2.0f64..2.0),
            p in proptest::array::uniform2(0.1f64..10.0),
        ) {
            let sys = SystemSpec::Euler(Euler::new(1.4));
            let vl = [r[0], u[0], w[0], 0.0, p[0]];
            let vr = [r[1], u[1], w[1], 0.0, p[1]];
            proptest::prop_assert!(roe_defect(&sys, &vl, &vr) <= 1e-3);
        }
    }

    #[test]
    fn spectral_and_numeric_absolute_values_agree() {
        for (sys, vl, vr) in cases() {
            if !sys.supports_osher() {
                continue;
            }
            let n = sys.nvar();
            let v: Vec<f64> = vl.iter().zip(&vr).map(|(a, b)| 0.5 * (a + b)).collect();
            let mut m = SmallMatrix::zeros(n);
            sys.jacobian_m(&v, &mut m);
            let spectral = abs_quasilinear(&sys, &v, Axis::X, &m).unwrap();
            let a = crate::systems::conserved_quasilinear_matrix(&sys, &v, Axis::X, &m).unwrap();
            let numeric = abs_matrix_numeric(&a).unwrap();
            let scale = numeric.max_abs();
            for i in 0..n {
                for j in 0..n {
                    assert!(
                        (spectral[(i, j)] - numeric[(i, j)]).abs() < 1e-6 * scale,
                        "{} ({i},{j}) {} vs {}",
                        sys.name(),
                        spectral[(i, j)],
                        numeric[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn osher_is_rejected_for_rmhd() {
        let sys = SystemSpec::<f64>::Rmhd(Rmhd::new(2.0, 10.0));
        assert!(validate_flux(&sys, FluxKind::Osher).is_err());
        assert!(validate_flux(&sys, FluxKind::Rusanov).is_ok());
    }

    #[test]
    fn osher_upwinds_supersonic_flow() {
        // both states supersonic to the right: the flux is the left flux
        let sys = SystemSpec::Euler(Euler::<f64>::new(1.4));
        let vl = [1.0, 3.0, 0.0, 0.0, 1.0];
        let vr = [1.0001, 3.0, 0.0, 0.0, 1.0001];
        let ev = FluxEvaluator::new(FluxKind::Osher);
        let mut f = [0.0; 5];
        let mut d = [0.0; 5];
        ev.evaluate(&sys, &vl, &vr, Axis::X, &mut f, &mut d).unwrap();
        let mut fl = [0.0; 5];
        sys.flux(&vl, Axis::X, &mut fl);
        for k in 0..5 {
            assert!((f[k] - fl[k]).abs() < 1e-6, "{f:?} {fl:?}");
        }
    }
}
