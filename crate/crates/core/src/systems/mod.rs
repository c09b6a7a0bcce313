//! Hyperbolic systems in the form
//! `dQ/dt + div F(V) + B_i(V) M(V) dV/dx_i = S(V)`
//! with `Q = Q(V)` and `M = dQ/dV`.

mod bn;
mod euler;
mod relativistic;
mod rhd;
mod rmhd;

pub use bn::BaerNunziato;
pub use euler::Euler;
pub use relativistic::recover_relativistic;
pub use rhd::Rhd;
pub use rmhd::Rmhd;

use crate::error::RecoveryFailure;
use crate::linalg::{SmallMatrix, MAX_VARS};
use crate::real::Real;

/// Coordinate direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline(always)]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

/// State of a single system at a point: fixed capacity, runtime length.
pub type StateVec<T> = [T; MAX_VARS];

#[inline(always)]
pub fn zero_state<T: Real>() -> StateVec<T> {
    [T::zero(); MAX_VARS]
}

pub trait HyperbolicSystem<T: Real>: Send + Sync {
    fn name(&self) -> &'static str;

    fn nvar(&self) -> usize;

    fn conserved_names(&self) -> &'static [&'static str];

    fn primitive_names(&self) -> &'static [&'static str];

    fn prim_to_cons(&self, v: &[T], q: &mut [T]);

    fn cons_to_prim(&self, q: &[T], v: &mut [T]) -> Result<(), RecoveryFailure>;

    /// Physical flux along `axis`, written in primitive variables.
    fn flux(&self, v: &[T], axis: Axis, f: &mut [T]);

    fn has_nonconservative(&self) -> bool {
        false
    }

    /// `out += B_axis(v) x`
    fn ncp_apply(&self, _v: &[T], _axis: Axis, _x: &[T], _out: &mut [T]) {}

    fn has_source(&self) -> bool {
        false
    }

    fn source(&self, _v: &[T], s: &mut [T]) {
        s[..self.nvar()].iter_mut().for_each(|x| *x = T::zero());
    }

    /// Analytic `M = dQ/dV`.
    fn jacobian_m(&self, v: &[T], m: &mut SmallMatrix<T>);

    fn max_signal_speed(&self, v: &[T], axis: Axis) -> T;

    /// Eigenvalues of the quasi-linear matrix along `axis`, if known in
    /// closed form. Returns `false` when not provided.
    fn eigenvalues(&self, _v: &[T], _axis: Axis, _out: &mut [T]) -> bool {
        false
    }

    /// Checks positivity and sub-luminality of a primitive state.
    fn admissible(&self, v: &[T]) -> Result<(), RecoveryFailure>;

    /// Mirrors a state (primitive or conserved, same slots) across a wall
    /// normal to `axis`.
    fn reflect(&self, state: &mut [T], axis: Axis);

    /// Slots of the three velocity components for relativistic systems.
    fn lorentz_slots(&self) -> Option<[usize; 3]> {
        None
    }

    /// True when the conserved to primitive map needs a root solve.
    fn iterative_recovery(&self) -> bool {
        false
    }

    fn ncp_matrix(&self, v: &[T], axis: Axis) -> SmallMatrix<T> {
        let n = self.nvar();
        let mut b = SmallMatrix::zeros(n);
        let mut e = zero_state::<T>();
        let mut col = zero_state::<T>();
        for j in 0..n {
            e[j] = T::one();
            col[..n].iter_mut().for_each(|c| *c = T::zero());
            self.ncp_apply(v, axis, &e[..n], &mut col[..n]);
            for i in 0..n {
                b[(i, j)] = col[i];
            }
            e[j] = T::zero();
        }
        b
    }
}

/// Runtime choice among the supported systems.
#[derive(Clone, Debug)]
pub enum SystemSpec<T> {
    Euler(Euler<T>),
    Rhd(Rhd<T>),
    Rmhd(Rmhd<T>),
    BaerNunziato(BaerNunziato<T>),
}

macro_rules! dispatch {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            SystemSpec::Euler($s) => $e,
            SystemSpec::Rhd($s) => $e,
            SystemSpec::Rmhd($s) => $e,
            SystemSpec::BaerNunziato($s) => $e,
        }
    };
}

impl<T: Real> SystemSpec<T> {
    /// Whether the Osher flux can be used with this system.
    pub fn supports_osher(&self) -> bool {
        !matches!(self, SystemSpec::Rmhd(_))
    }

    pub fn is_relativistic(&self) -> bool {
        matches!(self, SystemSpec::Rhd(_) | SystemSpec::Rmhd(_))
    }
}

impl<T: Real> HyperbolicSystem<T> for SystemSpec<T> {
    fn name(&self) -> &'static str {
        dispatch!(self, s => s.name())
    }
    #[inline]
    fn nvar(&self) -> usize {
        dispatch!(self, s => s.nvar())
    }
    fn conserved_names(&self) -> &'static [&'static str] {
        dispatch!(self, s => s.conserved_names())
    }
    fn primitive_names(&self) -> &'static [&'static str] {
        dispatch!(self, s => s.primitive_names())
    }
    #[inline]
    fn prim_to_cons(&self, v: &[T], q: &mut [T]) {
        dispatch!(self, s => s.prim_to_cons(v, q))
    }
    #[inline]
    fn cons_to_prim(&self, q: &[T], v: &mut [T]) -> Result<(), RecoveryFailure> {
        dispatch!(self, s => s.cons_to_prim(q, v))
    }
    #[inline]
    fn flux(&self, v: &[T], axis: Axis, f: &mut [T]) {
        dispatch!(self, s => s.flux(v, axis, f))
    }
    #[inline]
    fn has_nonconservative(&self) -> bool {
        dispatch!(self, s => s.has_nonconservative())
    }
    #[inline]
    fn ncp_apply(&self, v: &[T], axis: Axis, x: &[T], out: &mut [T]) {
        dispatch!(self, s => s.ncp_apply(v, axis, x, out))
    }
    #[inline]
    fn has_source(&self) -> bool {
        dispatch!(self, s => s.has_source())
    }
    #[inline]
    fn source(&self, v: &[T], out: &mut [T]) {
        dispatch!(self, s => s.source(v, out))
    }
    #[inline]
    fn jacobian_m(&self, v: &[T], m: &mut SmallMatrix<T>) {
        dispatch!(self, s => s.jacobian_m(v, m))
    }
    #[inline]
    fn max_signal_speed(&self, v: &[T], axis: Axis) -> T {
        dispatch!(self, s => s.max_signal_speed(v, axis))
    }
    #[inline]
    fn eigenvalues(&self, v: &[T], axis: Axis, out: &mut [T]) -> bool {
        dispatch!(self, s => s.eigenvalues(v, axis, out))
    }
    #[inline]
    fn admissible(&self, v: &[T]) -> Result<(), RecoveryFailure> {
        dispatch!(self, s => s.admissible(v))
    }
    #[inline]
    fn reflect(&self, state: &mut [T], axis: Axis) {
        dispatch!(self, s => s.reflect(state, axis))
    }
    fn lorentz_slots(&self) -> Option<[usize; 3]> {
        dispatch!(self, s => s.lorentz_slots())
    }
    fn iterative_recovery(&self) -> bool {
        dispatch!(self, s => s.iterative_recovery())
    }
}

/// Computes `M^-1 (source_scale S - sum_i (dflux_i + B_i M dv_i))`.
///
/// `dflux[i]` and `dv[i]` are the (already scaled) derivatives along axis
/// `i`; `dv` may be empty for systems without non-conservative products.
pub fn primitive_rate<T: Real, S: HyperbolicSystem<T> + ?Sized>(
    sys: &S,
    v: &[T],
    source_scale: T,
    dflux: &[&[T]],
    dv: &[&[T]],
    out: &mut [T],
) -> Result<(), RecoveryFailure> {
    let n = sys.nvar();
    let mut m = SmallMatrix::zeros(n);
    sys.jacobian_m(v, &mut m);
    let mut rhs = zero_state::<T>();
    if sys.has_source() && source_scale != T::zero() {
        sys.source(v, &mut rhs[..n]);
        for r in rhs[..n].iter_mut() {
            *r *= source_scale;
        }
    }
    for df in dflux {
        for k in 0..n {
            rhs[k] -= df[k];
        }
    }
    if sys.has_nonconservative() {
        let mut mdv = zero_state::<T>();
        let mut bmdv = zero_state::<T>();
        for (i, d) in dv.iter().enumerate() {
            m.mul_vec(d, &mut mdv[..n]);
            bmdv[..n].iter_mut().for_each(|x| *x = T::zero());
            sys.ncp_apply(v, Axis::from_index(i), &mdv[..n], &mut bmdv[..n]);
            for k in 0..n {
                rhs[k] -= bmdv[k];
            }
        }
    }
    let lu = m
        .lu()
        .ok_or_else(|| RecoveryFailure::new("singular primitive Jacobian"))?;
    lu.solve_in_place(&mut rhs[..n]);
    out[..n].copy_from_slice(&rhs[..n]);
    Ok(())
}

/// `C_grad = sum_i M^-1 (dflux_i + B_i M dv_i)`, the quasi-linear operator
/// applied to caller-supplied derivatives.
pub fn quasilinear_apply<T: Real, S: HyperbolicSystem<T> + ?Sized>(
    sys: &S,
    v: &[T],
    dflux: &[&[T]],
    dv: &[&[T]],
    out: &mut [T],
) -> Result<(), RecoveryFailure> {
    primitive_rate(sys, v, T::zero(), dflux, dv, out)?;
    for o in out[..sys.nvar()].iter_mut() {
        *o = -*o;
    }
    Ok(())
}

/// Central finite-difference approximation of `dQ/dV`.
pub fn jacobian_m_fd<T: Real, S: HyperbolicSystem<T> + ?Sized>(sys: &S, v: &[T]) -> SmallMatrix<T> {
    let n = sys.nvar();
    let mut m = SmallMatrix::zeros(n);
    let mut vp = zero_state::<T>();
    let mut qp = zero_state::<T>();
    let mut qm = zero_state::<T>();
    for j in 0..n {
        let h = T::lit(1e-7).max(T::lit(1e-7) * v[j].abs());
        vp[..n].copy_from_slice(&v[..n]);
        vp[j] = v[j] + h;
        sys.prim_to_cons(&vp[..n], &mut qp[..n]);
        vp[j] = v[j] - h;
        sys.prim_to_cons(&vp[..n], &mut qm[..n]);
        for i in 0..n {
            m[(i, j)] = (qp[i] - qm[i]) / (h + h);
        }
    }
    m
}

/// Central finite-difference approximation of `dF/dV` along `axis`.
pub fn flux_jacobian_fd<T: Real, S: HyperbolicSystem<T> + ?Sized>(
    sys: &S,
    v: &[T],
    axis: Axis,
    out: &mut SmallMatrix<T>,
) {
    let n = sys.nvar();
    let rel = T::epsilon().cbrt();
    let mut vp = zero_state::<T>();
    let mut fp = zero_state::<T>();
    let mut fm = zero_state::<T>();
    vp[..n].copy_from_slice(&v[..n]);
    for j in 0..n {
        let h = rel * T::one().max(v[j].abs());
        vp[j] = v[j] + h;
        sys.flux(&vp[..n], axis, &mut fp[..n]);
        vp[j] = v[j] - h;
        sys.flux(&vp[..n], axis, &mut fm[..n]);
        vp[j] = v[j];
        let inv = T::one() / (h + h);
        for i in 0..n {
            out[(i, j)] = (fp[i] - fm[i]) * inv;
        }
    }
}

/// Quasi-linear matrix in conserved form, `A = (dF/dV + B M) M^-1`.
pub fn conserved_quasilinear_matrix<T: Real, S: HyperbolicSystem<T> + ?Sized>(
    sys: &S,
    v: &[T],
    axis: Axis,
    m: &SmallMatrix<T>,
) -> Option<SmallMatrix<T>> {
    let n = sys.nvar();
    let mut df = SmallMatrix::zeros(n);
    flux_jacobian_fd(sys, v, axis, &mut df);
    if sys.has_nonconservative() {
        let b = sys.ncp_matrix(v, axis);
        df.add_scaled(T::one(), &b.matmul(m));
    }
    let minv = m.inverse()?;
    Some(df.matmul(&minv))
}

#[inline(always)]
pub(crate) fn dot3<T: Real>(a: &[T], b: &[T]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline(always)]
pub(crate) fn finite_state<T: Real>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn systems() -> Vec<(SystemSpec<f64>, Vec<f64>)> {
        vec![
            (
                SystemSpec::Euler(Euler::new(1.4)),
                vec![1.3, 0.2, -0.4, 0.1, 2.1],
            ),
            (
                SystemSpec::Rhd(Rhd::new(5.0 / 3.0)),
                vec![0.9, 0.3, -0.5, 0.2, 1.7],
            ),
            (
                SystemSpec::Rmhd(Rmhd::new(5.0 / 3.0, 10.0)),
                vec![1.1, 0.2, 0.1, -0.3, 0.8, 0.7, -0.4, 0.9, 0.05],
            ),
            (
                SystemSpec::BaerNunziato(BaerNunziato::new(3.0, 100.0, 1.4, 0.0)),
                vec![900.0, 0.3, -0.1, 0.05, 550.0, 1.2, -0.4, 0.2, 0.1, 1.5, 0.35],
            ),
        ]
    }

    #[test]
    fn analytic_m_matches_finite_differences() {
        for (sys, v) in systems() {
            let n = sys.nvar();
            let mut m = SmallMatrix::zeros(n);
            sys.jacobian_m(&v, &mut m);
            let fd = jacobian_m_fd(&sys, &v);
            for i in 0..n {
                for j in 0..n {
                    let scale = 1.0f64.max(m[(i, j)].abs());
                    assert!(
                        (m[(i, j)] - fd[(i, j)]).abs() < 1e-6 * scale,
                        "{} M[{i}][{j}] analytic {} fd {}",
                        sys.name(),
                        m[(i, j)],
                        fd[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn analytic_eigenvalues_match_numeric_spectrum() {
        for (sys, v) in systems() {
            let n = sys.nvar();
            let mut m = SmallMatrix::zeros(n);
            sys.jacobian_m(&v, &mut m);
            for axis in [Axis::X, Axis::Y] {
                let mut lam = zero_state::<f64>();
                if !sys.eigenvalues(&v, axis, &mut lam[..n]) {
                    continue;
                }
                let a = conserved_quasilinear_matrix(&sys, &v, axis, &m).unwrap();
                let ev = crate::eigen::eigenvalues(&a).unwrap();
                let mut num: Vec<f64> = ev.iter().map(|c| c.0).collect();
                for c in ev.iter() {
                    assert!(c.1.abs() < 1e-5, "{} complex eigenvalue {c:?}", sys.name());
                }
                let mut ana: Vec<f64> = lam[..n].to_vec();
                num.sort_by(|a, b| a.partial_cmp(b).unwrap());
                ana.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (x, y) in num.iter().zip(&ana) {
                    assert!(
                        (x - y).abs() < 1e-5 * (1.0 + y.abs()),
                        "{} {axis:?}: numeric {num:?} analytic {ana:?}",
                        sys.name()
                    );
                }
                let smax = sys.max_signal_speed(&v, axis);
                let lmax = ana.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                assert!(smax >= lmax - 1e-12);
            }
        }
    }

    #[test]
    fn roundtrip_on_reference_states() {
        for (sys, v) in systems() {
            let n = sys.nvar();
            let mut q = vec![0.0; n];
            let mut w = vec![0.0; n];
            sys.prim_to_cons(&v, &mut q);
            sys.cons_to_prim(&q, &mut w).unwrap();
            for (a, b) in v.iter().zip(&w) {
                assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{}", sys.name());
            }
        }
    }

    #[test]
    fn quasilinear_apply_matches_flux_derivative() {
        // with dv = e_j and dflux = dF/dV e_j, the result is M^-1 (dF/dV + B M) e_j
        for (sys, v) in systems() {
            let n = sys.nvar();
            let mut m = SmallMatrix::zeros(n);
            sys.jacobian_m(&v, &mut m);
            let a = conserved_quasilinear_matrix(&sys, &v, Axis::X, &m).unwrap();
            let c = m.inverse().unwrap().matmul(&a).matmul(&m);
            let mut df = SmallMatrix::zeros(n);
            flux_jacobian_fd(&sys, &v, Axis::X, &mut df);
            let dv: Vec<f64> = (0..n).map(|k| 0.1 * (k as f64 + 1.0)).collect();
            let mut dflux = vec![0.0; n];
            df.mul_vec(&dv, &mut dflux);
            let mut out = vec![0.0; n];
            quasilinear_apply(&sys, &v, &[&dflux], &[&dv], &mut out).unwrap();
            let mut expect = vec![0.0; n];
            c.mul_vec(&dv, &mut expect);
            for (o, e) in out.iter().zip(&expect) {
                assert!((o - e).abs() < 1e-6 * (1.0 + e.abs()), "{}", sys.name());
            }
        }
    }
}
