use super::relativistic::{lorentz_sq, recover_relativistic};
use super::{dot3, finite_state, Axis, HyperbolicSystem};
use crate::error::RecoveryFailure;
use crate::linalg::SmallMatrix;
use crate::real::Real;

/// Ideal relativistic magnetohydrodynamics with hyperbolic divergence
/// cleaning.
///
/// Primitive `(rho, vx, vy, vz, p, Bx, By, Bz, Phi)`, conserved
/// `(D, Sx, Sy, Sz, U, Bx, By, Bz, Phi)`. The cleaning field travels at the
/// speed of light and is damped at rate `kappa`.
#[derive(Clone, Debug)]
pub struct Rmhd<T> {
    pub gamma: T,
    pub kappa: T,
}

impl<T: Real> Rmhd<T> {
    pub fn new(gamma: f64, kappa: f64) -> Self {
        Self {
            gamma: T::lit(gamma),
            kappa: T::lit(kappa),
        }
    }

    #[inline(always)]
    fn enthalpy_density(&self, rho: T, p: T) -> T {
        rho + self.gamma / (self.gamma - T::one()) * p
    }
}

/// Electric field `E = -v x B`.
#[inline(always)]
fn electric<T: Real>(v: &[T], b: &[T]) -> [T; 3] {
    [
        -(v[1] * b[2] - v[2] * b[1]),
        -(v[2] * b[0] - v[0] * b[2]),
        -(v[0] * b[1] - v[1] * b[0]),
    ]
}

impl<T: Real> HyperbolicSystem<T> for Rmhd<T> {
    fn name(&self) -> &'static str {
        "rmhd"
    }

    #[inline(always)]
    fn nvar(&self) -> usize {
        9
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["D", "Sx", "Sy", "Sz", "U", "Bx", "By", "Bz", "Phi"]
    }

    fn primitive_names(&self) -> &'static [&'static str] {
        &["rho", "vx", "vy", "vz", "p", "Bx", "By", "Bz", "Phi"]
    }

    #[inline]
    fn prim_to_cons(&self, v: &[T], q: &mut [T]) {
        let vel = &v[1..4];
        let b = &v[5..8];
        let w2 = lorentz_sq(vel).unwrap_or(T::infinity());
        let wtot = self.enthalpy_density(v[0], v[4]) * w2;
        let b2 = dot3(b, b);
        let vb = dot3(vel, b);
        let v2 = dot3(vel, vel);
        q[0] = v[0] * w2.sqrt();
        for k in 0..3 {
            q[1 + k] = (wtot + b2) * vel[k] - vb * b[k];
        }
        q[4] = wtot - v[4] + T::lit(0.5) * (b2 + b2 * v2 - vb * vb);
        q[5..9].copy_from_slice(&v[5..9]);
    }

    fn cons_to_prim(&self, q: &[T], v: &mut [T]) -> Result<(), RecoveryFailure> {
        let b = [q[5], q[6], q[7]];
        let r = recover_relativistic(self.gamma, q[0], [q[1], q[2], q[3]], q[4], b)?;
        v[0] = r.rho;
        v[1..4].copy_from_slice(&r.v);
        v[4] = r.p;
        v[5..9].copy_from_slice(&q[5..9]);
        if !q[8].is_finite() {
            return Err(RecoveryFailure::new("non-finite cleaning field"));
        }
        Ok(())
    }

    #[inline]
    fn flux(&self, v: &[T], axis: Axis, f: &mut [T]) {
        let i = axis.index();
        let vel = &v[1..4];
        let b = &v[5..8];
        let w2 = lorentz_sq(vel).unwrap_or(T::infinity());
        let wtot = self.enthalpy_density(v[0], v[4]) * w2;
        let e = electric(vel, b);
        let e2 = dot3(&e, &e);
        let b2 = dot3(b, b);
        let vb = dot3(vel, b);
        let ptot = v[4] + T::lit(0.5) * (e2 + b2);
        f[0] = v[0] * w2.sqrt() * vel[i];
        for j in 0..3 {
            f[1 + j] = wtot * vel[i] * vel[j] - e[i] * e[j] - b[i] * b[j];
        }
        f[1 + i] += ptot;
        f[4] = (wtot + b2) * vel[i] - vb * b[i];
        for j in 0..3 {
            f[5 + j] = vel[i] * b[j] - b[i] * vel[j];
        }
        f[5 + i] = v[8];
        f[8] = b[i];
    }

    fn has_source(&self) -> bool {
        true
    }

    #[inline]
    fn source(&self, v: &[T], s: &mut [T]) {
        s[..8].iter_mut().for_each(|x| *x = T::zero());
        s[8] = -self.kappa * v[8];
    }

    fn jacobian_m(&self, v: &[T], m: &mut SmallMatrix<T>) {
        m.set_zero();
        let vel = &v[1..4];
        let b = &v[5..8];
        let w2 = lorentz_sq(vel).unwrap_or(T::infinity());
        let w = w2.sqrt();
        let rho = v[0];
        let g = self.gamma / (self.gamma - T::one());
        let e = self.enthalpy_density(rho, v[4]);
        let wtot = e * w2;
        let b2 = dot3(b, b);
        let vb = dot3(vel, b);
        let v2 = dot3(vel, vel);
        let two = T::lit(2.0);
        let mut dw = [T::zero(); 3];
        for j in 0..3 {
            dw[j] = two * e * w2 * w2 * vel[j];
        }
        m[(0, 0)] = w;
        for j in 0..3 {
            m[(0, 1 + j)] = rho * w * w2 * vel[j];
        }
        for i in 0..3 {
            m[(1 + i, 0)] = w2 * vel[i];
            m[(1 + i, 4)] = g * w2 * vel[i];
            for j in 0..3 {
                let mut val = vel[i] * dw[j] - b[j] * b[i];
                if i == j {
                    val += wtot + b2;
                }
                m[(1 + i, 1 + j)] = val;
                let mut bv = two * b[j] * vel[i] - vel[j] * b[i];
                if i == j {
                    bv -= vb;
                }
                m[(1 + i, 5 + j)] = bv;
            }
        }
        m[(4, 0)] = w2;
        m[(4, 4)] = g * w2 - T::one();
        for j in 0..3 {
            m[(4, 1 + j)] = dw[j] + b2 * vel[j] - vb * b[j];
            m[(4, 5 + j)] = b[j] + b[j] * v2 - vb * vel[j];
        }
        for k in 5..9 {
            m[(k, k)] = T::one();
        }
    }

    #[inline]
    fn max_signal_speed(&self, _v: &[T], _axis: Axis) -> T {
        T::one()
    }

    fn admissible(&self, v: &[T]) -> Result<(), RecoveryFailure> {
        if !finite_state(&v[..9]) {
            return Err(RecoveryFailure::new("non-finite state"));
        }
        if !(v[0] > T::zero()) || !(v[4] > T::zero()) {
            return Err(RecoveryFailure::new(format!(
                "non-positive density or pressure ({:e}, {:e})",
                v[0], v[4]
            )));
        }
        if lorentz_sq(&v[1..4]).is_none() {
            return Err(RecoveryFailure::new("superluminal velocity"));
        }
        Ok(())
    }

    fn reflect(&self, state: &mut [T], axis: Axis) {
        let d = axis.index();
        state[1 + d] = -state[1 + d];
        for k in 0..3 {
            if k != d {
                state[5 + k] = -state[5 + k];
            }
        }
    }

    fn lorentz_slots(&self) -> Option<[usize; 3]> {
        Some([1, 2, 3])
    }

    fn iterative_recovery(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn magnetised_rest_state() {
        let sys = Rmhd::<f64>::new(5.0 / 3.0, 10.0);
        let v = [1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let mut q = [0.0; 9];
        sys.prim_to_cons(&v, &mut q);
        assert_relative_eq!(q[4], 3.0, epsilon = 1e-14);
        let mut f = [0.0; 9];
        sys.flux(&v, Axis::X, &mut f);
        assert_relative_eq!(f[1], 0.5, epsilon = 1e-14);
        assert_relative_eq!(f[8], 1.0);
    }

    #[test]
    fn cleaning_source_damps_phi() {
        let sys = Rmhd::<f64>::new(5.0 / 3.0, 10.0);
        let mut s = [0.0; 9];
        sys.source(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.2], &mut s);
        assert_relative_eq!(s[8], -2.0);
    }

    #[test]
    fn roundtrip_with_strong_field() {
        let sys = Rmhd::<f64>::new(4.0 / 3.0, 10.0);
        let v = [1.0, 0.6, -0.3, 0.2, 0.01, 5.0, 3.0, -2.0, 0.1];
        let mut q = [0.0; 9];
        let mut w = [0.0; 9];
        sys.prim_to_cons(&v, &mut q);
        sys.cons_to_prim(&q, &mut w).unwrap();
        for (a, b) in v.iter().zip(&w) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{v:?} vs {w:?}");
        }
    }
}
