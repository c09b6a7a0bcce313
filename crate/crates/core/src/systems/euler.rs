use super::{finite_state, Axis, HyperbolicSystem};
use crate::error::RecoveryFailure;
use crate::linalg::SmallMatrix;
use crate::real::Real;

/// Compressible Euler equations with an ideal-gas law.
///
/// Primitive `(rho, vx, vy, vz, p)`, conserved `(rho, mx, my, mz, E)`.
#[derive(Clone, Debug)]
pub struct Euler<T> {
    pub gamma: T,
}

impl<T: Real> Euler<T> {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma: T::lit(gamma),
        }
    }

    #[inline(always)]
    pub fn sound_speed(&self, rho: T, p: T) -> T {
        (self.gamma * p / rho).sqrt()
    }
}

impl<T: Real> HyperbolicSystem<T> for Euler<T> {
    fn name(&self) -> &'static str {
        "euler"
    }

    #[inline(always)]
    fn nvar(&self) -> usize {
        5
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["rho", "mx", "my", "mz", "E"]
    }

    fn primitive_names(&self) -> &'static [&'static str] {
        &["rho", "vx", "vy", "vz", "p"]
    }

    #[inline]
    fn prim_to_cons(&self, v: &[T], q: &mut [T]) {
        let rho = v[0];
        q[0] = rho;
        q[1] = rho * v[1];
        q[2] = rho * v[2];
        q[3] = rho * v[3];
        let v2 = v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
        q[4] = v[4] / (self.gamma - T::one()) + T::lit(0.5) * rho * v2;
    }

    #[inline]
    fn cons_to_prim(&self, q: &[T], v: &mut [T]) -> Result<(), RecoveryFailure> {
        let rho = q[0];
        if !(rho > T::zero()) {
            return Err(RecoveryFailure::new(format!("non-positive density {rho:e}")));
        }
        let inv = T::one() / rho;
        let (vx, vy, vz) = (q[1] * inv, q[2] * inv, q[3] * inv);
        let kin = T::lit(0.5) * rho * (vx * vx + vy * vy + vz * vz);
        let p = (self.gamma - T::one()) * (q[4] - kin);
        if !(p > T::zero()) {
            return Err(RecoveryFailure::new(format!("non-positive pressure {p:e}")));
        }
        v[0] = rho;
        v[1] = vx;
        v[2] = vy;
        v[3] = vz;
        v[4] = p;
        if !finite_state(&v[..5]) {
            return Err(RecoveryFailure::new("non-finite state"));
        }
        Ok(())
    }

    #[inline]
    fn flux(&self, v: &[T], axis: Axis, f: &mut [T]) {
        let d = axis.index();
        let rho = v[0];
        let un = v[1 + d];
        let p = v[4];
        let v2 = v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
        let e = p / (self.gamma - T::one()) + T::lit(0.5) * rho * v2;
        f[0] = rho * un;
        f[1] = rho * v[1] * un;
        f[2] = rho * v[2] * un;
        f[3] = rho * v[3] * un;
        f[1 + d] += p;
        f[4] = (e + p) * un;
    }

    fn jacobian_m(&self, v: &[T], m: &mut SmallMatrix<T>) {
        m.set_zero();
        let rho = v[0];
        let half = T::lit(0.5);
        m[(0, 0)] = T::one();
        for k in 0..3 {
            m[(1 + k, 0)] = v[1 + k];
            m[(1 + k, 1 + k)] = rho;
            m[(4, 1 + k)] = rho * v[1 + k];
        }
        m[(4, 0)] = half * (v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
        m[(4, 4)] = T::one() / (self.gamma - T::one());
    }

    #[inline]
    fn max_signal_speed(&self, v: &[T], axis: Axis) -> T {
        v[1 + axis.index()].abs() + self.sound_speed(v[0], v[4])
    }

    fn eigenvalues(&self, v: &[T], axis: Axis, out: &mut [T]) -> bool {
        let un = v[1 + axis.index()];
        let c = self.sound_speed(v[0], v[4]);
        out[0] = un - c;
        out[1] = un;
        out[2] = un;
        out[3] = un;
        out[4] = un + c;
        true
    }

    fn admissible(&self, v: &[T]) -> Result<(), RecoveryFailure> {
        if !finite_state(&v[..5]) {
            return Err(RecoveryFailure::new("non-finite state"));
        }
        if !(v[0] > T::zero()) || !(v[4] > T::zero()) {
            return Err(RecoveryFailure::new(format!(
                "non-positive density or pressure ({:e}, {:e})",
                v[0], v[4]
            )));
        }
        Ok(())
    }

    fn reflect(&self, state: &mut [T], axis: Axis) {
        let k = 1 + axis.index();
        state[k] = -state[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rest_state_conversion() {
        let sys = Euler::<f64>::new(1.4);
        let mut q = [0.0; 5];
        sys.prim_to_cons(&[1.0, 0.0, 0.0, 0.0, 1.0], &mut q);
        assert_relative_eq!(q[4], 2.5, epsilon = 1e-15);
        assert_eq!(&q[..4], &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn flux_of_moving_state() {
        let sys = Euler::<f64>::new(1.4);
        let mut f = [0.0; 5];
        sys.flux(&[1.0, 2.0, 0.0, 0.0, 1.0], Axis::X, &mut f);
        assert_relative_eq!(f[0], 2.0);
        assert_relative_eq!(f[1], 5.0);
        assert_relative_eq!(f[2], 0.0);
        assert_relative_eq!(f[4], 11.0, epsilon = 1e-14);
    }

    #[test]
    fn recovery_rejects_negative_pressure() {
        let sys = Euler::<f64>::new(1.4);
        let mut v = [0.0; 5];
        assert!(sys.cons_to_prim(&[1.0, 2.0, 0.0, 0.0, 1.0], &mut v).is_err());
        assert!(sys.cons_to_prim(&[-1.0, 0.0, 0.0, 0.0, 1.0], &mut v).is_err());
    }
}
