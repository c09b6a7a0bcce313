use super::{finite_state, Axis, HyperbolicSystem};
use crate::error::RecoveryFailure;
use crate::linalg::SmallMatrix;
use crate::real::Real;

/// Baer–Nunziato two-phase model with stiffened-gas laws.
///
/// Phase 1 is the solid and phase 2 the gas; the interface moves with the
/// solid velocity and carries the gas pressure.
///
/// Primitive `(rho1, v1x, v1y, v1z, p1, rho2, v2x, v2y, v2z, p2, phi1)`,
/// conserved `(phi1 rho1, phi1 rho1 v1, phi1 rho1 E1, phi2 rho2,
/// phi2 rho2 v2, phi2 rho2 E2, phi1)`.
#[derive(Clone, Debug)]
pub struct BaerNunziato<T> {
    pub gamma: [T; 2],
    pub pi: [T; 2],
    /// Drag coefficient between the phase velocities.
    pub friction: T,
    /// Pressure relaxation rate.
    pub relaxation: T,
}

const PHASE: [usize; 2] = [0, 5];
const PHI: usize = 10;

impl<T: Real> BaerNunziato<T> {
    pub fn new(gamma_s: f64, pi_s: f64, gamma_g: f64, pi_g: f64) -> Self {
        Self {
            gamma: [T::lit(gamma_s), T::lit(gamma_g)],
            pi: [T::lit(pi_s), T::lit(pi_g)],
            friction: T::zero(),
            relaxation: T::zero(),
        }
    }

    pub fn with_relaxation(mut self, friction: f64, relaxation: f64) -> Self {
        self.friction = T::lit(friction);
        self.relaxation = T::lit(relaxation);
        self
    }

    #[inline(always)]
    fn fractions(v: &[T]) -> [T; 2] {
        [v[PHI], T::one() - v[PHI]]
    }

    #[inline(always)]
    pub fn sound_speed(&self, k: usize, rho: T, p: T) -> T {
        (self.gamma[k] * (p + self.pi[k]) / rho).sqrt()
    }

    /// Total energy per unit volume of a pure phase.
    #[inline(always)]
    fn energy_density(&self, k: usize, rho: T, vel: &[T], p: T) -> T {
        let v2 = vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2];
        T::lit(0.5) * rho * v2 + (p + self.gamma[k] * self.pi[k]) / (self.gamma[k] - T::one())
    }
}

impl<T: Real> HyperbolicSystem<T> for BaerNunziato<T> {
    fn name(&self) -> &'static str {
        "baer-nunziato"
    }

    #[inline(always)]
    fn nvar(&self) -> usize {
        11
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &[
            "phi1rho1", "m1x", "m1y", "m1z", "E1", "phi2rho2", "m2x", "m2y", "m2z", "E2", "phi1",
        ]
    }

    fn primitive_names(&self) -> &'static [&'static str] {
        &[
            "rho1", "v1x", "v1y", "v1z", "p1", "rho2", "v2x", "v2y", "v2z", "p2", "phi1",
        ]
    }

    #[inline]
    fn prim_to_cons(&self, v: &[T], q: &mut [T]) {
        let phi = Self::fractions(v);
        for k in 0..2 {
            let o = PHASE[k];
            let rho = v[o];
            let vel = &v[o + 1..o + 4];
            q[o] = phi[k] * rho;
            for j in 0..3 {
                q[o + 1 + j] = phi[k] * rho * vel[j];
            }
            q[o + 4] = phi[k] * self.energy_density(k, rho, vel, v[o + 4]);
        }
        q[PHI] = v[PHI];
    }

    fn cons_to_prim(&self, q: &[T], v: &mut [T]) -> Result<(), RecoveryFailure> {
        if !finite_state(&q[..11]) {
            return Err(RecoveryFailure::new("non-finite conserved state"));
        }
        let phi1 = q[PHI];
        if !(phi1 > T::zero() && phi1 < T::one()) {
            return Err(RecoveryFailure::new(format!("volume fraction {phi1:e} outside (0, 1)")));
        }
        let phi = [phi1, T::one() - phi1];
        for k in 0..2 {
            let o = PHASE[k];
            let rho = q[o] / phi[k];
            if !(rho > T::zero()) {
                return Err(RecoveryFailure::new(format!("non-positive phase density {rho:e}")));
            }
            let mut vel = [T::zero(); 3];
            for j in 0..3 {
                vel[j] = q[o + 1 + j] / q[o];
            }
            let v2 = vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2];
            let e = q[o + 4] / phi[k] - T::lit(0.5) * rho * v2;
            let p = (self.gamma[k] - T::one()) * e - self.gamma[k] * self.pi[k];
            if !(p + self.pi[k] > T::zero()) {
                return Err(RecoveryFailure::new(format!("phase {} pressure {p:e} below -pi", k + 1)));
            }
            v[o] = rho;
            v[o + 1..o + 4].copy_from_slice(&vel);
            v[o + 4] = p;
        }
        v[PHI] = phi1;
        Ok(())
    }

    #[inline]
    fn flux(&self, v: &[T], axis: Axis, f: &mut [T]) {
        let d = axis.index();
        let phi = Self::fractions(v);
        for k in 0..2 {
            let o = PHASE[k];
            let rho = v[o];
            let vel = &v[o + 1..o + 4];
            let p = v[o + 4];
            let un = vel[d];
            f[o] = phi[k] * rho * un;
            for j in 0..3 {
                f[o + 1 + j] = phi[k] * rho * vel[j] * un;
            }
            f[o + 1 + d] += phi[k] * p;
            f[o + 4] = phi[k] * un * (self.energy_density(k, rho, vel, p) + p);
        }
        f[PHI] = T::zero();
    }

    fn has_nonconservative(&self) -> bool {
        true
    }

    #[inline]
    fn ncp_apply(&self, v: &[T], axis: Axis, x: &[T], out: &mut [T]) {
        let d = axis.index();
        let dphi = x[PHI];
        if dphi == T::zero() {
            return;
        }
        let pi_ = v[9];
        let vi = v[1 + d];
        out[1 + d] -= pi_ * dphi;
        out[4] -= pi_ * vi * dphi;
        out[6 + d] += pi_ * dphi;
        out[9] += pi_ * vi * dphi;
        out[PHI] += vi * dphi;
    }

    fn has_source(&self) -> bool {
        self.friction != T::zero() || self.relaxation != T::zero()
    }

    fn source(&self, v: &[T], s: &mut [T]) {
        let nu = self.friction;
        let v1 = &v[1..4];
        let v2 = &v[6..9];
        let mut work = T::zero();
        s[0] = T::zero();
        s[5] = T::zero();
        for j in 0..3 {
            let dv = v1[j] - v2[j];
            s[1 + j] = -nu * dv;
            s[6 + j] = nu * dv;
            work += v1[j] * dv;
        }
        s[4] = -nu * work;
        s[9] = nu * work;
        s[PHI] = self.relaxation * (v[4] - v[9]);
    }

    fn jacobian_m(&self, v: &[T], m: &mut SmallMatrix<T>) {
        m.set_zero();
        let phi = Self::fractions(v);
        let sign = [T::one(), -T::one()];
        let half = T::lit(0.5);
        for k in 0..2 {
            let o = PHASE[k];
            let rho = v[o];
            let vel = &v[o + 1..o + 4];
            let v2 = vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2];
            m[(o, o)] = phi[k];
            for j in 0..3 {
                m[(o + 1 + j, o)] = phi[k] * vel[j];
                m[(o + 1 + j, o + 1 + j)] = phi[k] * rho;
                m[(o + 4, o + 1 + j)] = phi[k] * rho * vel[j];
            }
            m[(o + 4, o)] = phi[k] * half * v2;
            m[(o + 4, o + 4)] = phi[k] / (self.gamma[k] - T::one());
            // derivative with respect to phi1
            m[(o, PHI)] = sign[k] * rho;
            for j in 0..3 {
                m[(o + 1 + j, PHI)] = sign[k] * rho * vel[j];
            }
            m[(o + 4, PHI)] = sign[k] * self.energy_density(k, rho, vel, v[o + 4]);
        }
        m[(PHI, PHI)] = T::one();
    }

    #[inline]
    fn max_signal_speed(&self, v: &[T], axis: Axis) -> T {
        let d = axis.index();
        let mut s = T::zero();
        for k in 0..2 {
            let o = PHASE[k];
            let c = self.sound_speed(k, v[o], v[o + 4]);
            s = s.max(v[o + 1 + d].abs() + c);
        }
        s
    }

    fn eigenvalues(&self, v: &[T], axis: Axis, out: &mut [T]) -> bool {
        let d = axis.index();
        for k in 0..2 {
            let o = PHASE[k];
            let c = self.sound_speed(k, v[o], v[o + 4]);
            let un = v[o + 1 + d];
            out[o] = un - c;
            out[o + 1] = un;
            out[o + 2] = un;
            out[o + 3] = un;
            out[o + 4] = un + c;
        }
        out[PHI] = v[1 + d];
        true
    }

    fn admissible(&self, v: &[T]) -> Result<(), RecoveryFailure> {
        if !finite_state(&v[..11]) {
            return Err(RecoveryFailure::new("non-finite state"));
        }
        if !(v[PHI] > T::zero() && v[PHI] < T::one()) {
            return Err(RecoveryFailure::new(format!("volume fraction {:e} outside (0, 1)", v[PHI])));
        }
        for k in 0..2 {
            let o = PHASE[k];
            if !(v[o] > T::zero()) || !(v[o + 4] + self.pi[k] > T::zero()) {
                return Err(RecoveryFailure::new(format!(
                    "phase {} density {:e} or pressure {:e} not admissible",
                    k + 1,
                    v[o],
                    v[o + 4]
                )));
            }
        }
        Ok(())
    }

    fn reflect(&self, state: &mut [T], axis: Axis) {
        let d = axis.index();
        state[1 + d] = -state[1 + d];
        state[6 + d] = -state[6 + d];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stiffened_gas_energy() {
        let sys = BaerNunziato::<f64>::new(3.0, 100.0, 1.4, 0.0);
        let v = [800.0, 0.0, 0.0, 0.0, 500.0, 1.5, 0.0, 0.0, 0.0, 2.0, 0.4];
        let mut q = [0.0; 11];
        sys.prim_to_cons(&v, &mut q);
        assert_relative_eq!(q[0], 320.0, epsilon = 1e-12);
        assert_relative_eq!(q[4], 0.4 * (500.0 + 300.0) / 2.0, epsilon = 1e-12);
        assert_relative_eq!(q[5], 0.9, epsilon = 1e-12);
        assert_relative_eq!(q[9], 0.6 * 2.0 / 0.4, epsilon = 1e-12);
        assert_relative_eq!(sys.sound_speed(0, 800.0, 500.0), (3.0f64 * 600.0 / 800.0).sqrt());
    }

    #[test]
    fn nonconservative_product_moves_momentum_between_phases() {
        let sys = BaerNunziato::<f64>::new(1.4, 0.0, 1.4, 0.0);
        let v = [1.0, 0.3, 0.0, 0.0, 1.0, 0.5, -0.1, 0.0, 0.0, 2.0, 0.4];
        let b = sys.ncp_matrix(&v, Axis::X);
        assert_relative_eq!(b[(1, 10)], -2.0);
        assert_relative_eq!(b[(4, 10)], -0.6);
        assert_relative_eq!(b[(6, 10)], 2.0);
        assert_relative_eq!(b[(9, 10)], 0.6);
        assert_relative_eq!(b[(10, 10)], 0.3);
        for j in 0..10 {
            for i in 0..11 {
                assert_eq!(b[(i, j)], 0.0);
            }
        }
        // total momentum and energy rows cancel
        assert_eq!(b[(1, 10)] + b[(6, 10)], 0.0);
        assert_eq!(b[(4, 10)] + b[(9, 10)], 0.0);
    }

    #[test]
    fn relaxation_sources() {
        let sys = BaerNunziato::<f64>::new(1.4, 0.0, 1.4, 0.0).with_relaxation(2.0, 3.0);
        let v = [1.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.5, 0.0, 0.0, 1.0, 0.5];
        let mut s = [0.0; 11];
        sys.source(&v, &mut s);
        assert_relative_eq!(s[1], -1.0);
        assert_relative_eq!(s[6], 1.0);
        assert_relative_eq!(s[4], -1.0);
        assert_relative_eq!(s[10], 3.0);
    }
}
