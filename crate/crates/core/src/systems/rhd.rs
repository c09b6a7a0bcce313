use super::relativistic::{acoustic_speeds, lorentz_sq, recover_relativistic};
use super::{finite_state, Axis, HyperbolicSystem};
use crate::error::RecoveryFailure;
use crate::linalg::SmallMatrix;
use crate::real::Real;

/// Special relativistic hydrodynamics with an ideal-gas law.
///
/// Primitive `(rho, vx, vy, vz, p)`, conserved `(D, Sx, Sy, Sz, U)` where
/// `U = rho h W^2 - p` includes the rest-mass energy.
#[derive(Clone, Debug)]
pub struct Rhd<T> {
    pub gamma: T,
}

impl<T: Real> Rhd<T> {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma: T::lit(gamma),
        }
    }

    /// Specific enthalpy `h = 1 + gamma/(gamma-1) p/rho`.
    #[inline(always)]
    pub fn enthalpy(&self, rho: T, p: T) -> T {
        T::one() + self.gamma / (self.gamma - T::one()) * p / rho
    }

    #[inline(always)]
    pub fn sound_speed(&self, rho: T, p: T) -> T {
        (self.gamma * p / (rho * self.enthalpy(rho, p))).sqrt()
    }
}

impl<T: Real> HyperbolicSystem<T> for Rhd<T> {
    fn name(&self) -> &'static str {
        "rhd"
    }

    #[inline(always)]
    fn nvar(&self) -> usize {
        5
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["D", "Sx", "Sy", "Sz", "U"]
    }

    fn primitive_names(&self) -> &'static [&'static str] {
        &["rho", "vx", "vy", "vz", "p"]
    }

    #[inline]
    fn prim_to_cons(&self, v: &[T], q: &mut [T]) {
        let w2 = lorentz_sq(&v[1..4]).unwrap_or(T::infinity());
        let rho = v[0];
        let p = v[4];
        let rhw2 = rho * self.enthalpy(rho, p) * w2;
        q[0] = rho * w2.sqrt();
        q[1] = rhw2 * v[1];
        q[2] = rhw2 * v[2];
        q[3] = rhw2 * v[3];
        q[4] = rhw2 - p;
    }

    fn cons_to_prim(&self, q: &[T], v: &mut [T]) -> Result<(), RecoveryFailure> {
        let r = recover_relativistic(self.gamma, q[0], [q[1], q[2], q[3]], q[4], [T::zero(); 3])?;
        v[0] = r.rho;
        v[1] = r.v[0];
        v[2] = r.v[1];
        v[3] = r.v[2];
        v[4] = r.p;
        Ok(())
    }

    #[inline]
    fn flux(&self, v: &[T], axis: Axis, f: &mut [T]) {
        let d = axis.index();
        let w2 = lorentz_sq(&v[1..4]).unwrap_or(T::infinity());
        let rho = v[0];
        let p = v[4];
        let rhw2 = rho * self.enthalpy(rho, p) * w2;
        let un = v[1 + d];
        f[0] = rho * w2.sqrt() * un;
        f[1] = rhw2 * v[1] * un;
        f[2] = rhw2 * v[2] * un;
        f[3] = rhw2 * v[3] * un;
        f[1 + d] += p;
        f[4] = rhw2 * un;
    }

    fn jacobian_m(&self, v: &[T], m: &mut SmallMatrix<T>) {
        m.set_zero();
        let w2 = lorentz_sq(&v[1..4]).unwrap_or(T::infinity());
        let w = w2.sqrt();
        let rho = v[0];
        let p = v[4];
        let g = self.gamma / (self.gamma - T::one());
        let e = rho + g * p;
        let two = T::lit(2.0);
        m[(0, 0)] = w;
        for j in 0..3 {
            m[(0, 1 + j)] = rho * w * w2 * v[1 + j];
        }
        for i in 0..3 {
            m[(1 + i, 0)] = w2 * v[1 + i];
            m[(1 + i, 4)] = g * w2 * v[1 + i];
            for j in 0..3 {
                let dw = two * e * w2 * w2 * v[1 + j];
                let mut val = v[1 + i] * dw;
                if i == j {
                    val += e * w2;
                }
                m[(1 + i, 1 + j)] = val;
            }
        }
        m[(4, 0)] = w2;
        m[(4, 4)] = g * w2 - T::one();
        for j in 0..3 {
            m[(4, 1 + j)] = two * e * w2 * w2 * v[1 + j];
        }
    }

    #[inline]
    fn max_signal_speed(&self, v: &[T], axis: Axis) -> T {
        let v2 = v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
        let cs = self.sound_speed(v[0], v[4]);
        let (lm, lp) = acoustic_speeds(v[1 + axis.index()], v2, cs);
        lm.abs().max(lp.abs())
    }

    fn eigenvalues(&self, v: &[T], axis: Axis, out: &mut [T]) -> bool {
        let v2 = v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
        let cs = self.sound_speed(v[0], v[4]);
        let vn = v[1 + axis.index()];
        let (lm, lp) = acoustic_speeds(vn, v2, cs);
        out[0] = lm;
        out[1] = vn;
        out[2] = vn;
        out[3] = vn;
        out[4] = lp;
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
        if lorentz_sq(&v[1..4]).is_none() {
            return Err(RecoveryFailure::new("superluminal velocity"));
        }
        Ok(())
    }

    fn reflect(&self, state: &mut [T], axis: Axis) {
        let k = 1 + axis.index();
        state[k] = -state[k];
    }

    fn lorentz_slots(&self) -> Option<[usize; 3]> {
        Some([1, 2, 3])
    }

    fn iterative_recovery(&self) -> bool {
        true
    }
}
