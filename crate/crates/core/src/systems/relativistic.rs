//! Conserved to primitive recovery shared by the relativistic systems.

use crate::error::RecoveryFailure;
use crate::real::Real;

/// Primitive fluid state recovered from conserved variables.
#[derive(Clone, Copy, Debug)]
pub struct RecoveredFluid<T> {
    pub rho: T,
    pub v: [T; 3],
    pub p: T,
}

const MAX_ITERATIONS: usize = 200;

/// Recovers `(rho, v, p)` from `(D, S, U)` and magnetic field `b` for an
/// ideal gas with adiabatic index `gamma`.
///
/// The unknown is `w = rho h W^2`; given `w`, the velocity and pressure
/// follow in closed form and the energy equation gives a scalar residual.
/// The root is found by Newton iteration safeguarded by bisection on a
/// bracket; trial points with superluminal velocity lie to the left of
/// the root.
pub fn recover_relativistic<T: Real>(
    gamma: T,
    d: T,
    s: [T; 3],
    u: T,
    b: [T; 3],
) -> Result<RecoveredFluid<T>, RecoveryFailure> {
    let finite = d.is_finite()
        && u.is_finite()
        && s.iter().all(|x| x.is_finite())
        && b.iter().all(|x| x.is_finite());
    if !finite {
        return Err(RecoveryFailure::new("non-finite conserved state"));
    }
    if !(d > T::zero()) {
        return Err(RecoveryFailure::new(format!("non-positive density {d:e}")));
    }
    if !(u > T::zero()) {
        return Err(RecoveryFailure::new(format!("non-positive energy {u:e}")));
    }
    let one = T::one();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let s2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
    let b2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    let sb = s[0] * b[0] + s[1] * b[1] + s[2] * b[2];
    let sb2 = sb * sb;
    let gfac = (gamma - one) / gamma;

    // residual and derivative at w; None when v^2 >= 1
    let eval = |w: T| -> Option<(T, T, T)> {
        let wb = w + b2;
        let num = s2 * w * w + sb2 * (b2 + two * w);
        let den = w * w * wb * wb;
        let v2 = num / den;
        if !(v2 < one) || !(w > T::zero()) {
            return None;
        }
        let dnum = two * s2 * w + two * sb2;
        let dden = two * w * wb * wb + two * w * w * wb;
        let dv2 = (dnum * den - num * dden) / (den * den);
        let lor = (one - v2).sqrt();
        let p = gfac * (w * (one - v2) - d * lor);
        let dp = gfac * ((one - v2) - w * dv2 + d * dv2 / (two * lor));
        let f = w - p + half * b2 * (one + v2) - half * sb2 / (w * w) - u;
        let df = one - dp + half * b2 * dv2 + sb2 / (w * w * w);
        Some((f, df, v2))
    };

    let tol = T::tolerance(1e-12);
    let mut lo = T::zero();
    let mut hi = two * gamma * (u + b2) + d;
    let mut grow = 0;
    loop {
        match eval(hi) {
            Some((f, _, _)) if f > T::zero() => break,
            _ => {
                lo = hi;
                hi *= two;
                grow += 1;
                if grow > 200 {
                    return Err(RecoveryFailure::new("could not bracket enthalpy"));
                }
            }
        }
    }

    // initial guess from the total energy
    let mut w = (u + b2.min(u)).max(lo).min(hi);
    if eval(w).is_none() {
        w = half * (lo + hi);
    }
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let (f, df) = match eval(w) {
            Some((f, df, _)) => (f, df),
            None => {
                lo = w;
                w = half * (lo + hi);
                continue;
            }
        };
        if f > T::zero() {
            hi = w;
        } else {
            lo = w;
        }
        let mut next = w - f / df;
        if !(next > lo && next < hi) || !df.is_finite() || df == T::zero() {
            next = half * (lo + hi);
        }
        let step = (next - w).abs();
        w = next;
        if step <= tol * w || (hi - lo) <= tol * w {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RecoveryFailure::new(format!(
            "enthalpy iteration did not converge (D={d:e}, U={u:e})"
        )));
    }
    let (_, _, v2) = eval(w).ok_or_else(|| RecoveryFailure::new("superluminal velocity"))?;
    let lor = (one - v2).sqrt();
    let rho = d * lor;
    let p = gfac * (w * (one - v2) - d * lor);
    if !(p > T::zero()) {
        return Err(RecoveryFailure::new(format!("non-positive pressure {p:e}")));
    }
    if !(rho > T::zero()) {
        return Err(RecoveryFailure::new(format!("non-positive density {rho:e}")));
    }
    let vb = sb / w;
    let inv = one / (w + b2);
    let v = [
        (s[0] + vb * b[0]) * inv,
        (s[1] + vb * b[1]) * inv,
        (s[2] + vb * b[2]) * inv,
    ];
    Ok(RecoveredFluid { rho, v, p })
}

/// Lorentz factor squared; `None` when the speed is not below one.
#[inline(always)]
pub(crate) fn lorentz_sq<T: Real>(v: &[T]) -> Option<T> {
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if v2 < T::one() {
        Some(T::one() / (T::one() - v2))
    } else {
        None
    }
}

/// Acoustic eigenvalues of relativistic hydrodynamics along a direction
/// with normal velocity `vn`, speed squared `v2` and sound speed `cs`.
#[inline]
pub(crate) fn acoustic_speeds<T: Real>(vn: T, v2: T, cs: T) -> (T, T) {
    let one = T::one();
    let c2 = cs * cs;
    let den = one - v2 * c2;
    let disc = ((one - v2) * (one - v2 * c2 - vn * vn * (one - c2))).max(T::zero());
    let a = vn * (one - c2);
    let r = cs * disc.sqrt();
    ((a - r) / den, (a + r) / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_hydrodynamic_state() {
        let (rho, v, p, g) = (10.0f64, [0.5, 0.1, -0.2], 20.0, 5.0 / 3.0);
        let v2: f64 = v.iter().map(|x| x * x).sum();
        let w2 = 1.0 / (1.0 - v2);
        let h = 1.0 + g / (g - 1.0) * p / rho;
        let s = [rho * h * w2 * v[0], rho * h * w2 * v[1], rho * h * w2 * v[2]];
        let u = rho * h * w2 - p;
        let r = recover_relativistic(g, rho * w2.sqrt(), s, u, [0.0; 3]).unwrap();
        assert!((r.rho - rho).abs() < 1e-10 * rho);
        assert!((r.p - p).abs() < 1e-10 * p);
        for k in 0..3 {
            assert!((r.v[k] - v[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unphysical_state() {
        assert!(recover_relativistic(5.0 / 3.0, 1.0, [5.0, 0.0, 0.0], 2.0, [0.0; 3]).is_err());
        assert!(recover_relativistic(5.0 / 3.0, -1.0, [0.0; 3], 2.0, [0.0; 3]).is_err());
    }

    #[test]
    fn acoustic_speeds_at_rest() {
        let (lm, lp) = acoustic_speeds(0.0f64, 0.0, 0.5);
        assert!((lm + 0.5).abs() < 1e-15 && (lp - 0.5).abs() < 1e-15);
    }
}
