//! Circularly polarised Alfvén wave of relativistic MHD.

#[derive(Clone, Copy, Debug)]
pub struct AlfvenWave {
    pub rho: f64,
    pub pressure: f64,
    pub b0: f64,
    pub amplitude: f64,
    pub gamma: f64,
    pub wavenumber: f64,
}

impl AlfvenWave {
    pub fn new(gamma: f64) -> Self {
        Self {
            rho: 1.0,
            pressure: 1.0,
            b0: 1.0,
            amplitude: 1.0,
            gamma,
            wavenumber: 1.0,
        }
    }

    /// Propagation speed along the background field.
    pub fn speed(&self) -> f64 {
        let h = 1.0 + self.gamma / (self.gamma - 1.0) * self.pressure / self.rho;
        let b2 = self.b0 * self.b0;
        let e = self.rho * h + b2 * (1.0 + self.amplitude * self.amplitude);
        let q = 2.0 * self.amplitude * b2 / e;
        (b2 / e / (0.5 * (1.0 + (1.0 - q * q).sqrt()))).sqrt()
    }

    /// Time for one wavelength to pass.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / (self.wavenumber * self.speed())
    }

    /// Primitive state `(rho, v, p, B, psi)` at `x` and `t`.
    pub fn state(&self, x: f64, t: f64, out: &mut [f64]) {
        let va = self.speed();
        let phase = self.wavenumber * (x - va * t);
        let by = self.amplitude * self.b0 * phase.cos();
        let bz = self.amplitude * self.b0 * phase.sin();
        out[..9].copy_from_slice(&[
            self.rho,
            0.0,
            -va * by / self.b0,
            -va * bz / self.b0,
            self.pressure,
            self.b0,
            by,
            bz,
            0.0,
        ]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{Axis, HyperbolicSystem, Rmhd};

    #[test]
    fn profile_is_a_travelling_wave() {
        // F(U(x)) - v_A U(x) must not depend on the phase
        for gamma in [5.0 / 3.0, 4.0 / 3.0] {
            let wave = AlfvenWave::new(gamma);
            let sys = Rmhd::<f64>::new(gamma, 0.0);
            let va = wave.speed();
            assert!(va > 0.0 && va < 1.0);
            let mut reference = None;
            for k in 0..12 {
                let x = 0.5 * k as f64;
                let mut v = [0.0; 9];
                wave.state(x, 0.0, &mut v);
                let (mut q, mut f) = ([0.0; 9], [0.0; 9]);
                sys.prim_to_cons(&v, &mut q);
                sys.flux(&v, Axis::X, &mut f);
                let g: Vec<f64> = (0..9).map(|i| f[i] - va * q[i]).collect();
                match &reference {
                    None => reference = Some(g),
                    Some(r) => {
                        for i in 0..9 {
                            assert!((g[i] - r[i]).abs() < 1e-12, "component {i}: {} {}", g[i], r[i]);
                        }
                    }
                }
            }
        }
    }
}
