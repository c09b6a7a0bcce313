//! Exact solution of the one-dimensional Riemann problem for an ideal gas.

use crate::error::{Error, Result};

/// Primitive state `(rho, u, p)`.
pub type Prim1 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

#[derive(Clone, Debug)]
pub struct ExactEuler {
    pub gamma: f64,
    pub left: Prim1,
    pub right: Prim1,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

impl ExactEuler {
    pub fn new(left: Prim1, right: Prim1, gamma: f64) -> Result<Self> {
        for s in [left, right] {
            if !(s[0] > 0.0 && s[2] > 0.0) {
                return Err(Error::Riemann(format!("non-positive density or pressure in {s:?}")));
            }
        }
        let g = gamma;
        let cl = (g * left[2] / left[0]).sqrt();
        let cr = (g * right[2] / right[0]).sqrt();
        let du = right[1] - left[1];
        if 2.0 * (cl + cr) / (g - 1.0) <= du {
            return Err(Error::Riemann("initial data generate vacuum".into()));
        }
        // two-rarefaction starting guess
        let z = (g - 1.0) / (2.0 * g);
        let p_tr = ((cl + cr - 0.5 * (g - 1.0) * du) / (cl / left[2].powf(z) + cr / right[2].powf(z))).powf(1.0 / z);
        let mut p = p_tr.max(1e-12 * left[2].min(right[2]));
        let mut converged = false;
        for _ in 0..200 {
            let (fl, dl) = pressure_function(p, left, g);
            let (fr, dr) = pressure_function(p, right, g);
            let f = fl + fr + du;
            let mut next = p - f / (dl + dr);
            if next <= 0.0 {
                next = 0.5 * p;
            }
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-12 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Riemann("pressure iteration did not converge".into()));
        }
        let (fl, _) = pressure_function(p, left, g);
        let (fr, _) = pressure_function(p, right, g);
        let u = 0.5 * (left[1] + right[1]) + 0.5 * (fr - fl);
        let gp = (g - 1.0) / (g + 1.0);
        let star_density = |s: Prim1| {
            if p > s[2] {
                s[0] * (p / s[2] + gp) / (gp * p / s[2] + 1.0)
            } else {
                s[0] * (p / s[2]).powf(1.0 / g)
            }
        };
        let rho_l = star_density(left);
        let rho_r = star_density(right);
        let left_wave = if p > left[2] {
            Wave::Shock {
                speed: left[1] - cl * ((g + 1.0) / (2.0 * g) * p / left[2] + (g - 1.0) / (2.0 * g)).sqrt(),
            }
        } else {
            Wave::Rarefaction {
                head: left[1] - cl,
                tail: u - cl * (p / left[2]).powf(z),
            }
        };
        let right_wave = if p > right[2] {
            Wave::Shock {
                speed: right[1] + cr * ((g + 1.0) / (2.0 * g) * p / right[2] + (g - 1.0) / (2.0 * g)).sqrt(),
            }
        } else {
            Wave::Rarefaction {
                head: right[1] + cr,
                tail: u + cr * (p / right[2]).powf(z),
            }
        };
        Ok(Self {
            gamma,
            left,
            right,
            p_star: p,
            u_star: u,
            rho_star_left: rho_l,
            rho_star_right: rho_r,
            left_wave,
            right_wave,
        })
    }

    /// Whether `xi` lies left of the contact.
    pub fn left_of_contact(&self, xi: f64) -> bool {
        xi <= self.u_star
    }

    /// Self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> Prim1 {
        let g = self.gamma;
        if self.left_of_contact(xi) {
            let s = self.left;
            let c = (g * s[2] / s[0]).sqrt();
            match self.left_wave {
                Wave::Shock { speed } => {
                    if xi < speed {
                        s
                    } else {
                        [self.rho_star_left, self.u_star, self.p_star]
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi < head {
                        s
                    } else if xi > tail {
                        [self.rho_star_left, self.u_star, self.p_star]
                    } else {
                        let f = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (s[1] - xi);
                        let rho = s[0] * f.powf(2.0 / (g - 1.0));
                        let u = 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * s[1] + xi);
                        let p = s[2] * f.powf(2.0 * g / (g - 1.0));
                        [rho, u, p]
                    }
                }
            }
        } else {
            let s = self.right;
            let c = (g * s[2] / s[0]).sqrt();
            match self.right_wave {
                Wave::Shock { speed } => {
                    if xi > speed {
                        s
                    } else {
                        [self.rho_star_right, self.u_star, self.p_star]
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi > head {
                        s
                    } else if xi < tail {
                        [self.rho_star_right, self.u_star, self.p_star]
                    } else {
                        let f = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (s[1] - xi);
                        let rho = s[0] * f.powf(2.0 / (g - 1.0));
                        let u = 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * s[1] + xi);
                        let p = s[2] * f.powf(2.0 * g / (g - 1.0));
                        [rho, u, p]
                    }
                }
            }
        }
    }
}

/// Velocity change across a wave connecting `s` to pressure `p`, and its
/// derivative.
fn pressure_function(p: f64, s: Prim1, g: f64) -> (f64, f64) {
    let (rho, pk) = (s[0], s[2]);
    let c = (g * pk / rho).sqrt();
    if p > pk {
        let a = 2.0 / ((g + 1.0) * rho);
        let b = (g - 1.0) / (g + 1.0) * pk;
        let q = (a / (p + b)).sqrt();
        ((p - pk) * q, q * (1.0 - 0.5 * (p - pk) / (b + p)))
    } else {
        let r = p / pk;
        let z = (g - 1.0) / (2.0 * g);
        (2.0 * c / (g - 1.0) * (r.powf(z) - 1.0), r.powf(-(g + 1.0) / (2.0 * g)) / (rho * c))
    }
}
