//! Exact solution of the relativistic Riemann problem for an ideal gas with
//! purely normal velocities.

use super::riemann_euler::{Prim1, Wave};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ExactRhd {
    pub gamma: f64,
    pub left: Prim1,
    pub right: Prim1,
    pub p_star: f64,
    pub v_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Left,
    Right,
}

impl Family {
    fn sign(self) -> f64 {
        match self {
            Family::Left => -1.0,
            Family::Right => 1.0,
        }
    }
}

struct Behind {
    v: f64,
    rho: f64,
    wave: Wave,
}

impl ExactRhd {
    /// `left` and `right` are `(rho, v_x, p)`; tangential velocities must
    /// vanish, which is checked by the caller through `with_tangential`.
    pub fn new(left: Prim1, right: Prim1, gamma: f64) -> Result<Self> {
        for s in [left, right] {
            if !(s[0] > 0.0 && s[2] > 0.0 && s[1].abs() < 1.0) {
                return Err(Error::Riemann(format!("inadmissible state {s:?}")));
            }
        }
        let g = gamma;
        let f = |p: f64| -> f64 {
            behind(left, p, g, Family::Left).v - behind(right, p, g, Family::Right).v
        };
        let scale = left[2].max(right[2]);
        let mut lo = 1e-14 * left[2].min(right[2]);
        let mut hi = scale;
        if f(lo) < 0.0 {
            return Err(Error::Riemann("initial data generate vacuum".into()));
        }
        let mut grow = 0;
        while f(hi) > 0.0 {
            hi *= 10.0;
            grow += 1;
            if grow > 60 {
                return Err(Error::Riemann("star pressure bracket not found".into()));
            }
        }
        for _ in 0..400 {
            let mid = (lo * hi).sqrt();
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= 1e-15 * hi {
                break;
            }
        }
        let p = 0.5 * (lo + hi);
        let bl = behind(left, p, g, Family::Left);
        let br = behind(right, p, g, Family::Right);
        if (bl.v - br.v).abs() > 1e-10 {
            return Err(Error::Riemann("star velocity mismatch".into()));
        }
        Ok(Self {
            gamma,
            left,
            right,
            p_star: p,
            v_star: 0.5 * (bl.v + br.v),
            rho_star_left: bl.rho,
            rho_star_right: br.rho,
            left_wave: bl.wave,
            right_wave: br.wave,
        })
    }

    /// Rejects states with tangential velocity components.
    pub fn with_tangential(left: [f64; 5], right: [f64; 5], gamma: f64) -> Result<Self> {
        for s in [left, right] {
            if s[2] != 0.0 || s[3] != 0.0 {
                return Err(Error::Riemann("tangential velocities are not supported".into()));
            }
        }
        Self::new([left[0], left[1], left[4]], [right[0], right[1], right[4]], gamma)
    }

    /// Self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> Prim1 {
        let g = self.gamma;
        let (fam, s, wave, rho_star) = if xi <= self.v_star {
            (Family::Left, self.left, self.left_wave, self.rho_star_left)
        } else {
            (Family::Right, self.right, self.right_wave, self.rho_star_right)
        };
        let star = [rho_star, self.v_star, self.p_star];
        let sg = fam.sign();
        match wave {
            Wave::Shock { speed } => {
                if sg * (xi - speed) > 0.0 {
                    s
                } else {
                    star
                }
            }
            Wave::Rarefaction { head, tail } => {
                if sg * (xi - head) > 0.0 {
                    s
                } else if sg * (xi - tail) < 0.0 {
                    star
                } else {
                    // invert the characteristic speed inside the fan
                    let (mut lo, mut hi) = (self.p_star.min(s[2]), self.p_star.max(s[2]));
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        let st = rarefaction_state(s, mid, g, fam);
                        let lam = characteristic(st, g, fam);
                        // the speed moves away from the head as p falls
                        if sg * (lam - xi) > 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                        if hi - lo <= 1e-15 * hi {
                            break;
                        }
                    }
                    rarefaction_state(s, 0.5 * (lo + hi), g, fam)
                }
            }
        }
    }
}

fn enthalpy(s: Prim1, g: f64) -> f64 {
    1.0 + g / (g - 1.0) * s[2] / s[0]
}

fn sound_speed(s: Prim1, g: f64) -> f64 {
    (g * s[2] / (s[0] * enthalpy(s, g))).sqrt()
}

fn characteristic(s: Prim1, g: f64, fam: Family) -> f64 {
    let c = sound_speed(s, g);
    let sg = fam.sign();
    (s[1] + sg * c) / (1.0 + sg * s[1] * c)
}

fn rarefaction_state(a: Prim1, p: f64, g: f64, fam: Family) -> Prim1 {
    let rho = a[0] * (p / a[2]).powf(1.0 / g);
    let ca = sound_speed(a, g);
    let c = sound_speed([rho, 0.0, p], g);
    let k = (g - 1.0).sqrt();
    let ratio = ((k - c) / (k + c)) * ((k + ca) / (k - ca));
    let big_a = ratio.powf(-fam.sign() * 2.0 / k);
    let v = ((1.0 + a[1]) * big_a - (1.0 - a[1])) / ((1.0 + a[1]) * big_a + (1.0 - a[1]));
    [rho, v, p]
}

/// State behind the wave of family `fam` that connects `a` to pressure `p`.
fn behind(a: Prim1, p: f64, g: f64, fam: Family) -> Behind {
    let sg = fam.sign();
    if p <= a[2] {
        let st = rarefaction_state(a, p, g, fam);
        return Behind {
            v: st[1],
            rho: st[0],
            wave: Wave::Rarefaction {
                head: characteristic(a, g, fam),
                tail: characteristic(st, g, fam),
            },
        };
    }
    let (rho_a, v_a, p_a) = (a[0], a[1], a[2]);
    let h_a = enthalpy(a, g);
    let w_a = 1.0 / (1.0 - v_a * v_a).sqrt();
    let k = (g - 1.0) * (p - p_a) / (g * p);
    let c = h_a * h_a + h_a * (p - p_a) / rho_a;
    let h_b = (-k + (k * k + 4.0 * (1.0 - k) * c).sqrt()) / (2.0 * (1.0 - k));
    let rho_b = g * p / ((g - 1.0) * (h_b - 1.0));
    let j2 = -(p - p_a) / (h_b / rho_b - h_a / rho_a);
    let j = sg * j2.sqrt();
    let rw2 = rho_a * rho_a * w_a * w_a;
    let vs = (rw2 * v_a + sg * j2.sqrt() * (j2 + rho_a * rho_a).sqrt()) / (rw2 + j2);
    let w_s = 1.0 / (1.0 - vs * vs).sqrt();
    let v_b = (h_a * w_a * v_a + w_s * (p - p_a) / j) / (h_a * w_a + (p - p_a) * (w_s * v_a / j + 1.0 / (rho_a * w_a)));
    Behind {
        v: v_b,
        rho: rho_b,
        wave: Wave::Shock { speed: vs },
    }
}
