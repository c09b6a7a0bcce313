//! Error norms, oscillation measures and convergence tables.

use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

/// `(sum_cells |cell| |u - r|^p)^(1/p)`.
pub fn error_norm(values: &[f64], reference: &[f64], cell_volume: f64, norm: Norm) -> f64 {
    let s: f64 = values
        .iter()
        .zip(reference)
        .map(|(u, r)| {
            let d = (u - r).abs();
            match norm {
                Norm::L1 => d,
                Norm::L2 => d * d,
            }
        })
        .sum::<f64>()
        * cell_volume;
    match norm {
        Norm::L1 => s,
        Norm::L2 => s.sqrt(),
    }
}

/// `sum_i |u_{i+1} - u_i|`.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Location of the steepest jump between neighbouring samples, optionally
/// restricted to `[lo, hi]`.
pub fn shock_position(x: &[f64], values: &[f64], window: Option<(f64, f64)>) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for k in 0..x.len().saturating_sub(1) {
        let mid = 0.5 * (x[k] + x[k + 1]);
        if let Some((lo, hi)) = window {
            if mid < lo || mid > hi {
                continue;
            }
        }
        let g = ((values[k + 1] - values[k]) / (x[k + 1] - x[k])).abs();
        if best.is_none_or(|(b, _)| g > b) {
            best = Some((g, mid));
        }
    }
    best.map(|(_, m)| m)
}

/// `log(e1 / e2) / log(n2 / n1)`, undefined for equal resolutions.
pub fn observed_order(e1: f64, e2: f64, n1: usize, n2: usize) -> Option<f64> {
    if n1 == n2 || e1 <= 0.0 || e2 <= 0.0 {
        return None;
    }
    Some((e1 / e2).ln() / (n2 as f64 / n1 as f64).ln())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub l1: f64,
    pub l2: f64,
    pub order_l1: Option<f64>,
    pub order_l2: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Builds the table from `(n, l1, l2)` triples in run order.
    pub fn from_errors(errors: &[(usize, f64, f64)]) -> Self {
        let mut rows = Vec::with_capacity(errors.len());
        for (k, &(n, l1, l2)) in errors.iter().enumerate() {
            let (o1, o2) = if k == 0 {
                (None, None)
            } else {
                let (pn, p1, p2) = errors[k - 1];
                (observed_order(p1, l1, pn, n), observed_order(p2, l2, pn, n))
            };
            rows.push(ConvergenceRow {
                n,
                l1,
                l2,
                order_l1: o1,
                order_l2: o2,
            });
        }
        Self { rows }
    }

    /// Whether any order is defined.
    pub fn has_orders(&self) -> bool {
        self.rows.iter().any(|r| r.order_l2.is_some() || r.order_l1.is_some())
    }

    pub fn orders_l2(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order_l2).collect()
    }

    pub fn to_text(&self) -> String {
        let ord = |o: Option<f64>| o.map_or("---".to_string(), |v| format!("{v:.2}"));
        let mut s = String::new();
        let with_orders = self.has_orders();
        if with_orders {
            let _ = writeln!(s, "{:>6} {:>12} {:>8} {:>12} {:>8}", "N", "L1", "order", "L2", "order");
        } else {
            let _ = writeln!(s, "{:>6} {:>12} {:>12}", "N", "L1", "L2");
        }
        for r in &self.rows {
            if with_orders {
                let _ = writeln!(
                    s,
                    "{:>6} {:>12.4e} {:>8} {:>12.4e} {:>8}",
                    r.n,
                    r.l1,
                    ord(r.order_l1),
                    r.l2,
                    ord(r.order_l2)
                );
            } else {
                let _ = writeln!(s, "{:>6} {:>12.4e} {:>12.4e}", r.n, r.l1, r.l2);
            }
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let with_orders = self.has_orders();
        let mut s = String::from(if with_orders { "n,l1,order_l1,l2,order_l2\n" } else { "n,l1,l2\n" });
        let ord = |o: Option<f64>| o.map_or(String::new(), |v| format!("{v:.6}"));
        for r in &self.rows {
            if with_orders {
                let _ = writeln!(s, "{},{:.10e},{},{:.10e},{}", r.n, r.l1, ord(r.order_l1), r.l2, ord(r.order_l2));
            } else {
                let _ = writeln!(s, "{},{:.10e},{:.10e}", r.n, r.l1, r.l2);
            }
        }
        s
    }
}
