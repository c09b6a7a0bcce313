//! Nonlinear WENO reconstruction in nodal form.
//!
//! Two variants share the same stencils and weights: the *average* variant
//! builds a degree-`M` polynomial from cell averages, and the *point*
//! variant builds one that interpolates point values given at cell
//! centres. Multi-dimensional reconstructions are done one axis at a time.

use crate::basis::NodalBasis;
use crate::error::Result;
use crate::grid::{Field, Region};
use crate::linalg::SmallMatrix;
use crate::real::Real;
use rayon::prelude::*;

/// Stencil `[-left, right]` relative to the target cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stencil {
    pub left: usize,
    pub right: usize,
    pub central: bool,
}

impl Stencil {
    pub fn offsets(&self) -> Vec<isize> {
        (-(self.left as isize)..=self.right as isize).collect()
    }
}

/// Candidate stencils of width `M + 1`.
///
/// Even `M` uses the centred stencil plus the fully one-sided ones; odd `M`
/// uses the two near-centred stencils plus the fully one-sided ones.
#[derive(Clone, Debug)]
pub struct StencilFamily {
    pub degree: usize,
    pub stencils: Vec<Stencil>,
}

impl StencilFamily {
    pub fn new(degree: usize) -> Self {
        let m = degree;
        let mut stencils = Vec::new();
        if m.is_multiple_of(2) {
            stencils.push(Stencil { left: m / 2, right: m / 2, central: true });
        } else {
            let l = m.div_ceil(2);
            stencils.push(Stencil { left: l, right: m - l, central: true });
            stencils.push(Stencil { left: m - l, right: l, central: true });
        }
        stencils.push(Stencil { left: m, right: 0, central: false });
        stencils.push(Stencil { left: 0, right: m, central: false });
        Self { degree, stencils }
    }

    pub fn len(&self) -> usize {
        self.stencils.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stencils.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WenoParams<T> {
    pub lambda_central: T,
    pub lambda_side: T,
    pub epsilon: T,
    pub exponent: i32,
}

impl<T: Real> Default for WenoParams<T> {
    fn default() -> Self {
        Self {
            lambda_central: T::lit(1e5),
            lambda_side: T::one(),
            epsilon: T::lit(1e-14),
            exponent: 8,
        }
    }
}

/// Which data a reconstruction interprets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    /// Cell averages.
    Averages,
    /// Point values at cell centres.
    Points,
}

/// Normalised nonlinear weights
/// `lambda_s ((sigma_min + eps) / (sigma_s + eps))^r / sum`.
pub fn nonlinear_weights<T: Real>(indicators: &[T], lambdas: &[T], params: &WenoParams<T>, out: &mut [T]) {
    let smin = indicators.iter().fold(T::infinity(), |a, &b| a.min(b));
    let mut sum = T::zero();
    for ((o, &s), &l) in out.iter_mut().zip(indicators).zip(lambdas) {
        let ratio = (smin + params.epsilon) / (s + params.epsilon);
        *o = l * ratio.powi(params.exponent);
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

const MAX_STENCILS: usize = 4;
const MAX_NODES: usize = crate::basis::MAX_DEGREE + 1;
const MAX_WIDTH: usize = 2 * crate::basis::MAX_DEGREE + 1;

/// Precomputed WENO operators for one polynomial degree.
#[derive(Clone, Debug)]
pub struct WenoOperators<T> {
    pub family: StencilFamily,
    pub params: WenoParams<T>,
    lambdas: Vec<T>,
    inv_averages: Vec<SmallMatrix<T>>,
    inv_points: Vec<SmallMatrix<T>>,
    indicator: SmallMatrix<T>,
    degree: usize,
}

impl<T: Real> WenoOperators<T> {
    pub fn new(basis: &NodalBasis<T>, params: WenoParams<T>) -> Result<Self> {
        let family = StencilFamily::new(basis.degree());
        let mut inv_averages = Vec::new();
        let mut inv_points = Vec::new();
        for s in &family.stencils {
            let off = s.offsets();
            let ra = basis.reconstruction_matrix(&off);
            let rp = basis.interpolation_matrix(&off);
            inv_averages.push(ra.inverse().ok_or_else(|| {
                crate::error::Error::Config("singular reconstruction matrix".into())
            })?);
            inv_points.push(rp.inverse().ok_or_else(|| {
                crate::error::Error::Config("singular interpolation matrix".into())
            })?);
        }
        let lambdas = family
            .stencils
            .iter()
            .map(|s| if s.central { params.lambda_central } else { params.lambda_side })
            .collect();
        Ok(Self {
            indicator: basis.oscillation_indicator(),
            degree: basis.degree(),
            family,
            params,
            lambdas,
            inv_averages,
            inv_points,
        })
    }

    #[inline(always)]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline(always)]
    pub fn nodes(&self) -> usize {
        self.degree + 1
    }

    pub fn linear_weights(&self) -> &[T] {
        &self.lambdas
    }

    /// Oscillation indicator of nodal coefficients on the unit interval.
    #[inline]
    pub fn indicator(&self, c: &[T]) -> T {
        let n = self.nodes();
        let mut s = T::zero();
        for r in 0..n {
            let row = self.indicator.row(r);
            let mut acc = T::zero();
            for k in 0..n {
                acc += row[k] * c[k];
            }
            s += c[r] * acc;
        }
        s
    }

    /// Reconstructs one scalar from `2M + 1` values centred on the target
    /// cell, writing `M + 1` nodal values.
    #[inline]
    pub fn reconstruct_line(&self, kind: DataKind, data: &[T], out: &mut [T]) {
        let m = self.degree;
        let n = m + 1;
        debug_assert_eq!(data.len(), 2 * m + 1);
        let inv = match kind {
            DataKind::Averages => &self.inv_averages,
            DataKind::Points => &self.inv_points,
        };
        let ns = self.family.len();
        let mut cand = [[T::zero(); MAX_NODES]; MAX_STENCILS];
        let mut sig = [T::zero(); MAX_STENCILS];
        for (s, st) in self.family.stencils.iter().enumerate() {
            let start = m - st.left;
            inv[s].mul_vec(&data[start..start + n], &mut cand[s][..n]);
            sig[s] = self.indicator(&cand[s][..n]);
        }
        let mut w = [T::zero(); MAX_STENCILS];
        nonlinear_weights(&sig[..ns], &self.lambdas, &self.params, &mut w[..ns]);
        for (k, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = T::zero();
            for s in 0..ns {
                acc += w[s] * cand[s][k];
            }
            *o = acc;
        }
    }

    /// Reconstructs every cell of `region` from the record field `src`
    /// (`nvar` values per cell). The result holds `(M+1)^d` nodes per cell,
    /// x-node fastest, variables innermost. `xbuf` must share the layout of
    /// `src` and have width `(M+1) nvar`.
    pub fn reconstruct_region(
        &self,
        kind: DataKind,
        src: &Field<T>,
        region: Region,
        xbuf: &mut Field<T>,
        out: &mut Field<T>,
    ) {
        let m = self.degree as isize;
        let n = self.nodes();
        let nvar = src.width;
        let dims = region.dims;
        let ring = region.ring;
        let nx = region.nx as isize;
        // x sweep over the bounding box, widened in y by the stencil reach
        let (row_lo, row_hi) = if dims == 1 {
            (0, 1)
        } else {
            (-ring - m, region.ny as isize + ring + m)
        };
        let target: &mut Field<T> = if dims == 1 { &mut *out } else { &mut *xbuf };
        let layout = src.layout;
        let row_len = target.row_len();
        target
            .data
            .par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(r, row)| {
                let j = r as isize - layout.gy as isize;
                if j < row_lo || j >= row_hi {
                    return;
                }
                let mut data = [T::zero(); MAX_WIDTH];
                let mut nodal = [T::zero(); MAX_NODES];
                for i in -ring..nx + ring {
                    let base = (i + layout.gx as isize) as usize * n * nvar;
                    for v in 0..nvar {
                        for e in -m..=m {
                            data[(e + m) as usize] = src.get(i + e, j)[v];
                        }
                        self.reconstruct_line(kind, &data[..(2 * m + 1) as usize], &mut nodal[..n]);
                        for a in 0..n {
                            row[base + a * nvar + v] = nodal[a];
                        }
                    }
                }
            });
        if dims == 1 {
            return;
        }
        let xb: &Field<T> = xbuf;
        let out_layout = out.layout;
        let out_row = out.row_len();
        let width = n * n * nvar;
        out.data
            .par_chunks_mut(out_row)
            .enumerate()
            .for_each(|(r, row)| {
                let j = r as isize - out_layout.gy as isize;
                if j < -ring || j >= region.ny as isize + ring {
                    return;
                }
                let mut data = [T::zero(); MAX_WIDTH];
                let mut nodal = [T::zero(); MAX_NODES];
                for i in region.cols(j) {
                    let base = (i + out_layout.gx as isize) as usize * width;
                    for a in 0..n {
                        for v in 0..nvar {
                            for e in -m..=m {
                                data[(e + m) as usize] = xb.get(i, j + e)[a * nvar + v];
                            }
                            self.reconstruct_line(kind, &data[..(2 * m + 1) as usize], &mut nodal[..n]);
                            for b in 0..n {
                                row[base + (a + n * b) * nvar + v] = nodal[b];
                            }
                        }
                    }
                }
            });
    }
}
