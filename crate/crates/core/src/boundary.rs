//! Ghost-cell filling.

use crate::grid::{Field, Grid};
use crate::real::Real;
use crate::systems::{zero_state, Axis, HyperbolicSystem};
use std::fmt;
use std::sync::Arc;

/// Primitive state prescribed at `(x, y, t)`.
pub type StateFn<T> = Arc<dyn Fn(T, T, T, &mut [T]) + Send + Sync>;

#[derive(Clone)]
pub enum Boundary<T> {
    Periodic,
    /// Zero-gradient extrapolation.
    Outflow,
    /// Mirror with the wall-normal components flipped.
    Reflecting,
    /// Time-dependent prescribed state.
    Dirichlet(StateFn<T>),
    /// Different conditions before and after a position along the side.
    Split {
        at: T,
        before: Box<Boundary<T>>,
        after: Box<Boundary<T>>,
    },
}

impl<T> fmt::Debug for Boundary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Periodic => f.write_str("periodic"),
            Self::Outflow => f.write_str("outflow"),
            Self::Reflecting => f.write_str("reflecting"),
            Self::Dirichlet(_) => f.write_str("dirichlet"),
            Self::Split { before, after, .. } => write!(f, "split({before:?}, {after:?})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Which variables a field holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variables {
    /// Cell averages of conserved quantities.
    ConservedAverages,
    /// Primitive point values at cell centres.
    PrimitivePoints,
}

#[derive(Clone, Debug)]
pub struct BoundarySet<T> {
    pub left: Boundary<T>,
    pub right: Boundary<T>,
    pub bottom: Boundary<T>,
    pub top: Boundary<T>,
}

impl<T: Real> BoundarySet<T> {
    pub fn uniform(b: Boundary<T>) -> Self {
        Self {
            left: b.clone(),
            right: b.clone(),
            bottom: b.clone(),
            top: b,
        }
    }

    pub fn side(&self, side: Side) -> &Boundary<T> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    fn resolve(&self, side: Side, along: T) -> &Boundary<T> {
        let mut b = self.side(side);
        while let Boundary::Split { at, before, after } = b {
            b = if along < *at { before } else { after };
        }
        b
    }

    /// Side owning ghost cell `(i, j)` and the condition applied there.
    /// Corner ghosts belong to the y sides.
    pub fn owner(&self, grid: &Grid<T>, i: isize, j: isize) -> Option<(Side, &Boundary<T>)> {
        let (x, y) = grid.center(i, j);
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let (side, along) = if grid.dims == 2 && j < 0 {
            (Side::Bottom, x)
        } else if grid.dims == 2 && j >= ny {
            (Side::Top, x)
        } else if i < 0 {
            (Side::Left, y)
        } else if i >= nx {
            (Side::Right, y)
        } else {
            return None;
        };
        Some((side, self.resolve(side, along)))
    }

    /// Fills `depth` layers of ghost cells at time `t`. In two dimensions
    /// the x ghosts of interior rows are filled first, then the y ghosts of
    /// every column, which also fills the corners.
    pub fn fill<S: HyperbolicSystem<T> + ?Sized>(
        &self,
        sys: &S,
        grid: &Grid<T>,
        field: &mut Field<T>,
        t: T,
        vars: Variables,
        depth: usize,
    ) {
        let nx = grid.nx as isize;
        let ny = grid.ny as isize;
        let g = depth as isize;
        for j in 0..ny {
            for k in 0..g {
                self.fill_cell(sys, grid, field, t, vars, Side::Left, -1 - k, j);
                self.fill_cell(sys, grid, field, t, vars, Side::Right, nx + k, j);
            }
        }
        if grid.dims == 2 {
            for i in -g..nx + g {
                for k in 0..g {
                    self.fill_cell(sys, grid, field, t, vars, Side::Bottom, i, -1 - k);
                    self.fill_cell(sys, grid, field, t, vars, Side::Top, i, ny + k);
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_cell<S: HyperbolicSystem<T> + ?Sized>(
        &self,
        sys: &S,
        grid: &Grid<T>,
        field: &mut Field<T>,
        t: T,
        vars: Variables,
        side: Side,
        i: isize,
        j: isize,
    ) {
        let along = match side {
            Side::Left | Side::Right => grid.center(i, j).1,
            Side::Bottom | Side::Top => grid.center(i, j).0,
        };
        let b = self.resolve(side, along);
        let nx = grid.nx as isize;
        let ny = grid.ny as isize;
        let axis = match side {
            Side::Left | Side::Right => Axis::X,
            _ => Axis::Y,
        };
        let mirror = |i: isize, j: isize| match side {
            Side::Left => (-1 - i, j),
            Side::Right => (2 * nx - 1 - i, j),
            Side::Bottom => (i, -1 - j),
            Side::Top => (i, 2 * ny - 1 - j),
        };
        let w = field.width;
        let mut buf = zero_state::<T>();
        match b {
            Boundary::Periodic => {
                let src = match side {
                    Side::Left | Side::Right => (i.rem_euclid(nx), j),
                    _ => (i, j.rem_euclid(ny)),
                };
                buf[..w].copy_from_slice(field.get(src.0, src.1));
            }
            Boundary::Outflow => {
                let src = match side {
                    Side::Left => (0, j),
                    Side::Right => (nx - 1, j),
                    Side::Bottom => (i, 0),
                    Side::Top => (i, ny - 1),
                };
                buf[..w].copy_from_slice(field.get(src.0, src.1));
            }
            Boundary::Reflecting => {
                let (si, sj) = mirror(i, j);
                buf[..w].copy_from_slice(field.get(si, sj));
                sys.reflect(&mut buf[..w], axis);
            }
            Boundary::Dirichlet(f) => match vars {
                Variables::PrimitivePoints => {
                    let (x, y) = grid.center(i, j);
                    f(x, y, t, &mut buf[..w]);
                }
                Variables::ConservedAverages => cell_average(grid, i, j, w, &mut buf[..w], |x, y, q| {
                    let mut v = zero_state::<T>();
                    f(x, y, t, &mut v[..w]);
                    sys.prim_to_cons(&v[..w], q);
                }),
            },
            Boundary::Split { .. } => unreachable!(),
        }
        field.get_mut(i, j).copy_from_slice(&buf[..w]);
    }
}

/// Average over cell `(i, j)` of a vector function, by the three-point
/// Gauss–Legendre rule per axis.
pub fn cell_average<T: Real>(
    grid: &Grid<T>,
    i: isize,
    j: isize,
    width: usize,
    out: &mut [T],
    f: impl FnMut(T, T, &mut [T]),
) {
    cell_average_with(grid, i, j, width, 3, out, f)
}

/// Cell average by the `points`-point Gauss-Legendre rule per axis.
pub fn cell_average_with<T: Real>(
    grid: &Grid<T>,
    i: isize,
    j: isize,
    width: usize,
    points: usize,
    out: &mut [T],
    mut f: impl FnMut(T, T, &mut [T]),
) {
    let rule = crate::basis::gauss_legendre::<T>(points).expect("supported rule size");
    let (x0, y0) = grid.corner(i, j);
    out[..width].iter_mut().for_each(|o| *o = T::zero());
    let mut val = zero_state::<T>();
    let ny = if grid.dims == 2 { rule.len() } else { 1 };
    for by in 0..ny {
        let (y, wy) = if grid.dims == 2 {
            (y0 + rule.nodes[by] * grid.dy, rule.weights[by])
        } else {
            (T::zero(), T::one())
        };
        for (&xn, &wx) in rule.nodes.iter().zip(&rule.weights) {
            f(x0 + xn * grid.dx, y, &mut val[..width]);
            for k in 0..width {
                out[k] += wx * wy * val[k];
            }
        }
    }
}
