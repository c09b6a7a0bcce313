//! Uniform Cartesian grids and per-cell storage with ghost layers.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::systems::Axis;
use std::ops::Range;

/// Uniform Cartesian grid in one or two dimensions.
#[derive(Clone, Debug)]
pub struct Grid<T> {
    pub dims: usize,
    pub nx: usize,
    pub ny: usize,
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
    pub dx: T,
    pub dy: T,
}

impl<T: Real> Grid<T> {
    pub fn new(dims: usize, nx: usize, ny: usize, x: [T; 2], y: [T; 2]) -> Result<Self> {
        if !(1..=2).contains(&dims) {
            return Err(Error::Config(format!("unsupported dimension {dims}")));
        }
        let ny = if dims == 1 { 1 } else { ny };
        if nx == 0 || ny == 0 {
            return Err(Error::Config("grid must have at least one cell per axis".into()));
        }
        if !(x[1] > x[0]) || (dims == 2 && !(y[1] > y[0])) {
            return Err(Error::Config("empty domain".into()));
        }
        let dx = (x[1] - x[0]) / T::from_usize_lossy(nx);
        let dy = if dims == 2 {
            (y[1] - y[0]) / T::from_usize_lossy(ny)
        } else {
            T::one()
        };
        Ok(Self {
            dims,
            nx,
            ny,
            x0: x[0],
            x1: x[1],
            y0: y[0],
            y1: y[1],
            dx,
            dy,
        })
    }

    pub fn ncells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn spacing(&self, axis: Axis) -> T {
        match axis {
            Axis::X => self.dx,
            _ => self.dy,
        }
    }

    pub fn axes(&self) -> &'static [Axis] {
        if self.dims == 1 {
            &[Axis::X]
        } else {
            &[Axis::X, Axis::Y]
        }
    }

    /// Centre of cell `(i, j)`; ghost indices extend the grid uniformly.
    pub fn center(&self, i: isize, j: isize) -> (T, T) {
        let half = T::lit(0.5);
        let x = self.x0 + (T::from_isize(i).unwrap() + half) * self.dx;
        let y = if self.dims == 2 {
            self.y0 + (T::from_isize(j).unwrap() + half) * self.dy
        } else {
            T::zero()
        };
        (x, y)
    }

    /// Lower-left corner of cell `(i, j)`.
    pub fn corner(&self, i: isize, j: isize) -> (T, T) {
        let x = self.x0 + T::from_isize(i).unwrap() * self.dx;
        let y = if self.dims == 2 {
            self.y0 + T::from_isize(j).unwrap() * self.dy
        } else {
            T::zero()
        };
        (x, y)
    }

    pub fn layout(&self, ghost: usize) -> Layout {
        Layout::new(self.dims, self.nx, self.ny, ghost)
    }
}

/// Index arithmetic for an `nx x ny` block padded by ghost layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub nx: usize,
    pub ny: usize,
    pub gx: usize,
    pub gy: usize,
    pub px: usize,
    pub py: usize,
}

impl Layout {
    pub fn new(dims: usize, nx: usize, ny: usize, ghost: usize) -> Self {
        let gy = if dims == 2 { ghost } else { 0 };
        let ny = if dims == 2 { ny } else { 1 };
        Self {
            nx,
            ny,
            gx: ghost,
            gy,
            px: nx + 2 * ghost,
            py: ny + 2 * gy,
        }
    }

    #[inline(always)]
    pub fn index(&self, i: isize, j: isize) -> usize {
        debug_assert!(self.contains(i, j), "cell ({i}, {j}) outside layout {self:?}");
        (j + self.gy as isize) as usize * self.px + (i + self.gx as isize) as usize
    }

    #[inline(always)]
    pub fn contains(&self, i: isize, j: isize) -> bool {
        i >= -(self.gx as isize)
            && i < (self.nx + self.gx) as isize
            && j >= -(self.gy as isize)
            && j < (self.ny + self.gy) as isize
    }

    pub fn rows(&self) -> Range<isize> {
        -(self.gy as isize)..(self.ny + self.gy) as isize
    }

    pub fn len(&self) -> usize {
        self.px * self.py
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fixed-width record per cell over a padded layout.
#[derive(Clone, Debug)]
pub struct Field<T> {
    pub layout: Layout,
    pub width: usize,
    pub data: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn new(layout: Layout, width: usize) -> Self {
        Self {
            layout,
            width,
            data: vec![T::zero(); layout.len() * width],
        }
    }

    #[inline(always)]
    pub fn get(&self, i: isize, j: isize) -> &[T] {
        let k = self.layout.index(i, j) * self.width;
        &self.data[k..k + self.width]
    }

    #[inline(always)]
    pub fn get_mut(&mut self, i: isize, j: isize) -> &mut [T] {
        let k = self.layout.index(i, j) * self.width;
        &mut self.data[k..k + self.width]
    }

    /// Length of one padded row of records.
    #[inline(always)]
    pub fn row_len(&self) -> usize {
        self.layout.px * self.width
    }

    /// Copies the values of the interior cells into a compact row-major
    /// vector.
    pub fn interior(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.layout.nx * self.layout.ny * self.width);
        for j in 0..self.layout.ny as isize {
            for i in 0..self.layout.nx as isize {
                out.extend_from_slice(self.get(i, j));
            }
        }
        out
    }
}

/// Set of cells handled by a sweep: the interior plus, optionally, the
/// face-adjacent ghost layer (corners excluded).
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub dims: usize,
    pub nx: usize,
    pub ny: usize,
    pub ring: isize,
}

impl Region {
    pub fn interior(dims: usize, nx: usize, ny: usize) -> Self {
        Self { dims, nx, ny, ring: 0 }
    }

    pub fn with_ring(dims: usize, nx: usize, ny: usize) -> Self {
        Self { dims, nx, ny, ring: 1 }
    }

    #[inline]
    pub fn contains(&self, i: isize, j: isize) -> bool {
        let (nx, ny, r) = (self.nx as isize, self.ny as isize, self.ring);
        if self.dims == 1 {
            j == 0 && i >= -r && i < nx + r
        } else {
            (i >= 0 && i < nx && j >= -r && j < ny + r) || (i >= -r && i < nx + r && j >= 0 && j < ny)
        }
    }

    pub fn rows(&self) -> Range<isize> {
        if self.dims == 1 {
            0..1
        } else {
            -self.ring..self.ny as isize + self.ring
        }
    }

    pub fn cols(&self, j: isize) -> Range<isize> {
        let nx = self.nx as isize;
        if self.dims == 1 || (j >= 0 && j < self.ny as isize) {
            -self.ring..nx + self.ring
        } else {
            0..nx
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        self.rows().flat_map(move |j| self.cols(j).map(move |i| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.cells().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
