//! Uniform structured grids on the unit interval / unit cube.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Homogeneous Neumann, closed by ghost values outside the domain.
    Neumann,
    Periodic,
}

/// Where the unknowns sit relative to the mesh.
///
/// `Node`: `n` points `x_i = i h` with `h = 1/(n-1)`; the Neumann ghost is the
/// mirror image `u_{-1} = u_1`.
///
/// `Cell`: `n` cell centres `x_i = (i + 1/2) h` with `h = 1/n`; the Neumann
/// ghost is the reflection across the face, `u_{-1} = u_0`. This closure keeps
/// `Δ_h` symmetric in the plain summation inner product.
///
/// Periodic grids always use `h = 1/n`; the layout only shifts coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    Node,
    Cell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    h: f64,
    bc: Boundary,
    layout: Layout,
}

/// Node-centred grid with `n` points per axis.
pub fn make_grid(dim: usize, n: usize, bc: Boundary) -> Result<Grid> {
    Grid::new(dim, n, bc, Layout::Node)
}

impl Grid {
    pub fn new(dim: usize, n: usize, bc: Boundary, layout: Layout) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 3, got {dim}")));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points per axis, got {n}")));
        }
        let h = match (bc, layout) {
            (Boundary::Neumann, Layout::Node) => 1.0 / (n - 1) as f64,
            _ => 1.0 / n as f64,
        };
        Ok(Grid { dim, n, h, bc, layout })
    }

    pub fn cell_centered(dim: usize, n: usize, bc: Boundary) -> Result<Self> {
        Grid::new(dim, n, bc, Layout::Cell)
    }

    /// Grid with `intervals` mesh intervals per axis, i.e. `h = 1/intervals`.
    pub fn with_intervals(dim: usize, intervals: usize, bc: Boundary, layout: Layout) -> Result<Self> {
        let n = match (bc, layout) {
            (Boundary::Neumann, Layout::Node) => intervals + 1,
            _ => intervals,
        };
        Grid::new(dim, n, bc, layout)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn bc(&self) -> Boundary {
        self.bc
    }

    #[inline]
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h^dim`, the volume attached to one node.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Distance between consecutive entries of axis `axis` in the flat layout
    /// (x varies fastest).
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow(axis as u32)
    }

    #[inline]
    pub fn coord_1d(&self, i: usize) -> f64 {
        match self.layout {
            Layout::Node => i as f64 * self.h,
            Layout::Cell => (i as f64 + 0.5) * self.h,
        }
    }

    /// Per-axis indices of flat index `idx`.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut r = idx;
        for slot in out.iter_mut().take(self.dim) {
            *slot = r % self.n;
            r /= self.n;
        }
        out
    }

    /// Coordinates of node `idx`; unused axes are zero.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unravel(idx);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.coord_1d(ijk[a]);
        }
        p
    }

    /// Index of the lower neighbour of `i` along one axis, applying the
    /// boundary closure.
    #[inline]
    pub fn lower(&self, i: usize) -> usize {
        if i > 0 {
            return i - 1;
        }
        match (self.bc, self.layout) {
            (Boundary::Periodic, _) => self.n - 1,
            (Boundary::Neumann, Layout::Node) => 1,
            (Boundary::Neumann, Layout::Cell) => 0,
        }
    }

    #[inline]
    pub fn upper(&self, i: usize) -> usize {
        if i + 1 < self.n {
            return i + 1;
        }
        match (self.bc, self.layout) {
            (Boundary::Periodic, _) => 0,
            (Boundary::Neumann, Layout::Node) => self.n - 2,
            (Boundary::Neumann, Layout::Cell) => self.n - 1,
        }
    }

    /// Quadrature weight of node `idx` for the discrete inner product in which
    /// `Δ_h` is self-adjoint: 1/2 per axis on node-centred Neumann faces, 1
    /// everywhere else.
    pub fn quadrature_weight(&self, idx: usize) -> f64 {
        if !(self.bc == Boundary::Neumann && self.layout == Layout::Node) {
            return 1.0;
        }
        let ijk = self.unravel(idx);
        let mut w = 1.0;
        for &i in ijk.iter().take(self.dim) {
            if i == 0 || i + 1 == self.n {
                w *= 0.5;
            }
        }
        w
    }

    pub fn has_uniform_weights(&self) -> bool {
        !(self.bc == Boundary::Neumann && self.layout == Layout::Node)
    }
}
