use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::nodal::Vec3;

/// One 3-vector per grid node, flat with x varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    data: Vec<Vec3>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField { grid, data: vec![[0.0; 3]; grid.len()] }
    }

    pub fn uniform(grid: Grid, v: Vec3) -> Self {
        VectorField { grid, data: vec![v; grid.len()] }
    }

    pub fn from_data(grid: Grid, data: Vec<Vec3>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch("data length does not match node count"));
        }
        Ok(VectorField { grid, data })
    }

    /// Samples `f` at every node coordinate.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> Vec3) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        VectorField { grid, data }
    }

    /// Assembles a field from three scalar component arrays.
    pub fn from_components(grid: Grid, comps: [&[f64]; 3]) -> Self {
        let data = (0..grid.len())
            .map(|i| [comps[0][i], comps[1][i], comps[2][i]])
            .collect();
        VectorField { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn data(&self) -> &[Vec3] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Vec3] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.data.iter().map(|v| v[c]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.iter().all(|x| x.is_finite()))
    }

    pub fn ensure_finite(&self, what: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what))
        }
    }

    fn check_same_grid(&self, other: &VectorField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids"));
        }
        Ok(())
    }

    /// `self - other`, node by node.
    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.check_same_grid(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
            .collect();
        Ok(VectorField { grid: self.grid, data })
    }

    pub fn scaled(&self, s: f64) -> VectorField {
        let data = self.data.iter().map(|v| [s * v[0], s * v[1], s * v[2]]).collect();
        VectorField { grid: self.grid, data }
    }

    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> VectorField {
        VectorField { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Largest absolute component of `self - other`.
    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .flat_map(|(a, b)| (0..3).map(move |c| (a[c] - b[c]).abs()))
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for VectorField {
    type Output = Vec3;
    fn index(&self, i: usize) -> &Vec3 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for VectorField {
    fn index_mut(&mut self, i: usize) -> &mut Vec3 {
        &mut self.data[i]
    }
}
