//! Discrete Laplacian `Δ_h`, its neighbour-sum part `~Δ_h`, and the
//! regularising solve `g = (I - Δt Δ_h)^{-1} m`.

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::{Boundary, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzOptions {
    /// Target relative residual for the iterative (3D) solve.
    pub rel_tol: f64,
    /// Iteration cap; `None` means `10 n` with `n` points per axis.
    pub max_iter: Option<usize>,
}

impl Default for HelmholtzOptions {
    fn default() -> Self {
        HelmholtzOptions { rel_tol: 1e-12, max_iter: None }
    }
}

impl HelmholtzOptions {
    pub fn validate(&self) -> Result<()> {
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidConfig(format!("Helmholtz rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidConfig("Helmholtz max_iter must be >= 1".into()));
        }
        Ok(())
    }

    fn iteration_cap(&self, grid: &Grid) -> usize {
        self.max_iter.unwrap_or(10 * grid.n())
    }
}

/// Applies `h⁻² Σ_axes (u_- + diag * u + u_+)` per node, with `u_±` taken
/// through the grid's boundary closure.
fn stencil_scalar(grid: &Grid, u: &[f64], out: &mut [f64], diag: f64) {
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    for (idx, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for axis in 0..grid.dim() {
            let s = grid.stride(axis);
            let i = (idx / s) % n;
            let base = idx - i * s;
            acc += u[base + grid.lower(i) * s] + diag * u[idx] + u[base + grid.upper(i) * s];
        }
        *o = acc * inv_h2;
    }
}

pub fn laplacian_scalar(grid: &Grid, u: &[f64], out: &mut [f64]) {
    stencil_scalar(grid, u, out, -2.0);
}

pub fn offdiag_laplacian_scalar(grid: &Grid, u: &[f64], out: &mut [f64]) {
    stencil_scalar(grid, u, out, 0.0);
}

fn per_component(u: &VectorField, f: impl Fn(&Grid, &[f64], &mut [f64])) -> VectorField {
    let grid = *u.grid();
    let mut comps: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; grid.len()]);
    for (c, out) in comps.iter_mut().enumerate() {
        f(&grid, &u.component(c), out);
    }
    VectorField::from_components(grid, [&comps[0], &comps[1], &comps[2]])
}

/// Second-order central Laplacian, component-wise, summed over axes.
pub fn laplacian(u: &VectorField) -> VectorField {
    per_component(u, laplacian_scalar)
}

/// The Laplacian stencil without its `-2 dim / h²` diagonal:
/// `~Δ_h u_i = Σ_axes (u_{i-1} + u_{i+1}) / h²`.
pub fn offdiag_laplacian(u: &VectorField) -> VectorField {
    per_component(u, offdiag_laplacian_scalar)
}

/// Discrete inner product `Σ_i w_i u_i · v_i` with the grid's quadrature
/// weights, in which `Δ_h` is self-adjoint.
pub fn inner_product(u: &VectorField, v: &VectorField) -> f64 {
    let grid = u.grid();
    u.data()
        .iter()
        .zip(v.data())
        .enumerate()
        .map(|(i, (a, b))| grid.quadrature_weight(i) * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]))
        .sum()
}

fn weighted_dot(weights: Option<&[f64]>, u: &[f64], v: &[f64]) -> f64 {
    match weights {
        None => u.iter().zip(v).map(|(a, b)| a * b).sum(),
        Some(w) => u.iter().zip(v).zip(w).map(|((a, b), w)| w * a * b).sum(),
    }
}

/// Thomas algorithm for a tridiagonal system; `sub[0]` and `sup[n-1]` are
/// ignored. The matrices it is used on are strictly diagonally dominant.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Cyclic tridiagonal solve (corner entries `sub[0]` at (0, n-1) and
/// `sup[n-1]` at (n-1, 0)) via Sherman–Morrison.
pub fn solve_cyclic_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(sub, &bb, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(sub, &bb, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn helmholtz_1d(grid: &Grid, m: &[f64], dt: f64) -> Vec<f64> {
    let n = grid.n();
    let r = dt / (grid.h() * grid.h());
    let mut sub = vec![-r; n];
    let mut diag = vec![1.0 + 2.0 * r; n];
    let mut sup = vec![-r; n];
    match grid.bc() {
        Boundary::Periodic => solve_cyclic_tridiagonal(&sub, &diag, &sup, m),
        Boundary::Neumann => {
            // fold the ghost value into the boundary rows
            if grid.lower(0) == 1 {
                sup[0] = -2.0 * r;
                sub[n - 1] = -2.0 * r;
            } else {
                diag[0] = 1.0 + r;
                diag[n - 1] = 1.0 + r;
            }
            solve_tridiagonal(&sub, &diag, &sup, m)
        }
    }
}

/// Conjugate gradients for `(I - dt Δ_h) g = m` in the grid's weighted inner
/// product, starting from `g = m`.
pub fn helmholtz_cg(grid: &Grid, m: &[f64], dt: f64, opts: &HelmholtzOptions) -> Result<Vec<f64>> {
    let len = m.len();
    let weights: Option<Vec<f64>> = if grid.has_uniform_weights() {
        None
    } else {
        Some((0..len).map(|i| grid.quadrature_weight(i)).collect())
    };
    let w = weights.as_deref();
    let apply = |x: &[f64], out: &mut [f64]| {
        laplacian_scalar(grid, x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi - dt * *o;
        }
    };

    let rhs_norm = weighted_dot(w, m, m).sqrt();
    if rhs_norm == 0.0 {
        return Ok(vec![0.0; len]);
    }
    let mut x = m.to_vec();
    let mut ap = vec![0.0; len];
    apply(&x, &mut ap);
    let mut r: Vec<f64> = m.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = weighted_dot(w, &r, &r);
    let target = opts.rel_tol * rhs_norm;
    let cap = opts.iteration_cap(grid);
    let mut iter = 0;
    while rr.sqrt() > target {
        if iter == cap {
            return Err(Error::HelmholtzNotConverged { iterations: iter, residual: rr.sqrt() / rhs_norm });
        }
        apply(&p, &mut ap);
        let alpha = rr / weighted_dot(w, &p, &ap);
        for i in 0..len {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = weighted_dot(w, &r, &r);
        let beta = rr_new / rr;
        for i in 0..len {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
        iter += 1;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Helmholtz solve"));
    }
    Ok(x)
}

/// Solves `(I - dt Δ_h) g = m` for one scalar component: a direct tridiagonal
/// factorisation in 1D, conjugate gradients in 3D.
pub fn helmholtz_solve_scalar(grid: &Grid, m: &[f64], dt: f64, opts: &HelmholtzOptions) -> Result<Vec<f64>> {
    if dt < 0.0 {
        return Err(Error::InvalidConfig(format!("Helmholtz dt must be >= 0, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(m.to_vec());
    }
    if grid.dim() == 1 {
        Ok(helmholtz_1d(grid, m, dt))
    } else {
        helmholtz_cg(grid, m, dt, opts)
    }
}

/// `g = (I - dt Δ_h)^{-1} m`, component by component.
pub fn helmholtz_solve(m: &VectorField, dt: f64, opts: &HelmholtzOptions) -> Result<VectorField> {
    opts.validate()?;
    let grid = *m.grid();
    let g0 = helmholtz_solve_scalar(&grid, &m.component(0), dt, opts)?;
    let g1 = helmholtz_solve_scalar(&grid, &m.component(1), dt, opts)?;
    let g2 = helmholtz_solve_scalar(&grid, &m.component(2), dt, opts)?;
    Ok(VectorField::from_components(grid, [&g0, &g1, &g2]))
}

/// `Δ_h (I - dt Δ_h)^{-1} u` for one scalar component.
pub fn regularized_laplacian_scalar(grid: &Grid, u: &[f64], dt: f64, opts: &HelmholtzOptions) -> Result<Vec<f64>> {
    let g = helmholtz_solve_scalar(grid, u, dt, opts)?;
    let mut out = vec![0.0; g.len()];
    laplacian_scalar(grid, &g, &mut out);
    Ok(out)
}
