//! Exact solutions with Neumann-compatible phase, their derivatives, and the
//! forcing that makes them solve the forced LLG equation.
//!
//! `m_e = (cos φ sin t, sin φ sin t, cos t)` with `φ = cos(πx)` in 1D and
//! `φ = X(x) X(y) X(z)`, `X(s) = s²(1-s)²`, in 3D.

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use crate::nodal::{cross, Vec3};
use crate::norms::{error_norms_with, NormConvention, NormTriple};
use crate::schemes::{integrate, Forcing, SchemeConfig};
use std::f64::consts::PI;

/// Time at which the exact solution is frozen to produce norm-study initial data.
pub const NORM_STUDY_TIME: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedProblem {
    pub dim: usize,
    pub alpha: f64,
    pub final_time: f64,
}

/// `φ`, `|∇φ|²` and `Δφ` at a point.
fn phase(point: [f64; 3], dim: usize) -> (f64, f64, f64) {
    if dim == 1 {
        let x = point[0];
        let (s, c) = (PI * x).sin_cos();
        (c, PI * PI * s * s, -PI * PI * c)
    } else {
        let q = |s: f64| s * s * (1.0 - s) * (1.0 - s);
        let dq = |s: f64| 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
        let ddq = |s: f64| 2.0 * (1.0 - 6.0 * s + 6.0 * s * s);
        let [x, y, z] = point;
        let (qx, qy, qz) = (q(x), q(y), q(z));
        let grad = [dq(x) * qy * qz, qx * dq(y) * qz, qx * qy * dq(z)];
        let lap = ddq(x) * qy * qz + qx * ddq(y) * qz + qx * qy * ddq(z);
        (qx * qy * qz, grad.iter().map(|g| g * g).sum(), lap)
    }
}

pub fn exact_solution(point: [f64; 3], t: f64, dim: usize) -> Vec3 {
    let (phi, _, _) = phase(point, dim);
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = t.sin_cos();
    [cp * st, sp * st, ct]
}

pub fn exact_laplacian(point: [f64; 3], t: f64, dim: usize) -> Vec3 {
    let (phi, g2, lap) = phase(point, dim);
    let (sp, cp) = phi.sin_cos();
    let st = t.sin();
    [st * (-cp * g2 - sp * lap), st * (-sp * g2 + cp * lap), 0.0]
}

pub fn exact_time_derivative(point: [f64; 3], t: f64, dim: usize) -> Vec3 {
    let (phi, _, _) = phase(point, dim);
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = t.sin_cos();
    [cp * ct, sp * ct, -st]
}

/// `f = ∂_t m + m × Δm + α m × (m × Δm)` at the exact solution.
pub fn forcing(point: [f64; 3], t: f64, alpha: f64, dim: usize) -> Vec3 {
    let m = exact_solution(point, t, dim);
    let dm = exact_time_derivative(point, t, dim);
    let p = cross(m, exact_laplacian(point, t, dim));
    let d = cross(m, p);
    [dm[0] + p[0] + alpha * d[0], dm[1] + p[1] + alpha * d[1], dm[2] + p[2] + alpha * d[2]]
}

impl ManufacturedProblem {
    pub fn new(dim: usize, alpha: f64, final_time: f64) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::InvalidConfig(format!("dimension must be 1 or 3, got {dim}")));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) || !(final_time >= 0.0 && final_time.is_finite()) {
            return Err(Error::InvalidConfig("alpha and final time must be finite and non-negative".into()));
        }
        Ok(ManufacturedProblem { dim, alpha, final_time })
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch("grid dimension differs from the problem's"));
        }
        Ok(())
    }

    pub fn sample(&self, grid: &Grid, t: f64) -> VectorField {
        VectorField::from_fn(*grid, |p| exact_solution(p, t, self.dim))
    }

    pub fn forcing_field(&self, grid: &Grid, t: f64) -> VectorField {
        VectorField::from_fn(*grid, |p| forcing(p, t, self.alpha, self.dim))
    }

    /// Initial data for the unforced norm studies.
    pub fn norm_study_initial(&self, grid: &Grid) -> VectorField {
        self.sample(grid, NORM_STUDY_TIME)
    }

    /// Integrates from the exact initial data to `T` with forcing and returns
    /// the error norms at `T` (Euclidean convention).
    pub fn evaluate_run(&self, grid: &Grid, cfg: &SchemeConfig, n_steps: usize) -> Result<NormTriple> {
        self.evaluate_run_with(grid, cfg, n_steps, NormConvention::Euclidean)
    }

    pub fn evaluate_run_with(
        &self,
        grid: &Grid,
        cfg: &SchemeConfig,
        n_steps: usize,
        convention: NormConvention,
    ) -> Result<NormTriple> {
        self.check_grid(grid)?;
        let reached = n_steps as f64 * cfg.dt;
        if (reached - self.final_time).abs() > 1e-9 * self.final_time.max(cfg.dt) {
            return Err(Error::InvalidConfig(format!(
                "{n_steps} steps of {} reach t = {reached}, not T = {}",
                cfg.dt, self.final_time
            )));
        }
        let m0 = self.sample(grid, 0.0);
        let (m, _) = integrate(&m0, cfg, n_steps, Some(self))?;
        let e = m.sub(&self.sample(grid, self.final_time))?;
        Ok(error_norms_with(&e, convention))
    }
}

impl Forcing for ManufacturedProblem {
    fn sample(&self, grid: &Grid, t: f64) -> VectorField {
        self.forcing_field(grid, t)
    }
}
