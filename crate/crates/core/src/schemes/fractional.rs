//! The fractional Gauss–Seidel scheme.
//!
//! Per step, with `L_c = Δ_h g_c` and `g = (I - Δt Δ_h)^{-1}(·)`:
//!
//! 1. From `L^n` build `h^n, b^n`; solve the stage-1 system (rows 2 and 3 are
//!    the identity, row 1 back-substitutes). Refresh `g_1^{n+1}` from the
//!    first component of the result.
//! 2. Rebuild `h, b` with `L_1^{n+1}`; solve the stage-2 system (a 2×2 block
//!    for components 1, 2; component 3 from the right-hand side). Its matrix
//!    keeps `h_2^n, h_3^n` from stage 1. Refresh `g_2^{n+1}` from the second
//!    component.
//! 3. Rebuild `h, b` with `(L_1^{n+1}, L_2^{n+1}, L_3^n)` and solve the full
//!    Cayley system. This stage alone produces `m^{n+1}`, so `|m_i|` is kept.
//!
//! Every right-hand side is built from `m^n`; stages 1 and 2 only serve to
//! refresh `g_1` and `g_2`.

use super::{check_inputs, effective_field, scaled_forcing, SchemeConfig, StepDiagnostics};
use crate::error::Result;
use crate::field::VectorField;
use crate::nodal::{solve3_cramer, Coeffs3, Vec3};
use crate::operators::regularized_laplacian_scalar;

/// Per-node effective field `h = L + α m × L` and right-hand side
/// `b = (I - K(h)) m + Δt f` for one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedCoeffs {
    pub h: Vec3,
    pub b: Vec3,
}

impl DampedCoeffs {
    /// `lap_g` holds the (possibly mixed time level) `Δ_h g` components;
    /// `forcing_dt` is `Δt f` at this node.
    #[inline]
    pub fn assemble(m: Vec3, lap_g: Vec3, alpha: f64, dt: f64, forcing_dt: Vec3) -> Self {
        let h = effective_field(m, lap_g, alpha);
        let r = Coeffs3::from_field(h, dt).cayley_rhs(m);
        DampedCoeffs { h, b: [r[0] + forcing_dt[0], r[1] + forcing_dt[1], r[2] + forcing_dt[2]] }
    }
}

/// Right-hand side of the undamped stages written out component by component:
/// `b_1 = m_1 + (Δt/2)(L_2 m_3 - L_3 m_2)` and cyclically.
pub fn undamped_rhs(m: Vec3, lap_g: Vec3, dt: f64) -> Vec3 {
    let (a, b, c) = (0.5 * dt * lap_g[0], 0.5 * dt * lap_g[1], 0.5 * dt * lap_g[2]);
    [
        m[0] - (m[1] * c - m[2] * b),
        m[1] - (m[2] * a - m[0] * c),
        m[2] - (m[0] * b - m[1] * a),
    ]
}

/// Solves `[[1, c, -b], [0, 1, 0], [0, 0, 1]] x = rhs`.
#[inline]
pub fn stage1_solve(k: Coeffs3, rhs: Vec3) -> Vec3 {
    let (x2, x3) = (rhs[1], rhs[2]);
    [rhs[0] - (k.c * x2 - k.b * x3), x2, x3]
}

/// Solves `[[1, c, -b], [-c, 1, a], [0, 0, 1]] x = rhs`.
#[inline]
pub fn stage2_solve(k: Coeffs3, rhs: Vec3) -> Vec3 {
    let x3 = rhs[2];
    let r1 = rhs[0] + k.b * x3;
    let r2 = rhs[1] - k.a * x3;
    let det = 1.0 + k.c * k.c;
    [(r1 - k.c * r2) / det, (r2 + k.c * r1) / det, x3]
}

pub fn step_fractional(
    m: &VectorField,
    cfg: &SchemeConfig,
    f: Option<&VectorField>,
) -> Result<(VectorField, StepDiagnostics)> {
    check_inputs(m, cfg, f)?;
    let grid = *m.grid();
    let (dt, alpha) = (cfg.dt, cfg.alpha);
    let reg = |u: &[f64]| regularized_laplacian_scalar(&grid, u, dt, &cfg.helmholtz);
    let nodes = m.data();

    let lap1 = reg(&m.component(0))?;
    let lap2 = reg(&m.component(1))?;
    let lap3 = reg(&m.component(2))?;

    // stage 1
    let mut h_stage1 = Vec::with_capacity(nodes.len());
    let mut first = Vec::with_capacity(nodes.len());
    for (i, &mi) in nodes.iter().enumerate() {
        let d = DampedCoeffs::assemble(mi, [lap1[i], lap2[i], lap3[i]], alpha, dt, scaled_forcing(f, i, dt));
        first.push(stage1_solve(Coeffs3::from_field(d.h, dt), d.b)[0]);
        h_stage1.push(d.h);
    }
    let lap1_new = reg(&first)?;

    // stage 2
    let mut second = Vec::with_capacity(nodes.len());
    for (i, &mi) in nodes.iter().enumerate() {
        let d = DampedCoeffs::assemble(mi, [lap1_new[i], lap2[i], lap3[i]], alpha, dt, scaled_forcing(f, i, dt));
        let k = Coeffs3::new(0.5 * dt * d.h[0], 0.5 * dt * h_stage1[i][1], 0.5 * dt * h_stage1[i][2]);
        second.push(stage2_solve(k, d.b)[1]);
    }
    let lap2_new = reg(&second)?;

    // stage 3
    let out: Vec<Vec3> = nodes
        .iter()
        .enumerate()
        .map(|(i, &mi)| {
            let d = DampedCoeffs::assemble(mi, [lap1_new[i], lap2_new[i], lap3[i]], alpha, dt, scaled_forcing(f, i, dt));
            solve3_cramer(Coeffs3::from_field(d.h, dt), d.b)
        })
        .collect();
    let out = VectorField::from_data(grid, out)?;
    out.ensure_finite("fractional step")?;
    let diag = StepDiagnostics::of(&out, None);
    Ok((out, diag))
}
