//! Crank–Nicolson reference schemes, solved by Picard iteration with the
//! nonlinear coefficients frozen at the latest iterate.

use super::{check_inputs, effective_field, scaled_forcing, SchemeConfig, StepDiagnostics};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::nodal::{cross, solve3_cramer, Coeffs3, Vec3};
use crate::operators::{laplacian, offdiag_laplacian};

fn picard(
    m: &VectorField,
    cfg: &SchemeConfig,
    mut sweep: impl FnMut(&VectorField) -> VectorField,
) -> Result<(VectorField, StepDiagnostics)> {
    let mut cur = m.clone();
    let mut change = f64::INFINITY;
    for it in 1..=cfg.picard_max {
        let next = sweep(&cur);
        next.ensure_finite("Picard iterate")?;
        change = next.max_abs_diff(&cur);
        cur = next;
        if change <= cfg.picard_tol {
            let diag = StepDiagnostics::of(&cur, Some(it));
            return Ok((cur, diag));
        }
    }
    Err(Error::PicardNotConverged { iterations: cfg.picard_max, residual: change })
}

/// Implicit midpoint rule
/// `(m' - m)/Δt = -m̄ × (Δ_h m̄ + α m̄ × Δ_h m̄)`, `m̄ = (m' + m)/2`.
///
/// Each sweep freezes the field at the current midpoint and applies a nodal
/// Cayley update, so every iterate has `|m'_i| = |m_i|`. Converges when
/// `2 Δt dim / h²` is below one, roughly.
pub fn step_cn_midpoint(
    m: &VectorField,
    cfg: &SchemeConfig,
    f: Option<&VectorField>,
) -> Result<(VectorField, StepDiagnostics)> {
    check_inputs(m, cfg, f)?;
    let grid = *m.grid();
    let (dt, alpha) = (cfg.dt, cfg.alpha);
    picard(m, cfg, |cur| {
        let mid = VectorField::from_data(
            grid,
            cur.data()
                .iter()
                .zip(m.data())
                .map(|(a, b)| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])])
                .collect(),
        )
        .expect("same grid");
        let lap = laplacian(&mid);
        let data = m
            .data()
            .iter()
            .enumerate()
            .map(|(i, &mi)| {
                let k = Coeffs3::from_field(effective_field(mid[i], lap[i], alpha), dt);
                let r = k.cayley_rhs(mi);
                let fd = scaled_forcing(f, i, dt);
                solve3_cramer(k, [r[0] + fd[0], r[1] + fd[1], r[2] + fd[2]])
            })
            .collect();
        VectorField::from_data(grid, data).expect("same grid")
    })
}

/// Trapezoidal rule
/// `m' + (Δt/2) m' × H(m') = m - (Δt/2) m × H(m) + Δt f`, `H(u) = Δ_h u + α u × Δ_h u`.
///
/// In `m' × H(m')` the diagonal of `Δ_h` drops out, so the frozen system uses
/// `~H(u) = ~Δ_h u + α u × ~Δ_h u` instead. `|m|` is not conserved exactly.
pub fn step_cn_trapezoidal(
    m: &VectorField,
    cfg: &SchemeConfig,
    f: Option<&VectorField>,
) -> Result<(VectorField, StepDiagnostics)> {
    check_inputs(m, cfg, f)?;
    let grid = *m.grid();
    let (dt, alpha) = (cfg.dt, cfg.alpha);
    let lap_m = laplacian(m);
    let rhs: Vec<Vec3> = m
        .data()
        .iter()
        .enumerate()
        .map(|(i, &mi)| {
            let t = cross(mi, effective_field(mi, lap_m[i], alpha));
            let fd = scaled_forcing(f, i, dt);
            [
                mi[0] - 0.5 * dt * t[0] + fd[0],
                mi[1] - 0.5 * dt * t[1] + fd[1],
                mi[2] - 0.5 * dt * t[2] + fd[2],
            ]
        })
        .collect();
    picard(m, cfg, |cur| {
        let off = offdiag_laplacian(cur);
        let data = rhs
            .iter()
            .enumerate()
            .map(|(i, &r)| solve3_cramer(Coeffs3::from_field(effective_field(cur[i], off[i], alpha), dt), r))
            .collect();
        VectorField::from_data(grid, data).expect("same grid")
    })
}
