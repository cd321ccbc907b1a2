use super::{check_inputs, SchemeConfig, StepDiagnostics};
use super::fractional::DampedCoeffs;
use crate::error::Result;
use crate::field::VectorField;
use crate::nodal::{solve3_cramer, Coeffs3};
use crate::operators::regularized_laplacian_scalar;

/// One step of `(m' - m)/Δt = -(m' + m)/2 × H(m, Δ_h g^n)` with every field at
/// `t_n`. Norm-preserving but only conditionally stable: high wavenumbers
/// grow by `sqrt(1 + s²)`, `s = Δt σ/(1 + Δt σ)`, per step.
pub fn step_explicit_regularized(
    m: &VectorField,
    cfg: &SchemeConfig,
    f: Option<&VectorField>,
) -> Result<(VectorField, StepDiagnostics)> {
    check_inputs(m, cfg, f)?;
    let grid = *m.grid();
    let lap_g: Vec<Vec<f64>> = (0..3)
        .map(|c| regularized_laplacian_scalar(&grid, &m.component(c), cfg.dt, &cfg.helmholtz))
        .collect::<Result<_>>()?;

    let out = m.data().iter().enumerate().map(|(i, &mi)| {
        let lg = [lap_g[0][i], lap_g[1][i], lap_g[2][i]];
        let d = DampedCoeffs::assemble(mi, lg, cfg.alpha, cfg.dt, super::scaled_forcing(f, i, cfg.dt));
        solve3_cramer(Coeffs3::from_field(d.h, cfg.dt), d.b)
    });
    let out = VectorField::from_data(grid, out.collect())?;
    out.ensure_finite("explicit regularized step")?;
    let diag = StepDiagnostics::of(&out, None);
    Ok((out, diag))
}
