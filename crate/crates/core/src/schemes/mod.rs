//! Time integrators for the LLG equation.
//!
//! All four schemes end every node update with a solve of the form
//! `(I + K) m' = b`, `K x = (Δt/2) x × H`, so without forcing the first three
//! (explicit regularized, fractional, CN midpoint) keep `|m_i|` fixed to
//! roundoff. The trapezoidal rule keeps it only to truncation order.

mod cn;
mod explicit;
mod fractional;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use crate::nodal::{cross, Vec3};
use crate::norms::{exchange_energy, max_unit_norm_deviation};
use crate::operators::HelmholtzOptions;

pub use cn::{step_cn_midpoint, step_cn_trapezoidal};
pub use explicit::step_explicit_regularized;
pub use fractional::{stage1_solve, stage2_solve, step_fractional, undamped_rhs, DampedCoeffs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Cayley update with the regularized field `Δ_h g^n`, `g^n = (I - Δt Δ_h)^{-1} m^n`.
    ExplicitRegularized,
    /// Three-stage Gauss–Seidel update refreshing `g_1` and `g_2` within the step.
    FractionalGS,
    /// Nonlinear implicit midpoint rule solved by Picard iteration.
    CNMidpoint,
    /// Nonlinear trapezoidal rule solved by Picard iteration.
    CNTrapezoidal,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::ExplicitRegularized,
        SchemeKind::FractionalGS,
        SchemeKind::CNMidpoint,
        SchemeKind::CNTrapezoidal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ExplicitRegularized => "explicit",
            SchemeKind::FractionalGS => "fractional",
            SchemeKind::CNMidpoint => "cn-midpoint",
            SchemeKind::CNTrapezoidal => "cn-trapezoidal",
        }
    }

    pub fn is_picard(self) -> bool {
        matches!(self, SchemeKind::CNMidpoint | SchemeKind::CNTrapezoidal)
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme '{s}'")))
    }
}

/// Time at which the forcing is sampled within step `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForcingTime {
    /// `t_n`
    Start,
    /// `t_{n+1/2}`
    #[default]
    Midpoint,
}

impl ForcingTime {
    pub fn offset(self) -> f64 {
        match self {
            ForcingTime::Start => 0.0,
            ForcingTime::Midpoint => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub dt: f64,
    pub alpha: f64,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub helmholtz: HelmholtzOptions,
    pub forcing_time: ForcingTime,
}

impl SchemeConfig {
    pub fn new(kind: SchemeKind, dt: f64) -> Self {
        SchemeConfig {
            kind,
            dt,
            alpha: 0.0,
            picard_tol: 1e-12,
            picard_max: 200,
            helmholtz: HelmholtzOptions::default(),
            forcing_time: ForcingTime::Midpoint,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_forcing_time(mut self, t: ForcingTime) -> Self {
        self.forcing_time = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.picard_tol.is_nan() || self.picard_tol <= 0.0 || self.picard_max == 0 {
            return Err(Error::InvalidConfig("Picard tolerance and iteration cap must be positive".into()));
        }
        self.helmholtz.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// `max_i | |m_i| - 1 |` after the step.
    pub norm_deviation: f64,
    /// Exchange energy after the step.
    pub energy: f64,
    /// Picard sweeps used (nonlinear schemes only).
    pub picard_iters: Option<usize>,
}

impl StepDiagnostics {
    fn of(m: &VectorField, picard_iters: Option<usize>) -> Self {
        StepDiagnostics { norm_deviation: max_unit_norm_deviation(m), energy: exchange_energy(m), picard_iters }
    }
}

/// Source term sampled on a grid at a given time.
pub trait Forcing {
    fn sample(&self, grid: &Grid, t: f64) -> VectorField;
}

impl<F: Fn(&Grid, f64) -> VectorField> Forcing for F {
    fn sample(&self, grid: &Grid, t: f64) -> VectorField {
        self(grid, t)
    }
}

/// `H = Δg + α m × Δg`, the field whose Cayley update realises both the
/// precession and the damping term.
#[inline]
pub fn effective_field(m: Vec3, lap: Vec3, alpha: f64) -> Vec3 {
    let t = cross(m, lap);
    [lap[0] + alpha * t[0], lap[1] + alpha * t[1], lap[2] + alpha * t[2]]
}

#[inline]
pub(crate) fn scaled_forcing(f: Option<&VectorField>, i: usize, dt: f64) -> Vec3 {
    match f {
        Some(f) => {
            let v = f[i];
            [dt * v[0], dt * v[1], dt * v[2]]
        }
        None => [0.0; 3],
    }
}

fn check_inputs(m: &VectorField, cfg: &SchemeConfig, f: Option<&VectorField>) -> Result<()> {
    cfg.validate()?;
    if let Some(f) = f {
        if f.grid() != m.grid() {
            return Err(Error::GridMismatch("forcing and magnetization grids differ"));
        }
    }
    m.ensure_finite("input magnetization")
}

/// Advances one step with the scheme selected in `cfg`. `f` is the forcing
/// already sampled at the step's forcing time.
pub fn step(m: &VectorField, cfg: &SchemeConfig, f: Option<&VectorField>) -> Result<(VectorField, StepDiagnostics)> {
    match cfg.kind {
        SchemeKind::ExplicitRegularized => step_explicit_regularized(m, cfg, f),
        SchemeKind::FractionalGS => step_fractional(m, cfg, f),
        SchemeKind::CNMidpoint => step_cn_midpoint(m, cfg, f),
        SchemeKind::CNTrapezoidal => step_cn_trapezoidal(m, cfg, f),
    }
}

/// Composes `n_steps` steps from `t = 0`. Forcing for step `n` is sampled at
/// `(n + θ) dt` with `θ` given by `cfg.forcing_time`.
pub fn integrate(
    m0: &VectorField,
    cfg: &SchemeConfig,
    n_steps: usize,
    forcing: Option<&dyn Forcing>,
) -> Result<(VectorField, Vec<StepDiagnostics>)> {
    cfg.validate()?;
    let grid = *m0.grid();
    let mut m = m0.clone();
    let mut diags = Vec::with_capacity(n_steps);
    let theta = cfg.forcing_time.offset();
    for n in 0..n_steps {
        let f = forcing.map(|src| src.sample(&grid, (n as f64 + theta) * cfg.dt));
        let (next, d) = step(&m, cfg, f.as_ref()).map_err(|e| Error::Step { step: n, source: Box::new(e) })?;
        m = next;
        diags.push(d);
    }
    Ok((m, diags))
}
