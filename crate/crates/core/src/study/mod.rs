//! Convergence, norm-preservation and stability studies.
//!
//! A study is a list of independent runs ("rows") that differ only in their
//! resolution. Rows may run on a worker pool (size from `LLG_STUDY_WORKERS`);
//! results are always assembled in refinement order, so output bytes do not
//! depend on the pool size.

mod config;
mod csv;
mod order;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, Layout};
use crate::manufactured::ManufacturedProblem;
use crate::norms::{NormConvention, NormTriple};
use crate::schemes::{integrate, ForcingTime, SchemeConfig, SchemeKind};

pub use config::{parse_key_values, parse_resolution, Settings};
pub use csv::{render_csv, write_csv};
pub use order::estimate_order;

/// Largest 3D mesh (intervals per axis) run without `allow_large`.
pub const DESK_LIMIT_3D: usize = 48;

/// Environment variable holding the row worker count.
pub const WORKERS_ENV: &str = "LLG_STUDY_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StudyKind {
    /// Fixed mesh, sweep the time step.
    Temporal,
    /// Fixed time step, sweep the mesh width.
    Spatial,
    /// 3D with `k ≈ h²`; fits orders against both `k` and `h`.
    Coupled3D,
    /// Unforced runs; records the largest deviation of `|m_i|` from 1.
    NormPreservation,
    /// Explicit regularized scheme, fixed mesh, time step swept downwards.
    StabilityProbe,
}

impl StudyKind {
    pub const ALL: [StudyKind; 5] = [
        StudyKind::Temporal,
        StudyKind::Spatial,
        StudyKind::Coupled3D,
        StudyKind::NormPreservation,
        StudyKind::StabilityProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Temporal => "temporal",
            StudyKind::Spatial => "spatial",
            StudyKind::Coupled3D => "coupled3d",
            StudyKind::NormPreservation => "norm",
            StudyKind::StabilityProbe => "stability",
        }
    }

    pub fn reports_errors(self) -> bool {
        self != StudyKind::NormPreservation
    }

    pub fn reports_norm_deviation(self) -> bool {
        matches!(self, StudyKind::NormPreservation | StudyKind::StabilityProbe)
    }
}

impl std::str::FromStr for StudyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StudyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown study '{s}'")))
    }
}

/// Discretization conventions a study runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conventions {
    pub layout: Layout,
    /// Forcing sample time for the linear schemes. The Crank–Nicolson schemes
    /// always sample at the midpoint, which their second order requires.
    pub forcing_time: ForcingTime,
    pub norms: NormConvention,
}

impl Conventions {
    /// Cell-centred unknowns, forcing at `t_n`, componentwise norms.
    pub fn cell() -> Self {
        Conventions { layout: Layout::Cell, forcing_time: ForcingTime::Start, norms: NormConvention::Componentwise }
    }

    /// Vertex unknowns with mirrored ghosts, forcing at `t_{n+1/2}`, Euclidean norms.
    pub fn node() -> Self {
        Conventions { layout: Layout::Node, forcing_time: ForcingTime::Midpoint, norms: NormConvention::Euclidean }
    }

    pub fn name(&self) -> &'static str {
        if *self == Conventions::cell() {
            "cell"
        } else if *self == Conventions::node() {
            "node"
        } else {
            "custom"
        }
    }
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions::cell()
    }
}

impl std::str::FromStr for Conventions {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cell" => Ok(Conventions::cell()),
            "node" => Ok(Conventions::node()),
            _ => Err(Error::InvalidConfig(format!("unknown conventions '{s}' (expected cell or node)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub scheme: SchemeKind,
    pub alpha: f64,
    pub final_time: f64,
    pub dim: usize,
    /// Mesh intervals per axis when the mesh is held fixed.
    pub intervals: Option<usize>,
    /// Step count when the time step is held fixed.
    pub steps: Option<usize>,
    /// Time steps (temporal, stability, 1D norm studies) or mesh widths
    /// (spatial, coupled and 3D norm studies).
    pub refine: Vec<f64>,
    pub out: Option<PathBuf>,
    pub conventions: Conventions,
    /// Record wall time per row. Off gives byte-reproducible CSV.
    pub timing: bool,
    pub allow_large: bool,
}

/// What the refinement list holds for a given study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    TimeStep,
    MeshWidth,
    /// Mesh widths with `k = T / floor(T/h²)`.
    Paired,
}

impl StudyConfig {
    fn base(study: StudyKind, dim: usize, refine: Vec<f64>) -> Self {
        StudyConfig {
            study,
            scheme: SchemeKind::FractionalGS,
            alpha: 0.01,
            final_time: 0.1,
            dim,
            intervals: None,
            steps: None,
            refine,
            out: None,
            conventions: Conventions::default(),
            timing: true,
            allow_large: false,
        }
    }

    /// 1D, `h = 5e-4`, `k = T/80 … T/320`.
    pub fn temporal_1d() -> Self {
        let t = 0.1;
        let refine = [80.0, 120.0, 160.0, 240.0, 320.0].iter().map(|d| t / d).collect();
        StudyConfig { intervals: Some(2000), ..Self::base(StudyKind::Temporal, 1, refine) }
    }

    /// 1D, `k = 1e-6`, `h = 1/16 … 1/64`.
    pub fn spatial_1d() -> Self {
        let refine = [16.0, 24.0, 32.0, 48.0, 64.0].iter().map(|d| 1.0 / d).collect();
        StudyConfig { steps: Some(100_000), ..Self::base(StudyKind::Spatial, 1, refine) }
    }

    /// 3D, `h = 1/10 … 1/32`, `k ≈ h²`.
    pub fn coupled_3d() -> Self {
        let refine = [10.0, 20.0, 24.0, 28.0, 32.0].iter().map(|d| 1.0 / d).collect();
        Self::base(StudyKind::Coupled3D, 3, refine)
    }

    /// 1D, `h = 5e-4`, `k = 2e-2 … 3.125e-4`.
    pub fn norm_1d() -> Self {
        let refine = (0..7).map(|i| 2e-2 / f64::powi(2.0, i)).collect();
        StudyConfig { intervals: Some(2000), ..Self::base(StudyKind::NormPreservation, 1, refine) }
    }

    /// 3D, `h = 1/10 … 1/28`, `k ≈ h²`.
    pub fn norm_3d() -> Self {
        let refine = [10.0, 20.0, 24.0, 28.0].iter().map(|d| 1.0 / d).collect();
        Self::base(StudyKind::NormPreservation, 3, refine)
    }

    /// Explicit scheme, 1D, `h = 5e-4`, `k = 2e-2 … 6.25e-4`.
    pub fn stability_probe() -> Self {
        let refine = (0..6).map(|i| 2e-2 / f64::powi(2.0, i)).collect();
        StudyConfig {
            scheme: SchemeKind::ExplicitRegularized,
            intervals: Some(2000),
            ..Self::base(StudyKind::StabilityProbe, 1, refine)
        }
    }

    /// Default configuration for a study kind in a given dimension.
    pub fn preset(study: StudyKind, dim: usize) -> Self {
        let mut cfg = match (study, dim) {
            (StudyKind::Temporal, _) => Self::temporal_1d(),
            (StudyKind::Spatial, _) => Self::spatial_1d(),
            (StudyKind::Coupled3D, _) => Self::coupled_3d(),
            (StudyKind::NormPreservation, 3) => Self::norm_3d(),
            (StudyKind::NormPreservation, _) => Self::norm_1d(),
            (StudyKind::StabilityProbe, _) => Self::stability_probe(),
        };
        if study != StudyKind::Coupled3D {
            cfg.dim = dim;
        }
        cfg
    }

    pub fn sweep(&self) -> Sweep {
        match self.study {
            StudyKind::Temporal | StudyKind::StabilityProbe => Sweep::TimeStep,
            StudyKind::Spatial => Sweep::MeshWidth,
            StudyKind::Coupled3D => Sweep::Paired,
            StudyKind::NormPreservation if self.dim == 3 => Sweep::Paired,
            StudyKind::NormPreservation => Sweep::TimeStep,
        }
    }

    /// Scheme actually run; the stability probe always uses the explicit scheme.
    pub fn effective_scheme(&self) -> SchemeKind {
        match self.study {
            StudyKind::StabilityProbe => SchemeKind::ExplicitRegularized,
            _ => self.scheme,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim != 1 && self.dim != 3 {
            return bad(format!("dimension must be 1 or 3, got {}", self.dim));
        }
        if self.study == StudyKind::Coupled3D && self.dim != 3 {
            return bad("the coupled study is three-dimensional".into());
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.final_time));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if let Some(v) = self.refine.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return bad(format!("refinement values must be positive, got {v}"));
        }
        let up = self.refine.windows(2).all(|w| w[1] > w[0]);
        let down = self.refine.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return bad("refinement list must be strictly monotone".into());
        }
        Ok(())
    }

    /// Resolves every refinement value into a concrete run.
    pub fn plan(&self) -> Result<Vec<RowSpec>> {
        self.validate()?;
        let t = self.final_time;
        let require = |v: Option<usize>, what: &str| {
            v.filter(|&v| v > 0)
                .ok_or_else(|| Error::InvalidConfig(format!("{} study needs a fixed {what}", self.study.name())))
        };
        let rows = self
            .refine
            .iter()
            .map(|&v| {
                let (steps, intervals) = match self.sweep() {
                    Sweep::TimeStep => (count_of(t, v, "time step")?, require(self.intervals, "mesh (n)")?),
                    Sweep::MeshWidth => (require(self.steps, "step count (nt)")?, count_of(1.0, v, "mesh width")?),
                    Sweep::Paired => {
                        let intervals = count_of(1.0, v, "mesh width")?;
                        let h = 1.0 / intervals as f64;
                        let steps = (t / (h * h) + 1e-9).floor() as usize;
                        (steps.max(1), intervals)
                    }
                };
                if self.dim == 3 && intervals > DESK_LIMIT_3D && !self.allow_large {
                    return Err(Error::InvalidConfig(format!(
                        "3D mesh with {intervals} intervals per axis exceeds {DESK_LIMIT_3D}; pass allow-large to run it"
                    )));
                }
                Ok(RowSpec { k: t / steps as f64, h: 1.0 / intervals as f64, steps, intervals })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(rows)
    }

    fn scheme_config(&self, k: f64) -> SchemeConfig {
        let kind = self.effective_scheme();
        let forcing_time = if kind.is_picard() { ForcingTime::Midpoint } else { self.conventions.forcing_time };
        SchemeConfig::new(kind, k).with_alpha(self.alpha).with_forcing_time(forcing_time)
    }
}

/// `round(total / step)`, rejecting steps that do not divide `total`.
fn count_of(total: f64, step: f64, what: &str) -> Result<usize> {
    let n = (total / step).round();
    if n < 1.0 || ((n * step - total) / total).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!("{what} {step} does not divide {total} into whole steps")));
    }
    Ok(n as usize)
}

/// One planned run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSpec {
    pub k: f64,
    pub h: f64,
    pub steps: usize,
    pub intervals: usize,
}

impl RowSpec {
    pub fn label(&self) -> String {
        format!("k={:e} h={:e}", self.k, self.h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub spec: RowSpec,
    pub errors: Option<NormTriple>,
    pub norm_deviation: Option<f64>,
    pub seconds: f64,
}

/// Which resolution an order was fitted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderAxis {
    K,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderRow {
    pub against: OrderAxis,
    pub orders: NormTriple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
    pub orders: Vec<OrderRow>,
}

impl ConvergenceReport {
    pub fn order(&self, axis: OrderAxis) -> Option<NormTriple> {
        self.orders.iter().find(|o| o.against == axis).map(|o| o.orders)
    }
}

fn run_row(cfg: &StudyConfig, spec: RowSpec) -> Result<StudyRow> {
    let started = Instant::now();
    let grid = Grid::with_intervals(cfg.dim, spec.intervals, Boundary::Neumann, cfg.conventions.layout)?;
    let problem = ManufacturedProblem::new(cfg.dim, cfg.alpha, cfg.final_time)?;
    let scheme = cfg.scheme_config(spec.k);
    let unforced_deviation = || -> Result<f64> {
        let m0 = problem.norm_study_initial(&grid);
        let (_, diags) = integrate(&m0, &scheme, spec.steps, None)?;
        Ok(diags.iter().map(|d| d.norm_deviation).fold(0.0, f64::max))
    };
    let errors = match cfg.study.reports_errors() {
        true => Some(problem.evaluate_run_with(&grid, &scheme, spec.steps, cfg.conventions.norms)?),
        false => None,
    };
    let norm_deviation = match cfg.study.reports_norm_deviation() {
        true => Some(unforced_deviation()?),
        false => None,
    };
    let seconds = if cfg.timing { started.elapsed().as_secs_f64() } else { 0.0 };
    Ok(StudyRow { spec, errors, norm_deviation, seconds })
}

fn fit(rows: &[StudyRow], axis: OrderAxis) -> Result<NormTriple> {
    let pick = |f: fn(&NormTriple) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| {
                let s = match axis {
                    OrderAxis::K => r.spec.k,
                    OrderAxis::H => r.spec.h,
                };
                (s, r.errors.as_ref().map(f).unwrap_or(f64::NAN))
            })
            .collect();
        estimate_order(&pts)
    };
    Ok(NormTriple { linf: pick(|e| e.linf)?, l2: pick(|e| e.l2)?, h1: pick(|e| e.h1)? })
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidConfig(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))
}

/// Runs every row of the study and fits convergence orders.
pub fn run_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    let plan = cfg.plan()?;
    let results: Vec<Result<StudyRow>> =
        worker_pool()?.install(|| plan.par_iter().map(|&spec| run_row(cfg, spec)).collect());
    let rows = results
        .into_iter()
        .zip(&plan)
        .enumerate()
        .map(|(row, (r, spec))| r.map_err(|e| Error::Row { row, label: spec.label(), source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;

    let axes: &[OrderAxis] = match cfg.study {
        _ if rows.len() < 2 => &[],
        StudyKind::Temporal => &[OrderAxis::K],
        StudyKind::Spatial => &[OrderAxis::H],
        StudyKind::Coupled3D => &[OrderAxis::K, OrderAxis::H],
        StudyKind::NormPreservation | StudyKind::StabilityProbe => &[],
    };
    let orders = axes
        .iter()
        .map(|&axis| Ok(OrderRow { against: axis, orders: fit(&rows, axis)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { config: cfg.clone(), rows, orders })
}
