//! Command-line study runner.
//!
//! Settings are layered: study defaults, then `--config` file, then flags.
//! Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use llg_core::study::{render_csv, run_study, write_csv, Settings, StudyKind};
use llg_core::Error;

#[derive(Parser, Debug)]
#[command(name = "llg-study", version, about = "Run LLG convergence, norm and stability studies; emit CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fixed mesh, time step refined
    Temporal(Common),
    /// Fixed time step, mesh refined
    Spatial(Common),
    /// 3D with k ~ h², orders against both
    #[command(name = "coupled3d")]
    Coupled3D(Common),
    /// Unforced runs, max deviation of |m| from 1
    Norm(Common),
    /// Explicit scheme with shrinking time step
    Stability(Common),
    /// Study chosen by --study or the config file
    Run(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// temporal | spatial | coupled3d | norm | stability
    #[arg(long)]
    study: Option<String>,
    /// explicit | fractional | cn-midpoint | cn-trapezoidal
    #[arg(long)]
    scheme: Option<String>,
    /// Gilbert damping
    #[arg(long)]
    alpha: Option<f64>,
    /// Spatial dimension (1 or 3)
    #[arg(long)]
    dim: Option<usize>,
    /// Mesh intervals per axis, when the mesh is fixed
    #[arg(long)]
    n: Option<usize>,
    /// Number of time steps, when the time step is fixed
    #[arg(long)]
    nt: Option<usize>,
    /// Final time
    #[arg(long = "T", id = "final_time")]
    final_time: Option<f64>,
    /// Comma-separated k or h values, e.g. "T/80,T/160" or "1/16,1/32"
    #[arg(long)]
    refine: Option<String>,
    /// cell | node
    #[arg(long)]
    conventions: Option<String>,
    /// CSV destination (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value settings file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write 0 in the seconds column
    #[arg(long)]
    no_timing: bool,
    /// Permit 3D meshes beyond the desk limit
    #[arg(long)]
    allow_large: bool,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        3
    } else if e.is_numerical() {
        2
    } else {
        1
    }
}

fn settings(command: &Command) -> Result<Settings, Error> {
    let (fixed, c) = match command {
        Command::Temporal(c) => (Some(StudyKind::Temporal), c),
        Command::Spatial(c) => (Some(StudyKind::Spatial), c),
        Command::Coupled3D(c) => (Some(StudyKind::Coupled3D), c),
        Command::Norm(c) => (Some(StudyKind::NormPreservation), c),
        Command::Stability(c) => (Some(StudyKind::StabilityProbe), c),
        Command::Run(c) => (None, c),
    };
    let mut s = Settings::default();
    if let Some(path) = &c.config {
        s.merge_file(path)?;
    }
    if let (Some(kind), Some(flag)) = (fixed, &c.study) {
        if flag.parse::<StudyKind>()? != kind {
            return Err(Error::InvalidConfig(format!("--study {flag} conflicts with the {} subcommand", kind.name())));
        }
    }
    if let Some(kind) = fixed {
        s.set("study", kind.name())?;
    }
    let flags: [(&str, Option<String>); 9] = [
        ("study", c.study.clone()),
        ("scheme", c.scheme.clone()),
        ("alpha", c.alpha.map(|v| v.to_string())),
        ("dim", c.dim.map(|v| v.to_string())),
        ("n", c.n.map(|v| v.to_string())),
        ("nt", c.nt.map(|v| v.to_string())),
        ("T", c.final_time.map(|v| v.to_string())),
        ("refine", c.refine.clone()),
        ("conventions", c.conventions.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            s.set(k, v)?;
        }
    }
    if let Some(out) = &c.out {
        s.set("out", out.to_string_lossy())?;
    }
    if c.no_timing {
        s.set("timing", "false")?;
    }
    if c.allow_large {
        s.set("allow_large", "true")?;
    }
    Ok(s)
}

fn run(command: &Command) -> Result<(), Error> {
    let cfg = settings(command)?.to_config()?;
    let report = run_study(&cfg)?;
    for o in &report.orders {
        eprintln!(
            "order vs {:?}: linf {:.4} l2 {:.4} h1 {:.4}",
            o.against, o.orders.linf, o.orders.l2, o.orders.h1
        );
    }
    match &cfg.out {
        Some(path) => write_csv(&report, path),
        None => std::io::stdout()
            .write_all(render_csv(&report).as_bytes())
            .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if shown { 0 } else { 1 });
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
