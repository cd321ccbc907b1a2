//! Acceptance gate. Prints one PASS/FAIL line per criterion (and per
//! convention set where a criterion is checked under both) and exits non-zero
//! if any line failed.

use std::process::ExitCode;

use llg_core::grid::{Boundary, Grid, Layout};
use llg_core::manufactured::{exact_laplacian, exact_solution, exact_time_derivative, forcing, ManufacturedProblem};
use llg_core::nodal::{cayley_step, cross, iteration_spectrum, norm, solve3_cramer, Coeffs3, SystemShape};
use llg_core::norms::error_norms;
use llg_core::operators::{helmholtz_solve_scalar, laplacian_scalar, HelmholtzOptions};
use llg_core::schemes::{integrate, SchemeConfig, SchemeKind};
use llg_core::study::{run_study, Conventions, ConvergenceReport, OrderAxis, StudyConfig};
use llg_core::{exchange_energy, make_grid, VectorField};
use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    id: String,
    pass: bool,
    detail: String,
}

fn line(id: impl Into<String>, pass: bool, detail: String) -> Line {
    Line { id: id.into(), pass, detail }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn rel_within(x: f64, target: f64, rel: f64) -> bool {
    ((x - target) / target).abs() <= rel
}

fn study(mut cfg: StudyConfig, conv: Conventions) -> ConvergenceReport {
    cfg.conventions = conv;
    cfg.timing = false;
    run_study(&cfg).unwrap_or_else(|e| panic!("{} study failed: {e}", cfg.study.name()))
}

fn both() -> [Conventions; 2] {
    [Conventions::cell(), Conventions::node()]
}

// 1. temporal order, fractional scheme, h = 5e-4, T = 0.1, k = T/80 … T/320
fn criterion_1() -> Vec<Line> {
    both()
        .into_iter()
        .map(|c| {
            let r = study(StudyConfig::temporal_1d(), c);
            let o = r.order(OrderAxis::K).unwrap();
            let first = r.rows[0].errors.unwrap().linf;
            let pass = within(o.linf, 1.0, 0.15) && within(o.l2, 1.0, 0.15) && rel_within(first, 1.304e-3, 0.25);
            line(
                format!("1 temporal order [{}]", c.name()),
                pass,
                format!(
                    "order linf {:.4} l2 {:.4} (want 1 ± 0.15); linf at T/80 {:.4e} (want 1.304e-3 ± 25%)",
                    o.linf, o.l2, first
                ),
            )
        })
        .collect()
}

// 2. spatial order, k = 1e-6, h = 1/16 … 1/64
fn criterion_2() -> Vec<Line> {
    both()
        .into_iter()
        .map(|c| {
            let r = study(StudyConfig::spatial_1d(), c);
            let o = r.order(OrderAxis::H).unwrap();
            let last = r.rows.last().unwrap().errors.unwrap().l2;
            let pass = within(o.linf, 2.0, 0.15) && within(o.l2, 2.0, 0.15) && rel_within(last, 1.848e-5, 0.25);
            line(
                format!("2 spatial order [{}]", c.name()),
                pass,
                format!(
                    "order linf {:.4} l2 {:.4} (want 2 ± 0.15); l2 at h=1/64 {:.4e} (want 1.848e-5 ± 25%)",
                    o.linf, o.l2, last
                ),
            )
        })
        .collect()
}

// 3. 3D coupled study, k ≈ h², N ∈ {10, 20, 24}
fn criterion_3() -> Vec<Line> {
    both()
        .into_iter()
        .map(|c| {
            let mut cfg = StudyConfig::coupled_3d();
            cfg.refine = vec![1.0 / 10.0, 1.0 / 20.0, 1.0 / 24.0];
            let r = study(cfg, c);
            let (k, h) = (r.order(OrderAxis::K).unwrap(), r.order(OrderAxis::H).unwrap());
            let pass = within(k.linf, 1.0, 0.2) && within(k.l2, 1.0, 0.2) && within(h.linf, 2.0, 0.4) && within(h.l2, 2.0, 0.4);
            line(
                format!("3 coupled 3D order [{}]", c.name()),
                pass,
                format!(
                    "vs k: linf {:.4} l2 {:.4} (want 1 ± 0.2); vs h: linf {:.4} l2 {:.4} (want 2 ± 0.4); h1 {:.4}/{:.4} not gated",
                    k.linf, k.l2, h.linf, h.l2, k.h1, h.h1
                ),
            )
        })
        .collect()
}

// 4. norm preservation, 1D sweep and 3D paired sweep
fn criterion_4() -> Vec<Line> {
    let mut out = Vec::new();
    for c in both() {
        let worst = |r: &ConvergenceReport| r.rows.iter().map(|r| r.norm_deviation.unwrap()).fold(0.0, f64::max);
        let r1 = study(StudyConfig::norm_1d(), c);
        let r3 = study(StudyConfig::norm_3d(), c);
        let (w1, w3) = (worst(&r1), worst(&r3));
        out.push(line(
            format!("4 norm preservation [{}]", c.name()),
            r1.rows.len() == 7 && w1 <= 1e-12 && w3 <= 1e-11,
            format!("1D max {w1:.3e} over {} rows (want <= 1e-12); 3D max {w3:.3e} (want <= 1e-11)", r1.rows.len()),
        ));
    }
    out
}

// 5. explicit scheme stability probe
fn criterion_5() -> Vec<Line> {
    both()
        .into_iter()
        .map(|c| {
            let r = study(StudyConfig::stability_probe(), c);
            let errs: Vec<_> = r.rows.iter().map(|r| r.errors.unwrap()).collect();
            let ks: Vec<f64> = r.rows.iter().map(|r| r.spec.k).collect();
            let upto = ks.iter().position(|&k| (k - 2.5e-3).abs() < 1e-12).unwrap();
            let blow = ks.iter().position(|&k| (k - 6.25e-4).abs() < 1e-12).unwrap();
            let monotone = errs[..=upto]
                .windows(2)
                .all(|w| w[1].linf < w[0].linf && w[1].l2 < w[0].l2 && w[1].h1 < w[0].h1);
            let ratio = errs[blow].linf / errs[upto].linf;
            let dev = r.rows.iter().map(|r| r.norm_deviation.unwrap()).fold(0.0, f64::max);
            line(
                format!("5 explicit instability probe [{}]", c.name()),
                monotone && ratio > 100.0 && dev <= 1e-12,
                format!(
                    "monotone to k=2.5e-3: {monotone}; linf(6.25e-4)/linf(2.5e-3) = {ratio:.1} (want > 100); max norm deviation {dev:.3e} (want <= 1e-12)"
                ),
            )
        })
        .collect()
}

fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(-scale..scale))
}

fn dense_laplacian(grid: &Grid) -> DMatrix<f64> {
    let n = grid.len();
    let mut a = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        laplacian_scalar(grid, &e, &mut col);
        for i in 0..n {
            a[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    a
}

// 6. property suites
fn criterion_6() -> Vec<Line> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let h = random_vec(&mut rng, 1e3);
        let m = random_vec(&mut rng, 1.0);
        let dt = 10f64.powf(rng.random_range(-6.0..0.0));
        worst = worst.max((norm(cayley_step(h, dt, m)) - norm(m)).abs() / (f64::EPSILON * norm(m)));
    }
    out.push(line("6a cayley_step length", worst <= 8.0, format!("max deviation {worst:.2} eps·|m| over 1e4 samples (want <= 8)")));

    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let k = random_vec(&mut rng, 10.0);
        let r = random_vec(&mut rng, 1.0);
        let c = Coeffs3::new(k[0], k[1], k[2]);
        let x = solve3_cramer(c, r);
        let m = SystemShape::Full.matrix(c);
        let y = Matrix3::from_fn(|i, j| m[i][j]).lu().solve(&Vector3::from(r)).unwrap();
        let err = (Vector3::from(x) - y).norm() / y.norm();
        worst = worst.max(err);
    }
    out.push(line("6b Cramer vs elimination", worst <= 1e-12, format!("max relative error {worst:.2e} over 1e5 systems (want <= 1e-12)")));

    let (mut worst, mut worst_eig) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let k = random_vec(&mut rng, 5.0);
        let c = Coeffs3::new(k[0], k[1], k[2]);
        for shape in [SystemShape::Full, SystemShape::Step2, SystemShape::Step1] {
            let mut s = iteration_spectrum(c, shape);
            let r2 = match shape {
                SystemShape::Full => k[0] * k[0] + k[1] * k[1] + k[2] * k[2],
                SystemShape::Step2 => k[2] * k[2],
                SystemShape::Step1 => 0.0,
            };
            let closed = 1.0 / (1.0 + r2).sqrt();
            let m = shape.matrix(c);
            let inv = Matrix3::from_fn(|i, j| m[i][j]).try_inverse().unwrap();
            let mut eig: Vec<f64> = inv.complex_eigenvalues().iter().map(|z| z.norm()).collect();
            eig.sort_by(f64::total_cmp);
            s.sort_by(f64::total_cmp);
            let mut expect = [1.0, closed, closed];
            expect.sort_by(f64::total_cmp);
            for i in 0..3 {
                worst = worst.max((s[i] - expect[i]).abs());
                worst_eig = worst_eig.max((s[i] - eig[i]).abs());
            }
        }
    }
    out.push(line(
        "6c iteration spectrum",
        worst <= 1e-14 && worst_eig <= 1e-12,
        format!(
            "max |computed - closed form| {worst:.2e} (want <= 1e-14); max |computed - eigen-solver moduli| {worst_eig:.2e} (want <= 1e-12)"
        ),
    ));

    let opts = HelmholtzOptions::default();
    let mut worst = 0.0f64;
    let grids = [
        Grid::with_intervals(1, 32, Boundary::Neumann, Layout::Cell).unwrap(),
        Grid::with_intervals(1, 32, Boundary::Neumann, Layout::Node).unwrap(),
        Grid::with_intervals(1, 32, Boundary::Periodic, Layout::Node).unwrap(),
        Grid::with_intervals(3, 6, Boundary::Neumann, Layout::Cell).unwrap(),
    ];
    for i in 0..1000 {
        let grid = grids[i % grids.len()];
        let u: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let wnorm = |v: &[f64]| v.iter().enumerate().map(|(j, x)| grid.quadrature_weight(j) * x * x).sum::<f64>().sqrt();
        for e in -4..=0 {
            let g = helmholtz_solve_scalar(&grid, &u, 10f64.powi(e), &opts).unwrap();
            worst = worst.max(wnorm(&g) / wnorm(&u));
        }
    }
    out.push(line(
        "6d elliptic boundedness",
        worst <= 1.0 + 1e-12,
        format!("max ||(I - dt Δ_h)^-1 u|| / ||u|| = {worst:.15} over 1e3 fields, dt in 1e-4..1 (want <= 1)"),
    ));

    let mut asym = 0.0f64;
    let mut max_eig = f64::NEG_INFINITY;
    for n in 3..=8 {
        for (dim, bc, layout) in [
            (1, Boundary::Neumann, Layout::Node),
            (1, Boundary::Neumann, Layout::Cell),
            (1, Boundary::Periodic, Layout::Node),
            (3, Boundary::Neumann, Layout::Node),
            (3, Boundary::Neumann, Layout::Cell),
            (3, Boundary::Periodic, Layout::Cell),
        ] {
            if dim == 3 && n > 5 {
                continue;
            }
            let grid = Grid::new(dim, n, bc, layout).unwrap();
            let w = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(grid.len(), |i, _| grid.quadrature_weight(i)));
            let a = &w * dense_laplacian(&grid);
            let scale = a.amax();
            asym = asym.max((&a - a.transpose()).amax() / scale);
            let sym = (&a + a.transpose()) * 0.5;
            max_eig = max_eig.max(sym.symmetric_eigenvalues().max() / scale);
        }
    }
    out.push(line(
        "6e Δ_h symmetric, negative semi-definite",
        asym <= 1e-10 && max_eig <= 1e-10,
        format!("max relative asymmetry {asym:.2e}, max relative eigenvalue {max_eig:.2e} on n <= 8 grids (want <= 1e-10)"),
    ));

    let grid = make_grid(1, 32, Boundary::Periodic).unwrap();
    let m0 = VectorField::from_fn(grid, |p| {
        let th = 2.0 * std::f64::consts::PI * p[0];
        let ps = 0.8 + 0.3 * th.sin();
        [th.cos() * ps.sin(), th.sin() * ps.sin(), ps.cos()]
    });
    let cfg = SchemeConfig::new(SchemeKind::CNMidpoint, 1e-5);
    let e0 = exchange_energy(&m0);
    let (_, diags) = integrate(&m0, &cfg, 100, None).unwrap();
    let drift = diags.iter().map(|d| (d.energy - e0).abs()).fold(0.0, f64::max);
    let bound = 10.0 * cfg.picard_tol * (1.0 + e0);
    out.push(line(
        "6f CN midpoint energy",
        drift <= bound,
        format!("max |E - E0| {drift:.2e} over 100 steps (want <= {bound:.2e})"),
    ));

    let mut worst = 0.0f64;
    for i in 0..1000 {
        let dim = if i % 2 == 0 { 1 } else { 3 };
        let p = random_vec(&mut rng, 1.0).map(|x| x.abs());
        let t = rng.random_range(0.0..1.0);
        let alpha = rng.random_range(0.0..1.0);
        let m = exact_solution(p, t, dim);
        let ml = cross(m, exact_laplacian(p, t, dim));
        let mml = cross(m, ml);
        let dm = exact_time_derivative(p, t, dim);
        let f = forcing(p, t, alpha, dim);
        for c in 0..3 {
            worst = worst.max((dm[c] + ml[c] + alpha * mml[c] - f[c]).abs());
        }
    }
    out.push(line("6g manufactured residual", worst <= 1e-12, format!("max residual {worst:.2e} over 1e3 samples (want <= 1e-12)")));
    out
}

// 7. CN-midpoint temporal order: self-convergence on a fixed grid, since the
// Picard sweep needs k below ~h²/2 and spatial error then swamps k².
fn criterion_7() -> Vec<Line> {
    let t = 0.1;
    let grid = Grid::with_intervals(1, 16, Boundary::Neumann, Layout::Cell).unwrap();
    let problem = ManufacturedProblem::new(1, 0.01, t).unwrap();
    let m0 = problem.sample(&grid, 0.0);
    let run = |steps: usize| {
        let cfg = SchemeConfig::new(SchemeKind::CNMidpoint, t / steps as f64).with_alpha(0.01);
        integrate(&m0, &cfg, steps, Some(&problem)).unwrap().0
    };
    let reference = run(5120);
    let pts: Vec<(f64, f64, f64)> = [80, 160, 320, 640]
        .into_iter()
        .map(|s| {
            let e = error_norms(&run(s).sub(&reference).unwrap());
            (t / s as f64, e.linf, e.l2)
        })
        .collect();
    let fit = |f: fn(&(f64, f64, f64)) -> f64| {
        llg_core::study::estimate_order(&pts.iter().map(|p| (p.0, f(p))).collect::<Vec<_>>()).unwrap()
    };
    let (linf, l2) = (fit(|p| p.1), fit(|p| p.2));
    vec![line(
        "7 CN midpoint temporal order",
        within(linf, 2.0, 0.2) && within(l2, 2.0, 0.2),
        format!("order linf {linf:.4} l2 {l2:.4} (want 2 ± 0.2), k = T/80 … T/640 against T/5120, h = 1/16"),
    )]
}

// Not gated: how close the cell conventions come to the reference errors.
fn reproduction() -> Vec<Line> {
    let r = study(StudyConfig::temporal_1d(), Conventions::cell());
    let reference = [0.001304094971804, 8.684032607750442e-04, 6.505721097687933e-04, 4.330118558566187e-04, 3.244330910497223e-04];
    let worst = r.rows.iter().zip(reference).map(|(r, p)| ((r.errors.unwrap().linf - p) / p).abs()).fold(0.0, f64::max);
    let s = study(StudyConfig::spatial_1d(), Conventions::cell());
    let reference = [4.225596750053739e-04, 1.885253776899853e-04, 1.062644247209338e-04, 4.739270964135289e-05, 2.676411577153676e-05];
    let worst_s = s.rows.iter().zip(reference).map(|(r, p)| ((r.errors.unwrap().linf - p) / p).abs()).fold(0.0, f64::max);
    vec![line(
        "info reference values [cell]",
        true,
        format!("max relative linf gap: temporal {worst:.2e}, spatial {worst_s:.2e}"),
    )]
}

fn main() -> ExitCode {
    let jobs: [fn() -> Vec<Line>; 8] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, reproduction];
    let results: Vec<Vec<Line>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|job| s.spawn(job)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| vec![line("?", false, "criterion panicked".into())]))
            .collect()
    });
    let mut failed = 0;
    for l in results.iter().flatten() {
        println!("{} criterion {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
        failed += usize::from(!l.pass);
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
