//! Discrete error norms, unit-length deviation and exchange energy.
//!
//! All reductions are sequential in node order so results are bit-reproducible.

use crate::field::VectorField;
use crate::grid::{Boundary, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormTriple {
    pub linf: f64,
    pub l2: f64,
    pub h1: f64,
}

/// How the three error norms are assembled from the nodal errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormConvention {
    /// `linf = max_i |e_i|_2`, `h1 = sqrt(l2² + |e|²_{1,h})`.
    #[default]
    Euclidean,
    /// `linf = max_{i,c} |e_{i,c}|`, `h1 = l2 + |e|_{1,h}`. These are the
    /// definitions used by the `cell` study conventions.
    Componentwise,
}

impl NormConvention {
    pub fn name(self) -> &'static str {
        match self {
            NormConvention::Euclidean => "euclidean",
            NormConvention::Componentwise => "componentwise",
        }
    }
}

#[inline]
fn norm2(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

/// `Σ_axes Σ_pairs |u_{i+1} - u_i|²` over forward differences: interior pairs
/// on Neumann grids, wrapped pairs on periodic ones.
fn sum_sq_differences(grid: &Grid, data: &[[f64; 3]]) -> f64 {
    let n = grid.n();
    let mut acc = 0.0;
    for idx in 0..data.len() {
        let ijk = grid.unravel(idx);
        for (axis, &i) in ijk.iter().enumerate().take(grid.dim()) {
            let s = grid.stride(axis);
            let next = if i + 1 < n {
                idx + s
            } else if grid.bc() == Boundary::Periodic {
                idx + s - n * s
            } else {
                continue;
            };
            acc += dist2(&data[next], &data[idx]);
        }
    }
    acc
}

/// Error norms with the default [`NormConvention::Euclidean`] convention.
pub fn error_norms(e: &VectorField) -> NormTriple {
    error_norms_with(e, NormConvention::Euclidean)
}

pub fn error_norms_with(e: &VectorField, convention: NormConvention) -> NormTriple {
    let grid = e.grid();
    let h = grid.h();
    let vol = grid.cell_volume();
    let data = e.data();

    let l2 = (vol * data.iter().map(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sum::<f64>()).sqrt();
    let semi = (vol * sum_sq_differences(grid, data) / (h * h)).sqrt();

    match convention {
        NormConvention::Euclidean => NormTriple {
            linf: data.iter().map(norm2).fold(0.0, f64::max),
            l2,
            h1: (l2 * l2 + semi * semi).sqrt(),
        },
        NormConvention::Componentwise => NormTriple {
            linf: data.iter().flat_map(|v| v.iter().map(|x| x.abs())).fold(0.0, f64::max),
            l2,
            h1: l2 + semi,
        },
    }
}

/// `max_i | |m_i|_2 - 1 |`.
pub fn max_unit_norm_deviation(m: &VectorField) -> f64 {
    m.data().iter().map(|v| (norm2(v) - 1.0).abs()).fold(0.0, f64::max)
}

/// Discrete exchange energy `h^{dim-2} Σ |m_{i+1} - m_i|²`; in 1D this is
/// `(1/h) Σ |m_{i+1} - m_i|²`.
pub fn exchange_energy(m: &VectorField) -> f64 {
    let grid = m.grid();
    grid.h().powi(grid.dim() as i32 - 2) * sum_sq_differences(grid, m.data())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Layout};
    use proptest::prelude::*;

    fn field(grid: Grid, vals: &[[f64; 3]]) -> VectorField {
        VectorField::from_data(grid, vals.to_vec()).unwrap()
    }

    #[test]
    fn zero_field() {
        let g = make_grid(1, 5, Boundary::Neumann).unwrap();
        let n = error_norms(&VectorField::zeros(g));
        assert_eq!((n.linf, n.l2, n.h1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_unit_field_hand_values() {
        let g = make_grid(1, 3, Boundary::Neumann).unwrap();
        let e = VectorField::uniform(g, [1.0, 0.0, 0.0]);
        for conv in [NormConvention::Euclidean, NormConvention::Componentwise] {
            let n = error_norms_with(&e, conv);
            assert_eq!(n.linf, 1.0);
            assert!((n.l2 - 1.5f64.sqrt()).abs() < 1e-15);
            assert_eq!(n.h1, n.l2);
        }
    }

    #[test]
    fn conventions_differ_as_documented() {
        let g = make_grid(1, 3, Boundary::Neumann).unwrap();
        let e = field(g, &[[0.0; 3], [3.0, 4.0, 0.0], [0.0; 3]]);
        let a = error_norms_with(&e, NormConvention::Euclidean);
        let b = error_norms_with(&e, NormConvention::Componentwise);
        assert_eq!(a.linf, 5.0);
        assert_eq!(b.linf, 4.0);
        // two differences of length 5 over h = 1/2: |e|_1² = h * 2 * 25 / h² = 100
        assert!((a.l2 - 12.5f64.sqrt()).abs() < 1e-14);
        assert!((a.h1 - (12.5f64 + 100.0).sqrt()).abs() < 1e-12);
        assert!((b.h1 - (12.5f64.sqrt() + 10.0)).abs() < 1e-12);
    }

    #[test]
    fn unit_deviation() {
        let g = make_grid(1, 4, Boundary::Neumann).unwrap();
        let mut m = VectorField::uniform(g, [0.0, 0.6, 0.8]);
        assert!(max_unit_norm_deviation(&m) < 1e-15);
        m[2] = [2.0, 0.0, 0.0];
        assert_eq!(max_unit_norm_deviation(&m), 1.0);
    }

    #[test]
    fn energy_of_alternating_periodic_field() {
        let g = make_grid(1, 4, Boundary::Periodic).unwrap();
        let m = field(g, &[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]);
        assert!((exchange_energy(&m) - 16.0 / g.h()).abs() < 1e-12);
        assert_eq!(exchange_energy(&VectorField::uniform(g, [0.3, 0.1, 2.0])), 0.0);
    }

    #[test]
    fn energy_converges_to_dirichlet_integral() {
        // m = (cos 2πx, sin 2πx, 0): ∫|m_x|² = 4π².
        let exact = 4.0 * std::f64::consts::PI.powi(2);
        let mut prev = f64::INFINITY;
        for n in [32usize, 64, 128] {
            let g = make_grid(1, n, Boundary::Periodic).unwrap();
            let m = VectorField::from_fn(g, |p| {
                let t = 2.0 * std::f64::consts::PI * p[0];
                [t.cos(), t.sin(), 0.0]
            });
            let err = (exchange_energy(&m) - exact).abs();
            assert!(err < prev / 3.5, "n={n} err={err} prev={prev}");
            prev = err;
        }
    }

    #[test]
    fn energy_vs_quadrature_neumann() {
        // m = (cos(cos πx), sin(cos πx), 0): ∫|m_x|² = π² ∫ sin²(πx) = π²/2.
        let exact = std::f64::consts::PI.powi(2) / 2.0;
        let errs: Vec<f64> = [50usize, 100]
            .iter()
            .map(|&n| {
                let g = make_grid(1, n + 1, Boundary::Neumann).unwrap();
                let m = VectorField::from_fn(g, |p| {
                    let phi = (std::f64::consts::PI * p[0]).cos();
                    [phi.cos(), phi.sin(), 0.0]
                });
                (exchange_energy(&m) - exact).abs()
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    /// Direct transcription of the definitions with explicit index loops.
    fn brute_force(e: &VectorField) -> (f64, f64, f64) {
        let g = e.grid();
        let n = g.n();
        let h = g.h();
        let d = g.dim();
        let at = |i: usize, j: usize, k: usize| e[i + n * (j + n * k)];
        let (nj, nk) = if d == 3 { (n, n) } else { (1, 1) };
        let (mut linf, mut s2, mut sd) = (0.0f64, 0.0, 0.0);
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..n {
                    let v = at(i, j, k);
                    let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    linf = linf.max(l);
                    s2 += l * l;
                    let mut nbrs = vec![];
                    let wrap = g.bc() == Boundary::Periodic;
                    if i + 1 < n || wrap {
                        nbrs.push(at((i + 1) % n, j, k));
                    }
                    if d == 3 {
                        if j + 1 < n || wrap {
                            nbrs.push(at(i, (j + 1) % n, k));
                        }
                        if k + 1 < n || wrap {
                            nbrs.push(at(i, j, (k + 1) % n));
                        }
                    }
                    for w in nbrs {
                        for c in 0..3 {
                            sd += ((w[c] - v[c]) / h).powi(2);
                        }
                    }
                }
            }
        }
        let vol = h.powi(d as i32);
        let l2 = (vol * s2).sqrt();
        (linf, l2, (l2 * l2 + vol * sd).sqrt())
    }

    fn arb_field() -> impl Strategy<Value = VectorField> {
        (prop_oneof![Just(1usize), Just(3usize)], 3usize..=6, any::<bool>(), any::<bool>()).prop_flat_map(
            |(dim, n, periodic, cell)| {
                let bc = if periodic { Boundary::Periodic } else { Boundary::Neumann };
                let layout = if cell { Layout::Cell } else { Layout::Node };
                let g = Grid::new(dim, n, bc, layout).unwrap();
                proptest::collection::vec(proptest::array::uniform3(-2.0f64..2.0), g.len())
                    .prop_map(move |d| VectorField::from_data(g, d).unwrap())
            },
        )
    }

    proptest! {
        #[test]
        fn matches_brute_force(e in arb_field()) {
            let n = error_norms(&e);
            let (linf, l2, h1) = brute_force(&e);
            prop_assert!((n.linf - linf).abs() <= 1e-14 * (1.0 + linf));
            prop_assert!((n.l2 - l2).abs() <= 1e-12 * (1.0 + l2));
            prop_assert!((n.h1 - h1).abs() <= 1e-12 * (1.0 + h1));
            prop_assert!(n.h1 >= n.l2);
        }

        #[test]
        fn absolutely_homogeneous(e in arb_field(), s in -5.0f64..5.0) {
            for conv in [NormConvention::Euclidean, NormConvention::Componentwise] {
                let a = error_norms_with(&e, conv);
                let b = error_norms_with(&e.scaled(s), conv);
                let tol = |x: f64| 1e-13 * (1.0 + x.abs());
                prop_assert!((b.linf - s.abs() * a.linf).abs() <= tol(b.linf));
                prop_assert!((b.l2 - s.abs() * a.l2).abs() <= tol(b.l2));
                prop_assert!((b.h1 - s.abs() * a.h1).abs() <= tol(b.h1));
            }
        }

        #[test]
        fn deviation_rotation_invariant(e in arb_field(), th in 0.0f64..6.3, ph in 0.0f64..6.3) {
            // rotate each node by a node-dependent angle
            let r = e.map(|v| {
                let a = th + ph * v[0];
                let (s, c) = a.sin_cos();
                let w = [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]];
                let (s2, c2) = ph.sin_cos();
                [w[0], c2 * w[1] - s2 * w[2], s2 * w[1] + c2 * w[2]]
            });
            prop_assert!((max_unit_norm_deviation(&r) - max_unit_norm_deviation(&e)).abs() < 1e-13);
        }

        #[test]
        fn energy_shift_invariant(e in arb_field(), c in proptest::array::uniform3(-3.0f64..3.0)) {
            let shifted = e.map(|v| [v[0] + c[0], v[1] + c[1], v[2] + c[2]]);
            let (a, b) = (exchange_energy(&e), exchange_energy(&shifted));
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
            prop_assert!(a >= 0.0);
        }
    }
}
