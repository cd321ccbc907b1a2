//! Per-node 3×3 algebra.
//!
//! Every implicit update in the schemes reduces, node by node, to a system
//!
//! ```text
//! (I + K) x = rhs,   K = [[ 0,  c, -b],
//!                         [-c,  0,  a],
//!                         [ b, -a,  0]]
//! ```
//!
//! with `(a, b, c) = (Δt/2) H` for some effective field `H`. Note `K x = x × (a, b, c)`.
//! `det(I + K) = 1 + a² + b² + c² ≥ 1`, so these systems are never singular.

pub type Vec3 = [f64; 3];

#[inline]
pub fn cross(u: Vec3, v: Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

#[inline]
pub fn dot(u: Vec3, v: Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

#[inline]
pub fn norm(u: Vec3) -> f64 {
    dot(u, u).sqrt()
}

/// Entries of the skew part `K`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coeffs3 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Coeffs3 {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Coeffs3 { a, b, c }
    }

    /// `(Δt/2) H`.
    #[inline]
    pub fn from_field(field: Vec3, dt: f64) -> Self {
        let half = 0.5 * dt;
        Coeffs3 { a: half * field[0], b: half * field[1], c: half * field[2] }
    }

    #[inline]
    pub fn det(&self) -> f64 {
        1.0 + self.a * self.a + self.b * self.b + self.c * self.c
    }

    /// `K x`.
    #[inline]
    pub fn apply_skew(&self, x: Vec3) -> Vec3 {
        cross(x, [self.a, self.b, self.c])
    }

    /// `(I - K) m`, the explicit half of a Cayley update.
    #[inline]
    pub fn cayley_rhs(&self, m: Vec3) -> Vec3 {
        let k = self.apply_skew(m);
        [m[0] - k[0], m[1] - k[1], m[2] - k[2]]
    }

    pub fn skew_matrix(&self) -> [[f64; 3]; 3] {
        let Coeffs3 { a, b, c } = *self;
        [[0.0, c, -b], [-c, 0.0, a], [b, -a, 0.0]]
    }
}

/// Solves `(I + K) x = rhs` by Cramer's rule with the closed-form cofactors.
#[inline]
pub fn solve3_cramer(k: Coeffs3, rhs: Vec3) -> Vec3 {
    let Coeffs3 { a, b, c } = k;
    let [alpha, beta, gamma] = rhs;
    let det = k.det();
    let d1 = alpha * (1.0 + a * a) - beta * (c - a * b) + gamma * (a * c + b);
    let d2 = alpha * (a * b + c) + beta * (1.0 + b * b) - gamma * (a - b * c);
    let d3 = alpha * (a * c - b) + beta * (a + b * c) + gamma * (1.0 + c * c);
    [d1 / det, d2 / det, d3 / det]
}

/// One Crank–Nicolson step of `m_t = -m × H` with `H` frozen:
/// `(m' - m)/Δt = -(m' + m)/2 × H`. Preserves `|m|`.
///
/// Evaluated as `m + (2/S)((m × k) × k - m × k)`, `S = 1 + |k|²`, which equals
/// the Cramer solve of `(I + K) m' = (I - K) m` but loses no digits when
/// `|k|` is large.
#[inline]
pub fn cayley_step(field: Vec3, dt: f64, m: Vec3) -> Vec3 {
    let k = Coeffs3::from_field(field, dt);
    let kv = [k.a, k.b, k.c];
    let u = cross(m, kv);
    let v = cross(u, kv);
    let s = 2.0 / k.det();
    [m[0] + s * (v[0] - u[0]), m[1] + s * (v[1] - u[1]), m[2] + s * (v[2] - u[2])]
}

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator3(pub [[f64; 3]; 3]);

impl Propagator3 {
    pub fn identity() -> Self {
        Propagator3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Propagator3(std::array::from_fn(|i| std::array::from_fn(|j| m[j][i])))
    }

    pub fn mul(&self, other: &Propagator3) -> Self {
        let (x, y) = (&self.0, &other.0);
        Propagator3(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|l| x[i][l] * y[l][j]).sum())
        }))
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        dot(m[0], cross(m[1], m[2]))
    }
}

/// Closed form of `(I + K)^{-1}(I - K)` for a constant field `a`, `β = Δt/2`:
///
/// ```text
/// A = I + (2/S)(K² - K),   K² = β² (a aᵀ - |a|² I),   S = 1 + β²|a|²
/// ```
///
/// so `A_ii = (1 - β²|a|² + 2β²a_i²)/S` and
/// `A_ij = (2β²a_i a_j - 2K_ij)/S`. This is a proper rotation about `a`.
pub fn constant_field_propagator(a: Vec3, dt: f64) -> Propagator3 {
    let k = Coeffs3::from_field(a, dt);
    let kv = [k.a, k.b, k.c];
    let s = k.det();
    let sq = dot(kv, kv);
    let skew = k.skew_matrix();
    Propagator3(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let k2 = kv[i] * kv[j] - if i == j { sq } else { 0.0 };
            (if i == j { s } else { 0.0 } + 2.0 * k2 - 2.0 * skew[i][j]) / s
        })
    }))
}

/// Which per-stage coefficient matrix of the fractional scheme to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemShape {
    /// `I + K`, the Cayley / stage-3 matrix.
    Full,
    /// `[[1, c, -b], [-c, 1, a], [0, 0, 1]]`, the stage-2 matrix.
    Step2,
    /// `[[1, c, -b], [0, 1, 0], [0, 0, 1]]`, the stage-1 matrix.
    Step1,
}

impl SystemShape {
    pub fn matrix(self, k: Coeffs3) -> [[f64; 3]; 3] {
        let Coeffs3 { a, b, c } = k;
        match self {
            SystemShape::Full => [[1.0, c, -b], [-c, 1.0, a], [b, -a, 1.0]],
            SystemShape::Step2 => [[1.0, c, -b], [-c, 1.0, a], [0.0, 0.0, 1.0]],
            SystemShape::Step1 => [[1.0, c, -b], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }
}

/// Moduli of the eigenvalues of the inverse of the stage matrix, largest first.
///
/// The stage matrices have eigenvalues `1` and `1 ± i r` (with `r² = a²+b²+c²`
/// for the full shape, `r = c` for step 2 and `r = 0` for step 1), so the
/// inverse has moduli `{1, 1/sqrt(1+r²), 1/sqrt(1+r²)}`.
pub fn iteration_spectrum(k: Coeffs3, shape: SystemShape) -> [f64; 3] {
    let r2 = match shape {
        SystemShape::Full => k.a * k.a + k.b * k.b + k.c * k.c,
        SystemShape::Step2 => k.c * k.c,
        SystemShape::Step1 => 0.0,
    };
    let s = 1.0 / (1.0 + r2).sqrt();
    [1.0, s, s]
}
