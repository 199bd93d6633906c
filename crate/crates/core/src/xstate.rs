//! Two-qubit X states: representation changes, entropies, mutual
//! information, classical correlations and quantum discord.
//!
//! Basis ordering is `{|11⟩, |10⟩, |01⟩, |00⟩}` with qubit A first and
//! `|1⟩` the `σ^z = +1` state. Logarithms are base 2.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::xy_model::{GTable, ModelParams};

/// Eigenvalue slack tolerated for a state assembled from quadrature output.
pub const MODEL_POSITIVITY_TOL: f64 = 1e-9;
/// Eigenvalue slack tolerated for any other state.
pub const POSITIVITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
// Matrix elements from quadrature below this are round-off, not physics.
const SNAP_TOL: f64 = 1e-14;
const TIE_TOL: f64 = 1e-12;

/// X-form density matrix
///
/// ```text
/// | a 0 0 f |
/// | 0 b z 0 |
/// | 0 z b 0 |
/// | f 0 0 d |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub z: f64,
    pub f: f64,
}

/// `(c1, c2, c3, c4)` recoding of an [`XState`]: the `xx`, `yy`, `zz`
/// correlators and the magnetization-like `a − d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

/// Which analytic expression attains the discord minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `σ^z` measurement on B.
    Q1,
    /// Measurement in the transverse plane.
    Q2,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Q1 => "Q1",
            Branch::Q2 => "Q2",
        })
    }
}

impl XState {
    /// Builds a state, rejecting anything that is not a density matrix.
    pub fn new(a: f64, b: f64, d: f64, z: f64, f: f64) -> Result<Self> {
        let s = XState { a, b, d, z, f };
        s.validate(POSITIVITY_TOL)?;
        Ok(s)
    }

    pub fn maximally_mixed() -> Self {
        XState {
            a: 0.25,
            b: 0.25,
            d: 0.25,
            z: 0.0,
            f: 0.0,
        }
    }

    /// Unit trace and eigenvalues no lower than `-tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let vals = [self.a, self.b, self.d, self.z, self.f];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::PositivityViolation(format!("non-finite entry in {self:?}")));
        }
        let trace = self.a + 2.0 * self.b + self.d;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::PositivityViolation(format!("trace {trace} != 1")));
        }
        let min = self.raw_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(Error::PositivityViolation(format!(
                "eigenvalue {min:.3e} below -{tol:.0e}"
            )));
        }
        Ok(())
    }

    pub fn c_representation(&self) -> CCoeffs {
        CCoeffs {
            c1: 2.0 * self.z + 2.0 * self.f,
            c2: 2.0 * self.z - 2.0 * self.f,
            c3: self.a + self.d - 2.0 * self.b,
            c4: self.a - self.d,
        }
    }

    /// Eigenvalues before clamping, in the order `λ0..λ3` of the closed form.
    fn raw_eigenvalues(&self) -> [f64; 4] {
        let c = self.c_representation();
        let root = (4.0 * c.c4 * c.c4 + (c.c1 - c.c2).powi(2)).sqrt();
        [
            0.25 * ((1.0 + c.c3) + root),
            0.25 * ((1.0 + c.c3) - root),
            0.25 * (1.0 - c.c3 + c.c1 + c.c2),
            0.25 * (1.0 - c.c3 - c.c1 - c.c2),
        ]
    }

    /// Spectrum, sorted descending and clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev = self.raw_eigenvalues().map(|v| v.clamp(0.0, 1.0));
        ev.sort_by(|x, y| y.total_cmp(x));
        ev
    }

    /// `(S(ρ_A), S(ρ_AB))`; `S(ρ_B) = S(ρ_A)` for these states.
    pub fn entropies(&self) -> (f64, f64) {
        let c4 = self.a - self.d;
        let s_a = binary_entropy(0.5 * (1.0 + c4));
        let s_ab = self.eigenvalues().iter().map(|&l| eta(l)).sum();
        (s_a, s_ab)
    }

    /// `I = S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
    pub fn mutual_information(&self) -> f64 {
        let (s_a, s_ab) = self.entropies();
        2.0 * s_a - s_ab
    }

    /// Discord after a `σ^z` measurement on B.
    pub fn q1(&self) -> f64 {
        let (s_b, s_ab) = self.entropies();
        let (a, b, d) = (self.a, self.b, self.d);
        let conditional = -(xlogx_over(a, a + b) + xlogx_over(b, a + b) + xlogx_over(d, d + b) + xlogx_over(b, d + b));
        s_b - s_ab + conditional
    }

    /// Discord after the best measurement in the transverse plane.
    pub fn q2(&self) -> f64 {
        let (s_b, s_ab) = self.entropies();
        let gamma = ((self.a - self.d).powi(2) + 4.0 * (self.z.abs() + self.f.abs()).powi(2)).sqrt();
        let gamma = gamma.min(1.0);
        s_b - s_ab + binary_entropy(0.5 * (1.0 + gamma))
    }

    /// `Q = min{Q1, Q2}` and the branch attaining it; near-ties go to `Q2`.
    pub fn discord(&self) -> (f64, Branch) {
        let (q1, q2) = (self.q1(), self.q2());
        let (q, branch) = if q1 < q2 - TIE_TOL { (q1, Branch::Q1) } else { (q2, Branch::Q2) };
        (q.max(0.0), branch)
    }

    /// `C = I − Q`.
    pub fn classical_correlations(&self) -> f64 {
        (self.mutual_information() - self.discord().0).max(0.0)
    }

    /// Classical correlations under a `σ^z` measurement, written in terms of
    /// `a`, `b`, `d` and `S(ρ_A)` only. Equals `C` whenever `Q1` is active.
    pub fn classical_correlations_z_measurement(&self) -> f64 {
        let (s_a, _) = self.entropies();
        let (a, b, d) = (self.a, self.b, self.d);
        s_a + xlogx_over(a, a + b) + xlogx_over(b, a + b) + xlogx_over(d, d + b) + xlogx_over(b, d + b)
    }

    /// Full 4×4 matrix, row-major.
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let XState { a, b, d, z, f } = *self;
        [
            [a, 0.0, 0.0, f],
            [0.0, b, z, 0.0],
            [0.0, z, b, 0.0],
            [f, 0.0, 0.0, d],
        ]
    }

    /// JSON array-of-arrays form of [`XState::to_matrix`].
    pub fn matrix_json(&self) -> String {
        serde_json::to_string(&self.to_matrix()).expect("plain float matrix serializes")
    }

    pub(crate) fn to_complex(&self) -> Matrix4<Complex64> {
        let m = self.to_matrix();
        Matrix4::from_fn(|i, j| Complex64::new(m[i][j], 0.0))
    }
}

impl CCoeffs {
    /// Inverse of [`XState::c_representation`].
    pub fn x_representation(&self) -> Result<XState> {
        let s = self.x_representation_unchecked();
        s.validate(POSITIVITY_TOL)?;
        Ok(s)
    }

    pub(crate) fn x_representation_unchecked(&self) -> XState {
        XState {
            a: 0.25 * (1.0 + self.c3 + 2.0 * self.c4),
            d: 0.25 * (1.0 + self.c3 - 2.0 * self.c4),
            b: 0.25 * (1.0 - self.c3),
            z: 0.25 * (self.c1 + self.c2),
            f: 0.25 * (self.c1 - self.c2),
        }
    }
}

/// Two-site reduced density matrix of the XY chain at separation `r`.
pub fn reduced_density_matrix(params: &ModelParams, r: usize, quad: &QuadratureConfig) -> Result<XState> {
    params.validate()?;
    let g = GTable::compute(params, r, quad)?;
    state_from_table(&g)
}

/// Assembles the reduced state from a precomputed `G` table.
pub fn state_from_table(g: &GTable) -> Result<XState> {
    let mz = -g.get(0);
    let zz = g.zz();
    let xx = g.xx();
    let yy = g.yy();
    let snap = |v: f64| if v.abs() < SNAP_TOL { 0.0 } else { v };
    let a = snap(0.25 + 0.5 * mz + 0.25 * zz);
    let b = snap(0.25 * (1.0 - zz));
    let s = XState {
        a,
        b,
        d: 1.0 - a - 2.0 * b,
        z: snap(0.25 * (xx + yy)),
        f: snap(0.25 * (xx - yy)),
    };
    s.validate(MODEL_POSITIVITY_TOL)?;
    Ok(s)
}

/// `−x log₂ x` with `0 log 0 = 0`.
fn eta(x: f64) -> f64 {
    if x < 1e-300 {
        0.0
    } else {
        -x * x.log2()
    }
}

fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    eta(p) + eta(1.0 - p)
}

/// `x log₂(x / total)`, zero when `x` vanishes.
fn xlogx_over(x: f64, total: f64) -> f64 {
    if x < 1e-300 || total < 1e-300 {
        0.0
    } else {
        x * (x / total).log2()
    }
}

// ---------------------------------------------------------------------------
// Brute-force discord
// ---------------------------------------------------------------------------

fn projector(theta: f64, phi: f64, sign: f64) -> Matrix2<Complex64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let nx = st * cp;
    let ny = st * sp;
    let nz = ct;
    let h = 0.5 * sign;
    // (I ± n·σ) / 2 in the (|1⟩, |0⟩) basis
    Matrix2::new(
        Complex64::new(0.5 + h * nz, 0.0),
        Complex64::new(h * nx, -h * ny),
        Complex64::new(h * nx, h * ny),
        Complex64::new(0.5 - h * nz, 0.0),
    )
}

fn identity_kron(p: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| {
        if i / 2 == j / 2 {
            p[(i % 2, j % 2)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Partial trace over qubit B.
fn trace_out_b(m: &Matrix4<Complex64>) -> Matrix2<Complex64> {
    Matrix2::from_fn(|i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)])
}

/// Partial trace over qubit A.
fn trace_out_a(m: &Matrix4<Complex64>) -> Matrix2<Complex64> {
    Matrix2::from_fn(|i, j| m[(i, j)] + m[(i + 2, j + 2)])
}

/// von Neumann entropy of a unit-trace 2×2 Hermitian matrix via its Bloch vector.
fn qubit_entropy(m: &Matrix2<Complex64>) -> f64 {
    let tr = m[(0, 0)].re + m[(1, 1)].re;
    let diff = (m[(0, 0)].re - m[(1, 1)].re) / tr;
    let off = 2.0 * m[(0, 1)].norm() / tr;
    let radius = diff.hypot(off).min(1.0);
    binary_entropy(0.5 * (1.0 + radius))
}

/// Conditional entropy `Σ_k p_k S(ρ_k)` for the projective measurement on B
/// along Bloch direction `(θ, φ)`.
fn conditional_entropy(rho: &Matrix4<Complex64>, theta: f64, phi: f64) -> f64 {
    [1.0, -1.0]
        .iter()
        .map(|&sign| {
            let m = identity_kron(&projector(theta, phi, sign));
            let post = m * rho * m;
            let p = post.trace().re;
            if p < 1e-300 {
                0.0
            } else {
                p * qubit_entropy(&trace_out_b(&post))
            }
        })
        .sum()
}

/// Discord by direct maximization of the measurement-induced classical
/// correlations over rank-1 projective measurements on qubit B.
///
/// A `coarse_grid × 2·coarse_grid` grid over `(θ, φ) ∈ [0, π] × [0, 2π)` is
/// scanned and the best point refined by `refine_iters` rounds of coordinate
/// search with a halving step. Mutual information comes from a dense
/// eigensolver, not the X-state closed forms.
pub fn discord_oracle(s: &XState, coarse_grid: usize, refine_iters: usize) -> Result<f64> {
    if coarse_grid < 32 {
        return Err(Error::InvalidParams(format!("coarse_grid must be >= 32, got {coarse_grid}")));
    }
    let rho = s.to_complex();

    let s_a = qubit_entropy(&trace_out_b(&rho));
    let s_b = qubit_entropy(&trace_out_a(&rho));
    let real = Matrix4::from_fn(|i, j| rho[(i, j)].re);
    let s_ab: f64 = SymmetricEigen::new(real).eigenvalues.iter().map(|&l| eta(l.max(0.0))).sum();
    let mutual = s_a + s_b - s_ab;

    let n_theta = coarse_grid;
    let n_phi = 2 * coarse_grid;
    let d_theta = std::f64::consts::PI / (n_theta - 1) as f64;
    let d_phi = 2.0 * std::f64::consts::PI / n_phi as f64;

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..n_theta {
        let theta = i as f64 * d_theta;
        for j in 0..n_phi {
            let phi = j as f64 * d_phi;
            let h = conditional_entropy(&rho, theta, phi);
            if h < best.0 {
                best = (h, theta, phi);
            }
        }
    }

    let (mut h_min, mut theta, mut phi) = best;
    let mut step_theta = d_theta;
    let mut step_phi = d_phi;
    for _ in 0..refine_iters {
        let mut moved = false;
        for (dt, dp) in [(step_theta, 0.0), (-step_theta, 0.0), (0.0, step_phi), (0.0, -step_phi)] {
            let t = (theta + dt).clamp(0.0, std::f64::consts::PI);
            let p = phi + dp;
            let h = conditional_entropy(&rho, t, p);
            if h < h_min {
                h_min = h;
                theta = t;
                phi = p;
                moved = true;
            }
        }
        if !moved {
            step_theta *= 0.5;
            step_phi *= 0.5;
            if step_theta < 1e-12 {
                break;
            }
        }
    }

    // J = S(ρ_A) − min conditional entropy; Q = I − max J
    Ok((mutual - (s_a - h_min)).max(0.0))
}
