//! Thermodynamic-limit observables of the transverse-field XY chain.
//!
//! All quantities are written in terms of `lambda` (exchange over field
//! strength) and `gamma` (anisotropy). Integrals over the Brillouin zone
//! half `[0, π]` go through [`crate::quadrature`]; two-spin correlators are
//! Toeplitz determinants of the `G_r` coefficients.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Estimate, QuadratureConfig};

/// Largest separation for which Toeplitz determinants are evaluated directly.
pub const MAX_DISTANCE: usize = 16;

/// Inverse temperature `1/kT`. `Infinite` is the ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    /// `kT = 0` maps onto the ground state.
    pub fn from_kt(kt: f64) -> Result<Beta> {
        if kt == 0.0 {
            Ok(Beta::Infinite)
        } else if kt > 0.0 && kt.is_finite() {
            Ok(Beta::Finite(1.0 / kt))
        } else {
            Err(Error::InvalidParams(format!("kT must be >= 0, got {kt}")))
        }
    }

    pub fn kt(&self) -> f64 {
        match *self {
            Beta::Finite(b) => 1.0 / b,
            Beta::Infinite => 0.0,
        }
    }

    /// `tanh(β ω / 2)`, identically one in the ground state.
    #[inline]
    fn thermal_factor(&self, omega: f64) -> f64 {
        match *self {
            Beta::Finite(b) => (0.5 * b * omega).tanh(),
            Beta::Infinite => 1.0,
        }
    }
}

/// A point `(λ, γ, β)` of the XY phase diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub lambda: f64,
    pub gamma: f64,
    pub beta: Beta,
}

impl ModelParams {
    pub fn new(lambda: f64, gamma: f64, beta: Beta) -> Result<Self> {
        let params = ModelParams { lambda, gamma, beta };
        params.validate()?;
        Ok(params)
    }

    /// Ground-state parameters.
    pub fn ground(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(lambda, gamma, Beta::Infinite)
    }

    /// Thermal parameters from `kT` (`kT = 0` selects the ground state).
    pub fn thermal(lambda: f64, gamma: f64, kt: f64) -> Result<Self> {
        Self::new(lambda, gamma, Beta::from_kt(kt)?)
    }

    // λ = 0 is accepted: it is the product-state limit used throughout the
    // checks, and every formula is regular there.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lambda must be a finite non-negative number, got {}",
                self.lambda
            )));
        }
        if !(-1.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParams(format!(
                "gamma must lie in [-1, 1], got {}",
                self.gamma
            )));
        }
        if let Beta::Finite(b) = self.beta {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidParams(format!("beta must be positive, got {b}")));
            }
        }
        Ok(())
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        ModelParams { lambda, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        ModelParams { gamma, ..self }
    }

    /// Interior points where `ω_φ` has a kink (only on the `γ = 0`, `λ > 1` line).
    fn breakpoints(&self) -> Vec<f64> {
        if self.gamma == 0.0 && self.lambda > 1.0 {
            vec![(-1.0 / self.lambda).acos()]
        } else {
            Vec::new()
        }
    }
}

/// Single-particle spectrum `ω_φ = sqrt((γλ sin φ)² + (1 + λ cos φ)²)`.
pub fn dispersion(params: &ModelParams, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    (params.gamma * params.lambda * s).hypot(1.0 + params.lambda * c)
}

/// `tanh(βω/2) / ω` times `numerator`, with the removable `ω = 0` point set to zero.
#[inline]
fn weighted(params: &ModelParams, phi: f64, numerator: impl FnOnce(f64, f64) -> f64) -> f64 {
    let omega = dispersion(params, phi);
    if omega == 0.0 {
        return 0.0;
    }
    let (s, c) = phi.sin_cos();
    params.beta.thermal_factor(omega) * numerator(s, c) / omega
}

/// Transverse magnetization `⟨σ^z⟩` together with its quadrature error estimate.
pub fn transverse_magnetization_estimate(params: &ModelParams, quad: &QuadratureConfig) -> Result<Estimate> {
    let lambda = params.lambda;
    let est = integrate(
        |phi| weighted(params, phi, |_, c| 1.0 + lambda * c),
        0.0,
        PI,
        &params.breakpoints(),
        quad,
    )?;
    Ok(Estimate {
        value: -est.value / PI,
        error: est.error / PI,
    })
}

/// Transverse magnetization `⟨σ^z⟩ = −(1/π) ∫₀^π tanh(βω/2) (1 + λ cos φ)/ω dφ`.
pub fn transverse_magnetization(params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    transverse_magnetization_estimate(params, quad).map(|e| e.value)
}

/// `G_r` with its quadrature error estimate.
pub fn g_coefficient_estimate(params: &ModelParams, r: i32, quad: &QuadratureConfig) -> Result<Estimate> {
    let lambda = params.lambda;
    let gl = params.gamma * lambda;
    let rf = f64::from(r);
    let est = integrate(
        |phi| {
            let (sr, cr) = (rf * phi).sin_cos();
            weighted(params, phi, |s, c| cr * (1.0 + lambda * c) - gl * sr * s)
        },
        0.0,
        PI,
        &params.breakpoints(),
        quad,
    )?;
    Ok(Estimate {
        value: est.value / PI,
        error: est.error / PI,
    })
}

/// Toeplitz coefficient `G_r` for any integer `r`.
pub fn g_coefficient(params: &ModelParams, r: i32, quad: &QuadratureConfig) -> Result<f64> {
    g_coefficient_estimate(params, r, quad).map(|e| e.value)
}

/// Spin component of a two-point correlator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The `G_k` for `k ∈ [-r, r]`, indexable by signed offset.
#[derive(Debug, Clone)]
pub struct GTable {
    r: usize,
    values: Vec<f64>,
}

impl GTable {
    pub fn compute(params: &ModelParams, r: usize, quad: &QuadratureConfig) -> Result<Self> {
        check_distance(r)?;
        let ri = r as i32;
        let values = (-ri..=ri)
            .map(|k| g_coefficient(params, k, quad))
            .collect::<Result<Vec<_>>>()?;
        Ok(GTable { r, values })
    }

    pub fn get(&self, k: i32) -> f64 {
        self.values[(k + self.r as i32) as usize]
    }

    pub fn distance(&self) -> usize {
        self.r
    }

    /// `⟨σ^x_i σ^x_{i+r}⟩`: determinant of the matrix with entries `G_{i−j−1}`.
    pub fn xx(&self) -> f64 {
        self.toeplitz_det(-1)
    }

    /// `⟨σ^y_i σ^y_{i+r}⟩`: determinant of the matrix with entries `G_{i−j+1}`.
    pub fn yy(&self) -> f64 {
        self.toeplitz_det(1)
    }

    /// `⟨σ^z_i σ^z_{i+r}⟩ = ⟨σ^z⟩² − G_r G_{−r}`, using `⟨σ^z⟩ = −G_0`.
    pub fn zz(&self) -> f64 {
        let r = self.r as i32;
        let mz = -self.get(0);
        mz * mz - self.get(r) * self.get(-r)
    }

    fn toeplitz_det(&self, shift: i32) -> f64 {
        let n = self.r;
        let m = DMatrix::from_fn(n, n, |i, j| self.get(i as i32 - j as i32 + shift));
        m.lu().determinant()
    }
}

fn check_distance(r: usize) -> Result<()> {
    if r == 0 || r > MAX_DISTANCE {
        return Err(Error::UnsupportedRange(format!(
            "spin separation r must be in 1..={MAX_DISTANCE}, got {r}"
        )));
    }
    Ok(())
}

/// Two-spin correlator `⟨σ^a_i σ^a_{i+r}⟩` along `axis`.
pub fn spin_correlation(params: &ModelParams, axis: Axis, r: usize, quad: &QuadratureConfig) -> Result<f64> {
    let table = GTable::compute(params, r, quad)?;
    Ok(match axis {
        Axis::X => table.xx(),
        Axis::Y => table.yy(),
        Axis::Z => table.zz(),
    })
}
