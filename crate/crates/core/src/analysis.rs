//! Correlation trajectories, sudden-change detection and critical-point
//! signatures built on the closed-form channel evolution.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{evolve_state, Channel, ParamTime};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::xstate::{reduced_density_matrix, Branch, XState};
use crate::xy_model::{Beta, ModelParams};

/// Number of equispaced points scanned for a sign change of `Q1 − Q2`.
pub const ROOT_SCAN_POINTS: usize = 64;
/// Guard kept between the root scan and the ends of `[0, 1]`.
pub const ROOT_EDGE_GUARD: f64 = 1e-6;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-13;
/// Default finite-difference step for `dp_sc/dx`.
pub const DEFAULT_STEP: f64 = 1e-4;
/// Default number of points in a trajectory grid.
pub const DEFAULT_P_POINTS: usize = 501;
/// Golden-section termination width in `λ`.
pub const PEAK_TOL: f64 = 1e-4;

const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub p: f64,
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: ModelParams,
    pub r: usize,
    pub channel: Channel,
    pub points: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DynamicsType {
    /// Sudden change in the decay rates at `p_sc`.
    II,
    /// Monotone decay.
    III,
}

impl std::fmt::Display for DynamicsType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DynamicsType::II => "II",
            DynamicsType::III => "III",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SuddenChangeMethod {
    /// `p_sc = 1 − sqrt(R_c)` from the initial `|c1|`, `|c2|`.
    RatioFormula,
    /// Root of `Q1(p) − Q2(p)`.
    BranchRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuddenChange {
    pub p_sc: Option<f64>,
    pub method: SuddenChangeMethod,
    pub dynamics_type: DynamicsType,
}

impl SuddenChange {
    fn from_root(p_sc: Option<f64>, method: SuddenChangeMethod) -> Self {
        let p_sc = p_sc.filter(|p| *p > 0.0 && *p < 1.0);
        SuddenChange {
            p_sc,
            method,
            dynamics_type: if p_sc.is_some() { DynamicsType::II } else { DynamicsType::III },
        }
    }
}

/// Model parameter a derivative is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wrt {
    Lambda,
    Gamma,
}

impl Wrt {
    pub fn get(&self, params: &ModelParams) -> f64 {
        match self {
            Wrt::Lambda => params.lambda,
            Wrt::Gamma => params.gamma,
        }
    }

    pub fn set(&self, params: &ModelParams, x: f64) -> ModelParams {
        match self {
            Wrt::Lambda => params.with_lambda(x),
            Wrt::Gamma => params.with_gamma(x),
        }
    }
}

/// Equispaced grid of `n ≥ 2` points on `[0, 1]`.
pub fn uniform_p_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Correlations of `initial` evolved to each `p` of `p_grid`.
pub fn trajectory_from_state(initial: &XState, ch: Channel, p_grid: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    if p_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("p grid must be strictly increasing".into()));
    }
    p_grid
        .iter()
        .map(|&p| {
            let s = evolve_state(initial, ch, ParamTime::new(p)?);
            let mutual = s.mutual_information();
            let (discord, branch) = s.discord();
            Ok(TrajectoryPoint {
                p,
                mutual_information: mutual,
                classical: mutual - discord,
                discord,
                branch,
            })
        })
        .collect()
}

/// `(I, C, Q)` of the `r`-separated reduced state along `p_grid`.
pub fn trajectory(
    params: &ModelParams,
    r: usize,
    ch: Channel,
    p_grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<Trajectory> {
    let initial = reduced_density_matrix(params, r, quad)?;
    Ok(Trajectory {
        params: *params,
        r,
        channel: ch,
        points: trajectory_from_state(&initial, ch, p_grid)?,
    })
}

fn branch_gap(initial: &XState, p: f64) -> f64 {
    let s = evolve_state(initial, Channel::Pf, ParamTime(p));
    s.q1() - s.q2()
}

/// Sudden-change point for a given initial state.
pub fn sudden_change_from_state(initial: &XState, ch: Channel) -> Result<SuddenChange> {
    let c = initial.c_representation();
    let (m1, m2) = (c.c1.abs(), c.c2.abs());
    if m1 < DEGENERATE_TOL && m2 < DEGENERATE_TOL {
        return Err(Error::DegenerateState);
    }
    let ratio_root = |decaying: f64, fixed: f64| {
        // |decaying|·(1 − p)² meets |fixed| only if it starts above it
        if decaying > fixed {
            Some(1.0 - (fixed / decaying).sqrt())
        } else {
            None
        }
    };
    match ch {
        Channel::Bpf => Ok(SuddenChange::from_root(ratio_root(m1, m2), SuddenChangeMethod::RatioFormula)),
        Channel::Bf => Ok(SuddenChange::from_root(ratio_root(m2, m1), SuddenChangeMethod::RatioFormula)),
        Channel::Pf => Ok(SuddenChange::from_root(
            phase_flip_root(initial)?,
            SuddenChangeMethod::BranchRoot,
        )),
    }
}

fn phase_flip_root(initial: &XState) -> Result<Option<f64>> {
    let lo = ROOT_EDGE_GUARD;
    let hi = 1.0 - ROOT_EDGE_GUARD;
    let step = (hi - lo) / (ROOT_SCAN_POINTS - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..ROOT_SCAN_POINTS)
        .map(|i| {
            let p = lo + i as f64 * step;
            (p, branch_gap(initial, p))
        })
        .collect();

    let brackets: Vec<(f64, f64, f64)> = samples
        .windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .map(|w| (w[0].0, w[1].0, w[0].1))
        .collect();

    match brackets.as_slice() {
        [] => Ok(None),
        [(a, b, fa)] => {
            let (mut a, mut b) = (*a, *b);
            let positive_at_a = *fa > 0.0;
            while b - a > ROOT_TOL {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (branch_gap(initial, mid) > 0.0) == positive_at_a {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            Ok(Some(0.5 * (a + b)))
        }
        many => Err(Error::MultiRoot(many.len())),
    }
}

/// Sudden-change point of the `r`-separated reduced state under `ch`.
pub fn sudden_change_point(params: &ModelParams, r: usize, ch: Channel, quad: &QuadratureConfig) -> Result<SuddenChange> {
    let initial = reduced_density_matrix(params, r, quad)?;
    sudden_change_from_state(&initial, ch)
}

/// Dynamics type (type I is never produced by these states).
pub fn classify_dynamics(params: &ModelParams, r: usize, ch: Channel, quad: &QuadratureConfig) -> Result<DynamicsType> {
    Ok(sudden_change_point(params, r, ch, quad)?.dynamics_type)
}

fn psc_at(params: &ModelParams, r: usize, ch: Channel, quad: &QuadratureConfig) -> Result<f64> {
    params
        .validate()
        .map_err(|e| Error::DomainEdge(format!("neighbour leaves the parameter region ({e})")))?;
    match sudden_change_point(params, r, ch, quad) {
        Ok(SuddenChange { p_sc: Some(p), .. }) => Ok(p),
        Ok(_) => Err(Error::DomainEdge(format!(
            "no sudden change at lambda={}, gamma={}",
            params.lambda, params.gamma
        ))),
        Err(Error::DegenerateState) => Err(Error::DomainEdge(format!(
            "degenerate state at lambda={}, gamma={}",
            params.lambda, params.gamma
        ))),
        Err(e) => Err(e),
    }
}

/// Central difference `(p_sc(x + h) − p_sc(x − h)) / 2h` along `wrt`.
pub fn psc_derivative(
    params: &ModelParams,
    r: usize,
    ch: Channel,
    wrt: Wrt,
    h: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h}")));
    }
    let x = wrt.get(params);
    let up = psc_at(&wrt.set(params, x + h), r, ch, quad)?;
    let down = psc_at(&wrt.set(params, x - h), r, ch, quad)?;
    Ok((up - down) / (2.0 * h))
}

/// Location and height of the `dp_sc/dλ` maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QcpEstimate {
    /// Golden-section refined argmax.
    pub lambda_star: f64,
    pub peak: f64,
    /// Best point of the coarse scan.
    pub grid_lambda: f64,
    pub grid_peak: f64,
}

/// Finite-temperature critical-point estimate: the `λ` maximizing `dp_sc/dλ`.
#[allow(clippy::too_many_arguments)]
pub fn qcp_estimate(
    ch: Channel,
    gamma: f64,
    beta: Beta,
    r: usize,
    lambda_range: (f64, f64),
    grid_n: usize,
    h: f64,
    quad: &QuadratureConfig,
) -> Result<QcpEstimate> {
    if !matches!(beta, Beta::Finite(_)) {
        return Err(Error::InvalidParams("critical-point estimate needs a finite temperature".into()));
    }
    if grid_n < 32 {
        return Err(Error::InvalidParams(format!("grid_n must be >= 32, got {grid_n}")));
    }
    let (lo, hi) = lambda_range;
    if !(hi > lo) || lo - h < 0.0 {
        return Err(Error::InvalidParams(format!("invalid lambda range [{lo}, {hi}]")));
    }
    let base = ModelParams::new(lo, gamma, beta)?;
    let derivative = |lambda: f64| psc_derivative(&base.with_lambda(lambda), r, ch, Wrt::Lambda, h, quad);

    let spacing = (hi - lo) / (grid_n - 1) as f64;
    let values = (0..grid_n)
        .into_par_iter()
        .map(|i| derivative(lo + i as f64 * spacing))
        .collect::<Result<Vec<f64>>>()?;

    let (best, &grid_peak) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty grid");
    if best == 0 || best == grid_n - 1 {
        return Err(Error::NoPeak(lo, hi));
    }
    let grid_lambda = lo + best as f64 * spacing;

    // golden-section maximization on the bracketing grid cells
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid_lambda - spacing, grid_lambda + spacing);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = derivative(x1)?;
    let mut f2 = derivative(x2)?;
    while b - a > PEAK_TOL {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = derivative(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = derivative(x2)?;
        }
    }
    let lambda_star = 0.5 * (a + b);
    let mut peak = derivative(lambda_star)?;
    let mut lambda_star = lambda_star;
    if grid_peak > peak {
        lambda_star = grid_lambda;
        peak = grid_peak;
    }
    Ok(QcpEstimate {
        lambda_star,
        peak,
        grid_lambda,
        grid_peak,
    })
}

/// Discord at fixed `p` for separations `1..=r_max`.
pub fn discord_decay_profile(
    params: &ModelParams,
    ch: Channel,
    p: ParamTime,
    r_max: usize,
    quad: &QuadratureConfig,
) -> Result<Vec<(usize, f64)>> {
    if !(1..=8).contains(&r_max) {
        return Err(Error::UnsupportedRange(format!("r_max must be in 1..=8, got {r_max}")));
    }
    (1..=r_max)
        .map(|r| {
            let s = reduced_density_matrix(params, r, quad)?;
            Ok((r, evolve_state(&s, ch, p).discord().0))
        })
        .collect()
}
