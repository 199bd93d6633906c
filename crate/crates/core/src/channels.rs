//! Bit-flip, bit-phase-flip and phase-flip channels acting identically and
//! independently on both qubits.
//!
//! Two routes are provided: explicit Kraus conjugation on the 4×4 matrix
//! ([`evolve_kraus`]) and the closed-form rescaling of the c-coefficients
//! ([`evolve_closed_form`]). They must agree; the analysis code uses the
//! closed forms.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xstate::{CCoeffs, XState};

const FORM_TOL: f64 = 1e-12;

/// Local decoherence channel, named by its Kraus generator `σ_x`, `σ_y`, `σ_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Bit flip.
    Bf,
    /// Bit-phase flip.
    Bpf,
    /// Phase flip.
    Pf,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Bf, Channel::Bpf, Channel::Pf];

    pub fn as_str(&self) -> &'static str {
        match self {
            Channel::Bf => "bf",
            Channel::Bpf => "bpf",
            Channel::Pf => "pf",
        }
    }

    fn generator(&self) -> Matrix2<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Channel::Bf => Matrix2::new(o, one, one, o),
            Channel::Bpf => Matrix2::new(o, -i, i, o),
            Channel::Pf => Matrix2::new(one, o, o, -one),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bf" => Ok(Channel::Bf),
            "bpf" => Ok(Channel::Bpf),
            "pf" => Ok(Channel::Pf),
            other => Err(Error::InvalidParams(format!(
                "unknown channel '{other}', expected bf, bpf or pf"
            ))),
        }
    }
}

/// Parametrized time `p = 1 − e^{−θt}` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ParamTime(pub(crate) f64);

impl ParamTime {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(ParamTime(p))
        } else {
            Err(Error::InvalidParams(format!("p must lie in [0, 1], got {p}")))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `p` after evolving by `self` and then by `other`.
    pub fn compose(&self, other: ParamTime) -> ParamTime {
        ParamTime(1.0 - (1.0 - self.0) * (1.0 - other.0))
    }
}

/// `p = 1 − exp(−θ t)` for decay rate `theta` at time `t`.
pub fn p_of_t(theta: f64, t: f64) -> Result<ParamTime> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParams(format!("decay rate must be positive, got {theta}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParams(format!("time must be non-negative, got {t}")));
    }
    Ok(ParamTime(-(-theta * t).exp_m1()))
}

fn kron(x: &Matrix2<Complex64>, y: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| x[(i / 2, j / 2)] * y[(i % 2, j % 2)])
}

/// The four two-qubit Kraus operators `E_μ ⊗ E_ν`, with
/// `E_0 = sqrt(1 − p/2) I` and `E_1 = sqrt(p/2) σ`.
pub fn kraus_operators(ch: Channel, p: ParamTime) -> [Matrix4<Complex64>; 4] {
    let p = p.value();
    let e0 = Matrix2::<Complex64>::identity() * Complex64::new((1.0 - 0.5 * p).sqrt(), 0.0);
    let e1 = ch.generator() * Complex64::new((0.5 * p).sqrt(), 0.0);
    [kron(&e0, &e0), kron(&e0, &e1), kron(&e1, &e0), kron(&e1, &e1)]
}

/// `Σ_{μν} E_{μν}† E_{μν}`, the identity for a trace-preserving channel.
pub fn kraus_completeness(ch: Channel, p: ParamTime) -> Matrix4<Complex64> {
    kraus_operators(ch, p)
        .iter()
        .map(|e| e.adjoint() * e)
        .fold(Matrix4::zeros(), |acc, m| acc + m)
}

/// Evolves `s` by explicit Kraus conjugation and reads the X form back.
pub fn evolve_kraus(s: &XState, ch: Channel, p: ParamTime) -> Result<XState> {
    let rho = s.to_complex();
    let out = kraus_operators(ch, p)
        .iter()
        .map(|e| e * rho * e.adjoint())
        .fold(Matrix4::zeros(), |acc, m| acc + m);

    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let on_pattern = i == j || i + j == 3;
            let v = out[(i, j)];
            worst = worst.max(v.im.abs());
            if !on_pattern {
                worst = worst.max(v.re.abs());
            }
        }
    }
    worst = worst.max((out[(1, 1)].re - out[(2, 2)].re).abs());
    worst = worst.max((out[(0, 3)].re - out[(3, 0)].re).abs());
    worst = worst.max((out[(1, 2)].re - out[(2, 1)].re).abs());
    if worst > FORM_TOL {
        return Err(Error::FormViolation(worst));
    }

    Ok(XState {
        a: out[(0, 0)].re,
        b: 0.5 * (out[(1, 1)].re + out[(2, 2)].re),
        d: out[(3, 3)].re,
        z: out[(1, 2)].re,
        f: out[(0, 3)].re,
    })
}

/// Closed-form evolution of the c-coefficients.
pub fn evolve_closed_form(c: &CCoeffs, ch: Channel, p: ParamTime) -> CCoeffs {
    let q = 1.0 - p.value();
    let q2 = q * q;
    match ch {
        Channel::Bpf => CCoeffs {
            c1: c.c1 * q2,
            c2: c.c2,
            c3: c.c3 * q2,
            c4: c.c4 * q,
        },
        Channel::Bf => CCoeffs {
            c1: c.c1,
            c2: c.c2 * q2,
            c3: c.c3 * q2,
            c4: c.c4 * q,
        },
        Channel::Pf => CCoeffs {
            c1: c.c1 * q2,
            c2: c.c2 * q2,
            c3: c.c3,
            c4: c.c4,
        },
    }
}

/// Closed-form evolution expressed on the X form.
pub fn evolve_state(s: &XState, ch: Channel, p: ParamTime) -> XState {
    evolve_closed_form(&s.c_representation(), ch, p).x_representation_unchecked()
}
