//! The three-variable land / fire / prescribed-burning model.
//!
//! State variables are `a` (unburnt available land, as a fraction of a
//! region normalized to 1), `f` (bushfire frequency / intensity) and `b`
//! (land devoted to prescribed burning). The vector field is
//!
//! ```text
//! a' = -alpha f a - beta b + gamma (1 - a)
//! f' = zeta a - eta f
//! b' = theta (f0 - f) a
//! ```
//!
//! `theta > 0` models a reactive burning policy, `theta < 0` a proactive one.
//!
//! The sign in `b'` is chosen so that the linearization at the equilibrium
//! has characteristic polynomial
//! `l^3 + (alpha f0 + gamma + eta) l^2 + (2 alpha f0 eta + gamma eta) l - beta eta theta f0`,
//! which makes `theta > 0` destabilizing. Writing `b' = theta (f - f0) a`
//! instead flips the constant term and swaps the roles of the two policies;
//! see the README.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("parameter `{name}` must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("parameter `theta` must be nonzero")]
    ZeroTheta,
}

/// The seven structural constants of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub zeta: f64,
    pub eta: f64,
    pub theta: f64,
    pub f0: f64,
}

impl Params {
    pub fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        zeta: f64,
        eta: f64,
        theta: f64,
        f0: f64,
    ) -> Result<Self, ParamError> {
        let p = Params {
            alpha,
            beta,
            gamma,
            zeta,
            eta,
            theta,
            f0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let positive = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("zeta", self.zeta),
            ("eta", self.eta),
            ("f0", self.f0),
        ];
        for (name, value) in positive.into_iter().chain([("theta", self.theta)]) {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name, value });
            }
        }
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        if self.theta == 0.0 {
            return Err(ParamError::ZeroTheta);
        }
        Ok(())
    }

    /// Copy with a different burning response coefficient.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Proactive policy of strength `vartheta > 0`, i.e. `theta = -vartheta`.
    pub fn with_vartheta(self, vartheta: f64) -> Self {
        self.with_theta(-vartheta)
    }

    pub fn is_reactive(&self) -> bool {
        self.theta > 0.0
    }
}

/// Instantaneous model state. Negative or out-of-range entries are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub a: f64,
    pub f: f64,
    pub b: f64,
}

impl State {
    pub const fn new(a: f64, f: f64, b: f64) -> Self {
        State { a, f, b }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.f, self.b]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        State::new(v[0], v[1], v[2])
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.f.abs()).max(self.b.abs())
    }

    pub fn distance(&self, other: &State) -> f64 {
        let (da, df, db) = (self.a - other.a, self.f - other.f, self.b - other.b);
        (da * da + df * df + db * db).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.f.is_finite() && self.b.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub a_star: f64,
    pub f_star: f64,
    pub b_star: f64,
}

impl Equilibrium {
    pub fn state(&self) -> State {
        State::new(self.a_star, self.f_star, self.b_star)
    }
}

/// Slack of each viability inequality; a nonnegative margin means the
/// inequality holds (equality included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `eta f0 <= zeta`, i.e. `a* <= 1`.
    pub laco1_holds: bool,
    /// `(gamma + alpha f0) eta f0 <= gamma zeta`, i.e. `b* >= 0`.
    pub laco2_lower_holds: bool,
    /// `gamma zeta <= (beta + gamma + alpha f0) eta f0`, i.e. `b* <= a*`.
    pub laco2_upper_holds: bool,
    /// Right-hand side minus left-hand side of each inequality, in the
    /// order above.
    pub margins: [f64; 3],
}

impl FeasibilityReport {
    pub fn all_hold(&self) -> bool {
        self.laco1_holds && self.laco2_lower_holds && self.laco2_upper_holds
    }
}

/// Evaluates the model vector field over any ring-like scalar, so the same
/// expression serves real states and complexified Schur coordinates.
pub(crate) fn field_generic<T>(p: &Params, [a, f, b]: [T; 3]) -> [T; 3]
where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let c = |x: f64| T::from(x);
    let da = c(-p.alpha) * f * a - c(p.beta) * b + c(p.gamma) * (c(1.0) - a);
    let df = c(p.zeta) * a - c(p.eta) * f;
    let db = c(p.theta) * (c(p.f0) - f) * a;
    [da, df, db]
}

/// Right-hand side of the model at state `s`.
pub fn vector_field(p: &Params, s: &State) -> State {
    State::from_array(field_generic(p, s.to_array()))
}

/// The unique equilibrium with positive available land. It does not depend
/// on `theta`.
pub fn equilibrium(p: &Params) -> Equilibrium {
    let a_star = p.eta * p.f0 / p.zeta;
    let b_star = (p.gamma * p.zeta - p.eta * p.f0 * (p.gamma + p.alpha * p.f0)) / (p.beta * p.zeta);
    Equilibrium {
        a_star,
        f_star: p.f0,
        b_star,
    }
}

pub fn feasibility(p: &Params) -> FeasibilityReport {
    let ef = p.eta * p.f0;
    let gz = p.gamma * p.zeta;
    let m1 = p.zeta - ef;
    let m2 = gz - (p.gamma + p.alpha * p.f0) * ef;
    let m3 = (p.beta + p.gamma + p.alpha * p.f0) * ef - gz;
    FeasibilityReport {
        laco1_holds: m1 >= 0.0,
        laco2_lower_holds: m2 >= 0.0,
        laco2_upper_holds: m3 >= 0.0,
        margins: [m1, m2, m3],
    }
}
