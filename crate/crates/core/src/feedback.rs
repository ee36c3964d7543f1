//! Stabilization of the reactive-regime equilibrium by a one-dimensional
//! dynamic feedback acting along the unstable Schur direction.
//!
//! With `J* = Q^{-1} U Q` (`Q` unitary, `U` upper triangular with the
//! positive eigenvalue `lambda1` first) and `x = Q y`, the model becomes
//! `x' = X(x) = Q Y(Q^{-1} x)`. A filtered copy `omega` of `x1` is fed back:
//!
//! ```text
//! x1'    = X1(x1 - tau (omega - x*_1), x2, x3)
//! x2'    = X2(x)
//! x3'    = X3(x)
//! omega' = sigma (x1 - omega)
//! ```
//!
//! The first row of `Q` is a real unit eigenvector of `J*` for `lambda1`, so
//! `x1` and `omega` are real for real `(a, f, b)`.

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubic::{self, RootKind};
use crate::model::{equilibrium, field_generic, Params, State};
use crate::simulate::{run, Failure, IntegratorConfig, RawEvent, RawFailure, Trajectory};
use crate::stability::{equilibrium_jacobian, Jacobian3};

pub const DEFAULT_MARGIN: f64 = 1.0;

/// Eigenvalues closer than this (relative) are treated as coincident.
const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeedbackError {
    #[error("equilibrium is not in the reactive regime (need one positive real eigenvalue and two with negative real part)")]
    NotReactiveRegime,
    #[error("Jacobian has (nearly) coincident eigenvalues")]
    DegenerateSpectrum,
    #[error(
        "gain design needs lambda1 > 0 and margin > 0, got lambda1 = {lambda1}, margin = {margin}"
    )]
    InvalidGainInput { lambda1: f64, margin: f64 },
}

type C = Complex64;

/// Unitary triangularization `J = Q^{-1} U Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurForm {
    /// Maps model coordinates to Schur coordinates: `x = Q y`.
    pub q: Matrix3<C>,
    pub u: Matrix3<C>,
    /// Diagonal of `U`: `lambda1` (positive, real), then `lambda2`, `lambda3`
    /// by descending real part and then descending imaginary part.
    pub eigenvalues: [C; 3],
}

impl SchurForm {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0].re
    }

    /// `Q^{-1} = Q^H`.
    pub fn q_inv(&self) -> Matrix3<C> {
        self.q.adjoint()
    }

    /// The real unit eigenvector for `lambda1` (first row of `Q`).
    pub fn unstable_direction(&self) -> State {
        State::new(self.q[(0, 0)].re, self.q[(0, 1)].re, self.q[(0, 2)].re)
    }

    pub fn to_schur(&self, s: &State) -> Vector3<C> {
        self.q * Vector3::new(C::from(s.a), C::from(s.f), C::from(s.b))
    }

    pub fn from_schur(&self, x: &Vector3<C>) -> Vector3<C> {
        self.q_inv() * x
    }

    /// `Q^{-1} U Q`.
    pub fn reconstruct(&self) -> Matrix3<C> {
        self.q_inv() * self.u * self.q
    }

    pub fn for_params(p: &Params) -> Result<Self, FeedbackError> {
        if p.theta <= 0.0 {
            return Err(FeedbackError::NotReactiveRegime);
        }
        schur_triangulate(&equilibrium_jacobian(p))
    }
}

fn real_null_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    // For a rank-two matrix the null space is spanned by the largest cross
    // product of two of its rows.
    let rows = [
        m.row(0).transpose(),
        m.row(1).transpose(),
        m.row(2).transpose(),
    ];
    let candidates = [
        rows[0].cross(&rows[1]),
        rows[0].cross(&rows[2]),
        rows[1].cross(&rows[2]),
    ];
    let best = candidates
        .into_iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let mut v = best / best.norm();
    let lead = v.iamax();
    if v[lead] < 0.0 {
        v = -v;
    }
    v
}

fn real_orthonormal_completion(v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let e = v.iamin();
    let mut w = Vector3::zeros();
    w[e] = 1.0;
    let w = w - v * v.dot(&w);
    let w = w / w.norm();
    let z = v.cross(&w);
    (w, z)
}

fn descending(a: &C, b: &C) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Schur triangulation of a Jacobian with exactly one positive real
/// eigenvalue and two eigenvalues with negative real part.
pub fn schur_triangulate(j: &Jacobian3) -> Result<SchurForm, FeedbackError> {
    let roots = cubic::solve(&j.characteristic());
    let spectrum = roots.to_complex();
    let scale = 1.0 + spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for a in 0..3 {
        for b in (a + 1)..3 {
            if (spectrum[a] - spectrum[b]).norm() <= DEGENERACY_TOL * scale {
                return Err(FeedbackError::DegenerateSpectrum);
            }
        }
    }
    let lambda1 = match roots.kind {
        RootKind::ThreeReal => {
            let r = &roots.real_roots;
            if !(r[2] > 0.0 && r[1] < 0.0) {
                return Err(FeedbackError::NotReactiveRegime);
            }
            r[2]
        }
        RootKind::OneRealPlusConjugatePair => {
            if !(roots.real_roots[0] > 0.0 && roots.pair_real_part.is_some_and(|re| re < 0.0)) {
                return Err(FeedbackError::NotReactiveRegime);
            }
            roots.real_roots[0]
        }
    };

    let jm = j.to_matrix();
    let v = real_null_vector(&(jm - Matrix3::identity() * lambda1));
    let (w, z) = real_orthonormal_completion(&v);
    let basis = Matrix3::from_columns(&[v, w, z]);
    let m = basis.transpose() * jm * basis;

    // Trailing 2x2 block and its eigenvalues.
    let (t11, t12, t21, t22) = (m[(1, 1)], m[(1, 2)], m[(2, 1)], m[(2, 2)]);
    let half_tr = 0.5 * (t11 + t22);
    let det = t11 * t22 - t12 * t21;
    let rad = C::from(half_tr * half_tr - det).sqrt();
    let mut pair = [C::from(half_tr) + rad, C::from(half_tr) - rad];
    pair.sort_by(descending);
    let lambda2 = pair[0];

    // Unit eigenvector of the block for lambda2, completed to a unitary 2x2.
    let cand1 = (C::from(t12), lambda2 - t11);
    let cand2 = (lambda2 - t22, C::from(t21));
    let norm = |c: &(C, C)| (c.0.norm_sqr() + c.1.norm_sqr()).sqrt();
    let u2 = if norm(&cand1) >= norm(&cand2) {
        cand1
    } else {
        cand2
    };
    let n = norm(&u2);
    let (u1, u2) = (u2.0 / n, u2.1 / n);
    let (w1, w2) = (-u2.conj(), u1.conj());

    let vc = basis.map(C::from);
    let rot = Matrix3::new(
        C::from(1.0),
        C::from(0.0),
        C::from(0.0),
        C::from(0.0),
        u1,
        w1,
        C::from(0.0),
        u2,
        w2,
    );
    let v_full = vc * rot;
    let q = v_full.adjoint();
    let mut u = q * jm.map(C::from) * v_full;
    for r in 1..3 {
        for c in 0..r {
            u[(r, c)] = C::from(0.0);
        }
    }
    let eigenvalues = [u[(0, 0)], u[(1, 1)], u[(2, 2)]];
    Ok(SchurForm { q, u, eigenvalues })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackGains {
    pub sigma: f64,
    pub tau: f64,
}

impl FeedbackGains {
    /// `sigma > lambda1` and `tau > (sigma + lambda1)^2 / (4 sigma lambda1)`.
    pub fn stabilizes(&self, lambda1: f64) -> bool {
        self.sigma > lambda1
            && self.tau > (self.sigma + lambda1).powi(2) / (4.0 * self.sigma * lambda1)
    }
}

/// Gains a relative `margin` past both stability thresholds.
pub fn design_gains(lambda1: f64, margin: f64) -> Result<FeedbackGains, FeedbackError> {
    if !(lambda1 > 0.0 && margin > 0.0 && lambda1.is_finite() && margin.is_finite()) {
        return Err(FeedbackError::InvalidGainInput { lambda1, margin });
    }
    let sigma = lambda1 * (1.0 + margin);
    let tau = (1.0 + margin) * (sigma + lambda1).powi(2) / (4.0 * sigma * lambda1);
    Ok(FeedbackGains { sigma, tau })
}

/// Eigenvalues of the linearized closed loop:
/// `lambda2`, `lambda3`, `(lambda1 - sigma ± sqrt((sigma + lambda1)^2 - 4 sigma tau lambda1)) / 2`.
pub fn closed_loop_spectrum(sf: &SchurForm, g: &FeedbackGains) -> [C; 4] {
    let l1 = sf.lambda1();
    let root = C::from((g.sigma + l1).powi(2) - 4.0 * g.sigma * g.tau * l1).sqrt();
    let base = C::from(l1 - g.sigma);
    [
        sf.eigenvalues[1],
        sf.eigenvalues[2],
        (base + root) / 2.0,
        (base - root) / 2.0,
    ]
}

/// Jacobian of the augmented system at its equilibrium, ordered
/// `(x1, x2, x3, omega)`.
pub fn closed_loop_matrix(sf: &SchurForm, g: &FeedbackGains) -> Matrix4<C> {
    let mut m = Matrix4::zeros();
    for r in 0..3 {
        for c in 0..3 {
            m[(r, c)] = sf.u[(r, c)];
        }
    }
    m[(0, 3)] = C::from(-g.tau * sf.lambda1());
    m[(3, 0)] = C::from(g.sigma);
    m[(3, 3)] = C::from(-g.sigma);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentedState {
    pub x1: f64,
    pub x2: C,
    pub x3: C,
    pub omega: f64,
}

impl AugmentedState {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.x1, self.x2.re, self.x2.im, self.x3.re, self.x3.im, self.omega,
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        AugmentedState {
            x1: v[0],
            x2: C::new(v[1], v[2]),
            x3: C::new(v[3], v[4]),
            omega: v[5],
        }
    }

    pub fn distance(&self, other: &AugmentedState) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// The model in Schur coordinates with the feedback loop attached.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub params: Params,
    pub schur: SchurForm,
    pub gains: FeedbackGains,
    /// `Q y*`.
    pub x_star: Vector3<C>,
}

impl ClosedLoop {
    pub fn new(params: Params, schur: SchurForm, gains: FeedbackGains) -> Self {
        let x_star = schur.to_schur(&equilibrium(&params).state());
        ClosedLoop {
            params,
            schur,
            gains,
            x_star,
        }
    }

    /// Designs gains with the given margin for a reactive-regime model.
    pub fn design(params: Params, margin: f64) -> Result<Self, FeedbackError> {
        let schur = SchurForm::for_params(&params)?;
        let gains = design_gains(schur.lambda1(), margin)?;
        Ok(ClosedLoop::new(params, schur, gains))
    }

    /// `(x*, x*_1)`.
    pub fn equilibrium(&self) -> AugmentedState {
        AugmentedState {
            x1: self.x_star[0].re,
            x2: self.x_star[1],
            x3: self.x_star[2],
            omega: self.x_star[0].re,
        }
    }

    /// Maps a model state into Schur coordinates with the given feedback value.
    pub fn lift(&self, s: &State, omega: f64) -> AugmentedState {
        let x = self.schur.to_schur(s);
        AugmentedState {
            x1: x[0].re,
            x2: x[1],
            x3: x[2],
            omega,
        }
    }

    /// Model state `Q^{-1} x` (real part) of an augmented state.
    pub fn project(&self, xs: &AugmentedState) -> State {
        let y = self
            .schur
            .from_schur(&Vector3::new(C::from(xs.x1), xs.x2, xs.x3));
        State::new(y[0].re, y[1].re, y[2].re)
    }

    fn x_field(&self, x: Vector3<C>) -> Vector3<C> {
        let y = self.schur.from_schur(&x);
        let dy = field_generic(&self.params, [y[0], y[1], y[2]]);
        self.schur.q * Vector3::new(dy[0], dy[1], dy[2])
    }

    /// The augmented vector field with all four coordinates complex; used
    /// for holomorphic derivative checks.
    pub fn field_complex(&self, x: [C; 4]) -> [C; 4] {
        let sigma = self.gains.sigma;
        let tau = self.gains.tau;
        let shifted = Vector3::new(x[0] - tau * (x[3] - self.x_star[0]), x[1], x[2]);
        let first = self.x_field(shifted)[0];
        let rest = self.x_field(Vector3::new(x[0], x[1], x[2]));
        [first, rest[1], rest[2], sigma * (x[0] - x[3])]
    }

    pub fn field(&self, xs: &AugmentedState) -> AugmentedState {
        let d = self.field_complex([C::from(xs.x1), xs.x2, xs.x3, C::from(xs.omega)]);
        AugmentedState {
            x1: d[0].re,
            x2: d[1],
            x3: d[2],
            omega: d[3].re,
        }
    }

    pub fn simulate(
        &self,
        x0: AugmentedState,
        cfg: &IntegratorConfig,
    ) -> Result<Trajectory<AugmentedState>, Failure<AugmentedState>> {
        let rhs = |_t: f64, v: &[f64; 6]| self.field(&AugmentedState::from_array(*v)).to_array();
        let none = |_: RawEvent<6, ()>| None;
        match run::<6, (), _>(&rhs, x0.to_array(), cfg, &[]) {
            Ok(raw) => Ok(Trajectory::from_raw(raw, AugmentedState::from_array, none)),
            Err(RawFailure { error, partial }) => Err(Failure {
                error,
                partial: Trajectory::from_raw(partial, AugmentedState::from_array, none),
            }),
        }
    }
}

/// Free-function form of [`ClosedLoop::field`].
pub fn augmented_vector_field(
    p: &Params,
    sf: &SchurForm,
    g: &FeedbackGains,
    xs: &AugmentedState,
) -> AugmentedState {
    ClosedLoop::new(*p, sf.clone(), *g).field(xs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackDesign {
    pub lambda1: f64,
    pub sigma: f64,
    pub tau: f64,
    /// `[re, im]` of each closed-loop eigenvalue.
    pub closed_loop_eigenvalues: Vec<[f64; 2]>,
}

pub fn feedback_design(p: &Params, margin: f64) -> Result<FeedbackDesign, FeedbackError> {
    let cl = ClosedLoop::design(*p, margin)?;
    let spec = closed_loop_spectrum(&cl.schur, &cl.gains);
    Ok(FeedbackDesign {
        lambda1: cl.schur.lambda1(),
        sigma: cl.gains.sigma,
        tau: cl.gains.tau,
        closed_loop_eigenvalues: spec.iter().map(|z| [z.re, z.im]).collect(),
    })
}
