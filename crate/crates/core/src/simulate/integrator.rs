//! Explicit Runge-Kutta drivers over fixed-size real state vectors.
//!
//! Two schemes are available: classical RK4 with a fixed step and the
//! Dormand-Prince 5(4) pair with an embedded error estimate. Sign-change
//! monitors are checked after every accepted step and their crossing times
//! are refined by bisection, re-stepping from the start of the step.

use serde::{Deserialize, Serialize};

use super::SimError;

/// Event times are refined until the bracketing interval is this narrow.
pub const EVENT_TIME_TOL: f64 = 1e-10;

/// Integration stops (without error) once a coordinate exceeds this size.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Rk4Fixed {
        step: f64,
    },
    Rk45Adaptive {
        rel_tol: f64,
        abs_tol: f64,
        max_step: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_end: f64,
    /// Stop at the first detected event instead of only recording it.
    pub terminate_on_event: bool,
    pub divergence_bound: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig::rk45(1e-9, 1e-12, 100.0)
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64, t_end: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4Fixed { step },
            t_end,
            terminate_on_event: false,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }

    pub fn rk45(rel_tol: f64, abs_tol: f64, t_end: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45Adaptive {
                rel_tol,
                abs_tol,
                max_step: 0.5,
            },
            t_end,
            terminate_on_event: false,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn terminating(mut self) -> Self {
        self.terminate_on_event = true;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |what: &str| Err(SimError::InvalidConfig(what.to_string()));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive and finite");
        }
        if self.divergence_bound.is_nan() || self.divergence_bound <= 0.0 {
            return bad("divergence bound must be positive");
        }
        match self.method {
            Method::Rk4Fixed { step } if !(step > 0.0 && step.is_finite()) => {
                bad("step must be positive")
            }
            Method::Rk45Adaptive {
                rel_tol,
                abs_tol,
                max_step,
            } if !(rel_tol > 0.0 && abs_tol > 0.0 && max_step > 0.0) => {
                bad("tolerances and max_step must be positive")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Sign change in either direction.
    Any,
    /// From `<= 0` to `> 0`.
    Rising,
    /// From `>= 0` to `< 0`.
    Falling,
}

impl Direction {
    fn crossed(self, before: f64, after: f64) -> bool {
        let up = before <= 0.0 && after > 0.0;
        let down = before >= 0.0 && after < 0.0;
        match self {
            Direction::Any => up || down,
            Direction::Rising => up,
            Direction::Falling => down,
        }
    }
}

pub(crate) struct Monitor<'a, const N: usize, K> {
    pub kind: K,
    pub direction: Direction,
    pub g: &'a dyn Fn(&[f64; N]) -> f64,
}

#[derive(Debug, Clone)]
pub(crate) struct RawEvent<const N: usize, K> {
    pub kind: K,
    pub time: f64,
    pub before: [f64; N],
    pub after: [f64; N],
}

#[derive(Debug, Clone)]
pub(crate) struct RawPath<const N: usize, K> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub events: Vec<RawEvent<N, K>>,
    pub truncated: bool,
}

pub(crate) struct RawFailure<const N: usize, K> {
    pub error: SimError,
    pub partial: RawPath<N, K>,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

pub(crate) fn rk4_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = rhs(t + h, &axpy(y, h, &k3));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand-Prince step: fifth-order solution and local error estimate.
pub(crate) fn dopri_step<const N: usize, F>(
    rhs: &F,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = rhs(t, y);
    let k2 = rhs(
        t + h / 5.0,
        &std::array::from_fn(|i| y[i] + h * A21 * k1[i]),
    );
    let k3 = rhs(
        t + 3.0 * h / 10.0,
        &std::array::from_fn(|i| y[i] + h * (A31 * k1[i] + A32 * k2[i])),
    );
    let k4 = rhs(
        t + 4.0 * h / 5.0,
        &std::array::from_fn(|i| y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])),
    );
    let k5 = rhs(
        t + 8.0 * h / 9.0,
        &std::array::from_fn(|i| {
            y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        }),
    );
    let k6 = rhs(
        t + h,
        &std::array::from_fn(|i| {
            y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        }),
    );
    let y5: [f64; N] = std::array::from_fn(|i| {
        y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
    });
    let k7 = rhs(t + h, &y5);
    let err = std::array::from_fn(|i| {
        h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
    });
    (y5, err)
}

fn finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates `rhs` from `y0` at `t = 0` to `cfg.t_end`.
pub(crate) fn run<const N: usize, K, F>(
    rhs: &F,
    y0: [f64; N],
    cfg: &IntegratorConfig,
    monitors: &[Monitor<'_, N, K>],
) -> Result<RawPath<N, K>, RawFailure<N, K>>
where
    K: Copy,
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut path = RawPath {
        times: vec![0.0],
        states: vec![y0],
        events: Vec::new(),
        truncated: false,
    };
    if let Err(error) = cfg.validate() {
        return Err(RawFailure {
            error,
            partial: path,
        });
    }
    if !finite(&y0) {
        return Err(RawFailure {
            error: SimError::NonFiniteState { time: 0.0 },
            partial: path,
        });
    }

    // Re-steps from the start of an accepted step; used for event refinement.
    let advance = |t: f64, y: &[f64; N], h: f64| -> [f64; N] {
        match cfg.method {
            Method::Rk4Fixed { .. } => rk4_step(rhs, t, y, h),
            Method::Rk45Adaptive { .. } => dopri_step(rhs, t, y, h).0,
        }
    };

    let t_end = cfg.t_end;
    let mut t = 0.0;
    let mut y = y0;
    let mut h = match cfg.method {
        Method::Rk4Fixed { step } => step,
        Method::Rk45Adaptive { max_step, .. } => (0.01 * t_end).min(max_step).min(1e-3),
    };
    // Fixed steps are counted rather than accumulated so the grid stays exact.
    let mut fixed_index: u64 = 0;

    while t < t_end {
        let (t_new, y_new, h_used) = match cfg.method {
            Method::Rk4Fixed { step } => {
                let t_next = ((fixed_index + 1) as f64 * step).min(t_end);
                let h_used = t_next - t;
                fixed_index += 1;
                (t_next, rk4_step(rhs, t, &y, h_used), h_used)
            }
            Method::Rk45Adaptive {
                rel_tol,
                abs_tol,
                max_step,
            } => loop {
                h = h.min(max_step).min(t_end - t);
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(RawFailure {
                        error: SimError::StepSizeUnderflow { time: t, step: h },
                        partial: path,
                    });
                }
                let (y5, err) = dopri_step(rhs, t, &y, h);
                let norm = if finite(&y5) && finite(&err) {
                    let sum: f64 = (0..N)
                        .map(|i| {
                            let sc = abs_tol + rel_tol * y[i].abs().max(y5[i].abs());
                            (err[i] / sc).powi(2)
                        })
                        .sum();
                    (sum / N as f64).sqrt()
                } else {
                    f64::INFINITY
                };
                if norm <= 1.0 {
                    let factor = if norm == 0.0 {
                        5.0
                    } else {
                        (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    let h_used = h;
                    let t_next = if t_end - (t + h) <= 1e-14 * t_end {
                        t_end
                    } else {
                        t + h
                    };
                    h *= factor;
                    break (t_next, y5, h_used);
                }
                let factor = if norm.is_finite() {
                    (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h *= factor;
            },
        };

        if !finite(&y_new) {
            return Err(RawFailure {
                error: SimError::NonFiniteState { time: t_new },
                partial: path,
            });
        }

        let mut step_events = Vec::new();
        for m in monitors {
            let g0 = (m.g)(&y);
            let g1 = (m.g)(&y_new);
            if m.direction.crossed(g0, g1) {
                let (mut lo, mut hi) = (0.0, h_used);
                let mut y_lo = y;
                let mut y_hi = y_new;
                while hi - lo > EVENT_TIME_TOL {
                    let mid = 0.5 * (lo + hi);
                    let y_mid = advance(t, &y, mid);
                    if m.direction.crossed(g0, (m.g)(&y_mid)) {
                        hi = mid;
                        y_hi = y_mid;
                    } else {
                        lo = mid;
                        y_lo = y_mid;
                    }
                }
                step_events.push(RawEvent {
                    kind: m.kind,
                    time: t + 0.5 * (lo + hi),
                    before: y_lo,
                    after: y_hi,
                });
            }
        }
        step_events.sort_by(|a, b| a.time.total_cmp(&b.time));

        if cfg.terminate_on_event && !step_events.is_empty() {
            let first = step_events[0].clone();
            let hit: Vec<_> = step_events
                .into_iter()
                .filter(|e| e.time <= first.time)
                .collect();
            let t_stop = first.time + 0.5 * EVENT_TIME_TOL;
            if t_stop > t {
                path.times.push(t_stop);
                path.states.push(first.after);
            }
            path.events.extend(hit);
            return Ok(path);
        }

        path.events.extend(step_events);
        t = t_new;
        y = y_new;
        path.times.push(t);
        path.states.push(y);

        if y.iter().any(|v| v.abs() > cfg.divergence_bound) {
            path.truncated = true;
            return Ok(path);
        }
    }
    Ok(path)
}
