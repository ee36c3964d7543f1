//! Time integration of the model, event monitoring along trajectories,
//! perturbation ensembles and streamline sampling.

mod ensemble;
mod integrator;
mod invariance;
mod streamlines;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, Params, State};

pub use ensemble::{ensemble, perturbations, EnsembleResult, EnsembleSummary};
pub use integrator::{IntegratorConfig, Method, DEFAULT_DIVERGENCE_BOUND, EVENT_TIME_TOL};
pub use invariance::{
    invariance_monitor, InvarianceReport, Violation, ViolationKind, BOUNDARY_TOL,
};
pub use streamlines::{streamline_grid, GridSpec, Plane, StreamSample};

pub(crate) use integrator::{run, Direction, Monitor, RawEvent, RawFailure, RawPath};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("adaptive step size underflow at t = {time} (h = {step})")]
    StepSizeUnderflow { time: f64, step: f64 },
    #[error("non-finite state encountered at t = {time}")]
    NonFiniteState { time: f64 },
}

/// An integration failure together with the part of the trajectory computed
/// before it.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct Failure<S> {
    pub error: SimError,
    pub partial: Trajectory<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    /// `b - a` changed sign.
    BCrossesA,
    /// `a` dropped below 0 or rose above 1.
    ALeavesUnitInterval,
    /// `f` dropped below 0.
    FHitsZero,
    /// `b` left `[0, a]` through either bound.
    BLeavesZeroToA,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::BCrossesA => "BCrossesA",
            EventKind::ALeavesUnitInterval => "ALeavesUnitInterval",
            EventKind::FHitsZero => "FHitsZero",
            EventKind::BLeavesZeroToA => "BLeavesZeroToA",
        }
    }
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A refined sign change; `state_before` and `state_after` bracket `time`
/// within [`EVENT_TIME_TOL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub time: f64,
    pub state_before: State,
    pub state_after: State,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S = State> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub events: Vec<Event>,
    /// Integration stopped early because the state left the divergence bound.
    pub truncated: bool,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn final_state(&self) -> &S {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub(crate) fn from_raw<const N: usize, K>(
        raw: RawPath<N, K>,
        to_state: impl Fn([f64; N]) -> S,
        to_event: impl Fn(RawEvent<N, K>) -> Option<Event>,
    ) -> Self {
        Trajectory {
            times: raw.times,
            states: raw.states.into_iter().map(to_state).collect(),
            events: raw.events.into_iter().filter_map(to_event).collect(),
            truncated: raw.truncated,
        }
    }
}

/// Integrates the model from `s0`, recording boundary events along the way.
pub fn integrate(
    p: &Params,
    s0: State,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, Failure<State>> {
    let rhs = |_t: f64, y: &[f64; 3]| model::vector_field(p, &State::from_array(*y)).to_array();
    let b_minus_a = |y: &[f64; 3]| y[2] - y[0];
    let b = |y: &[f64; 3]| y[2];
    let a = |y: &[f64; 3]| y[0];
    let a_minus_one = |y: &[f64; 3]| y[0] - 1.0;
    let f = |y: &[f64; 3]| y[1];
    let monitors = [
        Monitor {
            kind: EventKind::BCrossesA,
            direction: Direction::Any,
            g: &b_minus_a,
        },
        Monitor {
            kind: EventKind::BLeavesZeroToA,
            direction: Direction::Rising,
            g: &b_minus_a,
        },
        Monitor {
            kind: EventKind::BLeavesZeroToA,
            direction: Direction::Falling,
            g: &b,
        },
        Monitor {
            kind: EventKind::ALeavesUnitInterval,
            direction: Direction::Falling,
            g: &a,
        },
        Monitor {
            kind: EventKind::ALeavesUnitInterval,
            direction: Direction::Rising,
            g: &a_minus_one,
        },
        Monitor {
            kind: EventKind::FHitsZero,
            direction: Direction::Falling,
            g: &f,
        },
    ];
    let to_event = |e: RawEvent<3, EventKind>| {
        Some(Event {
            kind: e.kind,
            time: e.time,
            state_before: State::from_array(e.before),
            state_after: State::from_array(e.after),
        })
    };
    match run(&rhs, s0.to_array(), cfg, &monitors) {
        Ok(raw) => Ok(Trajectory::from_raw(raw, State::from_array, to_event)),
        Err(RawFailure { error, partial }) => Err(Failure {
            error,
            partial: Trajectory::from_raw(partial, State::from_array, to_event),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingOutcome {
    /// Lower end `gamma / (alpha f0 + beta + gamma)` of the admissible
    /// initial interval for `a(0) = b(0)`.
    pub threshold: f64,
    pub a0: f64,
    /// `a(0)` lies strictly inside `(threshold, 1)`.
    pub hypothesis_met: bool,
    /// `(b - a)'` at `t = 0`, equal to `(alpha f0 + beta + gamma) a0 - gamma`.
    pub initial_gap_rate: f64,
    /// First upward crossing of `b` over `a`, if any.
    pub crossing: Option<Event>,
    pub trajectory: Trajectory,
}

impl CrossingOutcome {
    /// True when the crossing lands with `0 < a < b < 1`.
    pub fn crossing_inside_unit_square(&self) -> bool {
        self.crossing.is_some_and(|e| {
            let s = e.state_after;
            0.0 < s.a && s.a < s.b && s.b < 1.0
        })
    }
}

pub fn crossing_threshold(p: &Params) -> f64 {
    p.gamma / (p.alpha * p.f0 + p.beta + p.gamma)
}

/// Starts from `a(0) = b(0) = a0`, `f(0) = f0` and looks for `b` overtaking
/// `a`. Without an explicit `a0` the midpoint of the admissible interval is
/// used.
pub fn crossing_experiment(
    p: &Params,
    a0: Option<f64>,
    cfg: &IntegratorConfig,
) -> Result<CrossingOutcome, Failure<State>> {
    let threshold = crossing_threshold(p);
    let a0 = a0.unwrap_or(0.5 * (threshold + 1.0));
    let trajectory = integrate(p, State::new(a0, p.f0, a0), cfg)?;
    let crossing = trajectory
        .events_of(EventKind::BCrossesA)
        .find(|e| e.state_after.b > e.state_after.a)
        .copied();
    Ok(CrossingOutcome {
        threshold,
        a0,
        hypothesis_met: a0 > threshold && a0 < 1.0,
        initial_gap_rate: (p.alpha * p.f0 + p.beta + p.gamma) * a0 - p.gamma,
        crossing,
        trajectory,
    })
}
