//! Checks that `a` stays in `(0, 1)` and `f` stays positive for as long as
//! the prescribed-burning land stays within `[0, a]`.

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::model::State;

/// Slack allowed on the `0 <= b <= a` precondition.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    ALeftUnitInterval,
    FNonPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub time: f64,
    pub state: State,
    pub kind: ViolationKind,
    /// Whether `0 <= b <= a` still held at the violating sample.
    pub precondition_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// Samples at which the conclusion was asserted.
    pub samples_checked: usize,
    /// First sample where `0 <= b <= a` failed, after which nothing further
    /// is asserted.
    pub precondition_broken_at: Option<(usize, f64)>,
    /// A violation while the precondition held on the whole preceding
    /// interval. Under an accurate integration this never happens.
    pub first_violation: Option<Violation>,
}

impl InvarianceReport {
    pub fn is_clean(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn b_within(s: &State, tol: f64) -> bool {
    s.b >= -tol && s.b <= s.a + tol
}

fn conclusion(s: &State) -> Option<ViolationKind> {
    if !(s.a > 0.0 && s.a < 1.0) {
        Some(ViolationKind::ALeftUnitInterval)
    } else if s.f.is_nan() || s.f <= 0.0 {
        Some(ViolationKind::FNonPositive)
    } else {
        None
    }
}

pub fn invariance_monitor(traj: &Trajectory) -> InvarianceReport {
    invariance_monitor_with_tolerance(traj, BOUNDARY_TOL)
}

pub fn invariance_monitor_with_tolerance(traj: &Trajectory, tol: f64) -> InvarianceReport {
    let mut report = InvarianceReport {
        samples_checked: 0,
        precondition_broken_at: None,
        first_violation: None,
    };
    for (index, (&time, state)) in traj.times.iter().zip(&traj.states).enumerate() {
        let b_ok = b_within(state, tol);
        if let Some(kind) = conclusion(state) {
            report.samples_checked += 1;
            report.first_violation = Some(Violation {
                index,
                time,
                state: *state,
                kind,
                precondition_holds: b_ok,
            });
            return report;
        }
        report.samples_checked += 1;
        if !b_ok {
            report.precondition_broken_at = Some((index, time));
            return report;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(states: Vec<State>) -> Trajectory {
        Trajectory {
            times: (0..states.len()).map(|i| i as f64).collect(),
            states,
            events: Vec::new(),
            truncated: false,
        }
    }

    #[test]
    fn clean_interior_path() {
        let r = invariance_monitor(&traj(vec![
            State::new(0.5, 1.0, 0.2),
            State::new(0.4, 0.9, 0.3),
        ]));
        assert!(r.is_clean());
        assert_eq!(r.samples_checked, 2);
        assert!(r.precondition_broken_at.is_none());
    }

    #[test]
    fn precondition_break_stops_assertions() {
        let r = invariance_monitor(&traj(vec![
            State::new(0.5, 1.0, 0.5),
            State::new(0.4, 1.0, 0.6),
            State::new(-0.1, -1.0, 0.6),
        ]));
        assert!(r.is_clean());
        assert_eq!(r.precondition_broken_at, Some((1, 1.0)));
    }

    #[test]
    fn zero_intensity_is_flagged() {
        let r = invariance_monitor(&traj(vec![
            State::new(0.5, 1.0, 0.2),
            State::new(0.5, 0.0, 0.2),
        ]));
        let v = r.first_violation.unwrap();
        assert_eq!(v.kind, ViolationKind::FNonPositive);
        assert_eq!(v.index, 1);
        assert!(v.precondition_holds);
    }

    #[test]
    fn boundary_tolerance_on_b() {
        let r = invariance_monitor(&traj(vec![
            State::new(0.5, 1.0, -5e-10),
            State::new(0.5, 1.0, 0.5 + 5e-10),
        ]));
        assert!(r.is_clean());
        assert!(r.precondition_broken_at.is_none());
    }
}
