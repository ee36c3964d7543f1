//! Linearization at the equilibrium and the stability classification of
//! reactive (`theta > 0`) and proactive (`theta < 0`) burning policies.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::cubic::{self, CubicPoly, RootKind, RootSet};
use crate::model::{Params, State};

/// Default relative tolerance for the Hopf-critical equality.
pub const HOPF_TOLERANCE: f64 = 1e-9;

/// Jacobian of the model vector field, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian3(pub [[f64; 3]; 3]);

impl Jacobian3 {
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.0[i][j])
    }

    /// Characteristic polynomial `det(x I - J)` from the trace, principal
    /// minors and determinant of the matrix.
    pub fn characteristic(&self) -> CubicPoly {
        let m = &self.0;
        let trace = m[0][0] + m[1][1] + m[2][2];
        let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
            + m[1][1] * m[2][2]
            - m[1][2] * m[2][1];
        let det = self.to_matrix().determinant();
        CubicPoly::new(-trace, minors, -det)
    }
}

pub fn jacobian(p: &Params, s: &State) -> Jacobian3 {
    Jacobian3([
        [-p.alpha * s.f - p.gamma, -p.alpha * s.a, -p.beta],
        [p.zeta, -p.eta, 0.0],
        [p.theta * (p.f0 - s.f), -p.theta * s.a, 0.0],
    ])
}

/// Jacobian at the equilibrium, written in closed form.
pub fn equilibrium_jacobian(p: &Params) -> Jacobian3 {
    Jacobian3([
        [
            -p.alpha * p.f0 - p.gamma,
            -p.alpha * p.eta * p.f0 / p.zeta,
            -p.beta,
        ],
        [p.zeta, -p.eta, 0.0],
        [0.0, -p.eta * p.theta * p.f0 / p.zeta, 0.0],
    ])
}

/// `x^3 + B x^2 + C x + E` with `B = alpha f0 + gamma + eta`,
/// `C = 2 alpha f0 eta + gamma eta`, `E = -beta eta theta f0`.
pub fn characteristic(p: &Params) -> CubicPoly {
    CubicPoly::new(
        p.alpha * p.f0 + p.gamma + p.eta,
        2.0 * p.alpha * p.f0 * p.eta + p.gamma * p.eta,
        -p.beta * p.eta * p.theta * p.f0,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// One positive and two negative real eigenvalues.
    #[serde(rename = "ReactiveUnstable_ThreeReal")]
    ReactiveUnstableThreeReal,
    /// One positive real eigenvalue and a pair with negative real part.
    #[serde(rename = "ReactiveUnstable_ComplexPair")]
    ReactiveUnstableComplexPair,
    #[serde(rename = "ProactiveStable_ThreeReal")]
    ProactiveStableThreeReal,
    #[serde(rename = "ProactiveStable_ComplexPair")]
    ProactiveStableComplexPair,
    /// One negative real eigenvalue and a pair with positive real part.
    #[serde(rename = "ProactiveUnstable_Focus")]
    ProactiveUnstableFocus,
    /// Spectrum `{-B, ±i sqrt(C)}`; linear stability undetermined.
    HopfCritical,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ReactiveUnstableThreeReal => "ReactiveUnstable_ThreeReal",
            Regime::ReactiveUnstableComplexPair => "ReactiveUnstable_ComplexPair",
            Regime::ProactiveStableThreeReal => "ProactiveStable_ThreeReal",
            Regime::ProactiveStableComplexPair => "ProactiveStable_ComplexPair",
            Regime::ProactiveUnstableFocus => "ProactiveUnstable_Focus",
            Regime::HopfCritical => "HopfCritical",
        }
    }

    pub fn is_reactive(&self) -> bool {
        matches!(
            self,
            Regime::ReactiveUnstableThreeReal | Regime::ReactiveUnstableComplexPair
        )
    }

    pub fn is_proactive_stable(&self) -> bool {
        matches!(
            self,
            Regime::ProactiveStableThreeReal | Regime::ProactiveStableComplexPair
        )
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification of the equilibrium together with both routes to it: the
/// analytic condition values and the computed spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub regime: Regime,
    pub eigenvalues: RootSet,
    /// `(alpha f0 + gamma + eta)(2 alpha f0 eta + gamma eta)`
    pub condition_lhs: f64,
    /// `beta eta |theta| f0`
    pub condition_rhs: f64,
}

impl StabilityVerdict {
    /// True when the computed spectrum has the structure the regime predicts.
    pub fn spectrum_consistent(&self) -> bool {
        let ev = &self.eigenvalues;
        let roots = ev.to_complex();
        let positive = roots.iter().filter(|z| z.re > 0.0).count();
        match self.regime {
            Regime::ReactiveUnstableThreeReal => ev.kind == RootKind::ThreeReal && positive == 1,
            Regime::ReactiveUnstableComplexPair => {
                ev.kind == RootKind::OneRealPlusConjugatePair
                    && ev.real_roots[0] > 0.0
                    && ev.pair_real_part.is_some_and(|re| re < 0.0)
            }
            Regime::ProactiveStableThreeReal => ev.kind == RootKind::ThreeReal && positive == 0,
            Regime::ProactiveStableComplexPair => {
                ev.kind == RootKind::OneRealPlusConjugatePair && ev.max_real_part() < 0.0
            }
            Regime::ProactiveUnstableFocus => {
                ev.kind == RootKind::OneRealPlusConjugatePair
                    && ev.real_roots[0] < 0.0
                    && ev.pair_real_part.is_some_and(|re| re > 0.0)
            }
            Regime::HopfCritical => ev.kind == RootKind::OneRealPlusConjugatePair,
        }
    }
}

pub fn condition_sides(p: &Params) -> (f64, f64) {
    let q = characteristic(p);
    (q.b * q.c, p.beta * p.eta * p.theta.abs() * p.f0)
}

pub fn classify(p: &Params) -> StabilityVerdict {
    classify_with_tolerance(p, HOPF_TOLERANCE)
}

/// `|LHS - RHS| <= tol (1 + LHS)` is classified as Hopf-critical.
pub fn classify_with_tolerance(p: &Params, tol: f64) -> StabilityVerdict {
    let eigenvalues = cubic::solve(&characteristic(p));
    let (lhs, rhs) = condition_sides(p);
    let regime = if p.theta > 0.0 {
        match eigenvalues.kind {
            RootKind::ThreeReal => Regime::ReactiveUnstableThreeReal,
            RootKind::OneRealPlusConjugatePair => Regime::ReactiveUnstableComplexPair,
        }
    } else if (lhs - rhs).abs() <= tol * (1.0 + lhs) {
        Regime::HopfCritical
    } else if lhs > rhs {
        match eigenvalues.kind {
            RootKind::ThreeReal => Regime::ProactiveStableThreeReal,
            RootKind::OneRealPlusConjugatePair => Regime::ProactiveStableComplexPair,
        }
    } else {
        Regime::ProactiveUnstableFocus
    };
    StabilityVerdict {
        regime,
        eigenvalues,
        condition_lhs: lhs,
        condition_rhs: rhs,
    }
}

/// Proactive strength at which the Hopf-critical equality holds; `theta` in
/// `p` is ignored.
pub fn critical_theta(p: &Params) -> f64 {
    let q = characteristic(p);
    q.b * q.c / (p.beta * p.eta * p.f0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equilibrium;

    fn benchmark(theta: f64) -> Params {
        Params::new(1.0, 1.0, 1.0, 2.5, 1.0, theta, 1.0).unwrap()
    }

    #[test]
    fn equilibrium_jacobian_matches_general_form() {
        let p = Params::new(0.7, 1.3, 0.4, 3.1, 0.8, -2.2, 1.5).unwrap();
        let general = jacobian(&p, &equilibrium(&p).state());
        let closed = equilibrium_jacobian(&p);
        for i in 0..3 {
            for j in 0..3 {
                assert!((general.entry(i, j) - closed.entry(i, j)).abs() < 1e-14);
            }
        }
        assert_eq!(closed.entry(2, 0), 0.0);
        assert!((closed.entry(2, 1) + p.eta * p.theta * p.f0 / p.zeta).abs() < 1e-15);
    }

    #[test]
    fn fig4_reactive_jacobian() {
        let j = equilibrium_jacobian(&benchmark(1.0));
        let want = [[-2.0, -0.4, -1.0], [2.5, -1.0, 0.0], [0.0, -0.4, 0.0]];
        for (row, want_row) in j.0.iter().zip(want) {
            for (x, w) in row.iter().zip(want_row) {
                assert!((x - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn third_row_at_threshold_intensity() {
        let p = benchmark(3.0);
        let j = jacobian(&p, &State::new(0.3, p.f0, 0.7));
        assert_eq!(j.0[2], [0.0, -3.0 * 0.3, 0.0]);
    }

    #[test]
    fn characteristic_examples() {
        assert_eq!(
            characteristic(&benchmark(1.0)),
            CubicPoly::new(3.0, 3.0, -1.0)
        );
        assert_eq!(
            characteristic(&benchmark(-3.0)),
            CubicPoly::new(3.0, 3.0, 3.0)
        );
        let a = characteristic(&benchmark(1.0));
        let mut p = benchmark(-7.0);
        p.zeta = 11.0;
        let b = characteristic(&p);
        assert_eq!((a.b, a.c), (b.b, b.c));
    }

    #[test]
    fn characteristic_agrees_with_matrix_route() {
        let p = Params::new(0.7, 1.3, 0.4, 3.1, 0.8, -2.2, 1.5).unwrap();
        let a = characteristic(&p);
        let b = equilibrium_jacobian(&p).characteristic();
        assert!((a.b - b.b).abs() < 1e-12);
        assert!((a.c - b.c).abs() < 1e-12);
        assert!((a.e - b.e).abs() < 1e-12);
    }

    #[test]
    fn fig4_classifications() {
        let v = classify(&benchmark(-0.1));
        assert!(v.regime.is_proactive_stable());
        assert!((v.condition_lhs - 9.0).abs() < 1e-15);
        assert!((v.condition_rhs - 0.1).abs() < 1e-15);
        assert!(v.spectrum_consistent());

        let v = classify(&benchmark(-20.0));
        assert_eq!(v.regime, Regime::ProactiveUnstableFocus);
        assert!(v.spectrum_consistent());

        let v = classify(&benchmark(1.0));
        assert!(v.regime.is_reactive());
        let positive: Vec<_> = v
            .eigenvalues
            .to_complex()
            .into_iter()
            .filter(|z| z.re > 0.0)
            .collect();
        assert_eq!(positive.len(), 1);
        assert_eq!(positive[0].im, 0.0);
        assert!(v.spectrum_consistent());
    }

    #[test]
    fn critical_theta_examples() {
        let p = benchmark(-1.0);
        assert!((critical_theta(&p) - 9.0).abs() < 1e-15);
        let v = classify(&p.with_vartheta(9.0));
        assert_eq!(v.regime, Regime::HopfCritical);
        assert!((v.eigenvalues.real_roots[0] + 3.0).abs() < 1e-9);
        assert!(v.eigenvalues.pair_real_part.unwrap().abs() < 1e-9);
        assert!((v.eigenvalues.pair_imag_part.unwrap() - 3f64.sqrt()).abs() < 1e-9);

        let mut doubled = p;
        doubled.beta *= 2.0;
        assert!((critical_theta(&doubled) - 4.5).abs() < 1e-15);

        let mut limit = p;
        limit.gamma = 1e-300;
        assert!((critical_theta(&limit) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_the_critical_strength_flips_stability() {
        let p = benchmark(-1.0);
        let star = critical_theta(&p);
        assert!(classify(&p.with_vartheta(star * (1.0 - 1e-6)))
            .regime
            .is_proactive_stable());
        assert_eq!(
            classify(&p.with_vartheta(star * (1.0 + 1e-6))).regime,
            Regime::ProactiveUnstableFocus
        );
    }

    #[test]
    fn verdict_serializes_regime_name() {
        let v = classify(&benchmark(-20.0));
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"ProactiveUnstable_Focus\""), "{s}");
    }
}
