mod common;

use burnstab::cubic::{self, CubicPoly, RootKind};
use burnstab::stability::{characteristic, equilibrium_jacobian};
use burnstab::{classify, equilibrium, feasibility, Params};
use common::{companion_roots, paired_error};
use proptest::prelude::*;

fn positive() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|x| 10f64.powf(x))
}

fn params() -> impl Strategy<Value = Params> {
    (
        positive(),
        positive(),
        positive(),
        positive(),
        positive(),
        positive(),
        positive(),
        any::<bool>(),
    )
        .prop_map(|(al, be, ga, ze, et, th, f0, neg)| {
            let theta = if neg { -th } else { th };
            Params::new(al, be, ga, ze, et, theta, f0).unwrap()
        })
}

fn coeff() -> impl Strategy<Value = f64> {
    -20.0f64..20.0
}

proptest! {
    #[test]
    fn vieta_closure(b in coeff(), c in coeff(), e in coeff()) {
        let q = CubicPoly::new(b, c, e);
        let back = cubic::solve(&q).reassemble();
        let scale = 1.0 + b.abs() + c.abs() + e.abs();
        prop_assert!((back.b - b).abs() <= 1e-9 * scale);
        prop_assert!((back.c - c).abs() <= 1e-9 * scale);
        prop_assert!((back.e - e).abs() <= 1e-9 * scale);
    }

    #[test]
    fn roots_match_companion_oracle(b in coeff(), c in coeff(), e in coeff()) {
        let q = CubicPoly::new(b, c, e);
        let ours = cubic::solve(&q).to_complex();
        let scale = 1.0 + ours.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(paired_error(&ours, &companion_roots(&q)) <= 1e-8 * scale);
    }

    #[test]
    fn kind_follows_discriminant_sign(b in coeff(), c in coeff(), e in coeff()) {
        let q = CubicPoly::new(b, c, e);
        let d = q.discriminant();
        // Away from the degenerate surface the sign decides the shape.
        prop_assume!(d.abs() > 1e-6 * (1.0 + b.abs() + c.abs() + e.abs()).powi(4));
        let kind = cubic::solve(&q).kind;
        prop_assert_eq!(kind == RootKind::ThreeReal, d > 0.0);
    }

    #[test]
    fn verdict_spectrum_is_consistent(p in params()) {
        prop_assert!(classify(&p).spectrum_consistent());
    }

    #[test]
    fn analytic_characteristic_matches_matrix(p in params()) {
        let a = characteristic(&p);
        let n = equilibrium_jacobian(&p).characteristic();
        for (x, y) in [(a.b, n.b), (a.c, n.c), (a.e, n.e)] {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()));
        }
    }

    #[test]
    fn theta_changes_only_the_constant_term(p in params(), t in positive()) {
        let a = characteristic(&p);
        let b = characteristic(&p.with_theta(-t));
        prop_assert_eq!((a.b, a.c), (b.b, b.c));
        prop_assert_eq!(equilibrium(&p), equilibrium(&p.with_theta(-t)));
        prop_assert_eq!(feasibility(&p), feasibility(&p.with_theta(-t)));
    }

    #[test]
    fn reactive_always_has_one_positive_real_root(p in params()) {
        let p = p.with_theta(p.theta.abs());
        let ev = classify(&p).eigenvalues;
        let positive: Vec<_> = ev.to_complex().into_iter().filter(|z| z.re > 0.0).collect();
        prop_assert_eq!(positive.len(), 1);
        prop_assert_eq!(positive[0].im, 0.0);
    }
}
