//! Monic real cubics `x^3 + B x^2 + C x + E`.
//!
//! Roots come from the closed-form trigonometric (three real roots) or
//! Cardano (one real root plus a conjugate pair) evaluation, followed by a
//! guarded Newton polish of each root.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Imaginary parts below `IMAG_COLLAPSE * (1 + |re|)` are treated as zero.
pub const IMAG_COLLAPSE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPoly {
    pub b: f64,
    pub c: f64,
    pub e: f64,
}

impl CubicPoly {
    pub const fn new(b: f64, c: f64, e: f64) -> Self {
        CubicPoly { b, c, e }
    }

    pub fn is_finite(&self) -> bool {
        self.b.is_finite() && self.c.is_finite() && self.e.is_finite()
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((x + self.b) * x + self.c) * x + self.e
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        ((z + self.b) * z + self.c) * z + self.e
    }

    fn derivative(&self, x: f64) -> f64 {
        (3.0 * x + 2.0 * self.b) * x + self.c
    }

    /// `B^2 C^2 - 4 C^3 - 4 B^3 E - 27 E^2 + 18 B C E`.
    pub fn discriminant(&self) -> f64 {
        discriminant(self)
    }

    pub fn roots(&self) -> RootSet {
        solve(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootKind {
    ThreeReal,
    OneRealPlusConjugatePair,
}

/// Classified roots of a real cubic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub kind: RootKind,
    /// Sorted ascending; three entries or one.
    pub real_roots: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair_real_part: Option<f64>,
    /// Always positive when present; the pair is `re ± i im`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair_imag_part: Option<f64>,
}

impl RootSet {
    fn three_real(mut r: [f64; 3]) -> Self {
        r.sort_by(f64::total_cmp);
        RootSet {
            kind: RootKind::ThreeReal,
            real_roots: r.to_vec(),
            pair_real_part: None,
            pair_imag_part: None,
        }
    }

    fn mixed(real: f64, re: f64, im: f64) -> Self {
        RootSet {
            kind: RootKind::OneRealPlusConjugatePair,
            real_roots: vec![real],
            pair_real_part: Some(re),
            pair_imag_part: Some(im.abs()),
        }
    }

    /// All three roots; real roots first, then `re + i im`, `re - i im`.
    pub fn to_complex(&self) -> [Complex64; 3] {
        match self.kind {
            RootKind::ThreeReal => [
                Complex64::from(self.real_roots[0]),
                Complex64::from(self.real_roots[1]),
                Complex64::from(self.real_roots[2]),
            ],
            RootKind::OneRealPlusConjugatePair => {
                let re = self.pair_real_part.unwrap_or(0.0);
                let im = self.pair_imag_part.unwrap_or(0.0);
                [
                    Complex64::from(self.real_roots[0]),
                    Complex64::new(re, im),
                    Complex64::new(re, -im),
                ]
            }
        }
    }

    pub fn max_real_part(&self) -> f64 {
        self.to_complex()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Expands `(x - r1)(x - r2)(x - r3)` back into coefficients.
    pub fn reassemble(&self) -> CubicPoly {
        let [r1, r2, r3] = self.to_complex();
        let b = -(r1 + r2 + r3);
        let c = r1 * r2 + r1 * r3 + r2 * r3;
        let e = -(r1 * r2 * r3);
        CubicPoly::new(b.re, c.re, e.re)
    }
}

pub fn discriminant(q: &CubicPoly) -> f64 {
    let (b, c, e) = (q.b, q.c, q.e);
    b * b * c * c - 4.0 * c * c * c - 4.0 * b * b * b * e - 27.0 * e * e + 18.0 * b * c * e
}

/// One guarded Newton step on a real root: the step is kept only if it does
/// not increase the residual.
fn polish_real(q: &CubicPoly, x: f64) -> f64 {
    let fx = q.eval(x);
    let d = q.derivative(x);
    if fx == 0.0 || d == 0.0 || !d.is_finite() {
        return x;
    }
    let nx = x - fx / d;
    if nx.is_finite() && q.eval(nx).abs() <= fx.abs() {
        nx
    } else {
        x
    }
}

fn polish_complex(q: &CubicPoly, z: Complex64) -> Complex64 {
    let fz = q.eval_complex(z);
    let d = (3.0 * z + 2.0 * q.b) * z + q.c;
    if fz.norm() == 0.0 || d.norm() == 0.0 {
        return z;
    }
    let nz = z - fz / d;
    if nz.re.is_finite() && nz.im.is_finite() && q.eval_complex(nz).norm() <= fz.norm() {
        nz
    } else {
        z
    }
}

/// Roots of a monic real cubic.
///
/// A vanishing discriminant with a repeated real root is reported as
/// `ThreeReal` with repeated entries.
pub fn solve(q: &CubicPoly) -> RootSet {
    let (b, c, e) = (q.b, q.c, q.e);
    // Depressed cubic t^3 + p t + r with x = t - b/3.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let r = 2.0 * b * b * b / 27.0 - b * c / 3.0 + e;

    let half_r = r / 2.0;
    let third_p = p / 3.0;
    let disc = half_r * half_r + third_p * third_p * third_p;

    if p == 0.0 && r == 0.0 {
        let x = polish_real(q, -shift);
        return RootSet::three_real([x, x, x]);
    }

    if disc > 0.0 {
        // One real root. Pick the cube-root branch that avoids cancellation.
        let s = disc.sqrt();
        let w = if half_r >= 0.0 {
            -half_r - s
        } else {
            -half_r + s
        };
        let u = w.cbrt();
        let v = if u != 0.0 { -third_p / u } else { 0.0 };
        let x1 = polish_real(q, u + v - shift);

        // Deflate by the real root for the quadratic factor x^2 + b1 x + c1.
        let b1 = b + x1;
        let c1 = if x1.abs() > 1.0 && x1 != 0.0 {
            -e / x1
        } else {
            c + x1 * b1
        };
        let re = -b1 / 2.0;
        let rad = c1 - re * re;
        if rad <= 0.0 {
            // Rounding pushed a (nearly) double real root into this branch.
            let s = (-rad).sqrt();
            let x2 = polish_real(q, re - s);
            let x3 = polish_real(q, re + s);
            return RootSet::three_real([x1, x2, x3]);
        }
        let z = polish_complex(q, Complex64::new(re, rad.sqrt()));
        if z.im.abs() < IMAG_COLLAPSE * (1.0 + z.re.abs()) {
            let x2 = polish_real(q, z.re);
            return RootSet::three_real([x1, x2, x2]);
        }
        RootSet::mixed(x1, z.re, z.im)
    } else {
        // Three real roots, trigonometric form.
        let m = 2.0 * (-third_p).sqrt();
        let arg = if m == 0.0 {
            0.0
        } else {
            (3.0 * r / (p * m)).clamp(-1.0, 1.0)
        };
        let phi = arg.acos() / 3.0;
        let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
        let roots = [0.0, 1.0, 2.0].map(|k| {
            let t = m * (phi - k * two_pi_3).cos();
            polish_real(q, t - shift)
        });
        RootSet::three_real(roots)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LemmaError {
    #[error("lemma hypotheses require B > 0 and D > 0, got B = {b}, D = {d}")]
    HypothesisViolated { b: f64, d: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaImplication {
    None,
    ConjugatePairExists,
    PairHasPositiveRealPart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub bc_le_3d: bool,
    pub bc_lt_d: bool,
    pub implied: LemmaImplication,
    /// Whether the computed spectrum of `x^3 + B x^2 + C x + D` exhibits the
    /// implied structure.
    pub spectrum_agrees: bool,
    pub roots: RootSet,
}

/// Root-pattern predicates for `x^3 + B x^2 + C x + D` with `B, D > 0`.
///
/// `B C <= 3 D` forces a conjugate pair; `B C < D` additionally forces its
/// real part to be positive. The implications are guaranteed only for
/// `C > 0`; any real `C` is accepted and the outcome is cross-checked
/// against the computed roots in `spectrum_agrees`.
pub fn lemma_a1_predicates(b: f64, c: f64, d: f64) -> Result<LemmaReport, LemmaError> {
    if !(b > 0.0 && d > 0.0) {
        return Err(LemmaError::HypothesisViolated { b, d });
    }
    let bc = b * c;
    let bc_le_3d = bc <= 3.0 * d;
    let bc_lt_d = bc < d;
    let implied = match (bc_le_3d, bc_lt_d) {
        (_, true) => LemmaImplication::PairHasPositiveRealPart,
        (true, false) => LemmaImplication::ConjugatePairExists,
        _ => LemmaImplication::None,
    };
    let roots = solve(&CubicPoly::new(b, c, d));
    let has_pair = roots.kind == RootKind::OneRealPlusConjugatePair;
    let spectrum_agrees = match implied {
        LemmaImplication::None => true,
        LemmaImplication::ConjugatePairExists => has_pair,
        LemmaImplication::PairHasPositiveRealPart => {
            has_pair && roots.pair_real_part.is_some_and(|re| re > 0.0)
        }
    };
    Ok(LemmaReport {
        bc_le_3d,
        bc_lt_d,
        implied,
        spectrum_agrees,
        roots,
    })
}
