#![allow(dead_code)]

use burnstab::cubic::CubicPoly;
use burnstab::Params;
use nalgebra::{Complex, Matrix3};
use rand::Rng;

pub fn benchmark(theta: f64) -> Params {
    Params::new(1.0, 1.0, 1.0, 2.5, 1.0, theta, 1.0).unwrap()
}

/// Log-uniform in `[lo, hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Any valid parameter set; viability is not enforced.
pub fn any_params<R: Rng>(rng: &mut R) -> Params {
    let mut g = || log_uniform(rng, 1e-2, 1e2);
    let (alpha, beta, gamma, zeta, eta, f0) = (g(), g(), g(), g(), g(), g());
    let mag = log_uniform(rng, 1e-2, 1e2);
    let theta = if rng.gen::<bool>() { mag } else { -mag };
    Params::new(alpha, beta, gamma, zeta, eta, theta, f0).unwrap()
}

/// A parameter set inside the viability window, with `zeta` drawn between
/// the two bounds `(gamma + alpha f0) eta f0 / gamma` and
/// `(beta + gamma + alpha f0) eta f0 / gamma`. `theta` is set to `theta`.
pub fn viable_params<R: Rng>(rng: &mut R, theta: f64) -> Params {
    let mut g = || log_uniform(rng, 0.1, 10.0);
    let (alpha, beta, gamma, eta, f0) = (g(), g(), g(), g(), g());
    let lo = (gamma + alpha * f0) * eta * f0 / gamma;
    let hi = (beta + gamma + alpha * f0) * eta * f0 / gamma;
    let zeta = lo + (hi - lo) * rng.gen_range(0.02..0.98);
    Params::new(alpha, beta, gamma, zeta, eta, theta, f0).unwrap()
}

/// Eigenvalues of the companion matrix of `x^3 + b x^2 + c x + e`.
pub fn companion_roots(q: &CubicPoly) -> [Complex<f64>; 3] {
    let m = Matrix3::new(0.0, 0.0, -q.e, 1.0, 0.0, -q.c, 0.0, 1.0, -q.b);
    let ev = m.complex_eigenvalues();
    [ev[0], ev[1], ev[2]]
}

/// Largest root error under the best pairing of two triples.
pub fn paired_error(x: &[Complex<f64>; 3], y: &[Complex<f64>; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS
        .iter()
        .map(|p| (0..3).map(|i| (x[i] - y[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}
