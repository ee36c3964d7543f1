use serde::{Deserialize, Serialize};

use super::integrator::rk4_step;
use crate::model::{equilibrium, vector_field, Params, State};

/// Axis-aligned coordinate plane; the remaining coordinate is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Plane {
    AF,
    AB,
    FB,
}

impl Plane {
    /// Indices (into `[a, f, b]`) of the horizontal, vertical and fixed axes.
    pub fn axes(&self) -> (usize, usize, usize) {
        match self {
            Plane::AF => (0, 1, 2),
            Plane::AB => (0, 2, 1),
            Plane::FB => (1, 2, 0),
        }
    }

    pub fn labels(&self) -> (&'static str, &'static str) {
        match self {
            Plane::AF => ("a", "f"),
            Plane::AB => ("a", "b"),
            Plane::FB => ("f", "b"),
        }
    }

    pub fn project(&self, s: &State) -> (f64, f64) {
        let v = s.to_array();
        let (x, y, _) = self.axes();
        (v[x], v[y])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub plane: Plane,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Value of the off-plane coordinate; the equilibrium value when `None`.
    pub fixed: Option<f64>,
    /// RK4 steps of each emitted streamline segment (0 for none).
    pub path_steps: usize,
    pub path_dt: f64,
}

impl GridSpec {
    /// A grid of `n x n` points spanning `half_width` around the equilibrium.
    pub fn around_equilibrium(p: &Params, plane: Plane, half_width: f64, n: usize) -> Self {
        let e = equilibrium(p).state().to_array();
        let (x, y, _) = plane.axes();
        GridSpec {
            plane,
            x_range: (e[x] - half_width, e[x] + half_width),
            y_range: (e[y] - half_width, e[y] + half_width),
            nx: n,
            ny: n,
            fixed: None,
            path_steps: 50,
            path_dt: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSample {
    pub point: State,
    pub derivative: State,
    pub path: Vec<State>,
}

fn lin(range: (f64, f64), n: usize, i: usize) -> f64 {
    if n <= 1 {
        0.5 * (range.0 + range.1)
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}

/// Vector field samples (and short forward streamlines) on a planar grid,
/// row-major with `x` varying fastest.
pub fn streamline_grid(p: &Params, spec: &GridSpec) -> Vec<StreamSample> {
    let (xi, yi, zi) = spec.plane.axes();
    let fixed = spec
        .fixed
        .unwrap_or_else(|| equilibrium(p).state().to_array()[zi]);
    let rhs = |_t: f64, y: &[f64; 3]| vector_field(p, &State::from_array(*y)).to_array();
    let mut out = Vec::with_capacity(spec.nx * spec.ny);
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let mut v = [0.0; 3];
            v[xi] = lin(spec.x_range, spec.nx, i);
            v[yi] = lin(spec.y_range, spec.ny, j);
            v[zi] = fixed;
            let point = State::from_array(v);
            let mut path = Vec::with_capacity(spec.path_steps + 1);
            if spec.path_steps > 0 {
                path.push(point);
                let mut y = v;
                for k in 0..spec.path_steps {
                    y = rk4_step(&rhs, k as f64 * spec.path_dt, &y, spec.path_dt);
                    if !y.iter().all(|c| c.is_finite()) {
                        break;
                    }
                    path.push(State::from_array(y));
                }
            }
            out.push(StreamSample {
                point,
                derivative: vector_field(p, &point),
                path,
            });
        }
    }
    out
}
