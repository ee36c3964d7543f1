//! Parameter sweeps, Hopf-boundary location and witness parameter families
//! for both signs of the characteristic discriminant.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubic::discriminant;
use crate::model::{feasibility, FeasibilityReport, ParamError, Params};
use crate::stability::{characteristic, classify, condition_sides, StabilityVerdict};

pub const DEFAULT_GRID_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtlasError {
    #[error("sweep grid has {points} points, above the cap of {cap}")]
    GridTooLarge { points: u128, cap: usize },
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("no Hopf-critical value of `{free}` in [{lo}, {hi}]")]
    NoRootInInterval { free: ParamName, lo: f64, hi: f64 },
    #[error("family branch {branch:?} with knob {knob} produced discriminant {discriminant} of the wrong sign")]
    BranchConditionUnmet {
        branch: FamilyBranch,
        knob: f64,
        discriminant: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Alpha,
    Beta,
    Gamma,
    Zeta,
    Eta,
    Theta,
    /// Proactive strength, `theta = -vartheta`.
    Vartheta,
    F0,
}

impl ParamName {
    pub const ALL: [ParamName; 8] = [
        ParamName::Alpha,
        ParamName::Beta,
        ParamName::Gamma,
        ParamName::Zeta,
        ParamName::Eta,
        ParamName::Theta,
        ParamName::Vartheta,
        ParamName::F0,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ParamName::Alpha => "alpha",
            ParamName::Beta => "beta",
            ParamName::Gamma => "gamma",
            ParamName::Zeta => "zeta",
            ParamName::Eta => "eta",
            ParamName::Theta => "theta",
            ParamName::Vartheta => "vartheta",
            ParamName::F0 => "f0",
        }
    }

    pub fn set(&self, p: &mut Params, v: f64) {
        match self {
            ParamName::Alpha => p.alpha = v,
            ParamName::Beta => p.beta = v,
            ParamName::Gamma => p.gamma = v,
            ParamName::Zeta => p.zeta = v,
            ParamName::Eta => p.eta = v,
            ParamName::Theta => p.theta = v,
            ParamName::Vartheta => p.theta = -v,
            ParamName::F0 => p.f0 = v,
        }
    }

    pub fn get(&self, p: &Params) -> f64 {
        match self {
            ParamName::Alpha => p.alpha,
            ParamName::Beta => p.beta,
            ParamName::Gamma => p.gamma,
            ParamName::Zeta => p.zeta,
            ParamName::Eta => p.eta,
            ParamName::Theta => p.theta,
            ParamName::Vartheta => -p.theta,
            ParamName::F0 => p.f0,
        }
    }
}

impl std::fmt::Display for ParamName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ParamName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown parameter `{s}`"))
    }
}

/// Inclusive, evenly spaced range of `count` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: ParamName,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            self.from
        } else {
            self.from + (self.to - self.from) * i as f64 / (self.count - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Values of parameters not swept.
    pub base: Params,
    /// Swept axes; the last axis varies fastest.
    pub axes: Vec<Axis>,
    pub cap: usize,
}

impl SweepSpec {
    pub fn new(base: Params, axes: Vec<Axis>) -> Self {
        SweepSpec {
            base,
            axes,
            cap: DEFAULT_GRID_CAP,
        }
    }

    pub fn points(&self) -> u128 {
        self.axes.iter().map(|a| a.count as u128).product()
    }

    fn validate(&self) -> Result<(), AtlasError> {
        for a in &self.axes {
            if a.count == 0 {
                return Err(AtlasError::InvalidSpec(format!(
                    "axis `{}` has zero points",
                    a.param
                )));
            }
            if !(a.from.is_finite() && a.to.is_finite()) {
                return Err(AtlasError::InvalidSpec(format!(
                    "axis `{}` has a non-finite bound",
                    a.param
                )));
            }
        }
        let points = self.points();
        if points > self.cap as u128 {
            return Err(AtlasError::GridTooLarge {
                points,
                cap: self.cap,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: Params,
    pub feasibility: FeasibilityReport,
    pub verdict: StabilityVerdict,
}

/// Lazily evaluated sweep rows in grid order.
pub struct SweepRows<'a> {
    spec: &'a SweepSpec,
    index: u128,
    total: u128,
}

impl Iterator for SweepRows<'_> {
    type Item = Result<SweepRow, AtlasError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.index >= self.total {
            return None;
        }
        let mut rem = self.index;
        self.index += 1;
        let mut p = self.spec.base;
        for axis in self.spec.axes.iter().rev() {
            let i = (rem % axis.count as u128) as usize;
            rem /= axis.count as u128;
            axis.param.set(&mut p, axis.value(i));
        }
        Some(classify_point(p))
    }
}

fn classify_point(p: Params) -> Result<SweepRow, AtlasError> {
    p.validate()?;
    Ok(SweepRow {
        params: p,
        feasibility: feasibility(&p),
        verdict: classify(&p),
    })
}

/// Classifies every grid point. Rows are produced on demand, so large grids
/// can be streamed straight to disk.
pub fn sweep(spec: &SweepSpec) -> Result<SweepRows<'_>, AtlasError> {
    spec.validate()?;
    Ok(SweepRows {
        spec,
        index: 0,
        total: spec.points(),
    })
}

/// `LHS - RHS` of the Hopf-critical equality for a proactive policy.
fn hopf_gap(p: &Params) -> f64 {
    let (lhs, rhs) = condition_sides(p);
    lhs - rhs
}

/// Values of `free` in `[lo, hi]` at which
/// `(alpha f0 + gamma + eta)(2 alpha f0 eta + gamma eta) = beta eta |theta| f0`.
///
/// The interval is scanned on `scan` geometric (or linear, if `lo <= 0`)
/// sub-intervals and each sign change is bisected to 1e-12 relative width.
pub fn hopf_boundary(
    fixed: &Params,
    free: ParamName,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>, AtlasError> {
    hopf_boundary_scan(fixed, free, lo, hi, 256)
}

pub fn hopf_boundary_scan(
    fixed: &Params,
    free: ParamName,
    lo: f64,
    hi: f64,
    scan: usize,
) -> Result<Vec<f64>, AtlasError> {
    if !(lo < hi && lo.is_finite() && hi.is_finite()) || scan == 0 {
        return Err(AtlasError::InvalidSpec(format!(
            "bad search interval [{lo}, {hi}]"
        )));
    }
    let gap_at = |v: f64| {
        let mut p = *fixed;
        free.set(&mut p, v);
        hopf_gap(&p)
    };
    let geometric = lo > 0.0;
    let node = |k: usize| {
        let s = k as f64 / scan as f64;
        if k == scan {
            hi
        } else if geometric {
            lo * (hi / lo).powf(s)
        } else {
            lo + (hi - lo) * s
        }
    };

    let mut roots = Vec::new();
    let mut a = node(0);
    let mut ga = gap_at(a);
    if ga == 0.0 {
        roots.push(a);
    }
    for k in 1..=scan {
        let b = node(k);
        let gb = gap_at(b);
        if gb == 0.0 {
            roots.push(b);
        } else if ga != 0.0 && ga.signum() != gb.signum() {
            let (mut l, mut r, mut gl) = (a, b, ga);
            while (r - l) > 1e-12 * l.abs().max(r.abs()).max(f64::MIN_POSITIVE) {
                let m = 0.5 * (l + r);
                if m <= l || m >= r {
                    break;
                }
                let gm = gap_at(m);
                if gm == 0.0 {
                    l = m;
                    r = m;
                    break;
                }
                if gm.signum() == gl.signum() {
                    l = m;
                    gl = gm;
                } else {
                    r = m;
                }
            }
            roots.push(0.5 * (l + r));
        }
        a = b;
        ga = gb;
    }
    if roots.is_empty() {
        return Err(AtlasError::NoRootInInterval { free, lo, hi });
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyBranch {
    /// `f0 = 1`, `gamma = eta = c alpha`, `zeta = (1 + c) alpha`, `alpha`
    /// large: positive discriminant, viability conditions hold.
    LargeAlphaPositiveDisc,
    /// Same shape with `alpha = 1`, `beta = 1/|theta|`, `theta < 0`, `c`
    /// small: negative discriminant and strict stability condition.
    SmallCNegativeDiscThetaNeg,
    /// Same shape with `theta > 0` and `alpha -> 0`: negative discriminant.
    SmallAlphaNegativeDiscThetaPos,
}

impl FamilyBranch {
    pub fn default_knob(&self) -> f64 {
        match self {
            FamilyBranch::LargeAlphaPositiveDisc => 100.0,
            FamilyBranch::SmallCNegativeDiscThetaNeg => 0.01,
            FamilyBranch::SmallAlphaNegativeDiscThetaPos => 1e-3,
        }
    }

    pub fn expected_sign(&self) -> DiscSign {
        match self {
            FamilyBranch::LargeAlphaPositiveDisc => DiscSign::PositiveDisc,
            _ => DiscSign::NegativeDisc,
        }
    }
}

impl std::str::FromStr for FamilyBranch {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "large-alpha" | "LargeAlphaPositiveDisc" => Ok(FamilyBranch::LargeAlphaPositiveDisc),
            "small-c" | "SmallCNegativeDisc_ThetaNeg" => {
                Ok(FamilyBranch::SmallCNegativeDiscThetaNeg)
            }
            "small-alpha" | "SmallAlphaNegativeDisc_ThetaPos" => {
                Ok(FamilyBranch::SmallAlphaNegativeDiscThetaPos)
            }
            _ => Err(format!(
                "unknown branch `{s}` (expected large-alpha, small-c or small-alpha)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscSign {
    PositiveDisc,
    NegativeDisc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub params: Params,
    pub discriminant: f64,
    pub branch: DiscSign,
}

/// Shape shared by all branches: `f0 = 1`, `gamma = eta = c alpha`,
/// `zeta = (1 + c) alpha`.
fn family_params(alpha: f64, beta: f64, c: f64, theta: f64) -> Result<Params, ParamError> {
    Params::new(
        alpha,
        beta,
        c * alpha,
        (1.0 + c) * alpha,
        c * alpha,
        theta,
        1.0,
    )
}

/// Default `c` for the large-`alpha` branch.
pub const LARGE_ALPHA_C: f64 = 0.1;

/// A parameter point from the given branch. `knob` is `alpha` for the two
/// `alpha` branches and `c` for the small-`c` branch; `theta` must be
/// negative for the small-`c` branch and positive for the small-`alpha`
/// branch, and may have either sign for the large-`alpha` branch.
pub fn lemma_a2_family(
    branch: FamilyBranch,
    knob: f64,
    theta: f64,
) -> Result<FamilyPoint, AtlasError> {
    let params = match branch {
        FamilyBranch::LargeAlphaPositiveDisc => family_params(knob, 1.0, LARGE_ALPHA_C, theta)?,
        FamilyBranch::SmallCNegativeDiscThetaNeg => {
            if theta >= 0.0 {
                return Err(AtlasError::InvalidSpec(
                    "small-c branch needs theta < 0".into(),
                ));
            }
            family_params(1.0, 1.0 / theta.abs(), knob, theta)?
        }
        FamilyBranch::SmallAlphaNegativeDiscThetaPos => {
            if theta <= 0.0 {
                return Err(AtlasError::InvalidSpec(
                    "small-alpha branch needs theta > 0".into(),
                ));
            }
            family_params(knob, 1.0, 1.0, theta)?
        }
    };
    let disc = discriminant(&characteristic(&params));
    let ok = match branch.expected_sign() {
        DiscSign::PositiveDisc => disc > 0.0,
        DiscSign::NegativeDisc => disc < 0.0,
    };
    if !ok {
        return Err(AtlasError::BranchConditionUnmet {
            branch,
            knob,
            discriminant: disc,
        });
    }
    Ok(FamilyPoint {
        params,
        discriminant: disc,
        branch: branch.expected_sign(),
    })
}
