//! CSV encodings of trajectories and sweep rows.
//!
//! Numbers are written with 17 significant digits, so every value re-parses
//! to the identical `f64`.

use std::io::{self, Write};

use crate::atlas::SweepRow;
use crate::feedback::AugmentedState;
use crate::model::State;
use crate::simulate::Trajectory;

pub const TRAJECTORY_HEADER: &str = "t,a,f,b";
pub const AUGMENTED_HEADER: &str = "t,x1,re_x2,im_x2,re_x3,im_x3,omega";
pub const SWEEP_HEADER: &str = "alpha,beta,gamma,zeta,eta,theta,f0,laco1,laco2_lower,laco2_upper,regime,eig1_re,eig1_im,eig2_re,eig2_im,eig3_re,eig3_im";

/// Formats with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_events<S, W: Write>(traj: &Trajectory<S>, out: &mut W) -> io::Result<()> {
    for e in &traj.events {
        writeln!(out, "# event,{},{}", e.kind, num(e.time))?;
    }
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory<State>, out: &mut W) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        writeln!(out, "{},{},{},{}", num(*t), num(s.a), num(s.f), num(s.b))?;
    }
    write_events(traj, out)
}

pub fn write_augmented_csv<W: Write>(
    traj: &Trajectory<AugmentedState>,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "{AUGMENTED_HEADER}")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let row: Vec<String> = std::iter::once(*t).chain(s.to_array()).map(num).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    write_events(traj, out)
}

pub fn write_sweep_header<W: Write>(out: &mut W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")
}

pub fn write_sweep_row<W: Write>(row: &SweepRow, out: &mut W) -> io::Result<()> {
    let p = &row.params;
    let mut cells: Vec<String> = [p.alpha, p.beta, p.gamma, p.zeta, p.eta, p.theta, p.f0]
        .into_iter()
        .map(num)
        .collect();
    let fz = &row.feasibility;
    cells.extend(
        [fz.laco1_holds, fz.laco2_lower_holds, fz.laco2_upper_holds].map(|b| b.to_string()),
    );
    cells.push(row.verdict.regime.as_str().to_string());
    for z in row.verdict.eigenvalues.to_complex() {
        cells.push(num(z.re));
        cells.push(num(z.im));
    }
    writeln!(out, "{}", cells.join(","))
}

/// Parsed contents of a model trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// `(kind, time)` from the event comment lines.
    pub events: Vec<(String, f64)>,
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn read_trajectory_csv(text: &str) -> io::Result<ParsedTrajectory> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRAJECTORY_HEADER => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let mut parsed = ParsedTrajectory {
        times: Vec::new(),
        states: Vec::new(),
        events: Vec::new(),
    };
    for line in lines {
        if let Some(rest) = line.strip_prefix("# event,") {
            let (kind, t) = rest
                .rsplit_once(',')
                .ok_or_else(|| bad(format!("malformed event line `{line}`")))?;
            let t: f64 = t
                .parse()
                .map_err(|_| bad(format!("bad event time in `{line}`")))?;
            parsed.events.push((kind.to_string(), t));
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(format!("bad row `{line}`")))?;
        if vals.len() != 4 {
            return Err(bad(format!("expected 4 columns in `{line}`")));
        }
        parsed.times.push(vals[0]);
        parsed.states.push(State::new(vals[1], vals[2], vals[3]));
    }
    Ok(parsed)
}
