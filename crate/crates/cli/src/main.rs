mod plot;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use burnstab::atlas::{
    hopf_boundary, lemma_a2_family, sweep, AtlasError, Axis, FamilyBranch, ParamName, SweepSpec,
    DEFAULT_GRID_CAP,
};
use burnstab::feedback::{feedback_design, ClosedLoop, FeedbackDesign, DEFAULT_MARGIN};
use burnstab::io::{
    write_augmented_csv, write_sweep_header, write_sweep_row, write_trajectory_csv,
};
use burnstab::simulate::{
    crossing_experiment, ensemble, integrate, invariance_monitor, perturbations, streamline_grid,
    Event, Failure, GridSpec, IntegratorConfig, InvarianceReport, Method, Plane, Trajectory,
};
use burnstab::stability::critical_theta;
use burnstab::{classify, equilibrium, feasibility, Params, State};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use plot::Panel;

/// Equilibrium, stability, feedback and simulation tools for the
/// land / bushfire / prescribed-burning model.
#[derive(Parser, Debug)]
#[command(name = "burnstab", version)]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    zeta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Proactive strength; sets theta = -vartheta.
    #[arg(long, global = true, allow_negative_numbers = true)]
    vartheta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    f0: Option<f64>,
    /// JSON file with keys alpha, beta, gamma, zeta, eta, theta, f0.
    #[arg(long = "params", global = true, value_name = "FILE")]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Rk4,
    Rk45,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Output directory for CSV / SVG files.
    #[arg(
        long,
        global = true,
        env = "BURNSTAB_OUT",
        default_value = "burnstab-out"
    )]
    out: PathBuf,
    /// Also render SVG plots next to the CSV output.
    #[arg(long, global = true)]
    svg: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true, value_enum, default_value = "rk45")]
    method: MethodArg,
    /// Fixed step for rk4.
    #[arg(long, global = true, default_value_t = 0.01)]
    step: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,
    #[arg(long, global = true, default_value_t = 0.5)]
    max_step: f64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Equilibrium and viability window.
    Equilibrium,
    /// Linear stability regime at the equilibrium.
    Classify,
    /// Integrate one trajectory.
    Simulate {
        /// Initial state `a,f,b`; the equilibrium by default.
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 1,
            allow_negative_numbers = true
        )]
        init: Option<Vec<f64>>,
        /// Start from a(0) = b(0) = a0, f(0) = f0 and report b overtaking a.
        #[arg(long)]
        crossing_experiment: bool,
        #[arg(long, requires = "crossing_experiment")]
        a0: Option<f64>,
        /// Stop at the first event.
        #[arg(long)]
        terminate: bool,
    },
    /// Seeded perturbations of the equilibrium.
    Ensemble {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1e-4)]
        amplitude: f64,
    },
    /// Classify a grid of parameter values.
    Sweep {
        /// `name:from:to:count`, repeatable; the last axis varies fastest.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
        cap: usize,
    },
    /// Values of one parameter where the proactive stability condition is an equality.
    Hopf {
        #[arg(long)]
        free: ParamName,
        #[arg(long, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        hi: f64,
    },
    /// Parameter points with a prescribed discriminant sign.
    Family {
        /// large-alpha, small-c or small-alpha.
        #[arg(long)]
        branch: FamilyBranch,
        #[arg(long)]
        knob: Option<f64>,
        #[arg(long = "branch-theta", allow_negative_numbers = true)]
        branch_theta: Option<f64>,
    },
    /// Feedback gains for a reactive policy.
    FeedbackDesign {
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        /// Also integrate the closed and open loops from a seeded perturbation.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 1e-3)]
        amplitude: f64,
    },
    /// Vector field samples and short streamlines on a coordinate plane.
    Streamlines {
        #[arg(long, value_enum, default_value = "af")]
        plane: PlaneArg,
        #[arg(long, default_value_t = 0.2)]
        half_width: f64,
        #[arg(long, default_value_t = 11)]
        n: usize,
        /// Value of the off-plane coordinate; the equilibrium value by default.
        #[arg(long, allow_negative_numbers = true)]
        fixed: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlaneArg {
    Af,
    Ab,
    Fb,
}

impl From<PlaneArg> for Plane {
    fn from(p: PlaneArg) -> Plane {
        match p {
            PlaneArg::Af => Plane::AF,
            PlaneArg::Ab => Plane::AB,
            PlaneArg::Fb => Plane::FB,
        }
    }
}

#[derive(Debug)]
enum CliError {
    /// Bad flags, parameters or output paths.
    Usage(String),
    /// Integration broke down; partial output has been written.
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

impl From<AtlasError> for CliError {
    fn from(e: AtlasError) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult = Result<Value, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl ParamArgs {
    fn any_flag(&self) -> bool {
        [
            self.alpha,
            self.beta,
            self.gamma,
            self.zeta,
            self.eta,
            self.theta,
            self.vartheta,
            self.f0,
        ]
        .iter()
        .any(Option::is_some)
    }

    fn resolve(&self) -> Result<Params, CliError> {
        if self.theta.is_some() && self.vartheta.is_some() {
            return Err(usage("--theta and --vartheta are mutually exclusive"));
        }
        let p = match &self.file {
            Some(path) => {
                if self.any_flag() {
                    return Err(usage(
                        "give parameters either with --params or with individual flags, not both",
                    ));
                }
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<Params>(&text)
                    .map_err(|e| usage(format!("bad parameter file {}: {e}", path.display())))?
            }
            None => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| usage(format!("missing --{name} (or use --params FILE)")))
                };
                let theta = match (self.theta, self.vartheta) {
                    (Some(t), _) => t,
                    (None, Some(v)) => -v,
                    (None, None) => return Err(usage("missing --theta or --vartheta")),
                };
                Params {
                    alpha: need(self.alpha, "alpha")?,
                    beta: need(self.beta, "beta")?,
                    gamma: need(self.gamma, "gamma")?,
                    zeta: need(self.zeta, "zeta")?,
                    eta: need(self.eta, "eta")?,
                    theta,
                    f0: need(self.f0, "f0")?,
                }
            }
        };
        p.validate().map_err(|e| usage(e.to_string()))?;
        Ok(p)
    }
}

impl RunArgs {
    fn integrator(&self, default_t_end: f64) -> Result<IntegratorConfig, CliError> {
        let t_end = self.t_end.unwrap_or(default_t_end);
        let mut cfg = match self.method {
            MethodArg::Rk4 => IntegratorConfig::rk4(self.step, t_end),
            MethodArg::Rk45 => IntegratorConfig::rk45(self.rel_tol, self.abs_tol, t_end),
        };
        if let Method::Rk45Adaptive { max_step, .. } = &mut cfg.method {
            *max_step = self.max_step;
        }
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| usage(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(&self.out)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn write_traj(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = create(path)?;
    write_trajectory_csv(traj, &mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| usage(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes the partial trajectory of a failed run and reports exit code 3.
fn numeric_failure(path: &Path, f: Failure<State>) -> CliError {
    if let Err(e) = write_traj(path, &f.partial) {
        return e;
    }
    CliError::Numeric(format!(
        "{} (partial trajectory up to t = {} written to {})",
        f.error,
        f.partial.final_time(),
        path.display()
    ))
}

fn state_json(s: &State) -> Value {
    json!({ "a": s.a, "f": s.f, "b": s.b })
}

fn events_json(events: &[Event]) -> Value {
    Value::Array(
        events
            .iter()
            .map(|e| json!({ "kind": e.kind.as_str(), "time": e.time, "state": state_json(&e.state_after) }))
            .collect(),
    )
}

/// Phase-plane projections on top, time series below.
fn trajectory_panels(title: &str, members: &[&Trajectory], eq: &State) -> Vec<Panel> {
    let mut panels = Vec::new();
    for plane in [Plane::AF, Plane::AB, Plane::FB] {
        let (x, y) = plane.labels();
        let mut p = Panel::new(format!("{title}: {x}-{y}"), x, y);
        for t in members {
            p.series
                .push(t.states.iter().map(|s| plane.project(s)).collect());
        }
        p.markers.push(plane.project(eq));
        panels.push(p);
    }
    for (i, name) in ["a", "f", "b"].into_iter().enumerate() {
        let mut p = Panel::new(format!("{title}: {name}(t)"), "t", name);
        for t in members {
            p.series.push(
                t.times
                    .iter()
                    .zip(&t.states)
                    .map(|(&time, s)| (time, s.to_array()[i]))
                    .collect(),
            );
        }
        panels.push(p);
    }
    panels
}

fn write_svg(path: &Path, panels: &[Panel], cols: usize) -> Result<(), CliError> {
    fs::write(path, plot::render(panels, cols))
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_equilibrium(p: &Params) -> CliResult {
    let e = equilibrium(p);
    Ok(json!({
        "params": p,
        "a_star": e.a_star,
        "f_star": e.f_star,
        "b_star": e.b_star,
        "feasibility": feasibility(p),
    }))
}

fn cmd_classify(p: &Params) -> CliResult {
    let v = classify(p);
    let mut out = serde_json::to_value(&v).map_err(|e| usage(e.to_string()))?;
    out["params"] = json!(p);
    out["spectrum_consistent"] = json!(v.spectrum_consistent());
    out["critical_vartheta"] = json!(critical_theta(p));
    Ok(out)
}

fn invariance_json(r: &InvarianceReport) -> Value {
    json!({
        "samples_checked": r.samples_checked,
        "precondition_broken_at": r.precondition_broken_at,
        "violation": r.first_violation.map(|v| json!({
            "time": v.time,
            "kind": format!("{:?}", v.kind),
            "precondition_holds": v.precondition_holds,
        })),
    })
}

fn cmd_simulate(
    p: &Params,
    run: &RunArgs,
    init: Option<&[f64]>,
    crossing: bool,
    a0: Option<f64>,
    terminate: bool,
) -> CliResult {
    let mut cfg = run.integrator(if crossing { 10.0 } else { 100.0 })?;
    cfg.terminate_on_event = terminate;
    let dir = run.out_dir()?;
    let eq = equilibrium(p).state();

    let (csv, traj, mut report) = if crossing {
        if init.is_some() {
            return Err(usage(
                "--init cannot be combined with --crossing-experiment",
            ));
        }
        let csv = dir.join("crossing.csv");
        let out = crossing_experiment(p, a0, &cfg).map_err(|f| numeric_failure(&csv, f))?;
        let report = json!({
            "threshold": out.threshold,
            "a0": out.a0,
            "hypothesis_met": out.hypothesis_met,
            "initial_gap_rate": out.initial_gap_rate,
            "crossing": out.crossing.map(|e| json!({
                "time": e.time,
                "state": state_json(&e.state_after),
            })),
            "crossing_inside_unit_square": out.crossing_inside_unit_square(),
        });
        (csv, out.trajectory, report)
    } else {
        let s0 = match init {
            None => eq,
            Some([a, f, b]) => State::new(*a, *f, *b),
            Some(_) => return Err(usage("--init takes exactly three values a,f,b")),
        };
        let csv = dir.join("trajectory.csv");
        let traj = integrate(p, s0, &cfg).map_err(|f| numeric_failure(&csv, f))?;
        (csv, traj, json!({}))
    };
    write_traj(&csv, &traj)?;
    if run.svg {
        let svg = csv.with_extension("svg");
        write_svg(&svg, &trajectory_panels("trajectory", &[&traj], &eq), 3)?;
        report["svg"] = json!(svg);
    }
    report["params"] = json!(p);
    report["csv"] = json!(csv);
    report["samples"] = json!(traj.len());
    report["final_time"] = json!(traj.final_time());
    report["final_state"] = state_json(traj.final_state());
    report["truncated"] = json!(traj.truncated);
    report["events"] = events_json(&traj.events);
    report["invariance"] = invariance_json(&invariance_monitor(&traj));
    Ok(report)
}

fn cmd_ensemble(p: &Params, run: &RunArgs, n: usize, amplitude: f64) -> CliResult {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(usage("--amplitude must be a non-negative number"));
    }
    let cfg = run.integrator(100.0)?;
    let dir = run.out_dir()?.join("ensemble");
    fs::create_dir_all(&dir)?;
    let width = n.saturating_sub(1).to_string().len().max(3);
    let name = |i: usize| dir.join(format!("member_{i:0width$}.csv"));

    let result =
        ensemble(p, n, amplitude, run.seed, &cfg).map_err(|(i, f)| numeric_failure(&name(i), f))?;
    for (i, m) in result.members.iter().enumerate() {
        write_traj(&name(i), m)?;
    }
    let violations = result
        .members
        .iter()
        .map(invariance_monitor)
        .filter(|r| r.first_violation.is_some_and(|v| v.precondition_holds))
        .count();
    let summary = json!({
        "params": p,
        "regime": classify(p).regime,
        "summary": result.summary,
        "invariance_violations": violations,
        "dir": dir,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    if run.svg {
        let members: Vec<&Trajectory> = result.members.iter().collect();
        let eq = equilibrium(p).state();
        write_svg(
            &dir.join("ensemble.svg"),
            &trajectory_panels("ensemble", &members, &eq),
            3,
        )?;
    }
    Ok(summary)
}

fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, from, to, count] = parts[..] else {
        return Err(usage(format!("axis `{s}` is not name:from:to:count")));
    };
    let num = |x: &str| {
        x.parse::<f64>()
            .map_err(|_| usage(format!("bad number `{x}` in axis `{s}`")))
    };
    Ok(Axis {
        param: name.parse().map_err(usage)?,
        from: num(from)?,
        to: num(to)?,
        count: count
            .parse()
            .map_err(|_| usage(format!("bad count `{count}` in axis `{s}`")))?,
    })
}

fn cmd_sweep(p: &Params, run: &RunArgs, axes: &[String], cap: usize) -> CliResult {
    let axes = axes
        .iter()
        .map(|a| parse_axis(a))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec {
        base: *p,
        axes,
        cap,
    };
    let rows = sweep(&spec)?;
    let path = run.out_dir()?.join("sweep.csv");
    let mut w = create(&path)?;
    write_sweep_header(&mut w)?;
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    let mut skipped = 0usize;
    for row in rows {
        match row {
            Ok(row) => {
                write_sweep_row(&row, &mut w)?;
                *counts.entry(row.verdict.regime.as_str()).or_default() += 1;
            }
            // Grid points outside the parameter domain (e.g. theta = 0).
            Err(AtlasError::Param(_)) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    w.flush()?;
    Ok(json!({
        "base": p,
        "points": spec.points() as u64,
        "skipped_invalid": skipped,
        "regimes": counts,
        "csv": path,
    }))
}

fn cmd_hopf(p: &Params, free: ParamName, lo: f64, hi: f64) -> CliResult {
    let roots = hopf_boundary(p, free, lo, hi)?;
    Ok(json!({ "base": p, "free": free, "lo": lo, "hi": hi, "roots": roots }))
}

fn cmd_family(branch: FamilyBranch, knob: Option<f64>, theta: Option<f64>) -> CliResult {
    let theta = theta.unwrap_or(match branch {
        FamilyBranch::SmallCNegativeDiscThetaNeg => -1.0,
        _ => 1.0,
    });
    let knob = knob.unwrap_or(branch.default_knob());
    let pt = lemma_a2_family(branch, knob, theta)?;
    let v = classify(&pt.params);
    Ok(json!({
        "branch": format!("{branch:?}"),
        "knob": knob,
        "params": pt.params,
        "discriminant": pt.discriminant,
        "sign": pt.branch,
        "feasibility": feasibility(&pt.params),
        "regime": v.regime,
        "eigenvalues": v.eigenvalues,
    }))
}

fn cmd_feedback(p: &Params, run: &RunArgs, margin: f64, simulate: bool, amp: f64) -> CliResult {
    let design: FeedbackDesign = feedback_design(p, margin).map_err(|e| usage(e.to_string()))?;
    let mut out = serde_json::to_value(&design).map_err(|e| usage(e.to_string()))?;
    out["params"] = json!(p);
    if !simulate {
        return Ok(out);
    }

    let cfg = run.integrator(200.0)?;
    let dir = run.out_dir()?;
    let cl = ClosedLoop::design(*p, margin).map_err(|e| usage(e.to_string()))?;
    let eq = equilibrium(p).state();
    let s0 = perturbations(p, 1, amp, run.seed)[0];
    let star = cl.equilibrium();
    let x0 = cl.lift(&s0, star.omega);

    let closed_csv = dir.join("closed_loop.csv");
    let closed = match cl.simulate(x0, &cfg) {
        Ok(t) => t,
        Err(f) => {
            let mut w = create(&closed_csv)?;
            write_augmented_csv(&f.partial, &mut w)?;
            w.flush()?;
            return Err(CliError::Numeric(format!("closed loop: {}", f.error)));
        }
    };
    let mut w = create(&closed_csv)?;
    write_augmented_csv(&closed, &mut w)?;
    w.flush()?;

    let open_csv = dir.join("open_loop.csv");
    let open = integrate(p, s0, &cfg).map_err(|f| numeric_failure(&open_csv, f))?;
    write_traj(&open_csv, &open)?;

    let projected = Trajectory {
        times: closed.times.clone(),
        states: closed.states.iter().map(|x| cl.project(x)).collect(),
        events: Vec::new(),
        truncated: closed.truncated,
    };
    if run.svg {
        let mut panels = trajectory_panels("open loop", &[&open], &eq);
        panels.extend(trajectory_panels("closed loop", &[&projected], &eq));
        write_svg(&dir.join("feedback.svg"), &panels, 3)?;
    }
    out["initial_state"] = state_json(&s0);
    out["closed_loop_final_deviation"] = json!(closed.final_state().distance(&star));
    out["open_loop_max_deviation"] = json!(open
        .states
        .iter()
        .map(|s| s.distance(&eq))
        .fold(0.0, f64::max));
    out["open_loop_truncated"] = json!(open.truncated);
    out["closed_csv"] = json!(closed_csv);
    out["open_csv"] = json!(open_csv);
    Ok(out)
}

fn cmd_streamlines(
    p: &Params,
    run: &RunArgs,
    plane: Plane,
    half_width: f64,
    n: usize,
    fixed: Option<f64>,
) -> CliResult {
    if !(half_width > 0.0 && half_width.is_finite()) || n == 0 {
        return Err(usage("--half-width must be positive and --n at least 1"));
    }
    let mut spec = GridSpec::around_equilibrium(p, plane, half_width, n);
    spec.fixed = fixed;
    let samples = streamline_grid(p, &spec);
    let path = run.out_dir()?.join("streamlines.csv");
    let mut w = create(&path)?;
    writeln!(w, "a,f,b,da,df,db")?;
    for s in &samples {
        let cells: Vec<String> = s
            .point
            .to_array()
            .into_iter()
            .chain(s.derivative.to_array())
            .map(burnstab::io::num)
            .collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;

    let mut report = json!({
        "params": p,
        "plane": format!("{plane:?}"),
        "samples": samples.len(),
        "csv": path,
    });
    if run.svg {
        let (x, y) = plane.labels();
        let mut panel = Panel::new(format!("streamlines {x}-{y}"), x, y);
        for s in &samples {
            panel
                .series
                .push(s.path.iter().map(|q| plane.project(q)).collect());
        }
        panel.markers.push(plane.project(&equilibrium(p).state()));
        let svg = path.with_extension("svg");
        write_svg(&svg, &[panel], 1)?;
        report["svg"] = json!(svg);
    }
    Ok(report)
}

fn dispatch(cli: &Cli) -> CliResult {
    let run = &cli.run;
    if let Cmd::Family {
        branch,
        knob,
        branch_theta,
    } = &cli.cmd
    {
        return cmd_family(*branch, *knob, *branch_theta);
    }
    let p = cli.params.resolve()?;
    match &cli.cmd {
        Cmd::Equilibrium => cmd_equilibrium(&p),
        Cmd::Classify => cmd_classify(&p),
        Cmd::Simulate {
            init,
            crossing_experiment,
            a0,
            terminate,
        } => cmd_simulate(
            &p,
            run,
            init.as_deref(),
            *crossing_experiment,
            *a0,
            *terminate,
        ),
        Cmd::Ensemble { n, amplitude } => cmd_ensemble(&p, run, *n, *amplitude),
        Cmd::Sweep { axes, cap } => cmd_sweep(&p, run, axes, *cap),
        Cmd::Hopf { free, lo, hi } => cmd_hopf(&p, *free, *lo, *hi),
        Cmd::FeedbackDesign {
            margin,
            simulate,
            amplitude,
        } => cmd_feedback(&p, run, *margin, *simulate, *amplitude),
        Cmd::Streamlines {
            plane,
            half_width,
            n,
            fixed,
        } => cmd_streamlines(&p, run, (*plane).into(), *half_width, *n, *fixed),
        Cmd::Family { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) => format!("error: {m}\n\nFor more information, try '--help'."),
                CliError::Numeric(m) => format!("numerical failure: {m}"),
            };
            eprintln!("{msg}");
            ExitCode::from(e.code())
        }
    }
}
