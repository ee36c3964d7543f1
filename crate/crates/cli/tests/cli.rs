use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BENCHMARK: [&str; 12] = [
    "--alpha", "1", "--beta", "1", "--gamma", "1", "--zeta", "2.5", "--eta", "1", "--f0", "1",
];

fn burnstab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burnstab"))
        .args(args)
        .env("BURNSTAB_OUT", out)
        .output()
        .expect("binary runs")
}

fn with_benchmark<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut v: Vec<&str> = extra.to_vec();
    v.extend(BENCHMARK);
    v
}

fn json_ok(out: Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn equilibrium_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(burnstab(
        &with_benchmark(&["equilibrium", "--theta", "-0.1"]),
        dir.path(),
    ));
    assert_eq!(v["a_star"], 0.4);
    assert_eq!(v["f_star"], 1.0);
    assert!((v["b_star"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    for k in ["laco1_holds", "laco2_lower_holds", "laco2_upper_holds"] {
        assert_eq!(v["feasibility"][k], true);
    }
}

#[test]
fn params_file_matches_flags_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let from_flags = json_ok(burnstab(
        &with_benchmark(&["classify", "--theta", "-0.1"]),
        dir.path(),
    ));
    let file = dir.path().join("p.json");
    fs::write(&file, serde_json::to_string(&from_flags["params"]).unwrap()).unwrap();
    let from_file = json_ok(burnstab(
        &["classify", "--params", file.to_str().unwrap()],
        dir.path(),
    ));
    assert_eq!(from_flags, from_file);
}

#[test]
fn missing_or_conflicting_params_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = burnstab(&["equilibrium", "--alpha", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--help"));

    let file = dir.path().join("p.json");
    fs::write(&file, "{}").unwrap();
    let out = burnstab(
        &[
            "equilibrium",
            "--params",
            file.to_str().unwrap(),
            "--alpha",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    let out = burnstab(
        &with_benchmark(&["equilibrium", "--theta", "0"]),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    let out = burnstab(&["no-such-command"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let regime = |extra: &[&str]| {
        let v = json_ok(burnstab(
            &with_benchmark(&[&["classify"], extra].concat()),
            dir.path(),
        ));
        v["regime"].as_str().unwrap().to_string()
    };
    assert!(regime(&["--vartheta", "0.1"]).starts_with("ProactiveStable_"));
    assert_eq!(regime(&["--vartheta", "20"]), "ProactiveUnstable_Focus");
    assert_eq!(regime(&["--vartheta", "9"]), "HopfCritical");
    assert!(regime(&["--theta", "1"]).starts_with("ReactiveUnstable_"));
}

#[test]
fn crossing_experiment_writes_event_line() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(burnstab(
        &with_benchmark(&[
            "simulate",
            "--crossing-experiment",
            "--a0",
            "0.5",
            "--theta",
            "1",
            "--t-end",
            "1",
        ]),
        dir.path(),
    ));
    assert_eq!(v["crossing_inside_unit_square"], true);
    let csv = fs::read_to_string(dir.path().join("crossing.csv")).unwrap();
    assert!(csv.starts_with("t,a,f,b\n"));
    assert!(csv.lines().any(|l| l.starts_with("# event,BCrossesA,")));
}

#[test]
fn ensemble_contracts_and_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = with_benchmark(&[
        "ensemble",
        "--n",
        "100",
        "--amplitude",
        "1e-4",
        "--vartheta",
        "0.1",
        "--seed",
        "11",
    ]);
    let va = json_ok(burnstab(&args, a.path()));
    assert_eq!(va["summary"]["contracted"], 100);
    assert_eq!(va["invariance_violations"], 0);

    let ens = a.path().join("ensemble");
    let csvs = fs::read_dir(&ens)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "csv")
        })
        .count();
    assert_eq!(csvs, 100);
    assert!(ens.join("summary.json").exists());

    // Same seed, SVG on: identical numbers.
    let mut with_svg = args.clone();
    with_svg.push("--svg");
    json_ok(burnstab(&with_svg, b.path()));
    for name in ["member_000.csv", "member_057.csv", "member_099.csv"] {
        assert_eq!(
            fs::read(ens.join(name)).unwrap(),
            fs::read(b.path().join("ensemble").join(name)).unwrap()
        );
    }
    assert!(b.path().join("ensemble/ensemble.svg").exists());
}

#[test]
fn unstable_ensemble_expands() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(burnstab(
        &with_benchmark(&["ensemble", "--n", "10", "--vartheta", "20"]),
        dir.path(),
    ));
    assert_eq!(v["summary"]["expanded_tenfold"], 10);
}

#[test]
fn feedback_design_stabilizes() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(burnstab(
        &with_benchmark(&["feedback-design", "--theta", "1", "--simulate"]),
        dir.path(),
    ));
    let eig = v["closed_loop_eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 4);
    assert!(eig.iter().all(|z| z[0].as_f64().unwrap() < 0.0));
    assert!(v["closed_loop_final_deviation"].as_f64().unwrap() < 1e-6);
    assert!(v["open_loop_max_deviation"].as_f64().unwrap() > 0.1);
    let csv = fs::read_to_string(dir.path().join("closed_loop.csv")).unwrap();
    assert!(csv.starts_with("t,x1,re_x2,im_x2,re_x3,im_x3,omega\n"));

    let out = burnstab(
        &with_benchmark(&["feedback-design", "--vartheta", "1"]),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn integration_failure_exits_3_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = burnstab(
        &with_benchmark(&["simulate", "--theta", "1", "--init", "nan,1,0"]),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn out_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    json_ok(burnstab(
        &with_benchmark(&[
            "simulate",
            "--theta",
            "-0.1",
            "--t-end",
            "1",
            "--out",
            flag_dir.path().to_str().unwrap(),
        ]),
        env_dir.path(),
    ));
    assert!(flag_dir.path().join("trajectory.csv").exists());
    assert!(!env_dir.path().join("trajectory.csv").exists());
}

#[test]
fn rk4_method_flag() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(burnstab(
        &with_benchmark(&[
            "simulate",
            "--theta",
            "-0.1",
            "--init",
            "0.45,1,0.2",
            "--method",
            "rk4",
            "--step",
            "0.1",
            "--t-end",
            "1",
        ]),
        dir.path(),
    ));
    assert_eq!(v["samples"], 11);
}

#[test]
fn sweep_hopf_and_family() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(burnstab(
        &with_benchmark(&["sweep", "--theta", "-1", "--axis", "vartheta:0.5:19.5:20"]),
        dir.path(),
    ));
    assert_eq!(v["points"], 20);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
    assert!(csv.contains("ProactiveUnstable_Focus"));

    let v = json_ok(burnstab(
        &with_benchmark(&[
            "hopf", "--theta", "-1", "--free", "vartheta", "--lo", "0.1", "--hi", "20",
        ]),
        dir.path(),
    ));
    assert!((v["roots"][0].as_f64().unwrap() - 9.0).abs() < 1e-9);

    for (branch, sign) in [
        ("large-alpha", "PositiveDisc"),
        ("small-c", "NegativeDisc"),
        ("small-alpha", "NegativeDisc"),
    ] {
        let v = json_ok(burnstab(&["family", "--branch", branch], dir.path()));
        assert_eq!(v["sign"], sign, "{branch}");
    }
}

#[test]
fn streamlines_grid() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(burnstab(
        &with_benchmark(&[
            "streamlines",
            "--vartheta",
            "0.1",
            "--plane",
            "ab",
            "--n",
            "5",
            "--svg",
        ]),
        dir.path(),
    ));
    assert_eq!(v["samples"], 25);
    let csv = fs::read_to_string(dir.path().join("streamlines.csv")).unwrap();
    assert_eq!(csv.lines().count(), 26);
    assert!(dir.path().join("streamlines.svg").exists());
}
