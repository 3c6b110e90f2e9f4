use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_blochsim");

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).env_remove("BLOCHSIM_OUT").output().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

const SHORT: &[&str] = &["--set", "plan.t1=12.566370614359172"];

#[test]
fn lists_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["list-presets"], dir.path());
    assert!(out.status.success());
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, ["fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig4a", "fig4b"]);
}

#[test]
fn run_writes_a_bundle_that_reproduces_itself() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "--preset", "fig1a", "--out", "a"];
    args.extend_from_slice(SHORT);
    let out = run(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = dir.path().join("a");
    let pops = read(&a.join("populations.csv"));
    let mut lines = pops.lines();
    assert_eq!(lines.next(), Some("t,n,P"));
    let first_t: Vec<&str> = lines.clone().take_while(|l| l.starts_with("0.0000000000000000e0,")).collect();
    assert_eq!(first_t.len(), 401);
    assert_eq!(
        read(&a.join("observables.csv")).lines().next(),
        Some("t,fidelity,sigma_idx,deltaE,participation")
    );

    let out = run(&["run", "--config", "a/metadata.json", "--out", "b"], dir.path());
    assert!(out.status.success());
    for f in ["populations.csv", "observables.csv", "report.json", "metadata.json"] {
        assert_eq!(read(&a.join(f)), read(&dir.path().join("b").join(f)), "{f}");
    }
}

#[test]
fn overrides_are_echoed_in_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("my.json");
    let dump = run(&["run", "--preset", "fig1a", "--dump-preset"], dir.path());
    assert!(dump.status.success());
    std::fs::write(&cfg, &dump.stdout).unwrap();
    let out = run(
        &["run", "--config", "my.json", "--set", "model.J=0.3", "--set", "plan.t1=1.5707963267948966", "--set", "analysis.revival_probes=[]", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value = serde_json::from_str(&read(&dir.path().join("o/metadata.json"))).unwrap();
    assert_eq!(meta["config"]["model"]["J"], 0.3);
    assert!(meta["scenario_hash"].as_str().unwrap().len() == 64);
    assert!(meta["tool_version"].is_string());
}

#[test]
fn seeded_ensemble_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "run", "--preset", "fig2c", "--seed", "7", "--set", "model.n_fock=60", "--set", "initial.alpha_re=3.0",
        "--set", "ensemble.n_realizations=3", "--set", "plan.t1=10.471975511965978", "--set", "analysis.period=null",
        "--set", "analysis.power_law=null", "--set", "analysis.revival_probes=[5.235987755982989]",
    ];
    for (out, threads) in [("x", "1"), ("y", "2")] {
        let mut a = common.to_vec();
        a.extend(["--out", out, "--threads", threads]);
        let o = run(&a, dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let meta = read(&dir.path().join("x/metadata.json"));
    assert!(meta.contains("\"seeds\": [\n    7,\n    8,\n    9\n  ]"), "{meta}");
    for f in ["populations.csv", "observables.csv", "report.json", "metadata.json"] {
        assert_eq!(read(&dir.path().join("x").join(f)), read(&dir.path().join("y").join(f)), "{f}");
    }
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "--preset", "fig1b"];
    args.extend_from_slice(SHORT);
    let out = Command::new(BIN).args(&args).current_dir(dir.path()).env("BLOCHSIM_OUT", "root").output().unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("root/fig1b/report.json").exists());
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (set, field) in [
        ("model.bogus=1", "model.bogus"),
        ("plan.dt=-1", "plan.dt"),
        ("frames.extra=2", "frames.extra"),
    ] {
        let out = run(&["run", "--preset", "fig1a", "--set", set], dir.path());
        assert_eq!(out.status.code(), Some(2), "{set}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(field), "{set}");
    }
    let out = run(&["run", "--preset", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_abort_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // a probe time that is not on the output grid
    let out = run(
        &["run", "--preset", "fig1a", "--set", "plan.t1=1.5707963267948966", "--set", "analysis.revival_probes=[1.0]"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn oracles_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["oracle", "bessel", "--J", "10", "--omega", "1", "--kmax", "2", "--out", "b.csv"], dir.path());
    assert!(out.status.success());
    let t = read(&dir.path().join("b.csv"));
    let j0: f64 = t.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    // J_0(20)
    assert!((j0 - 0.16702466434058316).abs() < 1e-14);

    let out = run(
        &["oracle", "ho-coherent", "--alpha", "14.142", "--omega", "1", "--Omega", "1.2", "--J", "0.5", "--t1", "31.4", "--points", "5"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 6);

    let out = run(
        &["oracle", "lz-energies", "--omega", "0.5", "--lambda", "1", "--J", "0.2", "--m-max", "2", "--t1", "0.5", "--points", "3"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 3 * 10);

    let out = run(&["oracle", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_without_coupling_is_diabatic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["spectrum", "--preset", "fig4a", "--set", "model.J=0", "--set", "model.n_levels=5", "--t0", "0", "--t1", "1", "--points", "7"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows: std::collections::BTreeMap<(String, usize), [f64; 2]> = Default::default();
    for l in text.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        let slot = rows.entry((f[0].to_string(), f[2].parse().unwrap())).or_default();
        slot[(f[1] == "adiabatic") as usize] = f[3].parse().unwrap();
    }
    assert_eq!(rows.len(), 7 * 10);
    for ([d, a], key) in rows.values().zip(rows.keys()) {
        assert!((d - a).abs() < 1e-12, "{key:?}");
    }
}
