use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn rpdqs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpdqs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn sidecar(dir: &Path, stem: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json"))).unwrap()).unwrap()
}

const COARSE: [&str; 4] = ["--set", "dt=0.01", "--set", "theta_grid.count=9"];

#[test]
fn population_csv_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rpdqs(
        tmp.path(),
        &["population", "--output", "o", "--set", "dt=0.01"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("o/population.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "time_us,population_raw,population_decayed");
    assert_eq!(lines[1], "0.00000000e0,1.00000000e0,1.00000000e0");
    assert_eq!(lines.len(), 102);
    assert!(!csv.contains('\r'));
}

#[test]
fn sidecar_echoes_config_and_hashes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["yield-sweep", "--output", "o"];
    args.extend(COARSE);
    assert_eq!(code(&rpdqs(tmp.path(), &args)), 0);
    let meta = sidecar(&tmp.path().join("o"), "yield_sweep");
    let csv = fs::read(tmp.path().join("o/yield_sweep.csv")).unwrap();
    let hash: String = Sha256::digest(&csv)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    assert_eq!(meta["content_hash"], hash.as_str());
    assert_eq!(meta["config"]["theta_grid"]["count"], 9);
    // defaults are filled in
    assert_eq!(meta["config"]["system"]["field_mt"], 0.05);
    assert_eq!(meta["config"]["trotter_steps"], 15);
    assert!(meta["config_hash"].as_str().unwrap().len() == 64);
    assert!(meta["anisotropy"].as_str().unwrap().parse::<f64>().unwrap() > 0.0);
}

#[test]
fn single_angle_grid_has_zero_anisotropy() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rpdqs(
        tmp.path(),
        &[
            "yield-sweep",
            "--output",
            "o",
            "--set",
            "dt=0.01",
            "--set",
            "theta_grid.count=1",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        sidecar(&tmp.path().join("o"), "yield_sweep")["anisotropy"],
        "0.00000000e0"
    );
}

#[test]
fn sampled_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b", "c"] {
        let seed = if dir == "c" { "8" } else { "7" };
        let o = rpdqs(
            tmp.path(),
            &[
                "population",
                "--output",
                dir,
                "--seed",
                seed,
                "--threads",
                "2",
                "--set",
                "dt=0.01",
                "--set",
                "shots=500",
                "--set",
                "mode=statevector",
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |d: &str, f: &str| fs::read(tmp.path().join(d).join(f)).unwrap();
    assert_eq!(read("a", "population.csv"), read("b", "population.csv"));
    assert_eq!(read("a", "population.json"), read("b", "population.json"));
    assert_ne!(read("a", "population.csv"), read("c", "population.csv"));
}

#[test]
fn config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("exp.toml"),
        "mode = \"statevector\"\ntrotter_steps = 3\ndt = 0.02\noutput = \"from_file\"\n\n[system]\nfield_mt = 0.1\n",
    )
    .unwrap();
    let o = rpdqs(
        tmp.path(),
        &[
            "population",
            "--config",
            "exp.toml",
            "--set",
            "trotter_steps=4",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = sidecar(&tmp.path().join("from_file"), "population");
    assert_eq!(meta["config"]["trotter_steps"], 4);
    assert_eq!(meta["config"]["system"]["field_mt"], 0.1);
    assert_eq!(meta["config"]["mode"], "statevector");
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    for (args, needle) in [
        (vec!["population", "--set", "t_max=0"], "t_max"),
        (vec!["population", "--set", "dt=-1"], "dt"),
        (vec!["population", "--set", "noise.enabled=true"], "mode"),
        (vec!["population", "--set", "nosuch=1"], "nosuch"),
        (
            vec!["population", "--config", "missing.toml"],
            "missing.toml",
        ),
        (vec!["trotter-sweep", "--n-list", "0"], "n-list"),
        (vec!["population", "--threads", "0"], "threads"),
    ] {
        let o = rpdqs(tmp.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{args:?}: {err}");
    }
    assert_eq!(code(&rpdqs(tmp.path(), &["no-such-command"])), 2);
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("blocker"), "").unwrap();
    let o = rpdqs(
        tmp.path(),
        &["population", "--set", "dt=0.1", "--output", "blocker/sub"],
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn sweeps_write_expected_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let run = |args: &[&str]| {
        let o = rpdqs(dir, args);
        assert_eq!(
            code(&o),
            0,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    };
    run(&[
        "trotter-sweep",
        "--n-list",
        "1",
        "--output",
        "o",
        "--set",
        "dt=0.01",
    ]);
    assert!(fs::read_to_string(dir.join("o/trotter_sweep.csv"))
        .unwrap()
        .starts_with("n,yield_noiseless\n1,"));

    run(&[
        "trotter-sweep",
        "--n-list",
        "1..2",
        "--noisy",
        "--output",
        "o",
        "--set",
        "dt=0.05",
    ]);
    let csv = fs::read_to_string(dir.join("o/trotter_sweep.csv")).unwrap();
    assert!(csv.starts_with("n,yield_noiseless,yield_noisy\n"));
    assert_eq!(csv.lines().count(), 3);

    run(&[
        "rate-sweep",
        "--k-list",
        "1,100",
        "--output",
        "o",
        "--set",
        "dt=0.01",
    ]);
    let csv = fs::read_to_string(dir.join("o/rate_sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "k_MHz,yield");
    let fast: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!(fast > 0.95);

    run(&[
        "shot-sweep",
        "--shot-list",
        "1,100",
        "--output",
        "o",
        "--set",
        "dt=0.05",
        "--set",
        "mode=statevector",
    ]);
    assert!(fs::read_to_string(dir.join("o/shot_sweep.csv"))
        .unwrap()
        .starts_with("shots,rms_error\n1,"));
}

#[test]
fn rate_sweep_at_unit_rate_matches_yield_sweep_point() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let grid = [
        "--set",
        "theta_grid.values=[1.5707963267948966]",
        "--set",
        "dt=0.01",
        "--output",
        "o",
    ];
    let mut a = vec!["yield-sweep"];
    a.extend(grid);
    assert_eq!(code(&rpdqs(dir, &a)), 0);
    let mut b = vec!["rate-sweep", "--k-list", "1"];
    b.extend(grid);
    assert_eq!(code(&rpdqs(dir, &b)), 0);
    let y1 = fs::read_to_string(dir.join("o/yield_sweep.csv")).unwrap();
    let y2 = fs::read_to_string(dir.join("o/rate_sweep.csv")).unwrap();
    assert_eq!(
        y1.lines().nth(1).unwrap().split(',').nth(1),
        y2.lines().nth(1).unwrap().split(',').nth(1)
    );
}

#[test]
fn fit_against_itself_and_mismatched_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let mut args = vec!["yield-sweep", "--output", "a"];
    args.extend(COARSE);
    assert_eq!(code(&rpdqs(dir, &args)), 0);
    let o = rpdqs(
        dir,
        &[
            "fit",
            "a/yield_sweep.csv",
            "a/yield_sweep.csv",
            "--output",
            "f",
        ],
    );
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("a 1.00000000e0"));
    assert!(stdout.contains("b 0.00000000e0"));
    assert!(stdout.contains("r 1.00000000e0"));

    let args = [
        "yield-sweep",
        "--output",
        "b",
        "--set",
        "dt=0.01",
        "--set",
        "theta_grid.count=5",
    ];
    assert_eq!(code(&rpdqs(dir, &args)), 0);
    assert_eq!(
        code(&rpdqs(
            dir,
            &["fit", "a/yield_sweep.csv", "b/yield_sweep.csv"]
        )),
        2
    );
}

#[test]
fn dump_circuit_reproduces_gate_census() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rpdqs(
        tmp.path(),
        &[
            "dump-circuit",
            "--lowered",
            "--set",
            "theta=0.7853981633974483",
            "--set",
            "trotter_steps=3",
            "--output",
            "o",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("gates 171 (trotter 165)"));
    let text = fs::read_to_string(tmp.path().join("o/circuit.txt")).unwrap();
    assert!(text.starts_with("# qubits=3\n# steps=3\n"));

    let o = rpdqs(
        tmp.path(),
        &[
            "dump-circuit",
            "--lowered",
            "--prune-all-zero",
            "--set",
            "trotter_steps=1",
            "--output",
            "o",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(
        String::from_utf8_lossy(&o.stdout).starts_with("gates 27 (trotter 21)"),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
}

#[test]
fn tail_extension_raises_yield() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "rate-sweep",
        "--k-list",
        "1",
        "--set",
        "dt=0.01",
        "--output",
    ];
    let mut a = args.to_vec();
    a.push("a");
    let mut b = args.to_vec();
    b.extend(["b", "--tail", "extend"]);
    assert_eq!(code(&rpdqs(tmp.path(), &a)), 0);
    assert_eq!(code(&rpdqs(tmp.path(), &b)), 0);
    let y = |d: &str| -> f64 {
        let csv = fs::read_to_string(tmp.path().join(d).join("rate_sweep.csv")).unwrap();
        csv.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(y("b") > y("a") + 0.1);
    assert_eq!(
        sidecar(&tmp.path().join("b"), "rate_sweep")["config"]["tail"],
        "extend"
    );
}
