use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnls")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SYS1: &str = r#"
system = "sys1"
seed = 4
out = "unused"
chi = 0.8

[generator]
theta = 0.9
psi = 2.1

[grid]
n = 64
length = 6.283185307179586

[evolution]
dt = 0.001
t_final = 0.1
snapshot_stride = 20

[initial]
family = "random"
amplitude = 0.3
modes = 3
"#;

const PLANE_WAVE: &str = r#"
system = "nls"
seed = 0
out = "unused"
chi = 0.5

[grid]
n = 256
length = 6.283185307179586

[evolution]
dt = 0.001
t_final = 1.0
snapshot_stride = 100

[initial]
family = "plane-wave"
amplitude = 1.0
mode = 1
"#;

#[test]
fn identical_seeds_give_identical_monitors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", SYS1);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let o = qnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ma = fs::read(a.join("monitors.csv")).unwrap();
    assert_eq!(ma, fs::read(b.join("monitors.csv")).unwrap());
    assert_eq!(fs::read_dir(a.join("snapshots")).unwrap().count(), 6);

    let c = tmp.path().join("c");
    let o = qnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", c.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(code(&o), 0);
    assert_ne!(ma, fs::read(c.join("monitors.csv")).unwrap());
}

#[test]
fn written_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", SYS1);
    let a = tmp.path().join("a");
    assert_eq!(code(&qnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()])), 0);
    let saved = fs::read_to_string(a.join("config.toml")).unwrap();
    let b = tmp.path().join("b");
    let again = a.join("config.toml");
    assert_eq!(code(&qnls(&["simulate", "--config", again.to_str().unwrap(), "--out", b.to_str().unwrap()])), 0);
    let mut reparsed = fs::read_to_string(b.join("config.toml")).unwrap();
    reparsed = reparsed.replace(b.to_str().unwrap(), a.to_str().unwrap());
    assert_eq!(saved, reparsed);
    assert_eq!(fs::read(a.join("monitors.csv")).unwrap(), fs::read(b.join("monitors.csv")).unwrap());
}

#[test]
fn plane_wave_hamiltonian_is_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "pw.toml", PLANE_WAVE);
    let out = tmp.path().join("pw");
    assert_eq!(code(&qnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    let mut rdr = csv::Reader::from_path(out.join("monitors.csv")).unwrap();
    let col = rdr.headers().unwrap().iter().position(|h| h == "hamiltonian").unwrap();
    let h: Vec<f64> = rdr.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
    assert_eq!(h.len(), 11);
    // u = e^{ix} on [0, 2π): ∫Im(ū_x u) = −2π.
    assert!((h[0] + std::f64::consts::TAU).abs() < 1e-12);
    assert!(h.iter().all(|x| (x - h[0]).abs() < 1e-10));
}

#[test]
fn bad_grid_size_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", &SYS1.replace("n = 64", "n = 48"));
    let o = qnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("power of two"));

    let o = qnls(&["simulate", "--config", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let garbled = write(tmp.path(), "garbled.toml", "system = [");
    assert_eq!(code(&qnls(&["simulate", "--config", garbled.to_str().unwrap()])), 2);
}

#[test]
fn blowup_exits_3_with_error_json() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SYS1
        .replace("system = \"sys1\"", "system = \"sys2\"")
        .replace("amplitude = 0.3", "amplitude = 4.0\nv_amplitude = 1.0")
        .replace("dt = 0.001\nt_final = 0.1\nsnapshot_stride = 20", "dt = 0.2\nt_final = 50.0\nsnapshot_stride = 1000\nscheme = \"rk4\"");
    let cfg = write(tmp.path(), "blow.toml", &text);
    let out = tmp.path().join("blow");
    let o = qnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let e = json(&out.join("error.json"));
    assert_eq!(e["kind"], "blowup");
}

fn sweep_config(axes: &str, out: &Path) -> String {
    let template = SYS1.replace("\n[", "\n[template.");
    format!("out = {:?}\n\n[axes]\n{axes}\n\n[template]{template}", out.to_str().unwrap())
}

#[test]
fn four_by_four_sweep_conserves_hamiltonian() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let text = sweep_config("theta = [0.0, 0.8, 1.6, 2.4]\npsi = [0.0, 1.5, 3.0, 4.5]", &out);
    let cfg = write(tmp.path(), "sweep.toml", &text);
    let o = qnls(&["sweep", "--config", cfg.to_str().unwrap(), "--jobs", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let (st, dr) = (h.iter().position(|x| x == "status").unwrap(), h.iter().position(|x| x == "hamiltonian_drift").unwrap());
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 16);
    for r in &rows {
        assert_eq!(&r[st], "ok");
        assert!(r[dr].parse::<f64>().unwrap() < 1e-6);
    }
    let rep = qnls(&["report", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&rep), 0);
    assert_eq!(json(&out.join("report.json"))["rows"], 16);
}

#[test]
fn empty_sweep_writes_empty_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let cfg = write(tmp.path(), "sweep.toml", &sweep_config("theta = []", &out));
    assert_eq!(code(&qnls(&["sweep", "--config", cfg.to_str().unwrap()])), 0);
    assert!(fs::read_to_string(out.join("summary.csv")).unwrap().is_empty());
}

#[test]
fn divergent_cell_is_isolated() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let text = sweep_config("dt = [0.001, 0.5]", &out).replace("t_final = 0.1", "t_final = 20.0\nscheme = \"rk4\"");
    let text = text.replace("snapshot_stride = 20", "snapshot_stride = 20000");
    let cfg = write(tmp.path(), "sweep.toml", &text);
    let o = qnls(&["sweep", "--config", cfg.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let st = rdr.headers().unwrap().iter().position(|x| x == "status").unwrap();
    let status: Vec<String> = rdr.records().map(|r| r.unwrap()[st].to_string()).collect();
    assert_eq!(status, ["ok", "blowup"]);
}

#[test]
fn verify_suites_pass_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    for suite in ["algebra", "operators", "laxpair", "geometry"] {
        let out = tmp.path().join(suite);
        let o = qnls(&["verify", "--suite", suite, "--seed", "2", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{suite}: {}", String::from_utf8_lossy(&o.stdout));
        let rep = json(&out.join("verify.json"));
        assert_eq!(rep["pass"], true);
        for c in rep["checks"].as_array().unwrap() {
            for key in ["name", "samples", "max_residual", "tolerance", "pass"] {
                assert!(c.get(key).is_some());
            }
        }
    }
}

#[test]
fn reconstructed_structures_satisfy_their_properties() {
    let tmp = tempfile::tempdir().unwrap();
    for (case, dim) in [("su4sp2", 5), ("so6u3", 6)] {
        let out = tmp.path().join(case);
        let text = format!(
            "case = \"{case}\"\nseed = 3\nout = {:?}\nn = 64\n\n[generator]\ntheta = 0.6\npsi = 2.4\n\n\
             [curve]\nshape = \"random\"\nlength = 6.283185307179586\nmodes = 4\nwobble = 0.6\n",
            out.to_str().unwrap()
        );
        let cfg = write(tmp.path(), &format!("{case}.toml"), &text);
        let o = qnls(&["reconstruct-curve", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let rep = json(&out.join("report.json"));
        for key in ["annihilation", "square", "hermitian", "skew"] {
            assert!(rep["structure"][key].as_f64().unwrap() < 1e-8, "{case} {key}");
        }
        let bin = fs::read(out.join("structure.bin")).unwrap();
        assert_eq!(bin.len(), 16 + 64 * dim * dim * 8);
    }
}

#[test]
fn report_resummarizes_a_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", SYS1);
    let out = tmp.path().join("run");
    assert_eq!(code(&qnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    let before = json(&out.join("summary.json"));
    assert_eq!(code(&qnls(&["report", "--out", out.to_str().unwrap()])), 0);
    let after = json(&out.join("report.json"));
    assert_eq!(after["kind"], "trajectory");
    assert_eq!(after["conservation"], before["conservation"]);
    assert_eq!(code(&qnls(&["report", "--out", tmp.path().to_str().unwrap()])), 1);
}
