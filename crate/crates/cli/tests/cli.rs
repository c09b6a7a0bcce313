use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ader(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ader")).args(args).output().expect("spawn ader")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn small_sod(dir: &Path) -> Output {
    ader(&[
        "run",
        "--problem",
        "sod",
        "--degree",
        "1",
        "--nx",
        "40",
        "-o",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn run_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = small_sod(tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("problem = sod"));
    assert!(text.contains("cells = 40"));
    for f in ["config.ini", "report.txt", "profile_0000.dat", "snapshot_0000.dat"] {
        assert!(tmp.path().join(f).exists(), "missing {f}");
    }
}

#[test]
fn saved_config_reproduces_the_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&small_sod(a.path())), 0);
    let cfg = a.path().join("config.ini");
    let out = ader(&["run", cfg.to_str().unwrap(), "-o", b.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let pa = fs::read_to_string(a.path().join("profile_0000.dat")).unwrap();
    let pb = fs::read_to_string(b.path().join("profile_0000.dat")).unwrap();
    assert_eq!(pa, pb);
    let ra = fs::read_to_string(a.path().join("report.txt")).unwrap();
    let rb = fs::read_to_string(b.path().join("report.txt")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn set_overrides_configuration_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ader(&[
        "run",
        "--problem",
        "sod",
        "--set",
        "scheme.degree=1",
        "--set",
        "grid.nx=30",
        "--set",
        "run.max_steps=3",
        "-o",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("cells = 30"));
    assert!(text.contains("steps = 3"));
}

#[test]
fn configuration_errors_exit_with_2() {
    assert_eq!(code(&ader(&["run", "--problem", "nope"])), 2);
    assert_eq!(code(&ader(&["run", "--problem", "sod", "--set", "scheme.colour=red"])), 2);
    assert_eq!(code(&ader(&["run", "--problem", "sod", "--set", "grid.nx"])), 2);
    assert_eq!(code(&ader(&["run", "--problem", "sod", "--flux", "hllc"])), 2);
    assert_eq!(code(&ader(&["run"])), 2);
}

#[test]
fn predictor_failure_exits_with_4() {
    let out = ader(&["run", "--problem", "rhd-rp1", "--pipeline", "cons", "--nx", "100"]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cell"));
}

#[test]
fn unwritable_output_exits_with_6() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("plain");
    fs::write(&file, "x").unwrap();
    let dir = file.join("sub");
    let out = ader(&[
        "run",
        "--problem",
        "sod",
        "--degree",
        "1",
        "--nx",
        "20",
        "-o",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 6, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exact_riemann_profiles() {
    let out = ader(&["riemann-exact", "--problem", "sod", "--cells", "100"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("# columns: x rho"));
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 100);

    let out = ader(&[
        "riemann-exact",
        "--system",
        "euler",
        "--left",
        "1,0,1",
        "--right",
        "0.125,0,0.1",
        "--time",
        "0.2",
        "--cells",
        "50",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().filter(|l| !l.starts_with('#')).count(), 50);

    let missing_time = ader(&["riemann-exact", "--system", "euler", "--left", "1,0,1", "--right", "0.125,0,0.1"]);
    assert_eq!(code(&missing_time), 2);
    let short_state = ader(&["riemann-exact", "--system", "euler", "--left", "1,0", "--right", "1,0,1", "--time", "0.1"]);
    assert_eq!(code(&short_state), 2);
}

#[test]
fn compare_identical_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    let exact = tmp.path().join("exact.dat");
    let out = ader(&["riemann-exact", "--problem", "sod", "--cells", "80", "-o", exact.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = tmp.path().join("cmp.csv");
    let e = exact.to_str().unwrap();
    let out = ader(&["compare", e, e, "--reference", e, "--variables", "rho,p", "-o", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("variable,run,l1_reference,total_variation,shock_position"));
    let distances: Vec<&str> = text.lines().filter(|l| l.contains(",a-b,")).collect();
    assert_eq!(distances.len(), 2);
    for line in distances {
        let d: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(d, 0.0);
    }
}

#[test]
fn convergence_table() {
    let out = ader(&["convergence", "--problem", "alfven-1d", "--degree", "1", "--grids", "10,20"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("10"));
    assert!(text.contains("20"));
}

#[test]
fn missing_config_file_exits_with_6() {
    assert_eq!(code(&ader(&["run", "/nonexistent/run.ini"])), 6);
}
