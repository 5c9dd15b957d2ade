use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pwl-moments"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn mesh_writes_text_format() {
    let o = run(&["mesh", "--level", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("vertices 18 triangles 32 level 1"));
    assert_eq!(text.lines().count(), 1 + 18 + 32);
}

#[test]
fn study_writes_csv_per_density() {
    let dir = scratch("cli-study");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "density=heaviside1d\nmodels=PMM[4,8]\n").unwrap();
    let out = dir.join("tables");
    let o = run(&[
        "study",
        "--config",
        cfg.to_str().unwrap(),
        "--density",
        "gauss1d,crossingbeams1d",
        "--out",
        out.to_str().unwrap(),
        "--sequential",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for d in ["gauss1d", "crossingbeams1d"] {
        let text = std::fs::read_to_string(out.join(format!("{d}.csv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "model,n,entropy,l1,linf,iterations,time_ns,order");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("PMM,4,mb,") && lines[1].ends_with(','));
        assert!(lines[2].starts_with("PMM,8,mb,") && !lines[2].ends_with(','));
    }
    assert!(!out.join("heaviside1d.csv").exists());
}

#[test]
fn study_to_stdout_and_single_file() {
    let o = run(&["study", "--density", "gauss1d", "--models", "M[1,2]"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("model,n,entropy"));
    let dir = scratch("cli-single");
    let file = dir.join("g.csv");
    let o = run(&["study", "--density", "gauss1d", "--models", "HFP[3]", "--out", file.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&file).unwrap().contains("HFP,3,quadratic,"));
    let o = run(&["study", "--density", "all", "--models", "M[1]", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn study_exit_code_reflects_solver_failures() {
    let o = run(&["study", "--density", "heaviside1d", "--models", "M[16]", "--config", "/nonexistent.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = scratch("cli-fail");
    let cfg = dir.join("tight.cfg");
    std::fs::write(&cfg, "max_iter=2\n").unwrap();
    let o = run(&["study", "--density", "heaviside1d", "--models", "M[16]", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed"));
    assert!(stdout(&o).contains("M,17,mb,,,,,"));
}

#[test]
fn bench_reports_times() {
    let o = run(&[
        "bench", "--density", "gauss1d", "--models", "HFM[8,16]", "--config", "/dev/null",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(row[6].parse::<u64>().unwrap() > 0);
}

#[test]
fn check_reads_lines() {
    let mut child = bin()
        .args(["check"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"monomial 1 0.5\nmonomial 1 1.1\n# comment\npm 2 0 1 0.5\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let text = stdout(&o);
    let status: Vec<&str> = text.lines().filter(|l| l.starts_with("status=")).collect();
    assert_eq!(
        status,
        [
            "status=strictly realizable rank=1",
            "status=not realizable rank=-",
            "status=boundary realizable rank=2"
        ]
    );
}

#[test]
fn check_random_atomic_densities() {
    let o = run(&["check", "--random", "20", "--seed", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = run(&["check", "--dim", "3", "--input", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
}
