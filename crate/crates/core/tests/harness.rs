use std::path::PathBuf;

use pwl_moments::closure::Entropy;
use pwl_moments::harness::{
    convergence_study, parse_densities, parse_models, read_csv, write_csv, ExperimentRow, ModelKind, StudyConfig,
    TestDensity, CSV_HEADER,
};
use pwl_moments::parallel::Execution;

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn small_config() -> StudyConfig {
    let mut c = StudyConfig::default();
    c.apply_text("density = gauss1d\nmodels = HFM[5,9,17],PMM[4,8,16],M[1,2]  # comment\n").unwrap();
    c
}

#[test]
fn config_keys_and_overrides() {
    let dir = scratch("config");
    let path = dir.join("study.cfg");
    std::fs::write(&path, "tol=1e-10\nmax_iter=50\nentropy=be\nnmax=33\nout=tables\n").unwrap();
    let mut c = StudyConfig::default();
    c.apply_file(&path).unwrap();
    c.set("entropy", "mb").unwrap();
    assert_eq!(c.solver.tol, 1e-10);
    assert_eq!(c.solver.max_iter, 50);
    assert_eq!(c.entropy, Entropy::MaxwellBoltzmann);
    assert_eq!(c.nmax, Some(33));
    assert_eq!(c.out, Some(PathBuf::from("tables")));
    assert!(c.set("bogus", "1").is_err());
    assert!(c.apply_text("tol").is_err());
    assert!(c.set("tol", "abc").is_err());
}

#[test]
fn parsing() {
    assert_eq!(parse_densities("all").unwrap().len(), 6);
    assert_eq!(parse_densities("Gauss-1D, square3d").unwrap(), vec![TestDensity::GAUSS_1D, TestDensity::SQUARE_3D]);
    let m = parse_models("M,HFM[5,9,17],pmp").unwrap();
    assert_eq!(m.len(), 3);
    assert_eq!(m[1].kind, ModelKind::Hat);
    assert_eq!(m[1].indices, Some(vec![5, 9, 17]));
    assert!(m[2].linear);
    assert!(parse_models("XYZ").is_err());
    assert!(parse_densities("moon").is_err());
}

#[test]
fn study_is_deterministic_across_execution_modes() {
    let mut a = small_config();
    a.execution = Execution::Sequential;
    let mut b = small_config();
    b.execution = Execution::Parallel;
    let ta = convergence_study(&a).unwrap();
    let tb = convergence_study(&b).unwrap();
    let key = |r: &ExperimentRow| (r.model.clone(), r.n, r.l1.to_bits(), r.linf.to_bits(), r.iterations);
    let ka: Vec<_> = ta[0].rows.iter().map(key).collect();
    let kb: Vec<_> = tb[0].rows.iter().map(key).collect();
    assert_eq!(ka, kb);
    let models: Vec<&str> = ta[0].rows.iter().map(|r| r.model.as_str()).collect();
    assert_eq!(models, ["HFM", "HFM", "HFM", "PMM", "PMM", "PMM", "M", "M"]);
    for (i, r) in ta[0].rows.iter().enumerate() {
        let first = i == 0 || ta[0].rows[i - 1].model != r.model;
        assert_eq!(r.order.is_none(), first);
    }
}

#[test]
fn csv_round_trip() {
    let tables = convergence_study(&small_config()).unwrap();
    let mut buf = Vec::new();
    write_csv(&tables[0].rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 1 + tables[0].rows.len());
    assert!(text.lines().nth(1).unwrap().ends_with(','));
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), tables[0].rows.len());
    for (a, b) in back.iter().zip(&tables[0].rows) {
        assert_eq!((a.model.as_str(), a.n, a.entropy, a.iterations), (b.model.as_str(), b.n, b.entropy, b.iterations));
        assert_eq!(a.l1, b.l1);
        assert_eq!(a.order, b.order);
    }
}
