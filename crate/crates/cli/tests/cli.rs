use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use qpdno::hops::{expand, Algorithm, PerturbationProblem};
use qpdno::summation::Summation;
use qpdno::{Complex64 as C, Depth, LatticeSpec, SpectralGrid, SurfaceField};
use qpdno_cli::archive::{dump_expansion, read_archive, write_archive};
use qpdno_cli::config::{load_config, parse_config};
use qpdno_cli::study::{read_csv, run_convergence_study, write_csv, CSV_HEADER};
use qpdno_cli::{validate, METADATA_FILE, RESULTS_FILE};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn small(extra: &[&str]) -> Vec<String> {
    let mut o: Vec<String> = ["resolution.n_alpha=[16, 16]", "study.order=6", "study.epsilons=[0.02, 0.1]"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    o.extend(extra.iter().map(|s| s.to_string()));
    o
}

fn qpdno(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qpdno")).args(args).output().unwrap()
}

#[test]
fn shipped_configs_validate() {
    for name in ["study_2d.toml", "infinite_3d.toml", "finite_3d.toml"] {
        let c = load_config(&config(name), &[]).unwrap();
        validate(&c).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn result_table_round_trips() {
    let c = load_config(&config("study_2d.toml"), &small(&[])).unwrap();
    let exp = validate(&c).unwrap();
    let report = run_convergence_study(&exp).unwrap();
    assert_eq!(report.rows.len(), 3 * 2 * 2 * 7);
    let mut buf = Vec::new();
    write_csv(&report.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), report.rows.len());
    for (a, b) in back.iter().zip(&report.rows) {
        assert_eq!(a.error_rel.to_bits(), b.error_rel.to_bits());
        assert_eq!((a.algorithm, a.summation, a.order, a.pole_flag), (b.algorithm, b.summation, b.order, b.pole_flag));
        assert_eq!(a.min_divisor.map(f64::to_bits), b.min_divisor.map(f64::to_bits));
    }
    assert!(report.rows.iter().filter(|r| r.summation == Summation::Taylor).all(|r| r.min_divisor.is_none()));
}

#[test]
fn flat_interface_is_exact_at_order_zero() {
    let c = load_config(&config("study_2d.toml"), &small(&["study.epsilons=[0.0]"])).unwrap();
    let exp = validate(&c).unwrap();
    for r in run_convergence_study(&exp).unwrap().rows {
        assert!(r.error_rel <= 1e-12, "{} {} n={}: {}", r.algorithm, r.summation, r.order, r.error_rel);
    }
}

#[test]
fn flat_profile_archive_has_only_order_zero() {
    let c = load_config(
        &config("study_2d.toml"),
        &small(&["profile.name=\"custom\"", "profile.coefficients=[{mode = [1, 0], re = 0.0}]"]),
    )
    .unwrap();
    let exp = validate(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = dump_expansion(&exp, Algorithm::Tfe, dir.path()).unwrap();
    assert_eq!(paths.len(), 2);
    let text = std::fs::read_to_string(&paths[0]).unwrap();
    let records: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(!records.is_empty());
    assert!(records.iter().all(|l| l.starts_with("0 ")));
}

fn pure_mode_grid() -> Arc<SpectralGrid> {
    let l = LatticeSpec::new(&[vec![1.0], vec![2f64.sqrt()]], Depth::Infinite).unwrap();
    SpectralGrid::new(l, &[16, 16]).unwrap()
}

#[test]
fn pure_mode_archive_records_the_first_order_coefficient() {
    let g = pure_mode_grid();
    let (p, r) = ([1i64, -2], [2i64, 1]);
    let f = SurfaceField::single_mode(&g, &r, C::new(1.0, 0.0)).unwrap();
    let xi = SurfaceField::single_mode(&g, &p, C::new(1.0, 0.0)).unwrap();
    let e = expand(&PerturbationProblem::new(f, xi, 1, 0.5, 16).unwrap(), Algorithm::OeAdjoint).unwrap();
    let mut buf = Vec::new();
    write_archive(&mut buf, &e, 0.25).unwrap();

    let l = g.lattice();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (kp, kpr) = (l.kt_p(&p), l.kt_p(&[3, -1]));
    let hand = kp.iter().zip(&kpr).map(|(x, y)| x * y).sum::<f64>() - norm(&kp) * norm(&kpr);
    let text = String::from_utf8(buf.clone()).unwrap();
    let rec = text.lines().find(|l| l.starts_with("1 3 -1 ")).expect("n = 1 record");
    let re: f64 = rec.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!((re - hand).abs() < 1e-10, "{re} vs {hand}");

    let back = read_archive(buf.as_slice(), &g).unwrap();
    assert_eq!(back.epsilon, 0.25);
    assert_eq!(back.expansion.algorithm, Algorithm::OeAdjoint);
    for (a, b) in back.expansion.corrections.iter().zip(&e.corrections) {
        assert_eq!(a.coefficients(), b.coefficients());
    }
}

#[test]
fn archives_from_other_grids_are_rejected() {
    let g = pure_mode_grid();
    let xi = SurfaceField::single_mode(&g, &[1, 0], C::new(1.0, 0.0)).unwrap();
    let e = expand(&PerturbationProblem::new(SurfaceField::zeros(&g), xi, 1, 0.5, 8).unwrap(), Algorithm::Fe).unwrap();
    let mut buf = Vec::new();
    write_archive(&mut buf, &e, 0.1).unwrap();
    let other = SpectralGrid::new(g.lattice().clone(), &[8, 8]).unwrap();
    assert!(read_archive(buf.as_slice(), &other).is_err());
    assert!(read_archive("not an archive\n".as_bytes(), &g).is_err());
}

#[test]
fn finite_depth_rejects_operator_and_field_expansions() {
    let errs = parse_config(
        &std::fs::read_to_string(config("finite_3d.toml")).unwrap(),
        &["study.algorithms=[\"oe-direct\", \"fe\", \"tfe\"]".into()],
    )
    .unwrap()
    .validate()
    .unwrap_err();
    assert_eq!(errs.iter().filter(|e| e.field == "study.algorithms").count(), 2);
}

fn run_in(dir: &Path, extra: &[&str]) -> std::process::Output {
    let cfg = config("study_2d.toml");
    let out = dir.to_str().unwrap();
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out, "--threads", "2"];
    let overrides = small(extra);
    for o in &overrides {
        args.push("--override");
        args.push(o);
    }
    qpdno(&args)
}

#[test]
fn binary_run_writes_table_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["study.algorithms=[\"tfe\"]"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(std::fs::File::open(dir.path().join(RESULTS_FILE)).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 7);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(METADATA_FILE)).unwrap()).unwrap();
    assert_eq!(meta["config"]["study"]["order"], 6);
    assert_eq!(meta["threads"], 2);
    assert!(meta["runtime_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn binary_validate_lists_every_problem() {
    let cfg = config("study_2d.toml");
    let out = qpdno(&[
        "validate",
        cfg.to_str().unwrap(),
        "--override",
        "study.algorithms=[\"spectral\"]",
        "--override",
        "resolution.a=-1.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("study.algorithms") && err.contains("resolution.a"), "{err}");

    let ok = qpdno(&["validate", cfg.to_str().unwrap()]);
    assert!(ok.status.success());
}

#[test]
fn binary_dump_writes_one_archive_per_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("study_2d.toml");
    let overrides = small(&[]);
    let mut args = vec!["dump", cfg.to_str().unwrap(), "--algorithm", "fe", "--out", dir.path().to_str().unwrap()];
    for o in &overrides {
        args.push("--override");
        args.push(o);
    }
    let out = qpdno(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["fe_eps0.coeffs", "fe_eps1.coeffs"]);
}
