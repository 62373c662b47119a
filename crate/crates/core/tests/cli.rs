use std::path::PathBuf;
use std::process::{Command, Output};

use williamson_core::io::read_matrix;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_williamson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(name: &str) -> String {
    golden(name).to_string_lossy().into_owned()
}

#[test]
fn spectrum_text() {
    let o = run(&["spectrum", &path("diag_2_3_2_3.txt")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "D: 2 3\n");
}

#[test]
fn spectrum_csv_matches_golden() {
    let o = run(&["--format", "csv", "spectrum", &path("diag_2_3_2_3.txt")]);
    assert!(o.status.success());
    assert_eq!(
        o.stdout,
        std::fs::read(golden("spectrum_diag_2_3_2_3.csv")).unwrap()
    );
}

#[test]
fn bound_csv_matches_golden() {
    let o = run(&[
        "--format",
        "csv",
        "bound",
        &path("two_identity_4.txt"),
        &path("identity_4.txt"),
        "--norm",
        "op",
    ]);
    assert!(o.status.success());
    assert_eq!(
        o.stdout,
        std::fs::read(golden("bound_op_2i_i.csv")).unwrap()
    );
}

#[test]
fn classify_rejects_isotropic_kernel() {
    let o = run(&["--format", "csv", "classify", &path("diag_1_1_0_0.txt")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        o.stdout,
        std::fs::read(golden("classify_diag_1_1_0_0.csv")).unwrap()
    );
    let text = run(&["classify", &path("diag_1_1_0_0.txt")]);
    assert_eq!(text.status.code(), Some(1));
    assert!(stdout(&text).contains("kernel_symplectic"));
}

#[test]
fn decompose_rejects_isotropic_kernel() {
    let o = run(&["decompose", &path("diag_1_1_0_0.txt")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kernel_symplectic"));
}

#[test]
fn input_errors_exit_2() {
    let missing = run(&["spectrum", "/definitely/not/here.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/definitely/not/here.txt"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 2\n1 2\n3\n").unwrap();
    let o = run(&["spectrum", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let ragged = dir.path().join("ragged.txt");
    std::fs::write(&ragged, "2 2\n1 2\n3 4\n5 6\n").unwrap();
    assert_eq!(
        run(&["spectrum", ragged.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let odd = dir.path().join("odd.txt");
    std::fs::write(&odd, "1 1\n1\n").unwrap();
    assert_eq!(
        run(&["spectrum", odd.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn asymmetric_input_is_symmetrized_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let asym = dir.path().join("asym.txt");
    std::fs::write(&asym, "2 2\n2 1\n-1 2\n").unwrap();
    let o = run(&["spectrum", asym.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not symmetric"));
    assert_eq!(stdout(&o), "D: 2\n");
}

#[test]
fn decompose_writes_frame() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.txt");
    let o = run(&[
        "decompose",
        &path("diag_2_3_2_3.txt"),
        "--output-m",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("D: 2 3\n"));
    let m = read_matrix(&out).unwrap();
    let a = read_matrix(golden("diag_2_3_2_3.txt")).unwrap();
    let d =
        nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 2.0, 3.0]));
    assert!((m.transpose() * a * &m - d).norm() < 1e-12);
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let o = run(&[
            "gen",
            "--class",
            "eigsps",
            "--n",
            "3",
            "--seed",
            "42",
            "--signature",
            "2,2,2",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = run(&["spectrum", a.to_str().unwrap()]);
    assert!(o.status.success());
    let d: Vec<f64> = stdout(&o)
        .trim()
        .trim_start_matches("D: ")
        .split(' ')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(d.len(), 3);
    assert!(d[0] < 0.0 && d[1] == 0.0 && d[2] > 0.0);
}

#[test]
fn gen_rejects_odd_signature() {
    let o = run(&[
        "gen",
        "--class",
        "eigsps",
        "--n",
        "2",
        "--seed",
        "1",
        "--signature",
        "1,1,2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dhat_and_sweep() {
    let o = run(&["dhat", &path("identity_4.txt")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "D_hat: 1 1 1 1\n");

    let o = run(&["sweep", &path("diag_2_3_2_3.txt"), "--eps", "0.1,0.01,0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("epsilon,norm_kind,lhs,rhs"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn gen_accepts_prescribed_spectrum_with_negatives() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.txt");
    let o = run(&[
        "gen",
        "--class",
        "eigsps",
        "--n",
        "3",
        "--seed",
        "1",
        "--spectrum",
        "-1,0,2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truth D: -1 0 2"));
    let o = run(&["--format", "csv", "spectrum", out.to_str().unwrap()]);
    let d: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let expected = [-1.0, 0.0, 2.0];
    assert!(d.iter().zip(expected).all(|(x, y)| (x - y).abs() < 1e-10));
}

#[test]
fn sppsd_outside_eigsps_decomposes_through_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("skewed.txt");
    std::fs::write(&f, "4 4\n0 0 0 0\n0 0.5 -0.5 0\n0 -0.5 0.5 0\n0 0 0 1\n").unwrap();
    let f = f.to_str().unwrap();
    let o = run(&["classify", f]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("SpPsd: yes"));
    assert!(text.contains("EigSpSm: no"));
    assert!(text.contains("SpSm: yes (kernel and its symplectic complement)"));
    let o = run(&["decompose", f]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let d: Vec<f64> = lines
        .next()
        .unwrap()
        .trim_start_matches("D: ")
        .split(' ')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(d[0], 0.0);
    assert!((d[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(lines.next(), Some("route: kernel certificate"));
}
