use std::path::Path;
use std::process::Command;

use leafwise_core::calculus::write_dense;
use leafwise_core::linalg::CMat;
use leafwise_core::Complex64;
use leafwise_harness::run::cache_path;
use leafwise_harness::scenario::{GroupKind, OperatorSpec};
use leafwise_harness::{builtin, catalog, load_scenario, run_scenario, HarnessError, Scenario};

const MINIMAL: &str = r#"
name = "tiny"
seed = 7

[fiber]
dim = 2
fourier_cutoff = 3
grid = 8

[operator]
kind = "multiplier"
symbol = [
  { power = [0, 0], coeff = [1.0, 0.0] },
  { power = [2, 0], coeff = [39.47841760435743, 0.0] },
  { power = [0, 2], coeff = [39.47841760435743, 0.0] },
]
"#;

fn leafwise(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_leafwise"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn builtin_dolbeault_entry() {
    let s = builtin("S1-dolbeault-d1").unwrap();
    assert_eq!(s.groupoid.group, GroupKind::Trivial);
    assert_eq!(
        (s.fiber.kind.as_str(), s.fiber.dim, s.fiber.fourier_cutoff),
        ("torus", 2, 8)
    );
    assert_eq!(s.operator, OperatorSpec::Dolbeault { twist_degree: 1 });
    assert_eq!(catalog().len(), 9);
    assert!(matches!(
        builtin("S9"),
        Err(HarnessError::UnknownBuiltin(_))
    ));
}

#[test]
fn every_builtin_validates_and_round_trips() {
    for s in catalog() {
        s.validate().unwrap();
        assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
    }
}

#[test]
fn omitted_sections_take_defaults() {
    let s = Scenario::from_toml(MINIMAL).unwrap();
    assert_eq!(s.tolerances.pairing_tol, 1e-6);
    assert_eq!(s.tolerances.invariant_tol, 1e-8);
    assert_eq!(s.cocycle.builtin.as_deref(), Some("unit"));
    assert_eq!(s.groupoid.base_size, 1);
    assert!(s.density.invariant);
    assert!(s.to_toml().contains("pairing_tol"));
}

#[test]
fn coarse_grid_is_a_validation_error() {
    let text = MINIMAL.replace("grid = 8", "grid = 7");
    match Scenario::from_toml(&text) {
        Err(HarnessError::Validation { field, msg }) => {
            assert_eq!(field, "fiber.grid");
            assert!(msg.contains("2N+2"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn range_limits_name_the_field() {
    for (from, to, field) in [
        (
            "fourier_cutoff = 3",
            "fourier_cutoff = 33",
            "fiber.fourier_cutoff",
        ),
        ("grid = 8", "grid = 129", "fiber.grid"),
        ("dim = 2", "dim = 3", "fiber.dim"),
    ] {
        match Scenario::from_toml(&MINIMAL.replace(from, to)) {
            Err(HarnessError::Validation { field: f, .. }) => assert_eq!(f, field),
            other => panic!("{to}: {other:?}"),
        }
    }
    let many = format!("{MINIMAL}\n[groupoid]\ngroup = \"trivial\"\nbase_size = 65\n");
    assert!(
        matches!(Scenario::from_toml(&many), Err(HarnessError::Validation { field, .. }) if field == "groupoid.base_size")
    );
}

#[test]
fn parse_errors_carry_the_line() {
    let text = MINIMAL.replace("seed = 7", "seed = \"seven\"");
    match Scenario::from_toml(&text) {
        Err(HarnessError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let unknown = MINIMAL.replace("grid = 8", "grid = 8\nwidth = 2");
    assert!(matches!(
        Scenario::from_toml(&unknown),
        Err(HarnessError::Parse { line: 9, .. })
    ));
    let no_seed = MINIMAL.replace("seed = 7\n", "");
    assert!(matches!(
        Scenario::from_toml(&no_seed),
        Err(HarnessError::Parse { .. })
    ));
}

#[test]
fn non_invariant_density_fails_in_the_density_stage() {
    let text = format!(
        "{MINIMAL}\n[groupoid]\ngroup = \"cyclic\"\norder = 2\nbase_size = 2\nbase_action = [1, 0]\n\n[density]\nomega = [1.0, 2.0]\n"
    );
    let s = Scenario::from_toml(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    match run_scenario(&s, dir.path()) {
        Err(HarnessError::Stage { stage, .. }) => assert_eq!(stage, "density"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn generator_order_is_checked() {
    let text = format!(
        "{MINIMAL}\n[groupoid]\ngroup = \"cyclic\"\norder = 2\nfiber_shift = [\"1/3\", \"0\"]\n"
    );
    let s = Scenario::from_toml(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(
        matches!(run_scenario(&s, dir.path()), Err(HarnessError::Validation { field, .. }) if field == "groupoid.order")
    );
}

fn write_matrix(path: &Path, m: &CMat) {
    write_dense(m, std::fs::File::create(path).unwrap()).unwrap();
}

#[test]
fn custom_operator_file_matches_builtin_multiplier() {
    let dir = tempfile::tempdir().unwrap();
    let n = 7usize;
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    let m = CMat::from_fn(n * n, n * n, |i, j| {
        if i != j {
            return Complex64::new(0.0, 0.0);
        }
        let (a, b) = ((i % n) as f64 - 3.0, (i / n) as f64 - 3.0);
        Complex64::new(1.0 + four_pi2 * (a * a + b * b), 0.0)
    });
    write_matrix(&dir.path().join("op.lwd"), &m);
    let builtin_like = Scenario::from_toml(MINIMAL).unwrap();
    let OperatorSpec::Multiplier { symbol } = builtin_like.operator.clone() else {
        unreachable!()
    };
    let custom = Scenario {
        name: "tiny-custom".into(),
        operator: OperatorSpec::Custom {
            file: "op.lwd".into(),
            symbol,
        },
        ..builtin_like.clone()
    };
    let a = run_scenario(&builtin_like, dir.path()).unwrap();
    let b = run_scenario(&custom, dir.path()).unwrap();
    assert_eq!(a.per_point, vec![0]);
    assert_eq!(b.per_point, vec![0]);
    assert!(a.passed() && b.passed());
    assert!((a.pairing - b.pairing).norm() < 1e-12);
}

#[test]
fn list_prints_the_catalog() {
    let out = leafwise(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(names.len(), 9);
    assert!(names.contains(&"S5-orbifold-family"));
}

#[test]
fn run_writes_csv_and_sidecar_and_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let first = leafwise(&[
        "run",
        "--scenario",
        "S3-invertible-multiplier",
        "--out",
        out,
    ]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("S3-invertible-multiplier.csv")).unwrap();
    assert!(csv.starts_with("scenario,analytic_index,pairing,topological,abs_err,status\n"));
    assert!(csv.contains(",pass"));
    let echo =
        std::fs::read_to_string(dir.path().join("S3-invertible-multiplier.scenario.toml")).unwrap();
    assert_eq!(
        Scenario::from_toml(&echo).unwrap(),
        builtin("S3-invertible-multiplier").unwrap()
    );
    let second = leafwise(&[
        "run",
        "--scenario",
        "S3-invertible-multiplier",
        "--out",
        out,
    ]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("S3-invertible-multiplier.csv")).unwrap(),
        csv
    );
}

#[test]
fn corrupted_cache_is_a_stage_error_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        leafwise(&[
            "run",
            "--scenario",
            "S3-invertible-multiplier",
            "--out",
            out
        ])
        .status
        .code(),
        Some(0)
    );
    let s = builtin("S3-invertible-multiplier").unwrap();
    let path = cache_path(dir.path(), &s, 0);
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 5);
    std::fs::write(&path, bytes).unwrap();
    let r = leafwise(&[
        "run",
        "--scenario",
        "S3-invertible-multiplier",
        "--out",
        out,
    ]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8(r.stderr).unwrap();
    assert!(err.contains("stage `cache`"), "{err}");
    let csv = std::fs::read_to_string(dir.path().join("S3-invertible-multiplier.csv")).unwrap();
    assert!(csv.contains("error:cache"));
}

#[test]
fn tolerance_override_can_fail_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = leafwise(&[
        "run",
        "--scenario",
        "S4-area-cocycle",
        "--out",
        out,
        "--tol",
        "1e-12",
        "--seed",
        "9",
    ]);
    assert_eq!(r.status.code(), Some(1));
    let echo = std::fs::read_to_string(dir.path().join("S4-area-cocycle.scenario.toml")).unwrap();
    let s = Scenario::from_toml(&echo).unwrap();
    assert_eq!((s.seed, s.tolerances.pairing_tol), (9, 1e-12));
}

#[test]
fn unknown_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let r = leafwise(&[
        "run",
        "--scenario",
        "no-such-thing",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn scenario_files_load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.toml");
    std::fs::write(&path, MINIMAL).unwrap();
    let s = load_scenario(path.to_str().unwrap()).unwrap();
    assert_eq!(s.name, "tiny");
}
