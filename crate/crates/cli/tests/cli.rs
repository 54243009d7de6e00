use std::io::Write;

use wipt_cli::run;

fn wipt(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["wipt"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn capacity_grid_has_101_rows() {
    let (code, out, _) = wipt(&["capacity", "--grid", "0:1:0.01"]);
    assert_eq!(code, 0);
    assert!(out
        .lines()
        .any(|l| l == "b,capacity_bpcu,p_symbol_0,p_symbol_1"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0][1], "1.0");
    assert_eq!(rows[50][0], "0.5");
    assert_eq!(rows[50][1], "1.0");
    assert_eq!(rows[100][1], "0.0");
}

#[test]
fn capacity_accepts_custom_alphabet() {
    let (code, out, _) = wipt(&["capacity", "--grid", "0:2:0.5", "--energies", "0,1,2"]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].len(), 5);
}

#[test]
fn missing_config_names_the_path() {
    let (code, _, err) = wipt(&["--config", "/definitely/not/here.toml", "capacity"]);
    assert_eq!(code, 1);
    assert!(err.contains("/definitely/not/here.toml"), "{err}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "[network]\nlamda = 0.001").unwrap();
    let (code, _, err) = wipt(&["--config", f.path().to_str().unwrap(), "network"]);
    assert_eq!(code, 1);
    assert!(err.contains("lamda"), "{err}");
}

#[test]
fn domain_errors_exit_one() {
    let (code, _, err) = wipt(&["capacity", "--grid", "0:2:0.5"]);
    assert_eq!(code, 1);
    assert!(err.contains("infeasible"), "{err}");
    let (code, _, _) = wipt(&["no-such-command"]);
    assert_eq!(code, 1);
    let (code, _, _) = wipt(&["network", "--workers", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn solver_non_convergence_exits_two() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "[robust]\nradii = [0.5]\n\n[robust.solver]\nmax_iterations = 2"
    )
    .unwrap();
    let (code, _, err) = wipt(&["--config", f.path().to_str().unwrap(), "robust"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = wipt(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("network"));
}

#[test]
fn header_records_config_and_seed() {
    let (code, out, _) = wipt(&[
        "network",
        "--seed",
        "99",
        "--realizations",
        "500",
        "--p-dbw",
        "30:36:3",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("# seed = 99"));
    assert!(out.contains("# n_realizations = 500"));
    assert!(out.contains("# p_dbw = \"30:36:3\""));
    assert!(out.lines().any(|l| l
        == "P_dBW,rho_baseline,rho_mode,rho,sic,coverage,coverage_ci,harvested_W,harvested_ci"));
    // 3 powers x 2 baselines x (fixed, adapted, bound)
    assert_eq!(data_rows(&out).len(), 18);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "network",
        "--seed",
        "5",
        "--realizations",
        "2000",
        "--p-dbw",
        "0:60:20",
    ];
    let a = wipt(&args);
    let b = wipt(&[&args[..], &["--workers", "2"]].concat());
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let c = wipt(&[
        "network",
        "--seed",
        "6",
        "--realizations",
        "2000",
        "--p-dbw",
        "0:60:20",
    ]);
    assert_ne!(a.1, c.1);
}

#[test]
fn seed_from_config_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "seed = 1234\n[waveform]\ntone_counts = [1, 2]").unwrap();
    let (code, out, _) = wipt(&["--config", f.path().to_str().unwrap(), "waveform"]);
    assert_eq!(code, 0);
    assert!(out.contains("# seed = 1234"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], "2.0");
    assert_eq!(rows[1][1], "4.0");
}

#[test]
fn every_subcommand_emits_csv() {
    for (cmd, header) in [
        ("models", "model,p_rf_W,p_dc_W"),
        ("robust", "direction,d,x,cdf"),
        ("receivers", "scheme,parameter,rate_bpcu,energy_W"),
        ("waveform", "N,papr,harvested_W,max_symbol_error"),
    ] {
        let (code, out, err) = wipt(&[cmd]);
        assert_eq!(code, 0, "{cmd}: {err}");
        assert!(out.lines().any(|l| l == header), "{cmd}");
        assert!(!data_rows(&out).is_empty());
    }
    let (_, out, _) = wipt(&["robust"]);
    assert_eq!(data_rows(&out).len(), 2 * 4 * 500);
}

#[test]
fn validate_reports_every_check() {
    let (code, out, err) = wipt(&["validate", "--seed", "1"]);
    assert_eq!(code, 0, "{err}");
    let rows = data_rows(&out);
    assert!(rows.len() >= 8);
    assert!(rows.iter().all(|r| r[1] == "PASS"), "{out}");
}

#[test]
fn output_file_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cap.csv");
    let gp = dir.path().join("cap.gp");
    let (code, out, _) = wipt(&[
        "capacity",
        "--output",
        csv.to_str().unwrap(),
        "--plot-script",
        gp.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(
        data_rows(&std::fs::read_to_string(&csv).unwrap()).len(),
        101
    );
    let script = std::fs::read_to_string(&gp).unwrap();
    assert!(script.contains(csv.to_str().unwrap()));
}

#[test]
fn example_config_matches_defaults() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../wipt.example.toml");
    let text = std::fs::read_to_string(path).unwrap();
    let parsed = wipt_cli::config::FileConfig::parse(&text).unwrap();
    let defaults = wipt_cli::config::FileConfig {
        seed: Some(wipt_cli::config::DEFAULT_SEED),
        ..Default::default()
    };
    assert_eq!(parsed, defaults);
}
