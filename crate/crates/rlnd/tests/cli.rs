//! Exit-code contract and output-format tests for the binary.

use std::path::Path;
use std::process::{Command, Output};

fn rlnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlnd"))
        .args(args)
        .output()
        .expect("spawn rlnd")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_params(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("params.txt");
    std::fs::write(
        &path,
        "mu = 0.0\nsigma = 1.0\nh = case2\nk_neg = -24.0\nk_pos = 24.0\nc = 0.5\n",
    )
    .unwrap();
    path
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(code(&rlnd(&["--help"])), 0);
    assert_eq!(code(&rlnd(&["eval"])), 1, "missing required --params");
    assert_eq!(code(&rlnd(&["no-such-command"])), 1);
    assert_eq!(code(&rlnd(&["fit", "--input", "x.txt", "--bins", "not-a-number"])), 1);
}

#[test]
fn missing_and_malformed_inputs_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path());
    assert_eq!(
        code(&rlnd(&["gof", "--input", "/nonexistent.txt", "--params", params.to_str().unwrap()])),
        2
    );
    let bad = dir.path().join("bad_params.txt");
    std::fs::write(&bad, "mu = zero\n").unwrap();
    assert_eq!(code(&rlnd(&["eval", "--params", bad.to_str().unwrap(), "--y", "0"])), 2);
    let bad_returns = dir.path().join("returns.txt");
    std::fs::write(&bad_returns, "0.01\nnot-a-number\n").unwrap();
    assert_eq!(
        code(&rlnd(&["gof", "--input", bad_returns.to_str().unwrap(), "--params", params.to_str().unwrap()])),
        2
    );
}

#[test]
fn eval_prints_full_precision_rows() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path());
    let out = rlnd(&["eval", "--params", params.to_str().unwrap(), "--y", "0,1", "--prob", "0.5,0.9999"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("y\tcdf\tpdf"), "{text}");
    assert!(text.contains("p\tquantile"), "{text}");
    // cdf at the center is one half
    let center_row: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("0.0000000000000000e0"))
        .unwrap()
        .split('\t')
        .collect();
    let cdf: f64 = center_row[1].parse().unwrap();
    assert!((cdf - 0.5).abs() < 1e-15);
    // 0.9999 exceeds the upper mass limit for sigma=1, K=24
    assert!(text.contains("out-of-range"), "{text}");
}

#[test]
fn check_passes_valid_params_and_flags_bad_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path());
    let out = rlnd(&["check", "--params", params.to_str().unwrap(), "--grid", "2000", "--no-heat"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("all checks passed"));

    // tabulated h that grows on the right violates monotonicity
    let bad = dir.path().join("adversarial.txt");
    let mut text = String::from("mu = 0.0\nsigma = 1.0\nh = tabulated\n");
    for i in 0..40 {
        let y = i as f64 * 0.1;
        text.push_str(&format!("knot = {y},{}\n", 1.0 + 5.0 * y * y));
    }
    std::fs::write(&bad, text).unwrap();
    let out = rlnd(&["check", "--params", bad.to_str().unwrap(), "--grid", "2000", "--no-heat"]);
    assert_eq!(code(&out), 4, "{}", stdout(&out));
}

#[test]
fn sample_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path());
    let (a, b, c) = (dir.path().join("a.txt"), dir.path().join("b.txt"), dir.path().join("c.txt"));
    for (path, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        let out = rlnd(&[
            "sample", "--params", params.to_str().unwrap(), "--n", "5",
            "--seed", seed, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn csv_ingestion_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("prices.csv");
    let mut text = String::from("Date,Adj Close\n");
    let mut price = 100.0f64;
    let start = chrono::NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    for i in 0..700u64 {
        let date = start + chrono::Days::new(i);
        // a deterministic oscillating return stream
        price *= (0.002 * ((i as f64) * 0.7).sin()).exp();
        text.push_str(&format!("{date},{price}\n"));
    }
    std::fs::write(&csv, text).unwrap();
    let out_dir = dir.path().join("fit");
    let out = rlnd(&[
        "fit", "--input", csv.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap(),
        "--bins", "20", "--k", "5", "--c", "1", "--no-search",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["params.txt", "fit.json", "bins.tsv"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
}

#[test]
fn gof_reproduces_fit_statistics() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/golden_returns.txt");
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = rlnd(&[
        "fit", "--input", golden.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap(),
        "--grid-res", "6", "--no-polish",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let params = out_dir.join("params.txt");
    let out = rlnd(&[
        "gof", "--input", golden.to_str().unwrap(), "--params", params.to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("fit.json")).unwrap()).unwrap();
    let gof: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("gof.json")).unwrap()).unwrap();
    for key in ["delta", "delta_ccn_paper", "delta_ccn_standard"] {
        assert_eq!(
            fit[key]["statistic"], gof[key]["statistic"],
            "statistic mismatch for {key}"
        );
        assert_eq!(fit[key]["df"], gof[key]["df"]);
    }
}

#[test]
fn plotdata_densities_normalize() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/golden_returns.txt");
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = rlnd(&[
        "fit", "--input", golden.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap(),
        "--grid-res", "6", "--no-polish",
    ]);
    assert_eq!(code(&out), 0);
    let out = rlnd(&[
        "plotdata", "--fit-dir", out_dir.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let bins = std::fs::read_to_string(out_dir.join("bins.tsv")).unwrap();
    let plot = std::fs::read_to_string(out_dir.join("plotdata.tsv")).unwrap();
    let plot_rows: Vec<Vec<f64>> = plot
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(plot_rows.len(), bins.lines().count() - 1);
    // observed density x bin width sums to one; widths recovered from bins.tsv
    let widths: Vec<f64> = {
        let rows: Vec<Vec<&str>> = bins.lines().skip(1).map(|l| l.split('\t').collect()).collect();
        let finite: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
            .collect();
        let interior: Vec<f64> = finite
            .iter()
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| b - a)
            .collect();
        let mean_w = interior.iter().sum::<f64>() / interior.len() as f64;
        finite
            .iter()
            .map(|(a, b)| {
                if a.is_finite() && b.is_finite() {
                    b - a
                } else {
                    mean_w
                }
            })
            .collect()
    };
    let total: f64 = plot_rows
        .iter()
        .zip(&widths)
        .map(|(row, w)| row[1] * w)
        .sum();
    assert!((total - 1.0).abs() < 1e-9, "observed density sums to {total}");
    for row in &plot_rows {
        assert!(row[1] >= 0.0 && row[2] >= 0.0 && row[3] >= 0.0);
    }
}
