use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mpsk-ls"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn header(text: &str) -> Vec<String> {
    text.lines()
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let i = header(text).iter().position(|h| h == name).unwrap();
    csv_rows(text).into_iter().map(|r| r[i].clone()).collect()
}

#[test]
fn simulate_writes_one_row_per_grid_point() {
    let o = run(&[
        "simulate", "--L", "16", "--pilots", "2", "--snr", "-20:1:20", "--trials", "5",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 41);
    let snr = column(&text, "snr_db");
    assert_eq!(snr[0].parse::<f64>().unwrap(), -20.0);
    assert_eq!(snr[40].parse::<f64>().unwrap(), 20.0);
}

#[test]
fn zero_trials_is_a_usage_error() {
    let o = run(&["simulate", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn inconsistent_flags_are_usage_errors() {
    assert_eq!(
        run(&["simulate", "--estimator", "weighted", "--trials", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["simulate", "--beta", "0.5", "--trials", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["simulate", "--L", "4", "--pilots", "5", "--trials", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["simulate", "--snr", "0:-1:5", "--trials", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn output_and_manifest_rerun_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let common = [
        "simulate", "--L", "64", "--pilots", "8", "--snr", "0,5", "--trials", "40", "--seed", "9",
    ];
    let with = |out: &Path, threads: &str| {
        let mut args: Vec<&str> = common.to_vec();
        args.extend([
            "--estimator",
            "mackenthun,weighted",
            "--beta",
            "0.5",
            "--threads",
            threads,
            "--out",
        ]);
        let mut cmd = bin();
        cmd.args(&args).arg(out);
        assert!(cmd.output().unwrap().status.success());
    };
    with(&a, "1");
    with(&b, "4");
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());

    let manifest = dir.path().join("a.csv.manifest.json");
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["master_seed"], 9);
    let status = bin()
        .args(["simulate", "--from-manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(&c)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert_eq!(bytes_a, std::fs::read(&c).unwrap());
}

#[test]
fn theory_pilot_only_matches_closed_form() {
    let o = run(&["theory", "--L", "100", "--pilots", "100", "--snr", "0,10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let kappa: Vec<f64> = column(&text, "kappa")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let var: Vec<f64> = column(&text, "phase_var_per_L")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    for (k, v) in kappa.iter().zip(&var) {
        assert!((v - 0.5 / k).abs() <= 1e-12 * v, "{v} vs {}", 0.5 / k);
    }
    for h1 in column(&text, "h1_0") {
        assert!((h1.parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn theory_high_snr_amplitude_mean_tends_to_rho0() {
    let o = run(&["theory", "--pilots", "0", "--snr", "40", "--rho0", "2"]);
    let text = stdout(&o);
    let mean: f64 = column(&text, "amp_mean")[0].parse().unwrap();
    assert!((mean - 2.0).abs() < 1e-3, "{mean}");
}

#[test]
fn theory_marks_low_snr_out_of_range() {
    let text = stdout(&run(&["theory", "--snr", "-30"]));
    assert_eq!(column(&text, "status"), ["out_of_range"]);
    assert_eq!(column(&text, "A1"), [""]);
}

/// Received sample and, for pilots, the transmitted symbol.
type Row = (f64, f64, Option<(f64, f64)>);

fn write_frame(dir: &Path, name: &str, rows: &[Row]) -> std::path::PathBuf {
    let mut text = String::from("index,re_y,im_y,is_pilot,re_p,im_p\n");
    for (i, (re, im, p)) in rows.iter().enumerate() {
        match p {
            Some((pr, pi)) => text.push_str(&format!("{i},{re},{im},1,{pr},{pi}\n")),
            None => text.push_str(&format!("{i},{re},{im},0,,\n")),
        }
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn estimate_pure_pilots_is_the_pilot_correlation() {
    let dir = tempfile::tempdir().unwrap();
    // a0 = 2 e^{0.3 i}, pilots 1 and i.
    let a = num_complex::Complex64::from_polar(2.0, 0.3);
    let y1 = a;
    let y2 = a * num_complex::Complex64::i();
    let path = write_frame(
        dir.path(),
        "p.csv",
        &[
            (y1.re, y1.im, Some((1.0, 0.0))),
            (y2.re, y2.im, Some((0.0, 1.0))),
        ],
    );
    let o = bin().arg("estimate").arg(&path).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert!((field(&line, "rho") - 2.0).abs() < 1e-12);
    assert!((field(&line, "theta") - 0.3).abs() < 1e-12);
}

#[test]
fn estimate_fast_and_brute_agree() {
    let dir = tempfile::tempdir().unwrap();
    let rows = [
        (0.9, 0.2, Some((1.0, 0.0))),
        (-0.1, 1.1, None),
        (-1.2, 0.1, None),
        (0.3, -0.8, None),
        (1.0, 0.4, None),
        (0.2, 0.7, None),
        (-0.9, -0.3, None),
        (0.1, 1.0, Some((0.0, 1.0))),
    ];
    let path = write_frame(dir.path(), "f.csv", &rows);
    let out = |est: &str| {
        let o = bin()
            .arg("estimate")
            .arg(&path)
            .args(["--estimator", est, "--decisions"])
            .output()
            .unwrap();
        assert!(o.status.success());
        stdout(&o).replacen(&format!("estimator={est}"), "", 1)
    };
    let fast = out("mackenthun");
    assert_eq!(fast, out("brute"));
    assert_eq!(fast, out("naive"));
}

#[test]
fn estimate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(
        bin()
            .arg("estimate")
            .arg(&empty)
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );

    let header_only = dir.path().join("h.csv");
    std::fs::write(&header_only, "index,re_y,im_y,is_pilot,re_p,im_p\n").unwrap();
    assert_eq!(
        bin()
            .arg("estimate")
            .arg(&header_only)
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );

    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "index,re_y,im_y,is_pilot,re_p,im_p\n0,1,0,1,1,0\n1,x,0,0,,\n",
    )
    .unwrap();
    let o = bin().arg("estimate").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn selftest_passes_and_reports_faults() {
    let o = run(&["selftest"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 6);
    assert_eq!(text.lines().last(), Some("PASS"));

    let o = run(&["selftest", "--suite", "oracle"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = run(&[
        "selftest",
        "--suite",
        "weighted",
        "--inject-fault",
        "weighted",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL weighted"));
}
