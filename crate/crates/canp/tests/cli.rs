use std::f64::consts::PI;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn canp(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_canp"));
    cmd.args(args).env_remove("CANP_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn canp");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

fn ok(args: &[&str]) -> String {
    let r = canp(args, &[]);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.stdout
}

struct Csv {
    notes: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let notes = text
            .lines()
            .filter_map(|l| l.strip_prefix("# "))
            .map(String::from)
            .collect();
        let mut body = text.lines().filter(|l| !l.starts_with('#'));
        let header = body.next().unwrap().split(',').map(String::from).collect();
        let rows = body
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        Self { notes, header, rows }
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).expect(name);
        self.rows.iter().map(|r| r[i]).collect()
    }

    fn note(&self, prefix: &str) -> Option<f64> {
        self.notes.iter().find_map(|n| {
            let rest = n.split_once(prefix)?.1;
            rest.split_whitespace().next()?.parse().ok()
        })
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["fig2b", "--axes.sqrtDelta_tc.points=40"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn output_independent_of_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |p: &std::path::Path| {
        vec![
            "fig3a".to_string(),
            "--axes.sqrtDelta_tc.points=60".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    let run = |p: &std::path::Path, env: &[(&str, &str)]| {
        let a: Vec<String> = args(p);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert_eq!(canp(&a, env).code, 0);
    };
    run(&a, &[("CANP_THREADS", "1")]);
    run(&b, &[("CANP_THREADS", "4")]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.csv");
    let mut extra = args(&c);
    extra.push("--threads=2".into());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();
    assert_eq!(canp(&extra, &[]).code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn header_carries_version_and_hash() {
    let out = ok(&["fig3b", "--axes.g.points=3"]);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with(&format!("# canp {} experiment=fig3b config_sha256=", env!("CARGO_PKG_VERSION"))));
    let hash = first.rsplit('=').next().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    let other = ok(&["fig3b", "--axes.g.points=4"]);
    assert_ne!(other.lines().next().unwrap(), first);
}

#[test]
fn printed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, ok(&["fig2b", "--print-config", "--t_theta=7"])).unwrap();
    let p = path.display().to_string();
    let a = ok(&["fig2b", "--config", &p, "--axes.sqrtDelta_tc.points=5"]);
    let b = ok(&["fig2b", "--t_theta=7", "--axes.sqrtDelta_tc.points=5"]);
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{ not json").unwrap();
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"experiment": "fig3b", "colour": 1}"#).unwrap();
    let (bj, uk) = (bad_json.display().to_string(), unknown.display().to_string());
    let cases: Vec<Vec<&str>> = vec![
        vec!["fig3b", "--config", &bj],
        vec!["fig3b", "--config", &uk],
        vec!["fig3b", "--config", "/nonexistent/cfg.json"],
        vec!["fig3b", "--axes.g.stop=1.0"],
        vec!["fig3b", "--axes.g.points=1"],
        vec!["fig2a", "--model.g=1.5"],
        vec!["fig2b", "--lines=[0.5,1.2]"],
        vec!["lmg-threshold", "--model.variant=qrm-frequency"],
        vec!["fig3b", "--dtheta=1"],
        vec!["not-an-experiment"],
    ];
    for args in cases {
        let r = canp(&args, &[]);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
    }
}

fn validate_report(extra: &[&str]) -> (i32, serde_json::Value) {
    let mut args = vec!["validate", "--oracle=false"];
    args.extend_from_slice(extra);
    let r = canp(&args, &[]);
    (r.code, serde_json::from_str(&r.stdout).expect("json report"))
}

fn check_passed(report: &serde_json::Value, name: &str) -> bool {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["passed"]
        .as_bool()
        .unwrap()
}

#[test]
fn injected_fault_is_named() {
    let (_, clean) = validate_report(&[]);
    assert!(check_passed(&clean, "delta_closed_form"));
    let (code, faulty) = validate_report(&["--fault=wrong-delta"]);
    assert_eq!(code, 1);
    assert!(!check_passed(&faulty, "delta_closed_form"));
    assert_eq!(faulty["passed"], false);
}

#[test]
fn validate_reports_thresholds() {
    let (_, report) = validate_report(&[]);
    let t = report["thresholds"].as_array().unwrap();
    let g = t.iter().find(|x| x["name"] == "g_star").unwrap();
    assert!((g["value"].as_f64().unwrap() - 0.5058).abs() < 5e-3);
    assert_eq!(g["bracket"][0], 0.3);
    let l = t.iter().find(|x| x["name"] == "lambda_star").unwrap();
    assert!((l["value"].as_f64().unwrap() - 0.3559).abs() < 5e-3);
    let oracle = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["criterion"] == 3)
        .all(|c| c["skipped"] == true);
    assert!(oracle);
}

#[test]
fn decoupled_fig2a_never_enhances() {
    let csv = Csv::parse(&ok(&[
        "fig2a",
        "--model.g=0",
        "--axes.sqrtDelta_tc.points=12",
        "--axes.t_theta.points=12",
    ]));
    let (x, t, r) = (csv.col("sqrtDelta_tc"), csv.col("t_theta"), csv.col("R"));
    assert_eq!(r.len(), 144);
    for i in 0..r.len() {
        let total = x[i] / 2.0 + t[i];
        assert!((r[i] - t[i] * t[i] / (total * total)).abs() < 1e-12);
        assert!(x[i] == 0.0 || r[i] < 1.0);
    }
    assert!(csv.col("enhanced").iter().all(|&f| f == 0.0));
}

#[test]
fn critical_fig2a_has_enhanced_windows() {
    let csv = Csv::parse(&ok(&["fig2a", "--axes.sqrtDelta_tc.points=30", "--axes.t_theta.points=30"]));
    let flags = csv.col("enhanced");
    assert!(flags.contains(&1.0));
    assert!(flags.contains(&0.0));
    for (f, r) in flags.iter().zip(csv.col("R")) {
        assert_eq!(*f == 1.0, r > 1.0);
    }
}

#[test]
fn fig2b_first_peaks() {
    let csv = Csv::parse(&ok(&["fig2b"]));
    let (g, x, r) = (csv.col("g"), csv.col("sqrtDelta_tc"), csv.col("R"));
    for line in [0.8, 0.9, 0.96, 0.98] {
        let idx: Vec<usize> = (0..g.len()).filter(|&i| g[i] == line).collect();
        let rr: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
        let first = canp::experiments::local_maxima(&rr)[0];
        let at = x[idx[first]];
        // The growing baseline T² pulls the peak of R a little before π.
        assert!(at > 0.75 * PI && at <= PI, "g={line}: first peak at {at}");
    }
}

#[test]
fn fig2b_inset_threshold_and_growth() {
    let csv = Csv::parse(&ok(&["fig2b-inset"]));
    let g_star = csv.note("threshold g*=").unwrap();
    assert!((g_star - 0.5058).abs() < 5e-3, "{g_star}");
    let (g, r) = (csv.col("g"), csv.col("R_tau"));
    let tail: Vec<f64> = (0..g.len()).filter(|&i| g[i] >= 0.6).map(|i| r[i]).collect();
    assert!(tail.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn fig3a_obeys_skew_identity() {
    let csv = Csv::parse(&ok(&["fig3a", "--axes.sqrtDelta_tc.points=101"]));
    for (s, f) in csv.col("S").iter().zip(csv.col("F")) {
        assert!((4.0 * 144.0 * s - f).abs() <= 1e-9 * f);
    }
}

#[test]
fn fig3b_homodyne_and_slope() {
    let csv = Csv::parse(&ok(&["fig3b"]));
    for q in csv.col("cfi_over_qfi") {
        assert!((0.8..=1.0).contains(&q), "{q}");
    }
    let (g, p) = (csv.col("g"), csv.col("meanP"));
    let slopes: Vec<f64> = (1..g.len()).map(|i| ((p[i] - p[i - 1]) / (g[i] - g[i - 1])).abs()).collect();
    assert!(slopes.windows(2).all(|w| w[1] > w[0]));
    assert!(csv.notes.iter().any(|n| n.contains("zero crossing")));
}

#[test]
fn lmg_threshold() {
    let csv = Csv::parse(&ok(&["lmg-threshold"]));
    let l = csv.note("threshold lambda*=").unwrap();
    assert!((l - 0.3559).abs() < 5e-3, "{l}");
    assert_eq!(csv.header, ["lambda", "R_tau"]);
}

#[test]
fn displacement_starts_from_direct_encoding() {
    let csv = Csv::parse(&ok(&["displacement", "--axes.sqrtDelta_tc.points=9"]));
    let exact = csv.col("qfi_exact");
    assert!((exact[0] - 2.0 * 144.0).abs() < 1e-9);
    assert_eq!(csv.col("qfi_asymptotic")[0], 0.0);
    assert!((csv.col("R")[0] - 1.0).abs() < 1e-12);
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    let r = canp(&["fig3b", "--axes.g.points=3", "--out", &out.display().to_string()], &[]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().starts_with("# canp"));
}
