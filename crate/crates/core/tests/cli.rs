//! End-to-end runs of the `ou-x` binary.

use std::process::{Command, Output};

fn ou_x(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ou-x"))
        .args(args)
        .env_remove("OUX_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows split into cells, after the header and the column line.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn note<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix("# ")?.strip_prefix(key)?.strip_prefix(" = "))
}

#[test]
fn header_records_version_and_settings() {
    let o = ou_x(&["fpt", "--b", "1.5", "--t-points", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert_eq!(first, format!("# ou-x {}", env!("CARGO_PKG_VERSION")));
    assert_eq!(note(&text, "command"), None);
    assert!(text.contains("# command: fpt"));
    assert_eq!(note(&text, "b"), Some("1.5"));
    assert_eq!(note(&text, "t_points"), Some("5"));
    assert!(note(&text, "k_terms").is_some());
    assert!(text.lines().any(|l| l == "t,value,error_bound"));
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "joint",
        "--barriers",
        "1.5, 1.5",
        "--method",
        "direct-mc",
        "--paths",
        "20000",
        "--steps",
        "200",
    ];
    let a = ou_x(&args);
    let b = ou_x(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn survival_column_starts_at_one() {
    let text = stdout(&ou_x(&[
        "fpt",
        "--b",
        "1",
        "--x",
        "-0.5",
        "--t-points",
        "11",
    ]));
    let r = rows(&text);
    assert_eq!(r.len(), 11);
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 1.0);
    let v: Vec<f64> = r.iter().map(|c| c[1].parse().unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-8));
}

#[test]
fn constant_transform_has_linear_clock() {
    let text = stdout(&ou_x(&[
        "transform",
        "--lambda",
        "2",
        "--sigma",
        "0.5",
        "--mu",
        "0.3",
        "--window",
        "0, 3",
    ]));
    for r in rows(&text) {
        let (t, g): (f64, f64) = (r[0].parse().unwrap(), r[3].parse().unwrap());
        assert!((g - t / 2.0).abs() < 1e-8, "t={t} gamma={g}");
    }
}

#[test]
fn figure_presets_give_the_expected_verdicts() {
    let six = stdout(&ou_x(&["presets", "fig6", "--points", "11"]));
    assert_eq!(note(&six, "verdict"), Some("transformation"));
    let seven = stdout(&ou_x(&["presets", "fig7", "--points", "11"]));
    assert_eq!(note(&seven, "verdict"), Some("direct-approx"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("ou-x-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.ini");
    std::fs::write(&cfg, "[process]\nb = 2\nx = 0.5\n[output]\nt_points = 3\n").unwrap();
    let out = dir.join("out.csv");
    let o = ou_x(&[
        "fpt",
        "--config",
        cfg.to_str().unwrap(),
        "--x",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(note(&text, "b"), Some("2"));
    assert_eq!(note(&text, "x"), Some("0"));
    assert_eq!(rows(&text).len(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(ou_x(&["presets", "fig4"]).status.code(), Some(0));
    // configuration errors
    assert_eq!(ou_x(&["fpt"]).status.code(), Some(2));
    assert_eq!(ou_x(&["presets", "table9"]).status.code(), Some(2));
    assert_eq!(ou_x(&["fpt", "--b", "one"]).status.code(), Some(2));
    assert_eq!(ou_x(&["fpt", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(
        ou_x(&["joint", "--barriers", "2, 2", "--grid-min", "-1"])
            .status
            .code(),
        Some(2)
    );
    // numerical failure: too many eigenvalues for a far barrier
    let o = ou_x(&["fpt", "--b", "6", "--k-terms", "80"]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ou-x: "));
}

#[test]
fn thread_count_from_environment() {
    let args = [
        "joint",
        "--barriers",
        "1, 1",
        "--method",
        "direct-mc",
        "--paths",
        "10000",
        "--steps",
        "100",
    ];
    let run = |n: &str| {
        Command::new(env!("CARGO_BIN_EXE_ou-x"))
            .args(args)
            .env("OUX_THREADS", n)
            .output()
            .unwrap()
    };
    let (one, three) = (run("1"), run("3"));
    assert_eq!(note(&stdout(&one), "threads"), Some("1"));
    assert_eq!(note(&stdout(&three), "threads"), Some("3"));
    assert_eq!(rows(&stdout(&one)), rows(&stdout(&three)));
    // the flag wins over the environment
    let flag = Command::new(env!("CARGO_BIN_EXE_ou-x"))
        .args(args)
        .args(["--threads", "2"])
        .env("OUX_THREADS", "5")
        .output();
    assert_eq!(note(&stdout(&flag.unwrap()), "threads"), Some("2"));
}
