use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const ADDER: &str = "relays 2\ninputs 2\noutputs 3\nchannel\n1 0 0\n0 1 0\n0 1 0\n0 0 1\n";

fn cran(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cran"))
        .args(args)
        .env_remove("CRAN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn write_channel(dir: &Path, text: &str) -> String {
    let path = dir.join("channel.txt");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn sweep_header_and_cutset_rows() {
    let out = cran(&["sweep", "--M", "3", "--P", "1", "--cmin", "0", "--cmax", "2", "--steps", "25"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "C[bits/channel-use],lb[bits/channel-use],ub[bits/channel-use],lb_rho,ub_rho,ub_N,regime"
    );
    let rows = rows(&text);
    assert_eq!(rows.len(), 25);
    for r in &rows {
        let c: f64 = r[0].parse().unwrap();
        let lb: f64 = r[1].parse().unwrap();
        let ub: f64 = r[2].parse().unwrap();
        assert!(lb <= ub + 1e-6);
        if c <= 1.0 / 3.0 {
            assert!((lb - 3.0 * c).abs() < 1e-6 && (ub - 3.0 * c).abs() < 1e-6);
            assert_eq!(r[6], "cutset-tight");
        }
    }
}

#[test]
fn degenerate_grid_gives_zero_rows() {
    let out = cran(&["sweep", "--cmin", "0", "--cmax", "0", "--steps", "2"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], rows[1]);
    assert_eq!(rows[0][1], "0");
    assert_eq!(rows[0][2], "0");
}

#[test]
fn sweep_is_byte_identical() {
    let args = ["sweep", "--M", "4", "--P", "2", "--steps", "7", "--reference-curves"];
    assert_eq!(cran(&args).stdout, cran(&args).stdout);
}

#[test]
fn tight_window_widens_with_relays() {
    let width = |m: &str| {
        let text = stdout(&cran(&["regimes", "--M", m, "--P", "1"]));
        let get = |key: &str| -> f64 {
            text.lines()
                .find(|l| l.starts_with(key))
                .unwrap()
                .split_whitespace()
                .nth(1)
                .unwrap()
                .parse()
                .unwrap()
        };
        get("C_U ") - get("C_L ")
    };
    let (w2, w3, w4) = (width("2"), width("3"), width("4"));
    assert!(w2 < w3 && w3 < w4, "{w2} {w3} {w4}");
}

#[test]
fn regimes_report() {
    let text = stdout(&cran(&["regimes", "--M", "3", "--P", "1"]));
    assert!(text.contains("C_C     0.333333"));
    let text = stdout(&cran(&["regimes", "--M", "2", "--P", "1"]));
    assert!(text.contains("rho2    0.618034"));
}

#[test]
fn verify_passes_and_rejects_unknown_suites() {
    let out = cran(&["verify", "--suite", "subset-dominance"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("PASS") && text.contains("instances=1000"), "{text}");
    assert_eq!(cran(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn simulate_rows_and_empty_run() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write_channel(dir.path(), ADDER);
    let out = cran(&["simulate", "--channel", &ch, "--rate", "0.9", "--n", "8,12,16", "--trials", "200"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "n,rate[bits/channel-use],r_prime[bits/channel-use],trials,encode_fail_rate,error_rate"
    );
    assert_eq!(rows(&text).len(), 3);

    let out = cran(&["simulate", "--channel", &ch, "--rate", "0.9", "--trials", "0"]);
    assert!(out.status.success());
    assert_eq!(rows(&stdout(&out))[0][5], "nan");
    assert!(String::from_utf8_lossy(&out.stderr).contains("no trials"));
}

#[test]
fn malformed_channel_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write_channel(dir.path(), &ADDER.replace("0 0 1", "0 0 one"));
    let out = cran(&["discrete-lb", "--channel", &ch, "--C", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 8"));
}

#[test]
fn guard_violations_have_their_own_code() {
    assert_eq!(cran(&["sweep", "--M", "1"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let ch = write_channel(dir.path(), ADDER);
    let out = cran(&["simulate", "--channel", &ch, "--rate", "2.4", "--n", "20"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).is_empty());
}

#[test]
fn discrete_bounds_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write_channel(dir.path(), ADDER);
    let grid = ["--cmin", "0", "--cmax", "1.5", "--steps", "4"];
    let lb = stdout(&cran(&[&["discrete-lb", "--channel", &ch][..], &grid].concat()));
    let ub = stdout(&cran(&[&["discrete-ub", "--channel", &ch][..], &grid].concat()));
    for (l, u) in rows(&lb).iter().zip(rows(&ub)) {
        let l: f64 = l[1].parse().unwrap();
        let u: f64 = u[1].parse().unwrap();
        assert!(u >= l - 1e-9);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "M = 4\nP = 2.0\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&cran(&["regimes", "--config", cfg]));
    assert!(from_file.starts_with("M = 4, P = 2"));
    let overridden = stdout(&cran(&["regimes", "--config", cfg, "--M", "2"]));
    assert!(overridden.starts_with("M = 2, P = 2"));
    fs::write(dir.path().join("bad.toml"), "M = \"three\"\n").unwrap();
    let bad = dir.path().join("bad.toml");
    assert_eq!(cran(&["regimes", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cran"))
        .args(["regimes", "--out", "nested/regimes.txt"])
        .env("CRAN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("nested/regimes.txt")).unwrap();
    assert!(text.contains("C_coop"));
}
