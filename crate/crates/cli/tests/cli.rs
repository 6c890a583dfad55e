use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_mwrc");

fn mwrc(out: &Path, args: &[&str]) -> Output {
    Command::new(BIN).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn region_defaults_write_three_polygons() {
    let dir = TempDir::new().unwrap();
    let o = mwrc(dir.path(), &["region"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for (name, tag) in [("capacity", "capacity"), ("fdf_separate", "fdf-separate"), ("cdf", "cdf")] {
        let text = fs::read_to_string(dir.path().join(format!("region_{name}.csv"))).unwrap();
        assert!(text.starts_with("region_name,param_or_vertex_index,R1,R2\n"));
        let r = rows(&dir.path().join(format!("region_{name}.csv")));
        assert!(r.iter().all(|row| row[0] == tag));
        assert_eq!((r[0][2].as_str(), r[0][3].as_str()), ("0", "0"));
    }
    let cap = rows(&dir.path().join("region_capacity.csv"));
    assert!(cap.iter().any(|r| r[2] == "0.2780719051" && r[3] == "0.5310044064"), "{cap:?}");
}

#[test]
fn noiseless_region_is_the_unit_square() {
    let dir = TempDir::new().unwrap();
    let o = mwrc(dir.path(), &["region", "--rho0", "0", "--rho1", "0", "--rho2", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["capacity", "cdf"] {
        let pts: Vec<(String, String)> = rows(&dir.path().join(format!("region_{name}.csv")))
            .into_iter()
            .map(|r| (r[2].clone(), r[3].clone()))
            .collect();
        let want = [("0", "0"), ("1", "0"), ("1", "1"), ("0", "1")];
        if name == "capacity" {
            assert_eq!(pts, want.map(|(a, b)| (a.to_string(), b.to_string())));
        } else {
            // R₁ + R₂ ≤ 1 cuts the square in half.
            assert_eq!(pts.len(), 3, "{pts:?}");
        }
    }
}

#[test]
fn uniform_relay_collapses_capacity() {
    let dir = TempDir::new().unwrap();
    let o = mwrc(dir.path(), &["region", "--rho0", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cap = rows(&dir.path().join("region_capacity.csv"));
    assert_eq!(cap.len(), 1);
    assert_eq!((cap[0][2].as_str(), cap[0][3].as_str()), ("0", "0"));
}

#[test]
fn argument_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["region", "--rho1", "0.7"],
        vec!["region", "--beta-steps", "1"],
        vec!["phase", "--grid", "1"],
        vec!["--threads", "0", "phase", "--grid", "4"],
        vec!["common-rate"],
        vec!["common-rate", "--field", "6", "--users", "2"],
        vec!["selfcheck", "--fields", "2^x"],
        vec!["no-such-command"],
        vec!["simulate", "/nonexistent/config.toml"],
    ] {
        let o = mwrc(dir.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("unknown key", "rates = [\"0.3\", \"0.3\"]\nn_list = [10]\ntrials = 1\nspeed = 3\n[channel]\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n"),
        ("rate count", "rates = [\"0.3\"]\nn_list = [10]\ntrials = 1\n[channel]\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n"),
        ("bad scheme", "scheme = \"af\"\nrates = [\"0.3\", \"0.3\"]\nn_list = [10]\ntrials = 1\n[channel]\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n"),
        ("rho over GF(3)", "rates = [\"0.3\", \"0.3\"]\nn_list = [10]\ntrials = 1\n[channel]\nfield = { char = 3 }\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n"),
        ("pmf sum", "rates = [\"0.3\", \"0.3\"]\nn_list = [10]\ntrials = 1\n[channel]\nnoise = [{ pmf = [0.5, 0.6] }, { rho = 0.1 }, { rho = 0.1 }]\n"),
        ("zero gain", "rates = [\"0.3\", \"0.3\"]\nn_list = [10]\ntrials = 1\n[channel]\nuplink_gains = [1, 0]\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n"),
        ("indivisible n", "rates = [\"0.3\", \"0.4\"]\nn_list = [7]\ntrials = 1\n[channel]\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n"),
        ("not toml", "rates = [\n"),
    ];
    for (what, text) in cases {
        let path = write_config(dir.path(), "bad.toml", text);
        let o = mwrc(dir.path(), &["simulate", &path]);
        assert_eq!(code(&o), 2, "{what}: {}", stderr(&o));
    }
    assert!(!dir.path().join("simulate.csv").exists());
}

#[test]
fn budget_breach_exits_with_three_before_any_trial() {
    let dir = TempDir::new().unwrap();
    // n = 64 over GF(3): the pair code alone needs 3^21 candidates.
    let text = "rates = [\"1/2\", \"1/2\"]\nn_list = [8, 64]\ntrials = 5\n[channel]\nfield = { char = 3 }\n\
                noise = [{ pmf = [0.9, 0.05, 0.05] }, { pmf = [0.9, 0.05, 0.05] }, { pmf = [0.9, 0.05, 0.05] }]\n";
    let path = write_config(dir.path(), "big.toml", text);
    let o = mwrc(dir.path(), &["simulate", &path]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("n = 64"), "{}", stderr(&o));
    assert!(!dir.path().join("simulate.csv").exists());
}

#[test]
fn selfcheck_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = mwrc(dir.path(), &["selfcheck", "--fields", "2;3;2^2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().last().unwrap().ends_with("suites passed"), "{out}");
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 6, "{out}");

    // x² + 1 = (x + 1)² over GF(2).
    let o = mwrc(dir.path(), &["selfcheck", "--fields", "2;2^2:1,0,1"]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("FAIL") && out.contains("[1, 1]"), "{out}");

    let o = mwrc(dir.path(), &["selfcheck", "--fields", ""]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0/0 suites passed"));
    assert!(!stderr(&o).is_empty(), "an empty field list is warned about");
}

#[test]
fn common_rate_sources_agree() {
    let dir = TempDir::new().unwrap();
    let o = mwrc(dir.path(), &["common-rate", "--crossover", "0.1,0.1,0.1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0.5310044064");
    assert_eq!(
        fs::read_to_string(dir.path().join("common_rate.csv")).unwrap(),
        "L,field,common_rate\n2,GF(2),0.5310044064\n"
    );

    let o = mwrc(dir.path(), &["common-rate", "--field", "2^2", "--users", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "1");

    let path = write_config(
        dir.path(),
        "c.toml",
        "rates = [\"0.3\", \"0.3\"]\nn_list = [10]\ntrials = 1\n[channel]\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n",
    );
    let o = mwrc(dir.path(), &["common-rate", "--config", &path]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0.5310044064");
}

#[test]
fn simulate_writes_one_row_per_blocklength() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        dir.path(),
        "s.toml",
        "seed = 5\nrates = [\"0.3\", \"0.3\"]\nn_list = [10, 20]\ntrials = 30\noutput = \"run.csv\"\n\
         [channel]\nnoise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]\n",
    );
    let o = mwrc(dir.path(), &["simulate", &path]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(text.starts_with("scheme,L,field,n,trials,rate_tuple,p_e,ci_low,ci_high,relay_err,user_err,seed\n"));
    let r = rows(&dir.path().join("run.csv"));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][..6], ["fdf", "2", "GF(2)", "10", "30", "3/10;3/10"]);
    assert_eq!(r[1][3], "20");
    assert!(r.iter().all(|row| row[11] == "5"));

    // --seed overrides the file and --trials the count.
    let o = mwrc(dir.path(), &["--seed", "9", "simulate", &path, "--trials", "3"]);
    assert_eq!(code(&o), 0);
    let r = rows(&dir.path().join("run.csv"));
    assert!(r.iter().all(|row| row[11] == "9" && row[4] == "3"));
}

#[test]
fn shipped_experiment_files_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments");
    let mut seen = 0;
    for entry in fs::read_dir(&root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = fs::read_to_string(&path).unwrap();
            mwrc_cli::ExperimentConfig::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        dir.path(),
        "s.toml",
        "rates = [\"1/4\", \"1/4\", \"1/2\"]\nn_list = [12]\ntrials = 40\n[channel]\nfield = { char = 3 }\n\
         uplink_gains = [1, 2, 1]\nnoise = [{ pmf = [0.9, 0.05, 0.05] }, { pmf = [0.95, 0.025, 0.025] }, \
         { pmf = [0.95, 0.025, 0.025] }, { pmf = [0.95, 0.025, 0.025] }]\n",
    );
    let runs: Vec<String> = ["1", "3"]
        .iter()
        .map(|t| {
            let out = dir.path().join(format!("t{t}"));
            let o = mwrc(&out, &["--seed", "4", "--threads", t, "simulate", &path]);
            assert_eq!(code(&o), 0, "{}", stderr(&o));
            fs::read_to_string(out.join("simulate.csv")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}
