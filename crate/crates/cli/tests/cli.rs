use std::path::Path;
use std::process::{Command, Output};

fn nk_arena(args: &[&str], data: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nk-arena"))
        .args(args)
        .env("NK_ARENA_DATA", data)
        .current_dir(data)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn number(o: &Output) -> f64 {
    stdout(o).trim().parse().unwrap()
}

#[test]
fn analytic_values() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = nk_arena(&["analytic", "--n", "12", "--m", "10", "--which", "mean-cost"], d);
    assert!(o.status.success());
    assert!((number(&o) - 1.0011).abs() < 1e-4);
    let o = nk_arena(&["analytic", "--n", "12", "--m", "1", "--which", "mean-t"], d);
    assert_eq!(number(&o), 4096.0);
    let o = nk_arena(&["analytic", "--n", "12", "--m", "10", "--which", "cdf", "--t", "inf"], d);
    assert_eq!(number(&o), 1.0);
    let o = nk_arena(&["analytic", "--n", "12", "--m", "10", "--which", "cdf", "--t", "1e6"], d);
    assert!(number(&o) > 0.999_999);
    let o = nk_arena(&["analytic", "--n", "12", "--m", "1", "--which", "mean-t", "--degenerate"], d);
    assert_eq!(number(&o), 2048.0);
    let o = nk_arena(&["analytic", "--n", "12", "--which", "pmf"], d);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = nk_arena(&["gen", "--n", "12", "--k", "12"], d);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("k=12"));
    assert_eq!(nk_arena(&["gen", "--n", "12", "--bogus"], d).status.code(), Some(1));
    assert_eq!(nk_arena(&["figure", "--which", "9"], d).status.code(), Some(1));
    assert_eq!(nk_arena(&["analytic", "--n", "12", "--which", "median"], d).status.code(), Some(1));
    assert_eq!(nk_arena(&["frobnicate"], d).status.code(), Some(1));
}

#[test]
fn help_lists_flags_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    for sub in ["gen", "run", "stats", "figure", "analytic"] {
        let o = nk_arena(&[sub, "--help"], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{sub}");
        let text = stdout(&o);
        assert!(text.contains("--"), "{sub}");
    }
    let text = stdout(&nk_arena(&["run", "--help"], tmp.path()));
    for flag in ["--ensemble", "--algo", "--m", "--u", "--runs", "--tmax", "--seed", "--out", "--jobs"] {
        assert!(text.contains(flag), "{flag}");
    }
    assert!(text.contains("[default: 1000]"));
    assert!(text.contains("[default: 20200214]"));
}

#[test]
fn gen_is_deterministic_and_refuses_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let args = ["gen", "--family", "nk", "--n", "10", "--k", "2", "--count", "5", "--seed", "7"];
    let first = nk_arena(&args, d);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(d.join("N10_K2/landscape_004.nkl").exists());
    assert!(d.join("N10_K2/manifest.csv").exists());

    let again = nk_arena(&args, d);
    assert_eq!(again.status.code(), Some(2));

    let mut forced = args.to_vec();
    forced.push("--overwrite");
    let forced = nk_arena(&forced, d);
    assert!(forced.status.success());
    let digest = |o: &Output| stdout(o).split("sha256 ").nth(1).unwrap().trim().to_string();
    assert_eq!(digest(&first), digest(&forced));
}

#[test]
fn run_writes_tables_and_matches_blind_search_baseline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(nk_arena(&["gen", "--n", "10", "--count", "10", "--seed", "3"], d).status.success());
    let o = nk_arena(
        &["run", "--ensemble", "N10_K0", "--algo", "bs", "--m", "10", "--runs", "200", "--out", "out", "--jobs", "2"],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let results = std::fs::read_to_string(d.join("out/results.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,n,k,algorithm,m,u,t_max,landscapes,runs_per_landscape,mean_cost,stderr_cost,mean_tstar,\
         censored_fraction,success_fraction_final,master_seed"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mean_cost: f64 = row[9].parse().unwrap();
    let stderr_cost: f64 = row[10].parse().unwrap();

    let analytic = nk_arena(&["analytic", "--n", "10", "--m", "10", "--which", "mean-cost"], d);
    let expected = number(&analytic);
    assert!((mean_cost - expected).abs() <= 3.0 * stderr_cost, "{mean_cost} vs {expected} +/- {stderr_cost}");
    assert!(d.join("out/trace.csv").exists());
    assert!(d.join("out/metadata.json").exists());
}

#[test]
fn run_forces_single_walker() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(nk_arena(&["gen", "--family", "ising-ni", "--n", "12", "--count", "1"], d).status.success());
    let o = nk_arena(&["run", "--ensemble", "ising-ni_N12", "--algo", "raw", "--m", "5", "--runs", "20"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: raw runs a single walker; m=5 replaced by 1"));
    let results = std::fs::read_to_string(d.join("results/results.csv")).unwrap();
    assert!(results.lines().nth(1).unwrap().starts_with("ising-ni,12,0,raw,1,0.0,"));
}

#[test]
fn run_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(nk_arena(&["gen", "--n", "8", "--k", "2", "--count", "3"], d).status.success());
    let mut outputs = Vec::new();
    for (out, jobs) in [("a", "1"), ("b", "3")] {
        let o = nk_arena(
            &["run", "--ensemble", "N8_K2", "--algo", "il,sga", "--m", "5,20", "--u", "0.05,0.2", "--runs", "10",
              "--out", out, "--jobs", jobs],
            d,
        );
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push((
            std::fs::read(d.join(out).join("results.csv")).unwrap(),
            std::fs::read(d.join(out).join("trace.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows = String::from_utf8(outputs[0].0.clone()).unwrap().lines().count();
    assert_eq!(rows, 1 + 2 * 2 * 2);
}

#[test]
fn missing_ensemble_exits_2_with_path() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nk_arena(&["run", "--ensemble", "no/such/ensemble", "--algo", "bs"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no/such/ensemble"));
}

#[test]
fn stats_reports_k0_single_maximum() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nk_arena(&["stats", "--n", "10", "--k", "0", "--count", "5", "--pairs", "1000"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("mean local maxima: 1.000"), "{text}");
    assert!(text.contains("1-(K+1)/N: 0.900000"));
}
