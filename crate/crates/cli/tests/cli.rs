use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn imtm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imtm"))
        .args(args)
        .env("IMTM_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const MH_NORMAL: &str = r#"
seed = 11

[target]
kind = "gaussian"
dim = 1

[sampler]
algorithm = "mh"
chains = 2
kernels = ["rw(2.5)"]
iterations = 100
init_scale = 1.0

[diagnostics]
acf_max_lag = 10
iact = true
"#;

const DP_BIMODAL: &str = r#"
seed = 5

[target]
kind = "bimodal"

[sampler]
algorithm = "mtm-dp"
kernels = ["rw(0.1)", "rw(5)", "rw(50)", "rw(100)"]
lambda = "harmonic"
iterations = 2000
init = [[5.0, 5.0]]
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn missing_config_exits_2_naming_path() {
    let tmp = tempfile::tempdir().unwrap();
    let o = imtm(&["run", "/no/such/config.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/config.toml"), "{}", stderr(&o));
}

#[test]
fn minimal_run_writes_initial_state_plus_iterations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "mh.toml", MH_NORMAL);
    let out = tmp.path().join("out");
    let o = imtm(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = fs::read_to_string(out.join("trace_mh_seed11.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iter,chain,accepted,J,x_1"));
    let rows: Vec<&str> = lines.collect();
    for chain in ["1", "2"] {
        assert_eq!(rows.iter().filter(|r| r.split(',').nth(1) == Some(chain)).count(), 101);
    }
    assert!(!trace.contains('\r'));
    let report = fs::read_to_string(out.join("report_mh_seed11.csv")).unwrap();
    assert!(report.starts_with("method,statistic,value,replicates\n"));
    assert!(report.contains("mh,acceptance,"));
    assert_eq!(fs::read_to_string(out.join("acf_x1_mh_seed11.csv")).unwrap().lines().count(), 12);
    assert!(out.join("summary_mh_seed11.txt").exists());
    assert!(out.join("config_resolved.toml").exists());
}

#[test]
fn same_config_same_bytes_and_resolved_config_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "mh.toml", MH_NORMAL);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for dir in [&a, &b] {
        let o = imtm(&["run", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()], tmp.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let resolved = a.join("config_resolved.toml");
    let o = imtm(&["run", resolved.to_str().unwrap(), "--out", c.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let fa = sorted_files(&a);
    assert!(fa.len() >= 5);
    for other in [&b, &c] {
        let fo = sorted_files(other);
        assert_eq!(fa.len(), fo.len());
        for (x, y) in fa.iter().zip(&fo) {
            assert_eq!(x.file_name(), y.file_name());
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{:?}", x.file_name());
        }
    }
}

#[test]
fn env_var_sets_default_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "mh.toml", MH_NORMAL);
    let env_out = tmp.path().join("from-env");
    let o = imtm(&["run", cfg.to_str().unwrap()], &env_out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_out.join("trace_mh_seed11.csv").exists());
}

#[test]
fn validation_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_key = write_config(tmp.path(), "k.toml", &MH_NORMAL.replace("chains = 2", "chians = 2"));
    let o = imtm(&["run", bad_key.to_str().unwrap()], &tmp.path().join("o1"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("chians"), "{}", stderr(&o));

    let bad_imtm = write_config(
        tmp.path(),
        "i.toml",
        &MH_NORMAL.replace("algorithm = \"mh\"", "algorithm = \"imtm\"\nanchors = \"uniform\"\ntrials = 2")
            .replace("rw(2.5)", "anchored(1)\", \"anchored(2)"),
    );
    let o = imtm(&["run", bad_imtm.to_str().unwrap()], &tmp.path().join("o2"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("N > M"), "{}", stderr(&o));
    assert!(!tmp.path().join("o1").exists() && !tmp.path().join("o2").exists());
}

#[test]
fn sampler_failure_exits_3_and_leaves_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "grid.toml",
        r#"
[target]
kind = "grid"
masses = [1.0, 3.0]

[sampler]
algorithm = "mh"
kernels = ["discrete(1)"]
init_center = [0.3]
init_scale = 0.1
"#,
    );
    let out = tmp.path().join("out");
    let o = imtm(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn reproduce_rejects_unknown_id_and_missing_data() {
    let tmp = tempfile::tempdir().unwrap();
    let o = imtm(&["reproduce", "e9-nothing"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for id in ["e1-bivariate-mtmdp", "e2-multivariate", "e3-imtm-bimodal", "e4-betabinomial", "e5-sv"] {
        assert!(err.contains(id), "{err}");
    }
    let o = imtm(&["reproduce", "e4-betabinomial"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--synthetic"));
}

#[test]
fn reproduce_e4_with_ingested_data() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("loh.csv");
    let mut text = String::from("x,n\n");
    for i in 0..30 {
        let (x, n) = if i % 10 == 0 { (14, 18) } else { (3 + i % 4, 20) };
        text.push_str(&format!("{x},{n}\n"));
    }
    fs::write(&data, text).unwrap();
    let out = tmp.path().join("out");
    let o = imtm(
        &["reproduce", "e4-betabinomial", "--seed", "3", "--data", data.to_str().unwrap(), "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("report_e4-betabinomial_seed3.csv").exists());
    assert!(out.join("population_e4-betabinomial_seed3.csv").exists());
    let pop = fs::read_to_string(out.join("population_e4-betabinomial_seed3.csv")).unwrap();
    assert_eq!(pop.lines().count(), 1 + 2 * 100);
}

fn dp_trace(tmp: &Path) -> PathBuf {
    let cfg = write_config(tmp, "dp.toml", DP_BIMODAL);
    let out = tmp.join("run");
    let o = imtm(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], tmp);
    assert!(o.status.success(), "{}", stderr(&o));
    out.join("trace_mtm-dp_seed5.csv")
}

#[test]
fn diag_acf_hpd_and_occupancy() {
    let tmp = tempfile::tempdir().unwrap();
    let trace = dp_trace(tmp.path());
    let out = tmp.path().join("diag");
    let o = imtm(
        &[
            "diag",
            trace.to_str().unwrap(),
            "acf_max_lag=30,hpd_level=0.9,occupancy_centers=0 0;10 10,occupancy_radius=3,occupancy_covariances=0.1 0 0 0.5;0.5 0 0 0.1",
            "--out",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for k in 1..=2 {
        let acf = fs::read_to_string(out.join(format!("trace_mtm-dp_seed5_acf_x{k}.csv"))).unwrap();
        assert_eq!(acf.lines().count(), 1 + 31);
        let hpd = fs::read_to_string(out.join(format!("trace_mtm-dp_seed5_hpd_x{k}.csv"))).unwrap();
        let lines: Vec<&str> = hpd.lines().collect();
        assert_eq!(lines[0], "lower,upper");
        assert_eq!(lines[1].split(',').count(), 2);
    }
    let occ = fs::read_to_string(out.join("trace_mtm-dp_seed5_occupancy.csv")).unwrap();
    assert_eq!(occ.lines().count(), 4);
    assert!(occ.lines().last().unwrap().starts_with("remainder,"));
}

#[test]
fn diag_overlapping_balls_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let trace = dp_trace(tmp.path());
    let out = tmp.path().join("diag");
    let o = imtm(
        &["diag", trace.to_str().unwrap(), "occupancy_centers=0 0;1 1,occupancy_radius=3", "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn diag_malformed_row_names_line() {
    let tmp = tempfile::tempdir().unwrap();
    let trace = tmp.path().join("bad.csv");
    fs::write(&trace, "iter,chain,accepted,J,x_1\n0,1,0,0,0.5\n1,1,1,1,abc\n").unwrap();
    let o = imtm(&["diag", trace.to_str().unwrap(), "acf_max_lag=1"], &tmp.path().join("d"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('3'), "{}", stderr(&o));
}
