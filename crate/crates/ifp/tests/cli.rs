use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ifp::csvio::Table;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ifp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifp"))
        .args(args)
        .env("IFP_LOG", "error")
        .output()
        .unwrap()
}

fn run(sub: &str, config: &Path, out: &Path) -> Output {
    ifp(&[
        sub,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn summary(path: &Path) -> toml::Table {
    fs::read_to_string(path).unwrap().parse().unwrap()
}

fn floats(v: &toml::Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_float().unwrap())
        .collect()
}

/// `value` column of the first row whose quantity matches.
fn kv(table: &Table, quantity: &str) -> String {
    table
        .rows
        .iter()
        .find(|r| r[0] == quantity)
        .unwrap_or_else(|| panic!("no {quantity}"))[2]
        .clone()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn swap_half() -> String {
    configs()
        .join("mappings/swap_half.toml")
        .display()
        .to_string()
}

#[test]
fn solve_affine_reports_linear_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run("solve", &configs().join("affine.toml"), tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&tmp.path().join("summary.txt"));
    assert_eq!(s["outcome"].as_str(), Some("converged"));
    for x in floats(&s["x_star"]) {
        assert!((x - 2.0).abs() < 1e-10);
    }
    let rate = s["fitted_rate"].as_float().unwrap();
    assert!((rate - 0.5).abs() < 0.025, "{rate}");

    let trace = Table::read(&tmp.path().join("trace.csv")).unwrap();
    // one row per iterate; the final iterate has no residual yet
    assert_eq!(
        trace.rows.len() as i64,
        s["iterations"].as_integer().unwrap() + 1
    );
    let residuals = trace.float_column("residual").unwrap();
    assert_eq!(residuals.last(), Some(&None));
    assert!(residuals[residuals.len() - 2].unwrap() < 1e-12);
}

#[test]
fn converged_start_takes_one_iteration() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        &format!("mapping_path = {:?}\nstart = [2.0, 2.0]\n", swap_half()),
    );
    let o = run("solve", &cfg, &tmp.path().join("out"));
    assert_eq!(code(&o), 0);
    let s = summary(&tmp.path().join("out/summary.txt"));
    assert_eq!(s["iterations"].as_integer(), Some(1));
}

#[test]
fn infeasible_map_exits_diverged() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run("solve", &configs().join("infeasible.toml"), tmp.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverged"));
    assert!(tmp.path().join("trace.csv").is_file());
}

#[test]
fn distinct_error_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let bad = write_config(tmp.path(), "bad.toml", "bogus = 1\n");
    assert_eq!(code(&run("solve", &bad, &out)), 2);
    let dangling = write_config(
        tmp.path(),
        "dangling.toml",
        "mapping_path = \"missing.toml\"\n",
    );
    assert_eq!(code(&run("solve", &dangling, &out)), 2);
    assert_eq!(code(&ifp(&["solve"])), 2);

    let short = write_config(
        tmp.path(),
        "short.toml",
        &format!(
            "mapping_path = {:?}\n[stop]\ntol = 1e-12\nmax_iter = 3\n",
            swap_half()
        ),
    );
    assert_eq!(code(&run("solve", &short, &out)), 4);

    fs::write(tmp.path().join("file"), "").unwrap();
    let o = run(
        "solve",
        &configs().join("affine.toml"),
        &tmp.path().join("file/sub"),
    );
    assert_eq!(code(&o), 5);
    assert!(!o.stderr.is_empty());
}

#[test]
fn spectral_demos() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, method, rho, certified) in [
        ("spectral_primitive", "krause", 0.7, "false"),
        ("spectral_periodic", "epsilon", 0.5, "true"),
        ("spectral_zero", "krause", 0.0, "false"),
    ] {
        let out = tmp.path().join(name);
        let o = run("spectral", &configs().join(format!("{name}.toml")), &out);
        assert_eq!(code(&o), 0, "{name}");
        let t = Table::read(&out.join("spectral.csv")).unwrap();
        assert_eq!(kv(&t, "method"), method, "{name}");
        let got: f64 = kv(&t, "rho").parse().unwrap();
        assert!((got - rho).abs() < 1e-6, "{name}: {got}");
        assert_eq!(kv(&t, "upper_bound_certified"), certified);
        if method == "epsilon" {
            assert!(got >= rho);
        }
    }
}

#[test]
fn contraction_and_loadsim_run() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "contraction",
        &configs().join("contraction.toml"),
        &tmp.path().join("c"),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    Table::read(&tmp.path().join("c/contraction.csv")).unwrap();

    let o = run(
        "loadsim",
        &configs().join("loadsim.toml"),
        &tmp.path().join("l"),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["snapshot.toml", "loadsim.csv", "trace.csv"] {
        assert!(tmp.path().join("l").join(f).is_file(), "{f}");
    }
    ifp::documents::read_snapshot(&tmp.path().join("l/snapshot.toml")).unwrap();
}

#[test]
fn fig1_is_deterministic_and_bounded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("fig1.toml");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&run("fig1", &cfg, &a)), 0);
    assert_eq!(code(&run("fig1", &cfg, &b)), 0);
    for f in [
        "fig1_rho_0.5.csv",
        "fig1_rho_0.99.csv",
        "fig1_plot_data.csv",
        "snapshot.toml",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }

    let t = Table::read(&a.join("fig1_rho_0.99.csv")).unwrap();
    assert_eq!(t.header, ["n", "error_l2", "lower_bound"]);
    let errors = t.float_column("error_l2").unwrap();
    let bounds = t.float_column("lower_bound").unwrap();
    assert!(bounds.iter().any(Option::is_some));
    for (e, l) in errors.iter().zip(&bounds) {
        if let (Some(e), Some(l)) = (e, l) {
            assert!(l <= e);
        }
    }

    let s = summary(&a.join("fig1_summary.txt"));
    let ratio = s["iteration_ratio"].as_float().unwrap();
    let predicted = s["predicted_ratio"].as_float().unwrap();
    assert!(
        (0.5 * predicted..=2.0 * predicted).contains(&ratio),
        "{ratio}"
    );
}

#[test]
fn fig1_rejects_infeasible_target() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("fig1.toml"))
        .unwrap()
        .replace("[0.5, 0.99]", "[0.5, 1.2]");
    let cfg = write_config(tmp.path(), "f.toml", &text);
    assert_eq!(code(&run("fig1", &cfg, &tmp.path().join("out"))), 2);
}

#[test]
fn csv_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let mut t = Table::new(&["n", "value"]);
    t.push(vec!["1".into(), ifp::csvio::float(0.1)]);
    t.push(vec!["2".into(), ifp::csvio::float(-1.0 / 3.0)]);
    let p = tmp.path().join("t.csv");
    t.write(&p).unwrap();
    let back = Table::read(&p).unwrap();
    assert_eq!(back.header, t.header);
    assert_eq!(
        back.float_column("value").unwrap(),
        [Some(0.1), Some(-1.0 / 3.0)]
    );
}

#[test]
fn schemas_list_document_fields() {
    let docs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas");
    let mapping = fs::read_to_string(docs.join("mapping.schema")).unwrap();
    for key in [
        "variant",
        "matrix",
        "offset",
        "sqrt_weights",
        "beta",
        "snapshot_path",
    ] {
        assert!(mapping.contains(&format!("\"{key}\"")), "{key}");
    }
    let snapshot = fs::read_to_string(docs.join("snapshot.schema")).unwrap();
    for key in [
        "radio",
        "stations",
        "users",
        "gains",
        "serving_station",
        "demand_bps",
    ] {
        assert!(snapshot.contains(&format!("\"{key}\"")), "{key}");
    }
}
