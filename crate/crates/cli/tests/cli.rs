use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcx")).args(args).output().expect("dcx runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run(config: &str, out: &Path, extra: &[&str]) -> Output {
    let out = out.to_string_lossy().into_owned();
    let mut args = vec!["run", config, "--output-dir", &out];
    args.extend_from_slice(extra);
    dcx(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

const SAMPLED_HEISENBERG: &str = r#"
schema = 1
[group]
kind = "heisenberg"
[radii]
from = 1
to = 7
[estimator]
mode = "auto"
budget = 20000
samples = 5000
seed = 99
[homomorphisms.mod2]
modulus = 2
[coset_density]
homomorphism = "mod2"
[[checks]]
name = "decreasing-trend"
window = [2, 7]
[[checks]]
name = "negligibility"
samples = 10
seed = 4
"#;

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "h.toml", SAMPLED_HEISENBERG);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run(&cfg, &a, &["--threads", "1"]).status.success());
    assert!(run(&cfg, &b, &["--threads", "4", "--no-cache"]).status.success());
    for f in ["series.csv", "checks.json", "growth.csv", "coset_density.csv", "negligibility.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let modes = column(&a.join("series.csv"), "mode");
    assert!(modes.contains(&"exact".to_string()) && modes.contains(&"sampled".to_string()), "{modes:?}");
    assert!(b.join("cache").read_dir().is_err(), "--no-cache wrote a cache");

    let c = tmp.path().join("c");
    let first = run(&cfg, &c, &[]);
    assert!(first.status.success());
    let second = run(&cfg, &c, &[]);
    assert!(second.status.success());
    let manifest = fs::read_to_string(c.join("manifest.json")).unwrap();
    assert!(manifest.contains("-r7.cbor"), "cached ball not reused: {manifest}");
    assert_eq!(fs::read(a.join("series.csv")).unwrap(), fs::read(c.join("series.csv")).unwrap());
}

#[test]
fn every_csv_has_one_row_per_radius() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "h.toml", SAMPLED_HEISENBERG);
    let out = tmp.path().join("out");
    assert!(run(&cfg, &out, &[]).status.success());
    for f in ["series.csv", "growth.csv", "coset_density.csv", "negligibility.csv"] {
        assert_eq!(data_rows(&out.join(f)), 7, "{f}");
    }

    let stepped = write_config(
        tmp.path(),
        "d.toml",
        r#"
schema = 1
[group]
kind = "infinite-dihedral"
[[generating_sets]]
name = "reflections"
generators = [{ name = "s", word = "s" }, { name = "t", word = "t" }]
[[generating_sets]]
name = "wide"
generators = [{ name = "s", word = "s" }, { name = "t", word = "t" }, { name = "u", word = "s t" }]
[radii]
from = 5
to = 45
step = 10
[estimator]
mode = "exact"
"#,
    );
    let out = tmp.path().join("d");
    assert!(run(&stepped, &out, &[]).status.success());
    for f in ["series.csv", "series_reflections.csv", "series_wide.csv", "growth.csv"] {
        assert_eq!(data_rows(&out.join(f)), 5, "{f}");
    }
    assert_eq!(column(&out.join("series.csv"), "n"), ["5", "15", "25", "35", "45"]);
}

#[test]
fn heisenberg_series_and_growth() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "h.toml",
        "schema = 1\n[group]\nkind = \"heisenberg\"\n[radii]\nfrom = 1\nto = 10\n[estimator]\nmode = \"auto\"\n",
    );
    let out = tmp.path().join("out");
    assert!(run(&cfg, &out, &[]).status.success(), "{}", stderr(&run(&cfg, &out, &[])));
    assert_eq!(data_rows(&out.join("series.csv")), 10);
    assert_eq!(column(&out.join("series.csv"), "exact_num")[0], "17");
    let degree: f64 = column(&out.join("growth.csv"), "local_degree").last().unwrap().parse().unwrap();
    assert!((degree - 4.0).abs() < 0.5, "local degree {degree}");
    let checks: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("checks.json")).unwrap()).unwrap();
    let fit = checks["growth"]["poly_degree_estimate"].as_f64().unwrap();
    assert!((fit - 4.0).abs() < 0.5, "fit {fit}");
}

#[test]
fn q8_gustafson_reports_five_eighths() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "q8.toml",
        "schema = 1\n[group]\nkind = \"quaternion\"\n[measure]\nfamily = \"full-group\"\n[[checks]]\nname = \"gustafson\"\n",
    );
    let out = tmp.path().join("out");
    assert!(run(&cfg, &out, &[]).status.success());
    let checks: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("checks.json")).unwrap()).unwrap();
    let entry = &checks["checks"][0];
    assert_eq!(entry["status"], "pass");
    assert_eq!(entry["lhs"], "5/8");
    assert_eq!(column(&out.join("series.csv"), "exact_num"), ["40"]);
}

#[test]
fn free_group_coset_density_oscillates() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "f.toml",
        r#"
schema = 1
[group]
kind = "free"
rank = 2
[radii]
from = 1
to = 12
[estimator]
mode = "sampled"
samples = 1000
seed = 1
[homomorphisms.parity]
parity = true
[coset_density]
homomorphism = "parity"
"#,
    );
    let out = tmp.path().join("out");
    assert!(run(&cfg, &out, &[]).status.success());
    let values: Vec<f64> = column(&out.join("coset_density.csv"), "value").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(values.len(), 12);
    for (i, v) in values.iter().enumerate() {
        let n = i + 1;
        if n >= 8 {
            let target = if n % 2 == 0 { 0.75 } else { 0.25 };
            assert!((v - target).abs() < 0.01, "n={n}: {v}");
        }
    }
}

fn validate(dir: &Path, text: &str) -> (bool, String) {
    let cfg = write_config(dir, "v.toml", text);
    let o = dcx(&["validate", &cfg]);
    (o.status.success(), stderr(&o))
}

#[test]
fn validate_reports_diagnostics() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let z = "schema = 1\n[group]\nkind = \"integers\"\n[radii]\nfrom = 1\nto = 4\n";

    let (ok, msg) = validate(d, &format!("{z}[estimator]\nmode = \"sampled\"\n"));
    assert!(!ok && msg.contains("error[estimator.seed]"), "{msg}");

    let (ok, msg) = validate(d, &format!("{z}[estimator]\nmode = \"sampled\"\nseed = 1\nsamples = 50\n"));
    assert!(!ok && msg.contains("error[estimator.samples]"), "{msg}");

    let (ok, msg) = validate(d, "schema = 1\n[group]\nkind = \"integers\"\n[radii]\nfrom = 5\nto = 2\n");
    assert!(!ok && msg.contains("error[radii]") && msg.contains("ascending"), "{msg}");

    let padded = "schema = 1\n[group]\nkind = \"infinite-dihedral\"\n[radii]\nfrom = 1\nto = 4\n[measure]\nfamily = \"padded\"\nelement = \"s\"\npadding = { constant = 3 }\n";
    let (ok, msg) = validate(d, padded);
    assert!(!ok && msg.contains("error[measure.element]") && msg.contains("order_of") && msg.contains("order 2"), "{msg}");
    let (ok, msg) = validate(d, &padded.replace("element = \"s\"", "element = \"s t\""));
    assert!(ok, "{msg}");

    let sets = "[[generating_sets]]\nname = \"one\"\ngenerators = [{ name = \"a\", word = \"e1\" }]\n[[generating_sets]]\nname = \"two\"\ngenerators = [{ name = \"a\", word = \"e1\" }, { name = \"b\", word = \"e1^2\" }]\n";
    let (ok, msg) = validate(d, &format!("{z}{sets}"));
    assert!(ok && msg.contains("info[generating_sets]: comparison mode enabled"), "{msg}");

    let (ok, msg) = validate(d, "schema = 1\n[group]\nkind = \"free-abelian\"\nrank = 2\n[radii]\nfrom = 1\nto = 4\n[measure]\nfamily = \"random-walk\"\n");
    assert!(ok && msg.contains("warning[measure.laziness]") && msg.contains("bipartite"), "{msg}");
    let (ok, msg) = validate(d, "schema = 1\n[group]\nkind = \"free-product\"\norders = [3, 3]\n[radii]\nfrom = 1\nto = 4\n[measure]\nfamily = \"random-walk\"\n");
    assert!(ok && !msg.contains("bipartite"), "{msg}");

    let (ok, msg) = validate(
        d,
        "schema = 1\n[group]\nkind = \"semidirect\"\ndim = 1\nmatrices = [[-1]]\n[radii]\nfrom = 1\nto = 3\n[homomorphisms.parity]\nparity = true\n",
    );
    assert!(ok && msg.contains("warning[homomorphisms.parity]") && msg.contains("unverified"), "{msg}");

    let (ok, msg) = validate(d, "schema = 1\n[group]\nkind = \"rewriting\"\nsystem = \"letters: a A c C b B\\ninverses: a A, b B, c C\\nrule: ab -> a\\nrule: b -> c\\n\"\n[radii]\nfrom = 1\nto = 3\n");
    assert!(!ok && msg.contains("error[group]") && msg.contains("confluent"), "{msg}");

    let (ok, msg) = validate(d, "schema = 1\n[group]\nkind = \"integers\"\n[radii]\nfrom = 1\nto = \"x\"\n");
    assert!(!ok && msg.contains("line 6"), "{msg}");

    let (ok, msg) = validate(d, "schema = 2\n[group]\nkind = \"integers\"\n[radii]\nfrom = 1\nto = 2\n");
    assert!(!ok && msg.contains("error[schema]"), "{msg}");

    let (ok, msg) = validate(d, &format!("{z}[[checks]]\nname = \"gallagher\"\nhomomorphism = \"missing\"\n"));
    assert!(!ok && msg.contains("no homomorphism named 'missing'"), "{msg}");
}

#[test]
fn run_refuses_invalid_configs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "schema = 1\n[group]\nkind = \"integers\"\n[radii]\nfrom = 1\nto = 3\n[estimator]\nmode = \"sampled\"\n");
    let out = tmp.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn failing_check_sets_exit_status() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "z.toml",
        "schema = 1\n[group]\nkind = \"free-product\"\norders = [2, 2, 2]\n[radii]\nfrom = 1\nto = 8\n[[checks]]\nname = \"negligibility\"\nseed = 3\nwindow = [3, 8]\n",
    );
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn sample_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let o = dcx(&["validate", path.to_str().unwrap()]);
            assert!(o.status.success(), "{}: {}", path.display(), stderr(&o));
        }
    }
}
