use birkdist_cli::config::{ExperimentConfig, SystemSpec, TrigTerm};
use birkdist_cli::output::RunManifest;
use proptest::prelude::*;
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn birkdist(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_birkdist"));
    c.args(args);
    for var in ["BIRKDIST_CONFIG", "BIRKDIST_OUT", "BIRKDIST_SEED", "BIRKDIST_THREADS"] {
        c.env_remove(var);
    }
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

/// Runs `command` with `config` into `dir/out` and returns the output dir.
fn run(dir: &Path, config: &str, command: &str, out: &str) -> PathBuf {
    let cfg = write_config(dir, &format!("{out}.toml"), config);
    let out = dir.join(out);
    let o = birkdist(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), command], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn spectrum_of_doubling() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), "[spectral]\nbins = 1024\n", "spectrum", "spec");
    let j: Value = serde_json::from_str(&fs::read_to_string(out.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(j["eigenvalues"], serde_json::json!([[1.0, 0.0]]));
    assert_eq!(j["period"], 1);
    assert_eq!(j["components"], 1);
    let rows = csv(&out.join("densities.csv"));
    assert_eq!(rows.len(), 1024);
    assert!(rows.iter().all(|r| (r[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-6));
    let m = manifest(&out);
    assert_eq!(m.verdicts["spectrum.period"], 1);
    assert_eq!(m.files.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["spectrum.json", "densities.csv", "config.toml"]);
}

#[test]
fn prop_l_counts_on_cat() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), "[system]\nkind = \"cat\"\n[prop_l]\nps = [[1, 0]]\n", "prop-l", "prop");
    let rows = csv(&out.join("crossings.csv"));
    assert_eq!(rows.len(), 41);
    assert!(rows.iter().all(|r| r[0] == "1 0"));
    let max = rows.iter().map(|r| r[2].parse::<usize>().unwrap()).max().unwrap();
    assert_eq!(max, 2);
    assert_eq!(manifest(&out).verdicts["prop-l.max"], 2);
}

#[test]
fn primitive_of_zero_is_zero() {
    let tmp = TempDir::new().unwrap();
    let config = "[observable]\nkind = \"piecewise\"\n[[observable.pieces]]\nlo = 0.0\nhi = 1.0\nterms = []\n\
                  [primitive]\nlevel = 6\n";
    let out = run(tmp.path(), config, "primitive", "zero");
    let rows = csv(&out.join("primitive.csv"));
    assert_eq!(rows.len(), 65);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let config = "[clt]\nsamples = 64\nscale_exponents = [10, 12]\n";
    let a = run(tmp.path(), config, "clt-modulus", "a");
    let cfg = write_config(tmp.path(), "b.toml", config);
    let b = tmp.path().join("b");
    let o = birkdist(
        &["--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--threads", "1", "clt-modulus"],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["clt.csv", "clt_samples.csv", "clt.json", "config.toml", "manifest.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let c = tmp.path().join("c");
    let o = birkdist(&["--config", cfg.to_str().unwrap(), "--out", c.to_str().unwrap(), "--seed", "7", "clt-modulus"], &[]);
    assert_eq!(code(&o), 0);
    assert_ne!(fs::read(a.join("clt_samples.csv")).unwrap(), fs::read(c.join("clt_samples.csv")).unwrap());
    assert_ne!(manifest(&a).config_hash, manifest(&c).config_hash);
}

#[test]
fn manifest_checksums_match_files() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), "[system]\nkind = \"cat\"\n", "advect", "adv");
    let m = manifest(&out);
    for f in &m.files {
        let bytes = fs::read(out.join(&f.name)).unwrap();
        assert_eq!(bytes.len(), f.bytes);
        use sha2::Digest;
        assert_eq!(hex::encode(sha2::Sha256::digest(&bytes)), f.sha256);
    }
    let rows = csv(&out.join("advect.csv"));
    assert!(rows[1..].iter().all(|r| r[1] == "5.0000000000000000e-1" && r[2] == "0.0000000000000000e0"));
}

#[test]
fn env_vars_mirror_flags() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "cat.toml", "[system]\nkind = \"cat\"\n[prop_l]\nps = [[1, 1]]\nlevel_max = 4\n");
    let out = tmp.path().join("env-out");
    let o = birkdist(
        &["prop-l"],
        &[("BIRKDIST_CONFIG", cfg.to_str().unwrap()), ("BIRKDIST_OUT", out.to_str().unwrap()), ("BIRKDIST_SEED", "99")],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(manifest(&out).seed, 99);
    let flag = tmp.path().join("flag-out");
    let o = birkdist(&["--out", flag.to_str().unwrap(), "prop-l"], &[("BIRKDIST_CONFIG", cfg.to_str().unwrap())]);
    assert_eq!(code(&o), 0);
    assert!(flag.join("manifest.json").exists());
}

#[test]
fn validate_fills_defaults() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "min.toml", "");
    let o = birkdist(&["--config", cfg.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let parsed = ExperimentConfig::from_toml(&text).unwrap();
    assert_eq!(parsed, ExperimentConfig::default().normalized());
    assert!(text.contains("[observable]") && text.contains("[decay]") && text.contains("seed = 24301"));
    // Validating the normalized form again changes nothing.
    let again = write_config(tmp.path(), "again.toml", &text);
    let o = birkdist(&["--config", again.to_str().unwrap(), "validate"], &[]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), text);
}

#[test]
fn validate_rejects_nonzero_mean() {
    let tmp = TempDir::new().unwrap();
    let config = "[observable]\nkind = \"piecewise\"\n[[observable.pieces]]\nlo = 0.0\nhi = 1.0\n\
                  terms = [{ kind = \"poly\", coef = 1.0, power = 1 }]\n";
    let cfg = write_config(tmp.path(), "mean.toml", config);
    let o = birkdist(&["--config", cfg.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("zero mean"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn validate_rejects_contracting_branch() {
    let tmp = TempDir::new().unwrap();
    let config = "[system]\nkind = \"map\"\nname = \"slow\"\n\
                  [[system.branches]]\nlo = 0.0\nhi = 1.0\nkind = \"affine\"\nslope = 1.0\noffset = 0.0\n";
    let cfg = write_config(tmp.path(), "slow.toml", config);
    let o = birkdist(&["--config", cfg.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not expanding"), "{}", stderr(&o));
}

#[test]
fn validate_aggregates_violations() {
    let tmp = TempDir::new().unwrap();
    let config = "[system]\nkind = \"cat\"\n[observable]\nkind = \"trig\"\nterms = [{ k = [0, 0], cos = 1.0 }]\n\
                  [prop_l]\nps = [[1, 0, 0]]\nj_min = 3\nj_max = 1\n";
    let cfg = write_config(tmp.path(), "bad.toml", config);
    let o = birkdist(&["--config", cfg.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert!(e.contains("3 violation(s)"), "{e}");
    assert!(e.contains("zero mean") && e.contains("prop_l.ps") && e.contains("j_min"), "{e}");

    let mixed = write_config(tmp.path(), "mixed.toml", "[system]\nkind = \"cat\"\n[observable]\nkind = \"piecewise\"\npieces = []\n");
    let o = birkdist(&["--config", mixed.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("trig observable"), "{}", stderr(&o));
}

#[test]
fn report_merges_manifests() {
    let tmp = TempDir::new().unwrap();
    let o = birkdist(&["report"], &[]);
    assert_eq!(code(&o), 0);
    let empty: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(empty["verdicts"], serde_json::json!({}));
    assert_eq!(empty["sources"], serde_json::json!([]));

    let cat = "[system]\nkind = \"cat\"\n[prop_l]\nps = [[1, 0]]\nlevel_max = 6\n";
    let a = run(tmp.path(), cat, "prop-l", "a");
    let one = birkdist(&["report", a.join("manifest.json").to_str().unwrap()], &[]);
    assert_eq!(code(&one), 0);
    let one: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(one["verdicts"], serde_json::to_value(&manifest(&a).verdicts).unwrap());

    let b = run(tmp.path(), "[system]\nkind = \"cat\"\n", "advect", "b");
    let both = birkdist(&["report", a.join("manifest.json").to_str().unwrap(), b.join("manifest.json").to_str().unwrap()], &[]);
    assert_eq!(code(&both), 0);
    let both: Value = serde_json::from_slice(&both.stdout).unwrap();
    assert_eq!(both["sources"].as_array().unwrap().len(), 2);
    assert!(both["verdicts"].get("prop-l.max").is_some() && both["verdicts"].get("advect.limit").is_some());
}

#[test]
fn report_rejects_conflicts_and_versions() {
    let tmp = TempDir::new().unwrap();
    let a = run(tmp.path(), "[system]\nkind = \"cat\"\n[prop_l]\nps = [[1, 0]]\nlevel_max = 6\n", "prop-l", "a");
    let pa = a.join("manifest.json");
    let mut other = manifest(&a);
    other.verdicts.insert("prop-l.max".into(), serde_json::json!(3));
    let pb = tmp.path().join("other.json");
    fs::write(&pb, serde_json::to_vec(&other).unwrap()).unwrap();
    let o = birkdist(&["report", pa.to_str().unwrap(), pb.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert!(e.contains("prop-l.max") && e.contains(pa.to_str().unwrap()) && e.contains(pb.to_str().unwrap()), "{e}");

    let mut old = manifest(&a);
    old.version = "0.0.1".into();
    let po = tmp.path().join("old.json");
    fs::write(&po, serde_json::to_vec(&old).unwrap()).unwrap();
    let o = birkdist(&["report", pa.to_str().unwrap(), po.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("0.0.1"), "{}", stderr(&o));
}

#[test]
fn exit_codes_separate_failure_kinds() {
    let tmp = TempDir::new().unwrap();
    let path = |name: &str, text: &str| write_config(tmp.path(), name, text).to_str().unwrap().to_string();

    assert_eq!(code(&birkdist(&["no-such-command"], &[])), 2);
    assert_eq!(code(&birkdist(&["--config", &path("broken.toml", "seed = \"x\""), "spectrum"], &[])), 2);
    assert_eq!(code(&birkdist(&["--config", "/nonexistent/birkdist.toml", "spectrum"], &[])), 1);
    assert_eq!(code(&birkdist(&["--config", &path("kind.toml", "[system]\nkind = \"cat\"\n"), "spectrum"], &[])), 2);

    // ∫φ dm = 1/2 ≠ 0.
    let mean = path(
        "mean.toml",
        "[observable]\nkind = \"piecewise\"\n[[observable.pieces]]\nlo = 0.0\nhi = 1.0\n\
         terms = [{ kind = \"poly\", coef = 1.0, power = 1 }]\n",
    );
    let out = tmp.path().join("pre");
    let o = birkdist(&["--config", &mean, "--out", out.to_str().unwrap(), "primitive"], &[]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("precondition violated"));
    assert!(!out.exists(), "a failed run wrote files");

    let strict = path(
        "strict.toml",
        "[observable]\nkind = \"piecewise\"\n[[observable.pieces]]\nlo = 0.0\nhi = 1.0\n\
         terms = [{ kind = \"sin\", coef = 1.0, freq = 2.0 }, { kind = \"sin\", coef = -1.0, freq = 1.0 }]\n\
         [coboundary]\nresidual_tol = 1e-30\ngrid = 16\n",
    );
    let out = tmp.path().join("num");
    let o = birkdist(&["--config", &strict, "--out", out.to_str().unwrap(), "coboundary"], &[]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(!out.exists());

    let omega = path("omega.toml", "[system]\nkind = \"circle\"\nmultiplier = 2\n[blocks]\ndirection = \"omega\"\n");
    let o = birkdist(&["--config", &omega, "--out", tmp.path().join("uns").to_str().unwrap(), "anosov-blocks"], &[]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configs_round_trip(
        seed in 0u64..=i64::MAX as u64,
        threads in 0usize..64,
        cat in any::<bool>(),
        k in proptest::collection::vec((-9i64..9, -9i64..9, -2.0f64..2.0, -2.0f64..2.0), 0..4),
        exps in proptest::collection::vec(1i32..40, 1..5),
        tol in 1e-16f64..1e-2,
    ) {
        let mut c = ExperimentConfig { seed, threads, ..Default::default() };
        if cat {
            c.system = SystemSpec::Cat;
        }
        c.advect.rho0 = k.iter().map(|&(a, b, x, y)| TrigTerm { k: vec![a, b], cos: x, sin: y }).collect();
        c.clt.scale_exponents = exps;
        c.deform.tol = tol;
        let c = c.normalized();
        let text = c.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml().unwrap(), text);
        prop_assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }
}
