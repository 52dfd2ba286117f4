use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command as Proc, Output};

use zkwave::driver::output::{read_spectrum, SPECTRUM_SCHEMA};
use zkwave::driver::*;
use zkwave::solver::read_checkpoint;
use zkwave::Error;

const SMALL: &str = r#"
seed = 11

[lattice]
dim = 2
size = 6
radius = 1.0

[model]
lambda = 0.3

[profile]
diameter = 1.6

[time]
t_final = 0.2
dt = 0.05

[ensemble]
members = 6
"#;

fn bin(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Proc::new(env!("CARGO_BIN_EXE_zkwave"));
    cmd.args(args).env_remove(OUT_DIR_ENV);
    if let Some(d) = env_out {
        cmd.env(OUT_DIR_ENV, d);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn empty_document_gives_defaults() {
    let cfg = parse_config("", Command::Simulate).unwrap();
    let mut expected = RunConfig::default();
    expected.command = Command::Simulate;
    assert_eq!(cfg, expected);
}

#[test]
fn serialized_config_round_trips() {
    let cfg = parse_config(SMALL, Command::Expand).unwrap();
    let back = parse_config(&cfg.to_toml(), Command::Expand).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.digest(), cfg.digest());
    assert_eq!(cfg.digest().len(), 64);
    // The command is part of the digest.
    assert_ne!(parse_config(SMALL, Command::Simulate).unwrap().digest(), cfg.digest());
}

#[test]
fn digest_ignores_key_order_and_output_dir() {
    let a = parse_config("[model]\nlambda = 0.2\nnu = 0.01\n[lattice]\nsize = 10\n", Command::Simulate).unwrap();
    let b = parse_config("[lattice]\nsize = 10.0\n[model]\nnu = 0.01\nlambda = 0.2\n[output]\ndir = \"elsewhere\"\n", Command::Simulate).unwrap();
    assert_eq!(a.digest(), b.digest());
    let c = parse_config("[model]\nlambda = 0.2\nnu = 0.02\n[lattice]\nsize = 10\n", Command::Simulate).unwrap();
    assert_ne!(a.digest(), c.digest());
}

#[test]
fn bad_documents_name_the_key() {
    let msg = |text: &str| {
        let e = parse_config(text, Command::Simulate).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{e}");
        e.to_string()
    };
    let m = msg("[model]\nlambda = \"abc\"\n");
    assert!(m.contains("model.lambda") && m.contains("expected float") && m.contains("string"), "{m}");
    let m = msg("[model]\nlamda = 0.1\n[extra]\nx = 1\n");
    assert!(m.contains("unknown keys") && m.contains("model.lamda") && m.contains("extra.x"), "{m}");
    let m = msg("[count]\nwindow_ratio = 1.5\n");
    assert!(m.contains("count.window_ratio"), "{m}");
    let m = msg("[ensemble]\nmembers = 1\n");
    assert!(m.contains("ensemble.members"), "{m}");
    assert!(msg("[lattice]\ndim = 7\n").contains("dim"));
    assert!(parse_config("not = [valid", Command::Simulate).is_err());
}

#[test]
fn overrides_apply_in_order() {
    let env = Overrides { env_out: Some("from_env".into()), ..Default::default() };
    assert_eq!(load_config(Command::Count, None, &env).unwrap().output.dir, Path::new("from_env"));
    let both = Overrides { out: Some("from_flag".into()), seed: Some(9), env_out: Some("from_env".into()) };
    let cfg = load_config(Command::Count, None, &both).unwrap();
    assert_eq!(cfg.output.dir, Path::new("from_flag"));
    assert_eq!(cfg.seed, 9);
    let missing = load_config(Command::Count, Some(Path::new("/nonexistent/run.toml")), &Overrides::default());
    assert!(matches!(missing, Err(Error::Config(_))));
}

#[test]
fn simulate_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = bin(&["simulate", "--config", &conf, "--out", out.to_str().unwrap(), "--threads", "2"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats = read_spectrum(&out.join("spectrum.jsonl")).unwrap();
    assert_eq!(stats.members, 6);
    assert_eq!(stats.time, 0.2);

    // Floats carry 17 significant digits.
    let text = fs::read_to_string(out.join("spectrum.jsonl")).unwrap();
    let second = text.lines().nth(1).unwrap();
    let v: serde_json::Value = serde_json::from_str(second).unwrap();
    let mean = v["mean"].as_f64().unwrap();
    assert!(second.contains(&format!("{mean:.16e}")), "{second}");

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["threads"], 2);
    assert_eq!(manifest["seed"], 11);

    let o = bin(&["compare", "--config", &conf, "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cmp = fs::read_to_string(out.join("comparison.jsonl")).unwrap();
    let header: serde_json::Value = serde_json::from_str(cmp.lines().next().unwrap()).unwrap();
    assert_eq!(header["members"], 6);
    assert_eq!(cmp.lines().count(), stats.modes.len() + 1);
    let summary = fs::read_to_string(out.join("comparison_summary.csv")).unwrap();
    assert!(summary.lines().any(|l| l.starts_with("time,members,modes")), "{summary}");
}

#[test]
fn compare_on_another_lattice_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert!(bin(&["simulate", "--config", &conf, "--out", out.to_str().unwrap()], None).status.success());
    let other = write_config(dir.path(), &SMALL.replace("size = 6", "size = 7"));
    let o = bin(&["compare", "--config", &other, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_without_spectrum_fails() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), SMALL);
    let o = bin(&["compare", "--config", &conf, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("simulate"));
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"exit_code\": 2"));
}

#[test]
fn foreign_schema_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("spectrum.jsonl");
    fs::write(&p, "{\"schema\":\"zkwave.spectrum/0\"}\n").unwrap();
    match read_spectrum(&p) {
        Err(Error::SchemaMismatch { expected, found }) => {
            assert_eq!(expected, SPECTRUM_SCHEMA);
            assert_eq!(found, "zkwave.spectrum/0");
        }
        other => panic!("{other:?}"),
    }
    let conf = write_config(dir.path(), SMALL);
    let o = bin(&["compare", "--config", &conf, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let bad = write_config(dir.path(), "[model]\nlambda = \"abc\"\n");
    let o = bin(&["simulate", "--config", &bad, "--out", out], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.lambda"));

    let blowup = write_config(
        dir.path(),
        "[lattice]\ndim = 2\nsize = 4\n[model]\nlambda = 1e4\n[time]\nt_final = 50\ndt = 0.5\n[ensemble]\nmembers = 2\n",
    );
    assert_eq!(bin(&["simulate", "--config", &blowup, "--out", out], None).status.code(), Some(3));

    let budget = write_config(dir.path(), "[count]\nsizes = [64]\nbudget = 1000\n");
    let o = bin(&["count", "--config", &budget, "--out", out], None);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn environment_sets_output_dir_and_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "[lattice]\ndim = 3\n[count]\nsizes = [6]\nkx = [1, 2]\n");
    let env_dir = dir.path().join("env");
    let o = bin(&["count", "--config", &conf], Some(&env_dir));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(env_dir.join("bounds.csv")).unwrap();
    assert!(csv.lines().next().unwrap().starts_with('#'));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);

    let flag_dir = dir.path().join("flag");
    let o = bin(&["count", "--config", &conf, "--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert!(o.status.success());
    assert!(flag_dir.join("bounds.csv").exists());
}

#[test]
fn expand_writes_trees_and_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), &format!("{SMALL}\n[expand]\norder = 2\nsteps = 8\n"));
    let o = bin(&["expand", "--config", &conf, "--out", dir.path().to_str().unwrap(), "--seed", "4"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trees = fs::read_to_string(dir.path().join("trees.jsonl")).unwrap();
    // Header plus 1 + 1 + 2 trees of orders 0..=2.
    assert_eq!(trees.lines().count(), 5);
    let header: serde_json::Value = serde_json::from_str(trees.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 4);
    let res = fs::read_to_string(dir.path().join("residual.csv")).unwrap();
    assert_eq!(res.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn checkpoints_hold_final_fields() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), &SMALL.replace("members = 6", "members = 3\ncheckpoints = true"));
    let o = bin(&["simulate", "--config", &conf, "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = fs::File::open(dir.path().join("checkpoints/member_000002.bin")).unwrap();
    let (header, field) = read_checkpoint(&mut BufReader::new(f)).unwrap();
    assert_eq!((header.member, header.seed), (2, 11));
    assert_eq!(field.time, 0.2);
    let stats = read_spectrum(&dir.path().join("spectrum.jsonl")).unwrap();
    assert_eq!(field.values.len(), stats.modes.len());
}
