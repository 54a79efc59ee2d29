use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn flatsol(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatsol")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn figure1_presets_classify_as_drawn() {
    let dir = TempDir::new().unwrap();
    let expected = [("figure1-a1", "strictly-positive", 0), ("figure1-a1.8", "strictly-positive", 0), ("figure1-a2", "positive-flat", 0), ("figure1-a2.2", "sign-changing", 2)];
    for (preset, shape, exit) in expected {
        let out = dir.path().join(preset);
        let o = flatsol(&["solve1d", "--preset", preset], &out);
        assert_eq!(code(&o), exit, "{preset}: {}", String::from_utf8_lossy(&o.stderr));
        let j = json(&out.join("conditions.json"));
        assert_eq!(j["sections"]["solution"]["shape"], shape, "{preset}");
        for f in ["u.csv", "figure.svg", "conditions.report"] {
            assert!(out.join(f).exists(), "{preset}: {f}");
        }
        if preset == "figure1-a2" {
            assert!(num(&j["sections"]["solution"]["slope_right"]).abs() < 1e-9);
            assert_eq!(j["sections"]["conditions"]["flatness"], "holds");
        }
    }
}

#[test]
fn reproduce_figure1_writes_four_panels() {
    let dir = TempDir::new().unwrap();
    let o = flatsol(&["reproduce", "figure1"], dir.path());
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(dir.path().join("figure1.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
    let j = json(&dir.path().join("figure1.json"));
    assert_eq!(j["sections"]["a=2"]["shape"], "positive-flat");
    assert_eq!(j["sections"]["a=2.2"]["decay"], "fails");
}

#[test]
fn reproduce_figure2_finds_the_critical_parameter() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&flatsol(&["reproduce", "figure2"], dir.path())), 0);
    let j = json(&dir.path().join("figure2.json"));
    let a = num(&j["sections"]["critical"]["a_star"]);
    assert!((a - 3.41421).abs() < 1e-3, "{a}");
    let core = &j["sections"]["dead-band b=0.5"];
    assert_eq!(core["shape"], "dead-core");
    let iv: Vec<f64> = core["intervals"].as_array().unwrap().iter().map(num).collect();
    assert!((iv[0] + 0.5).abs() < 1e-6 && (iv[1] - 0.5).abs() < 1e-6, "{iv:?}");
    assert!(dir.path().join("figure2_centre.csv").exists());
}

#[test]
fn empty_forcing_gives_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&flatsol(&["solve1d", "--preset", "empty"], dir.path())), 0);
    let csv = fs::read_to_string(dir.path().join("u.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,u,du"));
    for l in lines {
        let u: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(u, 0.0);
    }
}

#[test]
fn check_reports_the_verdict_triple() {
    let dir = TempDir::new().unwrap();
    let flat = dir.path().join("flat");
    assert_eq!(code(&flatsol(&["check", "--preset", "figure1-a2"], &flat)), 0);
    let c = &json(&flat.join("check.json"))["sections"]["conditions"];
    assert_eq!((c["balance"].as_str(), c["decay"].as_str(), c["flatness"].as_str()), (Some("holds"), Some("holds"), Some("holds")));

    let wide = dir.path().join("wide");
    assert_eq!(code(&flatsol(&["check", "--preset", "figure1-a2.2"], &wide)), 2);
    let c = &json(&wide.join("check.json"))["sections"]["conditions"];
    assert_eq!(c["decay"], "fails");
    assert!(num(&c["witness_decay_margin"]) < 0.0);
    let loc = num(&c["witness_decay_location"]);
    assert!(loc > 1.0 && loc < 2.2, "{loc}");

    let classical = dir.path().join("classical");
    assert_eq!(code(&flatsol(&["check", "--preset", "classical"], &classical)), 0);
    let c = &json(&classical.join("check.json"))["sections"]["conditions"];
    assert_eq!((c["balance"].as_str(), c["decay"].as_str()), (Some("holds"), Some("holds")));
}

#[test]
fn semilinear_preset_is_positive_and_resonance_is_rejected() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&flatsol(&["semilinear", "--preset", "semilinear"], dir.path())), 0);
    let s = &json(&dir.path().join("semilinear.json"))["sections"]["solution"];
    assert!(num(&s["min_interior"]) > 0.0);
    assert!(num(&s["residual"]) < 1e-10);
    let o = flatsol(&["semilinear", "--preset", "semilinear-resonant"], &dir.path().join("bad"));
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not below the first discrete eigenvalue"));
}

#[test]
fn parabolic_preset_reports_t0_and_the_second_eigenvalue() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&flatsol(&["parabolic", "--preset", "parabolic"], dir.path())), 0);
    let j = json(&dir.path().join("parabolic.json"));
    let t0 = num(&j["sections"]["positivity"]["t0"]);
    assert!(t0 > 0.0 && t0 < 4.0, "{t0}");
    let rate = num(&j["sections"]["decay"]["rate"]);
    assert!((rate / std::f64::consts::PI.powi(2) - 1.0).abs() < 0.02, "{rate}");
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,min_u,sup_ratio\n"));
}

#[test]
fn certificates_pass_and_fail_with_the_right_codes() {
    let dir = TempDir::new().unwrap();
    let ok = dir.path().join("ok");
    assert_eq!(code(&flatsol(&["certify", "--preset", "disk-certificate"], &ok)), 0);
    let c = &json(&ok.join("certificate.json"))["sections"]["certificate"];
    assert_eq!(c["verdict"], "holds");
    assert!(num(&c["min_u"]) > 0.0);
    assert!(ok.join("certificate.csv").exists());

    let cfg = dir.path().join("heavy.cfg");
    let text = flatsol::presets::lookup("disk-certificate").unwrap().replace("constant = -0.05", "constant = -3");
    fs::write(&cfg, text).unwrap();
    let bad = dir.path().join("bad");
    let o = flatsol(&["certify", "--config", cfg.to_str().unwrap()], &bad);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&bad.join("certificate.json"));
    assert_eq!(j["status"], "fails");
    assert_eq!(j["sections"]["hypotheses"]["h2"], "fails");
    assert_eq!(j["sections"]["certificate"]["verdict"], "fails");
}

#[test]
fn solve_nd_on_a_rectangle() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("rect.cfg");
    fs::write(&cfg, "forcing {\n    family = plateau\n    a = 1\n}\nmesh {\n    kind = rectangle\n    n = 24\n    ny = 16\n    lx = 2\n    ly = 1\n}\n").unwrap();
    let o = flatsol(&["solve-nd", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert!(csv.starts_with("x,y,f,u\n"));
    assert_eq!(csv.lines().count(), 1 + 25 * 17);
    let s = &json(&dir.path().join("solve-nd.json"))["sections"]["solution"];
    assert!(num(&s["min_interior"]) > 0.0);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    for cmd in [&["solve1d", "--preset", "figure1-a1.8"][..], &["reproduce", "table-conditions"][..], &["certify", "--preset", "interval-certificate"][..]] {
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        assert_eq!(code(&flatsol(cmd, &a)), 0);
        assert_eq!(code(&flatsol(cmd, &b)), 0);
        let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{cmd:?}: {n:?}");
        }
        fs::remove_dir_all(&a).unwrap();
        fs::remove_dir_all(&b).unwrap();
    }
}

#[test]
fn reports_embed_the_resolved_config() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&flatsol(&["solve1d", "--preset", "figure1-a2", "--tol", "probes=64", "--mesh", "32"], dir.path())), 0);
    let report = fs::read_to_string(dir.path().join("conditions.report")).unwrap();
    let config = report.split("[config]\n").nth(1).unwrap().split("\n[").next().unwrap();
    let cfg = flatsol::config::RunConfig::from_text(config).unwrap();
    assert_eq!(cfg.tol.probes, 64);
    assert_eq!(cfg.mesh.n, 32);
    assert_eq!(cfg.render().trim_end(), config.trim_end());
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "forcing {\n    family = plateau\n    colour = blue\n}\n").unwrap();
    let o = flatsol(&["solve1d", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3: unknown key 'colour'"));
    assert_eq!(code(&flatsol(&["solve1d"], dir.path())), 1);
    assert_eq!(code(&flatsol(&["solve1d", "--preset", "figure1-a2", "--config", cfg.to_str().unwrap()], dir.path())), 1);
    assert_eq!(code(&flatsol(&["solve1d", "--preset", "nope"], dir.path())), 1);
    assert_eq!(code(&flatsol(&["solve1d", "--preset", "figure1-a2", "--tol", "probes"], dir.path())), 1);
    assert_eq!(code(&flatsol(&["frobnicate"], dir.path())), 1);
}
