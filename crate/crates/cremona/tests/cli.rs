use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use cremona::complex::Cx;
use cremona::schema::ParamsFile;
use cremona_core::lattice::WeylWord;
use cremona_core::torus::kmnoy_word;
use cremona_core::Complex64;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cremona"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> (String, i32) {
    let out = bin().args(args).output().expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let (s, code) = run(args);
    (serde_json::from_str(&s).unwrap_or_else(|e| panic!("invalid JSON ({e}): {s}")), code)
}

fn temp_json(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn cx(v: &Value) -> Complex64 {
    let Cx(z) = serde_json::from_value(v.clone()).unwrap();
    z
}

#[test]
fn act_cremona_on_hyperplane() {
    let (v, code) = run_json(&["lattice", "act", "--n", "2", "--m", "9", "--word", "0", "--class", "E"]);
    assert_eq!(code, 0);
    let coeffs: Vec<i64> = serde_json::from_value(v["coeffs"].clone()).unwrap();
    assert_eq!(coeffs, vec![2, -1, -1, -1, 0, 0, 0, 0, 0, 0]);
    assert_eq!(v["class"], "2E - E_1 - E_2 - E_3");
}

#[test]
fn empty_word_is_identity_matrix() {
    let (v, code) = run_json(&["lattice", "matrix", "--n", "3", "--m", "6", "--word", ""]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<i64>> = serde_json::from_value(v["rows"].clone()).unwrap();
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert_eq!(x, i64::from(i == j));
        }
    }
    assert_eq!(v["determinant"], 1);
}

#[test]
fn pullback_and_pushforward_are_inverse() {
    let (push, _) = run_json(&["lattice", "matrix", "--n", "2", "--m", "6", "--word", "0,3,1"]);
    let (pull, _) = run_json(&["lattice", "matrix", "--n", "2", "--m", "6", "--word", "0,3,1", "--pullback"]);
    let a: Vec<Vec<i64>> = serde_json::from_value(push["rows"].clone()).unwrap();
    let b: Vec<Vec<i64>> = serde_json::from_value(pull["rows"].clone()).unwrap();
    let r = a.len();
    for i in 0..r {
        for j in 0..r {
            let s: i64 = (0..r).map(|k| a[i][k] * b[k][j]).sum();
            assert_eq!(s, i64::from(i == j));
        }
    }
}

#[test]
fn dynkin_of_affine_e8() {
    let (v, code) = run_json(&["lattice", "dynkin", "--n", "2", "--m", "9"]);
    assert_eq!(code, 0);
    assert_eq!(v["nodes"], 9);
    let edges: Vec<[usize; 2]> = serde_json::from_value(v["edges"].clone()).unwrap();
    assert_eq!(edges.len(), 8);
    let mut degree = [0usize; 9];
    for [a, b] in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    // branch node alpha_3 with arms of lengths 1, 2, 5
    assert_eq!(degree[3], 3);
    assert_eq!(degree.iter().filter(|&&d| d == 1).count(), 3);
}

#[test]
fn orbit_of_alpha0_at_depth_one() {
    let (v, code) = run_json(&["lattice", "orbit", "--n", "2", "--m", "5", "--depth", "1"]);
    assert_eq!(code, 0);
    let classes: Vec<String> = v["classes"].as_array().unwrap().iter().map(|c| c["class"].as_str().unwrap().to_string()).collect();
    assert!(classes.contains(&"E - E_1 - E_2 - E_3".to_string()));
    assert!(classes.contains(&"E - E_1 - E_2 - E_4".to_string()));
}

#[test]
fn bundled_configs_pass() {
    for name in ["kmnoy_n2_m5.json", "weierstrass_n2_m5.json", "kmnoy_n2_m9.json"] {
        let (v, code) = run_json(&["verify", "--config", config(name).to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {v}");
        assert_eq!(v["pass"], true);
        assert!(v["max_residual"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn kmnoy_cremona_has_identity_g() {
    let (v, code) = run_json(&["verify", "--config", config("kmnoy_n2_m5.json").to_str().unwrap(), "--word", "0"]);
    assert_eq!(code, 0);
    let g = v["g"].as_array().unwrap();
    for (i, row) in g.iter().enumerate() {
        for (j, x) in row.as_array().unwrap().iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((cx(x) - expect).norm() < 1e-8, "{v}");
        }
    }
}

#[test]
fn braid_relation_compare() {
    let cfg = config("weierstrass_n2_m5.json");
    let (v, code) = run_json(&["verify", "--config", cfg.to_str().unwrap(), "--word", "1,2,1", "--compare", "2,1,2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["pass"], true);
    let (v, code) = run_json(&["verify", "--config", cfg.to_str().unwrap(), "--word", "1", "--compare", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["pass"], false);
}

#[test]
fn other_verify_modes() {
    for (name, mode) in [
        ("weierstrass_n2_m5.json", "g-decomposition"),
        ("kmnoy_n2_m5.json", "g-decomposition"),
        ("kmnoy_n2_m5.json", "translation"),
        ("weierstrass_n2_m5.json", "translation"),
    ] {
        let (v, code) = run_json(&["verify", "--config", config(name).to_str().unwrap(), "--mode", mode]);
        assert_eq!(code, 0, "{name} {mode}: {v}");
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn malformed_input_exits_with_two() {
    let f = temp_json("{\"tau\": ");
    let (v, code) = run_json(&["verify", "--config", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");

    let (v, code) = run_json(&["verify", "--config", "/nonexistent/config.json"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");

    let (_, code) = run_json(&["lattice", "act", "--n", "2", "--m", "5", "--word", "0,x", "--class", "E"]);
    assert_eq!(code, 2);
    let (_, code) = run_json(&["lattice", "act", "--n", "2", "--m", "5", "--class", "E + banana"]);
    assert_eq!(code, 2);
    let (_, code) = run_json(&["no-such-command"]);
    assert_eq!(code, 2);
}

#[test]
fn domain_errors_exit_with_one() {
    let (v, code) = run_json(&["lattice", "act", "--n", "2", "--m", "5", "--word", "7", "--class", "E"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "domain");
    let (_, code) = run_json(&["lattice", "dynkin", "--n", "3", "--m", "4"]);
    assert_eq!(code, 1);
    let f = temp_json(r#"{"tau": [0.3, -1.0], "n": 2, "m": 5, "embedding": "weierstrass", "u": [0.1, 0.2, 0.3, 0.4, 0.5]}"#);
    let (_, code) = run_json(&["verify", "--config", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let f = temp_json(r#"{"tau": "i", "n": 2, "m": 5, "embedding": "weierstrass", "u": [0.1, 0.2, 0.3, 0.1, 0.5]}"#);
    let (v, code) = run_json(&["verify", "--config", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(v["error"]["message"].as_str().unwrap().contains("coincide"));
}

#[test]
fn tau_floor_rejects_thin_tori() {
    let cfg = config("kmnoy_n2_m5.json");
    let (_, code) = run_json(&["verify", "--config", cfg.to_str().unwrap(), "--tau-floor", "2.0"]);
    assert_eq!(code, 1);
}

fn orbit_lines(stdout: &str) -> Vec<Value> {
    stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn state_from_line(file: &ParamsFile, line: &Value) -> ParamsFile {
    let mut out = file.clone();
    out.eps = Some(serde_json::from_value(line["eps"].clone()).unwrap());
    out.u = Some(serde_json::from_value(line["u"].clone()).unwrap());
    out
}

fn read_params(path: &Path) -> ParamsFile {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn orbit_step_matches_library() {
    let path = config("kmnoy_n2_m9.json");
    let file = read_params(&path);
    let (s, code) = run(&["orbit", "--params", path.to_str().unwrap(), "--word", "0,4,1,8", "--steps", "1"]);
    assert_eq!(code, 0);
    let lines = orbit_lines(&s);
    assert_eq!(lines.len(), 1);
    let got = state_from_line(&file, &lines[0]).to_params(0.0).unwrap();
    let start = file.to_params(0.0).unwrap();
    let expect = kmnoy_word(&"0,4,1,8".parse::<WeylWord>().unwrap(), &start).unwrap();
    assert!(got.torus_distance(&expect) < 1e-12);
}

#[test]
fn orbit_word_then_reverse_returns() {
    let path = config("kmnoy_n2_m9.json");
    let file = read_params(&path);
    let (s, code) = run(&["orbit", "--params", path.to_str().unwrap(), "--word", "0,3,7,2,0,5,5,1,0,3,7", "--steps", "1"]);
    assert_eq!(code, 0);
    let w: WeylWord = "0,3,7,2,0,5,5,1,0,3,7".parse().unwrap();
    let back = w.reversed().to_string();
    let mid = state_from_line(&file, &orbit_lines(&s)[0]);
    let tmp = temp_json(&serde_json::to_string(&mid).unwrap());
    let (s, code) = run(&["orbit", "--params", tmp.path().to_str().unwrap(), "--word", &back, "--steps", "1"]);
    assert_eq!(code, 0);
    let end = state_from_line(&file, &orbit_lines(&s)[0]).to_params(0.0).unwrap();
    let start = file.to_params(0.0).unwrap();
    assert!(end.torus_distance(&start) < 1e-8);
    let m = start.modulus();
    assert!(m.lattice_distance(end.eps().unwrap() - start.eps().unwrap()) < 1e-8);
}

#[test]
fn translation_orbit_advances_by_fixed_vector() {
    let path = config("kmnoy_n2_m9.json");
    let file = read_params(&path);
    let m = file.modulus(0.0).unwrap();
    for root in [0usize, 1, 8] {
        let (s, code) = run(&["orbit", "--params", path.to_str().unwrap(), "--translation", &root.to_string(), "--steps", "3"]);
        assert_eq!(code, 0, "{s}");
        let mut states = vec![file.clone()];
        states.extend(orbit_lines(&s).iter().map(|l| state_from_line(&file, l)));
        // coordinates modulo the common translation u_i -> u_i + c
        let coords: Vec<Vec<Complex64>> = states
            .iter()
            .map(|p| {
                let u: Vec<Complex64> = p.u.as_ref().unwrap().iter().map(|z| z.0).collect();
                let mut v: Vec<Complex64> = u[1..].iter().map(|x| x - u[0]).collect();
                v.push(p.eps.unwrap().0);
                v
            })
            .collect();
        let inc: Vec<Vec<Complex64>> = coords.windows(2).map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect()).collect();
        assert!(inc[0].iter().any(|d| m.lattice_distance(*d) > 1e-3), "translation {root} acts trivially");
        for k in 1..inc.len() {
            for (a, b) in inc[k].iter().zip(&inc[0]) {
                assert!(m.lattice_distance(a - b) < 1e-8, "root {root} step {k}");
            }
        }
    }
}

#[test]
fn orbit_reports_degeneracy_with_step() {
    // generator 0 moves u_1 to u_1 + eps = u_4
    let f = temp_json(
        r#"{"tau": "i", "n": 2, "m": 5, "embedding": "kmnoy", "eps": [0.13, 0.07],
            "u": [[0.11, 0.04], [0.37, 0.29], [0.74, 0.58], [0.24, 0.11], [0.56, 0.16]]}"#,
    );
    let (s, code) = run(&["orbit", "--params", f.path().to_str().unwrap(), "--word", "1", "--steps", "4"]);
    assert_eq!(code, 0, "{s}");
    let (s, code) = run(&["orbit", "--params", f.path().to_str().unwrap(), "--word", "0", "--steps", "2"]);
    assert_eq!(code, 1);
    let lines = orbit_lines(&s);
    assert_eq!(lines.len(), 1);
    let msg = lines[0]["error"]["message"].as_str().unwrap();
    assert!(msg.contains("step 1"), "{msg}");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let cfg = config("kmnoy_n2_m9.json");
    for mode in ["word", "translation"] {
        let args = ["verify", "--config", cfg.to_str().unwrap(), "--random", "--seed", "42", "--word", "0,3,1", "--mode", mode];
        let (a, ca) = run(&args);
        let (b, cb) = run(&args);
        assert_eq!(ca, 0);
        assert_eq!(ca, cb);
        assert_eq!(a, b);
    }
    let base = ["verify", "--config", cfg.to_str().unwrap(), "--random", "--word", "0"];
    let (a, _) = run(&[&base[..], &["--seed", "1"]].concat());
    let (b, _) = run(&[&base[..], &["--seed", "2"]].concat());
    assert_ne!(a, b);
}

#[test]
fn help_exits_zero() {
    let (s, code) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(s.contains("verify"));
}
