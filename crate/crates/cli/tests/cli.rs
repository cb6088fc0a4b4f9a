use std::process::{Command, Output};

fn spinfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinfn")).args(args).env_remove("SPINFN_PARTICLES").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn spin_half_cos_expectation() {
    let o = spinfn(&["expect", "1/2", "1", "1/2", "--weight", "cos"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("value_exact: 2/3"), "{text}");
    assert!(text.contains("path=regularized"), "{text}");
}

#[test]
fn decimal_half_integers_are_accepted() {
    let o = spinfn(&["--json", "expect", "0.5", "1", "0.5"]);
    assert_eq!(json(&o)["outputs"]["value_exact"], "2/3");
}

#[test]
fn non_integer_offsets_fall_back_to_the_analytic_path() {
    let o = spinfn(&["--json", "expect", "1", "1.31", "1", "--weight", "p2"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["path"], "analytic");
}

#[test]
fn integer_offset_states_report_both_routes() {
    let v = json(&spinfn(&["--json", "expect", "1", "2", "1"]));
    assert_eq!(v["outputs"]["value_exact"], "2/11");
    assert_eq!(v["outputs"]["analytic_exact"], "1");
}

#[test]
fn proca_g_factor() {
    let o = spinfn(&["gfactor", "1", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("g_exact: 1\n"));
}

#[test]
fn inverted_g_factor_flags_imaginary_projection() {
    let v = json(&spinfn(&["--json", "gfactor", "--invert", "3/2", "2/3"]));
    assert_eq!(v["outputs"]["imaginary"], true);
    assert_eq!(v["outputs"]["n_exact"], "i·√5/2");
}

#[test]
fn z_to_two_photons_is_forbidden() {
    let o = spinfn(&["react", "Z -> photon photon"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("verdict: FORBIDDEN"), "{text}");
    assert!(text.contains("coefficient: 0.0"), "{text}");
}

#[test]
fn reactions_from_a_file() {
    let dir = tempdir();
    let path = dir.join("reactions.txt");
    std::fs::write(&path, "# decays\nelectron -> electron + photon\n\nZ -> photon + photon\n").unwrap();
    let o = spinfn(&["--json", "react", path.to_str().unwrap()]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["outputs"]["verdict"], "ALLOWED");
    assert_eq!(lines[1]["outputs"]["verdict"], "FORBIDDEN");
}

#[test]
fn neutrino_projection_solve() {
    let v = json(&spinfn(&["--json", "react", "--solve", "W+ -> positron + neutrino:unknown"]));
    assert_eq!(v["outputs"]["n_exact"], "√3/2");
    let n = v["outputs"]["n"].as_f64().unwrap();
    assert!((n - 0.75f64.sqrt()).abs() < 1e-12);
}

#[test]
fn particle_table_override() {
    let dir = tempdir();
    let path = dir.join("table.txt");
    std::fs::write(&path, "boson 2 zero self_conjugate\nfermion 1 stype\n").unwrap();
    let o = spinfn(&["--particles", path.to_str().unwrap(), "react", "boson -> fermion fermion"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_spinfn"))
        .args(["react", "Z -> photon photon"])
        .env("SPINFN_PARTICLES", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "Z is not in the override table");
}

#[test]
fn bad_input_exits_one() {
    let o = spinfn(&["expect", "1/3", "1", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("half-integer"));
}

#[test]
fn coupling_commands() {
    let v = json(&spinfn(&["--json", "cg", "1/2", "1/2", "1/2", "-1/2", "1"]));
    assert!((v["outputs"]["coefficient"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    let v = json(&spinfn(&["--json", "cg", "--internal", "1", "smax", "2"]));
    assert!((v["outputs"]["coefficient"].as_f64().unwrap() - 1.6f64.sqrt()).abs() < 1e-15);
    let v = json(&spinfn(&["--json", "rms", "singlet-one"]));
    assert!((v["outputs"]["rms"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn quasiprob_csv_and_json_agree() {
    let args = ["quasiprob", "triplet-sqrt2", "--samples", "101", "--range", "-3", "4"];
    let csv = spinfn(&args);
    let text = stdout(&csv);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,density"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 101);
    let mut jargs = args.to_vec();
    jargs.extend(["--out", "json"]);
    let v = json(&spinfn(&jargs));
    let xs = v["outputs"]["x"].as_array().unwrap();
    let ys = v["outputs"]["density"].as_array().unwrap();
    for (i, (x, y)) in rows.iter().enumerate() {
        assert_eq!(xs[i].as_f64().unwrap().to_bits(), x.to_bits());
        assert_eq!(ys[i].as_f64().unwrap().to_bits(), y.to_bits());
    }
}

#[test]
fn dfunc_prints_and_evaluates() {
    let v = json(&spinfn(&["--json", "dfunc", "1/2", "1", "1/2", "--theta", "1.0"]));
    let expr = v["outputs"]["expression"].as_str().unwrap();
    assert!(expr.starts_with("D^1/2_{1, 1/2}"), "{expr}");
    // |A|² + cross terms at θ = 1: A = e^{iπ/4} c^{3/2} s^{-1/2}
    assert!(v["outputs"]["re"].as_f64().unwrap().is_finite());
}

#[test]
fn inner_product_of_the_spin_one_state() {
    let v = json(&spinfn(&["--json", "inner", "1", "3/2", "1", "1", "3/2", "1", "--weight", "p2"]));
    assert_eq!(v["outputs"]["value_exact"], "(19/8)π³");
}

#[test]
fn verify_exit_code_tracks_the_checklist() {
    let o = spinfn(&["verify", "--criterion", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS] 10."));
    // the integer-offset family keeps the full run from passing
    let o = spinfn(&["--json", "verify"]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 12);
    let all_pass = lines.iter().all(|l| l["status"] == "pass");
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 2 }));
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("spinfn-cli-{}-{:?}", std::process::id(), std::thread::current().id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
