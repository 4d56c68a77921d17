use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagflow")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagflow")).args(args).env(key, value).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Last data row of a trajectory CSV and the termination comment.
fn trajectory_end(out: &Output) -> ([f64; 3], String) {
    let text = stdout(out);
    let lines: Vec<&str> = text.lines().collect();
    let term = lines.last().unwrap().trim_start_matches("# termination: ").to_string();
    let row: Vec<f64> = lines[lines.len() - 2].split(',').map(|v| v.parse().unwrap()).collect();
    ([row[0], row[1], row[2]], term)
}

#[test]
fn curvature_at_normal_metric() {
    let out = run(&["curvature", "--x", "0.3333333", "--y", "0.3333333"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for k in ["r_x", "r_y", "r_z"] {
        assert!((v["ricci"][k].as_f64().unwrap() - 1.25).abs() < 1e-5);
    }
    assert_eq!(v["sectional"].as_array().unwrap().len(), 6);
    assert!(v["scalar_curvature"].is_number());
}

#[test]
fn curvature_flags_einstein() {
    let v = json(&run(&["curvature", "--x", "0.5", "--y", "0.25"]));
    for k in ["r_x", "r_y", "r_z"] {
        assert!((v["ricci"][k].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-11);
    }
    assert_eq!(v["einstein"], Value::Bool(true));
    let v = json(&run(&["curvature", "--x", "0.3", "--y", "0.2"]));
    assert_eq!(v["einstein"], Value::Bool(false));
}

#[test]
fn curvature_out_of_domain() {
    let out = run(&["curvature", "--x", "0.6", "--y", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
    assert!(out.stdout.is_empty());
}

#[test]
fn classify_exit_codes() {
    let out = run(&["classify", "--x", "0.3", "--y", "0.35", "--family", "sec-ric", "--d", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["member"], Value::Bool(true));

    let out = run(&["classify", "--x", "0.2", "--y", "0.2", "--family", "sec-ric", "--d", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["member"], Value::Bool(false));
    assert!(v["witness"]["value"].as_f64().unwrap() <= 0.0);

    let out = run(&["classify", "--x", "0.8", "--y", "0.1", "--family", "ric-scal", "--d", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["witness"]["triple"], serde_json::json!([0, 1, 0]));

    for bad in [["--d", "0"], ["--d", "6"]] {
        let mut args = vec!["classify", "--x", "0.3", "--y", "0.3", "--family", "sec-ric"];
        args.extend(bad);
        assert_eq!(run(&args).status.code(), Some(2));
    }
    assert_eq!(run(&["classify", "--x", "0.3", "--y", "0.3", "--family", "ricci", "--d", "1"]).status.code(), Some(2));
}

#[test]
fn flow_reaches_limits() {
    let out = run(&["flow", "--x", "0.1", "--y", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let ([_, x, y], term) = trajectory_end(&out);
    assert!(x.hypot(y - 0.5) < 1e-6);
    assert_eq!(term, "reached_equilibrium(N)");

    let out = run(&["flow", "--x", "0.3", "--y", "0.35", "--direction", "backward"]);
    let ([t, x, y], term) = trajectory_end(&out);
    assert!(t < 0.0);
    assert!((x - 1.0 / 3.0).hypot(y - 1.0 / 3.0) < 1e-6);
    assert_eq!(term, "reached_equilibrium(U)");
}

#[test]
fn flow_from_equilibrium_is_one_sample() {
    let third = format!("{}", 1.0f64 / 3.0);
    let out = run(&["flow", "--x", &third, "--y", &third]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["t,x,y", "0.0000000000000000e0,3.3333333333333331e-1,3.3333333333333331e-1", "# termination: reached_equilibrium(U)"]);
}

#[test]
fn flow_json_and_full_state() {
    let v = json(&run(&["flow", "--x", "0.1", "--y", "0.3", "--format", "json", "--stride", "20"]));
    assert_eq!(v["termination"], "reached_equilibrium(N)");
    assert_eq!(v["direction"], "forward");
    let out = run(&["flow", "--x", "0.4", "--y", "0.3", "--z", "0.3", "--t-max", "1"]);
    let text = stdout(&out);
    assert!(text.starts_with("t,x,y,z\n"));
    assert!(text.trim_end().ends_with("# termination: hit_boundary"));
}

#[test]
fn capture_radius_override_from_environment() {
    let args = ["flow", "--x", "0.1", "--y", "0.3"];
    let default = trajectory_end(&run(&args)).0;
    let loose = trajectory_end(&run_env(&args, "FLAGFLOW_CAPTURE_RADIUS", "1e-3")).0;
    let dist = |p: [f64; 3]| p[1].hypot(p[2] - 0.5);
    assert!(dist(default) < 1e-8);
    assert!(dist(loose) > 1e-4 && dist(loose) < 1e-3);
    assert!(loose[0] < default[0]);
}

#[test]
fn help_documents_environment() {
    let text = stdout(&run(&["--help"]));
    for var in ["FLAGFLOW_RTOL", "FLAGFLOW_CAPTURE_RADIUS", "FLAGFLOW_BOUNDARY_MARGIN", "--seed"] {
        assert!(text.contains(var), "{var} missing from help");
    }
}

#[test]
fn equilibria_lists_ten() {
    let v = json(&run(&["equilibria"]));
    let list = v.as_array().unwrap();
    let labels: Vec<&str> = list.iter().map(|e| e["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["O", "P", "Q", "L", "M", "N", "R", "S", "T", "U"]);
    for e in list {
        assert_eq!(e["eigenvalues"].as_array().unwrap().len(), 2);
        assert!(e["class"].is_string());
    }
}

#[test]
fn region_four_is_the_central_triangle() {
    let n = 32;
    let out = run(&["region", "--family", "sec-ric", "--d", "4", "--resolution", "32", "--horizon", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,member,preserved"));
    let h = 1.0 / n as f64;
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (x, y): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let member = f[2] == "true";
        let inside = x < 0.5 && y < 0.5 && x + y > 0.5;
        let near_edge = (x - 0.5).abs() < h || (y - 0.5).abs() < h || (x + y - 0.5).abs() < h;
        if !near_edge {
            assert_eq!(member, inside, "cell ({x}, {y})");
        }
        if member {
            assert_eq!(f[3], "true");
        }
        rows += 1;
    }
    assert_eq!(rows, n * (n - 1) / 2);
}

#[test]
fn region_svg_is_self_contained() {
    let out = run(&["region", "--family", "sec-ric", "--d", "4", "--resolution", "24", "--horizon", "10", "--format", "svg"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = stdout(&out);
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("http").count(), 1);
    assert!(!svg.contains("href=\"http") && !svg.contains("<image") && !svg.contains("<link"));
    assert!(svg.contains("<rect x="));
}

#[test]
fn region_boundary_csv() {
    let out = run(&["region", "--family", "ric-scal", "--d", "2", "--resolution", "24", "--horizon", "0", "--boundary"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve_id,block,a,b,c,x,y"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 7);
    assert_eq!(first[1], "");
    assert_eq!(first[5].split_once('e').unwrap().0.split_once('.').unwrap().1.len(), 16);
}

#[test]
fn svg_is_rejected_elsewhere() {
    for args in [&["equilibria", "--format", "svg"][..], &["curvature", "--x", "0.3", "--y", "0.3", "--format", "svg"]] {
        assert_eq!(run(args).status.code(), Some(2));
    }
}

#[test]
fn portrait_outputs() {
    let v = json(&run(&["portrait", "--resolution", "5", "--t-max", "50", "--format", "json"]));
    assert_eq!(v["equilibria"].as_array().unwrap().len(), 10);
    assert_eq!(v["segments"], serde_json::json!(["OU", "PU", "QU", "NL", "LM", "MN"]));
    assert_eq!(v["trajectories"].as_array().unwrap().len(), 12);
    let svg = stdout(&run(&["portrait", "--resolution", "5", "--t-max", "50", "--family", "sec-ric", "--d", "5", "--region-resolution", "16"]));
    assert!(svg.contains("<polyline") && svg.contains("<circle") && svg.contains("url(#checker)"));
}

#[test]
fn verify_theorem_a_level_four() {
    let out = run(&["verify", "--theorem", "A", "--d", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["invariance"]["samples"], 100);
    assert_eq!(v["invariance"]["passes"], 100);
    assert_eq!(v["invariance"]["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["escape"], Value::Null);
}

#[test]
fn verify_reports_escapes() {
    let v = json(&run(&["verify", "--theorem", "A", "--d", "2", "--samples", "6", "--escape-samples", "5"]));
    assert_eq!(v["invariance"]["claimed"], "medians");
    assert_eq!(v["invariance"]["failures"].as_array().unwrap().len(), 0);
    let escapes = v["escape"]["escapes"].as_array().unwrap();
    assert!(!escapes.is_empty());
    for e in escapes {
        assert_eq!(e["reproduced"], Value::Bool(true));
        assert!(e["t_star"].as_f64().unwrap() != 0.0);
    }
    assert_eq!(v["escape"]["non_escaping_outside_claimed_set"], 0);
}

#[test]
fn verify_rejects_bad_levels() {
    assert_eq!(run(&["verify", "--theorem", "A", "--d", "6"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--theorem", "B", "--d", "7"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--theorem", "C", "--d", "1"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--theorem", "B", "--d", "6", "--samples", "8", "--escape-samples", "4", "--seed", "7"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 7);
    let args = ["region", "--family", "sec-ric", "--d", "5", "--resolution", "20", "--horizon", "20"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other = run(&["verify", "--theorem", "B", "--d", "6", "--samples", "8", "--escape-samples", "4", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}
