use dpt_cli::{run, EXIT_OK, EXIT_USAGE, SCHEMA};
use serde_json::Value;

fn dpt(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("dpt").chain(args.iter().copied()).collect();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = dpt(args);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    v
}

#[test]
fn coeffs_csv_has_integer_columns() {
    let (code, out, _) = dpt(&["coeffs", "--k", "3", "--order", "20", "--csv"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("l_times_4,c0,c1"));
    let rows: Vec<Vec<i64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 3));
    // exponents -1 .. 20 on the quarter grid
    assert_eq!(rows.first().unwrap()[0], -4);
    assert_eq!(rows.last().unwrap()[0], 79);
    assert_eq!(rows[0][1], 1);
}

#[test]
fn coeffs_json_uses_strings_for_exact_values() {
    let v = json(&["coeffs", "--k", "0", "--order", "2"]);
    let c0 = v["result"]["c0"].as_array().unwrap();
    assert_eq!(c0[0], serde_json::json!(["-1", "1"]));
    assert_eq!(c0[1], serde_json::json!(["0", "8"]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(dpt(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(dpt(&["coeffs"]).0, EXIT_USAGE);
    assert_eq!(dpt(&["coeffs", "--k", "12"]).0, EXIT_USAGE);
    assert_eq!(dpt(&["dp", "info", "--degree", "5", "--variant", "p2"]).0, EXIT_USAGE);
    assert_eq!(dpt(&["accept", "--only", "13"]).0, EXIT_USAGE);
    // outside the Kähler cone
    let (code, _, err) = dpt(&["phi", "eval", "--degree", "6", "--y", "2,1,1,1", "--x", "0,0,0,0", "--cap", "8"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Kähler"));
    assert_eq!(dpt(&["--help"]).0, EXIT_OK);
}

fn close(a: &Value, b: &Value, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300), "{path}: {x} vs {y}");
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(x.keys().collect::<Vec<_>>(), y.keys().collect::<Vec<_>>(), "{path}");
            for (k, v) in x {
                close(v, &y[k], &format!("{path}.{k}"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "{path}");
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                close(p, q, &format!("{path}[{i}]"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}

#[test]
fn phi_eval_matches_golden() {
    let v = json(&["phi", "eval", "--degree", "6", "--y", "3,-1,-1,-1", "--x", "0,0,0,0", "--cap", "14"]);
    let golden: Value = serde_json::from_str(include_str!("golden/phi_eval_degree6.json")).unwrap();
    close(&v, &golden, "");
    let bound = v["result"]["bound"].as_f64().unwrap();
    assert!(bound < 1e-10);
    // x = 0 and y = c1: the value is real and positive
    assert_eq!(v["result"]["log_value"]["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn phi_eval_by_bound_reaches_target() {
    let v = json(&["phi", "norm", "--degree", "7", "--y", "3,-1/2,-3/4", "--x", "1/3,0,1/5", "--bound", "1e-12"]);
    assert!(v["result"]["truncation_bound"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn accept_is_deterministic() {
    let a = dpt(&["accept", "--seed", "7", "--only", "5,8,11,12"]);
    let b = dpt(&["accept", "--seed", "7", "--only", "5,8,11,12"]);
    assert_eq!(a.0, EXIT_OK, "{}", a.2);
    assert_eq!(a.1, b.1);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["result"]["passed"], 4);
}

#[test]
fn inv_tau_k_reads_flat_config() {
    let dir = std::env::temp_dir().join(format!("dpt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("tau.conf");
    std::fs::write(
        &cfg,
        "# bundle\nk = 2\ntau_y_gamma = 1.5\nvol_y_gamma = 2\nxi_l1_norm = 3\nsingular_ratios = 0.5, 4\nbott_chern_integral = 0.25\n",
    )
    .unwrap();
    let v = json(&["inv", "tau-k", "--config", cfg.to_str().unwrap()]);
    let l = v["result"]["log_tau_k"]["value"].as_f64().unwrap();
    let expected = 1.5f64.ln() + 2f64.ln() - 6.0 / 8.0 * 3f64.ln() - 5.0 / 32.0 * (0.5f64.ln() + 4f64.ln()) + 0.25 / 24.0;
    assert!((l - expected).abs() < 1e-14);

    std::fs::write(&cfg, "k = 2\nxi_l1_norm = 3\n").unwrap();
    assert_eq!(dpt(&["inv", "tau-k", "--config", cfg.to_str().unwrap()]).0, EXIT_USAGE);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("dpt-out-{}.json", std::process::id()));
    let (code, out, _) = dpt(&["inv", "c2", "--k", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["int_c2_y_over_24"], "13/32");
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn small_commands_run() {
    let v = json(&["lat", "embed", "--k", "8", "--even"]);
    assert_eq!(v["result"]["embedding"]["complement_disc"], "16");
    let v = json(&["dp", "info", "--degree", "3"]);
    assert_eq!(v["result"]["minus_one_classes"], "27");
    let v = json(&["phi", "heegner", "--degree", "5", "--height", "3"]);
    assert_eq!(v["result"]["exponent_histogram"].as_array().unwrap().len(), 1);
    let v = json(&["spec", "p1", "--c", "2"]);
    assert!((v["result"]["zeta0"]["value"].as_f64().unwrap() + 2.0 / 3.0).abs() < 1e-12);
    let v = json(&["spec", "bcov-surface", "--count", "5"]);
    assert_eq!(v["result"]["equal"], "5");
    let v = json(&["inv", "chi-orb", "--k", "4"]);
    assert_eq!(v["result"]["chi_orb"], "48");
    let v = json(&["inv", "compare", "--k", "1", "--disc-x", "1"]);
    assert_eq!(v["result"]["disc_plus_xtilde"], "2048");
    let v = json(&["eh", "chern2", "--eps", "2"]);
    assert!((v["result"]["value"]["value"].as_f64().unwrap() - 1.5).abs() < 0.02);
    let v = json(&["eh", "probe", "--delta", "0.5", "--grid", "12"]);
    assert!(v["result"]["report"]["monotone"].as_bool().unwrap());
    let v = json(&["phi", "qpb", "--degree", "8", "--variant", "sigma0", "--points", "3"]);
    assert!(v["result"]["spread"].as_f64().unwrap() < 1e-6);
}
