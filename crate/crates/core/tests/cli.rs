use std::path::PathBuf;
use std::process::{Command, Output};

fn terms(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/terms").join(name).display().to_string()
}

fn linmetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linmetric"))
        .args(args)
        .env_remove("LINMETRIC_SYMBOLS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn dist_all_on_the_query_pair() {
    let syms = terms("symbols.json");
    let o = linmetric(&["dist", &terms("k2.lin"), &terms("k3.lin"), "--env", "k:R -o I", "--symbols", &syms, "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metrics"]["den"]["lo"], 0.0);
    assert_eq!(v["metrics"]["den"]["hi"], 0.0);
    assert_eq!(v["metrics"]["int"]["lo"], 1.0);
    assert_eq!(v["metrics"]["int"]["hi"], 1.0);
    assert_eq!(v["chain_ok"], true);
}

#[test]
fn same_file_twice_is_all_zeros() {
    let o = linmetric(&["dist", &terms("L0.lin"), &terms("L0.lin"), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (k, field) in [("obs", "lo"), ("den", "hi"), ("int", "hi"), ("equ", "hi")] {
        assert_eq!(v["metrics"][k][field], 0.0, "{k}");
    }
}

#[test]
fn unbounded_distances_print_as_inf() {
    let dir = std::env::temp_dir().join("linmetric-cli-inf");
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("id.lin"), dir.join("sin.lin"));
    std::fs::write(&a, "\\x:R. x").unwrap();
    std::fs::write(&b, "\\x:R. sin(x)").unwrap();
    let o = linmetric(&["dist", a.to_str().unwrap(), b.to_str().unwrap(), "--metric", "equ", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metrics"]["equ"]["hi"], "inf");
    assert!(v["metrics"]["equ"]["certificate"].is_null());
}

#[test]
fn obs_alone_finds_the_prefix() {
    let o = linmetric(&["dist", &terms("M0.lin"), &terms("M1.lin"), "--metric", "obs"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("obs  >= 2  (context [-], n = 2)"), "{}", stdout(&o));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["dist", &terms("Q0.lin"), &terms("Q1.lin"), "--json", "--seed", "3"];
    assert_eq!(linmetric(&args).stdout, linmetric(&args).stdout);
}

#[test]
fn wire_listing_and_diagram() {
    let dot = std::env::temp_dir().join("linmetric-example-m.dot");
    let syms = terms("symbols.json");
    let env = "x:R -o R, y:R -o R, z:R -o R";
    let o =
        linmetric(&["wires", &terms("exampleM.lin"), "--env", env, "--symbols", &syms, "--dot", dot.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "H1=f(x,z)  H2=y  H3=0  H4=2");
    assert_eq!(std::fs::read_to_string(dot).unwrap(), std::fs::read_to_string(terms("exampleM.dot")).unwrap());
}

#[test]
fn wires_normalize_with_a_note() {
    let dir = std::env::temp_dir().join("linmetric-cli-redex");
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("redex.lin");
    std::fs::write(&f, "(\\z:R. add(z, 1.0)) 2.0").unwrap();
    let o = linmetric(&["wires", f.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("note:"), "{out}");
    assert!(out.trim_end().ends_with("H1=add(2,1)"), "{out}");
}

#[test]
fn user_errors_exit_with_one() {
    let o = linmetric(&["dist", &terms("k2.lin"), &terms("const3.lin"), "--env", "k:R -o I"]);
    assert_eq!(o.status.code(), Some(1));
    let o = linmetric(&["typecheck", &terms("exampleM.lin")]);
    assert_eq!(o.status.code(), Some(1), "f and g are not standard symbols");
}

#[test]
fn registry_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_linmetric"))
        .args(["typecheck", &terms("exampleM.lin"), "--env", "x:R -o R, y:R -o R, z:R -o R"])
        .env("LINMETRIC_SYMBOLS", terms("symbols.json"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "R");
}

#[test]
fn small_suites_report_counts() {
    for suite in ["ordering", "trace", "decompose"] {
        let o = linmetric(&["check", "--suite", suite, "--count", "20"]);
        assert!(o.status.success(), "{suite}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("20/20 "), "{}", stdout(&o));
    }
}
