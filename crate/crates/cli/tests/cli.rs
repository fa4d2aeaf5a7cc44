use std::fs;
use std::process::{Command, Output};

const MONSKY: &str = "x^4+y^3*z+z^3*x";

fn hk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn colength_prints_the_number() {
    let out = hk(&["colength", "--p", "5", "--curve", MONSKY, "--vars", "x,y,z", "--q", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "72");

    let out = hk(&["colength", "--p", "2", "--curve", MONSKY, "--ideal", "x,y,z", "--q", "4"]);
    assert_eq!(stdout(&out).trim(), "46");
}

#[test]
fn colength_input_errors_exit_2() {
    for args in [
        &["colength", "--p", "4", "--curve", MONSKY, "--q", "4"][..],
        &["colength", "--p", "5", "--curve", "x^4+w", "--q", "5"],
        &["colength", "--p", "5", "--curve", MONSKY, "--q", "7"],
        &["colength", "--p", "5", "--curve", "x^2+y", "--q", "5"],
        &["colength", "--p", "5"],
    ] {
        assert_eq!(hk(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn estimate_reports_stabilization() {
    let out = hk(&["estimate", "--p", "2", "--curve", MONSKY, "--vars", "x,y,z", "--emax", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("alpha\t193/64"), "{text}");
    assert!(text.contains("consistent\ttrue"));

    let out = hk(&["estimate", "--p", "2", "--curve", MONSKY, "--emax", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not stabilized"));

    let out = hk(&["estimate", "--p", "2", "--curve", MONSKY, "--emax", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn estimate_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache_arg = cache.to_str().unwrap();
    let args = ["estimate", "--p", "2", "--curve", MONSKY, "--emax", "6", "--cache", cache_arg];
    let cold = hk(&args);
    assert_eq!(fs::read_to_string(&cache).unwrap().lines().count(), 6);
    let warm = hk(&args);
    assert_eq!(cold.stdout, warm.stdout);

    fs::write(&cache, "garbage\n").unwrap();
    assert_eq!(hk(&args).status.code(), Some(2));
}

#[test]
fn sweep_from_flags_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("out.csv");
    let out = hk(&[
        "sweep", "--curve", MONSKY, "--primes", "2,3", "--emax", "2", "--mod", "9", "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "p,residue,e,q,colength,alpha_num,alpha_den,consistent,smooth,l,s,gap_num,gap_den,flags"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[3].starts_with("3,3,1,3,"));
    assert!(lines[3].contains("singular"));

    let config = dir.path().join("sweep.json");
    fs::write(
        &config,
        format!(r#"{{"curve": "{MONSKY}", "primes": [2], "e_max": 6, "format": "jsonl"}}"#),
    )
    .unwrap();
    let out = hk(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains(r#""alpha":"193/64""#));
    assert!(text.contains(r#""ls":[[2,2],[4,3]]"#));

    fs::write(&config, "{").unwrap();
    assert_eq!(hk(&["sweep", "--config", config.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(hk(&["sweep", "--curve", MONSKY, "--primes", "4"]).status.code(), Some(2));
}

#[test]
fn sweep_flags_violations_with_exit_4() {
    // claims a characteristic-0 value above the true one
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    fs::write(
        &config,
        format!(r#"{{"curve": "{MONSKY}", "primes": [2], "e_max": 6, "char0": "4"}}"#),
    )
    .unwrap();
    let out = hk(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("below_char0"));
}

#[test]
fn polygon_and_invert() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    fs::write(&a, r#"{"s":1,"quotients":[{"rank":1,"slope":"-29/20"},{"rank":1,"slope":"-31/20"}]}"#).unwrap();
    fs::write(&b, r#"{"s":0,"quotients":[{"rank":2,"slope":"-3/2"}]}"#).unwrap();
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());

    let out = hk(&["polygon", "--hn", a, "--area", "--contains", b]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "vertices\t(0, 0) (1, -29/20) (2, -3)\narea\t1/20\ncontains\ttrue\n"
    );
    let out = hk(&["polygon", "--hn", b, "--contains", a]);
    assert_eq!(stdout(&out), "vertices\t(0, 0) (2, -3)\ncontains\tfalse\n");
    assert_eq!(hk(&["polygon", "--hn", "/nonexistent.json"]).status.code(), Some(2));

    let out = hk(&["invert", "--d", "4", "--p", "5", "--hkm", "301/100"]);
    assert_eq!(stdout(&out), "l=2 s=1\n");
    let out = hk(&["invert", "--d", "4", "--p", "19", "--hkm", "3"]);
    assert_eq!(stdout(&out), "semistable\n");
    let out = hk(&["invert", "--d", "4", "--p", "7", "--hkm", "28813/9604"]);
    assert_eq!(stdout(&out), "l=2 s=2\n");
    assert_eq!(hk(&["invert", "--d", "4", "--p", "5", "--hkm", "2"]).status.code(), Some(2));
    assert_eq!(hk(&["invert", "--d", "4", "--p", "5", "--hkm", "1/0"]).status.code(), Some(2));
}
