use std::process::{Command, Output};

fn riffle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riffle"))
        .args(args)
        .env_remove("RIFFLE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV output as vectors of fields.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn two_card_distances() {
    let o = riffle(&[
        "distances",
        "--n",
        "2",
        "--theta",
        "0.3",
        "--k",
        "1",
        "--backend",
        "exact",
    ]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    let value = |m: &str| r.iter().find(|row| row[3] == m).unwrap()[4].clone();
    assert_eq!(value("sep_partition"), "0.58");
    assert_eq!(value("linf_partition"), "0.58");
    assert_eq!(value("sep_enum"), "0.58");
}

#[test]
fn full_deck_separation_is_non_increasing() {
    let o = riffle(&["distances", "--n", "52", "--k-range", "1..30"]);
    assert!(o.status.success());
    let seps: Vec<f64> = rows(&stdout(&o))
        .into_iter()
        .filter(|r| r[3] == "sep_partition")
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(seps.len(), 30);
    assert!(seps.windows(2).all(|w| w[1] <= w[0]));
    // no enumerated cells past the enumeration cap
    assert!(!stdout(&o).contains("sep_enum"));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = ["a.csv", "b.csv"]
        .iter()
        .map(|f| dir.path().join(f).display().to_string())
        .collect();
    for p in &paths {
        let o = riffle(&[
            "simulate", "--n", "5", "--theta", "0.3", "--k", "1", "--trials", "50000", "--seed", "12",
            "--out", p,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"seed\":12"));
    assert!(text.contains("# version: "));
}

#[test]
fn replay_reproduces_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json").display().to_string();
    let second = dir.path().join("second.json").display().to_string();
    let o = riffle(&[
        "sst", "--n", "6", "--theta", "0.4", "--trials", "20000", "--seed", "3", "--k", "12", "--format",
        "json", "--out", &first,
    ]);
    assert!(o.status.success());
    let o = riffle(&["replay", &first, "--out", &second]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "sst", "--n", "5", "--trials", "200000", "--seed", "8", "--k", "10",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_riffle"))
            .args(args)
            .env("RIFFLE_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(riffle(&["simulate", "--n", "3"]).status.code(), Some(2));
    assert_eq!(
        riffle(&["distances", "--n", "3", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        riffle(&["distances", "--n", "3", "--theta", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        riffle(&["distances", "--n", "3", "--theta", "pi", "--backend", "exact"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(riffle(&["distances", "--n", "61"]).status.code(), Some(3));
    assert_eq!(
        riffle(&["simulate", "--n", "11", "--seed", "1", "--trials", "10"])
            .status
            .code(),
        Some(3)
    );
    let o = riffle(&["asym", "--n", "52", "--k", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverge"));
}

#[test]
fn asym_and_spectrum_tables() {
    let o = riffle(&["asym", "--n", "52", "--theta", "0.5", "--k", "15"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    let m: f64 = r[0][1].parse().unwrap();
    assert!((m - 0.0826).abs() < 1e-4);
    assert_eq!(r[0][4], "true");
    let o = riffle(&["spectrum", "--n", "3", "--theta", "1/2", "--backend", "exact"]);
    let text = stdout(&o);
    assert_eq!(rows(&text).len(), 3);
    assert!(text.contains("# multiplicity_sum: 6"));
}

#[test]
fn cutoff_window() {
    let o = riffle(&["cutoff", "--n", "52", "--theta", "0.5", "--c-range", "0,4,-2"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r[0][1], "10");
    let limit = |i: usize| r[i][3].parse::<f64>().unwrap();
    assert!((limit(0) - 0.63212).abs() < 1e-5);
    assert!((limit(1) - 0.01815).abs() < 1e-5);
    assert!((limit(2) - 0.99938).abs() < 1e-5);
}
