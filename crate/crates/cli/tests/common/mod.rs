#![allow(dead_code)]

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

pub fn hsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsd"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("hsd runs")
}

pub fn spec_file(text: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

pub fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Numeric rows (`n` in the first column) of a series CSV.
pub fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .filter(|l| l.split(',').next().is_some_and(|c| c.parse::<usize>().is_ok()))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

/// Value of the first footer row named `key`.
pub fn footer(csv: &str, key: &str) -> Option<String> {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")).map(str::to_string))
}

pub const CHAIN: &str = r#"
[space]
labels = ["a", "b"]

[process.chain]
kind = "markov"
transition = [[0.9, 0.1], [0.5, 0.5]]
initial = [0.8333333333333334, 0.16666666666666666]
stationary = true
"#;

/// `-Σ p_i φ(p_ij)` for the chain above, written out by hand.
pub fn chain_rate() -> f64 {
    let phi = |x: f64| x * x.ln();
    -(5.0 / 6.0) * (phi(0.9) + phi(0.1)) - (1.0 / 6.0) * (phi(0.5) + phi(0.5))
}
