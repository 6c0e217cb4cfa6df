use std::path::Path;
use std::process::{Command, Output};

use hardy_lab::bounds::{certify, reports_to_csv, BoundInputs};
use hardy_lab::spectrum::{ball_spectrum_oracle, Spectrum};

fn hardy_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-lab")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn spectrum_document_from_the_oracle() {
    let o = hardy_lab(&["spectrum", "--domain", "ball:N=3,R=1", "--mu", "-0.25", "--method", "oracle", "--k", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = Spectrum::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(s.k_max(), 100);
    assert!((s.values[0] - 5.783186).abs() < 1e-6);
}

#[test]
fn bounds_sweep_has_no_failing_rows() {
    let o = hardy_lab(&["bounds", "--domain", "ball:N=3,R=1", "--mu", "1", "--k", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("kind,k,bound,spectral,margin,pass"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 3000);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn report_orders_lower_spectral_upper() {
    let o = hardy_lab(&["report", "--domain", "ball:N=2,R=1", "--mu", "0.5", "--k", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let spectral = header.iter().position(|h| *h == "spectral").unwrap();
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let cells: Vec<&str> = line.split(',').collect();
        let lambda: f64 = cells[spectral].parse().unwrap();
        for (h, c) in header.iter().zip(&cells) {
            if c.is_empty() || *h == "k" || *h == "pass" {
                continue;
            }
            let v: f64 = c.parse().unwrap();
            if h.ends_with("_lower") {
                assert!(v <= lambda, "{h} {v} > {lambda}");
            } else if h.ends_with("_upper") || h.contains("upper_v") {
                assert!(v >= lambda, "{h} {v} < {lambda}");
            }
        }
        assert!(line.ends_with(",true"));
    }
    assert_eq!(rows, 100);
}

#[test]
fn parameter_errors_exit_with_two() {
    let o = hardy_lab(&["spectrum", "--domain", "ball:N=2,R=1", "--mu", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("μ < 0 requires N ≥ 3"));

    let o = hardy_lab(&["spectrum", "--domain", "ball:N=3,R=1", "--mu", "-0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("critical Hardy constant"));

    let o = hardy_lab(&["spectrum", "--domain", "ball:N=3,R=-1", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = hardy_lab(&["spectrum", "--domain", "box:N=2,sides=1x1", "--mu", "1", "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid node"));

    let o = hardy_lab(&["spectrum", "--domain", "ball:N=3,R=1", "--mu", "1", "--method", "cartesian"]);
    assert_eq!(o.status.code(), Some(2));

    let o = hardy_lab(&["spectrum", "--mu", "1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_hardy-lab"))
        .args(["spectrum", "--domain", "ball:N=3,R=1", "--mu", "1"])
        .env("HARDY_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_with_one() {
    let o = hardy_lab(&["bounds", "--spectrum", "/nonexistent/spectrum.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn spectrum_file_round_trip_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let spectrum_path = dir.path().join("s.json");
    let bounds_path = dir.path().join("b.csv");
    let sp = spectrum_path.to_str().unwrap();
    let o = hardy_lab(&["spectrum", "--domain", "ball:N=3,R=1", "--mu", "-0.1", "--k", "150", "-o", sp]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = hardy_lab(&["bounds", "--spectrum", sp, "--k", "150", "-o", bounds_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let s = ball_spectrum_oracle(3, -0.1, 1.0, 150).unwrap();
    let inputs = BoundInputs::from_domain(&s.domain, -0.1, 4000).unwrap();
    let ks: Vec<usize> = (1..=150).collect();
    let expected = reports_to_csv(&certify(&s, &inputs, &ks).unwrap());
    assert_eq!(std::fs::read_to_string(&bounds_path).unwrap(), expected);

    // a conflicting --mu is rejected
    let o = hardy_lab(&["bounds", "--spectrum", sp, "--mu", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

fn only_file(dir: &Path) -> Vec<String> {
    std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect()
}

#[test]
fn outputs_are_written_atomically_and_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = hardy_lab(&["weyl", "--domain", "ball:N=3,R=1", "--mu", "1", "--k", "2000", "-o", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let mut names = only_file(dir.path());
    names.sort();
    assert_eq!(names, vec!["a.csv", "b.csv"]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("abscissa,ratio,target\n"));
}

#[test]
fn yang_rows() {
    let o = hardy_lab(&["yang", "--domain", "ball:N=3,R=1", "--mu", "-0.1", "--k", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "k,lhs,rhs,factor");
    assert_eq!(rows.len(), 50);
    for r in &rows[1..] {
        let c: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(c[1] <= c[2]);
        assert!((c[3] - 20.0 / 9.0).abs() < 1e-10);
    }
}

#[test]
fn heat_trace_refuses_small_t() {
    let o = hardy_lab(&["heat-trace", "--domain", "ball:N=2,R=1", "--mu", "0", "--k", "300", "--t", "0.1,0.001"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let err = stderr(&o);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(err.contains("refused t = 1e-3"), "{err}");
}

#[test]
fn box_spectrum_with_csv_output() {
    let o = hardy_lab(&[
        "spectrum", "--domain", "box:N=2,sides=1x1,center=0.001x0", "--mu", "0", "--mesh", "40", "--k", "4", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("k,lambda\n1,1.97"));
}
