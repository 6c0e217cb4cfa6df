//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hardy_lab::asymptotics::{partition_function, weyl_ratio};
use hardy_lab::bounds::{
    certify, cheng_yang_upper, cor11_upper, karachalios_lower, next_eigenvalue_bound, recursion_constant,
    telescoped_f, yang_factor, yang_inequality_gap, BoundInputs, BoundKind, Cor11Variant,
};
use hardy_lab::constants::mu_critical;
use hardy_lab::geometry::DomainSpec;
use hardy_lab::spectrum::{ball_channel_eigenvalues, ball_spectrum_oracle, cartesian_fd_spectrum, radial_fd_spectrum};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: hardy_lab::Error) -> String {
    e.to_string()
}

fn radial_vs_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: (f64, f64, usize) = (0.0, 0.0, 0);
    let mut failures = Vec::new();
    for mu in [-0.25, -0.1, 0.0, 1.0, 5.0] {
        for l in 0..=3 {
            let fd = radial_fd_spectrum(3, mu, 1.0, l, 4000).map_err(err)?;
            let exact = ball_channel_eigenvalues(3, mu, 1.0, l, 10).map_err(err)?;
            let tol = if mu == -0.25 && l == 0 { 1e-2 } else { 1e-3 };
            for (a, b) in fd.values.iter().zip(&exact) {
                let rel = (a - b).abs() / b;
                if rel > worst.0 {
                    worst = (rel, mu, l);
                }
                if rel > tol {
                    failures.push(format!("μ={mu} l={l}: {rel:.2e}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failures.is_empty() && secs <= 60.0,
        format!(
            "worst rel. error {:.2e} (μ={}, l={}), {:.1}s{}",
            worst.0,
            worst.1,
            worst.2,
            secs,
            if failures.is_empty() { String::new() } else { format!("; over tolerance: {}", failures.join(", ")) }
        ),
    )
}

fn box_sanity() -> Outcome {
    let start = Instant::now();
    let d: DomainSpec = "box:N=2,sides=1x1,center=0.001x0".parse().map_err(err)?;
    let s = cartesian_fd_spectrum(&d, 0.0, 200, 10).map_err(err)?;
    let mut exact: Vec<f64> = (1..6).flat_map(|m| (1..6).map(move |n| PI * PI * (m * m + n * n) as f64)).collect();
    exact.sort_by(f64::total_cmp);
    let worst = s.values.iter().zip(&exact).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-2 && secs <= 30.0, format!("worst rel. error {worst:.2e}, {secs:.1}s"))
}

/// (N, μ) pairs of the lower/upper bound sweep.
fn sweep() -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for dim in [3, 4] {
        for mu in [-0.25, -0.1, 0.5, 1.0, 5.0] {
            out.push((dim, mu));
        }
    }
    out
}

fn sweep_reports() -> Result<Vec<(usize, f64, Vec<hardy_lab::bounds::BoundReport>)>, String> {
    let ks: Vec<usize> = (1..=500).collect();
    sweep()
        .into_iter()
        .map(|(dim, mu)| {
            let s = ball_spectrum_oracle(dim, mu, 1.0, 500).map_err(err)?;
            let inputs = BoundInputs::from_domain(&s.domain, mu, 4000).map_err(err)?;
            Ok((dim, mu, certify(&s, &inputs, &ks).map_err(err)?))
        })
        .collect()
}

fn lower_bounds(sweep: &[(usize, f64, Vec<hardy_lab::bounds::BoundReport>)]) -> Outcome {
    let mut checked = 0;
    let mut failed = Vec::new();
    let mut karachalios = 0;
    for (dim, mu, reports) in sweep {
        for r in reports.iter().filter(|r| r.kind.is_lower()) {
            checked += 1;
            karachalios += usize::from(r.kind == BoundKind::KarachaliosLower);
            if !r.pass {
                failed.push(format!("N={dim} μ={mu} {} k={}", r.kind, r.k));
            }
        }
    }
    check(
        failed.is_empty() && karachalios > 0,
        format!("{checked} lower-bound checks ({karachalios} semigroup), {} hard failures {:?}", failed.len(), failed.iter().take(5).collect::<Vec<_>>()),
    )
}

fn upper_bounds(sweep: &[(usize, f64, Vec<hardy_lab::bounds::BoundReport>)]) -> Outcome {
    let mut checked = 0;
    let mut failed = Vec::new();
    for (dim, mu, reports) in sweep {
        for r in reports.iter().filter(|r| r.kind == BoundKind::ChengYangUpper) {
            checked += 1;
            if !r.pass {
                failed.push(format!("N={dim} μ={mu} k={}", r.k));
            }
        }
    }
    let mut test_function = Vec::new();
    for (dim, variant) in [(3, Cor11Variant::V1), (2, Cor11Variant::V2)] {
        let s = ball_spectrum_oracle(dim, 1.0, 1.0, 100).map_err(err)?;
        let inputs = BoundInputs::from_domain(&s.domain, 1.0, 4000).map_err(err)?;
        let mut min_margin = f64::INFINITY;
        for k in 1..=100 {
            let b = cor11_upper(&inputs, variant, k).map_err(err)?;
            min_margin = min_margin.min(b - s.values[k - 1]);
        }
        if min_margin <= 0.0 {
            failed.push(format!("{variant:?} N={dim}: min margin {min_margin}"));
        }
        test_function.push(format!("{variant:?} min margin {min_margin:.3}"));
    }
    check(
        failed.is_empty(),
        format!("{checked} Cheng-Yang checks, {}; failures {:?}", test_function.join(", "), failed),
    )
}

fn yang() -> Outcome {
    let mut checked = 0;
    let mut failed = Vec::new();
    for dim in [2, 3, 4] {
        for mu in [-0.2, -0.1, 0.5, 1.0, 5.0] {
            if dim == 2 && mu < 0.0 {
                continue;
            }
            if mu < 0.0 && mu < mu_critical(dim) + 0.05 {
                continue;
            }
            let s = ball_spectrum_oracle(dim, mu, 1.0, 201).map_err(err)?;
            let expected = yang_factor(dim, mu).map_err(err)?;
            for k in 1..=200 {
                let g = yang_inequality_gap(&s, k).map_err(err)?;
                checked += 1;
                if g.factor != expected || g.lhs > g.rhs {
                    failed.push(format!("N={dim} μ={mu} k={k}"));
                }
            }
        }
    }
    check(failed.is_empty(), format!("{checked} (N, μ, k) cases, failures {:?}", failed))
}

fn recursion() -> Outcome {
    let mut bad_c = Vec::new();
    for dim in 2..=8 {
        for k in 1..=1000 {
            let c = recursion_constant(dim, k);
            if !(c > 0.0 && c < 1.0) {
                bad_c.push((dim, k));
            }
        }
    }
    let mut checked = 0;
    let mut exceed = Vec::new();
    for dim in [2, 3, 4] {
        for mu in [0.5, 1.0, 5.0] {
            let l1 = ball_spectrum_oracle(dim, mu, 1.0, 1).map_err(err)?.values[0];
            for k in 1..=1000 {
                let tele = next_eigenvalue_bound(dim, telescoped_f(dim, l1, k));
                let closed = (1.0 + 4.0 / dim as f64) * (k as f64).powf(2.0 / dim as f64) * l1;
                checked += 1;
                if tele > closed {
                    exceed.push((dim, mu, k));
                }
            }
        }
    }
    check(
        bad_c.is_empty() && exceed.is_empty(),
        format!("C(N,k) in (0,1) for N ≤ 8, k ≤ 1000 ({} bad); telescoped ≤ closed form in {checked} cases ({} exceed)", bad_c.len(), exceed.len()),
    )
}

fn weyl() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for dim in [2, 3] {
        let mut mus = vec![0.0, 1.0];
        if dim == 3 {
            mus.insert(0, mu_critical(3));
        }
        let mut at_1e4 = Vec::new();
        for mu in mus {
            let t = Instant::now();
            let s = ball_spectrum_oracle(dim, mu, 1.0, 100_000).map_err(err)?;
            let enumerate_secs = t.elapsed().as_secs_f64();
            let v = s.domain.volume();
            let dev: Vec<f64> = [100, 1000, 10_000]
                .iter()
                .map(|&k| weyl_ratio(&s, v, k).map(|r| (r - 1.0).abs()))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            let monotone = dev.windows(2).all(|w| w[1] <= w[0]);
            ok &= monotone && dev[2] <= 0.1 && enumerate_secs <= 120.0;
            at_1e4.push(weyl_ratio(&s, v, 10_000).map_err(err)?);
            lines.push(format!("N={dim} μ={mu}: |r−1| = {:.4}/{:.4}/{:.4}", dev[0], dev[1], dev[2]));
        }
        let spread = at_1e4.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - at_1e4.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= spread <= 0.02;
        lines.push(format!("N={dim} μ-spread at 1e4 {spread:.4}"));
    }
    check(ok, format!("{}; {:.1}s", lines.join("; "), start.elapsed().as_secs_f64()))
}

fn heat_trace() -> Outcome {
    let s = ball_spectrum_oracle(2, 0.0, 1.0, 100_000).map_err(err)?;
    let t = 1e-3;
    let z = partition_function(&s, t).map_err(err)?;
    let ratio = t * z.value * 4.0 * PI / s.domain.volume();
    check(
        (ratio - 1.0).abs() <= 0.10 && z.tail_bound < 1e-6 * z.value,
        format!("ratio {ratio:.5} at t = 1e-3, tail/value {:.1e}", z.tail_bound / z.value),
    )
}

fn critical_case() -> Outcome {
    let mu = mu_critical(3);
    let s = ball_spectrum_oracle(3, mu, 1.0, 1).map_err(err)?;
    let l1 = s.values[0];
    let inputs = BoundInputs::from_domain(&s.domain, mu, 4000).map_err(err)?;
    let kb = karachalios_lower(&inputs, 1).map_err(err)?;
    let ub = cheng_yang_upper(&inputs, None, 1).map_err(err)?;
    check(
        (l1 - 5.783186).abs() <= 1e-6 && (kb - 2.818).abs() < 5e-4 && kb <= l1 && ub >= l1,
        format!("λ₁ = {l1:.7}, e⁻¹σ = {kb:.5} ≤ λ₁, upper {ub:.4} ≥ λ₁"),
    )
}

fn run_cli(args: &[&str], threads: &str, out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hardy-lab"))
        .args(args)
        .arg("--output")
        .arg(out)
        .env("HARDY_LAB_THREADS", threads)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("{args:?} exited with {status}"));
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let jobs: [&[&str]; 5] = [
        &["spectrum", "--domain", "ball:N=3,R=1", "--mu", "-0.1", "--method", "radial", "--mesh", "1000", "--k", "40"],
        &["spectrum", "--domain", "box:N=2,sides=1x1,center=0.001x0", "--mu", "1", "--mesh", "60", "--k", "12"],
        &["bounds", "--domain", "ball:N=3,R=1", "--mu", "1", "--k", "200", "--format", "json"],
        &["report", "--domain", "ball:N=2,R=1", "--mu", "0.5", "--k", "100"],
        &["heat-trace", "--domain", "ball:N=2,R=1", "--mu", "0", "--k", "5000"],
    ];
    let mut identical = 0;
    for (i, job) in jobs.iter().enumerate() {
        let a = run_cli(job, "1", &dir.path().join(format!("a{i}")))?;
        let b = run_cli(job, "4", &dir.path().join(format!("b{i}")))?;
        let c = run_cli(job, "4", &dir.path().join(format!("c{i}")))?;
        if a == b && b == c && !a.is_empty() {
            identical += 1;
        }
    }
    check(identical == jobs.len(), format!("{identical}/{} jobs byte-identical across 3 runs (1 and 4 threads)", jobs.len()))
}

fn main() {
    let start = Instant::now();
    let sweep = sweep_reports();
    let criteria: Vec<Criterion<'_>> = vec![
        ("1 radial solver vs Bessel oracle", Box::new(radial_vs_oracle)),
        ("2 box solver sanity", Box::new(box_sanity)),
        ("3 Li-Yau and semigroup lower bounds", Box::new(|| lower_bounds(sweep.as_ref().map_err(Clone::clone)?))),
        ("4 Cheng-Yang and test-function upper bounds", Box::new(|| upper_bounds(sweep.as_ref().map_err(Clone::clone)?))),
        ("5 Yang inequalities", Box::new(yang)),
        ("6 Cheng-Yang recursion", Box::new(recursion)),
        ("7 Weyl limit", Box::new(weyl)),
        ("8 heat trace", Box::new(heat_trace)),
        ("9 critical case", Box::new(critical_case)),
        ("10 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
