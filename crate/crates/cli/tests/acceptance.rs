//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use talbot_cli::commands::{oracle_check, quench, simulate, Invocation, OracleReport};
use talbot_cli::output::Table;
use talbot_core::analytic::{averaged_overlap_exact, density_overlap};
use talbot_core::disorder::SiteWindow;
use talbot_core::lattice::{gaussian_width_from_depth, talbot_time};
use talbot_core::oracle::monte_carlo_average;
use talbot_core::quench::interaction_decay_estimate;
use talbot_core::{CorrelatorProfile, DisorderModel, LatticeParams, PhaseConfiguration};

const PLANCK: f64 = 6.626_070_15e-34;
const AMU: f64 = 1.660_539_066_60e-27;
const RB87: f64 = 86.909_180_527 * AMU;
const D: f64 = 547e-9;

fn report(n: u32, pass: bool, detail: impl AsRef<str>) {
    println!(
        "criterion {n:>2}: {} {}",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    assert!(pass, "criterion {n} failed: {}", detail.as_ref());
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn criterion_01_talbot_time() {
    let expected = 2.0 * RB87 * D * D / PLANCK;
    let t = talbot_time(RB87, D).unwrap();
    let rel = (t / 130.3e-6 - 1.0).abs();
    let pass = rel < 0.01 && (t / expected - 1.0).abs() < 1e-12;
    report(1, pass, format!("T_T = {:.3} µs (target 130.3 µs ± 1%)", t * 1e6));
}

#[test]
fn criterion_02_width_factor() {
    let sigma = gaussian_width_from_depth(5.0, D).unwrap();
    let by_hand = D / (PI * 5f64.powf(0.25));
    let a = 2.0 * PI * PI * sigma * sigma / (D * D);
    let pass = (a - 0.89).abs() <= 0.01 && (sigma / by_hand - 1.0).abs() < 1e-12;
    report(2, pass, format!("2π²σ²/d² = {a:.4} (target 0.89 ± 0.01)"));
}

#[test]
fn criterion_03_interaction_decay() {
    let hbar = PLANCK / (2.0 * PI);
    let mu = PLANCK * 1.4e3;
    let sigma = D / 5.0;
    let t = interaction_decay_estimate(mu, sigma, D).unwrap();
    let by_hand = (2.0 * PI * hbar / D) * (PI * sigma / mu);
    let pass = (t / 450e-6 - 1.0).abs() <= 0.05 && (t / by_hand - 1.0).abs() < 1e-12;
    report(3, pass, format!("t = {:.1} µs (target 450 µs ± 5%)", t * 1e6));
}

#[test]
fn criterion_04_revival_periodicity() {
    let start = Instant::now();
    let params = LatticeParams::new(D, RB87, 5.0).unwrap();
    let phases = PhaseConfiguration::uniform(-200, 200).unwrap();
    let worst = (0..50)
        .map(|i| 3.0 * i as f64 / 49.0)
        .map(|tau| {
            (density_overlap(tau + 1.0, &params, &phases).value - density_overlap(tau, &params, &phases).value)
                .abs()
        })
        .fold(0.0f64, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        4,
        worst < 1e-9 && elapsed < 1.0,
        format!("max |n₀(τ+1) − n₀(τ)| = {worst:.2e} over τ ∈ [0, 3] ({elapsed:.2} s)"),
    );
}

/// One default oracle-check run shared by the criteria that read it.
fn oracle_run() -> &'static (OracleReport, f64) {
    static RUN: OnceLock<(OracleReport, f64)> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap().keep();
        let start = Instant::now();
        let r = oracle_check(&Invocation::default().out(&dir).seed(2024)).unwrap();
        (r, start.elapsed().as_secs_f64())
    })
}

#[test]
fn criterion_05_oracle_equivalence() {
    let (r, elapsed) = oracle_run();
    let c = r.checks.iter().find(|c| c.name == "quadrature").unwrap();
    let pass = c.passed() && c.evaluations == 40 && c.tolerance == 1e-6 && *elapsed < 60.0;
    report(
        5,
        pass,
        format!(
            "quadrature vs closed form: max deviation {:.2e} over {} evaluations (tol 1e-6; whole oracle run {elapsed:.1} s)",
            c.max_deviation, c.evaluations
        ),
    );
}

#[test]
fn criterion_06_poisson_duality() {
    let (r, _) = oracle_run();
    let c = r.checks.iter().find(|c| c.name == "duality").unwrap();
    let pass = c.passed() && c.evaluations == 20 && c.tolerance == 1e-10;
    report(
        6,
        pass,
        format!("direct vs dual weights: max deviation {:.2e} at {} random (L, τ)", c.max_deviation, c.evaluations),
    );
}

#[test]
fn criterion_07_monte_carlo() {
    let start = Instant::now();
    let params = LatticeParams::new(D, RB87, 5.0).unwrap();
    let eps: f64 = 1.0;
    let model = DisorderModel::random_walk(eps).unwrap();
    let profile = CorrelatorProfile::from_fn(400, |n| (-(n as f64) * eps * eps / 2.0).exp()).unwrap();
    let mut worst: f64 = 0.0;
    for tau in [0.5, 1.0, 1.5, 2.0] {
        let mc = monte_carlo_average(tau, &params, &model, SiteWindow::default(), 10_000, 99).unwrap();
        let exact = averaged_overlap_exact(tau, &params, &profile).unwrap().value();
        worst = worst.max((mc.mean - exact).abs() / mc.stderr);
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        7,
        worst < 3.0 && elapsed < 60.0,
        format!("random walk ε = 1: worst deviation {worst:.2} standard errors at 10⁴ samples ({elapsed:.1} s)"),
    );
}

#[test]
fn criterion_08_pipeline_round_trip() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "rt.toml",
        r#"
[sweep]
points = 28
[signal]
reference = 8.5
[quench]
t_q = ["1 ms", "2 ms", "3 ms", "4 ms"]
schedule = "explicit"
lengths = [2.0, 4.0, 8.0, 16.0]
"#,
    );
    let r = quench(&Invocation::with_config(cfg).out(dir.path().join("out")).seed(1)).unwrap();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for p in &r.series.points {
        match &p.estimate {
            Ok(e) => worst = worst.max((e.xi_coh.as_f64() / p.xi_coh_true.as_f64() - 1.0).abs()),
            Err(_) => ok = false,
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        8,
        ok && worst < 0.10 && elapsed < 10.0,
        format!("ξ_coh ∈ {{2, 4, 8, 16}} recovered within {:.2e} relative ({elapsed:.2} s)", worst),
    );
}

#[test]
fn criterion_09_scaling_exponent() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let diffusive = write_config(
        dir.path(),
        "diffusive.toml",
        r#"
[sweep]
points = 28
[signal]
reference = 8.5
[quench]
schedule = "diffusive"
tunnelling_time = "1.3 ms"
"#,
    );
    let ballistic = write_config(
        dir.path(),
        "ballistic.toml",
        r#"
[sweep]
points = 28
[signal]
reference = 8.5
[quench]
t_q = ["10 ms", "20 ms", "40 ms", "80 ms"]
schedule = "ballistic"
tunnelling_time = "10 ms"
"#,
    );
    let alpha = |cfg, out: &str| {
        quench(&Invocation::with_config(cfg).out(dir.path().join(out)).seed(3))
            .unwrap()
            .alpha
            .map(|a| a.alpha)
            .unwrap_or(f64::NAN)
    };
    let a_diff = alpha(diffusive, "diffusive");
    let a_ball = alpha(ballistic, "ballistic");
    let elapsed = start.elapsed().as_secs_f64();
    report(
        9,
        (a_diff - 0.5).abs() <= 0.05 && (a_ball - 1.0).abs() <= 0.05 && elapsed < 60.0,
        format!("α = {a_diff:.4} (diffusive, target 0.5 ± 0.05), {a_ball:.4} (ballistic, target 1.0 ± 0.05) ({elapsed:.1} s)"),
    );
}

#[test]
fn criterion_10_revival_trace_and_fit() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "trace.toml",
        r#"
[lattice]
talbot_time = "123 us"
[sweep]
start = "0 us"
end = "1 ms"
points = 201
[signal]
reference_decay = "525 us"
noise = 0.005
"#,
    );
    let r = simulate(&Invocation::with_config(cfg).out(dir.path().join("out")).seed(10)).unwrap();
    let f = r.fit.as_ref().expect("fit converged");
    let dt = (f.talbot_time_fit / 123e-6 - 1.0).abs();
    let dd = (f.decay_time / 525e-6 - 1.0).abs();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        10,
        r.revivals >= 7 && dt <= 0.02 && dd <= 0.05 && elapsed < 10.0,
        format!(
            "{} resolvable revivals; fit T_T = {:.2} µs ({:.2}%), t_T = {:.1} µs ({:.2}%) ({elapsed:.2} s)",
            r.revivals,
            f.talbot_time_fit * 1e6,
            dt * 100.0,
            f.decay_time * 1e6,
            dd * 100.0
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "det.toml",
        r#"
[disorder]
model = "random-walk"
epsilon = 0.4
[signal]
noise = 0.01
"#,
    );
    let run = |out: &str| simulate(&Invocation::with_config(&cfg).out(dir.path().join(out)).seed(42)).unwrap();
    let (a, b) = (run("a"), run("b"));
    let mut identical = true;
    let mut compared = 0;
    for f in a.output.manifest.outputs.iter().filter(|f| f.path.ends_with(".csv")) {
        let x = std::fs::read(a.output.dir.join(&f.path)).unwrap();
        let y = std::fs::read(b.output.dir.join(&f.path)).unwrap();
        identical &= x == y;
        compared += 1;
    }
    let signal = Table::read(&a.output.dir.join("trace.csv")).unwrap().numbers("signal").unwrap();
    identical &= signal == a.signal.values();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        11,
        identical && compared >= 3 && elapsed < 10.0,
        format!("{compared} CSV files byte-identical across two seeded runs ({elapsed:.2} s)"),
    );
}
