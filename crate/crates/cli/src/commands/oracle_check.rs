use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use talbot_core::analytic::{
    averaged_overlap_decomposed, averaged_overlap_exact, density_overlap, weight_even,
    weight_even_dual, weight_odd, weight_odd_dual,
};
use talbot_core::disorder::SiteWindow;
use talbot_core::oracle::{monte_carlo_average, overlap_by_quadrature_unchecked};
use talbot_core::{rng, CorrelatorProfile, DisorderModel, Error, LatticeParams, PhaseConfiguration};

use super::{json_number, subseed, Invocation, Run, RunOutput};
use crate::config::OracleSection;
use crate::error::CliError;
use crate::output::Cell;

/// Tail bound below which both duality series count as converged.
const DUALITY_TAIL: f64 = 1e-12;
const DECOMPOSITION_PROFILE_SITES: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub evaluations: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Unit of `max_deviation` and `tolerance`.
    pub unit: &'static str,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.evaluations > 0 && self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub output: RunOutput,
    pub checks: Vec<CheckResult>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failure(&self) -> Option<CliError> {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        (!failed.is_empty()).then(|| CliError::Numeric(format!("oracle checks failed: {}", failed.join(", "))))
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>6} {:>14} {:>12} {:<10} result",
            "check", "evals", "max deviation", "tolerance", "unit"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<16} {:>6} {:>14.3e} {:>12.1e} {:<10} {}",
                c.name,
                c.evaluations,
                c.max_deviation,
                c.tolerance,
                c.unit,
                if c.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn numeric(e: Error) -> CliError {
    CliError::Numeric(e.to_string())
}

fn quadrature_check(params: &LatticeParams, o: &OracleSection, seed: u64) -> Result<CheckResult, CliError> {
    let half = o.sites as i64;
    let mut worst: f64 = 0.0;
    let mut evaluations = 0;
    for i in 0..o.configurations {
        let mut r = rng::stream(seed, i as u64);
        let draws: Vec<f64> = (0..=2 * half).map(|_| r.random::<f64>() * TAU).collect();
        let phases = PhaseConfiguration::new(-half, draws).map_err(numeric)?;
        for &tau in &o.taus {
            let q = overlap_by_quadrature_unchecked(tau, params, &phases, o.quadrature()).map_err(numeric)?;
            let exact = density_overlap(tau, params, &phases).value;
            worst = worst.max((q.overlap.value - exact).abs());
            evaluations += 1;
        }
    }
    Ok(CheckResult {
        name: "quadrature",
        evaluations,
        max_deviation: worst,
        tolerance: o.quadrature_tolerance,
        unit: "absolute",
    })
}

fn exact_with_long_enough_profile(
    tau: f64,
    params: &LatticeParams,
    model: &DisorderModel,
) -> Result<f64, CliError> {
    let mut sites = 128;
    loop {
        let profile = model.correlator_profile(sites).map_err(numeric)?;
        match averaged_overlap_exact(tau, params, &profile) {
            Ok(o) => return Ok(o.value()),
            Err(Error::ProfileTooShort { needed, .. }) if needed > sites => sites = needed.max(2 * sites),
            Err(e) => return Err(numeric(e)),
        }
    }
}

fn monte_carlo_check(
    params: &LatticeParams,
    o: &OracleSection,
    window: SiteWindow,
    seed: u64,
) -> Result<CheckResult, CliError> {
    let model = DisorderModel::random_walk(o.mc_epsilon).map_err(numeric)?;
    let mut worst: f64 = 0.0;
    for &tau in &o.mc_taus {
        let mc = monte_carlo_average(tau, params, &model, window, o.mc_samples, seed).map_err(numeric)?;
        let exact = exact_with_long_enough_profile(tau, params, &model)?;
        let z = if mc.stderr > 0.0 {
            (mc.mean - exact).abs() / mc.stderr
        } else if (mc.mean - exact).abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
    }
    Ok(CheckResult {
        name: "monte-carlo",
        evaluations: o.mc_taus.len(),
        max_deviation: worst,
        tolerance: o.mc_sigmas,
        unit: "std-errors",
    })
}

fn duality_check(params: &LatticeParams, o: &OracleSection, seed: u64) -> Result<CheckResult, CliError> {
    let mut r = rng::stream(seed, 0);
    let mut worst: f64 = 0.0;
    let mut evaluations = 0;
    let mut attempts = 0;
    while evaluations < o.duality_points && attempts < 100 * o.duality_points {
        attempts += 1;
        let l: i64 = r.random_range(-6..=6);
        let tau: f64 = r.random_range(0.05..4.0);
        let (e, ed) = (weight_even(l, tau, params), weight_even_dual(l, tau, params).map_err(numeric)?);
        let (d, dd) = (weight_odd(l, tau, params), weight_odd_dual(l, tau, params).map_err(numeric)?);
        if [e.tail_bound, ed.tail_bound, d.tail_bound, dd.tail_bound]
            .iter()
            .any(|t| *t >= DUALITY_TAIL)
        {
            continue;
        }
        worst = worst.max((e.value - ed.value).norm()).max((d.value - dd.value).norm());
        evaluations += 1;
    }
    Ok(CheckResult {
        name: "duality",
        evaluations,
        max_deviation: if evaluations < o.duality_points { f64::INFINITY } else { worst },
        tolerance: o.duality_tolerance,
        unit: "absolute",
    })
}

fn decomposition_check(params: &LatticeParams, o: &OracleSection, seed: u64) -> Result<CheckResult, CliError> {
    let mut r = rng::stream(seed, 0);
    let random: Vec<f64> = (0..=DECOMPOSITION_PROFILE_SITES)
        .map(|n| if n == 0 { 1.0 } else { r.random_range(-1.0..=1.0) })
        .collect();
    let walk = DisorderModel::random_walk(o.mc_epsilon).map_err(numeric)?;
    let profiles = [
        CorrelatorProfile::coherent(DECOMPOSITION_PROFILE_SITES),
        walk.correlator_profile(DECOMPOSITION_PROFILE_SITES).map_err(numeric)?,
        CorrelatorProfile::new(random).map_err(numeric)?,
    ];
    let mut worst: f64 = 0.0;
    let mut evaluations = 0;
    for profile in &profiles {
        for &tau in o.taus.iter().chain(&o.mc_taus) {
            let a = averaged_overlap_exact(tau, params, profile).map_err(numeric)?;
            let b = averaged_overlap_decomposed(tau, params, profile).map_err(numeric)?;
            worst = worst.max((a.value() - b.value()).abs());
            evaluations += 1;
        }
    }
    Ok(CheckResult {
        name: "decomposition",
        evaluations,
        max_deviation: worst,
        tolerance: o.decomposition_tolerance,
        unit: "absolute",
    })
}

pub fn oracle_check(inv: &Invocation) -> Result<OracleReport, CliError> {
    let mut run = Run::start("oracle-check", inv)?;
    let cfg = run.config.clone();
    let params = cfg.lattice.resolve()?;
    cfg.oracle.validate()?;
    if cfg.disorder.window == 0 {
        return Err(CliError::Validation("disorder.window: must be at least 1 site".into()));
    }
    let window = SiteWindow::centered(cfg.disorder.window)
        .map_err(|e| CliError::Validation(format!("disorder.window: {e}")))?;
    let o = &cfg.oracle;
    let seed = run.seed;

    let checks = vec![
        quadrature_check(&params, o, subseed(seed, 0))?,
        monte_carlo_check(&params, o, window, subseed(seed, 1))?,
        duality_check(&params, o, subseed(seed, 2))?,
        decomposition_check(&params, o, subseed(seed, 3))?,
    ];

    let rows: Vec<Vec<Cell>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.into(),
                c.evaluations.into(),
                c.max_deviation.into(),
                c.tolerance.into(),
                c.unit.into(),
                c.passed().into(),
            ]
        })
        .collect();
    run.out.write_csv(
        "oracle_report.csv",
        &["check", "evaluations", "max_deviation", "tolerance", "unit", "passed"],
        &rows,
    )?;
    for c in &checks {
        run.note(&format!("{}_max_deviation", c.name), json_number(c.max_deviation));
        run.note(&format!("{}_passed", c.name), c.passed());
        if !c.passed() {
            run.fail(
                c.name,
                format!("max deviation {:e} exceeds tolerance {:e} ({})", c.max_deviation, c.tolerance, c.unit),
            );
        }
    }
    let output = run.finish()?;
    Ok(OracleReport { output, checks })
}
