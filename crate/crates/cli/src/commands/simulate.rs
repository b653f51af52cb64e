use talbot_core::analytic::averaged_overlap_exact;
use talbot_core::quench::{
    count_resolvable_revivals, decay_from_xi, estimate_from_fit, exponential_coherence,
    fit_damped_sine, synthesize_signal, compose, FitResult, TalbotSignal,
};
use talbot_core::{CorrelatorProfile, DecayLength, DisorderModel, Error, LatticeParams};

use super::{json_number, Invocation, Run, RunOutput};
use crate::error::CliError;
use crate::output::Cell;
use crate::svg::{render, Axis, Mark, Panel, Rule, Scale, Series};

const INITIAL_PROFILE_SITES: usize = 64;

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub output: RunOutput,
    pub talbot_time: f64,
    pub xi_ref: DecayLength,
    /// Decay time of the noiseless trace (0 for a flat trace).
    pub model_decay_time: f64,
    pub revivals: usize,
    /// Integer multiples of the Talbot time inside the sweep.
    pub revival_markers: usize,
    pub signal: TalbotSignal,
    pub overlaps: Vec<f64>,
    pub fit: Option<FitResult>,
    pub fit_error: Option<String>,
}

/// Averaged overlaps at every `tau`, lengthening the profile until it
/// covers the pairs that contribute.
fn overlaps_for(
    model: &DisorderModel,
    params: &LatticeParams,
    taus: &[f64],
) -> Result<(CorrelatorProfile, Vec<f64>), CliError> {
    let mut sites = INITIAL_PROFILE_SITES;
    loop {
        let profile = model
            .correlator_profile(sites)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let values: Result<Vec<f64>, Error> = taus
            .iter()
            .map(|&tau| averaged_overlap_exact(tau, params, &profile).map(|o| o.value()))
            .collect();
        match values {
            Ok(v) => return Ok((profile, v)),
            Err(Error::ProfileTooShort { needed, .. }) if needed > sites => sites = needed.max(2 * sites),
            Err(e) => return Err(CliError::Numeric(e.to_string())),
        }
    }
}

pub fn simulate(inv: &Invocation) -> Result<SimulateReport, CliError> {
    let mut run = Run::start("simulate", inv)?;
    let cfg = run.config.clone();
    let params = cfg.lattice.resolve()?;
    let model = cfg.disorder.resolve()?;
    let times = cfg.sweep.resolve()?;
    let shape = cfg.signal.shape(&params)?;
    let noise = cfg.signal.noise()?;
    let talbot_time = params.talbot_time();
    let xi_ref = cfg.signal.reference(talbot_time)?;
    let fit_options = cfg.analysis.fit_options(talbot_time)?;

    let numeric = |e: Error| CliError::Numeric(e.to_string());
    let taus: Vec<f64> = times.iter().map(|t| t / talbot_time).collect();
    let (profile, overlaps) = overlaps_for(&model, &params, &taus)?;
    let signal = synthesize_signal(&shape, &profile, xi_ref, &times, noise, run.seed).map_err(numeric)?;
    let model_decay_time = match exponential_coherence(&profile).map_err(numeric)? {
        None => 0.0,
        Some(xi) => decay_from_xi(compose(xi, xi_ref), talbot_time).map_err(numeric)?,
    };
    let revivals = count_resolvable_revivals(&signal, talbot_time, noise, cfg.analysis.min_revival_contrast)
        .map_err(numeric)?;
    let last = *times.last().expect("sweep has points");
    let revival_markers = (last / talbot_time).floor() as usize;

    let (fit, fit_error) = if cfg.analysis.fit {
        match fit_damped_sine(&signal, &fit_options) {
            Ok(f) => (Some(f), None),
            Err(e) => {
                run.fail("fit", &e);
                (None, Some(e.to_string()))
            }
        }
    } else {
        (None, None)
    };

    let trace_rows: Vec<Vec<Cell>> = times
        .iter()
        .zip(&taus)
        .zip(&overlaps)
        .zip(signal.values())
        .map(|(((&t, &tau), &o), &s)| vec![t.into(), tau.into(), o.into(), s.into()])
        .collect();
    run.out.write_csv("trace.csv", &["time_s", "tau", "overlap", "signal"], &trace_rows)?;

    let correlator_rows: Vec<Vec<Cell>> = profile
        .values()
        .iter()
        .enumerate()
        .map(|(n, &c)| vec![n.into(), c.into()])
        .collect();
    run.out.write_csv("correlator.csv", &["n", "c_n"], &correlator_rows)?;

    if let Some(f) = &fit {
        let mut rows: Vec<Vec<Cell>> = [
            ("amplitude", f.amplitude, 0, shape.amplitude),
            ("talbot_time_s", f.talbot_time_fit, 1, talbot_time),
            ("decay_time_s", f.decay_time, 2, model_decay_time),
            ("phase_rad", f.phase_offset, 3, shape.phase),
            ("baseline", f.baseline, 4, shape.baseline),
        ]
        .into_iter()
        .map(|(name, v, i, m)| vec![name.into(), v.into(), f.stderr(i).into(), m.into()])
        .collect();
        if let Ok(est) = estimate_from_fit(f.clone(), talbot_time, xi_ref) {
            let true_coh = exponential_coherence(&profile).ok().flatten();
            let true_xi0 = true_coh.map(|x| compose(x, xi_ref).as_f64());
            rows.push(vec![
                "xi0_sites".into(),
                est.xi0.as_f64().into(),
                est.xi0_stderr.into(),
                true_xi0.map_or(Cell::Empty, Cell::Num),
            ]);
            rows.push(vec![
                "xi_coh_sites".into(),
                est.xi_coh.as_f64().into(),
                est.xi_coh_stderr.into(),
                true_coh.map_or(Cell::Empty, |x| Cell::Num(x.as_f64())),
            ]);
        }
        rows.push(vec![
            "resolvable_revivals".into(),
            Cell::Int(revivals as i64),
            Cell::Empty,
            Cell::Empty,
        ]);
        run.out.write_csv("fit.csv", &["parameter", "value", "stderr", "model"], &rows)?;
    }

    if run.svg() {
        let svg = trace_figure(&times, &signal, &overlaps, fit.as_ref(), talbot_time);
        run.out.write("trace.svg", svg.as_bytes())?;
    }

    run.note("talbot_time_s", json_number(talbot_time));
    run.note("reference_xi_sites", json_number(xi_ref.as_f64()));
    run.note("model_decay_time_s", json_number(model_decay_time));
    run.note("resolvable_revivals", revivals);
    run.note("revival_markers", revival_markers);
    if let Some(f) = &fit {
        run.note("fit_talbot_time_s", json_number(f.talbot_time_fit));
        run.note("fit_decay_time_s", json_number(f.decay_time));
    }
    let output = run.finish()?;
    Ok(SimulateReport {
        output,
        talbot_time,
        xi_ref,
        model_decay_time,
        revivals,
        revival_markers,
        signal,
        overlaps,
        fit,
        fit_error,
    })
}

fn trace_figure(
    times: &[f64],
    signal: &TalbotSignal,
    overlaps: &[f64],
    fit: Option<&FitResult>,
    talbot_time: f64,
) -> String {
    let us: Vec<f64> = times.iter().map(|t| t * 1e6).collect();
    let last = *times.last().unwrap_or(&0.0);
    let mut markers = Vec::new();
    let mut m = 1;
    while (m as f64 - 0.5) * talbot_time <= last {
        markers.push(Rule {
            at: (m as f64 - 0.5) * talbot_time * 1e6,
            color: "#bbbbbb",
            dashed: true,
            vertical: true,
        });
        if m as f64 * talbot_time <= last {
            markers.push(Rule {
                at: m as f64 * talbot_time * 1e6,
                color: "#888888",
                dashed: false,
                vertical: true,
            });
        }
        m += 1;
    }
    let x = Axis::fit("blanking time (µs)", Scale::Linear, &us).with_range(us[0], *us.last().unwrap_or(&1.0));

    let mut left = Panel::new(
        "Talbot signal",
        x.clone(),
        Axis::fit("signal", Scale::Linear, signal.values()),
    );
    let mark = if signal.sigmas().is_some() { Mark::Dots } else { Mark::Line };
    left.series.push(Series::new("signal", "#1f77b4", mark, us.clone(), signal.values().to_vec()));
    if let Some(f) = fit {
        let n = 600;
        let dense: Vec<f64> = (0..=n).map(|i| times[0] + (last - times[0]) * i as f64 / n as f64).collect();
        left.series.push(Series::new(
            "damped-sine fit",
            "#d62728",
            Mark::Dashed,
            dense.iter().map(|t| t * 1e6).collect(),
            dense.iter().map(|&t| f.evaluate(t)).collect(),
        ));
    }
    left.rules = markers.clone();

    let mut right = Panel::new(
        "averaged overlap with the central site",
        x,
        Axis::fit("overlap n₀", Scale::Linear, overlaps),
    );
    right.series.push(Series::new("n₀", "#2ca02c", Mark::Line, us, overlaps.to_vec()));
    right.rules = markers;
    render(&[left, right])
}
