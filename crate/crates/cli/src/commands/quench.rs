use talbot_core::quench::{
    bound_curves, compose, run_quench, PowerLawFit, QuenchConfig, QuenchSeries, TransportBounds,
};
use talbot_core::DecayLength;

use super::{json_number, Invocation, Run, RunOutput};
use crate::error::CliError;
use crate::output::Cell;
use crate::svg::{render, Axis, Mark, Panel, Rule, Scale, Series};

#[derive(Debug, Clone)]
pub struct QuenchReport {
    pub output: RunOutput,
    pub series: QuenchSeries,
    /// Bound curves at each `t_Q`.
    pub bounds: Vec<TransportBounds>,
    pub alpha: Option<PowerLawFit>,
    pub alpha_error: Option<String>,
}

impl QuenchReport {
    /// A failed exponent fit is a numeric failure of the whole run.
    pub fn failure(&self) -> Option<CliError> {
        self.alpha_error
            .as_ref()
            .map(|e| CliError::Numeric(format!("power-law fit: {e}")))
    }
}

pub fn quench(inv: &Invocation) -> Result<QuenchReport, CliError> {
    let mut run = Run::start("quench", inv)?;
    let cfg = run.config.clone();
    let params = cfg.lattice.resolve()?;
    let times = cfg.sweep.resolve()?;
    let shape = cfg.signal.shape(&params)?;
    let noise = cfg.signal.noise()?;
    let talbot_time = params.talbot_time();
    let xi_ref = cfg.signal.reference(talbot_time)?;
    let fit = cfg.analysis.fit_options(talbot_time)?;
    let t_q = cfg.quench.times()?;
    let schedule = cfg.quench.schedule()?;
    let rate = cfg.quench.rate()?;

    let series = run_quench(
        &QuenchConfig {
            shape,
            xi_ref,
            times: times.clone(),
            noise_sigma: noise,
            seed: run.seed,
            fit,
        },
        &t_q,
        &schedule,
    )
    .map_err(|e| CliError::Numeric(e.to_string()))?;

    for p in &series.points {
        if let Err(e) = &p.estimate {
            run.fail(format!("t_q = {} s", p.t_q), e);
        }
    }
    let (alpha, alpha_error) = match &series.alpha {
        Ok(a) => (Some(a.clone()), None),
        Err(e) => {
            run.fail("power-law fit", e);
            (None, Some(e.to_string()))
        }
    };

    let anchor = if cfg.quench.anchor_bounds {
        series.points.iter().find_map(|p| match &p.estimate {
            Ok(e) => e.xi_coh.sites().map(|x| (p.t_q, x)),
            Err(_) => None,
        })
    } else {
        None
    };
    let bounds = bound_curves(rate, &t_q, anchor).map_err(|e| CliError::Numeric(e.to_string()))?;

    for (i, p) in series.points.iter().enumerate() {
        let fitted = p.estimate.as_ref().ok().map(|e| &e.fit);
        let rows: Vec<Vec<Cell>> = p
            .signal
            .times()
            .iter()
            .zip(p.signal.values())
            .map(|(&t, &v)| vec![t.into(), v.into(), fitted.map_or(Cell::Empty, |f| Cell::Num(f.evaluate(t)))])
            .collect();
        run.out
            .write_csv(&format!("traces/trace_{i:02}.csv"), &["time_s", "signal", "fit"], &rows)?;
    }

    let summary_rows: Vec<Vec<Cell>> = series
        .points
        .iter()
        .zip(&bounds)
        .map(|(p, b)| {
            let true_xi0 = compose(p.xi_coh_true, xi_ref).as_f64();
            let (xi0, xi0_se, coh, coh_se, lro, status) = match &p.estimate {
                Ok(e) => (
                    Cell::Num(e.xi0.as_f64()),
                    Cell::Num(e.xi0_stderr),
                    Cell::Num(e.xi_coh.as_f64()),
                    Cell::Num(e.xi_coh_stderr),
                    Cell::Bool(e.long_range_order),
                    Cell::Text("ok".into()),
                ),
                Err(err) => (
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text(format!("failed: {err}")),
                ),
            };
            vec![
                p.t_q.into(),
                p.xi_coh_true.as_f64().into(),
                true_xi0.into(),
                xi0,
                xi0_se,
                coh,
                coh_se,
                lro,
                b.ballistic.into(),
                b.diffusive.into(),
                status,
            ]
        })
        .collect();
    run.out.write_csv(
        "summary.csv",
        &[
            "t_q_s",
            "xi_coh_true",
            "xi0_true",
            "xi0",
            "xi0_stderr",
            "xi_coh",
            "xi_coh_stderr",
            "long_range_order",
            "ballistic_bound",
            "diffusive_bound",
            "status",
        ],
        &summary_rows,
    )?;

    let mut pl_rows: Vec<Vec<Cell>> = vec![vec!["reference_xi_sites".into(), xi_ref.as_f64().into()]];
    match &alpha {
        Some(a) => {
            pl_rows.push(vec!["alpha".into(), a.alpha.into()]);
            pl_rows.push(vec!["alpha_stderr".into(), a.alpha_stderr.into()]);
            pl_rows.push(vec!["prefactor_sites".into(), a.prefactor.into()]);
            pl_rows.push(vec!["points_used".into(), a.used.len().into()]);
            pl_rows.push(vec!["points_excluded".into(), a.excluded.len().into()]);
        }
        None => pl_rows.push(vec!["alpha".into(), f64::NAN.into()]),
    }
    run.out.write_csv("power_law.csv", &["quantity", "value"], &pl_rows)?;

    if run.svg() {
        let svg = summary_figure(&series, &bounds, alpha.as_ref(), rate, anchor, xi_ref);
        run.out.write("summary.svg", svg.as_bytes())?;
    }

    run.note("reference_xi_sites", json_number(xi_ref.as_f64()));
    run.note("points", series.points.len());
    run.note("failed_points", series.failures().len());
    if let Some(a) = &alpha {
        run.note("alpha", json_number(a.alpha));
        run.note("alpha_stderr", json_number(a.alpha_stderr));
    }
    let output = run.finish()?;
    Ok(QuenchReport {
        output,
        series,
        bounds,
        alpha,
        alpha_error,
    })
}

fn summary_figure(
    series: &QuenchSeries,
    bounds: &[TransportBounds],
    alpha: Option<&PowerLawFit>,
    rate: f64,
    anchor: Option<(f64, f64)>,
    xi_ref: DecayLength,
) -> String {
    let ok: Vec<_> = series
        .points
        .iter()
        .filter_map(|p| p.estimate.as_ref().ok().map(|e| (p.t_q * 1e3, e)))
        .collect();
    let ms: Vec<f64> = series.points.iter().map(|p| p.t_q * 1e3).collect();

    let xi0: Vec<f64> = ok.iter().map(|(_, e)| e.xi0.as_f64()).collect();
    let mut y_left: Vec<f64> = xi0.clone();
    y_left.push(0.0);
    if let Some(r) = xi_ref.sites() {
        y_left.push(r);
    }
    let mut left = Panel::new(
        "decay length of the Talbot signal",
        Axis::fit("equilibration time t_Q (ms)", Scale::Linear, ms.iter().chain([&0.0])),
        Axis::fit("ξ₀ (sites)", Scale::Linear, &y_left),
    );
    left.series.push(
        Series::new("fitted ξ₀", "#1f77b4", Mark::Dots, ok.iter().map(|(t, _)| *t).collect(), xi0)
            .with_errors(ok.iter().map(|(_, e)| e.xi0_stderr).collect()),
    );
    if let Some(r) = xi_ref.sites() {
        left.rules.push(Rule {
            at: r,
            color: "#7f7f7f",
            dashed: true,
            vertical: false,
        });
        left.series.push(Series::new("ξ_ref", "#7f7f7f", Mark::Dashed, vec![], vec![]));
    }

    let coh: Vec<(f64, f64, f64)> = ok
        .iter()
        .filter_map(|(t, e)| e.xi_coh.sites().map(|x| (*t, x, e.xi_coh_stderr)))
        .collect();
    let lo = ms.first().copied().unwrap_or(1.0);
    let hi = ms.last().copied().unwrap_or(10.0);
    let n = 80;
    let dense: Vec<f64> = (0..=n)
        .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
        .collect();
    let dense_bounds = bound_curves(rate, &dense.iter().map(|t| t * 1e-3).collect::<Vec<_>>(), anchor)
        .unwrap_or_default();
    let mut y_right: Vec<f64> = coh.iter().map(|c| c.1).collect();
    y_right.extend(bounds.iter().flat_map(|b| [b.diffusive]));
    let mut right = Panel::new(
        "coherence length after the quench",
        Axis::fit("equilibration time t_Q (ms)", Scale::Log, &ms),
        Axis::fit("ξ_coh (sites)", Scale::Log, &y_right),
    );
    right.series.push(
        Series::new(
            "corrected ξ_coh",
            "#1f77b4",
            Mark::Dots,
            coh.iter().map(|c| c.0).collect(),
            coh.iter().map(|c| c.1).collect(),
        )
        .with_errors(coh.iter().map(|c| c.2).collect()),
    );
    if let Some(a) = alpha {
        right.series.push(Series::new(
            &format!("power law, α = {:.3} ± {:.3}", a.alpha, a.alpha_stderr),
            "#d62728",
            Mark::Line,
            dense.clone(),
            dense.iter().map(|t| a.evaluate(t * 1e-3)).collect(),
        ));
    }
    if !dense_bounds.is_empty() {
        right.series.push(Series::new(
            "ballistic bound",
            "#2ca02c",
            Mark::Dashed,
            dense.clone(),
            dense_bounds.iter().map(|b| b.ballistic).collect(),
        ));
        right.series.push(Series::new(
            "diffusive bound",
            "#9467bd",
            Mark::Dashed,
            dense,
            dense_bounds.iter().map(|b| b.diffusive).collect(),
        ));
    }
    render(&[left, right])
}
