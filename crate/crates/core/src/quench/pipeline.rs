//! Synthetic quench experiments: one Talbot trace per equilibration time,
//! each fitted and converted into a coherence length.

use rand::Rng;
use rayon::prelude::*;

use super::coherence::{coherence_correction, xi_from_decay};
use super::fit::{fit_damped_sine, index, FitOptions, FitResult};
use super::scaling::{fit_power_law, PowerLawFit};
use super::signal::{synthesize_signal, SignalShape, TalbotSignal};
use crate::decay::DecayLength;
use crate::disorder::correlator_profile_for_quench;
use crate::error::{domain, ensure_positive, Error, Result};
use crate::rng;

/// Highest separation kept in the synthetic correlator profiles.
const PROFILE_SITES: usize = 64;

/// True coherence length as a function of equilibration time.
#[derive(Debug, Clone, PartialEq)]
pub enum CoherenceSchedule {
    /// `ξ = √(rate · t_Q)`.
    Diffusive { rate: f64 },
    /// `ξ = 2 · rate · t_Q`.
    Ballistic { rate: f64 },
    /// `ξ = prefactor · (t_Q / 1 s)^exponent`.
    PowerLaw { prefactor: f64, exponent: f64 },
    /// One length per equilibration time, in order.
    Explicit(Vec<DecayLength>),
}

impl CoherenceSchedule {
    pub fn lengths(&self, t_q: &[f64]) -> Result<Vec<DecayLength>> {
        for &t in t_q {
            ensure_positive("equilibration time", t)?;
        }
        match self {
            CoherenceSchedule::Diffusive { rate } => {
                ensure_positive("tunnelling rate", *rate)?;
                t_q.iter()
                    .map(|t| DecayLength::finite((rate * t).sqrt()))
                    .collect()
            }
            CoherenceSchedule::Ballistic { rate } => {
                ensure_positive("tunnelling rate", *rate)?;
                t_q.iter()
                    .map(|t| DecayLength::finite(2.0 * rate * t))
                    .collect()
            }
            CoherenceSchedule::PowerLaw {
                prefactor,
                exponent,
            } => {
                ensure_positive("power-law prefactor", *prefactor)?;
                if !exponent.is_finite() {
                    return Err(domain("power-law exponent must be finite"));
                }
                t_q.iter()
                    .map(|t| DecayLength::finite(prefactor * t.powf(*exponent)))
                    .collect()
            }
            CoherenceSchedule::Explicit(v) => {
                if v.len() != t_q.len() {
                    return Err(domain(format!(
                        "explicit schedule has {} lengths for {} times",
                        v.len(),
                        t_q.len()
                    )));
                }
                for x in v {
                    if let DecayLength::Finite(s) = x {
                        DecayLength::finite(*s)?;
                    }
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchConfig {
    pub shape: SignalShape,
    pub xi_ref: DecayLength,
    /// Blanking times of every trace (s).
    pub times: Vec<f64>,
    pub noise_sigma: f64,
    pub seed: u64,
    pub fit: FitOptions,
}

/// Fitted quantities at one equilibration time.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEstimate {
    pub fit: FitResult,
    pub xi0: DecayLength,
    pub xi0_stderr: f64,
    /// Coherence length with the reference channel removed; infinite when
    /// flagged as long-range order.
    pub xi_coh: DecayLength,
    pub xi_coh_stderr: f64,
    /// `ξ₀` is indistinguishable from (or above) the reference length.
    pub long_range_order: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchPoint {
    pub t_q: f64,
    pub xi_coh_true: DecayLength,
    pub signal: TalbotSignal,
    pub estimate: std::result::Result<PointEstimate, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchSeries {
    pub xi_ref: DecayLength,
    pub points: Vec<QuenchPoint>,
    pub alpha: std::result::Result<PowerLawFit, Error>,
}

impl QuenchSeries {
    pub fn t_q(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t_q).collect()
    }

    /// Indices of points whose fit failed.
    pub fn failures(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| self.points[i].estimate.is_err())
            .collect()
    }
}

/// Turns a fit into `ξ₀` and `ξ_coh`, flagging long-range order when `ξ₀`
/// comes within one standard error of the reference.
pub fn estimate_from_fit(
    fit: FitResult,
    talbot_time: f64,
    xi_ref: DecayLength,
) -> Result<PointEstimate> {
    let xi0 = xi_from_decay(fit.decay_time, talbot_time)?;
    let t_fit = fit.talbot_time_fit;
    let xi0_stderr = match xi0 {
        DecayLength::Infinite => f64::INFINITY,
        DecayLength::Finite(x) => {
            // ξ₀ = 2 t_T / T_T using the fitted period.
            let c = &fit.covariance;
            let (dt, dp) = (2.0 / t_fit, -x / t_fit);
            let var = dt * dt * c[index::DECAY_TIME][index::DECAY_TIME]
                + dp * dp * c[index::TALBOT_TIME][index::TALBOT_TIME]
                + 2.0 * dt * dp * c[index::DECAY_TIME][index::TALBOT_TIME];
            var.max(0.0).sqrt()
        }
    };
    let long_range_order = match (xi0, xi_ref) {
        (_, DecayLength::Infinite) => xi0.is_infinite(),
        (DecayLength::Infinite, _) => true,
        (DecayLength::Finite(x), DecayLength::Finite(r)) => x >= r - xi0_stderr.max(1e-6 * r),
    };
    let (xi_coh, xi_coh_stderr) = if long_range_order {
        (DecayLength::Infinite, f64::INFINITY)
    } else {
        let coh = coherence_correction(xi0, xi_ref)?;
        let ratio = coh.as_f64() / xi0.as_f64();
        (coh, ratio * ratio * xi0_stderr)
    };
    Ok(PointEstimate {
        fit,
        xi0,
        xi0_stderr,
        xi_coh,
        xi_coh_stderr,
        long_range_order,
    })
}

/// Synthesizes, fits and corrects one trace per equilibration time, then
/// fits the growth exponent. Point `i` draws its noise seed from stream `i`
/// of the configured seed; points are processed in parallel.
pub fn run_quench(
    config: &QuenchConfig,
    t_q: &[f64],
    schedule: &CoherenceSchedule,
) -> Result<QuenchSeries> {
    config.shape.validate()?;
    if t_q.len() < 3 {
        return Err(domain(format!(
            "a quench schedule needs at least 3 equilibration times, have {}",
            t_q.len()
        )));
    }
    let lengths = schedule.lengths(t_q)?;
    let talbot_time = config.shape.talbot_time;
    let points: Vec<Result<QuenchPoint>> = t_q
        .par_iter()
        .zip(&lengths)
        .enumerate()
        .map(|(i, (&t, &xi))| {
            let profile = correlator_profile_for_quench(xi, PROFILE_SITES)?;
            let seed: u64 = rng::stream(config.seed, i as u64).random();
            let signal = synthesize_signal(
                &config.shape,
                &profile,
                config.xi_ref,
                &config.times,
                config.noise_sigma,
                seed,
            )?;
            let estimate = fit_damped_sine(&signal, &config.fit)
                .and_then(|fit| estimate_from_fit(fit, talbot_time, config.xi_ref));
            Ok(QuenchPoint {
                t_q: t,
                xi_coh_true: xi,
                signal,
                estimate,
            })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    let (times, xis): (Vec<f64>, Vec<DecayLength>) = points
        .iter()
        .filter_map(|p| p.estimate.as_ref().ok().map(|e| (p.t_q, e.xi_coh)))
        .unzip();
    let alpha = fit_power_law(&times, &xis);
    Ok(QuenchSeries {
        xi_ref: config.xi_ref,
        points,
        alpha,
    })
}
