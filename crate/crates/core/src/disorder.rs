//! Generative models of site-phase disorder whose correlators are known in
//! closed form.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::analytic::{CorrelatorProfile, PhaseConfiguration};
use crate::decay::DecayLength;
use crate::error::{domain, Result};
use crate::rng;

/// Sites in the default phase window, matching the extent of the atomic sample.
pub const DEFAULT_WINDOW_SITES: usize = 151;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisorderModel {
    /// All phases equal.
    Coherent,
    /// Phases i.i.d. uniform on `[0, 2π)`.
    IndependentUniform,
    /// `φ_{n+1} = φ_n + Normal(0, ε²)`.
    GaussianRandomWalk { epsilon: f64 },
}

impl DisorderModel {
    pub fn random_walk(epsilon: f64) -> Result<Self> {
        let model = DisorderModel::GaussianRandomWalk { epsilon };
        model.validate()?;
        Ok(model)
    }

    /// Random walk whose correlator decays as `exp(−N/ξ)`, i.e. `ε = √(2/ξ)`.
    pub fn random_walk_with_length(xi: DecayLength) -> Result<Self> {
        match xi {
            DecayLength::Infinite => Self::random_walk(0.0),
            DecayLength::Finite(x) => {
                DecayLength::finite(x)?;
                Self::random_walk((2.0 / x).sqrt())
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DisorderModel::GaussianRandomWalk { epsilon }
                if !(epsilon.is_finite() && epsilon >= 0.0) =>
            {
                Err(domain(format!(
                    "random-walk epsilon must be finite and >= 0, got {epsilon}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// `C_N` of the model.
    pub fn closed_form_correlator(&self, separation: usize) -> f64 {
        match *self {
            DisorderModel::Coherent => 1.0,
            DisorderModel::IndependentUniform => {
                if separation == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            DisorderModel::GaussianRandomWalk { epsilon } => {
                (-(separation as f64) * epsilon * epsilon / 2.0).exp()
            }
        }
    }

    pub fn correlator_profile(&self, n_max: usize) -> Result<CorrelatorProfile> {
        self.validate()?;
        CorrelatorProfile::from_fn(n_max, |n| self.closed_form_correlator(n))
    }

    /// Decay length of the correlator; `None` for independent phases, whose
    /// correlator vanishes beyond `N = 0`.
    pub fn coherence_length(&self) -> Option<DecayLength> {
        match *self {
            DisorderModel::Coherent => Some(DecayLength::Infinite),
            DisorderModel::IndependentUniform => None,
            DisorderModel::GaussianRandomWalk { epsilon } => Some(if epsilon == 0.0 {
                DecayLength::Infinite
            } else {
                DecayLength::Finite(2.0 / (epsilon * epsilon))
            }),
        }
    }
}

/// Inclusive site range `n_min ..= n_max` containing site 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteWindow {
    pub n_min: i64,
    pub n_max: i64,
}

impl SiteWindow {
    pub fn new(n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > 0 || n_max < 0 {
            return Err(domain(format!(
                "site window {n_min}..={n_max} must contain site 0"
            )));
        }
        Ok(Self { n_min, n_max })
    }

    /// `sites` sites centred on 0 (one extra on the positive side if even).
    pub fn centered(sites: usize) -> Result<Self> {
        if sites == 0 {
            return Err(domain("site window must be non-empty"));
        }
        let below = ((sites - 1) / 2) as i64;
        Self::new(-below, sites as i64 - 1 - below)
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for SiteWindow {
    fn default() -> Self {
        Self::centered(DEFAULT_WINDOW_SITES).expect("non-empty default window")
    }
}

/// Draws one phase configuration from stream 0 of `seed`.
pub fn sample_phases(
    model: &DisorderModel,
    window: SiteWindow,
    seed: u64,
) -> Result<PhaseConfiguration> {
    sample_phases_with(model, window, &mut rng::stream(seed, 0))
}

pub fn sample_phases_with<R: Rng + ?Sized>(
    model: &DisorderModel,
    window: SiteWindow,
    rng: &mut R,
) -> Result<PhaseConfiguration> {
    model.validate()?;
    let n = window.len();
    let phases = match *model {
        DisorderModel::Coherent => vec![0.0; n],
        DisorderModel::IndependentUniform => (0..n).map(|_| rng.random::<f64>() * TAU).collect(),
        DisorderModel::GaussianRandomWalk { epsilon } => {
            let step = Normal::new(0.0, epsilon).map_err(|e| domain(e.to_string()))?;
            let mut phi = 0.0;
            let mut out = Vec::with_capacity(n);
            out.push(phi);
            for _ in 1..n {
                phi += step.sample(rng);
                out.push(phi);
            }
            out
        }
    };
    PhaseConfiguration::new(window.n_min, phases)
}

/// `C_N = exp(−N/ξ_coh)` for `N = 0 ..= n_max`; long-range order gives `C ≡ 1`.
pub fn correlator_profile_for_quench(
    xi_coh: DecayLength,
    n_max: usize,
) -> Result<CorrelatorProfile> {
    match xi_coh {
        DecayLength::Infinite => Ok(CorrelatorProfile::coherent(n_max)),
        DecayLength::Finite(xi) => CorrelatorProfile::exponential(xi, n_max),
    }
}

/// Sample-mean correlators with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCorrelator {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
}

/// Per-configuration estimate of `C_N`: the average of `cos(φ_n − φ_{n+N})`
/// over all pairs inside the window.
pub fn configuration_correlator(phases: &PhaseConfiguration, n_max: usize) -> Vec<f64> {
    let p = phases.phases();
    (0..=n_max)
        .map(|sep| {
            let pairs = p.len().saturating_sub(sep);
            if pairs == 0 {
                return f64::NAN;
            }
            p.iter()
                .zip(&p[sep..])
                .map(|(a, b)| (a - b).cos())
                .sum::<f64>()
                / pairs as f64
        })
        .collect()
}

/// Estimates `C_0 ..= C_{n_max}` from `samples` independent configurations.
/// Sample `i` is drawn from stream `i` of `seed`.
pub fn empirical_correlator(
    model: &DisorderModel,
    window: SiteWindow,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<EmpiricalCorrelator> {
    model.validate()?;
    if samples < 2 {
        return Err(domain("need at least two samples"));
    }
    if window.len() <= n_max {
        return Err(domain(format!(
            "window of {} sites cannot resolve separations up to {n_max}",
            window.len()
        )));
    }
    let blocks: Vec<(usize, usize)> = rng::blocks(samples).collect();
    let partials: Vec<Result<(Vec<f64>, Vec<f64>)>> = blocks
        .par_iter()
        .map(|&(start, end)| {
            let mut sum = vec![0.0; n_max + 1];
            let mut sum_sq = vec![0.0; n_max + 1];
            for i in start..end {
                let cfg = sample_phases_with(model, window, &mut rng::stream(seed, i as u64))?;
                for (k, c) in configuration_correlator(&cfg, n_max)
                    .into_iter()
                    .enumerate()
                {
                    sum[k] += c;
                    sum_sq[k] += c * c;
                }
            }
            Ok((sum, sum_sq))
        })
        .collect();
    let mut sum = vec![0.0; n_max + 1];
    let mut sum_sq = vec![0.0; n_max + 1];
    for part in partials {
        let (s, q) = part?;
        for k in 0..=n_max {
            sum[k] += s[k];
            sum_sq[k] += q[k];
        }
    }
    let n = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let stderr = mean
        .iter()
        .zip(&sum_sq)
        .map(|(m, q)| (((q - n * m * m) / (n - 1.0)).max(0.0) / n).sqrt())
        .collect();
    Ok(EmpiricalCorrelator {
        mean,
        stderr,
        samples,
    })
}
