//! Scalar Talbot traces and their forward model.

use std::f64::consts::{PI, TAU};

use rand_distr::{Distribution, Normal};

use crate::analytic::CorrelatorProfile;
use crate::decay::DecayLength;
use crate::error::{domain, ensure_positive, Result};
use crate::lattice::LatticeParams;
use crate::rng;

/// Largest deviation from `C_N = C_1^N` accepted as an exponential profile.
const EXPONENTIAL_TOLERANCE: f64 = 1e-9;

/// A measured or synthesized trace: observable versus blanking duration.
#[derive(Debug, Clone, PartialEq)]
pub struct TalbotSignal {
    times: Vec<f64>,
    values: Vec<f64>,
    sigmas: Option<Vec<f64>>,
}

impl TalbotSignal {
    pub fn new(times: Vec<f64>, values: Vec<f64>, sigmas: Option<Vec<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(domain(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(&t0) = times.first() {
            if !(t0.is_finite() && t0 >= 0.0) {
                return Err(domain(format!("times must be finite and >= 0, got {t0}")));
            }
        }
        if let Some(w) = times
            .windows(2)
            .find(|w| !(w[1] > w[0] && w[1].is_finite()))
        {
            return Err(domain(format!(
                "times must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain(format!("signal values must be finite, got {v}")));
        }
        if let Some(s) = &sigmas {
            if s.len() != times.len() {
                return Err(domain(format!(
                    "{} sigmas for {} points",
                    s.len(),
                    times.len()
                )));
            }
            if let Some(bad) = s.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
                return Err(domain(format!("sigmas must be finite and > 0, got {bad}")));
            }
        }
        Ok(Self {
            times,
            values,
            sigmas,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigmas(&self) -> Option<&[f64]> {
        self.sigmas.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Applies `v ↦ scale·v + offset` to every value (and `|scale|` to the sigmas).
    pub fn affine(&self, scale: f64, offset: f64) -> Result<Self> {
        if !(scale.is_finite() && scale != 0.0 && offset.is_finite()) {
            return Err(domain("affine map needs a finite non-zero scale"));
        }
        Self::new(
            self.times.clone(),
            self.values.iter().map(|v| scale * v + offset).collect(),
            self.sigmas
                .as_ref()
                .map(|s| s.iter().map(|s| s * scale.abs()).collect()),
        )
    }
}

/// Shape of the damped sine `baseline + A·e^{−t/t_T}·sin(2πt/T_T + φ₀)`,
/// apart from the decay time which follows from the coherence lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalShape {
    pub talbot_time: f64,
    pub amplitude: f64,
    pub baseline: f64,
    pub phase: f64,
}

impl SignalShape {
    /// The signal as an affine map `offset + gain·(1 − n̄₀)` of the excitation,
    /// with `n̄₀` in its two-term revival form.
    pub fn from_lattice(params: &LatticeParams, gain: f64, offset: f64) -> Result<Self> {
        params.validate()?;
        if !(gain.is_finite() && offset.is_finite()) {
            return Err(domain("signal gain and offset must be finite"));
        }
        let p = params.plateau();
        let a = params.exponent_factor();
        Ok(Self {
            talbot_time: params.talbot_time(),
            amplitude: gain * 2.0 * p * (-a).exp(),
            baseline: offset + gain * (1.0 - p),
            phase: -PI / 2.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("Talbot time", self.talbot_time)?;
        if !(self.amplitude.is_finite() && self.baseline.is_finite() && self.phase.is_finite()) {
            return Err(domain(
                "signal amplitude, baseline and phase must be finite",
            ));
        }
        Ok(())
    }

    /// Noiseless model value at `t` for decay time `decay_time` (`∞` for no
    /// damping, `0` for a flat trace).
    pub fn evaluate(&self, t: f64, decay_time: f64) -> f64 {
        let envelope = if decay_time.is_infinite() {
            1.0
        } else if decay_time > 0.0 {
            (-t / decay_time).exp()
        } else {
            0.0
        };
        self.baseline + self.amplitude * envelope * (TAU * t / self.talbot_time + self.phase).sin()
    }
}

/// Reads the decay length off a profile of the form `C_N = C_1^N`.
/// `Ok(None)` means `C_N = δ_{N0}`, i.e. a vanishing coherence length.
pub fn exponential_coherence(profile: &CorrelatorProfile) -> Result<Option<DecayLength>> {
    let c = profile.values();
    if c.len() < 2 {
        return Err(domain(
            "correlator profile needs C_1 to identify an exponential decay",
        ));
    }
    let c1 = c[1];
    if !(0.0..=1.0).contains(&c1) {
        return Err(domain(format!(
            "C_1 = {c1} is outside [0, 1]; not an exponential profile"
        )));
    }
    for (n, &cn) in c.iter().enumerate().skip(2) {
        let expected = c1.powi(n as i32);
        if (cn - expected).abs() > EXPONENTIAL_TOLERANCE {
            return Err(domain(format!(
                "correlator is not exponential: C_{n} = {cn}, C_1^{n} = {expected}"
            )));
        }
    }
    Ok(if c1 == 0.0 {
        None
    } else if c1 >= 1.0 {
        Some(DecayLength::Infinite)
    } else {
        Some(DecayLength::Finite(-1.0 / c1.ln()))
    })
}

/// Decay time of the trace for a coherence profile and a reference decay.
pub fn signal_decay_time(
    talbot_time: f64,
    profile: &CorrelatorProfile,
    xi_ref: DecayLength,
) -> Result<f64> {
    ensure_positive("Talbot time", talbot_time)?;
    Ok(match exponential_coherence(profile)? {
        None => 0.0,
        Some(xi_coh) => {
            super::coherence::decay_from_xi(super::coherence::compose(xi_coh, xi_ref), talbot_time)?
        }
    })
}

/// Synthesizes a trace at `times`. Gaussian noise of standard deviation
/// `noise_sigma` is drawn from stream 0 of `seed`; a noisy trace carries
/// `noise_sigma` as its per-point uncertainty.
pub fn synthesize_signal(
    shape: &SignalShape,
    profile: &CorrelatorProfile,
    xi_ref: DecayLength,
    times: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<TalbotSignal> {
    shape.validate()?;
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(domain(format!(
            "noise sigma must be finite and >= 0, got {noise_sigma}"
        )));
    }
    let decay = signal_decay_time(shape.talbot_time, profile, xi_ref)?;
    let mut values: Vec<f64> = times.iter().map(|&t| shape.evaluate(t, decay)).collect();
    let sigmas = if noise_sigma > 0.0 {
        let noise = Normal::new(0.0, noise_sigma).map_err(|e| domain(e.to_string()))?;
        let mut rng = rng::stream(seed, 0);
        for v in &mut values {
            *v += noise.sample(&mut rng);
        }
        Some(vec![noise_sigma; times.len()])
    } else {
        None
    };
    TalbotSignal::new(times.to_vec(), values, sigmas)
}

/// `n` equally spaced points covering `[start, end]`.
pub fn uniform_times(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && start >= 0.0 && end > start) {
        return Err(domain(format!(
            "time range must satisfy 0 <= start < end, got {start}..{end}"
        )));
    }
    if n < 2 {
        return Err(domain("a time grid needs at least two points"));
    }
    let step = (end - start) / (n - 1) as f64;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// Counts revivals `t = m·T_T` (m ≥ 1) inside the trace whose contrast
/// against the preceding anti-revival exceeds both `min_fraction` of the
/// first revival's contrast and three combined noise standard deviations.
/// Contrast is read from the samples nearest to the revival and
/// anti-revival times.
pub fn count_resolvable_revivals(
    signal: &TalbotSignal,
    talbot_time: f64,
    noise_sigma: f64,
    min_fraction: f64,
) -> Result<usize> {
    ensure_positive("Talbot time", talbot_time)?;
    let t = signal.times();
    let v = signal.values();
    let (Some(&first), Some(&last)) = (t.first(), t.last()) else {
        return Ok(0);
    };
    let nearest = |x: f64| -> usize {
        let i = t.partition_point(|&s| s < x);
        if i == 0 {
            0
        } else if i == t.len() || (x - t[i - 1]) <= (t[i] - x) {
            i - 1
        } else {
            i
        }
    };
    let floor = 3.0 * std::f64::consts::SQRT_2 * noise_sigma;
    let mut reference = None;
    let mut count = 0;
    let mut m = 1u32;
    while m as f64 * talbot_time <= last {
        let anti = (m as f64 - 0.5) * talbot_time;
        if anti >= first {
            let contrast = (v[nearest(anti)] - v[nearest(m as f64 * talbot_time)]).abs();
            let r = *reference.get_or_insert(contrast);
            if contrast > floor && contrast >= min_fraction * r && contrast > 0.0 {
                count += 1;
            }
        }
        m += 1;
    }
    Ok(count)
}
