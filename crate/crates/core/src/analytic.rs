//! Closed-form wavefunctions, density overlaps and phase-averaged revival
//! amplitudes for a lattice of Gaussian on-site states released at `t = 0`.
//!
//! Lengths inside the overlap formulas are reduced by the lattice spacing,
//! so everything depends on `r = σ/d` and the blanking time in Talbot units
//! `τ = t / T_T` only.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, ensure_positive, Error, Result};
use crate::lattice::{constants::HBAR, LatticeParams};
use crate::series::{sum_outward, sum_outward_real, SeriesValue, RELATIVE_CUTOFF};

/// One realization of site phases `φ_n` on the window `n_min ..= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfiguration {
    n_min: i64,
    phases: Vec<f64>,
}

impl PhaseConfiguration {
    pub fn new(n_min: i64, phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(domain("phase window must be non-empty"));
        }
        let n_max = n_min + phases.len() as i64 - 1;
        if n_min > 0 || n_max < 0 {
            return Err(domain(format!(
                "phase window {n_min}..={n_max} must contain site 0"
            )));
        }
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(domain(format!("phases must be finite, got {bad}")));
        }
        Ok(Self { n_min, phases })
    }

    pub fn from_fn(n_min: i64, n_max: i64, phase: impl Fn(i64) -> f64) -> Result<Self> {
        if n_max < n_min {
            return Err(domain("phase window must be non-empty"));
        }
        Self::new(n_min, (n_min..=n_max).map(phase).collect())
    }

    /// All sites in phase (φ_n = 0).
    pub fn uniform(n_min: i64, n_max: i64) -> Result<Self> {
        Self::from_fn(n_min, n_max, |_| 0.0)
    }

    /// φ_n = π n.
    pub fn alternating(n_min: i64, n_max: i64) -> Result<Self> {
        Self::from_fn(n_min, n_max, |n| PI * n as f64)
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.phases.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phase(&self, n: i64) -> Option<f64> {
        let idx = n - self.n_min;
        if idx < 0 {
            return None;
        }
        self.phases.get(idx as usize).copied()
    }

    /// `(n, φ_n)` pairs in increasing site order.
    pub fn sites(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.phases
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.n_min + i as i64, p))
    }
}

/// Phase correlators `C_N = ⟨exp[i(φ_n − φ_{n+N})]⟩` for `N = 0 ..= N_max`.
/// Real by contract; `C_{-N} = C_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorProfile {
    values: Vec<f64>,
}

/// Slack allowed on `C_0 = 1` and `|C_N| ≤ 1` for values computed in floating point.
const PROFILE_SLACK: f64 = 1e-12;

impl CorrelatorProfile {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        let Some(&c0) = values.first() else {
            return Err(domain("correlator profile must contain C_0"));
        };
        if (c0 - 1.0).abs() > PROFILE_SLACK {
            return Err(domain(format!("C_0 must equal 1, got {c0}")));
        }
        values[0] = 1.0;
        for (n, c) in values.iter_mut().enumerate() {
            if !c.is_finite() || c.abs() > 1.0 + PROFILE_SLACK {
                return Err(domain(format!("|C_{n}| must be ≤ 1, got {c}")));
            }
            *c = c.clamp(-1.0, 1.0);
        }
        Ok(Self { values })
    }

    /// Accepts complex correlators only when they are real to within `1e-12`.
    pub fn from_complex(values: &[Complex64]) -> Result<Self> {
        if let Some((n, c)) = values
            .iter()
            .enumerate()
            .find(|(_, c)| c.im.abs() > PROFILE_SLACK)
        {
            return Err(domain(format!(
                "complex correlators are not supported (C_{n} = {c})"
            )));
        }
        Self::new(values.iter().map(|c| c.re).collect())
    }

    pub fn from_fn(n_max: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..=n_max).map(f).collect())
    }

    /// `C_N = 1` for every `N`.
    pub fn coherent(n_max: usize) -> Self {
        Self {
            values: vec![1.0; n_max + 1],
        }
    }

    /// `C_N = δ_{N,0}`.
    pub fn incoherent(n_max: usize) -> Self {
        let mut values = vec![0.0; n_max + 1];
        values[0] = 1.0;
        Self { values }
    }

    /// `C_N = exp(−N/ξ)`.
    pub fn exponential(xi: f64, n_max: usize) -> Result<Self> {
        ensure_positive("coherence length", xi)?;
        Self::from_fn(n_max, |n| (-(n as f64) / xi).exp())
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `C_{|n|}`, if covered by the profile.
    pub fn get(&self, n: i64) -> Option<f64> {
        self.values.get(n.unsigned_abs() as usize).copied()
    }

    fn require(&self, n: i64) -> Result<f64> {
        self.get(n).ok_or(Error::ProfileTooShort {
            needed: n.unsigned_abs() as usize,
            available: self.n_max(),
        })
    }

    fn require_extent(&self, needed: i64) -> Result<()> {
        self.require(needed).map(|_| ())
    }
}

/// Density overlap `n₀(τ)` with the central site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapValue {
    pub tau: f64,
    pub value: f64,
}

/// An averaged overlap obtained from truncated infinite sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedOverlap {
    pub overlap: OverlapValue,
    /// Upper bound on the magnitude of the neglected terms.
    pub truncation_bound: f64,
    /// A series hit the index cap; the bound is then only an estimate.
    pub cap_reached: bool,
}

impl BoundedOverlap {
    pub fn value(&self) -> f64 {
        self.overlap.value
    }
}

fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}

/// Gaussian on-site state `ψ(x) = π^{-1/4} σ^{-1/2} exp(−x²/2σ²)`.
pub fn site_wavefunction(x: f64, sigma: f64) -> Result<f64> {
    ensure_positive("sigma", sigma)?;
    Ok(site_amplitude(x, sigma))
}

#[inline]
pub(crate) fn site_amplitude(x: f64, sigma: f64) -> f64 {
    (-x * x / (2.0 * sigma * sigma)).exp() / (PI.powf(0.25) * sigma.sqrt())
}

/// Momentum-space wavefunction `Φ(k, t)` after free evolution for time `t`
/// (SI wavenumber and time), summed over the configured window.
pub fn momentum_wavefunction(
    k: f64,
    t: f64,
    params: &LatticeParams,
    phases: &PhaseConfiguration,
) -> Complex64 {
    let sigma = params.sigma;
    let d = params.spacing;
    let envelope = Complex64::new(
        -k * k * sigma * sigma / 2.0,
        -HBAR * k * k * t / (2.0 * params.mass),
    )
    .exp();
    let comb: Complex64 = phases
        .sites()
        .map(|(n, phi)| Complex64::from_polar(1.0, n as f64 * d * k + phi))
        .sum();
    PI.powf(0.25) * (2.0 * sigma).sqrt() * envelope * comb
}

/// Position-space wavefunction `Ψ(x, τ)`: every site packet spreads with
/// the complex width `σ² + i d² τ / π`.
pub fn position_wavefunction(
    x: f64,
    tau: f64,
    params: &LatticeParams,
    phases: &PhaseConfiguration,
) -> Complex64 {
    let sigma = params.sigma;
    let d = params.spacing;
    let width = Complex64::new(sigma * sigma, d * d * tau / PI);
    let prefactor = sigma.sqrt() / (PI.powf(0.25) * width.sqrt());
    let sum: Complex64 = phases
        .sites()
        .map(|(n, phi)| {
            let dx = x - n as f64 * d;
            (-(dx * dx) / (2.0 * width) + Complex64::i() * phi).exp()
        })
        .sum();
    prefactor * sum
}

/// `2σ²/d² + iτ/π`, the reduced complex width entering the overlap.
#[inline]
fn overlap_width(r: f64, tau: f64) -> Complex64 {
    Complex64::new(2.0 * r * r, tau / PI)
}

/// Overlap of `Ψ(x, τ)` with the central on-site state for one phase
/// realization, `n₀(τ) = |⟨ψ|Ψ(τ)⟩|²`.
pub fn density_overlap(
    tau: f64,
    params: &LatticeParams,
    phases: &PhaseConfiguration,
) -> OverlapValue {
    OverlapValue {
        tau,
        value: overlap_amplitude(tau, params, phases).norm_sqr(),
    }
}

/// The complex amplitude `⟨ψ|Ψ(τ)⟩`; the principal square-root branch keeps
/// the prefactor continuous from `τ = 0`.
pub fn overlap_amplitude(
    tau: f64,
    params: &LatticeParams,
    phases: &PhaseConfiguration,
) -> Complex64 {
    let r = params.width_ratio();
    let q = overlap_width(r, tau);
    let prefactor = (Complex64::new(2.0 * r * r, 0.0) / q).sqrt();
    let sum: Complex64 = phases
        .sites()
        .map(|(n, phi)| {
            let nn = (n * n) as f64;
            (-nn / (2.0 * q) + Complex64::i() * phi).exp()
        })
        .sum();
    prefactor * sum
}

/// Reduced `4σ⁴/d⁴ + τ²/π²`.
#[inline]
fn reduced_denominator(r: f64, tau: f64) -> f64 {
    4.0 * r.powi(4) + tau * tau / (PI * PI)
}

/// Phase-averaged overlap from the full double sum over site pairs,
/// `Σ_{n,n'} C_{n−n'} · (pair weight)`, with a symmetric window chosen
/// from the Gaussian decay of the single-site factors.
pub fn averaged_overlap_exact(
    tau: f64,
    params: &LatticeParams,
    correlators: &CorrelatorProfile,
) -> Result<BoundedOverlap> {
    ensure_finite("tau", tau)?;
    let r = params.width_ratio();
    let den = reduced_denominator(r, tau);
    let decay = r * r / den;
    let twist = tau / (2.0 * PI * den);
    let norm = 2.0 * r * r / den.sqrt();

    let window = sum_outward_real(0, |n| (-decay * (n * n) as f64).exp());
    let w = window.extent;
    correlators.require_extent(2 * w)?;

    let amps: Vec<Complex64> = (-w..=w)
        .map(|n| {
            let nn = (n * n) as f64;
            Complex64::new(-decay * nn, twist * nn).exp()
        })
        .collect();
    let mut total = 0.0;
    for (i, ai) in amps.iter().enumerate() {
        for (j, aj) in amps.iter().enumerate() {
            let c = correlators.values[(i as i64 - j as i64).unsigned_abs() as usize];
            if c != 0.0 {
                total += c * (ai * aj.conj()).re;
            }
        }
    }
    let inside = window.value;
    let tail = window.tail_bound;
    Ok(BoundedOverlap {
        overlap: OverlapValue {
            tau,
            value: norm * total,
        },
        truncation_bound: norm * (2.0 * inside * tail + tail * tail),
        cap_reached: window.cap_reached,
    })
}

/// Weight `F_{2L}(τ)` of the even-distance correlator `C_{2L}`.
pub fn weight_even(l: i64, tau: f64, params: &LatticeParams) -> SeriesValue<Complex64> {
    direct_weight(l as f64, tau, params, 0.0)
}

/// Weight `F_{2L+1}(τ)` of the odd-distance correlator `C_{2L+1}`.
pub fn weight_odd(l: i64, tau: f64, params: &LatticeParams) -> SeriesValue<Complex64> {
    direct_weight(l as f64 + 0.5, tau, params, 0.5)
}

/// `norm · e^{−2r²ℓ²/D} Σ_K exp(−2r²(K+h)²/D + 2iτℓ(K+h)/(πD))`
/// with `ℓ = L` or `L + ½` and `h = 0` or `½`.
fn direct_weight(ell: f64, tau: f64, params: &LatticeParams, half: f64) -> SeriesValue<Complex64> {
    let r = params.width_ratio();
    let den = reduced_denominator(r, tau);
    let a = 2.0 * r * r / den;
    let b = 2.0 * tau * ell / (PI * den);
    let outer = 2.0 * r * r / den.sqrt() * (-a * ell * ell).exp();
    sum_outward(0, |k| {
        let kk = k as f64 + half;
        Complex64::new(-a * kk * kk, b * kk).exp()
    })
    .map(|s| s * outer)
    .scale_tail(outer)
}

trait ScaleTail {
    fn scale_tail(self, factor: f64) -> Self;
}

impl<T> ScaleTail for SeriesValue<T> {
    fn scale_tail(mut self, factor: f64) -> Self {
        self.tail_bound *= factor.abs();
        self
    }
}

/// `F_{2L}(τ)` from the Poisson-dual series. Undefined at `τ = 0`.
pub fn weight_even_dual(
    l: i64,
    tau: f64,
    params: &LatticeParams,
) -> Result<SeriesValue<Complex64>> {
    dual_weight(l as f64, tau, params, false)
}

/// `F_{2L+1}(τ)` from the Poisson-dual series; its terms alternate in sign.
/// Undefined at `τ = 0`.
pub fn weight_odd_dual(l: i64, tau: f64, params: &LatticeParams) -> Result<SeriesValue<Complex64>> {
    dual_weight(l as f64 + 0.5, tau, params, true)
}

fn dual_weight(
    ell: f64,
    tau: f64,
    params: &LatticeParams,
    alternating: bool,
) -> Result<SeriesValue<Complex64>> {
    ensure_finite("tau", tau)?;
    if tau == 0.0 {
        return Err(domain("dual weights are undefined at tau = 0"));
    }
    let r = params.width_ratio();
    let stretch = 1.0 + 4.0 * PI * PI * r.powi(4) / (tau * tau);
    let shift = stretch * tau;
    let width = 2.0 * r * r * stretch;
    let outer = params.plateau()
        * (-(2.0 * ell).powi(2) * PI * PI * r * r / (2.0 * tau * tau * stretch)).exp();
    let center = (ell / shift).round() as i64;
    let series = sum_outward_real(center, |n| {
        let offset = ell - shift * n as f64;
        let sign = if alternating && n.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        };
        sign * (-offset * offset / width).exp()
    });
    Ok(series
        .map(|s| Complex64::new(s * outer, 0.0))
        .scale_tail(outer))
}

/// Phase-averaged overlap re-assembled from the even and odd weights,
/// `Σ_L [C_{2L} F_{2L}(τ) + C_{2L+1} F_{2L+1}(τ)]`.
pub fn averaged_overlap_decomposed(
    tau: f64,
    params: &LatticeParams,
    correlators: &CorrelatorProfile,
) -> Result<BoundedOverlap> {
    ensure_finite("tau", tau)?;
    let scale = weight_even(0, tau, params).value.norm();
    let mut tail = 0.0;
    let mut cap = false;
    let mut missing: Option<usize> = None;
    let outer = sum_outward_real(0, |l| {
        let even = weight_even(l, tau, params);
        let odd = weight_odd(l, tau, params);
        tail += even.tail_bound + odd.tail_bound;
        cap |= even.cap_reached || odd.cap_reached;
        let mut term = 0.0;
        for (sep, w) in [(2 * l, even.value.re), (2 * l + 1, odd.value.re)] {
            match correlators.get(sep) {
                Some(c) => term += c * w,
                // a missing correlator only matters if its weight does
                None if w.abs() > RELATIVE_CUTOFF * scale => {
                    let sep = sep.unsigned_abs() as usize;
                    missing = Some(missing.map_or(sep, |m| m.max(sep)));
                }
                None => {}
            }
        }
        term
    });
    if let Some(needed) = missing {
        return Err(Error::ProfileTooShort {
            needed,
            available: correlators.n_max(),
        });
    }
    Ok(BoundedOverlap {
        overlap: OverlapValue {
            tau,
            value: outer.value,
        },
        truncation_bound: tail + outer.tail_bound,
        cap_reached: cap || outer.cap_reached,
    })
}

/// Averaged overlap at an integer Talbot time `τ = N` in the `d ≫ σ` limit:
/// `√(2π)σ/d · Σ_n C_{2Nn} exp(−2π²σ²n²/d²)`.
pub fn averaged_overlap_revival(
    order: u32,
    params: &LatticeParams,
    correlators: &CorrelatorProfile,
) -> Result<BoundedOverlap> {
    revival_sum(2 * order as i64, false, order as f64, params, correlators)
}

/// Averaged overlap at a half-integer Talbot time `τ = N + ½` in the
/// `d ≫ σ` limit: the alternating sum over `C_{(2N+1)n}`.
pub fn averaged_overlap_antirevival(
    order: u32,
    params: &LatticeParams,
    correlators: &CorrelatorProfile,
) -> Result<BoundedOverlap> {
    revival_sum(
        2 * order as i64 + 1,
        true,
        order as f64 + 0.5,
        params,
        correlators,
    )
}

fn revival_sum(
    stride: i64,
    alternating: bool,
    tau: f64,
    params: &LatticeParams,
    correlators: &CorrelatorProfile,
) -> Result<BoundedOverlap> {
    let a = params.exponent_factor();
    let envelope = sum_outward_real(0, |n| (-a * (n * n) as f64).exp());
    correlators.require_extent(stride * envelope.extent)?;
    let sum = sum_outward_real(0, |n| {
        let c = correlators.values[(stride * n).unsigned_abs() as usize];
        let sign = if alternating && n.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        };
        sign * c * (-a * (n * n) as f64).exp()
    });
    let plateau = params.plateau();
    Ok(BoundedOverlap {
        overlap: OverlapValue {
            tau,
            value: plateau * sum.value,
        },
        truncation_bound: plateau * envelope.tail_bound,
        cap_reached: envelope.cap_reached,
    })
}

/// Integer or half-integer blanking time in Talbot units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevivalIndex {
    /// `τ = N`.
    Revival(u32),
    /// `τ = N + ½`.
    AntiRevival(u32),
}

impl RevivalIndex {
    pub fn tau(self) -> f64 {
        match self {
            RevivalIndex::Revival(n) => n as f64,
            RevivalIndex::AntiRevival(n) => n as f64 + 0.5,
        }
    }

    /// Site separation probed at this time, `K = 2τ`.
    pub fn separation(self) -> usize {
        match self {
            RevivalIndex::Revival(n) => 2 * n as usize,
            RevivalIndex::AntiRevival(n) => 2 * n as usize + 1,
        }
    }
}

/// Two-term truncation `√(2π)σ/d · [1 ± 2 C_K exp(−2π²σ²/d²)]`.
pub fn leading_order_overlap(
    index: RevivalIndex,
    params: &LatticeParams,
    correlators: &CorrelatorProfile,
) -> Result<OverlapValue> {
    let k = index.separation();
    let c = correlators.require(k as i64)?;
    let sign = match index {
        RevivalIndex::Revival(_) => 1.0,
        RevivalIndex::AntiRevival(_) => -1.0,
    };
    let value = params.plateau() * (1.0 + sign * 2.0 * c * (-params.exponent_factor()).exp());
    if value < 0.0 {
        return Err(domain(format!(
            "two-term truncation is negative ({value:.3e}); sigma/d = {:.3} is too small for it",
            params.width_ratio()
        )));
    }
    Ok(OverlapValue {
        tau: index.tau(),
        value,
    })
}

/// Bound on `|full sum − two-term truncation|` for any profile with
/// `|C_N| ≤ 1`: `√(2π)σ/d · 2 Σ_{n≥2} exp(−2π²σ²n²/d²)`.
pub fn leading_order_bound(params: &LatticeParams) -> f64 {
    let a = params.exponent_factor();
    let tail: f64 = (2..=crate::series::MAX_EXTENT)
        .map(|n| (-a * (n * n) as f64).exp())
        .take_while(|t| *t > 0.0)
        .sum();
    params.plateau() * 2.0 * tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::constants::RB87_MASS;

    const D: f64 = 547e-9;

    fn lattice(ratio: f64) -> LatticeParams {
        LatticeParams::with_sigma(D, RB87_MASS, 5.0, ratio * D).unwrap()
    }

    fn s5() -> LatticeParams {
        LatticeParams::rubidium87(D, 5.0).unwrap()
    }

    #[test]
    fn site_wavefunction_shape() {
        let sigma = 0.3;
        let peak = site_wavefunction(0.0, sigma).unwrap();
        assert!((peak - 1.0 / (PI.powf(0.25) * sigma.sqrt())).abs() < 1e-15);
        for x in [0.1, 0.7, 2.3] {
            assert_eq!(
                site_wavefunction(x, sigma).unwrap(),
                site_wavefunction(-x, sigma).unwrap()
            );
        }
        // trapezoid over ±12σ
        let h = sigma / 200.0;
        let norm: f64 = (-2400..=2400)
            .map(|i| site_wavefunction(i as f64 * h, sigma).unwrap().powi(2) * h)
            .sum();
        assert!((norm - 1.0).abs() < 1e-10, "norm = {norm}");
        assert!(site_wavefunction(0.0, 0.0).is_err());
    }

    #[test]
    fn phase_configuration_invariants() {
        assert!(PhaseConfiguration::new(1, vec![0.0; 3]).is_err());
        assert!(PhaseConfiguration::new(-5, vec![0.0; 3]).is_err());
        assert!(PhaseConfiguration::new(0, vec![]).is_err());
        assert!(PhaseConfiguration::new(0, vec![f64::NAN]).is_err());
        let p = PhaseConfiguration::new(-2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.n_max(), 1);
        assert_eq!(p.phase(0), Some(2.0));
        assert_eq!(p.phase(2), None);
    }

    #[test]
    fn correlator_profile_invariants() {
        assert!(CorrelatorProfile::new(vec![0.9, 0.5]).is_err());
        assert!(CorrelatorProfile::new(vec![1.0, 1.2]).is_err());
        assert!(CorrelatorProfile::new(vec![]).is_err());
        assert!(CorrelatorProfile::from_complex(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.1)
        ])
        .is_err());
        let p =
            CorrelatorProfile::from_complex(&[Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)])
                .unwrap();
        assert_eq!(p.get(-1), Some(-0.5));
        assert!(CorrelatorProfile::exponential(0.0, 4).is_err());
    }

    #[test]
    fn single_site_momentum_modulus_is_time_independent() {
        let params = s5();
        let single = PhaseConfiguration::uniform(0, 0).unwrap();
        let tt = params.talbot_time();
        for i in -20..=20 {
            let k = i as f64 * 0.37 / params.sigma;
            let a = momentum_wavefunction(k, 0.0, &params, &single).norm();
            for t in [0.1 * tt, 0.77 * tt, 3.1 * tt] {
                let b = momentum_wavefunction(k, t, &params, &single).norm();
                assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
            }
        }
    }

    #[test]
    fn bragg_condition_adds_in_phase() {
        let params = s5();
        let phases = PhaseConfiguration::uniform(-10, 10).unwrap();
        let k = 2.0 * PI / D;
        let phi = momentum_wavefunction(k, 0.0, &params, &phases);
        let envelope = PI.powf(0.25)
            * (2.0 * params.sigma).sqrt()
            * (-k * k * params.sigma.powi(2) / 2.0).exp();
        assert!((phi.norm() / envelope - 21.0).abs() < 1e-9);
    }

    #[test]
    fn momentum_revival_after_one_talbot_time() {
        let params = s5();
        let phases = PhaseConfiguration::uniform(-50, 50).unwrap();
        let tt = params.talbot_time();
        for i in 0..200 {
            let k = (i as f64 - 100.0) * 0.05 / params.sigma;
            let a = momentum_wavefunction(k, 0.0, &params, &phases);
            let b = momentum_wavefunction(k, tt, &params, &phases);
            assert!((a.norm() - b.norm()).abs() < 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn position_wavefunction_at_zero_is_the_initial_superposition() {
        let params = s5();
        let phases =
            PhaseConfiguration::from_fn(-6, 6, |n| 0.3 * n as f64 + 0.1 * (n * n) as f64).unwrap();
        for i in -300..=300 {
            let x = i as f64 * D / 40.0;
            let direct: Complex64 = phases
                .sites()
                .map(|(n, phi)| {
                    site_amplitude(x - n as f64 * D, params.sigma) * Complex64::from_polar(1.0, phi)
                })
                .sum();
            let psi = position_wavefunction(x, 0.0, &params, &phases);
            assert!(
                (psi - direct).norm() <= 1e-12 * params.sigma.sqrt().recip(),
                "x = {x}"
            );
        }
    }

    #[test]
    fn position_density_revives_after_one_talbot_time() {
        let params = s5();
        let phases = PhaseConfiguration::uniform(-60, 60).unwrap();
        let scale = 1.0 / params.sigma;
        for i in -200..=200 {
            let x = i as f64 * D / 20.0;
            let a = position_wavefunction(x, 0.0, &params, &phases).norm_sqr();
            let b = position_wavefunction(x, 1.0, &params, &phases).norm_sqr();
            assert!((a - b).abs() < 1e-9 * scale, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn half_talbot_density_peaks_between_sites() {
        let params = s5();
        let phases = PhaseConfiguration::uniform(-60, 60).unwrap();
        let mid = position_wavefunction(D / 2.0, 0.5, &params, &phases).norm_sqr();
        let initial = position_wavefunction(D / 2.0, 0.0, &params, &phases).norm_sqr();
        assert!(mid > initial);
        for dx in [-0.1, -0.05, 0.05, 0.1] {
            let neighbour = position_wavefunction(D * (0.5 + dx), 0.5, &params, &phases).norm_sqr();
            assert!(mid > neighbour);
        }
    }

    #[test]
    fn coherent_overlap_at_zero() {
        let params = lattice(0.2);
        let phases = PhaseConfiguration::uniform(-20, 20).unwrap();
        let n0 = density_overlap(0.0, &params, &phases).value;
        // (1 + 2 e^{-25/4} + 2 e^{-25})² computed term by term
        let s: f64 = (-5..=5).map(|n: i32| (-(n * n) as f64 * 6.25).exp()).sum();
        assert!((n0 - s * s).abs() < 1e-14);
        assert!((n0 - 1.008).abs() < 5e-4, "n0 = {n0}");
        let n1 = density_overlap(1.0, &params, &phases).value;
        assert!((n1 - n0).abs() < 1e-10);
    }

    #[test]
    fn alternating_phases_revive_at_half_talbot_time() {
        let params = lattice(0.2);
        let alt = PhaseConfiguration::alternating(-40, 40).unwrap();
        let a0 = density_overlap(0.0, &params, &alt).value;
        let ahalf = density_overlap(0.5, &params, &alt).value;
        assert!((a0 - ahalf).abs() < 1e-10, "{a0} vs {ahalf}");
        // Relative to the uniform τ = 0 overlap the two differ by the ratio
        // of θ₂ to θ₃ at nome exp(−4π²σ²/d²); both → 1 as σ/d → 0.
        let uniform = PhaseConfiguration::uniform(-40, 40).unwrap();
        let u0 = density_overlap(0.0, &params, &uniform).value;
        let q = 4.0 * PI * PI * 0.04;
        let theta2: f64 = (-10..10)
            .map(|m| (-q * (m as f64 + 0.5).powi(2)).exp())
            .sum();
        let theta3: f64 = (-10..=10).map(|m| (-q * (m * m) as f64).exp()).sum();
        assert!((ahalf / u0 - (theta2 / theta3).powi(2)).abs() < 1e-10);
        let narrow = lattice(0.08);
        let alt_n = density_overlap(0.5, &narrow, &alt).value;
        let uni_n = density_overlap(0.0, &narrow, &uniform).value;
        assert!((alt_n - uni_n).abs() < 1e-10);
    }

    #[test]
    fn overlap_prefactor_is_continuous_in_tau() {
        let params = s5();
        let phases = PhaseConfiguration::uniform(0, 0).unwrap();
        let mut prev = overlap_amplitude(0.0, &params, &phases);
        assert!((prev - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for i in 1..=3000 {
            let tau = i as f64 * 1e-3;
            let cur = overlap_amplitude(tau, &params, &phases);
            assert!((cur - prev).norm() < 5e-3, "jump at tau = {tau}");
            prev = cur;
        }
    }

    #[test]
    fn exact_average_coherent_limit_matches_uniform_overlap() {
        let params = s5();
        let phases = PhaseConfiguration::uniform(-200, 200).unwrap();
        let profile = CorrelatorProfile::coherent(800);
        for i in 0..=30 {
            let tau = i as f64 * 0.1;
            let avg = averaged_overlap_exact(tau, &params, &profile).unwrap();
            let direct = density_overlap(tau, &params, &phases).value;
            assert!((avg.value() - direct).abs() < 1e-10, "tau = {tau}");
            assert!(avg.truncation_bound < 1e-12);
        }
    }

    #[test]
    fn exact_average_at_zero_is_about_one() {
        for (params, tol) in [(lattice(0.1), 1e-9), (s5(), 0.02)] {
            for profile in [
                CorrelatorProfile::coherent(20),
                CorrelatorProfile::incoherent(20),
                CorrelatorProfile::exponential(3.0, 20).unwrap(),
            ] {
                let v = averaged_overlap_exact(0.0, &params, &profile)
                    .unwrap()
                    .value();
                assert!((v - 1.0).abs() < tol, "{v}");
            }
        }
    }

    #[test]
    fn exact_average_incoherent_half_talbot() {
        let params = lattice(0.2);
        let profile = CorrelatorProfile::incoherent(200);
        let v = averaged_overlap_exact(0.5, &params, &profile)
            .unwrap()
            .value();
        // diagonal terms only, summed directly
        let den = 4.0 * 0.2f64.powi(4) + 0.25 / (PI * PI);
        let diag: f64 = (-60..=60)
            .map(|n: i64| (-2.0 * 0.04 * (n * n) as f64 / den).exp())
            .sum();
        let oracle = 2.0 * 0.04 / den.sqrt() * diag;
        assert!((v - oracle).abs() < 1e-13);
        let plateau = (2.0 * PI).sqrt() * 0.2;
        assert!((v / plateau - 1.0).abs() < 0.05, "{v} vs {plateau}");
    }

    #[test]
    fn short_profile_is_rejected() {
        let params = s5();
        let err =
            averaged_overlap_exact(2.0, &params, &CorrelatorProfile::coherent(3)).unwrap_err();
        assert!(matches!(err, Error::ProfileTooShort { .. }));
        let err =
            averaged_overlap_revival(5, &params, &CorrelatorProfile::coherent(9)).unwrap_err();
        assert!(matches!(err, Error::ProfileTooShort { .. }));
    }

    #[test]
    fn even_weight_concentrated_at_zero_distance() {
        let params = lattice(0.2);
        let f0 = weight_even(0, 0.0, &params).value;
        assert!((f0.re - 1.0).abs() < 1e-5);
        assert!(f0.im.abs() < 1e-15);
        let bound = (-1.0 / (2.0 * 0.04f64)).exp();
        for l in 1..6 {
            let fl = weight_even(l, 0.0, &params).value.norm();
            assert!(fl <= bound * f0.re * (1.0 + 1e-12), "L = {l}");
        }
    }

    #[test]
    fn dual_weights_match_direct_weights() {
        let params = s5();
        for &(l, tau) in &[
            (1, 0.37),
            (0, 0.37),
            (-3, 1.2),
            (4, 2.5),
            (7, 0.05),
            (2, 5.0),
        ] {
            let even = weight_even(l, tau, &params).value;
            let even_dual = weight_even_dual(l, tau, &params).unwrap().value;
            assert!((even - even_dual).norm() < 1e-10, "even ({l}, {tau})");
            let odd = weight_odd(l, tau, &params).value;
            let odd_dual = weight_odd_dual(l, tau, &params).unwrap().value;
            assert!((odd - odd_dual).norm() < 1e-10, "odd ({l}, {tau})");
        }
        assert!(weight_even_dual(0, 0.0, &params).is_err());
    }

    #[test]
    fn dual_weights_at_talbot_multiples() {
        let params = lattice(0.1);
        let plateau = params.plateau();
        let a = params.exponent_factor();
        for n in 1..4u32 {
            let tau = n as f64;
            let f0 = weight_even_dual(0, tau, &params).unwrap().value.re;
            assert!((f0 / plateau - 1.0).abs() < 1e-6);
            // odd weight at τ = N + ½ for separation 2N+1 carries the (−1) sign
            let t_half = n as f64 + 0.5;
            let odd = weight_odd_dual(n as i64, t_half, &params).unwrap().value.re;
            assert!(odd < 0.0);
            assert!((odd / (-plateau * (-a).exp()) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn revival_sums() {
        let params = lattice(0.2);
        let coherent = CorrelatorProfile::coherent(200);
        let v = averaged_overlap_revival(1, &params, &coherent)
            .unwrap()
            .value();
        assert!((v - 1.0).abs() < 0.01);
        let delta = CorrelatorProfile::incoherent(200);
        for n in 1..5 {
            let v = averaged_overlap_revival(n, &params, &delta)
                .unwrap()
                .value();
            assert!((v - params.plateau()).abs() < 1e-15);
            let w = averaged_overlap_antirevival(n, &params, &delta)
                .unwrap()
                .value();
            assert!((w - params.plateau()).abs() < 1e-15);
        }
    }

    #[test]
    fn antirevival_coherent_value() {
        let params = lattice(0.2);
        let v = averaged_overlap_antirevival(0, &params, &CorrelatorProfile::coherent(50))
            .unwrap()
            .value();
        // √(2π)/5 · (1 − 2e^{−a} + 2e^{−4a} − 2e^{−9a} + …), a = 2π²/25
        let a = 2.0 * PI * PI / 25.0;
        let s = 1.0
            + (1..12)
                .map(|n| 2.0 * (-1f64).powi(n) * (-a * (n * n) as f64).exp())
                .sum::<f64>();
        assert!((v - (2.0 * PI).sqrt() / 5.0 * s).abs() < 1e-13);
        assert!((v - 0.0879).abs() < 1e-3, "{v}");
    }

    #[test]
    fn revival_sums_agree_with_exact_average_for_narrow_packets() {
        let params = lattice(0.1);
        for profile in [
            CorrelatorProfile::coherent(800),
            CorrelatorProfile::exponential(3.0, 800).unwrap(),
            CorrelatorProfile::incoherent(800),
        ] {
            for n in 1..4u32 {
                let approx = averaged_overlap_revival(n, &params, &profile)
                    .unwrap()
                    .value();
                let exact = averaged_overlap_exact(n as f64, &params, &profile)
                    .unwrap()
                    .value();
                assert!(
                    (approx - exact).abs() <= 1e-3,
                    "N = {n}: {approx} vs {exact}"
                );
                let approx = averaged_overlap_antirevival(n, &params, &profile)
                    .unwrap()
                    .value();
                let exact = averaged_overlap_exact(n as f64 + 0.5, &params, &profile)
                    .unwrap()
                    .value();
                assert!(
                    (approx - exact).abs() <= 1e-3,
                    "N+1/2 = {n}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn leading_order_truncation() {
        let params = s5();
        let bound = leading_order_bound(&params);
        let a = params.exponent_factor();
        // next neglected term dominates the bound
        assert!(bound >= params.plateau() * 2.0 * (-4.0 * a).exp());
        assert!(bound <= params.plateau() * 2.0 * (-4.0 * a).exp() * 1.02);
        for profile in [
            CorrelatorProfile::coherent(100),
            CorrelatorProfile::exponential(2.0, 100).unwrap(),
            CorrelatorProfile::exponential(10.0, 100).unwrap(),
        ] {
            for n in 0..4u32 {
                let full = averaged_overlap_revival(n, &params, &profile)
                    .unwrap()
                    .value();
                let lead = leading_order_overlap(RevivalIndex::Revival(n), &params, &profile)
                    .unwrap()
                    .value;
                assert!((full - lead).abs() <= bound);
                let full = averaged_overlap_antirevival(n, &params, &profile)
                    .unwrap()
                    .value();
                let lead = leading_order_overlap(RevivalIndex::AntiRevival(n), &params, &profile)
                    .unwrap()
                    .value;
                assert!((full - lead).abs() <= bound);
            }
        }
        let zero = CorrelatorProfile::incoherent(10);
        for idx in [RevivalIndex::Revival(2), RevivalIndex::AntiRevival(2)] {
            let v = leading_order_overlap(idx, &params, &zero).unwrap().value;
            assert!((v - params.plateau()).abs() < 1e-15);
        }
    }

    #[test]
    fn leading_order_contrast_ratio_for_depth_five() {
        let params = s5();
        let a = params.exponent_factor();
        assert!((a - 0.89).abs() < 0.01);
        let coherent = CorrelatorProfile::coherent(100);
        let up = leading_order_overlap(RevivalIndex::Revival(1), &params, &coherent)
            .unwrap()
            .value;
        let down = leading_order_overlap(RevivalIndex::AntiRevival(1), &params, &coherent)
            .unwrap()
            .value;
        let expected = (1.0 + 2.0 * (-a).exp()) / (1.0 - 2.0 * (-a).exp());
        assert!((up / down - expected).abs() < 1e-12);
        let full_up = averaged_overlap_revival(1, &params, &coherent)
            .unwrap()
            .value();
        let full_down = averaged_overlap_antirevival(1, &params, &coherent)
            .unwrap()
            .value();
        let bound = leading_order_bound(&params);
        let lo = (up - bound) / (down + bound);
        let hi = (up + bound) / (down - bound);
        let full_ratio = full_up / full_down;
        assert!(
            full_ratio > lo && full_ratio < hi,
            "{full_ratio} not in [{lo}, {hi}]"
        );
    }

    #[test]
    fn leading_order_rejects_narrow_packets() {
        let narrow = lattice(0.1);
        let r = leading_order_overlap(
            RevivalIndex::AntiRevival(0),
            &narrow,
            &CorrelatorProfile::coherent(4),
        );
        assert!(r.is_err());
    }
}
