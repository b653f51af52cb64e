//! Growth laws of the coherence length after a quench.

use std::f64::consts::PI;

use crate::decay::DecayLength;
use crate::error::{domain, ensure_positive, Result};
use crate::lattice::constants::HBAR;

/// `ξ = prefactor · t^alpha` fitted in log-log space.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub prefactor: f64,
    /// Indices of the points that entered the fit.
    pub used: Vec<usize>,
    /// Indices skipped because the length was infinite.
    pub excluded: Vec<usize>,
}

impl PowerLawFit {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.prefactor * t.powf(self.alpha)
    }
}

/// Ordinary least squares of `ln ξ` on `ln t`. Infinite lengths are skipped
/// and listed in [`PowerLawFit::excluded`].
pub fn fit_power_law(times: &[f64], lengths: &[DecayLength]) -> Result<PowerLawFit> {
    if times.len() != lengths.len() {
        return Err(domain(format!(
            "{} times but {} lengths",
            times.len(),
            lengths.len()
        )));
    }
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, (&t, &xi)) in times.iter().zip(lengths).enumerate() {
        ensure_positive("equilibration time", t)?;
        match xi {
            DecayLength::Infinite => excluded.push(i),
            DecayLength::Finite(v) => {
                ensure_positive("coherence length", v)?;
                used.push(i);
                x.push(t.ln());
                y.push(v.ln());
            }
        }
    }
    let n = x.len();
    if n < 3 {
        return Err(domain(format!(
            "power-law fit needs at least 3 finite points, have {n}"
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(domain("power-law fit needs at least two distinct times"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let ssr: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let r = b - intercept - alpha * a;
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        alpha,
        alpha_stderr: (ssr / (nf - 2.0) / sxx).sqrt(),
        prefactor: intercept.exp(),
        used,
        excluded,
    })
}

/// Spreading limits in sites after time `t_q` with tunnelling rate `J/ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportBounds {
    /// `2 (J/ħ) t_Q`.
    pub ballistic: f64,
    /// `√((J/ħ) t_Q)`.
    pub diffusive: f64,
}

pub fn transport_bounds(rate: f64, t_q: f64) -> Result<TransportBounds> {
    ensure_positive("tunnelling rate", rate)?;
    ensure_positive("equilibration time", t_q)?;
    Ok(TransportBounds {
        ballistic: 2.0 * rate * t_q,
        diffusive: (rate * t_q).sqrt(),
    })
}

/// Bound curves at `times`, optionally shifted so both pass through
/// `anchor = (t, ξ)`.
pub fn bound_curves(
    rate: f64,
    times: &[f64],
    anchor: Option<(f64, f64)>,
) -> Result<Vec<TransportBounds>> {
    let (db, dd) = match anchor {
        Some((t0, xi0)) => {
            let b = transport_bounds(rate, t0)?;
            (xi0 - b.ballistic, xi0 - b.diffusive)
        }
        None => (0.0, 0.0),
    };
    times
        .iter()
        .map(|&t| {
            transport_bounds(rate, t).map(|b| TransportBounds {
                ballistic: b.ballistic + db,
                diffusive: b.diffusive + dd,
            })
        })
        .collect()
}

/// Time for interaction-driven dephasing to smear a momentum peak over the
/// Brillouin zone: `(2πħ/d)·(πσ/µ)`.
pub fn interaction_decay_estimate(mu: f64, sigma: f64, spacing: f64) -> Result<f64> {
    ensure_positive("chemical potential", mu)?;
    ensure_positive("sigma", sigma)?;
    ensure_positive("lattice spacing", spacing)?;
    Ok(2.0 * PI * PI * HBAR * sigma / (spacing * mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::constants::PLANCK;

    fn lengths(v: &[f64]) -> Vec<DecayLength> {
        v.iter().map(|&x| DecayLength::Finite(x)).collect()
    }

    #[test]
    fn exact_power_laws() {
        let t: Vec<f64> = (1..=8).map(|i| i as f64 * 1e-2).collect();
        for alpha in [0.5, 1.0, 0.6] {
            let xi: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(alpha)).collect();
            let fit = fit_power_law(&t, &lengths(&xi)).unwrap();
            assert!((fit.alpha - alpha).abs() < 1e-10);
            assert!(fit.alpha_stderr < 1e-9);
            assert!((fit.prefactor - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn infinite_points_excluded() {
        let t = [1.0, 2.0, 3.0, 4.0];
        let mut xi = lengths(&[1.0, 2.0, 3.0, 4.0]);
        xi[3] = DecayLength::Infinite;
        let fit = fit_power_law(&t, &xi).unwrap();
        assert_eq!(fit.excluded, vec![3]);
        assert_eq!(fit.used, vec![0, 1, 2]);
        assert!((fit.alpha - 1.0).abs() < 1e-12);
        xi[2] = DecayLength::Infinite;
        assert!(fit_power_law(&t, &xi).is_err());
        assert!(fit_power_law(&[0.0, 1.0, 2.0], &lengths(&[1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn bounds_examples() {
        let rate = 1.0 / 1.3e-3;
        let b = transport_bounds(rate, 0.1).unwrap();
        assert!((b.ballistic - 153.846).abs() < 1e-2);
        assert!((b.diffusive - 8.77).abs() < 1e-2);
        let unit = transport_bounds(rate, 1.3e-3).unwrap();
        assert!((unit.ballistic - 2.0).abs() < 1e-12);
        assert!((unit.diffusive - 1.0).abs() < 1e-12);
        assert!(transport_bounds(0.0, 1.0).is_err());
        assert!(transport_bounds(1.0, -1.0).is_err());
    }

    #[test]
    fn anchored_curves_pass_through_anchor() {
        let c = bound_curves(10.0, &[0.1, 0.5], Some((0.1, 2.0))).unwrap();
        assert!((c[0].ballistic - 2.0).abs() < 1e-12);
        assert!((c[0].diffusive - 2.0).abs() < 1e-12);
        assert!(c[1].ballistic > c[1].diffusive);
    }

    #[test]
    fn interaction_decay() {
        let d = 547e-9;
        let t = interaction_decay_estimate(PLANCK * 1.4e3, d / 5.0, d).unwrap();
        assert!((t / 450e-6 - 1.0).abs() < 0.05, "{t}");
        let t2 = interaction_decay_estimate(2.0 * PLANCK * 1.4e3, d / 5.0, d).unwrap();
        assert!((t / t2 - 2.0).abs() < 1e-12);
        assert!(interaction_decay_estimate(0.0, 1.0, 1.0).is_err());
    }
}
