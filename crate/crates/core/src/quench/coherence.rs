//! Conversion between decay times and decay lengths, and removal of the
//! reference decay channel.

use crate::decay::DecayLength;
use crate::error::{domain, ensure_positive, Result};

/// `ξ₀ = 2 t_T / T_T`; an infinite decay time gives long-range order.
pub fn xi_from_decay(decay_time: f64, talbot_time: f64) -> Result<DecayLength> {
    ensure_positive("Talbot time", talbot_time)?;
    if decay_time == f64::INFINITY {
        return Ok(DecayLength::Infinite);
    }
    ensure_positive("decay time", decay_time)?;
    DecayLength::finite(2.0 * decay_time / talbot_time)
}

/// `t_T = ξ₀ T_T / 2`, infinite for long-range order.
pub fn decay_from_xi(xi: DecayLength, talbot_time: f64) -> Result<f64> {
    ensure_positive("Talbot time", talbot_time)?;
    Ok(match xi {
        DecayLength::Infinite => f64::INFINITY,
        DecayLength::Finite(x) => {
            ensure_positive("decay length", x)?;
            x * talbot_time / 2.0
        }
    })
}

/// Combined decay length of two independent channels: `1/ξ₀ = 1/ξ_coh + 1/ξ_ref`.
pub fn compose(xi_coh: DecayLength, xi_ref: DecayLength) -> DecayLength {
    match (xi_coh, xi_ref) {
        (DecayLength::Infinite, r) => r,
        (c, DecayLength::Infinite) => c,
        (DecayLength::Finite(c), DecayLength::Finite(r)) => DecayLength::Finite(c * r / (c + r)),
    }
}

/// Removes the reference channel: `ξ_coh = 1/(1/ξ₀ − 1/ξ_ref)`.
/// `ξ₀ = ξ_ref` is long-range order; `ξ₀ > ξ_ref` is rejected.
pub fn coherence_correction(xi0: DecayLength, xi_ref: DecayLength) -> Result<DecayLength> {
    match (xi0, xi_ref) {
        (x, DecayLength::Infinite) => Ok(x),
        (DecayLength::Infinite, DecayLength::Finite(r)) => Err(domain(format!(
            "signal decay length inf exceeds the reference {r}"
        ))),
        (DecayLength::Finite(x0), DecayLength::Finite(r)) => {
            ensure_positive("signal decay length", x0)?;
            ensure_positive("reference decay length", r)?;
            if x0 > r {
                Err(domain(format!(
                    "signal decay length {x0} exceeds the reference {r}"
                )))
            } else if x0 == r {
                Ok(DecayLength::Infinite)
            } else {
                Ok(DecayLength::Finite(x0 * r / (r - x0)))
            }
        }
    }
}
