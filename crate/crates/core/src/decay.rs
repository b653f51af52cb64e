//! Decay lengths in lattice sites, with an explicit sentinel for
//! long-range order instead of a large float.

use std::fmt;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayLength {
    /// A finite, strictly positive length in lattice sites.
    Finite(f64),
    /// Long-range order: no measurable decay.
    Infinite,
}

impl DecayLength {
    pub fn finite(sites: f64) -> Result<Self> {
        if sites.is_finite() && sites > 0.0 {
            Ok(DecayLength::Finite(sites))
        } else {
            Err(domain(format!(
                "decay length must be finite and > 0, got {sites}"
            )))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, DecayLength::Infinite)
    }

    pub fn sites(self) -> Option<f64> {
        match self {
            DecayLength::Finite(x) => Some(x),
            DecayLength::Infinite => None,
        }
    }

    /// `1/ξ`, zero for long-range order.
    pub fn inverse(self) -> f64 {
        match self {
            DecayLength::Finite(x) => 1.0 / x,
            DecayLength::Infinite => 0.0,
        }
    }

    /// The value as an `f64`, `∞` for long-range order.
    pub fn as_f64(self) -> f64 {
        match self {
            DecayLength::Finite(x) => x,
            DecayLength::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for DecayLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayLength::Finite(x) => write!(f, "{x}"),
            DecayLength::Infinite => f.write_str("inf"),
        }
    }
}
