//! Physical quantities written either as bare SI numbers or as strings
//! with a unit suffix, e.g. `"547 nm"`, `"130 us"`, `"1.4 kHz"`.

use std::fmt;

use serde::{Deserialize, Serialize};
use talbot_core::lattice::constants::{ATOMIC_MASS_UNIT, PLANCK};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Mass,
    /// Energies; frequencies are accepted and multiplied by `h`.
    Energy,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Mass => "mass",
            Dimension::Energy => "energy",
        })
    }
}

/// A config value that is either a plain number (SI) or `"<number> <unit>"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Number(v)
    }
}

impl From<&str> for Quantity {
    fn from(v: &str) -> Self {
        Quantity::Text(v.to_owned())
    }
}

fn unit_factor(unit: &str, dim: Dimension) -> Option<f64> {
    use Dimension::*;
    let f = match (dim, unit) {
        (Length, "m") => 1.0,
        (Length, "mm") => 1e-3,
        (Length, "um" | "µm" | "μm") => 1e-6,
        (Length, "nm") => 1e-9,
        (Time, "s") => 1.0,
        (Time, "ms") => 1e-3,
        (Time, "us" | "µs" | "μs") => 1e-6,
        (Time, "ns") => 1e-9,
        (Mass, "kg") => 1.0,
        (Mass, "u" | "amu" | "Da") => ATOMIC_MASS_UNIT,
        (Energy, "J") => 1.0,
        (Energy, "Hz") => PLANCK,
        (Energy, "kHz") => PLANCK * 1e3,
        (Energy, "MHz") => PLANCK * 1e6,
        _ => return None,
    };
    Some(f)
}

impl Quantity {
    /// The value in SI units.
    pub fn to_si(&self, dim: Dimension) -> Result<f64, String> {
        let v = match self {
            Quantity::Number(v) => *v,
            Quantity::Text(s) => {
                let s = s.trim();
                let split = s
                    .char_indices()
                    .map(|(i, _)| i)
                    .chain([s.len()])
                    .rev()
                    .find(|&i| s[..i].trim().parse::<f64>().is_ok())
                    .ok_or_else(|| format!("cannot read a number from {s:?}"))?;
                let (num, unit) = s.split_at(split);
                let num: f64 = num.trim().parse().expect("checked above");
                let unit = unit.trim();
                if unit.is_empty() {
                    num
                } else {
                    num * unit_factor(unit, dim)
                        .ok_or_else(|| format!("unit {unit:?} is not a {dim} unit"))?
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{self} is not a finite {dim}"))
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Number(v) => write!(f, "{v}"),
            Quantity::Text(s) => write!(f, "{s:?}"),
        }
    }
}

/// A length in lattice sites, or `"inf"` for long-range order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sites {
    Number(f64),
    Text(String),
}

impl Sites {
    pub fn to_decay_length(&self) -> Result<talbot_core::DecayLength, String> {
        use talbot_core::DecayLength;
        match self {
            Sites::Number(v) => DecayLength::finite(*v).map_err(|e| e.to_string()),
            Sites::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinite" | "lro" => Ok(DecayLength::Infinite),
                other => other
                    .parse::<f64>()
                    .map_err(|_| format!("expected a number of sites or \"inf\", got {s:?}"))
                    .and_then(|v| DecayLength::finite(v).map_err(|e| e.to_string())),
            },
        }
    }
}

impl From<talbot_core::DecayLength> for Sites {
    fn from(x: talbot_core::DecayLength) -> Self {
        match x {
            talbot_core::DecayLength::Finite(v) => Sites::Number(v),
            talbot_core::DecayLength::Infinite => Sites::Text("inf".into()),
        }
    }
}
