//! Physical constants and the derived scales of a one-dimensional optical
//! lattice. Everything is SI internally.

use std::f64::consts::PI;

use crate::error::{domain, ensure_positive, Result};

/// Fundamental constants (CODATA 2018).
pub mod constants {
    /// Planck constant, 6.62607e-34 J s (exact by SI definition).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant, 1.05457e-34 J s.
    pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
    /// Atomic mass constant, 1.66054e-27 kg.
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    /// Mass of a ⁸⁷Rb atom, 86.9092 u = 1.44316e-25 kg.
    pub const RB87_MASS: f64 = 86.909_180_527 * ATOMIC_MASS_UNIT;
}

use constants::{HBAR, PLANCK};

/// Ratio σ/d below which on-site packets are treated as non-overlapping.
pub const TIGHT_BINDING_LIMIT: f64 = 0.25;

/// `T_T = 2 M d² / h`.
pub fn talbot_time(mass: f64, spacing: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    ensure_positive("lattice spacing", spacing)?;
    Ok(2.0 * mass * spacing * spacing / PLANCK)
}

/// `E_r = π² ħ² / (2 M d²)`.
pub fn recoil_energy(mass: f64, spacing: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    ensure_positive("lattice spacing", spacing)?;
    Ok(PI * PI * HBAR * HBAR / (2.0 * mass * spacing * spacing))
}

/// On-site Gaussian width in the harmonic approximation of one well of
/// depth `s` recoil energies: `σ = d / (π s^{1/4})`.
pub fn gaussian_width_from_depth(depth: f64, spacing: f64) -> Result<f64> {
    ensure_positive("lattice depth", depth)?;
    ensure_positive("lattice spacing", spacing)?;
    Ok(spacing / (PI * depth.powf(0.25)))
}

/// Spatial Talbot distance `L_T = 2 d² / λ`.
pub fn talbot_length(wavelength: f64, spacing: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("lattice spacing", spacing)?;
    Ok(2.0 * spacing * spacing / wavelength)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Lattice spacing `d` (m).
    pub spacing: f64,
    /// Particle mass `M` (kg).
    pub mass: f64,
    /// Lattice depth `s` in units of the recoil energy.
    pub depth: f64,
    /// On-site Gaussian width `σ` (m).
    pub sigma: f64,
    /// Optical wavelength for the spatial Talbot helper (m).
    pub wavelength: Option<f64>,
}

impl LatticeParams {
    /// Lattice with `σ` taken from the harmonic approximation of the well.
    pub fn new(spacing: f64, mass: f64, depth: f64) -> Result<Self> {
        let sigma = gaussian_width_from_depth(depth, spacing)?;
        Self::with_sigma(spacing, mass, depth, sigma)
    }

    /// Lattice with an explicit on-site width.
    pub fn with_sigma(spacing: f64, mass: f64, depth: f64, sigma: f64) -> Result<Self> {
        ensure_positive("lattice spacing", spacing)?;
        ensure_positive("mass", mass)?;
        ensure_positive("lattice depth", depth)?;
        ensure_positive("sigma", sigma)?;
        Ok(Self {
            spacing,
            mass,
            depth,
            sigma,
            wavelength: None,
        })
    }

    /// ⁸⁷Rb in a lattice of the given spacing and depth.
    pub fn rubidium87(spacing: f64, depth: f64) -> Result<Self> {
        Self::new(spacing, constants::RB87_MASS, depth)
    }

    pub fn with_wavelength(mut self, wavelength: f64) -> Result<Self> {
        ensure_positive("wavelength", wavelength)?;
        self.wavelength = Some(wavelength);
        Ok(self)
    }

    /// Re-checks the field invariants, for values built by struct literal.
    pub fn validate(&self) -> Result<()> {
        ensure_positive("lattice spacing", self.spacing)?;
        ensure_positive("mass", self.mass)?;
        ensure_positive("lattice depth", self.depth)?;
        ensure_positive("sigma", self.sigma)?;
        if let Some(w) = self.wavelength {
            ensure_positive("wavelength", w)?;
        }
        Ok(())
    }

    /// `σ/d`.
    pub fn width_ratio(&self) -> f64 {
        self.sigma / self.spacing
    }

    /// Whether `σ/d` is small enough for the non-overlapping-packet picture.
    /// Configurations failing this are still evaluated.
    pub fn is_tight_binding(&self) -> bool {
        self.width_ratio() < TIGHT_BINDING_LIMIT
    }

    /// `2π²σ²/d²`, the Gaussian exponent of the revival sums.
    pub fn exponent_factor(&self) -> f64 {
        let r = self.width_ratio();
        2.0 * PI * PI * r * r
    }

    /// `√(2π) σ/d`, the incoherent plateau of the averaged overlap.
    pub fn plateau(&self) -> f64 {
        (2.0 * PI).sqrt() * self.width_ratio()
    }

    pub fn talbot_time(&self) -> f64 {
        2.0 * self.mass * self.spacing * self.spacing / PLANCK
    }

    pub fn derived(&self) -> Result<DerivedScales> {
        self.validate()?;
        let talbot_length = self
            .wavelength
            .map(|w| talbot_length(w, self.spacing))
            .transpose()?;
        Ok(DerivedScales {
            talbot_time: talbot_time(self.mass, self.spacing)?,
            recoil_energy: recoil_energy(self.mass, self.spacing)?,
            talbot_length,
            exponent_factor: self.exponent_factor(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Talbot time (s).
    pub talbot_time: f64,
    /// Recoil energy (J).
    pub recoil_energy: f64,
    /// Spatial Talbot distance (m), when a wavelength is set.
    pub talbot_length: Option<f64>,
    /// `2π²σ²/d²`.
    pub exponent_factor: f64,
}

/// Blanking time in Talbot units for a physical time `t`.
pub fn tau_from_time(t: f64, talbot_time: f64) -> Result<f64> {
    ensure_positive("Talbot time", talbot_time)?;
    if !t.is_finite() {
        return Err(domain(format!("time must be finite, got {t}")));
    }
    Ok(t / talbot_time)
}
