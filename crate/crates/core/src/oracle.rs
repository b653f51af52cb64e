//! Brute-force reference computations.
//!
//! The overlap oracle builds `Ψ(x, 0)` from on-site Gaussians on a uniform
//! grid, transforms it to momentum space with an FFT, applies the free
//! kinetic phase, transforms back and integrates against the central
//! on-site state with the trapezoidal rule. None of the closed-form
//! propagated wavefunctions or overlaps in [`crate::analytic`] are used.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::analytic::{density_overlap, site_amplitude, OverlapValue, PhaseConfiguration};
use crate::disorder::{sample_phases_with, DisorderModel, SiteWindow};
use crate::error::{domain, ensure_positive, Result};
use crate::lattice::{constants::HBAR, LatticeParams};
use crate::rng;

/// Default grid step in units of σ.
pub const DEFAULT_STEP: f64 = 1.0 / 32.0;
/// Coarsest step accepted by [`overlap_by_quadrature`], in units of σ.
pub const MAX_STEP: f64 = 1.0 / 16.0;
/// Default padding beyond the outermost site, in units of σ.
pub const DEFAULT_PADDING: f64 = 12.0;
/// Smallest padding accepted, in units of σ.
pub const MIN_PADDING: f64 = 8.0;

/// Complex samples on a uniformly spaced axis (position or wavenumber).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    start: f64,
    spacing: f64,
    amplitudes: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(start: f64, spacing: f64, amplitudes: Vec<Complex64>) -> Result<Self> {
        ensure_positive("grid spacing", spacing)?;
        if !start.is_finite() {
            return Err(domain("grid start must be finite"));
        }
        if amplitudes.len() < 2 {
            return Err(domain("grid needs at least two samples"));
        }
        Ok(Self {
            start,
            spacing,
            amplitudes,
        })
    }

    /// Samples `f` at `start + j·spacing`, `j = 0 .. len`.
    pub fn sample(
        start: f64,
        spacing: f64,
        len: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let amplitudes = (0..len).map(|j| f(start + j as f64 * spacing)).collect();
        Self::new(start, spacing, amplitudes)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        self.start + j as f64 * self.spacing
    }

    pub fn axis(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.coordinate(j))
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `Σ |a_j|² · spacing`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spacing
    }

    /// Continuous Fourier transform `Φ(k) = (2π)^{-1/2} ∫ Ψ(x) e^{−ikx} dx`
    /// on the conjugate grid, with the wavenumber axis in increasing order.
    /// The grid length must be even.
    pub fn to_momentum(&self) -> Result<ComplexGrid> {
        let n = self.len();
        if !n.is_multiple_of(2) {
            return Err(domain("FFT grids must have an even number of samples"));
        }
        let mut buf = self.amplitudes.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let dk = 2.0 * PI / (n as f64 * self.spacing);
        let k_start = -((n / 2) as f64) * dk;
        let scale = self.spacing / (2.0 * PI).sqrt();
        let amplitudes = (0..n)
            .map(|j| {
                let m = (j + n / 2) % n;
                let k = k_start + j as f64 * dk;
                buf[m] * Complex64::from_polar(scale, -k * self.start)
            })
            .collect();
        ComplexGrid::new(k_start, dk, amplitudes)
    }

    /// Inverse of [`ComplexGrid::to_momentum`]; `x_start` fixes the origin
    /// of the reconstructed position axis.
    pub fn to_position(&self, x_start: f64) -> Result<ComplexGrid> {
        let n = self.len();
        if !n.is_multiple_of(2) {
            return Err(domain("FFT grids must have an even number of samples"));
        }
        let dx = 2.0 * PI / (n as f64 * self.spacing);
        let expected_start = -((n / 2) as f64) * self.spacing;
        if (self.start - expected_start).abs() > 1e-9 * self.spacing {
            return Err(domain(
                "momentum grid is not centred as produced by to_momentum",
            ));
        }
        let scale = self.spacing / (2.0 * PI).sqrt();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let m = (j + n / 2) % n;
            let k = self.coordinate(j);
            buf[m] = self.amplitudes[j] * Complex64::from_polar(scale, k * x_start);
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        ComplexGrid::new(x_start, dx, buf)
    }
}

/// Free evolution of a momentum-space grid (SI wavenumbers) for time `t`:
/// every sample picks up `exp(−iħk²t/2M)`.
pub fn propagate_free(grid: &ComplexGrid, t: f64, mass: f64) -> ComplexGrid {
    let amplitudes = grid
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let k = grid.coordinate(j);
            a * Complex64::from_polar(1.0, -HBAR * k * k * t / (2.0 * mass))
        })
        .collect();
    ComplexGrid {
        start: grid.start,
        spacing: grid.spacing,
        amplitudes,
    }
}

/// Grid controls for the quadrature oracle, in units of σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub step: f64,
    pub padding: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            padding: DEFAULT_PADDING,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOverlap {
    pub overlap: OverlapValue,
    /// Richardson estimate from the same integrand at twice the step.
    pub error_estimate: f64,
    pub grid_points: usize,
}

/// `n₀(τ)` by grid propagation and trapezoidal quadrature with default
/// options.
pub fn overlap_by_quadrature(
    tau: f64,
    params: &LatticeParams,
    phases: &PhaseConfiguration,
) -> Result<QuadratureOverlap> {
    overlap_by_quadrature_with(tau, params, phases, QuadratureOptions::default())
}

/// As [`overlap_by_quadrature`], rejecting steps coarser than σ/16 and
/// padding below 8σ.
pub fn overlap_by_quadrature_with(
    tau: f64,
    params: &LatticeParams,
    phases: &PhaseConfiguration,
    options: QuadratureOptions,
) -> Result<QuadratureOverlap> {
    if !(options.step > 0.0 && options.step <= MAX_STEP) {
        return Err(domain(format!(
            "grid step {} sigma is coarser than the required sigma/16",
            options.step
        )));
    }
    overlap_by_quadrature_unchecked(tau, params, phases, options)
}

/// The quadrature oracle without the resolution precondition, for
/// convergence studies on deliberately coarse grids.
pub fn overlap_by_quadrature_unchecked(
    tau: f64,
    params: &LatticeParams,
    phases: &PhaseConfiguration,
    options: QuadratureOptions,
) -> Result<QuadratureOverlap> {
    params.validate()?;
    ensure_positive("grid step", options.step)?;
    if options.padding.is_nan() || options.padding < MIN_PADDING {
        return Err(domain(format!(
            "grid padding {} sigma is below the required {MIN_PADDING} sigma",
            options.padding
        )));
    }
    if !tau.is_finite() {
        return Err(domain("tau must be finite"));
    }
    let sigma = params.sigma;
    let d = params.spacing;
    let t = tau * params.talbot_time();

    // Packets spread to a width ~ |2σ² + iħt/M|/σ; pad so their periodic
    // images stay far from the central site.
    let spread = Complex64::new(2.0 * sigma * sigma, HBAR * t / params.mass).norm() / sigma;
    let padding = (options.padding * sigma).max(4.0 * spread);
    let h = options.step * sigma;
    let x_lo = phases.n_min() as f64 * d - padding;
    let x_hi = phases.n_max() as f64 * d + padding;
    let mut n = ((x_hi - x_lo) / h).ceil() as usize + 1;
    n += n % 2;
    // keep x = 0 on the grid
    let x_start = (x_lo / h).floor() * h;

    let initial = ComplexGrid::sample(x_start, h, n, |x| {
        phases
            .sites()
            .map(|(site, phi)| {
                site_amplitude(x - site as f64 * d, sigma) * Complex64::from_polar(1.0, phi)
            })
            .sum()
    })?;
    let evolved = propagate_free(&initial.to_momentum()?, t, params.mass).to_position(x_start)?;

    let integrand: Vec<Complex64> = evolved
        .axis()
        .zip(evolved.amplitudes())
        .map(|(x, psi)| site_amplitude(x, sigma) * psi)
        .collect();
    let fine = trapezoid(&integrand, h, 1);
    let coarse = trapezoid(&integrand, h, 2);
    let amp_error = (fine - coarse).norm() / 3.0;
    Ok(QuadratureOverlap {
        overlap: OverlapValue {
            tau,
            value: fine.norm_sqr(),
        },
        error_estimate: 2.0 * fine.norm() * amp_error + amp_error * amp_error,
        grid_points: n,
    })
}

/// Composite trapezoid over every `stride`-th sample.
fn trapezoid(values: &[Complex64], h: f64, stride: usize) -> Complex64 {
    let picked: Vec<Complex64> = values.iter().step_by(stride).copied().collect();
    let Some((first, rest)) = picked.split_first() else {
        return Complex64::new(0.0, 0.0);
    };
    let Some((last, inner)) = rest.split_last() else {
        return *first * h;
    };
    let interior: Complex64 = inner.iter().sum();
    (interior + (first + last) * 0.5) * (h * stride as f64)
}

/// Empirical mean of a per-realization observable with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub tau: f64,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Averages [`density_overlap`] over `samples` phase configurations drawn
/// from `model` on `window`. Sample `i` uses stream `i` of `seed`; samples
/// are processed in fixed index blocks and reduced in block order, so the
/// result does not depend on the number of workers.
pub fn monte_carlo_average(
    tau: f64,
    params: &LatticeParams,
    model: &DisorderModel,
    window: SiteWindow,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    model.validate()?;
    params.validate()?;
    if samples < 2 {
        return Err(domain("Monte Carlo averaging needs at least two samples"));
    }
    let blocks: Vec<(usize, usize)> = rng::blocks(samples).collect();
    let partials: Vec<Result<Vec<f64>>> = blocks
        .par_iter()
        .map(|&(start, end)| {
            (start..end)
                .map(|i| {
                    let cfg = sample_phases_with(model, window, &mut rng::stream(seed, i as u64))?;
                    Ok(density_overlap(tau, params, &cfg).value)
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(samples);
    for part in partials {
        values.extend(part?);
    }
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(MonteCarloEstimate {
        tau,
        mean,
        stderr: (var / n).sqrt(),
        samples,
    })
}
