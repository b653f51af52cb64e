//! Damped-sine fitting by Levenberg–Marquardt with a multistart grid.
//!
//! The model `B + A·e^{−t/t_T}·sin(2πt/T_T + φ)` is fitted in standardized
//! units: values are shifted and scaled to zero mean and unit spread, and
//! time is measured in units of the last sample time. Results are mapped
//! back to physical units, including the covariance.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix5, Vector5};

use super::signal::TalbotSignal;
use crate::error::{domain, Error, Result};

const MIN_POINTS: usize = 12;
const MIN_PERIODS: f64 = 1.5;
const PHASE_STARTS: usize = 8;
const FREQUENCY_FACTORS: [f64; 5] = [0.9, 0.95, 1.0, 1.05, 1.1];
const PERIODOGRAM_POINTS: usize = 4000;

/// Index of each parameter in [`FitResult::covariance`].
pub mod index {
    pub const AMPLITUDE: usize = 0;
    pub const TALBOT_TIME: usize = 1;
    pub const DECAY_TIME: usize = 2;
    pub const PHASE: usize = 3;
    pub const BASELINE: usize = 4;
}

/// Starting point for a single seeded fit, in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialGuess {
    pub amplitude: f64,
    pub talbot_time: f64,
    pub decay_time: f64,
    pub phase: f64,
    pub baseline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Expected oscillation period; centres the multistart frequency grid.
    /// Without it the grid is centred on the periodogram peak.
    pub talbot_hint: Option<f64>,
    pub initial_guess: Option<InitialGuess>,
    /// Scaled-gradient convergence threshold.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            talbot_hint: None,
            initial_guess: None,
            gradient_tolerance: 1e-10,
            max_iterations: 400,
        }
    }
}

impl FitOptions {
    pub fn with_hint(talbot_time: f64) -> Self {
        Self {
            talbot_hint: Some(talbot_time),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub amplitude: f64,
    /// Fitted oscillation period (s).
    pub talbot_time_fit: f64,
    /// Envelope decay time (s); `∞` when the fit finds no damping.
    pub decay_time: f64,
    /// Phase offset in `(−π, π]`.
    pub phase_offset: f64,
    pub baseline: f64,
    /// Covariance of `[amplitude, talbot_time, decay_time, phase, baseline]`,
    /// see [`index`].
    pub covariance: [[f64; 5]; 5],
    /// Weighted residual norm when sigmas are present, plain otherwise.
    pub residual_norm: f64,
    pub iterations: usize,
}

impl FitResult {
    pub fn stderr(&self, i: usize) -> f64 {
        self.covariance[i][i].sqrt()
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let envelope = if self.decay_time.is_infinite() {
            1.0
        } else {
            (-t / self.decay_time).exp()
        };
        self.baseline
            + self.amplitude * envelope * (TAU * t / self.talbot_time_fit + self.phase_offset).sin()
    }
}

/// Internal parameter vector `[B, A, γ, ω, φ]` over `u = t / t_last`.
type Params = Vector5<f64>;

struct Problem {
    u: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

struct Linearization {
    cost: f64,
    jtj: Matrix5<f64>,
    jtr: Vector5<f64>,
}

impl Problem {
    fn model(p: &Params, u: f64) -> (f64, Vector5<f64>) {
        let e = (-p[2] * u).exp();
        let (s, c) = (p[3] * u + p[4]).sin_cos();
        let aes = p[1] * e * s;
        let aec = p[1] * e * c;
        (p[0] + aes, Vector5::new(1.0, e * s, -u * aes, u * aec, aec))
    }

    fn cost(&self, p: &Params) -> f64 {
        if p.iter().any(|v| !v.is_finite()) || p[2] < -50.0 {
            return f64::INFINITY;
        }
        0.5 * self
            .u
            .iter()
            .zip(&self.y)
            .zip(&self.w)
            .map(|((&u, &y), &w)| {
                let r = w * (y - Self::model(p, u).0);
                r * r
            })
            .sum::<f64>()
    }

    fn linearize(&self, p: &Params) -> Linearization {
        let mut jtj = Matrix5::zeros();
        let mut jtr = Vector5::zeros();
        let mut cost = 0.0;
        for ((&u, &y), &w) in self.u.iter().zip(&self.y).zip(&self.w) {
            let (f, grad) = Self::model(p, u);
            let r = w * (y - f);
            let j = grad * w;
            jtj += j * j.transpose();
            jtr += j * r;
            cost += 0.5 * r * r;
        }
        Linearization { cost, jtj, jtr }
    }

    fn scaled_gradient(lin: &Linearization) -> f64 {
        let rnorm = (2.0 * lin.cost).sqrt();
        if rnorm == 0.0 {
            return 0.0;
        }
        (0..5)
            .filter(|&j| lin.jtj[(j, j)] > 0.0)
            .map(|j| lin.jtr[j].abs() / (lin.jtj[(j, j)].sqrt() * rnorm))
            .fold(0.0, f64::max)
    }
}

struct Run {
    params: Params,
    cost: f64,
    iterations: usize,
    converged: bool,
}

fn levenberg_marquardt(problem: &Problem, start: Params, options: &FitOptions) -> Run {
    let zero_residual = 1e-24 * problem.y.len() as f64;
    let mut p = start;
    let mut lin = problem.linearize(&p);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let done = |lin: &Linearization| {
        lin.cost <= zero_residual || Problem::scaled_gradient(lin) < options.gradient_tolerance
    };
    while iterations < options.max_iterations {
        if done(&lin) {
            return Run {
                params: p,
                cost: lin.cost,
                iterations,
                converged: true,
            };
        }
        iterations += 1;
        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = lin.jtj;
            for j in 0..5 {
                a[(j, j)] += lambda * lin.jtj[(j, j)].max(1e-12);
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&lin.jtr),
                None => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let trial = p + step;
            let trial_cost = problem.cost(&trial);
            if trial_cost < lin.cost {
                let small_step = step
                    .iter()
                    .zip(p.iter())
                    .all(|(s, v)| s.abs() <= 1e-15 * (v.abs() + 1e-15));
                p = trial;
                lin = problem.linearize(&p);
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                if small_step {
                    return Run {
                        params: p,
                        cost: lin.cost,
                        iterations,
                        converged: done(&lin),
                    };
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    Run {
        params: p,
        cost: lin.cost,
        iterations,
        converged: done(&lin),
    }
}

/// Frequency (cycles per unit `u`) of the largest periodogram peak.
fn periodogram_peak(u: &[f64], y: &[f64]) -> f64 {
    let span = u[u.len() - 1] - u[0];
    let f_min = 0.5 / span;
    let f_max = (u.len() - 1) as f64 / (2.0 * span);
    let mut best = (f64::NEG_INFINITY, f_min);
    for k in 0..PERIODOGRAM_POINTS {
        let f = f_min + (f_max - f_min) * k as f64 / (PERIODOGRAM_POINTS - 1) as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (&ui, &yi) in u.iter().zip(y) {
            let (s, c) = (TAU * f * ui).sin_cos();
            re += yi * c;
            im -= yi * s;
        }
        let power = re * re + im * im;
        if power > best.0 {
            best = (power, f);
        }
    }
    best.1
}

/// Least-squares baseline and amplitude for fixed decay, frequency and phase.
fn linear_start(problem: &Problem, gamma: f64, omega: f64, phi: f64) -> Params {
    let (mut s00, mut s01, mut s11, mut b0, mut b1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&u, &y), &w) in problem.u.iter().zip(&problem.y).zip(&problem.w) {
        let g = (-gamma * u).exp() * (omega * u + phi).sin();
        let w2 = w * w;
        s00 += w2;
        s01 += w2 * g;
        s11 += w2 * g * g;
        b0 += w2 * y;
        b1 += w2 * g * y;
    }
    let det = s00 * s11 - s01 * s01;
    let (b, a) = if det.abs() > 1e-300 {
        ((s11 * b0 - s01 * b1) / det, (s00 * b1 - s01 * b0) / det)
    } else {
        (b0 / s00, 1.0)
    };
    Params::new(b, a, gamma, omega, phi)
}

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Canonical form with `A > 0`, `ω > 0`, `φ ∈ (−π, π]`.
fn normalize(mut p: Params) -> Params {
    if p[3] < 0.0 {
        p[3] = -p[3];
        p[4] = -p[4];
        p[1] = -p[1];
    }
    if p[1] < 0.0 {
        p[1] = -p[1];
        p[4] += PI;
    }
    p[4] = wrap_phase(p[4]);
    p
}

/// Fits `baseline + A·e^{−t/t_T}·sin(2πt/T_T + φ)`, inverse-variance
/// weighted when the signal carries sigmas.
pub fn fit_damped_sine(signal: &TalbotSignal, options: &FitOptions) -> Result<FitResult> {
    let n = signal.len();
    if n < MIN_POINTS {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_POINTS} points, have {n}"
        )));
    }
    let t = signal.times();
    let t_last = t[n - 1];
    let y = signal.values();
    let mean = y.iter().sum::<f64>() / n as f64;
    let spread = (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
    if spread.is_nan() || spread <= 1e-12 * mean.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NoOscillation);
    }
    let problem = Problem {
        u: t.iter().map(|t| t / t_last).collect(),
        y: y.iter().map(|v| (v - mean) / spread).collect(),
        w: match signal.sigmas() {
            Some(s) => s.iter().map(|s| spread / s).collect(),
            None => vec![1.0; n],
        },
    };
    let u_span = problem.u[n - 1] - problem.u[0];

    if let Some(hint) = options.talbot_hint {
        if !(hint.is_finite() && hint > 0.0) {
            return Err(domain(format!("Talbot time hint must be > 0, got {hint}")));
        }
    }
    let mut best: Option<Run> = None;
    let consider = |run: Run, best: &mut Option<Run>| {
        let better = match best {
            None => true,
            Some(b) => {
                (run.converged && !b.converged)
                    || (run.converged == b.converged && run.cost < b.cost)
            }
        };
        if better {
            *best = Some(run);
        }
    };

    let mut centre_hint = options.talbot_hint;
    if let Some(g) = options.initial_guess {
        let ok = [
            g.amplitude,
            g.talbot_time,
            g.decay_time,
            g.phase,
            g.baseline,
        ]
        .iter()
        .all(|v| !v.is_nan())
            && g.talbot_time > 0.0
            && g.decay_time > 0.0;
        if !ok {
            return Err(domain("initial guess needs T_T > 0 and t_T > 0"));
        }
        let start = Params::new(
            (g.baseline - mean) / spread,
            g.amplitude / spread,
            t_last / g.decay_time,
            TAU * t_last / g.talbot_time,
            g.phase,
        );
        centre_hint = centre_hint.or(Some(g.talbot_time));
        consider(levenberg_marquardt(&problem, start, options), &mut best);
    }

    if !best.as_ref().is_some_and(|b| b.converged) {
        let f0 = match centre_hint {
            Some(h) => t_last / h,
            None => periodogram_peak(&problem.u, &problem.y),
        };
        if f0 * u_span < MIN_PERIODS {
            return Err(Error::InsufficientData(format!(
                "signal spans {:.2} oscillation periods, need {MIN_PERIODS}",
                f0 * u_span
            )));
        }
        for factor in FREQUENCY_FACTORS {
            let omega = TAU * f0 * factor;
            for k in 0..PHASE_STARTS {
                let phi = -PI + TAU * k as f64 / PHASE_STARTS as f64;
                let start = linear_start(&problem, 1.0, omega, phi);
                consider(levenberg_marquardt(&problem, start, options), &mut best);
            }
        }
    }

    let run = best.expect("at least one start");
    if !run.converged {
        let residual = (2.0 * run.cost).sqrt();
        return Err(Error::NonConvergence {
            best_residual: if signal.sigmas().is_some() {
                residual
            } else {
                residual * spread
            },
        });
    }
    let p = normalize(run.params);
    if p[1] < 1e-9 {
        return Err(Error::NoOscillation);
    }
    let period_u = TAU / p[3];
    if u_span / period_u < MIN_PERIODS {
        return Err(Error::InsufficientData(format!(
            "fitted period covers only {:.2} periods of the signal",
            u_span / period_u
        )));
    }

    let lin = problem.linearize(&p);
    let inv = lin
        .jtj
        .try_inverse()
        .unwrap_or_else(|| lin.jtj.pseudo_inverse(1e-14).unwrap_or(Matrix5::zeros()));
    let internal_cov = if signal.sigmas().is_some() {
        inv
    } else {
        let dof = (n - 5) as f64;
        inv * (2.0 * lin.cost / dof)
    };

    let decay_time = if p[2] > 0.0 {
        t_last / p[2]
    } else {
        f64::INFINITY
    };
    // Rows: [A, T_T, t_T, φ, B]; columns: [B, A, γ, ω, φ].
    let mut m = Matrix5::zeros();
    m[(0, 1)] = spread;
    m[(1, 3)] = -TAU * t_last / (p[3] * p[3]);
    m[(2, 2)] = if p[2] > 0.0 {
        -t_last / (p[2] * p[2])
    } else {
        0.0
    };
    m[(3, 4)] = 1.0;
    m[(4, 0)] = spread;
    let cov = m * internal_cov * m.transpose();
    let mut covariance = [[0.0; 5]; 5];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = 0.5 * (cov[(i, j)] + cov[(j, i)]);
        }
        row[i] = row[i].max(0.0);
    }
    if p[2] <= 0.0 {
        covariance[index::DECAY_TIME][index::DECAY_TIME] = f64::INFINITY;
    }
    let residual = (2.0 * lin.cost).sqrt();
    Ok(FitResult {
        amplitude: spread * p[1],
        talbot_time_fit: TAU * t_last / p[3],
        decay_time,
        phase_offset: p[4],
        baseline: mean + spread * p[0],
        covariance,
        residual_norm: if signal.sigmas().is_some() {
            residual
        } else {
            residual * spread
        },
        iterations: run.iterations,
    })
}
