//! Run configuration: a TOML file with one section per concern. Every
//! section is optional and falls back to the defaults below; quantities may
//! carry unit suffixes (see [`crate::units`]).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use talbot_core::lattice::constants::{PLANCK, RB87_MASS};
use talbot_core::oracle::{QuadratureOptions, DEFAULT_PADDING, DEFAULT_STEP};
use talbot_core::quench::{uniform_times, CoherenceSchedule, FitOptions, SignalShape};
use talbot_core::{DecayLength, DisorderModel, LatticeParams};

use crate::error::CliError;
use crate::units::{Dimension, Quantity, Sites};

const DEFAULT_SPACING: f64 = 547e-9;
const DEFAULT_REFERENCE_DECAY: f64 = 525e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    pub disorder: DisorderSection,
    pub sweep: SweepSection,
    pub signal: SignalSection,
    pub analysis: AnalysisSection,
    pub quench: QuenchSection,
    pub oracle: OracleSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    /// Lattice spacing `d` (547 nm when neither this nor `talbot_time` is
    /// given). Mutually exclusive with `talbot_time`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Quantity>,
    /// Talbot time; the spacing is derived from it and the mass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub talbot_time: Option<Quantity>,
    /// Depth in recoil energies.
    pub depth: f64,
    pub mass: Quantity,
    /// Explicit on-site width, overriding the harmonic estimate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<Quantity>,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            spacing: None,
            talbot_time: None,
            depth: 5.0,
            mass: Quantity::Number(RB87_MASS),
            sigma: None,
            wavelength: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Coherent,
    Independent,
    RandomWalk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisorderSection {
    pub model: ModelKind,
    /// Random-walk step width (rad). Mutually exclusive with `coherence_length`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Random-walk correlator decay length in sites.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence_length: Option<Sites>,
    /// Number of sites in sampled phase configurations.
    pub window: usize,
}

impl Default for DisorderSection {
    fn default() -> Self {
        Self {
            model: ModelKind::Coherent,
            epsilon: None,
            coherence_length: None,
            window: talbot_core::disorder::DEFAULT_WINDOW_SITES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub start: Quantity,
    pub end: Quantity,
    pub points: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            start: Quantity::from("0 us"),
            end: Quantity::from("1 ms"),
            points: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSection {
    /// Signal per unit excitation.
    pub gain: f64,
    pub offset: f64,
    /// Standard deviation of additive Gaussian noise, in signal units.
    pub noise: f64,
    /// Reference decay length in sites (`"inf"` for none). Mutually
    /// exclusive with `reference_decay`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Sites>,
    /// Reference decay time; converted with the Talbot time. Without either
    /// field the reference decays in 525 µs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_decay: Option<Quantity>,
}

impl Default for SignalSection {
    fn default() -> Self {
        Self {
            gain: 1.0,
            offset: 0.0,
            noise: 0.0,
            reference: None,
            reference_decay: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    /// Fit the damped sine to simulated traces.
    pub fit: bool,
    /// Centre the fit's multistart grid on the theoretical Talbot time
    /// instead of the periodogram peak.
    pub use_theory_hint: bool,
    /// Smallest revival contrast, relative to the first, that counts as resolved.
    pub min_revival_contrast: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            fit: true,
            use_theory_hint: true,
            min_revival_contrast: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Diffusive,
    Ballistic,
    PowerLaw,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuenchSection {
    /// Equilibration times after the quench.
    pub t_q: Vec<Quantity>,
    pub schedule: ScheduleKind,
    /// Tunnelling time `ħ/J`; sets the rate of the diffusive and ballistic
    /// schedules and of the bound curves.
    pub tunnelling_time: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefactor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// Coherence lengths for the explicit schedule, one per `t_q`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lengths: Vec<Sites>,
    /// Shift the bound curves through the first data point.
    pub anchor_bounds: bool,
}

impl Default for QuenchSection {
    fn default() -> Self {
        Self {
            t_q: ["5 ms", "10 ms", "20 ms", "40 ms", "80 ms", "150 ms"]
                .into_iter()
                .map(Quantity::from)
                .collect(),
            schedule: ScheduleKind::Diffusive,
            tunnelling_time: Quantity::from("1.3 ms"),
            prefactor: None,
            exponent: None,
            lengths: Vec::new(),
            anchor_bounds: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    /// Random phase configurations compared against quadrature.
    pub configurations: usize,
    /// Half-width of those configurations in sites.
    pub sites: usize,
    pub taus: Vec<f64>,
    /// Grid step in units of σ.
    pub step: f64,
    /// Grid padding in units of σ.
    pub padding: f64,
    pub quadrature_tolerance: f64,
    pub mc_epsilon: f64,
    pub mc_samples: usize,
    pub mc_taus: Vec<f64>,
    /// Allowed Monte Carlo deviation in standard errors.
    pub mc_sigmas: f64,
    pub duality_points: usize,
    pub duality_tolerance: f64,
    pub decomposition_tolerance: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            configurations: 10,
            sites: 12,
            taus: vec![0.3, 0.85, 1.5, 2.2],
            step: DEFAULT_STEP,
            padding: DEFAULT_PADDING,
            quadrature_tolerance: 1e-6,
            mc_epsilon: 1.0,
            mc_samples: 10_000,
            mc_taus: vec![0.5, 1.0, 1.5, 2.0],
            mc_sigmas: 3.0,
            duality_points: 20,
            duality_tolerance: 1e-10,
            decomposition_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum OutputFormat {
    #[serde(rename = "csv")]
    Csv,
    #[default]
    #[serde(rename = "csv+svg")]
    CsvSvg,
}

impl OutputFormat {
    pub fn svg(self) -> bool {
        self == OutputFormat::CsvSvg
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "csv+svg" => Ok(OutputFormat::CsvSvg),
            other => Err(format!("unknown format {other:?} (expected csv or csv+svg)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{path}: {msg}"))
}

fn quantity(path: &str, q: &Quantity, dim: Dimension) -> Result<f64, CliError> {
    q.to_si(dim).map_err(|m| invalid(path, m))
}

fn positive(path: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(path, format!("must be > 0, got {v}")))
    }
}

impl LatticeSection {
    pub fn resolve(&self) -> Result<LatticeParams, CliError> {
        let mass = positive("lattice.mass", quantity("lattice.mass", &self.mass, Dimension::Mass)?)?;
        let spacing = match (&self.spacing, &self.talbot_time) {
            (Some(d), None) => {
                positive("lattice.spacing", quantity("lattice.spacing", d, Dimension::Length)?)?
            }
            (None, Some(t)) => {
                let t = positive(
                    "lattice.talbot_time",
                    quantity("lattice.talbot_time", t, Dimension::Time)?,
                )?;
                (t * PLANCK / (2.0 * mass)).sqrt()
            }
            (Some(_), Some(_)) => {
                return Err(invalid("lattice", "give either spacing or talbot_time, not both"))
            }
            (None, None) => DEFAULT_SPACING,
        };
        positive("lattice.depth", self.depth)?;
        let mut params = match &self.sigma {
            Some(s) => {
                let s = positive("lattice.sigma", quantity("lattice.sigma", s, Dimension::Length)?)?;
                LatticeParams::with_sigma(spacing, mass, self.depth, s)
            }
            None => LatticeParams::new(spacing, mass, self.depth),
        }
        .map_err(|e| invalid("lattice", e))?;
        if let Some(w) = &self.wavelength {
            let w = quantity("lattice.wavelength", w, Dimension::Length)?;
            params = params
                .with_wavelength(w)
                .map_err(|e| invalid("lattice.wavelength", e))?;
        }
        Ok(params)
    }
}

impl DisorderSection {
    pub fn resolve(&self) -> Result<DisorderModel, CliError> {
        if self.window == 0 {
            return Err(invalid("disorder.window", "must be at least 1 site"));
        }
        let extra = |field: &str| invalid(&format!("disorder.{field}"), "only used by the random-walk model");
        match self.model {
            ModelKind::Coherent | ModelKind::Independent => {
                if self.epsilon.is_some() {
                    return Err(extra("epsilon"));
                }
                if self.coherence_length.is_some() {
                    return Err(extra("coherence_length"));
                }
                Ok(if self.model == ModelKind::Coherent {
                    DisorderModel::Coherent
                } else {
                    DisorderModel::IndependentUniform
                })
            }
            ModelKind::RandomWalk => match (self.epsilon, &self.coherence_length) {
                (Some(e), None) => {
                    DisorderModel::random_walk(e).map_err(|err| invalid("disorder.epsilon", err))
                }
                (None, Some(xi)) => {
                    let xi = xi
                        .to_decay_length()
                        .map_err(|m| invalid("disorder.coherence_length", m))?;
                    DisorderModel::random_walk_with_length(xi)
                        .map_err(|err| invalid("disorder.coherence_length", err))
                }
                _ => Err(invalid(
                    "disorder",
                    "random-walk needs exactly one of epsilon or coherence_length",
                )),
            },
        }
    }
}

impl SweepSection {
    pub fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let start = quantity("sweep.start", &self.start, Dimension::Time)?;
        let end = quantity("sweep.end", &self.end, Dimension::Time)?;
        if start < 0.0 {
            return Err(invalid("sweep.start", "must be >= 0"));
        }
        if end <= start {
            return Err(invalid("sweep.end", "must be later than sweep.start"));
        }
        if self.points < 2 {
            return Err(invalid("sweep.points", "need at least 2 points"));
        }
        uniform_times(start, end, self.points).map_err(|e| invalid("sweep", e))
    }
}

impl SignalSection {
    pub fn shape(&self, params: &LatticeParams) -> Result<SignalShape, CliError> {
        if !self.gain.is_finite() || self.gain == 0.0 {
            return Err(invalid("signal.gain", "must be finite and non-zero"));
        }
        if !self.offset.is_finite() {
            return Err(invalid("signal.offset", "must be finite"));
        }
        SignalShape::from_lattice(params, self.gain, self.offset).map_err(|e| invalid("signal", e))
    }

    pub fn noise(&self) -> Result<f64, CliError> {
        if self.noise.is_finite() && self.noise >= 0.0 {
            Ok(self.noise)
        } else {
            Err(invalid("signal.noise", format!("must be >= 0, got {}", self.noise)))
        }
    }

    pub fn reference(&self, talbot_time: f64) -> Result<DecayLength, CliError> {
        match (&self.reference, &self.reference_decay) {
            (Some(s), None) => s.to_decay_length().map_err(|m| invalid("signal.reference", m)),
            (None, Some(t)) => {
                let t = positive(
                    "signal.reference_decay",
                    quantity("signal.reference_decay", t, Dimension::Time)?,
                )?;
                talbot_core::quench::xi_from_decay(t, talbot_time)
                    .map_err(|e| invalid("signal.reference_decay", e))
            }
            (None, None) => talbot_core::quench::xi_from_decay(DEFAULT_REFERENCE_DECAY, talbot_time)
                .map_err(|e| invalid("signal.reference_decay", e)),
            (Some(_), Some(_)) => Err(invalid(
                "signal",
                "give either reference or reference_decay, not both",
            )),
        }
    }
}

impl AnalysisSection {
    pub fn fit_options(&self, talbot_time: f64) -> Result<FitOptions, CliError> {
        if !(0.0..=1.0).contains(&self.min_revival_contrast) {
            return Err(invalid("analysis.min_revival_contrast", "must lie in [0, 1]"));
        }
        Ok(if self.use_theory_hint {
            FitOptions::with_hint(talbot_time)
        } else {
            FitOptions::default()
        })
    }
}

impl QuenchSection {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        let t: Vec<f64> = self
            .t_q
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let path = format!("quench.t_q[{i}]");
                positive(&path, quantity(&path, q, Dimension::Time)?)
            })
            .collect::<Result<_, _>>()?;
        if t.len() < 3 {
            return Err(invalid("quench.t_q", format!("need at least 3 times, have {}", t.len())));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("quench.t_q", "times must be strictly increasing"));
        }
        Ok(t)
    }

    /// `J/ħ` in 1/s.
    pub fn rate(&self) -> Result<f64, CliError> {
        let t = positive(
            "quench.tunnelling_time",
            quantity("quench.tunnelling_time", &self.tunnelling_time, Dimension::Time)?,
        )?;
        Ok(1.0 / t)
    }

    pub fn schedule(&self) -> Result<CoherenceSchedule, CliError> {
        let rate = self.rate()?;
        let schedule = match self.schedule {
            ScheduleKind::Diffusive => CoherenceSchedule::Diffusive { rate },
            ScheduleKind::Ballistic => CoherenceSchedule::Ballistic { rate },
            ScheduleKind::PowerLaw => CoherenceSchedule::PowerLaw {
                prefactor: self
                    .prefactor
                    .ok_or_else(|| invalid("quench.prefactor", "required by the power-law schedule"))?,
                exponent: self
                    .exponent
                    .ok_or_else(|| invalid("quench.exponent", "required by the power-law schedule"))?,
            },
            ScheduleKind::Explicit => CoherenceSchedule::Explicit(
                self.lengths
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        s.to_decay_length()
                            .map_err(|m| invalid(&format!("quench.lengths[{i}]"), m))
                    })
                    .collect::<Result<_, _>>()?,
            ),
        };
        schedule
            .lengths(&self.times()?)
            .map_err(|e| invalid("quench", e))?;
        Ok(schedule)
    }
}

impl OracleSection {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.configurations == 0 {
            return Err(invalid("oracle.configurations", "must be at least 1"));
        }
        if self.taus.is_empty() || self.taus.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(invalid("oracle.taus", "need at least one finite tau >= 0"));
        }
        if self.mc_taus.is_empty() || self.mc_taus.iter().any(|t| !t.is_finite()) {
            return Err(invalid("oracle.mc_taus", "need at least one finite tau"));
        }
        positive("oracle.step", self.step)?;
        if self.padding < talbot_core::oracle::MIN_PADDING || !self.padding.is_finite() {
            return Err(invalid(
                "oracle.padding",
                format!("must be at least {} sigma", talbot_core::oracle::MIN_PADDING),
            ));
        }
        positive("oracle.quadrature_tolerance", self.quadrature_tolerance)?;
        if !(self.mc_epsilon.is_finite() && self.mc_epsilon >= 0.0) {
            return Err(invalid("oracle.mc_epsilon", "must be >= 0"));
        }
        if self.mc_samples < 2 {
            return Err(invalid("oracle.mc_samples", "need at least 2 samples"));
        }
        positive("oracle.mc_sigmas", self.mc_sigmas)?;
        if self.duality_points == 0 {
            return Err(invalid("oracle.duality_points", "must be at least 1"));
        }
        positive("oracle.duality_tolerance", self.duality_tolerance)?;
        positive("oracle.decomposition_tolerance", self.decomposition_tolerance)?;
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions {
            step: self.step,
            padding: self.padding,
        }
    }
}
