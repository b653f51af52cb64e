//! Temporal Talbot interferometry of matter waves in a one-dimensional
//! optical lattice.
//!
//! * [`lattice`]: physical constants and derived lattice scales.
//! * [`analytic`]: closed-form wavefunctions, overlaps and phase-averaged
//!   revival amplitudes.
//! * [`oracle`]: brute-force grid propagation, quadrature and Monte Carlo
//!   averaging that share no code with the closed forms.
//! * [`disorder`]: generative site-phase models with known correlators.
//! * [`quench`]: synthetic Talbot traces, damped-sine fits, coherence
//!   lengths and spreading exponents.

pub mod analytic;
pub mod decay;
pub mod disorder;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod quench;
pub mod rng;
pub mod series;

pub use analytic::{CorrelatorProfile, OverlapValue, PhaseConfiguration};
pub use decay::DecayLength;
pub use disorder::DisorderModel;
pub use error::{Error, Result};
pub use lattice::LatticeParams;
