//! The experiment-facing pipeline: synthetic Talbot traces, damped-sine
//! fits, decay lengths, the reference correction and growth laws.

pub mod coherence;
pub mod fit;
pub mod pipeline;
pub mod scaling;
pub mod signal;

pub use coherence::{coherence_correction, compose, decay_from_xi, xi_from_decay};
pub use fit::{fit_damped_sine, FitOptions, FitResult, InitialGuess};
pub use pipeline::{
    estimate_from_fit, run_quench, CoherenceSchedule, PointEstimate, QuenchConfig, QuenchPoint,
    QuenchSeries,
};
pub use scaling::{
    bound_curves, fit_power_law, interaction_decay_estimate, transport_bounds, PowerLawFit,
    TransportBounds,
};
pub use signal::{
    count_resolvable_revivals, exponential_coherence, synthesize_signal, uniform_times,
    SignalShape, TalbotSignal,
};
