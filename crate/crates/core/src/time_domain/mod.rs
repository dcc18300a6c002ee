//! Time-domain validation: trapezoidal time stepping with memory and delay
//! states, a damped-Fourier solver, weighted norms and decay-rate fitting.

mod fit;
mod frequency;
mod simulate;
mod trajectory;

pub use fit::{fit_decay_rate, fit_decay_series, pointwise_bound_check, DecayFit, PointwiseCheck, RunDecay, WindowNorm, DEFAULT_WINDOW};
pub use frequency::{relative_l2, solve_frequency, solve_wave_frequency, FrequencySolution, WaveFrequencySolution};
pub use simulate::{
    memory_quadrature, simulate, DelayTerm, MemoryMode, SimulationOptions, SimulationResult, Source, WaveModel,
};
pub use trajectory::{causal_antiderivative, Causality, Trajectory};
