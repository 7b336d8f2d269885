//! Coarse-grained generator, transient integration, periodic kicks and
//! steady states.

mod evolve;
mod generator;
mod integrate;
mod steady;
mod strobe;

pub use evolve::{evolve, evolve_with, uniform_samples, EvolutionTrace, EvolveOptions};
pub use generator::{build_damping_generator, build_generator, kick_for, GeneratorMatrix};
pub use integrate::{choose_integrator, Integrator, Propagator, Tolerances};
pub(crate) use steady::{balance_ratio, grow_until_contained, product_distribution};
pub use steady::{
    kick_fluctuation, steady_state_analytic, steady_state_for, steady_state_long_time,
    steady_state_numeric, steady_state_numeric_for, SteadyStateMethod, SteadyStateResult,
    KERNEL_TOL, LONG_TIME_CHANGE, LONG_TIME_RESIDUAL, MAX_LEVELS,
};
pub use strobe::{evolve_stroboscopic, KickRecord, StroboscopicTrace};
