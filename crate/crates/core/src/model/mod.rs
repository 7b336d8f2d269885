//! Phonon populations and the kick acting on them.

mod distribution;
mod kick;
mod params;

pub(crate) use distribution::sanitize;
pub use distribution::{
    default_n_max, mean_phonon, thermal_distribution, PhononDistribution, DRIFT_TOL,
    NEGATIVE_CLAMP, SUM_TOL, TAIL_TOL,
};
pub use kick::{apply_kick, build_kick_map, KickMap};
pub use params::ProtocolParams;
