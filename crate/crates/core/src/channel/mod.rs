//! Transducer and propagation channel models.

mod doppler;
mod env;
mod fir;
mod multipath;
mod propagate;

pub use doppler::{doppler_resample, resample_ratio, DopplerSpec};
pub use env::{add_awgn, add_noise, speed_of_sound, Environment, SOUND_SPEED_0C};
pub use fir::{design_transducer_fir, FirDesign, FirModel, TRANSDUCER_CENTER_HZ};
pub use multipath::{sample_multipath, MultipathProfile, Path, PathList};
pub(crate) use propagate::{delay_samples, superpose};
pub use propagate::{propagate, propagate_clean, Emission};
