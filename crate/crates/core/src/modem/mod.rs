//! Modulators that turn codes into real, band-limited transmit waveforms.

mod dmt;
mod energy;
mod ocdm;
mod psk;
mod schemes;

pub use dmt::{dmt_modulate, dmt_synthesize, DmtParams};
pub use energy::{equalize_energy, filtered_energy, signal_energy, EnergyReport};
pub use ocdm::ocdm_modulate;
pub use psk::{bpsk_modulate, qpsk_modulate, PskParams};
pub use schemes::{SchemeParams, SchemeSet};
