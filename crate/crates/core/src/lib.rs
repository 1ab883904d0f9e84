//! Waveform synthesis, channel simulation, matched-filter TOA estimation and
//! DTOA multilateration for acoustic local positioning systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`codes`]: Kasami, Zadoff-Chu and orthogonal-chirp code families plus
//!   periodic/aperiodic correlation tools.
//! * [`modem`]: BPSK, QPSK, DMT and OCDM modulators and energy equalisation.
//! * [`channel`]: transducer FIR model, noise, multipath, Doppler, sound speed.
//! * [`receiver`]: matched filtering, peak validation, DTOA extraction,
//!   ambiguity surfaces.
//! * [`locate`]: Gauss-Newton hyperbolic multilateration.
//! * [`bench`]: Monte Carlo sweeps and the positioning experiment.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod channel;
pub mod codes;
pub mod config;
pub mod dsp;
pub mod error;
pub mod io;
pub mod locate;
pub mod modem;
pub mod receiver;
pub mod waveform;

pub use config::Config;
pub use error::{Error, Result};
pub use waveform::{ComplexWaveform, Scheme, Waveform};
