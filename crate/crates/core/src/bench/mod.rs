//! Monte Carlo harness for the detection sweeps and the positioning
//! experiment.

mod config;
mod metrics;
mod position;
mod sweep;

pub use config::{Effect, LocateSetup, SweepConfig};
pub use metrics::{compute_cdf, compute_rmse, percentile, MetricRow, MetricTable};
pub use position::{
    detect_beacons, locate_decisions, run_positioning, synthesize_capture, PositionRecord,
    PositioningReport,
};
pub use sweep::run_sweep;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random stream of trial `iteration` at grid point `grid`.
pub fn trial_rng(seed: u64, grid: usize, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((grid as u64) << 32) | iteration as u64);
    rng
}
