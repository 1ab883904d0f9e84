//! Hyperbolic multilateration from arrival-time differences.

mod beacons;
mod solver;

pub use beacons::{forward_dtoa, stand_in_test_points, BeaconArray};
pub use solver::{solve_position, DtoaProblem, PositionFix, SolveDims, SolverOptions};

pub type Point = [f64; 3];

pub fn distance(a: &Point, b: &Point) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}
