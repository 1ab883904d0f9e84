use serde::{Deserialize, Serialize};

use super::{distance, Point};
use crate::error::{Error, Result};

/// Emitter positions (m). Beacon ids are the indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeaconArray {
    pub positions: Vec<Point>,
}

impl Default for BeaconArray {
    /// Corners of a 0.707 m square plus its centre, 3.5 m above the floor
    /// and centred on the origin.
    fn default() -> Self {
        let h = 0.707 / 2.0;
        let z = 3.5;
        Self {
            positions: vec![
                [-h, -h, z],
                [h, -h, z],
                [h, h, z],
                [-h, h, z],
                [0.0, 0.0, z],
            ],
        }
    }
}

impl BeaconArray {
    pub fn new(positions: Vec<Point>) -> Result<Self> {
        let a = Self { positions };
        a.validate()?;
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn centroid(&self) -> Point {
        let n = self.len().max(1) as f64;
        let mut c = [0.0; 3];
        for p in &self.positions {
            for i in 0..3 {
                c[i] += p[i] / n;
            }
        }
        c
    }

    /// Centroid and unit normal of the plane through every beacon, when
    /// they are coplanar to within `1e-9` of the array extent.
    pub fn plane(&self) -> Option<(Point, [f64; 3])> {
        let c = self.centroid();
        let m = nalgebra::DMatrix::from_fn(self.len(), 3, |i, k| self.positions[i][k] - c[k]);
        let svd = m.svd(false, true);
        let v_t = svd.v_t?;
        let (k, &smin) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        if smin > 1e-9 * svd.singular_values.max() {
            return None;
        }
        Some((c, [v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)]]))
    }

    pub fn validate(&self) -> Result<()> {
        if self.len() < 4 {
            return Err(Error::Geometry(format!(
                "{} beacons, at least 4 required",
                self.len()
            )));
        }
        if self.positions.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("non-finite beacon coordinate".into()));
        }
        for (i, a) in self.positions.iter().enumerate() {
            for (j, b) in self.positions.iter().enumerate().skip(i + 1) {
                if distance(a, b) < 1e-9 {
                    return Err(Error::Geometry(format!("beacons {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    /// Propagation delay (s) from every beacon to `position`.
    pub fn delays(&self, position: &Point, c: f64) -> Vec<f64> {
        self.positions
            .iter()
            .map(|b| distance(position, b) / c)
            .collect()
    }
}

/// Exact differences `(|x − b_j| − |x − b_ref|) / c` for every `j ≠ ref`.
pub fn forward_dtoa(
    position: &Point,
    beacons: &BeaconArray,
    c: f64,
    reference: usize,
) -> Vec<(usize, f64)> {
    let d_ref = distance(position, &beacons.positions[reference]);
    beacons
        .positions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != reference)
        .map(|(j, b)| (j, (distance(position, b) - d_ref) / c))
        .collect()
}

/// Fourteen receiver positions at 0.55 m height used when no measured test
/// points are configured: the array axis, two rings inside the 2 m coverage
/// circle and three points outside it.
pub fn stand_in_test_points() -> Vec<Point> {
    let z = 0.55;
    let mut pts = vec![[0.0, 0.0, z]];
    for k in 0..5 {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
        pts.push([0.7 * a.cos(), 0.7 * a.sin(), z]);
    }
    for k in 0..5 {
        let a = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 5.0;
        pts.push([1.5 * a.cos(), 1.5 * a.sin(), z]);
    }
    pts.extend([[2.3, 0.4, z], [-0.6, 2.4, z], [-2.2, -1.1, z]]);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: f64 = 343.5;

    #[test]
    fn ceiling_array_is_planar() {
        let (c, n) = BeaconArray::default().plane().unwrap();
        assert!((c[2] - 3.5).abs() < 1e-12);
        assert!((n[2].abs() - 1.0).abs() < 1e-12);
        let mut tilted = BeaconArray::default();
        tilted.positions[4][2] = 3.0;
        assert!(tilted.plane().is_none());
    }

    #[test]
    fn default_layout() {
        let a = BeaconArray::default();
        assert_eq!(a.len(), 5);
        a.validate().unwrap();
        let side = distance(&a.positions[0], &a.positions[1]);
        assert!((side - 0.707).abs() < 1e-12);
        assert_eq!(a.centroid(), [0.0, 0.0, 3.5]);
    }

    #[test]
    fn rejects_bad_arrays() {
        let mut p = BeaconArray::default().positions;
        p[1] = p[0];
        assert!(matches!(BeaconArray::new(p), Err(Error::Geometry(_))));
        assert!(BeaconArray::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn equidistant_pair_has_zero_difference() {
        let a = BeaconArray::default();
        let d = forward_dtoa(&[0.0, -1.0, 0.5], &a, C, 0);
        // beacon 1 mirrors beacon 0 across x = 0
        assert!(d[0].1.abs() < 1e-15);
    }

    #[test]
    fn one_metre_farther_adds_one_over_c() {
        let a = BeaconArray::new(vec![
            [0.0, 0.0, 0.0],
            [10.0, 0.0, 0.0],
            [0.0, 10.0, 0.0],
            [0.0, 0.0, 10.0],
        ])
        .unwrap();
        let near = forward_dtoa(&[5.0, 0.0, 0.0], &a, C, 0);
        let far = forward_dtoa(&[4.0, 0.0, 0.0], &a, C, 0);
        // moved 1 m away from beacon 1 and 1 m towards the reference
        let grow = far[0].1 - near[0].1;
        assert!((grow - 2.0 / C).abs() < 1e-12);
        assert!((1.0 / C - 2.911e-3).abs() < 1e-6);
    }

    #[test]
    fn reference_swap_rebases() {
        let a = BeaconArray::default();
        let x = [0.3, -0.8, 0.55];
        let d0 = forward_dtoa(&x, &a, C, 0);
        let d2 = forward_dtoa(&x, &a, C, 2);
        let t0_minus_t2 = d2.iter().find(|(j, _)| *j == 0).unwrap().1;
        for &(j, v) in &d0 {
            let in2 = if j == 2 {
                0.0
            } else {
                d2.iter().find(|(k, _)| *k == j).unwrap().1
            };
            assert!((v - (in2 - t0_minus_t2)).abs() < 1e-15);
        }
    }

    #[test]
    fn stand_in_points() {
        let p = stand_in_test_points();
        assert_eq!(p.len(), 14);
        let outside = p.iter().filter(|q| q[0].hypot(q[1]) > 2.0).count();
        assert_eq!(outside, 3);
    }
}
