use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{distance, BeaconArray, Point};
use crate::error::{param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveDims {
    /// Solve x, y and z.
    Full,
    /// Keep the initial z and solve x, y.
    Planar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop once the residual norm improves by less than this (s).
    pub residual_tolerance: f64,
    /// Stop once the step is shorter than this (m).
    pub step_tolerance: f64,
    pub max_halvings: usize,
    pub dims: SolveDims,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            residual_tolerance: 1e-12,
            step_tolerance: 1e-9,
            max_halvings: 10,
            dims: SolveDims::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionFix {
    pub position: Point,
    pub iterations: usize,
    /// Euclidean norm of the DTOA residual (s).
    pub residual: f64,
    pub converged: bool,
}

/// Least-squares problem `min Σ_j (dtoa_j − (|x − b_j| − |x − b_ref|)/c)²`.
#[derive(Debug, Clone)]
pub struct DtoaProblem<'a> {
    beacons: &'a BeaconArray,
    reference: usize,
    dtoa: Vec<(usize, f64)>,
    c: f64,
}

impl<'a> DtoaProblem<'a> {
    pub fn new(
        beacons: &'a BeaconArray,
        reference: usize,
        dtoa: &[(usize, f64)],
        c: f64,
    ) -> Result<Self> {
        if !(c > 0.0) {
            return Err(param("sound speed must be positive"));
        }
        if reference >= beacons.len() {
            return Err(param(format!("reference beacon {reference} out of range")));
        }
        let mut seen = vec![false; beacons.len()];
        seen[reference] = true;
        for &(j, v) in dtoa {
            if j >= beacons.len() || seen[j] {
                return Err(param(format!("beacon {j} is out of range or repeated")));
            }
            if !v.is_finite() {
                return Err(param("non-finite time difference"));
            }
            seen[j] = true;
        }
        if dtoa.len() < 3 {
            return Err(Error::InsufficientBeacons {
                valid: dtoa.len() + 1,
                required: 4,
            });
        }
        Ok(Self {
            beacons,
            reference,
            dtoa: dtoa.to_vec(),
            c,
        })
    }

    pub fn residuals(&self, x: &Point) -> DVector<f64> {
        let b = &self.beacons.positions;
        let d_ref = distance(x, &b[self.reference]);
        DVector::from_iterator(
            self.dtoa.len(),
            self.dtoa
                .iter()
                .map(|&(j, t)| t - (distance(x, &b[j]) - d_ref) / self.c),
        )
    }

    /// Analytic Jacobian of [`Self::residuals`] (rows: differences, columns: x, y, z).
    pub fn jacobian(&self, x: &Point) -> DMatrix<f64> {
        let b = &self.beacons.positions;
        let unit = |p: &Point| {
            let d = distance(x, p).max(f64::MIN_POSITIVE);
            [(x[0] - p[0]) / d, (x[1] - p[1]) / d, (x[2] - p[2]) / d]
        };
        let u_ref = unit(&b[self.reference]);
        DMatrix::from_fn(self.dtoa.len(), 3, |r, k| {
            let u = unit(&b[self.dtoa[r].0]);
            -(u[k] - u_ref[k]) / self.c
        })
    }

    fn cost(&self, x: &Point) -> f64 {
        self.residuals(x).norm()
    }
}

/// Gauss-Newton with step halving, started from `initial`.
///
/// Returns the best iterate even when the iteration budget runs out; the
/// fix is then flagged as not converged.
pub fn solve_position(
    beacons: &BeaconArray,
    reference: usize,
    dtoa: &[(usize, f64)],
    c: f64,
    initial: Point,
    opts: &SolverOptions,
) -> Result<PositionFix> {
    let problem = DtoaProblem::new(beacons, reference, dtoa, c)?;
    let cols: &[usize] = match opts.dims {
        SolveDims::Full => &[0, 1, 2],
        SolveDims::Planar => &[0, 1],
    };
    let mut x = initial;
    let mut cost = problem.cost(&x);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        // work in metres so the normal equations are well scaled
        let r = problem.residuals(&x) * c;
        let j_full = problem.jacobian(&x) * c;
        let j = j_full.select_columns(cols.iter());
        let svd = j.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smax > 0.0) || smin <= smax * 1e-10 {
            return Err(Error::RankDeficient(format!(
                "Jacobian singular values {:?} at {:?}",
                svd.singular_values.as_slice(),
                x
            )));
        }
        let step = svd
            .solve(&(-&r), 0.0)
            .map_err(|e| Error::RankDeficient(e.to_string()))?;

        let apply = |delta: &DVector<f64>| {
            let mut cand = x;
            for (k, &col) in cols.iter().enumerate() {
                cand[col] += delta[k];
            }
            if opts.dims == SolveDims::Full {
                cand = same_side(beacons, cand, &initial);
            }
            (cand, problem.cost(&cand))
        };
        let mut accepted = None;
        let mut scale = 1.0;
        for _ in 0..=opts.max_halvings {
            let (cand, c_new) = apply(&(&step * scale));
            if c_new <= cost {
                accepted = Some((cand, c_new, scale * step.norm()));
                break;
            }
            scale *= 0.5;
        }
        if accepted.is_none() {
            // near-singular directions make the Gauss-Newton step useless;
            // damped steps bend towards the gradient instead
            let jtj = j.transpose() * &j;
            let g = j.transpose() * &r;
            let mut lambda = 1e-6 * smax * smax;
            for _ in 0..12 {
                let damped = &jtj + DMatrix::identity(cols.len(), cols.len()) * lambda;
                if let Some(delta) = damped.cholesky().map(|ch| ch.solve(&(-&g))) {
                    let (cand, c_new) = apply(&delta);
                    if c_new < cost {
                        accepted = Some((cand, c_new, delta.norm()));
                        break;
                    }
                }
                lambda *= 10.0;
            }
        }
        let Some((cand, c_new, step_len)) = accepted else {
            // no descent along the Gauss-Newton direction: a stationary point
            converged = step.norm() < opts.step_tolerance || cost < opts.residual_tolerance;
            break;
        };
        let improvement = cost - c_new;
        x = cand;
        cost = c_new;
        if improvement < opts.residual_tolerance || step_len < opts.step_tolerance {
            converged = true;
            break;
        }
    }
    if opts.dims == SolveDims::Full {
        x = same_side(beacons, x, &initial);
    }
    Ok(PositionFix {
        position: x,
        iterations,
        residual: cost,
        converged,
    })
}

/// A coplanar array cannot tell a point from its mirror image across the
/// beacon plane. The fix is reflected onto the side of `initial`.
fn same_side(beacons: &BeaconArray, x: Point, initial: &Point) -> Point {
    let Some((c, n)) = beacons.plane() else {
        return x;
    };
    let side = |p: &Point| (0..3).map(|k| (p[k] - c[k]) * n[k]).sum::<f64>();
    let (sx, si) = (side(&x), side(initial));
    if sx * si < 0.0 {
        [
            x[0] - 2.0 * sx * n[0],
            x[1] - 2.0 * sx * n[1],
            x[2] - 2.0 * sx * n[2],
        ]
    } else {
        x
    }
}
