//! Homotopies between spin fields and the writhe jumps along them.
//!
//! Writhe changes continuously while a curve deforms without touching
//! itself; each strand passage shifts it by exactly two. Counting those
//! quantized steps along a path separates configurations that are not
//! smoothly connected to each other without crossings.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvegeom::{close_at_infinity, integrate_tangent, DEFAULT_RADIUS_FACTOR};
use crate::grid_field::{to_unit_vectors, SpinField, DEFAULT_EPS_BC};
use crate::quad::wrap_angle;
use crate::writhe::{writhe_angular, writhe_gauss_serial};
use crate::{Error, Result, Vec3};

/// Nominal writhe step across a self-crossing.
pub const CROSSING_JUMP: f64 = 2.0;

pub const DEFAULT_JUMP_TOL: f64 = 0.1;

/// Largest step between samples still treated as continuous.
pub const CONTINUITY_TOL: f64 = 0.2;

/// `1 + a.b` below this is handled by the antipodal tie-break.
const ANTIPODAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyPath {
    pub lambdas: Vec<f64>,
    pub fields: Vec<SpinField>,
}

/// Great-circle interpolation between two unit vectors.
///
/// Antipodal pairs rotate about the component of `(1, 0, 0)` orthogonal to
/// `a` (or `(0, 1, 0)` when `a` is along x).
fn slerp(a: &Vec3, b: &Vec3, t: f64) -> Vec3 {
    let cos = a.dot(b).clamp(-1.0, 1.0);
    if 1.0 + cos < ANTIPODAL_EPS {
        let mut axis = Vec3::x() - a.x * a;
        if axis.norm() < 1e-6 {
            axis = Vec3::y() - a.y * a;
        }
        let axis = axis.normalize();
        let (s, c) = (t * PI).sin_cos();
        // Rodrigues with axis orthogonal to a
        return c * a + s * axis.cross(a);
    }
    let omega = cos.acos();
    if omega < 1e-12 {
        return (a + t * (b - a)).normalize();
    }
    let so = omega.sin();
    let v = ((1.0 - t) * omega).sin() / so * a + (t * omega).sin() / so * b;
    v.normalize()
}

/// Angles of a vector field with `phi` continuous along the grid and shifted
/// by a whole number of turns to stay close to `anchor` at the first node.
fn angles_continuous(vectors: &[Vec3], anchor: f64) -> (Vec<f64>, Vec<f64>) {
    let mut theta = Vec::with_capacity(vectors.len());
    let mut phi = Vec::with_capacity(vectors.len());
    let mut prev = anchor;
    for v in vectors {
        let rho = v.x.hypot(v.y);
        theta.push(rho.atan2(v.z).clamp(0.0, PI));
        let p = if rho == 0.0 {
            prev
        } else {
            prev + wrap_angle(v.y.atan2(v.x) - prev)
        };
        phi.push(p);
        prev = p;
    }
    let shift = (anchor - phi[0]) / (2.0 * PI);
    let shift = 2.0 * PI * shift.round();
    for p in &mut phi {
        *p += shift;
    }
    (theta, phi)
}

/// `steps` evenly spaced fields from `a` (at 0) to `b` (at 1), both
/// endpoints included verbatim.
pub fn homotopy_path(a: &SpinField, b: &SpinField, steps: usize) -> Result<HomotopyPath> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    if steps < 2 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: format!("{steps} < 2"),
        });
    }
    let na = to_unit_vectors(a);
    let nb = to_unit_vectors(b);
    let lambdas: Vec<f64> = (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect();
    // interior fields decay no worse than the endpoints
    let ends = [
        a.theta[0],
        a.theta[a.len() - 1],
        b.theta[0],
        b.theta[b.len() - 1],
    ];
    let eps_bc = ends.iter().fold(DEFAULT_EPS_BC, |m, t| m.max(*t));
    let mut fields = Vec::with_capacity(steps);
    fields.push(a.clone());
    let mut anchor = a.phi[0];
    for &lam in &lambdas[1..steps - 1] {
        let v: Vec<Vec3> = na.iter().zip(&nb).map(|(x, y)| slerp(x, y, lam)).collect();
        let (theta, phi) = angles_continuous(&v, anchor);
        anchor = phi[0];
        let mut f = SpinField::with_eps_bc(a.grid, theta, phi, eps_bc)?;
        f.meta.insert("lambda".into(), lam.into());
        fields.push(f);
    }
    fields.push(b.clone());
    Ok(HomotopyPath { lambdas, fields })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMethod {
    GaussClosed,
    Angular,
}

impl FromStr for PathMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss_closed" => Ok(PathMethod::GaussClosed),
            "angular" => Ok(PathMethod::Angular),
            other => Err(Error::InvalidParameter {
                name: "method",
                reason: format!("unknown path method `{other}` (gauss_closed | angular)"),
            }),
        }
    }
}

/// Writhe of every field on the path, evaluated in parallel and returned in
/// lambda order.
pub fn writhe_along_path(path: &HomotopyPath, method: PathMethod) -> Result<Vec<f64>> {
    writhe_along_path_with(path, method, DEFAULT_RADIUS_FACTOR)
}

pub fn writhe_along_path_with(
    path: &HomotopyPath,
    method: PathMethod,
    radius_factor: f64,
) -> Result<Vec<f64>> {
    path.fields
        .par_iter()
        .zip(path.lambdas.par_iter())
        .map(|(f, &lambda)| match method {
            PathMethod::Angular => Ok(writhe_angular(f)),
            PathMethod::GaussClosed => {
                let closed =
                    close_at_infinity(&integrate_tangent(f), radius_factor).map_err(|e| {
                        Error::PathClosure {
                            lambda,
                            source: Box::new(e),
                        }
                    })?;
                writhe_gauss_serial(&closed)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub delta_wr: f64,
    pub sign: i8,
}

/// Flags consecutive samples whose writhe differs by `2 +- jump_tol`.
/// Differences beyond `2 + jump_tol` mean the path is under-resolved.
pub fn detect_jumps(series: &[f64], lambdas: &[f64], jump_tol: f64) -> Result<Vec<JumpEvent>> {
    if series.len() != lambdas.len() || series.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: format!(
                "need two equal-length arrays of at least 2 samples, got {} and {}",
                series.len(),
                lambdas.len()
            ),
        });
    }
    if !(jump_tol > 0.0 && jump_tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "jump_tol",
            reason: format!("{jump_tol} not in (0, 1)"),
        });
    }
    let mut events = Vec::new();
    for i in 0..series.len() - 1 {
        let delta = series[i + 1] - series[i];
        if !delta.is_finite() || delta.abs() > CROSSING_JUMP + jump_tol {
            return Err(Error::InsufficientResolution {
                lambda_lo: lambdas[i],
                lambda_hi: lambdas[i + 1],
                delta,
            });
        }
        if delta.abs() >= CROSSING_JUMP - jump_tol {
            events.push(JumpEvent {
                lambda_lo: lambdas[i],
                lambda_hi: lambdas[i + 1],
                delta_wr: delta,
                sign: if delta > 0.0 { 1 } else { -1 },
            });
        }
    }
    Ok(events)
}

/// Number of crossing jumps along the default path from `a` to `b`.
///
/// This depends on the path; it is a diagnostic, not an invariant.
pub fn sector_distance(a: &SpinField, b: &SpinField, steps: usize) -> Result<usize> {
    let path = homotopy_path(a, b, steps)?;
    let series = writhe_along_path(&path, PathMethod::GaussClosed)?;
    Ok(detect_jumps(&series, &path.lambdas, DEFAULT_JUMP_TOL)?.len())
}

/// Largest step between consecutive samples that is not a detected jump.
pub fn max_continuous_gap(series: &[f64], jump_tol: f64) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|d| *d < CROSSING_JUMP - jump_tol)
        .fold(0.0, f64::max)
}
