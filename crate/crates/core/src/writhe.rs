//! Writhe estimators.
//!
//! * [`writhe_gauss`]: the Gauss double integral on a polyline, evaluated
//!   exactly segment pair by segment pair as the signed area of the pair's
//!   Gauss-map quadrilateral.
//! * [`writhe_fuller`]: the local integral relative to a reference field.
//! * [`writhe_angular`]: `(1/2pi) integral (1 - cos theta) phi_s`, the
//!   reduction of the local integral when the reference is the straight line.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvegeom::{close_at_infinity, integrate_tangent, SpaceCurve};
use crate::grid_field::{to_unit_vectors, SpinField};
use crate::observables::momentum_density;
use crate::quad::{centered_diff, trapezoid, Neumaier};
use crate::{Error, Result, Vec3};

/// Default guard on `1 + n0.n` for the local formula.
pub const DEFAULT_DELTA_FULLER: f64 = 1e-6;

/// Signed solid angle of the spherical triangle spanned by three directions
/// (Van Oosterom-Strackee).
#[inline]
fn triangle_solid_angle(a: &Vec3, b: &Vec3, c: &Vec3, la: f64, lb: f64, lc: f64) -> f64 {
    let num = a.dot(&b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * num.atan2(den)
}

/// Signed solid angle swept by the unit chord between segment `p1 -> p2`
/// and segment `p3 -> p4`, oriented so that summing over ordered pairs and
/// dividing by `4 pi` gives the Gauss writhe.
pub fn segment_pair_solid_angle(p1: &Vec3, p2: &Vec3, p3: &Vec3, p4: &Vec3) -> f64 {
    let a = p3 - p1;
    let b = p4 - p1;
    let c = p4 - p2;
    let d = p3 - p2;
    let (la, lb, lc, ld) = (a.norm(), b.norm(), c.norm(), d.norm());
    // the image is the geodesic quadrilateral a -> d -> c -> b
    let omega =
        triangle_solid_angle(&a, &d, &c, la, ld, lc) + triangle_solid_angle(&a, &c, &b, la, lc, lb);
    // a single pair covers less than a hemisphere; fold the fan ambiguity
    omega - 2.0 * TAU * (omega / (2.0 * TAU)).round()
}

/// Segments of a polyline and which pairs are adjacent.
struct Segments<'a> {
    points: &'a [Vec3],
    closed: bool,
}

impl<'a> Segments<'a> {
    fn new(curve: &'a SpaceCurve) -> Result<Self> {
        if curve.len() < 4 {
            return Err(Error::DegenerateCurve(format!(
                "writhe needs at least 4 vertices, got {}",
                curve.len()
            )));
        }
        let scale = curve.extent().max(f64::MIN_POSITIVE);
        for (i, w) in curve.points.windows(2).enumerate() {
            let len = (w[1] - w[0]).norm();
            if len.is_nan() || len <= 1e-14 * scale {
                return Err(Error::DegenerateCurve(format!(
                    "segment {i} has zero length"
                )));
            }
        }
        if curve.closed {
            let gap = (curve.points[0] - curve.points[curve.len() - 1]).norm();
            if gap > 1e-9 * scale {
                return Err(Error::DegenerateCurve(format!(
                    "closed curve does not return to its start (gap {gap:e})"
                )));
            }
        }
        Ok(Segments {
            points: &curve.points,
            closed: curve.closed,
        })
    }

    fn count(&self) -> usize {
        self.points.len() - 1
    }

    /// Sum of pair contributions with `j > i + 1`, compensated, in `j` order.
    fn row(&self, i: usize) -> f64 {
        let m = self.count();
        let p1 = &self.points[i];
        let p2 = &self.points[i + 1];
        let end = if self.closed && i == 0 { m - 1 } else { m };
        let mut acc = Neumaier::default();
        for j in i + 2..end {
            acc.add(segment_pair_solid_angle(
                p1,
                p2,
                &self.points[j],
                &self.points[j + 1],
            ));
        }
        acc.total()
    }

    fn combine(rows: &[f64]) -> f64 {
        let mut acc = Neumaier::default();
        for &r in rows {
            acc.add(r);
        }
        // ordered pairs count every unordered pair twice
        acc.total() / TAU
    }
}

/// Gauss writhe of a polyline on the current rayon pool.
///
/// Rows of the pair matrix are summed independently and then combined in
/// row order, so the result does not depend on the number of threads.
/// For open curves the value depends on how the ends would be closed.
pub fn writhe_gauss(curve: &SpaceCurve) -> Result<f64> {
    let segs = Segments::new(curve)?;
    let rows: Vec<f64> = (0..segs.count())
        .into_par_iter()
        .map(|i| segs.row(i))
        .collect();
    Ok(Segments::combine(&rows))
}

/// Single-threaded evaluation of [`writhe_gauss`]; bitwise identical.
pub fn writhe_gauss_serial(curve: &SpaceCurve) -> Result<f64> {
    let segs = Segments::new(curve)?;
    let rows: Vec<f64> = (0..segs.count()).map(|i| segs.row(i)).collect();
    Ok(Segments::combine(&rows))
}

/// Gauss writhe evaluated inside the given pool.
pub fn writhe_gauss_in(pool: &rayon::ThreadPool, curve: &SpaceCurve) -> Result<f64> {
    pool.install(|| writhe_gauss(curve))
}

/// `(1/2pi) integral (1 - cos theta) phi_s`.
pub fn writhe_angular(field: &SpinField) -> f64 {
    trapezoid(&momentum_density(field), field.h()) / TAU
}

/// Tangent-space derivative `dn/ds` by the chain rule on centered
/// differences of `theta` and `phi`.
fn tangent_derivative(field: &SpinField) -> Vec<Vec3> {
    let h = field.h();
    let ts = centered_diff(&field.theta, h);
    let ps = centered_diff(&field.phi, h);
    field
        .theta
        .iter()
        .zip(&field.phi)
        .zip(ts.iter().zip(&ps))
        .map(|((&t, &p), (&dt, &dp))| {
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            Vec3::new(
                dt * ct * cp - dp * st * sp,
                dt * ct * sp + dp * st * cp,
                -dt * st,
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullerValidity {
    pub ok: bool,
    /// Minimum of `1 + n0.n` over the grid.
    pub min_denominator: f64,
    pub min_index: usize,
    pub min_s: f64,
}

fn check_same_grid(a: &SpinField, b: &SpinField) -> Result<()> {
    if a.grid == b.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

pub fn fuller_validity_check(
    field: &SpinField,
    reference: &SpinField,
    delta: f64,
) -> Result<FullerValidity> {
    check_same_grid(field, reference)?;
    let n = to_unit_vectors(field);
    let n0 = to_unit_vectors(reference);
    let (min_index, min_denominator) = n
        .iter()
        .zip(&n0)
        .map(|(a, b)| 1.0 + a.dot(b))
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, d)| if d < best.1 { (i, d) } else { best },
        );
    Ok(FullerValidity {
        ok: min_denominator > delta,
        min_denominator,
        min_index,
        min_s: field.grid.s(min_index),
    })
}

/// Writhe relative to a reference field via the local integral
/// `Wr0 + (1/2pi) integral (n0 x n).(n0 + n)_s / (1 + n0.n)`.
///
/// `Wr0` is the reference's own angular writhe, which is zero for the
/// ground state.
pub fn writhe_fuller(field: &SpinField, reference: &SpinField) -> Result<f64> {
    writhe_fuller_with(field, reference, DEFAULT_DELTA_FULLER)
}

pub fn writhe_fuller_with(field: &SpinField, reference: &SpinField, delta: f64) -> Result<f64> {
    let validity = fuller_validity_check(field, reference, delta)?;
    if !validity.ok {
        return Err(Error::FullerHypothesis {
            index: validity.min_index,
            s: validity.min_s,
            denominator: validity.min_denominator,
            delta,
        });
    }
    let n = to_unit_vectors(field);
    let n0 = to_unit_vectors(reference);
    let dn = tangent_derivative(field);
    let dn0 = tangent_derivative(reference);
    let density: Vec<f64> = (0..n.len())
        .map(|i| n0[i].cross(&n[i]).dot(&(dn0[i] + dn[i])) / (1.0 + n0[i].dot(&n[i])))
        .collect();
    let base = if reference.theta.iter().all(|&t| t == 0.0) {
        0.0
    } else {
        writhe_angular(reference)
    };
    Ok(base + trapezoid(&density, field.h()) / TAU)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WritheMethod {
    Gauss,
    Fuller,
    Angular,
    All,
}

impl WritheMethod {
    fn wants(self, m: WritheMethod) -> bool {
        self == WritheMethod::All || self == m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WritheReport {
    pub gauss: Option<f64>,
    pub fuller: Option<f64>,
    pub angular: Option<f64>,
    pub fuller_hypothesis_ok: bool,
    /// Vertices of the closed curve used by the Gauss estimator.
    pub n_used: usize,
}

/// Runs the selected estimators; the Gauss estimator works on the closure
/// of the reconstructed curve, the local one against the ground state.
pub fn measure_writhe(
    field: &SpinField,
    method: WritheMethod,
    radius_factor: f64,
) -> Result<WritheReport> {
    let ground = crate::grid_field::ground_state(field.grid);
    let validity = fuller_validity_check(field, &ground, DEFAULT_DELTA_FULLER)?;
    let mut report = WritheReport {
        gauss: None,
        fuller: None,
        angular: None,
        fuller_hypothesis_ok: validity.ok,
        n_used: 0,
    };
    if method.wants(WritheMethod::Angular) {
        report.angular = Some(writhe_angular(field));
    }
    if method.wants(WritheMethod::Fuller) && validity.ok {
        report.fuller = Some(writhe_fuller(field, &ground)?);
    }
    if method.wants(WritheMethod::Gauss) {
        let closed = close_at_infinity(&integrate_tangent(field), radius_factor)?;
        report.n_used = closed.len();
        report.gauss = Some(writhe_gauss(&closed)?);
    }
    Ok(report)
}

/// Closed `(p, q)` torus knot with `m` vertices, used by the benchmark and
/// tests.
pub fn torus_knot(p: u32, q: u32, m: usize, big_r: f64, small_r: f64) -> SpaceCurve {
    let mut points: Vec<Vec3> = (0..m)
        .map(|k| {
            let t = TAU * k as f64 / m as f64;
            let r = big_r + small_r * (q as f64 * t).cos();
            Vec3::new(
                r * (p as f64 * t).cos(),
                r * (p as f64 * t).sin(),
                small_r * (q as f64 * t).sin(),
            )
        })
        .collect();
    points.push(points[0]);
    closed_from_points(points)
}

/// Closed coil winding twelve times around a torus, `m` vertices.
pub fn helical_closure(m: usize) -> SpaceCurve {
    torus_knot(1, 12, m, 4.0, 1.0)
}

pub(crate) fn closed_from_points(points: Vec<Vec3>) -> SpaceCurve {
    let n = points.len();
    let mut s = Vec::with_capacity(n);
    let mut acc = 0.0;
    s.push(0.0);
    for w in points.windows(2) {
        acc += (w[1] - w[0]).norm();
        s.push(acc);
    }
    let tangents = (0..n)
        .map(|i| {
            let (a, b) = if i == 0 || i == n - 1 {
                (points[n - 2], points[1])
            } else {
                (points[i - 1], points[i + 1])
            };
            (b - a).normalize()
        })
        .collect();
    SpaceCurve {
        s,
        points,
        tangents,
        closed: true,
        h: None,
    }
}
