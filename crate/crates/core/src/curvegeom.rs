//! Space curves whose unit tangent is the spin field, and their closure
//! through a large arc.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::grid_field::{to_unit_vectors, SpinField};
use crate::{Error, Result, Vec3};

/// Tolerance on `|t - z|` for the end tangents of a curve to be closed.
pub const CLOSURE_TANGENT_TOL: f64 = 1e-3;

/// Default length of the straight extensions, in units of the curve extent.
pub const DEFAULT_RADIUS_FACTOR: f64 = 10.0;

/// Default number of chords on the closing semicircle.
pub const DEFAULT_ARC_SEGMENTS: usize = 512;

/// A polyline with per-vertex unit tangents.
///
/// Closed curves repeat their first vertex at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceCurve {
    /// Parameter (arc length) at each vertex.
    pub s: Vec<f64>,
    pub points: Vec<Vec3>,
    pub tangents: Vec<Vec3>,
    pub closed: bool,
    /// Spacing of the originating grid, when there is one.
    pub h: Option<f64>,
}

/// Metadata written next to a curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSidecar {
    pub closed: bool,
    pub vertices: usize,
    pub h: Option<f64>,
    pub radius_factor: Option<f64>,
}

impl SpaceCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn extent(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &self.points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    pub fn total_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Applies `f` to every point; tangents are transformed by `g`.
    pub fn map(&self, f: impl Fn(&Vec3) -> Vec3, g: impl Fn(&Vec3) -> Vec3) -> SpaceCurve {
        SpaceCurve {
            s: self.s.clone(),
            points: self.points.iter().map(f).collect(),
            tangents: self.tangents.iter().map(g).collect(),
            closed: self.closed,
            h: self.h,
        }
    }

    /// CSV with header `s,x,y,z,tx,ty,tz`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "s,x,y,z,tx,ty,tz")?;
        for ((s, p), t) in self.s.iter().zip(&self.points).zip(&self.tangents) {
            writeln!(out, "{},{},{},{},{},{},{}", s, p.x, p.y, p.z, t.x, t.y, t.z)?;
        }
        Ok(())
    }

    pub fn sidecar(&self, radius_factor: Option<f64>) -> CurveSidecar {
        CurveSidecar {
            closed: self.closed,
            vertices: self.len(),
            h: self.h,
            radius_factor,
        }
    }

    /// Reads a curve written by [`SpaceCurve::write_csv`]; `closed` comes from
    /// the sidecar.
    pub fn read_csv(path: &Path, closed: bool, h: Option<f64>) -> Result<SpaceCurve> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        match lines.next() {
            Some("s,x,y,z,tx,ty,tz") => {}
            other => {
                return Err(Error::DegenerateCurve(format!(
                    "unexpected CSV header {other:?}"
                )))
            }
        }
        let mut curve = SpaceCurve {
            s: vec![],
            points: vec![],
            tangents: vec![],
            closed,
            h,
        };
        for (lineno, line) in lines.enumerate() {
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse).collect();
            let vals = vals
                .ok()
                .filter(|v| v.len() == 7)
                .ok_or_else(|| Error::DegenerateCurve(format!("bad CSV row {}", lineno + 2)))?;
            curve.s.push(vals[0]);
            curve.points.push(Vec3::new(vals[1], vals[2], vals[3]));
            curve.tangents.push(Vec3::new(vals[4], vals[5], vals[6]));
        }
        Ok(curve)
    }
}

/// Rebuilds `r(s)` from the tangent field, starting at the origin.
///
/// Each step advances by `h` along the normalized mean of the two end
/// tangents, which is second order in `h` and exact on straight runs.
pub fn integrate_tangent(field: &SpinField) -> SpaceCurve {
    let tangents = to_unit_vectors(field);
    let h = field.h();
    let mut points = Vec::with_capacity(tangents.len());
    let mut r = Vec3::zeros();
    points.push(r);
    for w in tangents.windows(2) {
        let mid = w[0] + w[1];
        let norm = mid.norm();
        let dir = if norm > 1e-12 { mid / norm } else { w[0] };
        r += h * dir;
        points.push(r);
    }
    SpaceCurve {
        s: field.grid.nodes(),
        points,
        tangents,
        closed: false,
        h: Some(h),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureOptions {
    /// Extension length in units of the curve extent.
    pub radius_factor: f64,
    /// Chords on the semicircle.
    pub arc_segments: usize,
    pub tangent_tol: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            radius_factor: DEFAULT_RADIUS_FACTOR,
            arc_segments: DEFAULT_ARC_SEGMENTS,
            tangent_tol: CLOSURE_TANGENT_TOL,
        }
    }
}

pub fn close_at_infinity(curve: &SpaceCurve, radius_factor: f64) -> Result<SpaceCurve> {
    close_at_infinity_with(
        curve,
        &ClosureOptions {
            radius_factor,
            ..Default::default()
        },
    )
}

/// Closes an open curve whose ends point along `+z`.
///
/// Both ends are pushed out along the axis by `radius_factor * extent` and
/// the far ends are joined by a semicircle. The semicircle lies in the
/// vertical plane through the ends' horizontal offset, so the whole closure
/// is planar and only bends in-plane relative to the closure of a straight
/// line.
pub fn close_at_infinity_with(curve: &SpaceCurve, opts: &ClosureOptions) -> Result<SpaceCurve> {
    if curve.closed {
        return Err(Error::AlreadyClosed);
    }
    if curve.len() < 3 {
        return Err(Error::DegenerateCurve("need at least 3 vertices".into()));
    }
    if !(opts.radius_factor > 0.0 && opts.radius_factor.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "radius_factor",
            reason: format!("{} must be positive", opts.radius_factor),
        });
    }
    if opts.arc_segments < 2 {
        return Err(Error::InvalidParameter {
            name: "arc_segments",
            reason: "need at least 2 chords".into(),
        });
    }
    let z = Vec3::z();
    let first_t = curve.tangents[0];
    let last_t = curve.tangents[curve.len() - 1];
    for (which, t) in [("first", first_t), ("last", last_t)] {
        let dev = (t - z).norm();
        if dev > opts.tangent_tol {
            return Err(Error::ClosureUndefined(format!(
                "{which} tangent deviates from +z by {dev:e} (> {:e})",
                opts.tangent_tol
            )));
        }
    }

    let extent = curve.extent();
    if extent <= 0.0 {
        return Err(Error::DegenerateCurve("curve has zero extent".into()));
    }
    let ext = opts.radius_factor * extent;
    let start = curve.points[0];
    let end = curve.points[curve.len() - 1];
    let top = end + ext * z;
    let bottom = start - ext * z;

    let diameter = top - bottom;
    let offset = Vec3::new(diameter.x, diameter.y, 0.0);
    let side = if offset.norm() > 1e-12 * diameter.norm() {
        offset.normalize()
    } else {
        Vec3::x()
    };
    let e1 = diameter.normalize();
    let e2 = (side - side.dot(&e1) * e1).normalize();
    let centre = 0.5 * (top + bottom);
    let radius = 0.5 * diameter.norm();

    let mut points = curve.points.clone();
    let mut s = curve.s.clone();
    let mut tangents = curve.tangents.clone();
    let push = |p: Vec3, points: &mut Vec<Vec3>, s: &mut Vec<f64>| {
        let prev = *points.last().expect("non-empty");
        s.push(s.last().expect("non-empty") + (p - prev).norm());
        points.push(p);
    };

    push(top, &mut points, &mut s);
    let k = opts.arc_segments;
    for j in 1..k {
        let a = std::f64::consts::PI * j as f64 / k as f64;
        let (sa, ca) = a.sin_cos();
        push(centre + radius * (ca * e1 + sa * e2), &mut points, &mut s);
    }
    push(bottom, &mut points, &mut s);
    push(start, &mut points, &mut s);

    // vertex tangents on the closure follow the outgoing chord
    for i in curve.len()..points.len() - 1 {
        tangents.push((points[i + 1] - points[i]).normalize());
    }
    tangents.push(first_t);

    Ok(SpaceCurve {
        s,
        points,
        tangents,
        closed: true,
        h: None,
    })
}

/// Resamples to `m` vertices equally spaced in arc length.
///
/// Points are linearly interpolated along the polyline, end points are kept,
/// and tangents are rebuilt from the neighbouring chords.
pub fn resample(curve: &SpaceCurve, m: usize) -> Result<SpaceCurve> {
    if m < 3 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: format!("{m} < 3"),
        });
    }
    if curve.len() < 2 {
        return Err(Error::DegenerateCurve("need at least 2 vertices".into()));
    }
    let mut cum = Vec::with_capacity(curve.len());
    cum.push(0.0);
    for w in curve.points.windows(2) {
        cum.push(cum.last().copied().unwrap_or(0.0) + (w[1] - w[0]).norm());
    }
    let total = *cum.last().expect("non-empty");
    if total <= 0.0 {
        return Err(Error::DegenerateCurve("zero total length".into()));
    }
    let last = curve.len() - 1;
    let mut points = Vec::with_capacity(m);
    let mut s = Vec::with_capacity(m);
    let mut seg = 0;
    for k in 0..m {
        let target = total * k as f64 / (m - 1) as f64;
        let p = if k == 0 {
            curve.points[0]
        } else if k == m - 1 {
            curve.points[last]
        } else {
            while seg + 1 < last && cum[seg + 1] < target {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let u = if len > 0.0 {
                (target - cum[seg]) / len
            } else {
                0.0
            };
            curve.points[seg] + u * (curve.points[seg + 1] - curve.points[seg])
        };
        points.push(p);
        s.push(curve.s[0] + target);
    }
    let tangents = chord_tangents(&points, curve.closed);
    Ok(SpaceCurve {
        s,
        points,
        tangents,
        closed: curve.closed,
        h: None,
    })
}

fn chord_tangents(points: &[Vec3], closed: bool) -> Vec<Vec3> {
    let n = points.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = match i {
            0 if closed => (points[n - 2], points[1]),
            0 => (points[0], points[1]),
            _ if i == n - 1 && closed => (points[n - 2], points[1]),
            _ if i == n - 1 => (points[n - 2], points[n - 1]),
            _ => (points[i - 1], points[i + 1]),
        };
        let d = b - a;
        let norm = d.norm();
        out.push(if norm > 0.0 { d / norm } else { Vec3::z() });
    }
    out
}
