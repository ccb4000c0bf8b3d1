//! Landau-Lifshitz evolution `n_t = n x n_ss` and conservation monitoring.
//!
//! Time stepping happens on the Cartesian unit vectors with the two end
//! nodes pinned, followed by pointwise renormalization. Angles are
//! re-extracted after every step with `phi` unwrapped against its previous
//! value at the same node, so windings survive.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::grid_field::{angles_near, to_unit_vectors, SpinField};
use crate::observables::Observables;
use crate::{Error, Result, Vec3};

/// Explicit schemes are rejected above `dt = CFL_LIMIT * h^2`.
pub const CFL_LIMIT: f64 = 0.5;

/// Denominator floor of the relative drifts.
pub const DRIFT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rk4Renorm,
    HeunRenorm,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rk4Renorm => "rk4_renorm",
            Scheme::HeunRenorm => "heun_renorm",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4_renorm" => Ok(Scheme::Rk4Renorm),
            "heun_renorm" => Ok(Scheme::HeunRenorm),
            other => Err(Error::InvalidParameter {
                name: "scheme",
                reason: format!("unknown scheme `{other}` (rk4_renorm | heun_renorm)"),
            }),
        }
    }
}

/// `n x n_ss` with centered second differences; zero on the pinned ends.
fn rhs(n: &[Vec3], h: f64, out: &mut [Vec3]) {
    let len = n.len();
    let inv_h2 = 1.0 / (h * h);
    out[0] = Vec3::zeros();
    out[len - 1] = Vec3::zeros();
    for i in 1..len - 1 {
        let lap = (n[i + 1] - 2.0 * n[i] + n[i - 1]) * inv_h2;
        out[i] = n[i].cross(&lap);
    }
}

pub fn ll_rhs(field: &SpinField) -> Vec<Vec3> {
    let n = to_unit_vectors(field);
    let mut out = vec![Vec3::zeros(); n.len()];
    rhs(&n, field.h(), &mut out);
    out
}

/// Scratch space for one trajectory.
struct Stepper {
    h: f64,
    k: [Vec<Vec3>; 4],
    tmp: Vec<Vec3>,
}

impl Stepper {
    fn new(len: usize, h: f64) -> Self {
        let z = vec![Vec3::zeros(); len];
        Stepper {
            h,
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    fn advance(&mut self, n: &mut [Vec3], dt: f64, scheme: Scheme) {
        let h = self.h;
        let len = n.len();
        match scheme {
            Scheme::Rk4Renorm => {
                let [k1, k2, k3, k4] = &mut self.k;
                rhs(n, h, k1);
                for i in 0..len {
                    self.tmp[i] = n[i] + 0.5 * dt * k1[i];
                }
                rhs(&self.tmp, h, k2);
                for i in 0..len {
                    self.tmp[i] = n[i] + 0.5 * dt * k2[i];
                }
                rhs(&self.tmp, h, k3);
                for i in 0..len {
                    self.tmp[i] = n[i] + dt * k3[i];
                }
                rhs(&self.tmp, h, k4);
                for i in 0..len {
                    n[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            Scheme::HeunRenorm => {
                let [k1, k2, ..] = &mut self.k;
                rhs(n, h, k1);
                for i in 0..len {
                    self.tmp[i] = n[i] + dt * k1[i];
                }
                rhs(&self.tmp, h, k2);
                for i in 0..len {
                    n[i] += 0.5 * dt * (k1[i] + k2[i]);
                }
            }
        }
        for v in n.iter_mut() {
            *v /= v.norm();
        }
    }
}

fn check_dt(field: &SpinField, dt: f64) -> Result<()> {
    let limit = CFL_LIMIT * field.h() * field.h();
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("{dt} must be positive"),
        });
    }
    if dt > limit {
        return Err(Error::TimeStepTooLarge { dt, limit });
    }
    Ok(())
}

/// Angles from Cartesian spins. `phi` is unwrapped along the grid from the
/// pinned first node, so neighbours never differ by more than pi.
fn reextract(n: &[Vec3], field: &mut SpinField) -> bool {
    for (i, v) in n.iter().enumerate() {
        if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
            return false;
        }
        let hint = if i == 0 {
            field.phi[0]
        } else {
            field.phi[i - 1]
        };
        let (t, p) = angles_near(v, hint);
        field.theta[i] = t;
        field.phi[i] = p;
    }
    true
}

/// One explicit step followed by renormalization.
pub fn step(field: &SpinField, dt: f64, scheme: Scheme) -> Result<SpinField> {
    check_dt(field, dt)?;
    let mut n = to_unit_vectors(field);
    let mut stepper = Stepper::new(n.len(), field.h());
    stepper.advance(&mut n, dt, scheme);
    let mut out = field.clone();
    if !reextract(&n, &mut out) {
        return Err(Error::NumericalBlowUp { t_last: 0.0 });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub times: Vec<f64>,
    pub observables: Vec<Observables>,
    pub dt: f64,
    pub scheme: Scheme,
    /// State at the last recorded time.
    #[serde(skip)]
    pub final_field: Option<SpinField>,
}

impl DynamicsTrace {
    /// CSV with header `t,H,P,M,Wr`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,H,P,M,Wr")?;
        for (t, o) in self.times.iter().zip(&self.observables) {
            writeln!(
                out,
                "{},{},{},{},{}",
                t, o.energy, o.momentum, o.magnetization, o.writhe
            )?;
        }
        Ok(())
    }
}

/// Integrates to `t_end`, recording observables (with `J = 1`) at `t = 0`,
/// every `record_every` steps, and at `t_end`. The last step is shortened
/// to land on `t_end` exactly.
pub fn evolve(
    field: &SpinField,
    t_end: f64,
    dt: f64,
    record_every: usize,
    scheme: Scheme,
) -> Result<DynamicsTrace> {
    check_dt(field, dt)?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("{t_end} must be finite and non-negative"),
        });
    }
    if record_every == 0 {
        return Err(Error::InvalidParameter {
            name: "record_every",
            reason: "must be >= 1".into(),
        });
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut state = field.clone();
    let mut n = to_unit_vectors(field);
    let mut stepper = Stepper::new(n.len(), field.h());
    let mut times = vec![0.0];
    let mut observables = vec![Observables::measure(field, 1.0)?];
    let mut t = 0.0;
    for k in 1..=steps {
        let t_next = if k == steps { t_end } else { k as f64 * dt };
        stepper.advance(&mut n, t_next - t, scheme);
        if !reextract(&n, &mut state) {
            return Err(Error::NumericalBlowUp { t_last: t });
        }
        t = t_next;
        if k % record_every == 0 || k == steps {
            let obs = Observables::measure(&state, 1.0)?;
            if ![obs.energy, obs.momentum, obs.magnetization]
                .iter()
                .all(|v| v.is_finite())
            {
                return Err(Error::NumericalBlowUp {
                    t_last: *times.last().unwrap_or(&0.0),
                });
            }
            times.push(t);
            observables.push(obs);
        }
    }
    Ok(DynamicsTrace {
        times,
        observables,
        dt,
        scheme,
        final_field: Some(state),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub rel_drift_h: f64,
    pub rel_drift_p: f64,
    pub rel_drift_m: f64,
    pub rel_drift_wr: f64,
}

pub fn drift_report(trace: &DynamicsTrace) -> Result<DriftReport> {
    let obs = &trace.observables;
    if obs.len() < 2 {
        return Err(Error::ShortTrace(obs.len()));
    }
    let drift = |q: &dyn Fn(&Observables) -> f64| {
        let q0 = q(&obs[0]);
        let scale = q0.abs().max(DRIFT_FLOOR);
        obs.iter()
            .map(|o| (q(o) - q0).abs() / scale)
            .fold(0.0, f64::max)
    };
    Ok(DriftReport {
        rel_drift_h: drift(&|o| o.energy),
        rel_drift_p: drift(&|o| o.momentum),
        rel_drift_m: drift(&|o| o.magnetization),
        rel_drift_wr: drift(&|o| o.writhe),
    })
}
