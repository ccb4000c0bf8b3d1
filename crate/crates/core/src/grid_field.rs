//! Spin fields on a truncated line with homogeneous boundary conditions.
//!
//! A [`SpinField`] samples the polar angle `theta` and the azimuth `phi` of a
//! unit spin `n = (sin t cos p, sin t sin p, cos t)` on a uniform [`Grid`].
//! `phi` is stored unwrapped so that the total winding survives, and the
//! field must decay to the ground state `theta = 0` at both ends.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result, Vec3};

/// Default tolerance on `theta` at the two ends of the grid.
pub const DEFAULT_EPS_BC: f64 = 1e-6;

/// Minimum number of grid nodes.
pub const MIN_NODES: usize = 8;

/// Margin kept between the random generator's `theta` and the south pole.
const RANDOM_THETA_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub s_min: f64,
    pub s_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(s_min: f64, s_max: f64, n: usize) -> Result<Self> {
        let grid = Grid { s_min, s_max, n };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_min.is_finite() && self.s_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if self.s_min >= self.s_max {
            return Err(Error::InvalidGrid(format!(
                "s_min = {} must be below s_max = {}",
                self.s_min, self.s_max
            )));
        }
        if self.n < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Uniform spacing.
    #[inline]
    pub fn h(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn s(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.s(i)).collect()
    }

    pub fn length(&self) -> f64 {
        self.s_max - self.s_min
    }
}

/// A sampled spin configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinField {
    pub grid: Grid,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Free-form provenance.
    #[serde(default)]
    pub meta: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    grid: Grid,
    theta: Vec<f64>,
    phi: Vec<f64>,
    #[serde(default)]
    meta: Map<String, Value>,
}

impl<'de> Deserialize<'de> for SpinField {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawField::deserialize(deserializer)?;
        let mut field =
            SpinField::new(raw.grid, raw.theta, raw.phi).map_err(serde::de::Error::custom)?;
        field.meta = raw.meta;
        Ok(field)
    }
}

impl SpinField {
    /// Builds a field and checks every invariant with the default boundary
    /// tolerance.
    pub fn new(grid: Grid, theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        Self::with_eps_bc(grid, theta, phi, DEFAULT_EPS_BC)
    }

    pub fn with_eps_bc(grid: Grid, theta: Vec<f64>, phi: Vec<f64>, eps_bc: f64) -> Result<Self> {
        grid.validate()?;
        if theta.len() != grid.n || phi.len() != grid.n {
            return Err(Error::InvalidField(format!(
                "array lengths ({}, {}) differ from grid size {}",
                theta.len(),
                phi.len(),
                grid.n
            )));
        }
        if let Some(i) = theta.iter().chain(&phi).position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite entry at flat index {i}"
            )));
        }
        if let Some((i, t)) = theta
            .iter()
            .enumerate()
            .find(|(_, t)| !(0.0..=PI).contains(*t))
        {
            return Err(Error::InvalidField(format!(
                "theta[{i}] = {t} outside [0, pi]"
            )));
        }
        let field = SpinField {
            grid,
            theta,
            phi,
            meta: Map::new(),
        };
        field.check_boundary(eps_bc)?;
        Ok(field)
    }

    /// Checks the homogeneous boundary condition `theta(ends) <= eps_bc`.
    pub fn check_boundary(&self, eps_bc: f64) -> Result<()> {
        let first = self.theta[0];
        let last = self.theta[self.grid.n - 1];
        if first > eps_bc {
            return Err(Error::BoundaryDecay {
                end: "lower",
                theta: first,
                eps: eps_bc,
            });
        }
        if last > eps_bc {
            return Err(Error::BoundaryDecay {
                end: "upper",
                theta: last,
                eps: eps_bc,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid.n
    }

    pub fn is_empty(&self) -> bool {
        self.grid.n == 0
    }

    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    /// Reflection through the xz-plane, `phi -> -phi`.
    pub fn mirrored(&self) -> SpinField {
        let mut out = self.clone();
        for p in &mut out.phi {
            *p = -*p;
        }
        out
    }

    pub fn with_meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// `theta = 0`, `phi = 0` everywhere.
pub fn ground_state(grid: Grid) -> SpinField {
    let n = grid.n;
    SpinField {
        grid,
        theta: vec![0.0; n],
        phi: vec![0.0; n],
        meta: Map::new(),
    }
    .with_meta("generator", Value::from("ground"))
}

/// Parameters of the localized twist family
/// `theta = theta0 sech((s - s0)/w)`, `phi = dphi (1 + tanh((s - s0)/w_phi))/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistParams {
    pub theta0: f64,
    pub w: f64,
    pub dphi: f64,
    pub w_phi: f64,
    pub s0: f64,
}

impl TwistParams {
    pub fn new(theta0: f64, w: f64, dphi: f64, w_phi: f64, s0: f64) -> Self {
        TwistParams {
            theta0,
            w,
            dphi,
            w_phi,
            s0,
        }
    }

    pub fn theta(&self, s: f64) -> f64 {
        self.theta0 / ((s - self.s0) / self.w).cosh()
    }

    pub fn phi(&self, s: f64) -> f64 {
        0.5 * self.dphi * (1.0 + ((s - self.s0) / self.w_phi).tanh())
    }

    pub fn theta_s(&self, s: f64) -> f64 {
        let x = (s - self.s0) / self.w;
        -self.theta0 / self.w * x.tanh() / x.cosh()
    }

    pub fn phi_s(&self, s: f64) -> f64 {
        let c = ((s - self.s0) / self.w_phi).cosh();
        0.5 * self.dphi / (self.w_phi * c * c)
    }
}

pub fn twist_profile(grid: Grid, p: TwistParams) -> Result<SpinField> {
    grid.validate()?;
    if !(p.theta0 > 0.0 && p.theta0 < PI) {
        return Err(Error::InvalidParameter {
            name: "theta0",
            reason: format!("{} not in (0, pi)", p.theta0),
        });
    }
    for (name, v) in [("w", p.w), ("w_phi", p.w_phi)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("{v} must be positive"),
            });
        }
    }
    if !p.dphi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "dphi",
            reason: "must be finite".into(),
        });
    }
    if !(p.s0 > grid.s_min && p.s0 < grid.s_max) {
        return Err(Error::InvalidParameter {
            name: "s0",
            reason: format!("{} outside ({}, {})", p.s0, grid.s_min, grid.s_max),
        });
    }
    let s = grid.nodes();
    let theta = s.iter().map(|&s| p.theta(s)).collect();
    let phi = s.iter().map(|&s| p.phi(s)).collect();
    let field = SpinField::new(grid, theta, phi)?;
    Ok(field
        .with_meta("generator", Value::from("twist"))
        .with_meta("params", serde_json::to_value(p)?))
}

/// Smooth bump supported on `u in (0.1, 0.9)`, equal to 1 at the centre.
fn envelope(u: f64) -> f64 {
    let x = (u - 0.5) / 0.4;
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Band-limited random configuration.
///
/// `theta = amplitude * bump(u) * (1 + F(u))` with `F` a random Fourier series
/// normalized to `|F| <= 1`, clamped below the south pole; `phi` carries a
/// random winding plus its own Fourier series. The bump vanishes identically
/// near both ends, so the boundary condition holds exactly.
pub fn random_field(grid: Grid, seed: u64, modes: usize, amplitude: f64) -> Result<SpinField> {
    grid.validate()?;
    if modes == 0 {
        return Err(Error::InvalidParameter {
            name: "modes",
            reason: "must be >= 1".into(),
        });
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "amplitude",
            reason: format!("{amplitude} must be finite and non-negative"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = |rng: &mut ChaCha8Rng| -> Vec<(f64, f64)> {
        (0..modes)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    };
    let theta_c = coeffs(&mut rng);
    let phi_c = coeffs(&mut rng);
    let winding: f64 = rng.random_range(-1.0..1.0);

    let theta_norm: f64 = theta_c
        .iter()
        .enumerate()
        .map(|(k, (a, b))| (a.abs() + b.abs()) / (k + 1) as f64)
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let series = |c: &[(f64, f64)], u: f64, decay: bool| -> f64 {
        c.iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let arg = 2.0 * PI * (k + 1) as f64 * u;
                let scale = if decay { 1.0 / (k + 1) as f64 } else { 1.0 };
                scale * (a * arg.cos() + b * arg.sin())
            })
            .sum()
    };

    let len = grid.length();
    let mut theta = Vec::with_capacity(grid.n);
    let mut phi = Vec::with_capacity(grid.n);
    for s in grid.nodes() {
        let u = (s - grid.s_min) / len;
        let f = series(&theta_c, u, true) / theta_norm;
        let raw = amplitude * envelope(u) * (1.0 + f);
        theta.push(raw.clamp(0.0, PI - RANDOM_THETA_MARGIN));
        let p = 2.0 * PI * winding * modes as f64 * u + PI * series(&phi_c, u, true);
        phi.push(amplitude * p);
    }
    let field = SpinField::new(grid, theta, phi)?;
    Ok(field
        .with_meta("generator", Value::from("random"))
        .with_meta("seed", Value::from(seed))
        .with_meta("modes", Value::from(modes))
        .with_meta("amplitude", Value::from(amplitude)))
}

/// Homothety `s -> lambda s`: same samples on the stretched grid.
pub fn rescale(field: &SpinField, lambda: f64) -> Result<SpinField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("{lambda} must be positive"),
        });
    }
    let grid = Grid::new(
        lambda * field.grid.s_min,
        lambda * field.grid.s_max,
        field.grid.n,
    )?;
    let mut out = field.clone();
    out.grid = grid;
    Ok(out)
}

#[inline]
pub(crate) fn unit_vector(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

pub fn to_unit_vectors(field: &SpinField) -> Vec<Vec3> {
    field
        .theta
        .iter()
        .zip(&field.phi)
        .map(|(&t, &p)| unit_vector(t, p))
        .collect()
}

/// Spherical angles of a (not necessarily normalized) vector; `phi` is the
/// representative of `atan2` closest to `phi_hint`. At the poles the hint is
/// kept.
pub(crate) fn angles_near(v: &Vec3, phi_hint: f64) -> (f64, f64) {
    let rho = v.x.hypot(v.y);
    let theta = rho.atan2(v.z);
    if rho == 0.0 {
        return (theta, phi_hint);
    }
    let raw = v.y.atan2(v.x);
    (theta, phi_hint + crate::quad::wrap_angle(raw - phi_hint))
}
