//! Shared stencils and quadrature on a uniform grid.
//!
//! Every integral in the crate goes through [`trapezoid`] and every first
//! derivative through [`centered_diff`], so discrete identities between
//! observables hold to rounding rather than only in the continuum limit.

/// First derivative: centered differences inside, second-order one-sided at
/// the two ends. Requires `values.len() >= 3`.
pub(crate) fn centered_diff(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 3);
    let mut out = vec![0.0; n];
    let inv2h = 0.5 / h;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) * inv2h;
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv2h;
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv2h;
    out
}

/// Composite trapezoid rule with compensated summation.
pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = Neumaier::default();
    acc.add(0.5 * values[0]);
    for &v in &values[1..n - 1] {
        acc.add(v);
    }
    acc.add(0.5 * values[n - 1]);
    h * acc.total()
}

/// Trapezoid weights, `h/2` at the ends and `h` inside.
pub(crate) fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Wraps an angle into `(-pi, pi]`.
#[inline]
pub(crate) fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}
