//! Heisenberg spin chains as space curves.
//!
//! A unit spin field `n(s)` on the line is read as the unit tangent of a
//! space curve. This crate reconstructs that curve, measures its writhe in
//! three independent ways (a polygonal Gauss double integral, a local
//! reference-curve integral and the closed angular form), tracks the
//! conserved quantities of the Landau-Lifshitz flow, and scans homotopies for
//! the quantized writhe jumps that mark self-crossings.

pub mod cli;
pub mod curvegeom;
pub mod dynamics;
mod error;
pub mod grid_field;
pub mod observables;
mod quad;
pub mod topology;
pub mod writhe;

pub use curvegeom::{close_at_infinity, integrate_tangent, resample, ClosureOptions, SpaceCurve};
pub use dynamics::{drift_report, evolve, ll_rhs, step, DriftReport, DynamicsTrace, Scheme};
pub use error::{Error, Result};
pub use grid_field::{
    ground_state, random_field, rescale, to_unit_vectors, twist_profile, Grid, SpinField,
    TwistParams,
};
pub use observables::{
    energy, energy_bound_check, magnetization, momentum, BoundReport, Observables,
};
pub use topology::{
    detect_jumps, homotopy_path, sector_distance, writhe_along_path, HomotopyPath, JumpEvent,
    PathMethod,
};
pub use writhe::{
    fuller_validity_check, writhe_angular, writhe_fuller, writhe_gauss, FullerValidity,
    WritheMethod, WritheReport,
};

/// Three-vector type used for positions, tangents and spins.
pub type Vec3 = nalgebra::Vector3<f64>;
