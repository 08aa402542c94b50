//! Mixed two-field (velocity–pressure) finite elements for generalized Darcy
//! flow through rigid porous media.
//!
//! The drag coefficient may depend on pressure (Barus viscosity) and on the
//! seepage speed (Forchheimer correction). Two stabilized equal-order
//! formulations are provided, a least-squares one and a variational
//! multi-scale one, both driven by the same fixed-point iteration whose
//! linearization is selected by a parameter `theta` in `[0, 1]`
//! (0 = Picard, 1 = consistent).
//!
//! Module map:
//!
//! * [`mesh`]: structured T3/Q4/Q9/B8 meshes, boundary tags, holes, regions
//! * [`fem`]: reference elements, quadrature and isoparametric evaluation
//! * [`drag`]: drag coefficient models and non-dimensionalization
//! * [`formulation`]: linearized element systems for both formulations
//! * [`solver`]: assembly, constraints, sparse solve and the nonlinear driver
//! * [`postproc`]: error norms, fluxes, mass balance and dissipation checks
//! * [`vtk`]: legacy VTK output

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod drag;
pub mod error;
pub mod fem;
pub mod formulation;
pub mod mesh;
pub mod postproc;
pub mod solver;
pub mod vtk;

pub use error::{Error, Result};

/// Points and vectors are stored with three components; the third is zero in 2D.
pub type Vec3 = nalgebra::Vector3<f64>;
