//! Closed-form length computations on hyperbolic surfaces whose boundary
//! data may be cone points, cusps, or geodesic boundaries, and the inverse
//! problem of reading Fenchel-Nielsen coordinates back off a finite length
//! spectrum.
//!
//! The crate is layered bottom-up:
//!
//! * [`hyptrig`] - stable right-angled polygon relations.
//! * [`pants`] - generalized boundary data and per-pants coefficients.
//! * [`xpiece`] - curve families through glued blocks (X-pieces, tori).
//! * [`inversion`] - solvers inverting the family formulas, and the
//!   surface-recovery orchestrator.
//! * [`manifest`] - the curve identifier scheme shared by forward
//!   simulation and recovery.
//! * [`teich`] - whole-surface coordinates, the cusp-replacement map with
//!   its comparison constants, distance estimation, and twist diagnostics.
//! * [`cli`] - the command-line front end.

pub mod cli;
pub mod error;
pub mod hyptrig;
pub mod inversion;
pub mod manifest;
pub mod pants;
pub mod teich;
pub mod xpiece;

pub use error::{CurveId, Error, Result};
pub use inversion::{
    curve_budget, recover_cone_pair, recover_surface, recover_torus_angle, solve_bc_system,
    solve_torus_twist, solve_twist, trace_to_length, BcObservation, BcUnknowns, LengthSpectrum,
};
pub use pants::{BoundaryKind, GeneralizedLength, PantsCoefficients};
pub use teich::{
    almost_isometry_gap, boundary_convergence, comparison_constants, forget_map, forward_spectrum,
    spectrum_deviation, thurston_distance_lb, verify_length_bounds, ComparisonConstants, CuffSlot,
    PantsDecomposition, SurfaceFN,
};
pub use xpiece::{family_length, torus_family_length, PantsSide, TorusSpec, XPieceSpec};
