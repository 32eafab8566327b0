//! Numerical toolkit for piecewise holomorphic planar systems with three
//! zones: zone flows and first integrals, Möbius changes of geometry,
//! Poincaré return maps, first-order Melnikov functions, and Hamiltonian
//! level-matching solvers for crossing limit cycles.

pub mod crossing;
pub mod field;
pub mod geometry;
pub mod jet;
pub mod melnikov;
pub mod ode;
pub mod poincare;
pub mod quad;
pub mod system;
pub mod verify;

pub use field::{
    eval_field, level_function, level_gradient, linear_flow, CatalogTag, FieldError,
    HolomorphicField, LevelFunction,
};
pub use geometry::{
    boundary_event_function, classify, moebius_apply, moebius_inverse, pushforward_field,
    BoundaryId, GeometryError, MoebiusImage, MoebiusMap, PartitionConfig, PartitionKind, ZoneKey,
    ZoneTag,
};
pub use num_complex::Complex64;
pub use system::{
    crossing_type, flow, integrate_in_zone, CrossingType, Perturbation, PiecewiseSystem,
    StopCondition, SystemError, Termination, Trajectory,
};
