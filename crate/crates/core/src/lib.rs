//! Numerical laboratory for the He–McKellar–Wilkens and Aharonov–Casher
//! phases of induced dipoles.
//!
//! Units are natural (`c = ħ = 1`) and Heaviside–Lorentz throughout.
//!
//! * [`veccalc`]: 3-vectors and finite-difference operators.
//! * [`fieldlab`]: analytic field catalog, superposition and regions.
//! * [`scenario`]: particle, fields, paths and the JSON file format.
//! * [`dipole`]: lab-frame dipole Lagrangians and force residuals.
//! * [`phase`]: the phase vector field `T`, path integrals and curl identities.
//! * [`topocheck`]: certifies whether a scenario's phase is topological.
//! * [`relkit`]: four-vectors, field tensors, the relativistic Lagrangian
//!   and the electric/magnetic duality map.
//! * [`cli`]: the `topophase` command-line driver.

pub mod cli;
pub mod dipole;
pub mod fieldlab;
pub mod phase;
pub mod quad;
pub mod relkit;
pub mod scenario;
pub mod topocheck;
pub mod veccalc;

pub use fieldlab::{catalog_field, superpose, FieldDescriptor, FieldKind, Region, VectorField};
pub use phase::{line_phase, phase_vector_field, PhaseResult, PhaseVectorField};
pub use scenario::{parse_scenario, validate, Path, PhaseKind, Scenario, ScenarioError};
pub use topocheck::{classify, Classification, TopologyReport};
pub use veccalc::{cross, FdOrder, FdParams, Vec3};
