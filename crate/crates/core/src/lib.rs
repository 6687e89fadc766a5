//! Combinatorial surface complexes via arrow presentations, and the
//! Hopf-algebraic Kitaev model built on top of them.
//!
//! The crate is organized bottom-up:
//!
//! * [`presentation`] — arrow presentations, axiom validation, orbit
//!   machinery and the oriented closed surface complex they generate.
//! * [`transform`] — dual / mirror / double / dual-of-double presentations
//!   and isomorphism checking.
//! * [`curves`] — curves on the dual of the double, the base-arrow + word
//!   codec, ribbon classification and the Schreier graph export.
//! * [`homotopy`] — ribbon-homotopy moves, tree curves and the disk /
//!   strip / annulus contraction planners.
//! * [`hopf`] — finite-dimensional C*-Hopf algebras by structure
//!   constants, Drinfeld doubles, integrals and central decompositions.
//! * [`model`] — the edge-local operator algebra: Gauss/flux operators,
//!   projectors, gauge actions and (op)holonomy of curves.
//! * [`states`] — dense state vectors, vacuum computation and the
//!   numerical experiments (invariance, charge detection, multiplets).
//! * [`cli`] — the command-line front door used by the `kitaev` binary.

pub mod cli;
pub mod curves;
pub mod verify;
pub mod homotopy;
pub mod hopf;
pub mod model;
pub mod presentation;
pub mod scenarios;
pub mod states;
pub mod transform;

pub use presentation::{ArrowPresentation, Cell, CellId, Site, SurfaceComplex};
pub use transform::DoubleArrow;
