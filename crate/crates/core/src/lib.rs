//! Locally univalent circle packings of the hexagonal lattice.
//!
//! Everything here works on log-radii `u = ln r`. The crate is `no_std`
//! (it needs `alloc`); IO, file formats and the command line live in the
//! `hexpack` companion crate.
//!
//! - [`geometry`]: inner angles of a triangle of three mutually tangent
//!   circles and their partial derivatives.
//! - [`lattice`]: vertices, faces, windows and fields on the hexagonal lattice.
//! - [`spiral`]: Doyle spirals, the flower angle sum and field classification.
//! - [`solver`]: the angle-sum packing equation on a finite window.
//! - [`harmonic`]: edge weights that make `D1 u` discrete harmonic, volumes,
//!   and weighted random walks.
//! - [`layout`]: the developing map and univalence checks.

#![no_std]

extern crate alloc;

pub mod geometry;
pub mod harmonic;
pub mod lattice;
pub mod layout;
mod linalg;
pub mod quadrature;
pub mod solver;
pub mod spiral;

pub use geometry::{AngleGradient, LogRadiusTriple};
pub use harmonic::{EdgeWeights, Quadrature};
pub use lattice::{Face, ScalarField, VertexId, Window};
pub use layout::{Anchor, Circle, Layout};
pub use solver::{SolveMode, SolveOptions, SolveReport};
pub use spiral::{Classification, SpiralParams};

/// `2π`.
pub const TAU: f64 = core::f64::consts::TAU;
