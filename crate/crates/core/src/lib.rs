//! Spectrum-preserving coarsening of simplicial complexes and triangle
//! meshes.
//!
//! The library contracts vertex families greedily, scoring each candidate by
//! how much of a chosen eigen-band of one or more Hodge Laplacians (possibly
//! of different dimensionalities) leaks into the orthogonal complement of the
//! induced coarsening projector. It ships the full pipeline: complex and
//! operator construction, the coarsening engine, functional-map quality
//! metrics, spectral distances, a synthetic dataset generator and file I/O
//! for every artifact.

pub mod coarsen;
pub mod error;
pub mod io;
pub mod metrics;
pub mod numkernel;
pub mod operators;
pub mod simplicial;
pub mod synth;

pub use error::{Error, Result};
pub use nalgebra::DMatrix;
pub use numkernel::{CooMatrix, Spectrum};
pub use simplicial::{Simplex, SimplicialComplex};
