//! Halving polyhedra of spherical samples and the k-distances they encode.
//!
//! A cloud of N uniform points on the unit sphere, symmetrized, has a
//! halving polyhedron: the convex hull of the centroids of all N-subsets of
//! the 2N points. Rescaled by the marginal mean `m_d = E |<u, X>|`, that
//! polytope concentrates around the unit ball, and the library provides
//! everything needed to observe, certify, and stress this:
//!
//! - [`geom`]: spherical sampling, packing/covering direction nets, support
//!   functions, and certified Hausdorff enclosures;
//! - [`kdistance`]: k-distances, their exact power-distance form through
//!   subset centroids, and the power diagram of weighted sites;
//! - [`polytopes`]: k-set and halving support functions without subset
//!   enumeration;
//! - [`moments`]: the marginal density `(1 - t^2)^((d-3)/2)` and its
//!   quadrature moments;
//! - [`experiments`]: reproducible trial harnesses and the concentration
//!   bounds they are measured against.
//!
//! All randomness flows through counter-based ChaCha8 streams ([`rng`]),
//! so every harness is deterministic in its seed, independent of the
//! number of threads.

pub mod error;
pub mod experiments;
pub mod geom;
pub mod kdistance;
pub mod moments;
pub mod polytopes;
pub mod quad;
pub mod rng;

mod lp;

pub use error::{Error, Result};
