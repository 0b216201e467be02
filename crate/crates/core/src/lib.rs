//! Desk-scale laboratory for random walks on finitely generated groups:
//! word metrics and Cayley geometry, sparse convolutions with entropy/drift
//! estimators, Green functions and the Green metric with Ancona and
//! rough-similarity audits, Floyd metrics with transition points and partial
//! shadows, tilted-matrix Perron data with lattice local limits, and the
//! Walsh midpoint-growth construction for nilpotent factors.

pub mod error;
pub mod floyd;
pub mod green;
pub mod group;
pub mod nilpotent;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use group::{CayleyBall, GeodesicSet, GroupElement, GroupModel, ModelKind};
