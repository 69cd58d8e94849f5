//! Set families with bounded iterated intersections: property checkers,
//! exact transversal numbers, extremal constructions and searches, counting
//! identities, and a constructive piercing algorithm for linear families.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod family;
pub mod format;
pub mod piercing;
pub mod properties;
pub mod solver;

pub use error::{Error, Result};
pub use family::{Point, PointSet, SetFamily, Subfamily};
