//! Multidimensional optical orthogonal codes: finite-field geometry,
//! ideal constructions from Singer spreads, exact Johnson-type bounds,
//! and shape transformations.

pub mod bounds;
pub mod cli;
pub mod conics;
pub mod constructions;
pub mod field;
pub mod geometry;
pub mod ooc;
pub mod oocx;
pub mod report;
pub mod transforms;
