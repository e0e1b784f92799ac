//! Closed surfaces in 3-bridge knot complements, assembled from pieces that
//! live in the two trivial tangles on either side of a level sphere.
//!
//! The catalog lists the piece kinds with their boundary curves on the
//! 6-punctured sphere; [`gluer::Gluer`] searches for ways to glue two sides
//! together and filters the results down to the surviving shapes.

pub mod braidcheck;
pub mod catalog;
pub mod cli;
pub mod coexistence;
pub mod gluer;
pub mod sphere_curves;

pub use catalog::{Catalog, Label, Reason, Shape};
pub use gluer::{Bounds, Configuration, Gluer, SurfaceClass, VerdictRecord};
