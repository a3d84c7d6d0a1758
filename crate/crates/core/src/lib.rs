//! Circular and left orders on finite cyclic extensions of Tararin groups.

pub mod circle;
pub mod enumeration;
pub mod fixtures;
pub mod group;
pub mod linalg;
pub mod orders;
pub mod parse;
pub mod perturb;
pub mod realization;
pub mod spec;
pub mod tararin;

pub use group::{ball, Group};
pub use spec::{compute_a, ALattice, Element, GroupSpec, Letter, Violation, Word};
