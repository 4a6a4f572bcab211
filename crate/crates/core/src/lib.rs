//! Constructive abstract homotopy theory on finite categories.

pub mod fincat;
pub mod interval;
pub mod homotopy;
pub mod corpus;
pub mod fibcof;
pub mod modelstruct;
