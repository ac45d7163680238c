//! Structure-sensitive information theory.
//!
//! Classical entropy treats every pair of distinct letters as equally
//! different. This crate measures information relative to a *structure* on
//! the alphabet instead: an ultrametric distance, a weighted family of
//! partitions, or the ordering of points on the real line.

pub mod alphabet;
pub mod coding;
pub mod concordance;
pub mod conservation;
pub mod entropy;
pub mod error;
pub mod io;
pub mod linear;
pub mod notions;
pub mod partition;
pub mod random;
pub mod sequences;
pub mod structure;
pub mod ultrametric;

pub use alphabet::{Alphabet, Distribution, JointDistribution};
pub use error::{Error, Result};
pub use partition::Partition;
pub use structure::{
    PartitionStructure, ProductStructure, StructureRepr, StructureSource, StructuredSpace,
};
pub use ultrametric::{DistanceMatrix, UltrametricTree};
