pub mod alignment;
pub mod json;
pub mod newick;
