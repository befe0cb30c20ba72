//! Exact and numeric machinery for counting degree-bounded trees and studying
//! how often a fixed subtree occurs in a random one.

pub mod counting;
pub mod error;
mod numeric;
pub mod occurrence;
pub mod series;
pub mod spectral;
pub mod stats;
pub mod system;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
