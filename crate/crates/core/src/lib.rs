//! Information measures on finite joint distributions, their maximizers, and
//! the transportation polytopes that organize them.

pub mod atlas;
pub mod cli;
pub mod codes;
pub mod dist;
pub mod error;
pub mod family;
pub mod json;
pub mod ops;
pub mod polytope;
pub mod scenarios;
pub mod search;

pub use dist::{BlockSplit, Distribution, Rational, StateSpace, Weights};
pub use error::{Error, Result};
pub use family::{Covering, MarginFamily, Pairing};
