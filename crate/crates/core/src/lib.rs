//! Exact discrete-time engine for random times, enlargements of filtrations and
//! semimartingale decompositions on finite filtered probability spaces.
//!
//! All arithmetic is rational; every identity is checked as an exact equality.

#![allow(clippy::needless_range_loop)]

pub mod calculus;
pub mod construction;
pub mod decomposition;
pub mod error;
pub mod finance;
pub mod fixtures;
pub mod hypotheses;
pub mod prob;
pub mod process;
pub mod random_time;
pub mod rational;
pub mod verdict;

pub use error::{Error, Result};
pub use prob::{build_space, change_measure, FilteredSpace, Filtration, Measure, Partition, RandomVariable};
pub use process::{Process, ProcessKind};
pub use rational::Rational;
pub use verdict::{Time, Verdict, Witness};
