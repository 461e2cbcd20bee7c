//! Truncated p-gradient estimates for finitely presented groups.
//!
//! The crate enumerates normal subgroups of p-power index through coset
//! tables, computes `d_p` of each subgroup by Reidemeister–Schreier
//! rewriting and linear algebra over `F_p`, and reports the minimum of
//! `(d_p(H) - 1) / [G:H]` over the enumerated lattice.

pub mod chaser;
pub mod cli;
pub mod corpus;
pub mod cosets;
pub mod error;
pub mod fp;
pub mod gradient;
pub mod lattice;
pub mod quotient;
pub mod rational;
pub mod schreier;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use rational::Rational;
