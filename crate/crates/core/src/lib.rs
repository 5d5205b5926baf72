//! Numerical toolkit for short quantum refereed games.
//!
//! The pieces fit together like this: [`operators`] supplies dense complex
//! linear algebra and a deterministic Hermitian eigensolver; [`channels`]
//! models CPTP maps in Kraus form; [`separation`] computes the distance
//! between two channels' image sets together with the single measurement
//! that distinguishes them, certified by a duality gap; [`games`] evaluates
//! the three-message referee protocol built on that measurement; and
//! [`repetition`] verifies the error bounds of running many game copies in
//! parallel under unanimous votes.

pub mod channels;
pub mod cli;
pub mod error;
pub mod games;
pub mod operators;
pub mod repetition;
pub mod selftest;
pub mod separation;
pub mod serialize;

pub use error::{Error, Result};
