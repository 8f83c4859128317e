//! Synthesis and verification toolkit for phase-insensitive quantum
//! amplifiers built from two dynamic squeezers and two beamsplitters.
//!
//! The crate works with doubled-up transfer matrices acting on channel
//! operators stacked as (a, a^#). Starting from a requested complex gain it
//! computes the minimum-added-noise transfer matrix, factors it into static
//! beamsplitters and single-mode squeezers, emits hardware parameters for a
//! chosen bandwidth scale, and verifies the result both algebraically
//! (physical-realizability certificates) and by sampling the frequency
//! response.

pub mod amp_synth;
pub mod caves_bound;
pub mod cli;
pub mod dup_linalg;
pub mod error;
pub mod qsys;
pub mod shale;
pub mod squeezer;

pub use error::{Error, Result};
