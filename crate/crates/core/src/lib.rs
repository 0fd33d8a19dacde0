//! Task synthesis for a small turtle-graphics programming environment.
//!
//! Given a reference task and its solution code, [`synth::synthesize`]
//! produces new tasks of a requested difficulty, each paired with a minimal
//! solution.

pub mod baselines;
pub mod emulator;
pub mod error;
pub mod fdsolver;
pub mod format;
pub mod lang;
pub mod minimality;
pub mod model;
pub mod render;
pub mod scoring;
pub mod seed;
pub mod suite;
pub mod symexec;
pub mod synth;
pub mod templating;
pub mod worldgen;
