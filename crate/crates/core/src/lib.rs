//! Exact tilt-stability numerics on index-two Fano threefolds of Picard rank one.
//!
//! All arithmetic is over `Ratio<i128>`. The modules build on each other:
//! [`chern`] for characters and Riemann-Roch, [`tilt`] for central charges and
//! numerical walls, [`bounds`] for the inequality checks, [`walls`] for the
//! certified enumerations, [`verify`] for end-to-end scenario runs, and
//! [`cli`] for the command-line front end.

pub mod bounds;
pub mod chern;
pub mod cli;
pub mod rational;
pub mod tilt;
pub mod verify;
pub mod walls;

pub use chern::{ChernCharacter, ChernError, FanoContext};
pub use rational::{Rational, RationalText};
pub use tilt::TiltPoint;
