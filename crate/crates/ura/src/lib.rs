//! Link-level simulator for unsourced random access with multiple stages of
//! orthogonal pilots over Rayleigh block-fading MIMO channels: transmitter,
//! iterative SIC receiver, detector analytics and a Monte-Carlo harness.

pub mod cli;
pub mod config;
pub mod detector;
pub mod error;
pub mod hadamard;
pub mod mc;
pub mod numerics;
pub mod phy;
pub mod polar;
pub mod receiver;

pub use config::SystemConfig;
pub use error::{Result, UraError};
pub use phy::Scheme;
