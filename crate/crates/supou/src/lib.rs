//! Simulation and scaling-regime analysis for superpositions of
//! Lévy-driven Ornstein–Uhlenbeck processes with infinite-variance
//! marginals.
//!
//! The model is a characteristic quadruple (a, b, μ, π): a Lévy–Khintchine
//! triplet for the background driving Lévy process plus a mixing
//! distribution π for the OU relaxation rates. The crate simulates the
//! stationary process and its integral, classifies the scaling regime of
//! the integrated process, computes the limit-law parameters, and checks
//! convergence empirically by Monte Carlo.

pub mod asymptotics;
pub mod config;
pub mod distributions;
pub mod error;
pub mod model;
pub mod numeric;
pub mod simulate;
pub mod slowvar;
pub mod verify;

pub use error::{Error, Result};
