//! Dissipative gradient descent ascent (DGDA) for min-max problems, with GDA,
//! extragradient and optimistic GDA baselines.
//!
//! - [`problems`]: bilinear and strongly convex–strongly concave quadratic
//!   instances with a prescribed condition number.
//! - [`solvers`]: the four update rules and a traced driver.
//! - [`certify`]: closed-form rate certificates and empirical rate fits.
//! - [`harness`]: multi-trial benchmarks, SVG plots and the `dgda` CLI.
//!
//! # Examples
//!
//! ```bash
//! cargo run -p dgda --example generate_problems
//! cargo run -p dgda --example bilinear_game
//! cargo run -p dgda --example spectral_certificate
//! cargo run -p dgda --example dissipation_lmi
//! cargo run -p dgda --example rate_table
//! cargo run -p dgda --example empirical_rate
//! cargo run --release -p dgda --example bilinear_benchmark
//! cargo run --release -p dgda --example scsc_benchmark
//! ```

pub mod certify;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
