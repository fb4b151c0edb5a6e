//! Spectral stability of exponential periodic waves in the singular modified
//! complex Ginzburg-Landau system
//!
//! ```text
//! A_t = a A_xx + b A + c |A|^2 A + d A B
//! B_t = eps^-1 (f B_x + h (|A|^2)_x) + e_B B_xx + Re(g A conj(A)_x)_x
//! ```
//!
//! with `m` conservation laws. The crate computes the linearized symbol
//! about a wave `A0 exp(i(kappa x - omega t))`, extracts the low-frequency
//! expansion coefficients of its neutral branches by three independent
//! routes, evaluates the stability criteria and checks diffusive spectral
//! stability on a region-adapted frequency grid.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod eig;
pub mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod model;
pub mod report;
pub mod symbol;
pub mod turing;
pub mod verdict;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
