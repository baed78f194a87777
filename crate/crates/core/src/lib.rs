//! Exact cumulants of von Neumann entanglement entropy over the
//! Hilbert-Schmidt ensemble.
//!
//! The crate mechanizes a closed recursion for joint cumulants of the
//! induced entropy `T = sum x_i ln x_i` over the Wishart-Laguerre ensemble,
//! converts them to cumulants of the entanglement entropy `S`, and verifies
//! the closed forms numerically by arbitrary-precision evaluation and Monte
//! Carlo sampling.
//!
//! Module map:
//! - [`exactalg`]: exact polynomial / rational-function arithmetic
//! - [`symexpr`]: polygamma symbolic expressions and their operators
//! - [`combinat`]: set partitions, Bell polynomials, moment/cumulant maps
//! - [`engine`]: mean seeds, decoupled integrals, the cumulant recursion
//! - [`convert`]: moment conversion from `T` to `S` and leading terms
//! - [`numverify`]: big-float polygamma evaluation and Monte Carlo checks

pub mod combinat;
pub mod convert;
pub mod engine;
pub mod exactalg;
pub mod numverify;
pub mod symexpr;
