//! Analytic and simulated metrics for multi-server queues.
//!
//! The crate computes exact steady-state metrics for M/M/1, M/M/m/m
//! (loss) and M/M/m (delay) systems from the Erlang B function, realized
//! by two independent algorithms, and from the transformation
//! `Phi_B = B / (1 - (1 - B) rho)` that carries Erlang B into Erlang C.
//! Around that core sit the morphing approximation `S / (1 - rho^m)`
//! with its error bound and exact polynomial correction, the complex
//! root loci of both denominators together with the Szego curve, and a
//! discrete-event simulator that serves as an independent statistical
//! oracle for the analytic results.
//!
//! ```
//! use mmm_core::erlang::{self, QueueSpec};
//!
//! let spec = QueueSpec::from_traffic(2, 1.5, 1.0).unwrap();
//! let m = erlang::metrics(&spec).unwrap();
//! assert!((m.w - 1.28571429).abs() < 1e-8);
//! assert!((m.r - (1.0 + m.w)).abs() < 1e-15);
//! ```

pub mod erlang;
pub mod error;
pub mod morphing;
pub mod polyroots;
pub mod sim;
mod special;

pub use erlang::QueueSpec;
pub use error::{Error, Result};
