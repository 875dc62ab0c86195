//! Block coordinate gradient coding for straggler-tolerant distributed
//! gradient descent.
//!
//! The crate covers the whole pipeline: a straggler model for worker cycle
//! times ([`straggler`]), the overall-runtime model of sequential coded
//! computation ([`runtime`]), the gradient codes themselves ([`coding`]),
//! solvers for the redundancy allocation ([`optimizer`]) and Monte Carlo
//! evaluation plus a small training demo ([`simulator`]).

pub mod coding;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod quadrature;
pub mod runtime;
pub mod simulator;
pub mod special;
pub mod straggler;

pub use error::{Error, Result};
pub use runtime::{BlockAllocation, CodingProfile, SystemConfig};
pub use straggler::{OrderStatSummary, PointMass, ShiftedExponential, StragglerModel, WorkerDraw};
