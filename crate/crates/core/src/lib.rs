pub mod asymptotics;
pub mod cli;
pub mod edge_weights;
pub mod error;
pub mod io;
pub mod skein_trace;
pub mod special_functions;
pub mod summation;
pub mod verify;

pub use edge_weights::{LogLift, PeriodicWeightSystem, Sign, WeightTriple};
pub use error::{Error, Result};
pub use skein_trace::{QdlParams, TermCloud, TraceResult};
pub use special_functions::Hbar;
