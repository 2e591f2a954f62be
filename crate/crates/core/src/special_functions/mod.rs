mod dilog;
mod lobachevsky;
pub mod quadrature;
mod quantum_dilog;
mod zeta;

pub use dilog::dilog;
pub use lobachevsky::{clausen2, lobachevsky};
pub use quantum_dilog::{
    big_qdl, big_qdl_log, big_qdl_log_with, big_qdl_with, small_qdl, small_qdl_with, strip_bounds,
    Hbar, QdlOptions,
};
