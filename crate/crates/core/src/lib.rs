pub mod basis;
pub mod entanglement;
pub mod error;
pub mod eth;
pub mod linalg;
pub mod models;
pub mod random;
pub mod spectral;
pub mod submatrix;

pub use error::{Error, Result};

/// Sizes the global worker pool used by the eigensolver and per-block loops.
/// Returns false when the pool was already initialized.
#[cfg(feature = "parallel")]
pub fn configure_threads(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_ok()
}
