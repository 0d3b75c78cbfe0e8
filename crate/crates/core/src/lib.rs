//! Directional analytic discrete cosine frames.
//!
//! Block transforms built from the DCT and DST, the Parseval block frames
//! assembled from them, and the compressive-sensing pipeline used to
//! evaluate them: a scrambled fast measurement operator and a primal-dual
//! splitting solver.

pub mod error;
pub mod frames;
pub mod imagegrid;
pub mod matrix_io;
pub mod sensing;
pub mod solver;
pub mod transforms;

pub use error::{Error, Result};
