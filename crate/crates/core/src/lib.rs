//! Reflectivity of Bianchi groups via Vinberg's algorithm on the lattice `L_m`.

pub mod classgroup;
pub mod coxeter;
pub mod error;
pub mod isometry;
pub mod linalg;
pub mod pipeline;
pub mod qform;
pub mod spinor;
pub mod tables;
pub mod vinberg;

pub use error::{Error, Result};
