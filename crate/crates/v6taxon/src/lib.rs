//! IO, file formats and synthetic data around [`v6taxon_core`].

pub mod dates;
pub mod dayfile;
mod error;
pub mod ingest;
pub mod render;
pub mod synth;

pub use error::{Error, Result};
