//! Multilingual vision-language data tooling: training-mix planning,
//! deterministic synthetic plot-QA and OCR datasets, dataset translation
//! through an external MT service, and tier-grouped evaluation.

pub mod cli;
pub mod error;
pub mod eval;
pub mod font;
pub mod ocr;
pub mod planner;
pub mod registry;
pub mod rng;
pub mod smpqa;
pub mod translate;

pub use error::{Error, Result};
