//! Seeded synthetic sessions that follow the laboratory protocol: a supine
//! rest period followed by the eleven activities in a per-subject random
//! order, with five body-worn accelerometers and breath-by-breath gas
//! exchange.
//!
//! Pelvis and thigh motion scales with the movement intensity that drives
//! PAEE. Wrist motion is drawn per activity independently of PAEE.

mod config;
mod generate;
mod io;
mod protocol;

use std::path::PathBuf;

use thiserror::Error;

use crate::data::DataError;

pub use config::GeneratorConfig;
pub use generate::{acc_retention, generate_subject, GeneratedSubject, REST_SECONDS};
pub use io::{
    generate_dataset, parse_truth_csv, write_manifest, write_subject, write_truth_csv,
    DatasetSummary, MANIFEST_FILE, TRUTH_FILE, TRUTH_HEADER,
};
pub use protocol::{default_protocol, ActivityDuration, ActivityProfile};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid generator config: {0}")]
    ConfigInvalid(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}
