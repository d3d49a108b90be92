//! Physical activity energy expenditure (PAEE) estimation from body-worn
//! accelerometers, with breath-by-breath gas exchange as the reference.
//!
//! The crate covers the whole offline pipeline: ingestion ([`data`]),
//! filtering and resampling ([`dsp`]), the PAEE ground truth
//! ([`energetics`]), windowing and IAA_tot features ([`features`]), the
//! linear and CNN-LSTM estimators ([`models`]), leave-one-subject-out
//! evaluation ([`evaluation`]), the statistical comparison ([`stats`]) and a
//! seeded synthetic dataset generator ([`synthgen`]).

pub mod data;
pub mod dsp;
pub mod energetics;
pub mod features;
pub mod models;
pub mod preprocess;
pub mod evaluation;
pub mod stats;
pub mod synthgen;
