//! Population synthesis with deep generative models.
//!
//! The crate trains small dense networks (a variational autoencoder and a
//! Wasserstein GAN with weight clipping) on categorical agent records, samples
//! synthetic populations from them, and measures how well each synthesizer
//! recovers *sampling zeros* (combinations absent from the training sample but
//! present in held-out data) while avoiding *structural zeros* (impossible
//! combinations).
//!
//! Modules:
//!
//! - [`nn`]: dense feed-forward networks, backpropagation, Adam, weight clipping.
//! - [`data`]: CSV ingestion, sparse-column dropping, quantile binning, splits,
//!   one-hot encoding.
//! - [`models`]: VAE, WGAN, marginal and uniform samplers.
//! - [`eval`]: joint histograms, SRMSE / Pearson / R², zero accounting.
//! - [`oracle`]: a chain-structured ground-truth population with known
//!   structural zeros.
//! - [`cli`]: the batch experiment driver behind the `synthpop` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

// Negated float comparisons such as `!(x > 0.0)` are used on purpose so
// that NaN is rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod models;
pub mod nn;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
