//! Desk-scale simulator for quantum federated learning.
//!
//! Clients train small variational quantum classifiers on local data shards,
//! upload parameters through an optionally differentially-private and
//! QKD-encrypted channel, and a server aggregates them with sample-weighted
//! averaging plus optional fine-tuning on a held-out validation set. The
//! whole pipeline is deterministic given one root seed; see [`rng`].

pub mod config;
pub mod data;
pub mod error;
pub mod federated;
pub mod models;
pub mod optim;
pub mod privacy;
pub mod qkd;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};
