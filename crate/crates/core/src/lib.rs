//! Post-processing for group fairness on 1-D scores.
//!
//! Each group's raw score distribution is transported onto a Wasserstein-2
//! barycenter of three target distributions: one that is calibrated within
//! the group, one whose truly-negative members look alike across groups, and
//! one whose truly-positive members look alike across groups. The per-group
//! weights of that barycenter ([`ThetaWeights`]) set the trade-off between
//! the three criteria.
//!
//! - [`ot`]: histograms on a uniform score grid and the 1-D transport primitives.
//! - [`faim`]: fitting and applying the per-group fair transport maps.
//! - [`datasets`]: CSV ingestion, score truncation, the synthetic generator, COMPAS preparation.
//! - [`metrics`]: confusion-matrix reports, deltas, and per-score slicing.
//! - [`cli`]: the `faim` command-line tool.

pub mod cli;
pub mod datasets;
pub mod error;
pub mod faim;
pub mod metrics;
pub mod ot;

pub use datasets::{GroupedDataset, Record};
pub use error::{Error, Result};
pub use faim::{FaimModel, GroupModel, ThetaWeights};
pub use ot::{ScoreGrid, ScoreHistogram, TransportMap};
