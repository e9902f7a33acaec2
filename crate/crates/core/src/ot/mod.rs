//! One-dimensional optimal transport on a uniform score grid.
//!
//! Every distribution lives on the bin centers of a [`ScoreGrid`] over
//! `[0, 1]`. With quadratic cost on the line the optimal coupling is the
//! monotone (north-west corner) rearrangement of the two cumulative
//! distributions, so everything here reduces to walking sorted cumulative
//! masses.

mod barycenter;
mod grid;
mod histogram;
mod transport;

pub use barycenter::{barycenter, barycenter_quantiles, quantile_levels};
pub use grid::ScoreGrid;
pub use histogram::{histogram_from_scores, wasserstein2, ScoreHistogram};
pub use transport::{
    displacement_interpolate, monotone_coupling, optimal_transport_map, push_forward, Coupling,
    TransportMap,
};

/// Tolerance on the unit total mass of a normalized histogram.
pub const MASS_TOLERANCE: f64 = 1e-9;
