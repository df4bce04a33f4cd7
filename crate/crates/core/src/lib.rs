//! Exact computation with one-dimensional probability distributions.
//!
//! The representable class is measures whose CDFs are piecewise Möbius
//! (fractional-linear) with atoms at the breakpoints, all coefficients
//! rational. On this class the crate computes the Kuiper,
//! Kolmogorov–Smirnov and total-variation distances exactly, together with
//! a maximizing interval witness for the Kuiper distance; it implements
//! monotone piecewise-Möbius changes of variable (pullback), the inversion
//! family `r_x`, transport to the circle, the unit-distance
//! characterization machinery, and seeded verification suites for all of
//! the above.

pub mod characterize;
pub mod circle;
pub mod distribution;
pub mod error;
pub mod generate;
pub mod interval;
pub mod io;
pub mod metrics;
pub mod moebius;
pub mod quadratic;
pub mod scalar;
pub mod transform;
pub mod verify;

pub use characterize::{
    absolute_continuity_polar_check, is_unit_distant, polar, unit_distance_regions,
    UnitDistanceRegions,
};
pub use circle::{
    arc_sup_oracle, circle_kuiper, tau_inverse_transport, tau_transport, Arc, CircleDistribution,
    CircleNode,
};
pub use distribution::{CoIntervalSupport, Distribution, Node, SegmentSpec};
pub use error::{Error, Result};
pub use interval::Interval;
pub use metrics::{
    brute_force_interval_sup, dirac_distance, kuiper_distance, kuiper_witness, ks_distance,
    tv_distance, Witness,
};
pub use moebius::Moebius;
pub use scalar::{ExtReal, Rational, Value};
pub use transform::{
    certified_pushforward, compose, pullback, CirclePoint, ContinuousIsometry, GeneralIsometry,
    MapOracle, MonotoneMap, Orientation,
};
