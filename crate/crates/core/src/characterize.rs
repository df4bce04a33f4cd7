//! Unit-distance machinery: deciding `d_Ku(μ,ν) = 1` from support
//! structure, finite-universe polars, and the Dirac ingredients.
//!
//! For non-Dirac `μ` the measures at distance 1 (Dirac measures aside) are
//! exactly those carrying full mass either outside the convex hull of the
//! co-interval support or inside a single bounded gap of it. Dirac
//! arguments reduce to the atom-mass formula `d_Ku(μ, δ_x) = 1 − μ({x})`.

use num_traits::{One, Zero};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::Rational;

/// The regions whose full-mass occupants sit at Kuiper distance 1 from a
/// non-Dirac measure.
#[derive(Clone, Debug)]
pub struct UnitDistanceRegions {
    /// Complement of `conv(C_μ)`: zero, one or two unbounded intervals.
    /// Mass may be split between the two sides.
    pub outer: Vec<Interval>,
    /// Bounded connected components of the null set; full mass must sit in
    /// a single gap.
    pub gaps: Vec<Interval>,
    /// Atom locations of `μ`: a Dirac `δ_y` is unit-distant iff `y` avoids
    /// them.
    pub dirac_excluded_points: Vec<Rational>,
}

/// Region decomposition for the unit-distance characterization.
///
/// Rejects Dirac inputs: their unit-distance set is governed by the atom
/// formula instead.
pub fn unit_distance_regions(mu: &Distribution) -> Result<UnitDistanceRegions> {
    if mu.is_dirac() {
        return Err(Error::DiracInput);
    }
    let cs = mu.co_interval_support();
    Ok(UnitDistanceRegions {
        outer: cs.outer,
        gaps: cs.bounded_gaps,
        dirac_excluded_points: mu.atoms().into_iter().map(|(t, _)| t).collect(),
    })
}

/// Decides `d_Ku(μ,ν) = 1` without computing the metric.
pub fn is_unit_distant(mu: &Distribution, nu: &Distribution) -> bool {
    if mu.is_dirac() {
        let x = &mu.nodes()[0].t;
        return nu.atom_at(x).is_zero();
    }
    if nu.is_dirac() {
        let y = &nu.nodes()[0].t;
        return mu.atom_at(y).is_zero();
    }
    let regions = unit_distance_regions(mu).expect("non-Dirac checked above");
    let outer_mass: Rational = regions
        .outer
        .iter()
        .map(|iv| nu.interval_mass(iv))
        .sum();
    if outer_mass.is_one() {
        return true;
    }
    regions
        .gaps
        .iter()
        .any(|gap| nu.interval_mass(gap).is_one())
}

/// Finite-universe polar: the members of `universe` at distance 1 from
/// every member of `anchors`.
pub fn polar(anchors: &[Distribution], universe: &[Distribution]) -> Vec<Distribution> {
    universe
        .iter()
        .filter(|nu| anchors.iter().all(|mu| is_unit_distant(mu, nu)))
        .cloned()
        .collect()
}

/// Checks the absolute-continuity half of the double-polar argument at
/// desk scale: every probe at distance 1 from `μ` must also be at
/// distance 1 from `ν`, provided `ν ≪ μ`.
pub fn absolute_continuity_polar_check(
    mu: &Distribution,
    nu: &Distribution,
    probes: &[Distribution],
) -> Result<bool> {
    if !nu.is_absolutely_continuous_wrt(mu) {
        return Err(Error::NotAbsolutelyContinuous(
            "the polar argument needs ν ≪ μ".into(),
        ));
    }
    Ok(probes
        .iter()
        .filter(|theta| is_unit_distant(mu, theta))
        .all(|theta| is_unit_distant(theta, nu)))
}
