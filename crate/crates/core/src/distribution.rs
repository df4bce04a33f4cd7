//! Probability measures on the line: atoms plus Möbius CDF segments.
//!
//! A distribution is stored as an ascending list of nodes `(t, F(t−), F(t))`
//! with one CDF piece per open segment between consecutive nodes, plus the
//! two unbounded end segments. Atoms are the jumps `F(t) − F(t−)`. The class
//! is closed under conditioning, mixing with compatible denominators, and
//! pullback by piecewise-Möbius bijections; all evaluations are exact.

use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::moebius::Moebius;
use crate::scalar::{format_rational, rat, ExtReal, Rational};

/// A CDF node: the point `t` with the left limit and value of the CDF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub t: Rational,
    pub f_left: Rational,
    pub f_right: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    nodes: Vec<Node>,
    /// `pieces[i]` is the CDF on the open segment left of node `i`;
    /// `pieces[n]` is the tail right of the last node.
    pieces: Vec<Moebius>,
}

/// Co-interval support `C_μ` together with its gap decomposition.
#[derive(Clone, Debug)]
pub struct CoIntervalSupport {
    /// Connected components of `C_μ`, ascending, with exact openness.
    pub components: Vec<Interval>,
    /// Convex hull of `C_μ`; open endpoints stay open when not attained.
    pub hull: Interval,
    /// Bounded connected components of the null set `N_μ`.
    pub bounded_gaps: Vec<Interval>,
    /// Complement of the hull: zero, one or two unbounded intervals.
    pub outer: Vec<Interval>,
}

/// Authoring form of a CDF segment, used by the parser and generators.
#[derive(Clone, Debug)]
pub enum SegmentSpec {
    /// Constant density on a bounded open segment.
    Density {
        from: Rational,
        to: Rational,
        density: Rational,
    },
    /// Explicit Möbius CDF on a (possibly unbounded) segment.
    MoebiusCdf {
        from: ExtReal,
        to: ExtReal,
        cdf: Moebius,
    },
}

impl SegmentSpec {
    fn from_ext(&self) -> ExtReal {
        match self {
            SegmentSpec::Density { from, .. } => ExtReal::Finite(from.clone()),
            SegmentSpec::MoebiusCdf { from, .. } => from.clone(),
        }
    }

    fn to_ext(&self) -> ExtReal {
        match self {
            SegmentSpec::Density { to, .. } => ExtReal::Finite(to.clone()),
            SegmentSpec::MoebiusCdf { to, .. } => to.clone(),
        }
    }
}

impl Distribution {
    /// Validates and canonicalizes raw nodes and pieces.
    pub fn from_parts(nodes: Vec<Node>, pieces: Vec<Moebius>) -> Result<Distribution> {
        let err = |msg: String| Err(Error::InvalidDistribution(msg));
        if nodes.is_empty() {
            return err("a distribution needs at least one CDF node".into());
        }
        if pieces.len() != nodes.len() + 1 {
            return err(format!(
                "{} nodes require {} pieces, got {}",
                nodes.len(),
                nodes.len() + 1,
                pieces.len()
            ));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        for w in nodes.windows(2) {
            if w[0].t >= w[1].t {
                return err(format!("nodes not strictly ascending at {}", w[1].t));
            }
            if w[0].f_right > w[1].f_left {
                return err(format!("CDF decreases across segment before {}", w[1].t));
            }
        }
        for nd in &nodes {
            if nd.f_left < zero || nd.f_right > one || nd.f_left > nd.f_right {
                return err(format!("CDF values out of order at {}", nd.t));
            }
        }
        let n = nodes.len();
        for (i, piece) in pieces.iter().enumerate() {
            if piece.det().is_negative() {
                return err(format!("decreasing CDF piece in segment {}", i));
            }
            let lo = if i == 0 {
                ExtReal::NegInf
            } else {
                ExtReal::Finite(nodes[i - 1].t.clone())
            };
            let hi = if i == n {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(nodes[i].t.clone())
            };
            if let Some(p) = piece.pole() {
                let p = ExtReal::Finite(p);
                if p >= lo && p <= hi {
                    return err(format!("CDF piece pole inside closed span of segment {}", i));
                }
            }
            let left_val = match &lo {
                ExtReal::NegInf => match piece.limit_neg_inf() {
                    ExtReal::Finite(v) => v,
                    _ => return err("left tail does not converge".into()),
                },
                ExtReal::Finite(t) => match piece.eval(t) {
                    Some(v) => v,
                    None => return err(format!("CDF piece pole at node {}", t)),
                },
                ExtReal::PosInf => unreachable!(),
            };
            let right_val = match &hi {
                ExtReal::PosInf => match piece.limit_pos_inf() {
                    ExtReal::Finite(v) => v,
                    _ => return err("right tail does not converge".into()),
                },
                ExtReal::Finite(t) => match piece.eval(t) {
                    Some(v) => v,
                    None => return err(format!("CDF piece pole at node {}", t)),
                },
                ExtReal::NegInf => unreachable!(),
            };
            let want_left = if i == 0 { &zero } else { &nodes[i - 1].f_right };
            let want_right = if i == n { &one } else { &nodes[i].f_left };
            if &left_val != want_left {
                return err(format!(
                    "piece {} left boundary {} does not match CDF value {}",
                    i,
                    format_rational(&left_val),
                    format_rational(want_left)
                ));
            }
            if &right_val != want_right {
                return err(format!(
                    "piece {} right boundary {} does not match CDF value {}",
                    i,
                    format_rational(&right_val),
                    format_rational(want_right)
                ));
            }
        }

        // Canonical form: drop zero-atom nodes between identical pieces.
        let mut new_nodes: Vec<Node> = Vec::with_capacity(n);
        let mut new_pieces: Vec<Moebius> = Vec::with_capacity(n + 1);
        let mut piece_iter = pieces.into_iter();
        new_pieces.push(piece_iter.next().unwrap());
        for (node, piece) in nodes.into_iter().zip(piece_iter) {
            if node.f_left == node.f_right && *new_pieces.last().unwrap() == piece {
                continue;
            }
            new_nodes.push(node);
            new_pieces.push(piece);
        }
        if new_nodes.is_empty() {
            return err("distribution canonicalizes to no nodes".into());
        }
        Ok(Distribution {
            nodes: new_nodes,
            pieces: new_pieces,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn pieces(&self) -> &[Moebius] {
        &self.pieces
    }

    /// Atom locations and masses, ascending.
    pub fn atoms(&self) -> Vec<(Rational, Rational)> {
        self.nodes
            .iter()
            .filter(|nd| nd.f_left < nd.f_right)
            .map(|nd| (nd.t.clone(), &nd.f_right - &nd.f_left))
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.nodes.iter().all(|nd| nd.f_left == nd.f_right)
    }

    pub fn is_dirac(&self) -> bool {
        self.nodes.len() == 1
            && self.nodes[0].f_left.is_zero()
            && self.nodes[0].f_right.is_one()
    }

    /// Uniform distribution on `(lo, hi)`.
    pub fn uniform(lo: Rational, hi: Rational) -> Result<Distribution> {
        if lo >= hi {
            return Err(Error::InvalidDistribution(format!(
                "uniform needs lo < hi, got [{}, {}]",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        let line = Moebius::line_through(&lo, &zero, &hi, &one);
        Distribution::from_parts(
            vec![
                Node {
                    t: lo,
                    f_left: zero.clone(),
                    f_right: zero.clone(),
                },
                Node {
                    t: hi,
                    f_left: one.clone(),
                    f_right: one.clone(),
                },
            ],
            vec![Moebius::constant(&zero), line, Moebius::constant(&one)],
        )
    }

    /// Unit mass at `x`.
    pub fn dirac(x: Rational) -> Distribution {
        let zero = Rational::zero();
        let one = Rational::one();
        Distribution {
            nodes: vec![Node {
                t: x,
                f_left: zero.clone(),
                f_right: one.clone(),
            }],
            pieces: vec![Moebius::constant(&zero), Moebius::constant(&one)],
        }
    }

    /// Purely atomic distribution. Atoms must be positive and sum to 1;
    /// duplicate positions are merged.
    pub fn from_atoms(atoms: &[(Rational, Rational)]) -> Result<Distribution> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let mut sorted = atoms.to_vec();
        sorted.sort_by(|x, y| x.0.cmp(&y.0));
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(sorted.len());
        for (t, m) in sorted {
            if m.is_negative() || m.is_zero() {
                return Err(Error::InvalidDistribution(format!(
                    "atom mass {} at {} must be positive",
                    format_rational(&m),
                    format_rational(&t)
                )));
            }
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += m,
                _ => merged.push((t, m)),
            }
        }
        let total: Rational = merged.iter().map(|(_, m)| m.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "atom masses sum to {}, expected 1",
                format_rational(&total)
            )));
        }
        let mut nodes = Vec::with_capacity(merged.len());
        let mut pieces = Vec::with_capacity(merged.len() + 1);
        let mut cum = Rational::zero();
        pieces.push(Moebius::constant(&cum));
        for (t, m) in merged {
            let next = &cum + &m;
            nodes.push(Node {
                t,
                f_left: cum.clone(),
                f_right: next.clone(),
            });
            pieces.push(Moebius::constant(&next));
            cum = next;
        }
        Distribution::from_parts(nodes, pieces)
    }

    /// Exact convex combination. Weights must be positive and sum to 1.
    ///
    /// The result must stay in the Möbius-CDF class: on every overlap
    /// segment the summed pieces need proportional denominators (always true
    /// for piecewise-linear parts). Otherwise the mixture is rejected.
    pub fn mix(parts: &[(Rational, Distribution)]) -> Result<Distribution> {
        if parts.is_empty() {
            return Err(Error::WeightSum("0".into()));
        }
        let total: Rational = parts.iter().map(|(w, _)| w.clone()).sum();
        if !total.is_one() || parts.iter().any(|(w, _)| !w.is_positive()) {
            return Err(Error::WeightSum(format_rational(&total)));
        }
        let ts: BTreeSet<Rational> = parts
            .iter()
            .flat_map(|(_, d)| d.nodes.iter().map(|nd| nd.t.clone()))
            .collect();
        let ts: Vec<Rational> = ts.into_iter().collect();
        let mut nodes = Vec::with_capacity(ts.len());
        for t in &ts {
            let mut f_left = Rational::zero();
            let mut f_right = Rational::zero();
            for (w, d) in parts {
                f_left += w * d.cdf_left(t);
                f_right += w * d.cdf(t);
            }
            nodes.push(Node {
                t: t.clone(),
                f_left,
                f_right,
            });
        }
        let mut pieces = Vec::with_capacity(ts.len() + 1);
        for i in 0..=ts.len() {
            let lo = if i == 0 {
                ExtReal::NegInf
            } else {
                ExtReal::Finite(ts[i - 1].clone())
            };
            let summands: Vec<(Rational, Moebius)> = parts
                .iter()
                .map(|(w, d)| (w.clone(), d.piece_after(&lo).clone()))
                .collect();
            pieces.push(sum_moebius(&summands).map_err(|_| {
                Error::UnrepresentableMixture(format!(
                    "overlapping non-proportional Möbius pieces right of {}",
                    lo
                ))
            })?);
        }
        Distribution::from_parts(nodes, pieces)
    }

    /// Right-continuous CDF value `μ((−∞, t])`.
    pub fn cdf(&self, t: &Rational) -> Rational {
        match self.nodes.binary_search_by(|nd| nd.t.cmp(t)) {
            Ok(i) => self.nodes[i].f_right.clone(),
            Err(i) => self.pieces[i]
                .eval(t)
                .expect("pole outside validated segments"),
        }
    }

    /// Left limit `μ((−∞, t))`.
    pub fn cdf_left(&self, t: &Rational) -> Rational {
        match self.nodes.binary_search_by(|nd| nd.t.cmp(t)) {
            Ok(i) => self.nodes[i].f_left.clone(),
            Err(i) => self.pieces[i]
                .eval(t)
                .expect("pole outside validated segments"),
        }
    }

    pub fn atom_at(&self, t: &Rational) -> Rational {
        self.cdf(t) - self.cdf_left(t)
    }

    /// Exact measure of an interval, honoring endpoint openness.
    pub fn interval_mass(&self, iv: &Interval) -> Rational {
        let upper = match iv.hi() {
            ExtReal::PosInf => Rational::one(),
            ExtReal::Finite(b) => {
                if iv.hi_closed() {
                    self.cdf(b)
                } else {
                    self.cdf_left(b)
                }
            }
            ExtReal::NegInf => unreachable!("interval invariant"),
        };
        let lower = match iv.lo() {
            ExtReal::NegInf => Rational::zero(),
            ExtReal::Finite(a) => {
                if iv.lo_closed() {
                    self.cdf_left(a)
                } else {
                    self.cdf(a)
                }
            }
            ExtReal::PosInf => unreachable!("interval invariant"),
        };
        let mass = upper - lower;
        debug_assert!(!mass.is_negative());
        mass
    }

    /// Index of the piece covering the open region immediately right of `u`.
    pub(crate) fn piece_index_after(&self, u: &ExtReal) -> usize {
        match u {
            ExtReal::NegInf => 0,
            ExtReal::PosInf => self.pieces.len() - 1,
            ExtReal::Finite(t) => match self.nodes.binary_search_by(|nd| nd.t.cmp(t)) {
                Ok(i) => i + 1,
                Err(i) => i,
            },
        }
    }

    pub(crate) fn piece_after(&self, u: &ExtReal) -> &Moebius {
        &self.pieces[self.piece_index_after(u)]
    }

    /// Span of piece `i` as extended-real bounds.
    pub(crate) fn piece_span(&self, i: usize) -> (ExtReal, ExtReal) {
        let lo = if i == 0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(self.nodes[i - 1].t.clone())
        };
        let hi = if i == self.nodes.len() {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(self.nodes[i].t.clone())
        };
        (lo, hi)
    }

    /// Conditional measure `A ↦ μ(A ∩ I)/μ(I)`.
    pub fn condition_on_interval(&self, iv: &Interval) -> Result<Distribution> {
        let mass = self.interval_mass(iv);
        if mass.is_zero() {
            return Err(Error::NullConditioning(iv.to_string()));
        }
        if iv.is_degenerate() {
            return Ok(Distribution::dirac(iv.lo().as_finite().unwrap().clone()));
        }
        let base = match iv.lo() {
            ExtReal::NegInf => Rational::zero(),
            ExtReal::Finite(a) => {
                if iv.lo_closed() {
                    self.cdf_left(a)
                } else {
                    self.cdf(a)
                }
            }
            ExtReal::PosInf => unreachable!(),
        };
        let inv = Rational::one() / &mass;
        let shift = -&base / &mass;
        let rescale = |m: &Moebius| m.scale_add(&inv, &shift);
        let zero = Rational::zero();
        let one = Rational::one();

        let mut nodes: Vec<Node> = Vec::new();
        if let ExtReal::Finite(a) = iv.lo() {
            nodes.push(Node {
                t: a.clone(),
                f_left: zero.clone(),
                f_right: (&self.cdf(a) - &base) / &mass,
            });
        }
        for nd in &self.nodes {
            let te = ExtReal::Finite(nd.t.clone());
            if &te <= iv.lo() || &te >= iv.hi() {
                continue;
            }
            nodes.push(Node {
                t: nd.t.clone(),
                f_left: (&nd.f_left - &base) / &mass,
                f_right: (&nd.f_right - &base) / &mass,
            });
        }
        if let ExtReal::Finite(b) = iv.hi() {
            nodes.push(Node {
                t: b.clone(),
                f_left: (&self.cdf_left(b) - &base) / &mass,
                f_right: one.clone(),
            });
        }
        let mut pieces: Vec<Moebius> = Vec::with_capacity(nodes.len() + 1);
        for i in 0..=nodes.len() {
            if i == 0 && iv.lo().is_finite() {
                pieces.push(Moebius::constant(&zero));
            } else if i == nodes.len() && iv.hi().is_finite() {
                pieces.push(Moebius::constant(&one));
            } else {
                let left = if i == 0 {
                    ExtReal::NegInf
                } else {
                    ExtReal::Finite(nodes[i - 1].t.clone())
                };
                pieces.push(rescale(self.piece_after(&left)));
            }
        }
        Distribution::from_parts(nodes, pieces)
    }

    /// Smallest `t` with `F(t) ≥ c`, for `0 < c < 1`.
    pub fn quantile(&self, c: &Rational) -> Rational {
        debug_assert!(c > &Rational::zero() && c < &Rational::one());
        let n = self.nodes.len();
        for i in 0..=n {
            let enter = if i == 0 {
                Rational::zero()
            } else {
                self.nodes[i - 1].f_right.clone()
            };
            let exit = if i == n {
                Rational::one()
            } else {
                self.nodes[i].f_left.clone()
            };
            if &enter < c && c <= &exit {
                let piece = &self.pieces[i];
                if !piece.is_constant() {
                    if let Some(t) = piece.solve(c) {
                        return t;
                    }
                }
            }
            if i < n && c <= &self.nodes[i].f_right {
                return self.nodes[i].t.clone();
            }
        }
        // c < 1 and the CDF reaches 1: unreachable for valid inputs.
        unreachable!("quantile walked past the last node")
    }

    /// Purely atomic approximation: `n` quantile atoms of mass `1/n`, ties
    /// collapsed. The Kuiper distance to `self` is at most `2/n`.
    ///
    /// The first atom sits at the lower support endpoint; when the support
    /// is unbounded below it collapses into the next quantile.
    pub fn quantize(&self, n: u64) -> Distribution {
        assert!(n >= 1, "quantize needs n >= 1");
        let n_rat = rat(n as i64, 1);
        let lowest = if self.pieces[0].is_constant() {
            Some(self.nodes[0].t.clone())
        } else {
            None
        };
        let unit = Rational::one() / &n_rat;
        let mut atoms: Vec<(Rational, Rational)> = Vec::with_capacity(n as usize);
        match lowest {
            Some(t) => atoms.push((t, unit.clone())),
            None if n == 1 => atoms.push((self.quantile(&rat(1, 2)), unit.clone())),
            // Unbounded left support: fold the first atom into the next
            // quantile; the two-sided bound still holds.
            None => atoms.push((self.quantile(&(&Rational::one() / &n_rat)), unit.clone())),
        }
        for i in 1..n {
            let c = rat(i as i64, 1) / &n_rat;
            atoms.push((self.quantile(&c), unit.clone()));
        }
        Distribution::from_atoms(&atoms).expect("quantile atoms are a valid distribution")
    }

    /// The closed support as disjoint closed intervals and points.
    pub fn closed_support(&self) -> Vec<Interval> {
        let mut items: Vec<Interval> = Vec::new();
        let n = self.nodes.len();
        for i in 0..=n {
            if !self.pieces[i].is_constant() {
                let (lo, hi) = self.piece_span(i);
                let lo_closed = lo.is_finite();
                let hi_closed = hi.is_finite();
                items.push(Interval::new(lo, hi, lo_closed, hi_closed).unwrap());
            }
            if i < n && self.nodes[i].f_left < self.nodes[i].f_right {
                items.push(Interval::point(self.nodes[i].t.clone()));
            }
        }
        // Items arrive in ascending order; merge touching closures.
        let mut merged: Vec<Interval> = Vec::new();
        for item in items {
            match merged.last_mut() {
                Some(last) if item.lo() < last.hi() || (item.lo() == last.hi() && last.hi().is_finite()) => {
                    if item.hi() > last.hi() {
                        *last = Interval::new(
                            last.lo().clone(),
                            item.hi().clone(),
                            last.lo_closed(),
                            item.hi_closed(),
                        )
                        .unwrap();
                    }
                }
                _ => merged.push(item),
            }
        }
        merged
    }

    /// Co-interval support `C_μ` with the decomposition of its null set.
    pub fn co_interval_support(&self) -> CoIntervalSupport {
        let n = self.nodes.len();
        // Items alternate segment, node, segment, ..., segment (2n+1 total).
        let flat = |idx: usize| -> bool {
            if idx % 2 == 0 {
                self.pieces[idx / 2].is_constant()
            } else {
                let nd = &self.nodes[(idx - 1) / 2];
                nd.f_left == nd.f_right
            }
        };
        let mut nulls: Vec<Interval> = Vec::new();
        let mut idx = 0usize;
        let last_idx = 2 * n;
        while idx <= last_idx {
            if !flat(idx) {
                idx += 1;
                continue;
            }
            let start = idx;
            while idx + 1 <= last_idx && flat(idx + 1) {
                idx += 1;
            }
            let end = idx;
            idx += 1;
            if start == end && start % 2 == 1 {
                // A lone zero-atom node carries no nondegenerate null interval.
                continue;
            }
            let (lo, lo_closed) = if start == 0 {
                (ExtReal::NegInf, false)
            } else if start % 2 == 0 {
                (ExtReal::Finite(self.nodes[start / 2 - 1].t.clone()), false)
            } else {
                (ExtReal::Finite(self.nodes[(start - 1) / 2].t.clone()), true)
            };
            let (hi, hi_closed) = if end == last_idx {
                (ExtReal::PosInf, false)
            } else if end % 2 == 0 {
                (ExtReal::Finite(self.nodes[end / 2].t.clone()), false)
            } else {
                (ExtReal::Finite(self.nodes[(end - 1) / 2].t.clone()), true)
            };
            nulls.push(Interval::new(lo, hi, lo_closed, hi_closed).unwrap());
        }

        let mut components: Vec<Interval> = Vec::new();
        let mut cursor = (ExtReal::NegInf, false);
        for null in &nulls {
            let (lo, lo_closed) = cursor.clone();
            let hi = null.lo().clone();
            let hi_closed = !null.lo_closed();
            match lo.cmp(&hi) {
                std::cmp::Ordering::Less => {
                    components.push(Interval::new(lo, hi, lo_closed, hi_closed).unwrap());
                }
                std::cmp::Ordering::Equal => {
                    if lo_closed && hi_closed {
                        components.push(Interval::point(hi.as_finite().unwrap().clone()));
                    }
                }
                std::cmp::Ordering::Greater => unreachable!("null intervals are ordered"),
            }
            cursor = (null.hi().clone(), !null.hi_closed());
        }
        if cursor.0 != ExtReal::PosInf {
            components.push(Interval::new(cursor.0, ExtReal::PosInf, cursor.1, false).unwrap());
        }
        debug_assert!(!components.is_empty());
        let first = components.first().unwrap();
        let last = components.last().unwrap();
        let hull = Interval::new(
            first.lo().clone(),
            last.hi().clone(),
            first.lo_closed(),
            last.hi_closed(),
        )
        .unwrap();
        let bounded_gaps = nulls.iter().filter(|g| g.is_bounded()).cloned().collect();
        let outer = hull.complement();
        CoIntervalSupport {
            components,
            hull,
            bounded_gaps,
            outer,
        }
    }

    /// Whether `self ≪ other`: every atom of `self` sits on an atom of
    /// `other` and every positive-density segment of `self` lies (up to
    /// endpoints) inside a positive-density segment of `other`.
    pub fn is_absolutely_continuous_wrt(&self, other: &Distribution) -> bool {
        for (t, _) in self.atoms() {
            if other.atom_at(&t).is_zero() {
                return false;
            }
        }
        let mut bounds: BTreeSet<Rational> = BTreeSet::new();
        for nd in self.nodes.iter().chain(other.nodes.iter()) {
            bounds.insert(nd.t.clone());
        }
        let bounds: Vec<Rational> = bounds.into_iter().collect();
        for i in 0..=bounds.len() {
            let lo = if i == 0 {
                ExtReal::NegInf
            } else {
                ExtReal::Finite(bounds[i - 1].clone())
            };
            if !self.piece_after(&lo).is_constant() && other.piece_after(&lo).is_constant() {
                return false;
            }
        }
        true
    }

    /// Assembles a distribution from atoms plus density/Möbius segments.
    pub fn assemble(
        atoms: Vec<(Rational, Rational)>,
        segments: Vec<SegmentSpec>,
    ) -> Result<Distribution> {
        let err = |msg: String| Err(Error::InvalidDistribution(msg));
        for (t, m) in &atoms {
            if !m.is_positive() {
                return err(format!(
                    "atom mass {} at {} must be positive",
                    format_rational(m),
                    format_rational(t)
                ));
            }
        }
        let atoms = {
            let mut sorted = atoms;
            sorted.sort_by(|x, y| x.0.cmp(&y.0));
            let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(sorted.len());
            for (t, m) in sorted {
                match merged.last_mut() {
                    Some(last) if last.0 == t => last.1 += m,
                    _ => merged.push((t, m)),
                }
            }
            merged
        };
        let mut segments = segments;
        segments.sort_by(|x, y| x.from_ext().cmp(&y.from_ext()));
        for seg in &segments {
            if seg.from_ext() >= seg.to_ext() {
                return err("segment endpoints out of order".into());
            }
            if let SegmentSpec::Density { density, .. } = seg {
                if density.is_negative() {
                    return err("negative density".into());
                }
            }
        }
        for w in segments.windows(2) {
            if w[1].from_ext() < w[0].to_ext() {
                return err(format!(
                    "segments overlap near {}",
                    w[1].from_ext()
                ));
            }
        }

        let mut breaks: BTreeSet<Rational> = atoms.iter().map(|(t, _)| t.clone()).collect();
        for seg in &segments {
            if let ExtReal::Finite(t) = seg.from_ext() {
                breaks.insert(t);
            }
            if let ExtReal::Finite(t) = seg.to_ext() {
                breaks.insert(t);
            }
        }
        if breaks.is_empty() {
            return err("no finite breakpoints".into());
        }
        let breaks: Vec<Rational> = breaks.into_iter().collect();
        let atom_at = |t: &Rational| -> Rational {
            atoms
                .iter()
                .find(|(x, _)| x == t)
                .map(|(_, m)| m.clone())
                .unwrap_or_else(Rational::zero)
        };
        let segment_covering = |lo: &ExtReal, hi: &ExtReal| -> Option<&SegmentSpec> {
            segments
                .iter()
                .find(|seg| &seg.from_ext() <= lo && hi <= &seg.to_ext())
        };

        let mut nodes: Vec<Node> = Vec::with_capacity(breaks.len());
        let mut pieces: Vec<Moebius> = Vec::with_capacity(breaks.len() + 1);
        let mut running = Rational::zero();
        for i in 0..=breaks.len() {
            let lo = if i == 0 {
                ExtReal::NegInf
            } else {
                ExtReal::Finite(breaks[i - 1].clone())
            };
            let hi = if i == breaks.len() {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(breaks[i].clone())
            };
            let piece = match segment_covering(&lo, &hi) {
                None => Moebius::constant(&running),
                Some(SegmentSpec::Density { density, .. }) => {
                    let (u, v) = match (&lo, &hi) {
                        (ExtReal::Finite(u), ExtReal::Finite(v)) => (u, v),
                        _ => return err("density segment must be bounded".into()),
                    };
                    let next = &running + density * (v - u);
                    let piece = Moebius::line_through(u, &running, v, &next);
                    running = next;
                    piece
                }
                Some(SegmentSpec::MoebiusCdf { cdf, .. }) => {
                    match cdf.limit_at(&lo) {
                        ExtReal::Finite(v) if v == running => {}
                        other => {
                            return err(format!(
                                "moebius segment enters at {} but accumulated mass is {}",
                                other,
                                format_rational(&running)
                            ))
                        }
                    }
                    match cdf.limit_at(&hi) {
                        ExtReal::Finite(v) if v >= running => running = v,
                        other => return err(format!("moebius segment exits at {}", other)),
                    }
                    cdf.clone()
                }
            };
            pieces.push(piece);
            if i < breaks.len() {
                let t = breaks[i].clone();
                let f_left = running.clone();
                running += atom_at(&t);
                nodes.push(Node {
                    t,
                    f_left,
                    f_right: running.clone(),
                });
            }
        }
        if !running.is_one() {
            return err(format!(
                "total mass is {}, expected 1",
                format_rational(&running)
            ));
        }
        Distribution::from_parts(nodes, pieces)
    }
}

/// Exact weighted sum of Möbius functions, when representable.
///
/// Functions with proportional denominators combine; constants fold into
/// any group. Two non-constant groups with different denominators cannot
/// be a single Möbius function.
fn sum_moebius(parts: &[(Rational, Moebius)]) -> std::result::Result<Moebius, ()> {
    use std::collections::HashMap;
    let mut groups: HashMap<(num_bigint::BigInt, num_bigint::BigInt), (Rational, Rational)> =
        HashMap::new();
    for (w, m) in parts {
        let key = m.denominator_key();
        let (a, b, c, d) = m.coeffs();
        // Scale so the denominator is exactly the key.
        let lambda = if !key.0.is_zero() {
            c / Rational::from_integer(key.0.clone())
        } else {
            d / Rational::from_integer(key.1.clone())
        };
        let entry = groups
            .entry(key)
            .or_insert_with(|| (Rational::zero(), Rational::zero()));
        entry.0 += w * &a / &lambda;
        entry.1 += w * &b / &lambda;
    }
    let mut constant_total = Rational::zero();
    let mut nonconstant: Vec<((num_bigint::BigInt, num_bigint::BigInt), (Rational, Rational))> =
        Vec::new();
    for (key, (pa, pb)) in groups {
        let ck = Rational::from_integer(key.0.clone());
        let dk = Rational::from_integer(key.1.clone());
        if &pa * &dk == &pb * &ck {
            constant_total += if !key.0.is_zero() { pa / ck } else { pb / dk };
        } else {
            nonconstant.push((key, (pa, pb)));
        }
    }
    match nonconstant.len() {
        0 => Ok(Moebius::constant(&constant_total)),
        1 => {
            let (key, (pa, pb)) = nonconstant.into_iter().next().unwrap();
            let ck = Rational::from_integer(key.0);
            let dk = Rational::from_integer(key.1);
            let a = pa + &constant_total * &ck;
            let b = pb + &constant_total * &dk;
            Ok(Moebius::from_rationals(&a, &b, &ck, &dk).expect("valid denominator"))
        }
        _ => Err(()),
    }
}
