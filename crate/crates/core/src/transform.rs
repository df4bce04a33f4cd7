//! Monotone piecewise-Möbius bijections and the pullback `μ∘g`.
//!
//! A [`MonotoneMap`] is a homeomorphism of the one-point compactification
//! of the line: Möbius pieces over the segments between its breakpoints,
//! circularly continuous, with exactly one point mapping to infinity.
//! Whole-line homeomorphisms are the special case where that point is
//! infinity itself; the inversion family `r_x` sends `x` to infinity and
//! infinity to `0`.
//!
//! `μ∘g` is the set-pullback `(μ∘g)(B) = μ(g(B))`, which equals the
//! classical pushforward along `g⁻¹`. For maps outside the Möbius class a
//! [`MapOracle`] provides certified piecewise-linear approximation.

use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

use crate::distribution::{Distribution, Node};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::moebius::Moebius;
use crate::scalar::{format_rational, rat_from_f64, rat_to_f64, ExtReal, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// A point of the compactified line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CirclePoint {
    Finite(Rational),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneMap {
    breakpoints: Vec<Rational>,
    /// `pieces[i]` acts on the open segment left of breakpoint `i`;
    /// `pieces[n]` on the segment right of the last breakpoint.
    pieces: Vec<Moebius>,
    orientation: Orientation,
}

impl MonotoneMap {
    pub fn from_parts(breakpoints: Vec<Rational>, pieces: Vec<Moebius>) -> Result<MonotoneMap> {
        let err = |msg: String| Err(Error::InvalidMap(msg));
        if pieces.len() != breakpoints.len() + 1 {
            return err(format!(
                "{} breakpoints require {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            ));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return err("breakpoints not strictly ascending".into());
            }
        }
        let mut orientation = None;
        for piece in &pieces {
            let det = piece.det();
            if det.is_zero() {
                return err("constant piece in a bijection".into());
            }
            let inc = det.is_positive();
            match orientation {
                None => orientation = Some(inc),
                Some(o) if o != inc => {
                    return err("pieces disagree on orientation".into());
                }
                _ => {}
            }
        }
        let orientation = if orientation.unwrap() {
            Orientation::Increasing
        } else {
            Orientation::Decreasing
        };
        let n = breakpoints.len();
        for (i, piece) in pieces.iter().enumerate() {
            if let Some(p) = piece.pole() {
                let strictly_inside = (i == 0 || breakpoints[i - 1] < p)
                    && (i == n || p < breakpoints[i]);
                if strictly_inside {
                    return err(format!("pole {} inside piece {}", format_rational(&p), i));
                }
            }
        }
        // Circular continuity at breakpoints and at infinity, and exactly
        // one crossing of infinity.
        let mut crossings = 0usize;
        for i in 0..n {
            let x = &breakpoints[i];
            let left = circle_value(&pieces[i], x);
            let right = circle_value(&pieces[i + 1], x);
            if left != right {
                return err(format!("discontinuity at breakpoint {}", format_rational(x)));
            }
            if left == CirclePoint::Infinity {
                crossings += 1;
            }
        }
        let at_inf_left = ext_to_circle(pieces[0].limit_neg_inf());
        let at_inf_right = ext_to_circle(pieces[n].limit_pos_inf());
        if at_inf_left != at_inf_right {
            return err("discontinuity through infinity".into());
        }
        if at_inf_right == CirclePoint::Infinity {
            crossings += 1;
        }
        if crossings != 1 {
            return err(format!(
                "a bijection of the compactified line must cross infinity exactly once, found {}",
                crossings
            ));
        }

        // Canonical form: merge identical neighbours at finite-valued
        // breakpoints (pole breakpoints stay).
        let mut new_bps: Vec<Rational> = Vec::with_capacity(n);
        let mut new_pieces: Vec<Moebius> = Vec::with_capacity(n + 1);
        let mut piece_iter = pieces.into_iter();
        new_pieces.push(piece_iter.next().unwrap());
        for (x, piece) in breakpoints.into_iter().zip(piece_iter) {
            let prev = new_pieces.last().unwrap();
            if *prev == piece && circle_value(prev, &x) != CirclePoint::Infinity {
                continue;
            }
            new_bps.push(x);
            new_pieces.push(piece);
        }
        Ok(MonotoneMap {
            breakpoints: new_bps,
            pieces: new_pieces,
            orientation,
        })
    }

    pub fn identity() -> MonotoneMap {
        MonotoneMap {
            breakpoints: vec![],
            pieces: vec![Moebius::identity()],
            orientation: Orientation::Increasing,
        }
    }

    /// `t ↦ slope·t + intercept` with nonzero slope.
    pub fn affine(slope: &Rational, intercept: &Rational) -> Result<MonotoneMap> {
        if slope.is_zero() {
            return Err(Error::InvalidMap("affine map needs nonzero slope".into()));
        }
        MonotoneMap::from_parts(vec![], vec![Moebius::affine(slope, intercept)])
    }

    /// The inversion `r_x: t ↦ 1/(t−x)` for finite `x`; the identity for
    /// `x = ∞` (either sign of infinity).
    pub fn r_map(x: &ExtReal) -> MonotoneMap {
        match x {
            ExtReal::Finite(p) => {
                let piece = Moebius::from_rationals(
                    &Rational::zero(),
                    &Rational::one(),
                    &Rational::one(),
                    &(-p),
                )
                .expect("denominator t - x is not identically zero");
                MonotoneMap::from_parts(vec![p.clone()], vec![piece.clone(), piece])
                    .expect("r_x is a valid circle bijection")
            }
            _ => MonotoneMap::identity(),
        }
    }

    /// Piecewise-linear bijection of the line through the given knots, with
    /// linear tails of the given slopes.
    pub fn pwl_map(
        knots: &[(Rational, Rational)],
        lo_slope: &Rational,
        hi_slope: &Rational,
    ) -> Result<MonotoneMap> {
        let err = |msg: &str| Err(Error::InvalidMap(msg.into()));
        if knots.is_empty() {
            return err("piecewise-linear map needs at least one knot");
        }
        if lo_slope.is_zero() || hi_slope.is_zero() {
            return err("tail slopes must be nonzero");
        }
        for w in knots.windows(2) {
            if w[0].0 >= w[1].0 {
                return err("knot abscissae must be strictly increasing");
            }
        }
        let mut breakpoints = Vec::with_capacity(knots.len());
        let mut pieces = Vec::with_capacity(knots.len() + 1);
        let (t0, y0) = &knots[0];
        pieces.push(Moebius::affine(lo_slope, &(y0 - lo_slope * t0)));
        breakpoints.push(t0.clone());
        for w in knots.windows(2) {
            pieces.push(Moebius::line_through(&w[0].0, &w[0].1, &w[1].0, &w[1].1));
            breakpoints.push(w[1].0.clone());
        }
        let (tn, yn) = knots.last().unwrap();
        pieces.push(Moebius::affine(hi_slope, &(yn - hi_slope * tn)));
        MonotoneMap::from_parts(breakpoints, pieces)
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Moebius] {
        &self.pieces
    }

    pub fn is_piecewise_linear(&self) -> bool {
        self.pieces.iter().all(|p| p.pole().is_none())
    }

    /// Image of the point at infinity.
    pub fn phi_infinity(&self) -> CirclePoint {
        ext_to_circle(self.pieces.last().unwrap().limit_pos_inf())
    }

    /// The finite point mapped to infinity, if any.
    pub fn domain_exceptional(&self) -> Option<Rational> {
        self.breakpoints
            .iter()
            .enumerate()
            .find(|(i, x)| circle_value(&self.pieces[*i], x) == CirclePoint::Infinity)
            .map(|(_, x)| x.clone())
    }

    /// The finite point never attained on the line: the image of infinity,
    /// when finite.
    pub fn range_exceptional(&self) -> Option<Rational> {
        match self.phi_infinity() {
            CirclePoint::Finite(v) => Some(v),
            CirclePoint::Infinity => None,
        }
    }

    /// Whether the map restricts to a bijection of the line itself.
    pub fn is_line_bijection(&self) -> bool {
        self.phi_infinity() == CirclePoint::Infinity
    }

    fn piece_index_at(&self, t: &Rational) -> usize {
        match self.breakpoints.binary_search(t) {
            Ok(i) => i, // caller handles breakpoints separately
            Err(i) => i,
        }
    }

    pub fn eval(&self, t: &Rational) -> CirclePoint {
        match self.breakpoints.binary_search(t) {
            Ok(i) => circle_value(&self.pieces[i], t),
            Err(i) => match self.pieces[i].eval(t) {
                Some(v) => CirclePoint::Finite(v),
                None => CirclePoint::Infinity,
            },
        }
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let idx = self
            .breakpoints
            .partition_point(|x| rat_to_f64(x) <= t);
        self.pieces[idx].eval_f64(t)
    }

    /// The unique preimage of a finite point.
    pub fn preimage(&self, y: &Rational) -> CirclePoint {
        for (i, piece) in self.pieces.iter().enumerate() {
            if let Some(t) = piece.solve(y) {
                let lo_ok = i == 0 || self.breakpoints[i - 1] < t;
                let hi_ok = i == self.breakpoints.len() || t < self.breakpoints[i];
                if lo_ok && hi_ok {
                    return CirclePoint::Finite(t);
                }
            }
        }
        for x in &self.breakpoints {
            if self.eval(x) == CirclePoint::Finite(y.clone()) {
                return CirclePoint::Finite(x.clone());
            }
        }
        debug_assert_eq!(self.phi_infinity(), CirclePoint::Finite(y.clone()));
        CirclePoint::Infinity
    }

    /// Ordered open image of the open interval `(u, v)` within piece `i`.
    fn piece_image(&self, i: usize, u: &ExtReal, v: &ExtReal) -> (ExtReal, ExtReal) {
        let piece = &self.pieces[i];
        let increasing = self.orientation == Orientation::Increasing;
        let left = match u {
            ExtReal::Finite(t) if piece.eval(t).is_none() => {
                // Pole at the left edge: an increasing piece climbs out of −∞.
                if increasing {
                    ExtReal::NegInf
                } else {
                    ExtReal::PosInf
                }
            }
            other => piece.limit_at(other),
        };
        let right = match v {
            ExtReal::Finite(t) if piece.eval(t).is_none() => {
                if increasing {
                    ExtReal::PosInf
                } else {
                    ExtReal::NegInf
                }
            }
            other => piece.limit_at(other),
        };
        if increasing {
            (left, right)
        } else {
            (right, left)
        }
    }

    /// Functional inverse.
    pub fn invert(&self) -> MonotoneMap {
        let mut bps: BTreeSet<Rational> = BTreeSet::new();
        for x in &self.breakpoints {
            if let CirclePoint::Finite(v) = self.eval(x) {
                bps.insert(v);
            }
        }
        if let CirclePoint::Finite(v) = self.phi_infinity() {
            bps.insert(v);
        }
        let bps: Vec<Rational> = bps.into_iter().collect();
        let mut pieces: Vec<Moebius> = Vec::with_capacity(bps.len() + 1);
        for j in 0..=bps.len() {
            let lo = if j == 0 {
                ExtReal::NegInf
            } else {
                ExtReal::Finite(bps[j - 1].clone())
            };
            let hi = if j == bps.len() {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(bps[j].clone())
            };
            let w = probe_between(&lo, &hi);
            let mut found = None;
            for (i, piece) in self.pieces.iter().enumerate() {
                if let Some(t) = piece.solve(&w) {
                    let lo_ok = i == 0 || self.breakpoints[i - 1] < t;
                    let hi_ok = i == self.breakpoints.len() || t < self.breakpoints[i];
                    if lo_ok && hi_ok {
                        found = Some(piece.inverse());
                        break;
                    }
                }
            }
            pieces.push(found.expect("bijection covers every interior point"));
        }
        MonotoneMap::from_parts(bps, pieces).expect("inverse of a bijection is a bijection")
    }
}

/// `outer ∘ inner`, exact in the piecewise-Möbius class.
pub fn compose(outer: &MonotoneMap, inner: &MonotoneMap) -> MonotoneMap {
    let mut bps: BTreeSet<Rational> = inner.breakpoints.iter().cloned().collect();
    for y in &outer.breakpoints {
        if let CirclePoint::Finite(t) = inner.invert_point(y) {
            bps.insert(t);
        }
    }
    let bps: Vec<Rational> = bps.into_iter().collect();
    let mut pieces: Vec<Moebius> = Vec::with_capacity(bps.len() + 1);
    for j in 0..=bps.len() {
        let lo = if j == 0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(bps[j - 1].clone())
        };
        let hi = if j == bps.len() {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(bps[j].clone())
        };
        let w = probe_between(&lo, &hi);
        let inner_piece = &inner.pieces[inner.piece_index_at(&w)];
        let hv = inner_piece
            .eval(&w)
            .expect("interior probe away from poles");
        let outer_piece = &outer.pieces[outer.piece_index_at(&hv)];
        pieces.push(outer_piece.compose(inner_piece));
    }
    MonotoneMap::from_parts(bps, pieces).expect("composition of bijections is a bijection")
}

impl MonotoneMap {
    fn invert_point(&self, y: &Rational) -> CirclePoint {
        self.preimage(y)
    }
}

fn circle_value(piece: &Moebius, t: &Rational) -> CirclePoint {
    match piece.eval(t) {
        Some(v) => CirclePoint::Finite(v),
        None => CirclePoint::Infinity,
    }
}

fn ext_to_circle(e: ExtReal) -> CirclePoint {
    match e {
        ExtReal::Finite(v) => CirclePoint::Finite(v),
        _ => CirclePoint::Infinity,
    }
}

fn probe_between(lo: &ExtReal, hi: &ExtReal) -> Rational {
    match (lo, hi) {
        (ExtReal::NegInf, ExtReal::PosInf) => Rational::zero(),
        (ExtReal::NegInf, ExtReal::Finite(b)) => b - Rational::one(),
        (ExtReal::Finite(a), ExtReal::PosInf) => a + Rational::one(),
        (ExtReal::Finite(a), ExtReal::Finite(b)) => (a + b) / Rational::from_integer(2.into()),
        _ => unreachable!("empty probe range"),
    }
}

/// Mass of `g((−∞, x])` (or with `x` excluded) under `μ`.
fn ray_mass(mu: &Distribution, g: &MonotoneMap, x: &Rational, include_x: bool) -> Rational {
    let mut total = Rational::zero();
    let xe = ExtReal::Finite(x.clone());
    for (i, _) in g.pieces.iter().enumerate() {
        let lo = if i == 0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(g.breakpoints[i - 1].clone())
        };
        let hi = if i == g.breakpoints.len() {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(g.breakpoints[i].clone())
        };
        if xe <= lo {
            break;
        }
        let sub_hi = if xe < hi { &xe } else { &hi };
        if lo < *sub_hi {
            let (img_lo, img_hi) = g.piece_image(i, &lo, sub_hi);
            let iv = Interval::new(img_lo, img_hi, false, false)
                .expect("piece image of a nondegenerate segment");
            total += mu.interval_mass(&iv);
        }
        if xe < hi {
            // x is interior to this piece; add its image point if included.
            if include_x {
                if let Some(v) = g.pieces[i].eval(x) {
                    total += mu.atom_at(&v);
                }
            }
            break;
        }
        // The breakpoint at hi (if any) maps to a point; count it when it
        // lies in the ray.
        if let ExtReal::Finite(bp) = &hi {
            if *bp < *x || (bp == x && include_x) {
                if let CirclePoint::Finite(v) = g.eval(bp) {
                    total += mu.atom_at(&v);
                }
            }
            if bp == x {
                break;
            }
        }
    }
    total
}

/// The pullback `μ∘g`, exact in the Möbius class.
///
/// Fails with mass deficiency when `μ` charges the point `g` never attains
/// on the line (the image of infinity).
pub fn pullback(mu: &Distribution, g: &MonotoneMap) -> Result<Distribution> {
    if let Some(p) = g.range_exceptional() {
        let atom = mu.atom_at(&p);
        if atom.is_positive() {
            return Err(Error::MassDeficiency {
                point: format_rational(&p),
                mass: format_rational(&(Rational::one() - atom)),
            });
        }
    }
    let mut bps: BTreeSet<Rational> = g.breakpoints.iter().cloned().collect();
    for nd in mu.nodes() {
        if let CirclePoint::Finite(t) = g.preimage(&nd.t) {
            bps.insert(t);
        }
    }
    let bps: Vec<Rational> = bps.into_iter().collect();
    debug_assert!(!bps.is_empty());

    let mut nodes = Vec::with_capacity(bps.len());
    for x in &bps {
        nodes.push(Node {
            t: x.clone(),
            f_left: ray_mass(mu, g, x, false),
            f_right: ray_mass(mu, g, x, true),
        });
    }
    let sigma = match g.orientation {
        Orientation::Increasing => Rational::one(),
        Orientation::Decreasing => -Rational::one(),
    };
    let mut pieces: Vec<Moebius> = Vec::with_capacity(bps.len() + 1);
    for j in 0..=bps.len() {
        let lo = if j == 0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(bps[j - 1].clone())
        };
        let hi = if j == bps.len() {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(bps[j].clone())
        };
        let w = probe_between(&lo, &hi);
        let g_piece = &g.pieces[g.piece_index_at(&w)];
        let s = g_piece.eval(&w).expect("interior probe away from poles");
        let mu_piece = mu.piece_after(&ExtReal::Finite(s.clone()));
        let composed = mu_piece.compose(g_piece);
        let probe_mass = ray_mass(mu, g, &w, true);
        let at_probe = composed.eval(&w).expect("image avoids CDF poles");
        let offset = &probe_mass - &sigma * &at_probe;
        pieces.push(composed.scale_add(&sigma, &offset));
    }
    Distribution::from_parts(nodes, pieces).map_err(|e| match e {
        Error::InvalidDistribution(msg) => Error::InvalidDistribution(format!(
            "pullback left the probability class: {}",
            msg
        )),
        other => other,
    })
}

/// The continuous-measure transformation family `μ ↦ μ∘(g∘r_x)`: a
/// whole-line homeomorphism `g` precomposed with an inversion. Defined on
/// atom-free measures, where it preserves the Kuiper distance.
pub struct ContinuousIsometry {
    map: MonotoneMap,
}

impl ContinuousIsometry {
    pub fn new(g: MonotoneMap, x: &ExtReal) -> Result<ContinuousIsometry> {
        if !g.is_line_bijection() {
            return Err(Error::InvalidMap(
                "the outer factor must be a bijection of the line".into(),
            ));
        }
        Ok(ContinuousIsometry {
            map: compose(&g, &MonotoneMap::r_map(x)),
        })
    }

    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    pub fn apply(&self, mu: &Distribution) -> Result<Distribution> {
        if let Some((t, _)) = mu.atoms().first() {
            return Err(Error::AtomicInput(format_rational(t)));
        }
        pullback(mu, &self.map)
    }
}

/// The general transformation family `μ ↦ μ∘g` for a whole-line
/// homeomorphism `g`: acts on every measure, atoms included, and preserves
/// the Kuiper distance.
pub struct GeneralIsometry {
    map: MonotoneMap,
}

impl GeneralIsometry {
    pub fn new(map: MonotoneMap) -> Result<GeneralIsometry> {
        if !map.is_line_bijection() {
            return Err(Error::InvalidMap(
                "the general family requires a bijection of the line".into(),
            ));
        }
        Ok(GeneralIsometry { map })
    }

    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    pub fn apply(&self, mu: &Distribution) -> Result<Distribution> {
        pullback(mu, &self.map)
    }
}

/// A strictly monotone real map given only by evaluation, with its inverse.
pub struct MapOracle {
    forward: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    inverse: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    increasing: bool,
}

impl MapOracle {
    pub fn new(
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        increasing: bool,
    ) -> MapOracle {
        MapOracle {
            forward: Box::new(forward),
            inverse: Box::new(inverse),
            increasing,
        }
    }

    pub fn identity() -> MapOracle {
        MapOracle::new(|t| t, |t| t, true)
    }

    pub fn forward(&self, t: f64) -> f64 {
        (self.forward)(t)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (self.inverse)(y)
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    fn check_consistency(&self, t: f64) -> Result<()> {
        let round = self.inverse(self.forward(t));
        if (round - t).abs() > 1e-12 * t.abs().max(1.0) {
            return Err(Error::OracleInconsistent(format!(
                "inverse(forward({t})) = {round}"
            )));
        }
        Ok(())
    }
}

/// Certified piecewise-linear approximation of `μ∘o`.
///
/// Produces `ν` with `d_Ku(μ∘o, ν) ≤ ε`: tails are cut below `ε/8` of
/// mass, interior cells below `ε/4` of mass, and monotone interpolation
/// bounds the Kuiper error by twice the resulting sup-norm error.
pub fn certified_pushforward(mu: &Distribution, o: &MapOracle, eps: f64) -> Result<Distribution> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveTolerance(format!("{eps}")));
    }
    if let Some((t, _)) = mu.atoms().first() {
        return Err(Error::AtomicInput(format_rational(t)));
    }
    let transported = |t: &Rational| -> Result<Rational> {
        let tf = rat_to_f64(t);
        o.check_consistency(tf)?;
        let u = o.forward(tf);
        let ur = rat_from_f64(u)
            .ok_or_else(|| Error::OracleInconsistent(format!("forward({tf}) = {u}")))?;
        let f = mu.cdf(&ur);
        Ok(if o.increasing {
            f
        } else {
            Rational::one() - f
        })
    };
    let tail = rat_from_f64(eps / 8.0).unwrap();
    let cell = rat_from_f64(eps / 4.0).unwrap();
    // Bracket through the inverse image of extreme quantiles.
    let q_small = mu.quantile(&rat_from_f64(eps / 16.0).unwrap());
    let q_large = mu.quantile(&(Rational::one() - rat_from_f64(eps / 16.0).unwrap()));
    let (raw_lo, raw_hi) = if o.increasing {
        (o.inverse(rat_to_f64(&q_small)), o.inverse(rat_to_f64(&q_large)))
    } else {
        (o.inverse(rat_to_f64(&q_large)), o.inverse(rat_to_f64(&q_small)))
    };
    let t_lo = rat_from_f64(raw_lo)
        .ok_or_else(|| Error::OracleInconsistent("bracketing diverged".into()))?;
    let t_hi = rat_from_f64(raw_hi)
        .ok_or_else(|| Error::OracleInconsistent("bracketing diverged".into()))?;
    if t_lo >= t_hi {
        return Err(Error::OracleInconsistent(
            "inverse bracketing is not ordered".into(),
        ));
    }
    let h_lo = transported(&t_lo)?;
    let h_hi = transported(&t_hi)?;
    if h_lo > tail || h_hi < Rational::one() - &tail {
        return Err(Error::OracleInconsistent(
            "bracketing misses the tail mass target".into(),
        ));
    }

    // Adaptive bisection until every cell carries at most `cell` mass.
    let mut nodes: Vec<(Rational, Rational)> = vec![(t_lo.clone(), h_lo.clone())];
    let mut stack: Vec<(Rational, Rational, Rational, Rational, u32)> =
        vec![(t_lo, h_lo, t_hi.clone(), h_hi.clone(), 0)];
    while let Some((a, ha, b, hb, depth)) = stack.pop() {
        if &hb - &ha <= cell {
            nodes.push((b, hb));
            continue;
        }
        if depth >= 64 {
            return Err(Error::OracleInconsistent(
                "transported CDF concentrates like an atom".into(),
            ));
        }
        let mid = rat_from_f64((rat_to_f64(&a) + rat_to_f64(&b)) / 2.0).unwrap();
        if mid <= a || mid >= b {
            return Err(Error::OracleInconsistent(
                "bisection exhausted f64 resolution".into(),
            ));
        }
        let hm = transported(&mid)?;
        // Right half is pushed first so nodes emerge in ascending order.
        stack.push((mid.clone(), hm.clone(), b, hb, depth + 1));
        stack.push((a, ha, mid, hm, depth + 1));
    }

    let zero = Rational::zero();
    let one = Rational::one();
    let m = nodes.len();
    let mut dist_nodes = Vec::with_capacity(m);
    let mut pieces = Vec::with_capacity(m + 1);
    pieces.push(Moebius::constant(&zero));
    for (i, (t, h)) in nodes.iter().enumerate() {
        let value = if i == 0 {
            zero.clone()
        } else if i == m - 1 {
            one.clone()
        } else {
            h.clone()
        };
        dist_nodes.push(Node {
            t: t.clone(),
            f_left: value.clone(),
            f_right: value.clone(),
        });
        if i + 1 < m {
            let next = if i + 1 == m - 1 {
                one.clone()
            } else {
                nodes[i + 1].1.clone()
            };
            if next == value {
                pieces.push(Moebius::constant(&value));
            } else {
                pieces.push(Moebius::line_through(t, &value, &nodes[i + 1].0, &next));
            }
        }
    }
    pieces.push(Moebius::constant(&one));
    Distribution::from_parts(dist_nodes, pieces).map_err(|e| {
        Error::OracleInconsistent(format!("oracle produced a non-monotone CDF: {}", e))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::kuiper_distance;
    use crate::scalar::{rat, rat_int};

    fn u(lo: i64, hi: i64) -> Distribution {
        Distribution::uniform(rat_int(lo), rat_int(hi)).unwrap()
    }

    #[test]
    fn r_map_forms() {
        let r0 = MonotoneMap::r_map(&ExtReal::Finite(rat_int(0)));
        assert_eq!(r0.eval(&rat_int(2)), CirclePoint::Finite(rat(1, 2)));
        assert_eq!(r0.eval(&rat_int(0)), CirclePoint::Infinity);
        assert_eq!(r0.domain_exceptional(), Some(rat_int(0)));
        assert_eq!(r0.range_exceptional(), Some(rat_int(0)));
        let r1 = MonotoneMap::r_map(&ExtReal::Finite(rat_int(1)));
        assert_eq!(r1.eval(&rat_int(0)), CirclePoint::Finite(rat_int(-1)));
        let rinf = MonotoneMap::r_map(&ExtReal::PosInf);
        assert_eq!(rinf, MonotoneMap::identity());
    }

    #[test]
    fn compose_and_invert_algebra() {
        let r0 = MonotoneMap::r_map(&ExtReal::Finite(rat_int(0)));
        assert_eq!(compose(&r0, &r0), MonotoneMap::identity());

        let g = MonotoneMap::affine(&rat_int(2), &rat_int(0)).unwrap();
        let ginv = g.invert();
        assert_eq!(ginv.eval(&rat_int(4)), CirclePoint::Finite(rat_int(2)));
        assert_eq!(compose(&g, &ginv), MonotoneMap::identity());

        let pw = MonotoneMap::pwl_map(
            &[(rat_int(0), rat_int(0)), (rat_int(1), rat_int(3))],
            &rat_int(1),
            &rat(1, 2),
        )
        .unwrap();
        let h = compose(&pw, &g);
        assert_eq!(
            compose(&h.invert(), &h),
            MonotoneMap::identity()
        );
        assert_eq!(
            h.invert(),
            compose(&g.invert(), &pw.invert())
        );
    }

    #[test]
    fn pwl_map_validation() {
        assert!(MonotoneMap::pwl_map(
            &[(rat_int(0), rat_int(0)), (rat_int(1), rat_int(0))],
            &rat_int(1),
            &rat_int(1)
        )
        .is_err());
        assert!(MonotoneMap::pwl_map(&[(rat_int(0), rat_int(0))], &rat_int(0), &rat_int(1)).is_err());
        let dec = MonotoneMap::pwl_map(
            &[(rat_int(0), rat_int(5)), (rat_int(1), rat_int(2))],
            &rat_int(-1),
            &rat_int(-2),
        )
        .unwrap();
        assert_eq!(dec.orientation(), Orientation::Decreasing);
    }

    #[test]
    fn pullback_identity_and_scaling() {
        let d = u(0, 2);
        assert_eq!(pullback(&d, &MonotoneMap::identity()).unwrap(), d);
        // g(t) = 2t: (μ∘g)([0,1]) = μ([0,2]).
        let g = MonotoneMap::affine(&rat_int(2), &rat_int(0)).unwrap();
        assert_eq!(pullback(&d, &g).unwrap(), u(0, 1));
    }

    #[test]
    fn pullback_through_inversion() {
        // U[1,2] through r_0: CDF 2 − 1/t on [1/2, 1].
        let d = u(1, 2);
        let r0 = MonotoneMap::r_map(&ExtReal::Finite(rat_int(0)));
        let out = pullback(&d, &r0).unwrap();
        assert_eq!(out.cdf(&rat(1, 2)), rat_int(0));
        assert_eq!(out.cdf(&rat(2, 3)), rat(1, 2));
        assert_eq!(out.cdf(&rat_int(1)), rat_int(1));
        assert!(out.is_continuous());
        // Round trip restores the original.
        assert_eq!(pullback(&out, &r0).unwrap(), d);
    }

    #[test]
    fn pullback_mass_deficiency() {
        let d = Distribution::dirac(rat_int(0));
        let r0 = MonotoneMap::r_map(&ExtReal::Finite(rat_int(0)));
        match pullback(&d, &r0) {
            Err(Error::MassDeficiency { point, mass }) => {
                assert_eq!(point, "0");
                assert_eq!(mass, "0");
            }
            other => panic!("expected mass deficiency, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn atoms_transport_through_line_maps() {
        let m = Distribution::mix(&[
            (rat(1, 2), Distribution::dirac(rat_int(0))),
            (rat(1, 2), Distribution::dirac(rat_int(2))),
        ])
        .unwrap();
        let g = MonotoneMap::affine(&rat_int(2), &rat_int(0)).unwrap();
        let out = pullback(&m, &g).unwrap();
        assert_eq!(out.atom_at(&rat_int(0)), rat(1, 2));
        assert_eq!(out.atom_at(&rat_int(1)), rat(1, 2));
    }

    #[test]
    fn isometry_families() {
        let iso = ContinuousIsometry::new(MonotoneMap::identity(), &ExtReal::Finite(rat_int(0)))
            .unwrap();
        let a = u(1, 2);
        let b = Distribution::uniform(rat_int(1), rat_int(3)).unwrap();
        let ta = iso.apply(&a).unwrap();
        let tb = iso.apply(&b).unwrap();
        let before = kuiper_distance(&a, &b);
        let after = kuiper_distance(&ta, &tb);
        assert_eq!(
            before.as_exact().unwrap(),
            after.as_exact().unwrap()
        );
        assert_eq!(before.as_exact().unwrap(), &rat(1, 2));

        assert!(iso.apply(&Distribution::dirac(rat_int(3))).is_err());

        let gen = GeneralIsometry::new(
            MonotoneMap::affine(&rat_int(1), &rat_int(5)).unwrap(),
        )
        .unwrap();
        let d0 = Distribution::dirac(rat_int(0));
        let du = u(0, 1);
        let before = kuiper_distance(&d0, &du);
        let after = kuiper_distance(&gen.apply(&d0).unwrap(), &gen.apply(&du).unwrap());
        assert_eq!(before.as_exact().unwrap(), after.as_exact().unwrap());
        assert!(GeneralIsometry::new(MonotoneMap::r_map(&ExtReal::Finite(rat_int(0)))).is_err());
    }

    #[test]
    fn certified_pushforward_identity_and_inversion() {
        let d = u(0, 1);
        let out = certified_pushforward(&d, &MapOracle::identity(), 1e-3).unwrap();
        let err = kuiper_distance(&d, &out);
        assert!(err.to_f64() <= 1e-3);

        // r_0 as an oracle on U[1,2], against the exact pullback.
        let oracle = MapOracle::new(|t| 1.0 / t, |y| 1.0 / y, false);
        let approx = certified_pushforward(&u(1, 2), &oracle, 1e-3).unwrap();
        let exact = pullback(&u(1, 2), &MonotoneMap::r_map(&ExtReal::Finite(rat_int(0)))).unwrap();
        let err = kuiper_distance(&approx, &exact);
        assert!(err.to_f64() <= 1e-3, "error {}", err.to_f64());

        // A tighter tolerance still certifies; spot-check the CDF instead
        // of paying for a 40k-node metric computation.
        let fine = certified_pushforward(&u(1, 2), &oracle, 1e-4).unwrap();
        for probe in [rat(5, 9), rat(3, 4), rat(9, 10)] {
            let got = rat_to_f64(&fine.cdf(&probe));
            let want = rat_to_f64(&exact.cdf(&probe));
            assert!((got - want).abs() <= 1e-4, "probe {probe}");
        }

        assert!(certified_pushforward(&d, &MapOracle::identity(), 0.0).is_err());
        assert!(certified_pushforward(
            &Distribution::dirac(rat_int(0)),
            &MapOracle::identity(),
            1e-3
        )
        .is_err());
    }

    #[test]
    fn certified_pushforward_transcendental_map() {
        // t + sin(t)/2 is strictly increasing but far outside the Möbius
        // class; invert by bisection. The output CDF must track the exact
        // transported CDF within the certificate.
        let forward = |t: f64| t + 0.5 * t.sin();
        let inverse = move |y: f64| {
            let (mut lo, mut hi) = (y - 1.0, y + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if forward(mid) < y {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let oracle = MapOracle::new(forward, inverse, true);
        let mu = u(0, 1);
        let eps = 1e-4;
        let out = certified_pushforward(&mu, &oracle, eps).unwrap();
        for probe in [-0.3f64, 0.1, 0.4, 0.8] {
            // (μ∘o)((−∞, t]) = F_μ(o(t)).
            let want = forward(probe).clamp(0.0, 1.0);
            let got = crate::scalar::rat_to_f64(&out.cdf(&rat_from_f64(probe).unwrap()));
            assert!((got - want).abs() <= eps, "probe {probe}: {got} vs {want}");
        }
    }

    #[test]
    fn inconsistent_oracle_is_rejected() {
        let broken = MapOracle::new(|t| t, |y| y + 1.0, true);
        match certified_pushforward(&u(0, 1), &broken, 1e-3) {
            Err(Error::OracleInconsistent(_)) => {}
            other => panic!("expected oracle rejection, got {:?}", other.map(|_| ())),
        }
    }
}
