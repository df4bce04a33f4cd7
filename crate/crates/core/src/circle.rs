//! Measures on the unit circle in angle coordinates and the arc-maximum
//! metric.
//!
//! Angles live in `[−π, π)` with the basepoint at `−π` (the point the line
//! never reaches under `τ(t) = ξ_{2·arctan t}`). Circle CDFs are
//! piecewise-linear in the angle with atoms at breakpoints; everything here
//! is floating point with 1e-12 working tolerance, never exactness claims.
//! The implementation is an independent cyclic treatment, not a re-skin of
//! the line code, so the line↔circle correspondence tests are a genuine
//! cross-check.

use std::f64::consts::PI;

use crate::distribution::{Distribution, Node};
use crate::error::{Error, Result};
use crate::moebius::Moebius;
use num_traits::{One, Zero};

use crate::scalar::{format_rational, rat_from_f64, rat_to_f64, ExtReal, Rational};

const MASS_TOL: f64 = 1e-9;

fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = (x + PI) % two_pi;
    if y < 0.0 {
        y += two_pi;
    }
    let out = y - PI;
    if out >= PI {
        -PI
    } else {
        out
    }
}

/// A possibly degenerate arc: start angle plus a counterclockwise extent.
/// The full circle is the canonical `extent = 2π` representation.
#[derive(Clone, Debug)]
pub struct Arc {
    start: f64,
    extent: f64,
    start_closed: bool,
    end_closed: bool,
}

impl Arc {
    pub fn new(start: f64, extent: f64, start_closed: bool, end_closed: bool) -> Result<Arc> {
        if !start.is_finite() || !extent.is_finite() || extent < 0.0 || extent >= 2.0 * PI {
            return Err(Error::InvalidInterval(format!(
                "arc needs finite start and extent in [0, 2π), got start={start}, extent={extent}"
            )));
        }
        if extent == 0.0 && !(start_closed && end_closed) {
            return Err(Error::InvalidInterval(
                "degenerate arc must be a closed point".into(),
            ));
        }
        Ok(Arc {
            start: wrap_angle(start),
            extent,
            start_closed,
            end_closed,
        })
    }

    pub fn point(theta: f64) -> Arc {
        Arc {
            start: wrap_angle(theta),
            extent: 0.0,
            start_closed: true,
            end_closed: true,
        }
    }

    pub fn full() -> Arc {
        Arc {
            start: -PI,
            extent: 2.0 * PI,
            start_closed: true,
            end_closed: true,
        }
    }

    pub fn is_full(&self) -> bool {
        self.extent >= 2.0 * PI
    }

    pub fn is_degenerate(&self) -> bool {
        self.extent == 0.0
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn rotated(&self, theta: f64) -> Arc {
        Arc {
            start: wrap_angle(self.start + theta),
            extent: self.extent,
            start_closed: self.start_closed,
            end_closed: self.end_closed,
        }
    }

    /// The complementary arc; complement of a point is the open arc around
    /// the circle, complement of the full circle is undefined (returns a
    /// degenerate empty-extent arc is impossible, so full maps to a point
    /// complement only when callers avoid it).
    pub fn complement(&self) -> Arc {
        Arc {
            start: wrap_angle(self.start + self.extent),
            extent: 2.0 * PI - self.extent,
            start_closed: !self.end_closed,
            end_closed: !self.start_closed,
        }
    }
}

/// A circle CDF node: angle, left limit and value of the cumulative mass
/// measured counterclockwise from the basepoint `−π`.
#[derive(Clone, Debug)]
pub struct CircleNode {
    pub theta: f64,
    pub f_left: f64,
    pub f_right: f64,
}

/// A probability measure on the circle: atoms plus a CDF piecewise linear
/// in the angle. The first node is always the basepoint `−π` with
/// `f_left = 0`; the CDF climbs linearly to 1 at `π` after the last node.
#[derive(Clone, Debug)]
pub struct CircleDistribution {
    nodes: Vec<CircleNode>,
}

impl CircleDistribution {
    pub fn from_parts(mut nodes: Vec<CircleNode>) -> Result<CircleDistribution> {
        let err = |msg: String| Err(Error::InvalidDistribution(msg));
        for nd in &nodes {
            if !nd.theta.is_finite() || nd.theta < -PI || nd.theta >= PI {
                return err(format!("node angle {} outside [-π, π)", nd.theta));
            }
            if !(nd.f_left.is_finite() && nd.f_right.is_finite()) {
                return err("non-finite CDF value".into());
            }
        }
        nodes.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
        for w in nodes.windows(2) {
            if w[0].theta == w[1].theta {
                return err(format!("duplicate node angle {}", w[0].theta));
            }
        }
        if nodes.first().map(|nd| nd.theta) != Some(-PI) {
            nodes.insert(
                0,
                CircleNode {
                    theta: -PI,
                    f_left: 0.0,
                    f_right: 0.0,
                },
            );
        }
        // Monotonicity within tolerance, then exact clamping.
        let mut run = 0.0f64;
        for nd in nodes.iter_mut() {
            for v in [&mut nd.f_left, &mut nd.f_right] {
                if *v < run - MASS_TOL || *v > 1.0 + MASS_TOL {
                    return err(format!("CDF value {} breaks monotonicity", v));
                }
                run = run.max(*v).min(1.0);
                *v = run;
            }
        }
        nodes[0].f_left = 0.0;
        Ok(CircleDistribution { nodes })
    }

    /// The normalized arc-length measure.
    pub fn uniform() -> CircleDistribution {
        CircleDistribution {
            nodes: vec![CircleNode {
                theta: -PI,
                f_left: 0.0,
                f_right: 0.0,
            }],
        }
    }

    /// Builds from atoms `(angle, mass)` and constant-density cells
    /// `(from, to, mass)` with `−π ≤ from < to ≤ π`. Total mass must be 1
    /// within 1e-9; values are renormalized exactly to 1.
    pub fn from_items(atoms: &[(f64, f64)], cells: &[(f64, f64, f64)]) -> Result<CircleDistribution> {
        let err = |msg: String| Err(Error::InvalidDistribution(msg));
        let mut cells: Vec<(f64, f64, f64)> = cells.to_vec();
        cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for c in &cells {
            if c.0 < -PI - 1e-12 || c.1 > PI + 1e-12 || c.0 >= c.1 || c.2 < 0.0 {
                return err(format!("bad cell ({}, {}, mass {})", c.0, c.1, c.2));
            }
        }
        for w in cells.windows(2) {
            if w[1].0 < w[0].1 - 1e-9 {
                return err(format!("cells overlap near angle {}", w[1].0));
            }
        }
        let mut atoms: Vec<(f64, f64)> = atoms.to_vec();
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for a in &atoms {
            if a.1 < 0.0 {
                return err("negative atom mass".into());
            }
        }
        let total: f64 =
            atoms.iter().map(|a| a.1).sum::<f64>() + cells.iter().map(|c| c.2).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOL {
            return err(format!("total mass {} is not 1", total));
        }

        // Breakpoint sweep: accumulate continuous mass up to each
        // breakpoint, then any atom jump there.
        let mut breaks: Vec<f64> = Vec::new();
        for &(a, b, _) in &cells {
            breaks.push(a.max(-PI));
            if b < PI {
                breaks.push(b);
            }
        }
        for &(th, _) in &atoms {
            breaks.push(wrap_angle(th));
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let continuous_between = |lo: f64, hi: f64| -> f64 {
            let mut acc = 0.0;
            for &(a, b, m) in &cells {
                let from = a.max(lo);
                let to = b.min(hi);
                if to > from {
                    acc += m * (to - from) / (b - a);
                }
            }
            acc
        };
        let atom_mass_at = |th: f64| -> f64 {
            atoms
                .iter()
                .filter(|(a, _)| wrap_angle(*a) == th)
                .map(|(_, m)| m)
                .sum()
        };
        let mut nodes: Vec<CircleNode> = Vec::new();
        let mut run = 0.0f64;
        let mut prev = -PI;
        for theta in breaks {
            run += continuous_between(prev, theta) / total;
            let f_left = run;
            run += atom_mass_at(theta) / total;
            if theta < PI {
                nodes.push(CircleNode {
                    theta,
                    f_left,
                    f_right: run,
                });
            }
            prev = theta;
        }
        CircleDistribution::from_parts(nodes)
    }

    pub fn nodes(&self) -> &[CircleNode] {
        &self.nodes
    }

    pub fn atoms(&self) -> Vec<(f64, f64)> {
        self.nodes
            .iter()
            .filter(|nd| nd.f_right > nd.f_left)
            .map(|nd| (nd.theta, nd.f_right - nd.f_left))
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.nodes.iter().all(|nd| nd.f_right == nd.f_left)
    }

    /// Cumulative mass of `[−π, θ]` and its left limit.
    fn g_pair(&self, theta: f64) -> (f64, f64) {
        let theta = theta.clamp(-PI, PI);
        let n = self.nodes.len();
        let idx = self.nodes.partition_point(|nd| nd.theta < theta);
        if idx < n && self.nodes[idx].theta == theta {
            return (self.nodes[idx].f_left, self.nodes[idx].f_right);
        }
        // Interpolate inside the cell left of idx.
        let (t0, v0) = {
            let nd = &self.nodes[idx - 1];
            (nd.theta, nd.f_right)
        };
        let (t1, v1) = if idx < n {
            (self.nodes[idx].theta, self.nodes[idx].f_left)
        } else {
            (PI, 1.0)
        };
        let val = if t1 > t0 {
            v0 + (theta - t0) * (v1 - v0) / (t1 - t0)
        } else {
            v0
        };
        (val, val)
    }

    pub fn g_left(&self, theta: f64) -> f64 {
        self.g_pair(theta).0
    }

    pub fn g_right(&self, theta: f64) -> f64 {
        self.g_pair(theta).1
    }

    /// Measure of an arc, honoring wraparound and endpoint flags.
    pub fn arc_mass(&self, arc: &Arc) -> f64 {
        if arc.is_full() {
            return 1.0;
        }
        if arc.is_degenerate() {
            let (l, r) = self.g_pair(arc.start);
            return r - l;
        }
        let start_term = if arc.start_closed {
            self.g_left(arc.start)
        } else {
            self.g_right(arc.start)
        };
        let raw_end = arc.start + arc.extent;
        if raw_end < PI {
            let end_term = if arc.end_closed {
                self.g_right(raw_end)
            } else {
                self.g_left(raw_end)
            };
            end_term - start_term
        } else {
            let wrapped = raw_end - 2.0 * PI;
            let end_term = if arc.end_closed {
                self.g_right(wrapped)
            } else {
                self.g_left(wrapped)
            };
            (1.0 - start_term) + end_term
        }
    }

    /// Rotates every angle by `theta` (mod 2π).
    ///
    /// New nodes are the rotated images of the old ones plus the basepoint;
    /// their CDF values are arc masses of the rotated-back arcs, so the
    /// linear pieces carry over without event bookkeeping.
    pub fn rotate(&self, theta: f64) -> CircleDistribution {
        // The original angle that lands on the basepoint.
        let cut = wrap_angle(-PI - theta);
        let mut thetas: Vec<f64> = self
            .nodes
            .iter()
            .map(|nd| wrap_angle(nd.theta + theta))
            .collect();
        thetas.push(-PI);
        thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        thetas.dedup();
        let mut nodes = Vec::with_capacity(thetas.len());
        for phi in thetas {
            let (f_left, f_right) = if phi == -PI {
                let (l, r) = self.g_pair(cut);
                (0.0, r - l)
            } else {
                let extent = phi + PI;
                let closed = Arc::new(cut, extent, true, true).expect("extent below 2π");
                let open_end = Arc::new(cut, extent, true, false).expect("extent below 2π");
                (self.arc_mass(&open_end), self.arc_mass(&closed))
            };
            nodes.push(CircleNode {
                theta: phi,
                f_left,
                f_right,
            });
        }
        CircleDistribution::from_parts(nodes).expect("rotation preserves a valid distribution")
    }
}

/// The arc-maximum (cyclic Kuiper) metric: maximum of `|c1(A) − c2(A)|`
/// over arcs with endpoints in the merged breakpoint set, via the cyclic
/// CDF-difference span (max minus min over all one-sided values).
pub fn circle_kuiper(c1: &CircleDistribution, c2: &CircleDistribution) -> f64 {
    let mut thetas: Vec<f64> = c1
        .nodes
        .iter()
        .chain(c2.nodes.iter())
        .map(|nd| nd.theta)
        .collect();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup();
    let mut max_d = 0.0f64; // the basepoint contributes D = 0
    let mut min_d = 0.0f64;
    for th in thetas {
        let (l1, r1) = c1.g_pair(th);
        let (l2, r2) = c2.g_pair(th);
        for d in [l1 - l2, r1 - r2] {
            max_d = max_d.max(d);
            min_d = min_d.min(d);
        }
    }
    max_d - min_d
}

/// Brute-force oracle for [`circle_kuiper`]: enumerates arcs between all
/// ordered pairs of merged breakpoints (all four openness combinations,
/// both ways around), degenerate arcs, and the full circle, through
/// [`CircleDistribution::arc_mass`] only.
pub fn arc_sup_oracle(c1: &CircleDistribution, c2: &CircleDistribution) -> f64 {
    let mut thetas: Vec<f64> = c1
        .nodes
        .iter()
        .chain(c2.nodes.iter())
        .map(|nd| nd.theta)
        .collect();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup();
    let mut best = (c1.arc_mass(&Arc::full()) - c2.arc_mass(&Arc::full())).abs();
    for &a in &thetas {
        let p = Arc::point(a);
        best = best.max((c1.arc_mass(&p) - c2.arc_mass(&p)).abs());
        for &b in &thetas {
            if a == b {
                continue;
            }
            let extent = wrap_angle(b - a).rem_euclid(2.0 * PI);
            for (sc, ec) in [(true, true), (true, false), (false, true), (false, false)] {
                if let Ok(arc) = Arc::new(a, extent, sc, ec) {
                    best = best.max((c1.arc_mass(&arc) - c2.arc_mass(&arc)).abs());
                }
            }
        }
    }
    best
}

fn angle_of(e: &ExtReal) -> f64 {
    match e {
        ExtReal::NegInf => -PI,
        ExtReal::PosInf => PI,
        ExtReal::Finite(q) => 2.0 * rat_to_f64(q).atan(),
    }
}

fn quadratic_roots_f64(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let s = disc.sqrt();
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -(b + sign * s) / 2.0;
    let r1 = q / a;
    if q == 0.0 {
        return vec![r1];
    }
    vec![r1, c / q]
}

/// Sup-norm error of the secant of `H(θ) = M(tan(θ/2))` over `[α, β]`.
///
/// `(H − L)' = 0` where `M'(u)·(1+u²)/2 = slope` is a quadratic in
/// `u = tan(θ/2)`, so the exact extrema are checked directly.
fn secant_error_tau(piece: &Moebius, alpha: f64, beta: f64, ga: f64, gb: f64) -> f64 {
    let slope = (gb - ga) / (beta - alpha);
    if slope <= 0.0 {
        return 0.0;
    }
    let (a, b, c, d) = piece.coeffs_f64();
    let det = a * d - b * c;
    if !det.is_finite() {
        // Coefficients overflow f64: fall back to the crude mass bound.
        return (gb - ga).abs();
    }
    let qa = det - 2.0 * slope * c * c;
    let qb = -4.0 * slope * c * d;
    let qc = det - 2.0 * slope * d * d;
    let mut worst = 0.0f64;
    for u in quadratic_roots_f64(qa, qb, qc) {
        let theta = 2.0 * u.atan();
        if theta > alpha && theta < beta {
            let h = (a * u + b) / (c * u + d);
            let l = ga + slope * (theta - alpha);
            worst = worst.max((h - l).abs());
        }
    }
    worst
}

/// Transports an atom-free line distribution to the circle along `τ` with
/// circle-Kuiper error at most `eps`.
pub fn tau_transport(mu: &Distribution, eps: f64) -> Result<CircleDistribution> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveTolerance(format!("{eps}")));
    }
    if let Some((t, _)) = mu.atoms().first() {
        return Err(Error::AtomicInput(format_rational(t)));
    }
    let budget = 0.45 * eps;
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    let push = |theta: f64, g: f64, nodes: &mut Vec<(f64, f64)>| {
        if theta >= PI {
            return;
        }
        match nodes.last() {
            Some(&(last, _)) if last >= theta => {}
            _ => nodes.push((theta, g)),
        }
    };
    let n = mu.nodes().len();
    for i in 0..=n {
        let (lo, hi) = mu.piece_span(i);
        let piece = mu.pieces()[i].clone();
        let alpha = angle_of(&lo);
        let beta = angle_of(&hi);
        let ga = match &lo {
            ExtReal::NegInf => 0.0,
            ExtReal::Finite(t) => rat_to_f64(&mu.cdf(t)),
            ExtReal::PosInf => unreachable!(),
        };
        let gb = match &hi {
            ExtReal::PosInf => 1.0,
            ExtReal::Finite(t) => rat_to_f64(&mu.cdf_left(t)),
            ExtReal::NegInf => unreachable!(),
        };
        push(alpha, ga, &mut nodes);
        if piece.is_constant() {
            continue;
        }
        // Depth-first subdivision; cells come out in ascending order.
        let mut stack = vec![(alpha, ga, beta, gb, 0u32)];
        while let Some((a0, g0, b0, g1, depth)) = stack.pop() {
            let err = secant_error_tau(&piece, a0, b0, g0, g1);
            if err <= budget || depth >= 48 || (b0 - a0) < 1e-12 {
                push(b0, g1, &mut nodes);
                continue;
            }
            let mid = 0.5 * (a0 + b0);
            let u = (0.5 * mid).tan();
            let gm = piece.eval_f64(u);
            stack.push((mid, gm, b0, g1, depth + 1));
            stack.push((a0, g0, mid, gm, depth + 1));
        }
    }
    let circle_nodes = nodes
        .into_iter()
        .map(|(theta, g)| CircleNode {
            theta,
            f_left: g,
            f_right: g,
        })
        .collect();
    CircleDistribution::from_parts(circle_nodes)
}

/// Sup-norm error of the secant of `f(t) = p·2·atan(t) + q` over `[ta, tb]`.
fn secant_error_atan(p: f64, ta: f64, tb: f64, fa: f64, fb: f64) -> f64 {
    let slope = (fb - fa) / (tb - ta);
    if slope <= 0.0 || p <= 0.0 {
        return 0.0;
    }
    // f'(t) = 2p/(1+t²) = slope  ⇒  t² = 2p/slope − 1.
    let rhs = 2.0 * p / slope - 1.0;
    if rhs <= 0.0 {
        return 0.0;
    }
    let r = rhs.sqrt();
    let mut worst = 0.0f64;
    for t in [r, -r] {
        if t > ta && t < tb {
            let h = fa + p * 2.0 * (t.atan() - ta.atan());
            let l = fa + slope * (t - ta);
            worst = worst.max((h - l).abs());
        }
    }
    worst
}

/// Transports an atom-free circle distribution back to the line along
/// `τ⁻¹` with Kuiper error at most `eps`.
pub fn tau_inverse_transport(c: &CircleDistribution, eps: f64) -> Result<Distribution> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveTolerance(format!("{eps}")));
    }
    if let Some((th, _)) = c.atoms().first() {
        return Err(Error::AtomicInput(format!("angle {th}")));
    }
    let budget = 0.2 * eps;
    let tail = eps / 8.0;
    // Line-side probe points with their transported CDF values.
    let mut probes: Vec<(f64, f64)> = Vec::new();
    let n = c.nodes.len();
    for i in 0..n {
        let (th0, v0) = (c.nodes[i].theta, c.nodes[i].f_right);
        let (th1, v1) = if i + 1 < n {
            (c.nodes[i + 1].theta, c.nodes[i + 1].f_left)
        } else {
            (PI, 1.0)
        };
        if v1 <= v0 || th1 <= th0 {
            if th0 > -PI {
                probes.push(((0.5 * th0).tan(), v0));
            }
            continue;
        }
        let p = (v1 - v0) / (th1 - th0);
        // Clip unbounded ends at the tail-mass target.
        let (mut a_th, mut fa) = (th0, v0);
        if th0 <= -PI {
            let target = (tail / 2.0).min(v1 * 0.5).max(1e-300);
            a_th = th0 + (target - 0.0) / p;
            fa = target;
        }
        let (mut b_th, mut fb) = (th1, v1);
        if th1 >= PI {
            let target = (1.0 - tail / 2.0).max(v0 + (fa - v0) * 0.5);
            b_th = th1 - (1.0 - target) / p;
            fb = target;
        }
        if b_th <= a_th {
            continue;
        }
        let ta = (0.5 * a_th).tan();
        let tb = (0.5 * b_th).tan();
        let mut stack = vec![(ta, fa, tb, fb, 0u32)];
        probes.push((ta, fa));
        while let Some((t0, f0, t1, f1, depth)) = stack.pop() {
            let err = secant_error_atan(p, t0, t1, f0, f1);
            if (err <= budget && f1 - f0 <= 0.25) || depth >= 52 || t1 - t0 < 1e-12 {
                probes.push((t1, f1));
                continue;
            }
            // Split at the angle midpoint for uniform progress on wide cells.
            let mid_th = 0.5 * ((2.0 * t0.atan()) + (2.0 * t1.atan()));
            let tm = (0.5 * mid_th).tan();
            let fm = f0 + p * (mid_th - 2.0 * t0.atan());
            stack.push((tm, fm, t1, f1, depth + 1));
            stack.push((t0, f0, tm, fm, depth + 1));
        }
    }
    probes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    probes.dedup_by(|a, b| a.0 == b.0);
    if probes.len() < 2 {
        return Err(Error::InvalidDistribution(
            "circle distribution transports to a degenerate line CDF".into(),
        ));
    }

    let zero = Rational::zero();
    let one = Rational::one();
    let m = probes.len();
    let mut nodes: Vec<Node> = Vec::with_capacity(m);
    let mut pieces: Vec<Moebius> = Vec::with_capacity(m + 1);
    pieces.push(Moebius::constant(&zero));
    let mut prev: Option<(Rational, Rational)> = None;
    for (i, (t, f)) in probes.iter().enumerate() {
        let tr = rat_from_f64(*t)
            .ok_or_else(|| Error::InvalidDistribution("non-finite probe".into()))?;
        let mut fr = if i == 0 {
            zero.clone()
        } else if i == m - 1 {
            one.clone()
        } else {
            rat_from_f64(*f).unwrap_or_else(|| zero.clone())
        };
        if let Some((pt, pf)) = &prev {
            if &tr <= pt {
                continue;
            }
            if fr < *pf {
                fr = pf.clone();
            }
            if *pf == fr {
                pieces.push(Moebius::constant(&fr));
            } else {
                pieces.push(Moebius::line_through(pt, pf, &tr, &fr));
            }
        }
        nodes.push(Node {
            t: tr.clone(),
            f_left: fr.clone(),
            f_right: fr.clone(),
        });
        prev = Some((tr, fr));
    }
    pieces.push(Moebius::constant(&one));
    Distribution::from_parts(nodes, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::kuiper_distance;
    use crate::scalar::rat_int;

    fn half_circle() -> CircleDistribution {
        // Uniform on angles (0, π).
        CircleDistribution::from_items(&[], &[(0.0, PI, 1.0)]).unwrap()
    }

    #[test]
    fn uniform_arc_masses() {
        let lam = CircleDistribution::uniform();
        let half = Arc::new(0.0, PI, true, false).unwrap();
        assert!((lam.arc_mass(&half) - 0.5).abs() < 1e-12);
        assert!((lam.arc_mass(&Arc::full()) - 1.0).abs() < 1e-12);
        let wrapping = Arc::new(PI / 2.0, PI, false, false).unwrap();
        assert!((lam.arc_mass(&wrapping) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn atom_arc_mass() {
        let c = CircleDistribution::from_items(&[(0.0, 1.0)], &[]).unwrap();
        assert!((c.arc_mass(&Arc::point(0.0)) - 1.0).abs() < 1e-12);
        assert!((c.arc_mass(&Arc::point(1.0)) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_invariance_of_uniform() {
        let lam = CircleDistribution::uniform();
        for th in [0.3, 1.7, -2.9, PI - 1e-3] {
            let rot = lam.rotate(th);
            assert!(circle_kuiper(&lam, &rot) < 1e-12, "theta = {th}");
        }
    }

    #[test]
    fn uniform_vs_half_circle() {
        let lam = CircleDistribution::uniform();
        let half = half_circle();
        let d = circle_kuiper(&lam, &half);
        assert!((d - 0.5).abs() < 1e-12, "d = {d}");
        let oracle = arc_sup_oracle(&lam, &half);
        assert!((d - oracle).abs() < 1e-12);
    }

    #[test]
    fn rotate_round_trip() {
        let half = half_circle();
        let back = half.rotate(PI).rotate(PI);
        assert!(circle_kuiper(&half, &back) < 1e-12);
        assert!(circle_kuiper(&half, &half.rotate(0.0)) < 1e-12);
    }

    #[test]
    fn rotation_moves_arc_mass() {
        let half = half_circle();
        let theta = 0.8;
        let rot = half.rotate(theta);
        let arc = Arc::new(0.4, 1.1, true, false).unwrap();
        let lhs = rot.arc_mass(&arc);
        let rhs = half.arc_mass(&arc.rotated(-theta));
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn complement_arcs_agree() {
        let lam = CircleDistribution::uniform();
        let half = half_circle();
        for arc in [
            Arc::new(0.2, 1.0, true, false).unwrap(),
            Arc::new(-2.0, 4.0, false, false).unwrap(),
            Arc::point(0.5),
        ] {
            let comp = arc.complement();
            let d1 = (lam.arc_mass(&arc) - half.arc_mass(&arc)).abs();
            let d2 = (lam.arc_mass(&comp) - half.arc_mass(&comp)).abs();
            assert!((d1 - d2).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_transport_uniform() {
        let mu = Distribution::uniform(rat_int(-1), rat_int(1)).unwrap();
        let c = tau_transport(&mu, 1e-6).unwrap();
        // Mass lives on angles (−π/2, π/2); the CDF probe at θ=0 is 1/2.
        assert!((c.g_right(0.0) - 0.5).abs() < 1e-6);
        assert!(c.g_right(-PI / 2.0) < 1e-6);
        assert!(c.g_right(PI / 2.0) > 1.0 - 1e-6);
        assert!(tau_transport(&Distribution::dirac(rat_int(0)), 1e-6).is_err());
        assert!(tau_transport(&mu, 0.0).is_err());
    }

    #[test]
    fn tau_round_trip() {
        let mu = Distribution::uniform(rat_int(-1), rat_int(3)).unwrap();
        let eps = 1e-5;
        let c = tau_transport(&mu, eps).unwrap();
        let back = tau_inverse_transport(&c, eps).unwrap();
        let d = kuiper_distance(&mu, &back);
        assert!(d.to_f64() <= 2.0 * eps, "round trip distance {}", d.to_f64());
    }

    #[test]
    fn uniform_circle_pulls_back_to_arctan_cdf() {
        // τ⁻¹ of the arc-length measure has CDF 1/2 + arctan(t)/π, so
        // F(0) = 1/2, F(1) = 3/4, F(-1) = 1/4.
        let eps = 1e-4;
        let d = tau_inverse_transport(&CircleDistribution::uniform(), eps).unwrap();
        let probes = [
            (rat_int(0), 0.5),
            (rat_int(1), 0.75),
            (rat_int(-1), 0.25),
        ];
        for (t, want) in probes {
            let got = rat_to_f64(&d.cdf(&t));
            assert!((got - want).abs() <= eps, "F({t}) = {got}, want {want}");
        }
    }

    #[test]
    fn wrapped_support_round_trips() {
        // Rotate transported mass across the basepoint, pull it back to the
        // line, and transport again: the circle distributions must agree.
        let eps = 1e-5;
        let mu = Distribution::uniform(rat_int(-1), rat_int(3)).unwrap();
        let wrapped = tau_transport(&mu, eps).unwrap().rotate(2.5);
        assert!(wrapped.is_continuous());
        let line = tau_inverse_transport(&wrapped, eps).unwrap();
        let again = tau_transport(&line, eps).unwrap();
        let d = circle_kuiper(&wrapped, &again);
        assert!(d <= 2.0 * eps + 1e-9, "wrap round trip distance {d}");
    }

    #[test]
    fn correspondence_on_a_pair() {
        let a = Distribution::uniform(rat_int(0), rat_int(3)).unwrap();
        let b = Distribution::uniform(rat_int(1), rat_int(2)).unwrap();
        let eps = 1e-6;
        let ca = tau_transport(&a, eps).unwrap();
        let cb = tau_transport(&b, eps).unwrap();
        let line = kuiper_distance(&a, &b).to_f64();
        let circ = circle_kuiper(&ca, &cb);
        assert!(
            (line - circ).abs() <= 2.0 * eps + 1e-9,
            "line {line} vs circle {circ}"
        );
    }

    #[test]
    fn unit_distance_components_on_circle() {
        // Support of `c` is the right half circle; measures carried by one
        // component of the complement are at distance 1, split measures not.
        let c = CircleDistribution::from_items(&[], &[(-1.0, 1.0, 1.0)]).unwrap();
        let inside_gap = CircleDistribution::from_items(&[], &[(1.5, 2.5, 1.0)]).unwrap();
        assert!((circle_kuiper(&c, &inside_gap) - 1.0).abs() < 1e-12);
        let touching = CircleDistribution::from_items(&[], &[(0.5, 2.5, 1.0)]).unwrap();
        assert!(circle_kuiper(&c, &touching) < 1.0 - 1e-9);

        // Two support arcs leave two complementary components: mass split
        // across both stays strictly below distance 1.
        let two_arcs =
            CircleDistribution::from_items(&[], &[(-1.0, -0.5, 0.5), (0.5, 1.0, 0.5)]).unwrap();
        let split = CircleDistribution::from_items(&[], &[(-0.3, 0.3, 0.5), (1.5, 2.0, 0.5)])
            .unwrap();
        assert!(circle_kuiper(&two_arcs, &split) < 1.0 - 1e-9);
        let one_gap = CircleDistribution::from_items(&[], &[(-0.3, 0.3, 1.0)]).unwrap();
        assert!((circle_kuiper(&two_arcs, &one_gap) - 1.0).abs() < 1e-12);
    }
}
