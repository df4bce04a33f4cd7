//! Exact Kuiper, Kolmogorov–Smirnov and total-variation distances.
//!
//! All three scan the merged breakpoints of the two CDFs: node values, left
//! limits, the vanishing limits at ±∞, and the interior critical points of
//! Möbius piece differences (roots of a rational quadratic). On
//! piecewise-linear data everything is exact; irrational critical points
//! flag the result approximate with a 1e-12 comparison tolerance.

use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

use crate::distribution::Distribution;
use crate::interval::Interval;
use crate::moebius::Moebius;
use crate::quadratic::{solve_quadratic, QuadraticSolution};
use crate::scalar::{rat_from_f64, rat_to_f64, ExtReal, Rational, Value};

/// Margin under which an approximate candidate is allowed to contest an
/// exact maximum; root evaluation errors are orders of magnitude smaller.
const APPROX_TOL: f64 = 1e-12;

/// A maximizing interval for the Kuiper distance.
#[derive(Clone, Debug)]
pub struct Witness {
    pub interval: Interval,
    /// `μ(I) − ν(I)`; its absolute value equals the distance.
    pub signed_value: Value,
    pub exact: bool,
}

/// Where a CDF-difference candidate lives: a left limit or the value at a
/// point, or the vanishing limits at the ends of the line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Pos {
    NegInf,
    /// Left limit at `t`: orders just before `Val(t)`.
    Left(Rational),
    Val(Rational),
    PosInf,
}

impl Pos {
    fn sort_key(&self) -> (ExtReal, u8) {
        match self {
            Pos::NegInf => (ExtReal::NegInf, 0),
            Pos::Left(t) => (ExtReal::Finite(t.clone()), 0),
            Pos::Val(t) => (ExtReal::Finite(t.clone()), 1),
            Pos::PosInf => (ExtReal::PosInf, 0),
        }
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    pos: Pos,
    diff: Value,
}

fn merged_breakpoints(a: &Distribution, b: &Distribution) -> Vec<Rational> {
    let set: BTreeSet<Rational> = a
        .nodes()
        .iter()
        .chain(b.nodes().iter())
        .map(|nd| nd.t.clone())
        .collect();
    set.into_iter().collect()
}

/// Critical points of `M1 − M2` inside the open segment `(lo, hi)`.
///
/// `(M1 − M2)' = 0` reduces to `det1·(c2·t + d2)² = det2·(c1·t + d1)²`,
/// a rational quadratic.
fn interior_critical_points(m1: &Moebius, m2: &Moebius, lo: &ExtReal, hi: &ExtReal) -> Vec<Value> {
    let det1 = Rational::from_integer(m1.det());
    let det2 = Rational::from_integer(m2.det());
    if det1.is_zero() && det2.is_zero() {
        return vec![];
    }
    let (_, _, c1, d1) = m1.coeffs();
    let (_, _, c2, d2) = m2.coeffs();
    let qa = &det1 * &c2 * &c2 - &det2 * &c1 * &c1;
    let qb = (&det1 * &c2 * &d2 - &det2 * &c1 * &d1) * Rational::from_integer(2.into());
    let qc = &det1 * &d2 * &d2 - &det2 * &d1 * &d1;
    let sol = solve_quadratic(&qa, &qb, &qc);
    let inside = |v: &Value| -> bool {
        let ext = match v {
            Value::Exact(q) => ExtReal::Finite(q.clone()),
            Value::Approx(x) => match rat_from_f64(*x) {
                Some(q) => ExtReal::Finite(q),
                None => return false,
            },
        };
        &ext > lo && &ext < hi
    };
    match sol {
        // Constant difference: the segment endpoints already cover it.
        QuadraticSolution::IdenticallyZero => vec![],
        QuadraticSolution::Roots(roots) => roots.into_iter().filter(|r| inside(r)).collect(),
    }
}

/// Candidates of `F_a − F_b`: ±∞ limits, node values and left limits, and
/// interior critical points of the piece differences.
fn diff_candidates(a: &Distribution, b: &Distribution) -> Vec<Candidate> {
    let breaks = merged_breakpoints(a, b);
    let mut out = Vec::with_capacity(2 * breaks.len() + 4);
    out.push(Candidate {
        pos: Pos::NegInf,
        diff: Value::zero(),
    });
    for t in &breaks {
        out.push(Candidate {
            pos: Pos::Left(t.clone()),
            diff: Value::Exact(a.cdf_left(t) - b.cdf_left(t)),
        });
        out.push(Candidate {
            pos: Pos::Val(t.clone()),
            diff: Value::Exact(a.cdf(t) - b.cdf(t)),
        });
    }
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
        let pa = a.piece_after(&lo);
        let pb = b.piece_after(&lo);
        if pa.is_constant() && pb.is_constant() {
            continue;
        }
        for root in interior_critical_points(pa, pb, &lo, &hi) {
            match root {
                Value::Exact(t) => {
                    let diff = Value::Exact(a.cdf(&t) - b.cdf(&t));
                    out.push(Candidate {
                        pos: Pos::Val(t),
                        diff,
                    });
                }
                Value::Approx(x) => {
                    // Exact CDF evaluation at the dyadic image of the root:
                    // the only error left is the root's own displacement,
                    // second order near a critical point.
                    if let Some(t) = rat_from_f64(x) {
                        let diff = rat_to_f64(&(a.cdf(&t) - b.cdf(&t)));
                        out.push(Candidate {
                            pos: Pos::Val(t),
                            diff: Value::Approx(diff),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Maximum of candidate values with honest exactness: an exact winner is
/// kept exact only when no approximate candidate comes within `APPROX_TOL`.
fn max_value<'c>(cands: impl Iterator<Item = (&'c Pos, Value)>) -> (Value, Vec<&'c Pos>) {
    let mut best_exact: Option<(Rational, Vec<&Pos>)> = None;
    let mut best_approx: Option<(f64, &Pos)> = None;
    for (pos, v) in cands {
        match v {
            Value::Exact(q) => match &mut best_exact {
                None => best_exact = Some((q, vec![pos])),
                Some((cur, args)) => {
                    if q > *cur {
                        *cur = q;
                        args.clear();
                        args.push(pos);
                    } else if q == *cur {
                        args.push(pos);
                    }
                }
            },
            Value::Approx(x) => match &mut best_approx {
                None => best_approx = Some((x, pos)),
                Some((cur, arg)) => {
                    if x > *cur {
                        *cur = x;
                        *arg = pos;
                    }
                }
            },
        }
    }
    match (best_exact, best_approx) {
        (Some((q, args)), None) => (Value::Exact(q), args),
        (None, Some((x, arg))) => (Value::Approx(x), vec![arg]),
        (Some((q, args)), Some((x, arg))) => {
            let qf = rat_to_f64(&q);
            if x <= qf - APPROX_TOL {
                (Value::Exact(q), args)
            } else if qf >= x {
                (Value::Approx(qf), args)
            } else {
                (Value::Approx(x), vec![arg])
            }
        }
        (None, None) => unreachable!("candidate list never empty"),
    }
}

/// Kolmogorov–Smirnov distance `sup |F_μ − F_ν|`.
pub fn ks_distance(a: &Distribution, b: &Distribution) -> Value {
    let cands = diff_candidates(a, b);
    let (m, _) = max_value(cands.iter().map(|c| (&c.pos, c.diff.abs())));
    m
}

/// Kuiper distance `sup (F_μ − F_ν) + sup (F_ν − F_μ)`, each supremum
/// clamped below at 0 by the vanishing tails.
pub fn kuiper_distance(a: &Distribution, b: &Distribution) -> Value {
    let cands = diff_candidates(a, b);
    let (up, _) = max_value(cands.iter().map(|c| (&c.pos, c.diff.clone())));
    let (down, _) = max_value(cands.iter().map(|c| (&c.pos, c.diff.neg())));
    up.add(&down)
}

/// Builds the interval between two candidate positions. The lower position
/// contributes openness at the bottom (a left limit closes the endpoint),
/// the upper position at the top (a value closes it).
fn interval_between(lo: &Pos, hi: &Pos) -> Interval {
    let (l, lc) = match lo {
        Pos::NegInf => (ExtReal::NegInf, false),
        Pos::Left(t) => (ExtReal::Finite(t.clone()), true),
        Pos::Val(t) => (ExtReal::Finite(t.clone()), false),
        Pos::PosInf => unreachable!("lower witness position at +inf"),
    };
    let (h, hc) = match hi {
        Pos::PosInf => (ExtReal::PosInf, false),
        Pos::Left(t) => (ExtReal::Finite(t.clone()), false),
        Pos::Val(t) => (ExtReal::Finite(t.clone()), true),
        Pos::NegInf => unreachable!("upper witness position at -inf"),
    };
    Interval::new(l, h, lc, hc).expect("witness positions are ordered")
}

/// Witness preference: closed endpoints first, then lexicographically
/// smallest `(lo, hi)`, then closedness flags for determinism.
fn witness_rank(iv: &Interval) -> (i32, ExtReal, ExtReal, i32, i32) {
    let closed = iv.lo_closed() as i32 + iv.hi_closed() as i32;
    (
        -closed,
        iv.lo().clone(),
        iv.hi().clone(),
        1 - iv.lo_closed() as i32,
        1 - iv.hi_closed() as i32,
    )
}

/// A fresh point carrying no atom of either measure, for the zero-distance
/// witness clause.
fn null_singleton(a: &Distribution, b: &Distribution) -> Interval {
    let mut k = 0i64;
    loop {
        for cand in [Rational::from_integer(k.into()), Rational::from_integer((-k).into())] {
            if a.atom_at(&cand).is_zero() && b.atom_at(&cand).is_zero() {
                return Interval::point(cand);
            }
        }
        k += 1;
    }
}

/// Kuiper distance together with a maximizing interval.
pub fn kuiper_witness(a: &Distribution, b: &Distribution) -> (Witness, Value) {
    let cands = diff_candidates(a, b);
    let (up, up_args) = max_value(cands.iter().map(|c| (&c.pos, c.diff.clone())));
    let (down, down_args) = max_value(cands.iter().map(|c| (&c.pos, c.diff.neg())));
    let distance = up.add(&down);
    let exact = distance.is_exact();

    if distance.to_f64() == 0.0 {
        let interval = null_singleton(a, b);
        return (
            Witness {
                interval,
                signed_value: Value::zero(),
                exact,
            },
            distance,
        );
    }

    // `up` is attained at p (μ heavier there), `down` at q (ν heavier).
    // q before p yields the interval [q..p] with μ(I) − ν(I) = +distance;
    // p before q yields [p..q] with the negative sign.
    let mut best: Option<(Interval, bool)> = None;
    for p in &up_args {
        for q in &down_args {
            let (iv, positive) = match q.sort_key().cmp(&p.sort_key()) {
                std::cmp::Ordering::Less => (interval_between(q, p), true),
                std::cmp::Ordering::Greater => (interval_between(p, q), false),
                std::cmp::Ordering::Equal => continue,
            };
            match &best {
                None => best = Some((iv, positive)),
                Some((cur, _)) => {
                    if witness_rank(&iv) < witness_rank(cur) {
                        best = Some((iv, positive));
                    }
                }
            }
        }
    }
    let (interval, positive) = best.expect("positive distance has distinct witness positions");
    let signed_value = if positive { distance.clone() } else { distance.neg() };
    (
        Witness {
            interval,
            signed_value,
            exact,
        },
        distance,
    )
}

/// Total variation distance: positive part of the signed measure `μ − ν`,
/// atoms plus the exact integral of the positive density difference. The
/// antiderivative of a Möbius density is the Möbius CDF itself, so each
/// integral telescopes between sign changes.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> Value {
    let breaks = merged_breakpoints(a, b);
    let mut total = Value::zero();
    for t in &breaks {
        let da = a.atom_at(t) - b.atom_at(t);
        if da.is_positive() {
            total = total.add(&Value::Exact(da));
        }
    }
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
        let pa = a.piece_after(&lo);
        let pb = b.piece_after(&lo);
        if pa.is_constant() && pb.is_constant() {
            continue;
        }
        // Split at the critical points; the density difference has constant
        // sign on each part.
        let mut cuts: Vec<Value> = interior_critical_points(pa, pb, &lo, &hi);
        cuts.sort_by(|x, y| x.to_f64().partial_cmp(&y.to_f64()).unwrap());
        // Interior limits of the CDF difference: right values entering the
        // segment, left limits leaving it, so atoms at the ends stay out.
        let diff_at = |e: &ExtReal| -> Value {
            match e {
                ExtReal::Finite(t) => Value::Exact(a.cdf_left(t) - b.cdf_left(t)),
                _ => Value::zero(),
            }
        };
        let mut last_pos = lo.clone();
        let mut last_val = match &lo {
            ExtReal::NegInf => Value::zero(),
            ExtReal::Finite(t) => Value::Exact(a.cdf(t) - b.cdf(t)),
            ExtReal::PosInf => unreachable!(),
        };
        let mut boundary: Vec<(ExtReal, Value, bool)> = Vec::new();
        for cut in cuts {
            let (pos, val, ex) = match cut {
                Value::Exact(t) => {
                    let v = Value::Exact(a.cdf(&t) - b.cdf(&t));
                    (ExtReal::Finite(t), v, true)
                }
                Value::Approx(x) => match rat_from_f64(x) {
                    Some(t) => {
                        let v = Value::Approx(rat_to_f64(&(a.cdf(&t) - b.cdf(&t))));
                        (ExtReal::Finite(t), v, false)
                    }
                    None => continue,
                },
            };
            boundary.push((pos, val, ex));
        }
        boundary.push((hi.clone(), diff_at(&hi), true));
        for (pos, val, _exact) in boundary {
            // Sign of the density difference on (last_pos, pos) at a
            // rational probe strictly inside.
            let probe = probe_between(&last_pos, &pos);
            let sign_positive = match (pa.derivative_at(&probe), pb.derivative_at(&probe)) {
                (Some(da), Some(db)) => da > db,
                _ => false,
            };
            if sign_positive {
                let gain = val.add(&last_val.neg());
                total = total.add(&gain);
            }
            last_pos = pos;
            last_val = val;
        }
    }
    total
}

/// A rational point strictly between two extended reals.
fn probe_between(lo: &ExtReal, hi: &ExtReal) -> Rational {
    match (lo, hi) {
        (ExtReal::NegInf, ExtReal::PosInf) => Rational::zero(),
        (ExtReal::NegInf, ExtReal::Finite(b)) => b - Rational::from_integer(1.into()),
        (ExtReal::Finite(a), ExtReal::PosInf) => a + Rational::from_integer(1.into()),
        (ExtReal::Finite(a), ExtReal::Finite(b)) => (a + b) / Rational::from_integer(2.into()),
        _ => unreachable!("empty probe range"),
    }
}

/// Exhaustive oracle: every interval with endpoints in the merged node set,
/// all openness combinations, singletons, and rays. Exact on
/// piecewise-linear inputs; with Möbius pieces present it falls back to
/// 64 samples per segment and flags the result approximate.
pub fn brute_force_interval_sup(a: &Distribution, b: &Distribution) -> Value {
    let breaks = merged_breakpoints(a, b);
    let piecewise_linear = a
        .pieces()
        .iter()
        .chain(b.pieces().iter())
        .all(|p| p.pole().is_none());
    if piecewise_linear {
        let mut positions: Vec<Pos> = vec![Pos::NegInf];
        for t in &breaks {
            positions.push(Pos::Left(t.clone()));
            positions.push(Pos::Val(t.clone()));
        }
        positions.push(Pos::PosInf);
        let mut best = Rational::zero();
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                if positions[i].sort_key() == positions[j].sort_key() {
                    continue;
                }
                let iv = interval_between(&positions[i], &positions[j]);
                let d = (a.interval_mass(&iv) - b.interval_mass(&iv)).abs();
                if d > best {
                    best = d;
                }
            }
        }
        Value::Exact(best)
    } else {
        // Sampling fallback: max minus min of the CDF difference over node
        // positions plus 64 interior samples per segment.
        let mut diffs: Vec<f64> = vec![0.0];
        for t in &breaks {
            diffs.push(rat_to_f64(&(a.cdf_left(t) - b.cdf_left(t))));
            diffs.push(rat_to_f64(&(a.cdf(t) - b.cdf(t))));
        }
        for i in 0..=breaks.len() {
            let lo = if i == 0 {
                rat_to_f64(&breaks[0]) - 64.0
            } else {
                rat_to_f64(&breaks[i - 1])
            };
            let hi = if i == breaks.len() {
                rat_to_f64(breaks.last().unwrap()) + 64.0
            } else {
                rat_to_f64(&breaks[i])
            };
            for k in 1..64 {
                let t = lo + (hi - lo) * (k as f64) / 64.0;
                if let Some(q) = rat_from_f64(t) {
                    diffs.push(rat_to_f64(&(a.cdf(&q) - b.cdf(&q))));
                }
            }
        }
        let max = diffs.iter().cloned().fold(f64::MIN, f64::max);
        let min = diffs.iter().cloned().fold(f64::MAX, f64::min);
        Value::Approx(max - min)
    }
}

/// Kuiper distance to a Dirac measure by the closed formula `1 − μ({x})`.
pub fn dirac_distance(a: &Distribution, x: &Rational) -> Value {
    Value::Exact(Rational::from_integer(1.into()) - a.atom_at(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn u(lo: i64, hi: i64) -> Distribution {
        Distribution::uniform(rat_int(lo), rat_int(hi)).unwrap()
    }

    fn exact(v: &Value) -> Rational {
        v.as_exact().expect("expected exact value").clone()
    }

    #[test]
    fn ks_fixtures() {
        assert_eq!(exact(&ks_distance(&u(0, 3), &u(1, 2))), rat(1, 3));
        assert_eq!(exact(&ks_distance(&u(0, 1), &u(0, 1))), rat_int(0));
        assert_eq!(
            exact(&ks_distance(
                &Distribution::dirac(rat_int(0)),
                &Distribution::dirac(rat_int(1))
            )),
            rat_int(1)
        );
    }

    #[test]
    fn kuiper_fixtures() {
        assert_eq!(exact(&kuiper_distance(&u(0, 3), &u(1, 2))), rat(2, 3));
        assert_eq!(exact(&kuiper_distance(&u(0, 1), &u(0, 2))), rat(1, 2));
        assert_eq!(exact(&kuiper_distance(&u(0, 1), &u(0, 1))), rat_int(0));
    }

    #[test]
    fn witness_fixtures() {
        let (w, d) = kuiper_witness(&u(0, 3), &u(1, 2));
        assert_eq!(exact(&d), rat(2, 3));
        assert_eq!(format!("{}", w.interval), "[1,2]");
        assert_eq!(exact(&w.signed_value), rat(-2, 3));
        assert!(w.exact);

        let (w, d) = kuiper_witness(&Distribution::dirac(rat_int(0)), &u(0, 1));
        assert_eq!(exact(&d), rat_int(1));
        assert_eq!(format!("{}", w.interval), "{0}");
        assert_eq!(exact(&w.signed_value), rat_int(1));

        let (w, d) = kuiper_witness(&u(0, 1), &u(0, 1));
        assert_eq!(exact(&d), rat_int(0));
        assert!(w.interval.is_degenerate());
        assert_eq!(exact(&w.signed_value), rat_int(0));
    }

    #[test]
    fn tv_fixtures() {
        assert_eq!(exact(&tv_distance(&u(0, 2), &u(1, 3))), rat(1, 2));
        assert_eq!(exact(&tv_distance(&u(0, 1), &u(1, 2))), rat_int(1));
        assert_eq!(
            exact(&tv_distance(&Distribution::dirac(rat_int(0)), &u(0, 1))),
            rat_int(1)
        );
    }

    #[test]
    fn brute_force_fixtures() {
        assert_eq!(exact(&brute_force_interval_sup(&u(0, 3), &u(1, 2))), rat(2, 3));
        assert_eq!(
            exact(&brute_force_interval_sup(
                &Distribution::dirac(rat_int(0)),
                &Distribution::dirac(rat_int(1))
            )),
            rat_int(1)
        );
        assert_eq!(exact(&brute_force_interval_sup(&u(0, 1), &u(0, 1))), rat_int(0));
    }

    #[test]
    fn dirac_formula() {
        let m = Distribution::mix(&[
            (rat(1, 2), Distribution::dirac(rat_int(0))),
            (rat(1, 2), u(0, 1)),
        ])
        .unwrap();
        assert_eq!(exact(&dirac_distance(&m, &rat_int(0))), rat(1, 2));
        assert_eq!(
            exact(&dirac_distance(&Distribution::dirac(rat_int(3)), &rat_int(3))),
            rat_int(0)
        );
        assert_eq!(exact(&dirac_distance(&u(0, 1), &rat(1, 2))), rat_int(1));
    }

    #[test]
    fn witness_attains_distance() {
        let pairs = [
            (u(0, 3), u(1, 2)),
            (u(0, 1), u(0, 2)),
            (Distribution::dirac(rat_int(0)), u(0, 1)),
        ];
        for (a, b) in &pairs {
            let (w, d) = kuiper_witness(a, b);
            let mass = a.interval_mass(&w.interval) - b.interval_mass(&w.interval);
            assert_eq!(mass, exact(&w.signed_value));
            assert_eq!(mass.abs(), exact(&d));
        }
    }

    #[test]
    fn tv_mixed_atom_and_density() {
        // μ = ½δ₀ + ½U[0,2] against ν = U[1,3]: positive part is the atom
        // plus density ¼ on (0,1), so TV = ½ + ¼.
        let m = Distribution::mix(&[
            (rat(1, 2), Distribution::dirac(rat_int(0))),
            (rat(1, 2), u(0, 2)),
        ])
        .unwrap();
        assert_eq!(exact(&tv_distance(&m, &u(1, 3))), rat(3, 4));
        assert_eq!(exact(&tv_distance(&u(1, 3), &m)), rat(3, 4));
    }

    #[test]
    fn moebius_pair_has_interior_critical_point() {
        // Tails 1 − 1/t and (t−1)/(t+1) on [1, ∞): the CDF difference peaks
        // at 1 + √2 with value 3 − 2√2, beating every node candidate.
        let node = || {
            vec![crate::distribution::Node {
                t: rat_int(1),
                f_left: rat_int(0),
                f_right: rat_int(0),
            }]
        };
        let tail1 =
            Moebius::from_rationals(&rat_int(1), &rat_int(-1), &rat_int(1), &rat_int(0)).unwrap();
        let tail2 =
            Moebius::from_rationals(&rat_int(1), &rat_int(-1), &rat_int(1), &rat_int(1)).unwrap();
        let d1 =
            Distribution::from_parts(node(), vec![Moebius::constant(&rat_int(0)), tail1]).unwrap();
        let d2 =
            Distribution::from_parts(node(), vec![Moebius::constant(&rat_int(0)), tail2]).unwrap();
        let ks = ks_distance(&d1, &d2);
        let ku = kuiper_distance(&d1, &d2);
        assert!(!ks.is_exact());
        let expect = 3.0 - 2.0 * 2f64.sqrt();
        assert!((ks.to_f64() - expect).abs() < 1e-12);
        assert!((ku.to_f64() - expect).abs() < 1e-12);
    }
}
