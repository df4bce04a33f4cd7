//! Closed-form real roots of rational quadratics.
//!
//! Roots are exact whenever the discriminant is a perfect rational square;
//! otherwise they are computed in f64 with the stable Viète split and
//! flagged approximate.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::scalar::{rat_from_f64, rat_to_f64, Rational, Value};

/// Result of `solve_quadratic`: either every real number is a root, or the
/// (possibly empty) ascending list of real roots.
#[derive(Clone, Debug)]
pub enum QuadraticSolution {
    IdenticallyZero,
    Roots(Vec<Value>),
}

impl QuadraticSolution {
    pub fn roots(&self) -> &[Value] {
        match self {
            QuadraticSolution::IdenticallyZero => &[],
            QuadraticSolution::Roots(r) => r,
        }
    }
}

fn exact_sqrt_nonneg(n: &BigInt) -> Option<BigInt> {
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

/// Square root of a non-negative rational, exact when possible.
fn sqrt_rational(q: &Rational) -> Value {
    debug_assert!(!q.is_negative());
    match (exact_sqrt_nonneg(q.numer()), exact_sqrt_nonneg(q.denom())) {
        (Some(n), Some(d)) => Value::Exact(Rational::new(n, d)),
        _ => Value::Approx(rat_to_f64(q).sqrt()),
    }
}

/// All real roots of `a·t² + b·t + c`, ascending.
pub fn solve_quadratic(a: &Rational, b: &Rational, c: &Rational) -> QuadraticSolution {
    if a.is_zero() {
        if b.is_zero() {
            if c.is_zero() {
                return QuadraticSolution::IdenticallyZero;
            }
            return QuadraticSolution::Roots(vec![]);
        }
        return QuadraticSolution::Roots(vec![Value::Exact(-c / b)]);
    }
    let disc = b * b - Rational::from_integer(BigInt::from(4)) * a * c;
    if disc.is_negative() {
        return QuadraticSolution::Roots(vec![]);
    }
    if disc.is_zero() {
        let two = Rational::from_integer(BigInt::from(2));
        return QuadraticSolution::Roots(vec![Value::Exact(-b / (two * a))]);
    }
    match sqrt_rational(&disc) {
        Value::Exact(s) => {
            let two_a = Rational::from_integer(BigInt::from(2)) * a;
            let r1 = (-b - &s) / &two_a;
            let r2 = (-b + &s) / &two_a;
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            QuadraticSolution::Roots(vec![Value::Exact(lo), Value::Exact(hi)])
        }
        Value::Approx(s) => {
            // q = -(b + sign(b)·√disc)/2 avoids cancellation; roots q/a, c/q.
            let (fa, fb, fc) = (rat_to_f64(a), rat_to_f64(b), rat_to_f64(c));
            let sign = if fb >= 0.0 { 1.0 } else { -1.0 };
            let q = -(fb + sign * s) / 2.0;
            let r1 = q / fa;
            let r2 = fc / q;
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            QuadraticSolution::Roots(vec![Value::Approx(lo), Value::Approx(hi)])
        }
    }
}

/// Residual `a·t² + b·t + c` at a root candidate, evaluated exactly at the
/// dyadic image of the candidate. Used by tests and the verify suites.
pub fn residual(a: &Rational, b: &Rational, c: &Rational, root: &Value) -> f64 {
    let t = match root {
        Value::Exact(q) => q.clone(),
        Value::Approx(x) => match rat_from_f64(*x) {
            Some(q) => q,
            None => return f64::NAN,
        },
    };
    rat_to_f64(&(a * &t * &t + b * &t + c))
}
