//! Fractional-linear (Möbius) functions with exact integer coefficients.
//!
//! `t ↦ (a·t + b)/(c·t + d)` in canonical form: coefficients cleared of
//! denominators, divided by their gcd, sign fixed so the first nonzero of
//! `(a, b, c, d)` is positive. Constant and affine functions are the
//! degenerate cases `det = 0` and `c = 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ExtReal, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moebius {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Moebius {
    pub fn from_rationals(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Result<Moebius> {
        if c.is_zero() && d.is_zero() {
            return Err(Error::InvalidRational(
                "moebius denominator is identically zero".into(),
            ));
        }
        // Clear denominators over the common lcm.
        let lcm = a
            .denom()
            .lcm(b.denom())
            .lcm(c.denom())
            .lcm(d.denom());
        let scale = |q: &Rational| q.numer() * (&lcm / q.denom());
        Ok(Moebius::from_ints(scale(a), scale(b), scale(c), scale(d)))
    }

    fn from_ints(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Moebius {
        let mut m = Moebius { a, b, c, d };
        m.canonicalize();
        m
    }

    fn canonicalize(&mut self) {
        // Constant functions lose their spurious pole: 0/t is plain 0.
        if self.det().is_zero() {
            let (num, den) = if !self.c.is_zero() {
                (self.a.clone(), self.c.clone())
            } else {
                (self.b.clone(), self.d.clone())
            };
            let v = Rational::new(num, den);
            self.a = BigInt::zero();
            self.b = v.numer().clone();
            self.c = BigInt::zero();
            self.d = v.denom().clone();
            return;
        }
        let mut g = self.a.gcd(&self.b).gcd(&self.c).gcd(&self.d);
        if g.is_zero() {
            g = BigInt::from(1);
        }
        let first_negative = [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        if first_negative {
            g = -g;
        }
        self.a = &self.a / &g;
        self.b = &self.b / &g;
        self.c = &self.c / &g;
        self.d = &self.d / &g;
    }

    pub fn constant(q: &Rational) -> Moebius {
        Moebius::from_ints(
            BigInt::zero(),
            q.numer().clone(),
            BigInt::zero(),
            q.denom().clone(),
        )
    }

    pub fn identity() -> Moebius {
        Moebius::from_ints(BigInt::from(1), BigInt::zero(), BigInt::zero(), BigInt::from(1))
    }

    /// `t ↦ slope·t + intercept`.
    pub fn affine(slope: &Rational, intercept: &Rational) -> Moebius {
        let denom = slope.denom().lcm(intercept.denom());
        Moebius::from_ints(
            slope.numer() * (&denom / slope.denom()),
            intercept.numer() * (&denom / intercept.denom()),
            BigInt::zero(),
            denom,
        )
    }

    /// The line through `(t1, y1)` and `(t2, y2)` with `t1 ≠ t2`.
    pub fn line_through(t1: &Rational, y1: &Rational, t2: &Rational, y2: &Rational) -> Moebius {
        let slope = (y2 - y1) / (t2 - t1);
        let intercept = y1 - &slope * t1;
        Moebius::affine(&slope, &intercept)
    }

    /// The Möbius function with pole `p` through `(t1, y1)` and `(t2, y2)`.
    ///
    /// Requires `p` outside `[t1, t2]` and `t1 ≠ t2`; the result maps the
    /// closed segment onto `[y1, y2]` monotonically.
    pub fn through_with_pole(
        t1: &Rational,
        y1: &Rational,
        t2: &Rational,
        y2: &Rational,
        p: &Rational,
    ) -> Result<Moebius> {
        if t1 == t2 {
            return Err(Error::InvalidRational("coincident interpolation points".into()));
        }
        if (p >= t1.min(t2) && p <= t1.max(t2)) || p == t1 || p == t2 {
            return Err(Error::InvalidRational(format!(
                "pole {} lies inside the interpolation span",
                p
            )));
        }
        // (a·t + b)/(t − p) with a, b solving the two point constraints.
        let a = (y2 * (t2 - p) - y1 * (t1 - p)) / (t2 - t1);
        let b = y1 * (t1 - p) - &a * t1;
        Moebius::from_rationals(&a, &b, &Rational::from_integer(BigInt::from(1)), &(-p))
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_constant(&self) -> bool {
        self.det().is_zero()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        if !self.c.is_zero() {
            Some(Rational::new(self.a.clone(), self.c.clone()))
        } else {
            Some(Rational::new(self.b.clone(), self.d.clone()))
        }
    }

    pub fn pole(&self) -> Option<Rational> {
        if self.c.is_zero() {
            None
        } else {
            Some(Rational::new(-self.d.clone(), self.c.clone()))
        }
    }

    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let den = &self.c * t.numer() + &self.d * t.denom();
        if den.is_zero() {
            return None;
        }
        let num = &self.a * t.numer() + &self.b * t.denom();
        Some(Rational::new(num, den))
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let (a, b, c, d) = self.coeffs_f64();
        (a * t + b) / (c * t + d)
    }

    pub fn coeffs_f64(&self) -> (f64, f64, f64, f64) {
        (
            self.a.to_f64().unwrap_or(f64::NAN),
            self.b.to_f64().unwrap_or(f64::NAN),
            self.c.to_f64().unwrap_or(f64::NAN),
            self.d.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn coeffs(&self) -> (Rational, Rational, Rational, Rational) {
        (
            Rational::from_integer(self.a.clone()),
            Rational::from_integer(self.b.clone()),
            Rational::from_integer(self.c.clone()),
            Rational::from_integer(self.d.clone()),
        )
    }

    pub fn limit_pos_inf(&self) -> ExtReal {
        if !self.c.is_zero() {
            ExtReal::Finite(Rational::new(self.a.clone(), self.c.clone()))
        } else if self.a.is_zero() {
            ExtReal::Finite(Rational::new(self.b.clone(), self.d.clone()))
        } else if (self.a.is_positive()) == (self.d.is_positive()) {
            ExtReal::PosInf
        } else {
            ExtReal::NegInf
        }
    }

    pub fn limit_neg_inf(&self) -> ExtReal {
        if !self.c.is_zero() {
            ExtReal::Finite(Rational::new(self.a.clone(), self.c.clone()))
        } else if self.a.is_zero() {
            ExtReal::Finite(Rational::new(self.b.clone(), self.d.clone()))
        } else if (self.a.is_positive()) == (self.d.is_positive()) {
            ExtReal::NegInf
        } else {
            ExtReal::PosInf
        }
    }

    /// Limit as `t` approaches `e` within the line; finite `e` must not be
    /// the pole (use [`Moebius::pole`] to detect that case).
    pub fn limit_at(&self, e: &ExtReal) -> ExtReal {
        match e {
            ExtReal::NegInf => self.limit_neg_inf(),
            ExtReal::PosInf => self.limit_pos_inf(),
            ExtReal::Finite(t) => match self.eval(t) {
                Some(v) => ExtReal::Finite(v),
                None => {
                    // Pole: the one-sided limits are ±∞; report unsigned.
                    ExtReal::PosInf
                }
            },
        }
    }

    /// Solves `M(t) = y`; `None` when `y` is the value at infinity.
    pub fn solve(&self, y: &Rational) -> Option<Rational> {
        let den = &self.a * y.denom() - &self.c * y.numer();
        if den.is_zero() {
            return None;
        }
        let num = &self.d * y.numer() - &self.b * y.denom();
        Some(Rational::new(num, den))
    }

    /// `self ∘ inner` as the coefficient-matrix product.
    pub fn compose(&self, inner: &Moebius) -> Moebius {
        Moebius::from_ints(
            &self.a * &inner.a + &self.b * &inner.c,
            &self.a * &inner.b + &self.b * &inner.d,
            &self.c * &inner.a + &self.d * &inner.c,
            &self.c * &inner.b + &self.d * &inner.d,
        )
    }

    /// Functional inverse (the adjugate matrix).
    pub fn inverse(&self) -> Moebius {
        Moebius::from_ints(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
    }

    /// `w·M + k`, staying in the Möbius class.
    pub fn scale_add(&self, w: &Rational, k: &Rational) -> Moebius {
        let a = w * Rational::from_integer(self.a.clone())
            + k * Rational::from_integer(self.c.clone());
        let b = w * Rational::from_integer(self.b.clone())
            + k * Rational::from_integer(self.d.clone());
        Moebius::from_rationals(
            &a,
            &b,
            &Rational::from_integer(self.c.clone()),
            &Rational::from_integer(self.d.clone()),
        )
        .expect("denominator unchanged")
    }

    /// Derivative `det/(c·t + d)²`; `None` at the pole.
    pub fn derivative_at(&self, t: &Rational) -> Option<Rational> {
        let den = &self.c * t.numer() + &self.d * t.denom();
        if den.is_zero() {
            return None;
        }
        let den_rat = Rational::new(den, t.denom().clone());
        Some(Rational::from_integer(self.det()) / (&den_rat * &den_rat))
    }

    /// Primitive direction of the denominator `(c, d)`, for grouping
    /// functions with proportional denominators.
    pub fn denominator_key(&self) -> (BigInt, BigInt) {
        let mut g = self.c.gcd(&self.d);
        if g.is_zero() {
            g = BigInt::from(1);
        }
        let lead_negative = if !self.c.is_zero() {
            self.c.is_negative()
        } else {
            self.d.is_negative()
        };
        if lead_negative {
            g = -g;
        }
        (&self.c / &g, &self.d / &g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn canonical_equality() {
        let m1 = Moebius::from_rationals(&rat(1, 2), &rat_int(0), &rat_int(0), &rat_int(1)).unwrap();
        let m2 = Moebius::from_rationals(&rat_int(1), &rat_int(0), &rat_int(0), &rat_int(2)).unwrap();
        assert_eq!(m1, m2);
        let m3 = Moebius::from_rationals(&rat_int(-1), &rat_int(0), &rat_int(0), &rat_int(-2)).unwrap();
        assert_eq!(m1, m3);
    }

    #[test]
    fn compose_and_inverse() {
        // 1/t composed with itself is the identity.
        let inv = Moebius::from_rationals(&rat_int(0), &rat_int(1), &rat_int(1), &rat_int(0)).unwrap();
        assert_eq!(inv.compose(&inv), Moebius::identity());
        let g = Moebius::affine(&rat_int(2), &rat_int(3));
        assert_eq!(g.compose(&g.inverse()), Moebius::identity());
        assert_eq!(g.inverse().eval(&rat_int(7)).unwrap(), rat_int(2));
    }

    #[test]
    fn pole_and_limits() {
        // (t−1)/t: CDF tail 1 − 1/t.
        let m = Moebius::from_rationals(&rat_int(1), &rat_int(-1), &rat_int(1), &rat_int(0)).unwrap();
        assert_eq!(m.pole().unwrap(), rat_int(0));
        assert_eq!(m.limit_pos_inf(), ExtReal::Finite(rat_int(1)));
        assert_eq!(m.eval(&rat_int(2)).unwrap(), rat(1, 2));
        assert_eq!(m.solve(&rat(1, 2)).unwrap(), rat_int(2));
        assert!(m.eval(&rat_int(0)).is_none());
    }

    #[test]
    fn through_with_pole_is_monotone() {
        let m = Moebius::through_with_pole(&rat_int(1), &rat_int(0), &rat_int(2), &rat_int(1), &rat_int(0))
            .unwrap();
        assert_eq!(m.eval(&rat_int(1)).unwrap(), rat_int(0));
        assert_eq!(m.eval(&rat_int(2)).unwrap(), rat_int(1));
        assert!(m.det().is_positive());
        assert!(Moebius::through_with_pole(
            &rat_int(1),
            &rat_int(0),
            &rat_int(2),
            &rat_int(1),
            &rat(3, 2)
        )
        .is_err());
    }

    #[test]
    fn scale_add_matches_pointwise() {
        let m = Moebius::from_rationals(&rat_int(1), &rat_int(-1), &rat_int(1), &rat_int(0)).unwrap();
        let s = m.scale_add(&rat(1, 2), &rat(1, 4));
        let t = rat_int(4);
        let expect = rat(1, 2) * m.eval(&t).unwrap() + rat(1, 4);
        assert_eq!(s.eval(&t).unwrap(), expect);
    }
}
