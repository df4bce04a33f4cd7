//! Possibly degenerate intervals of the extended line.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{ExtReal, Rational};

/// A non-empty interval with explicit endpoint openness.
///
/// Degenerate intervals (singletons) have both endpoints closed; infinite
/// endpoints are always open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: ExtReal,
    hi: ExtReal,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: ExtReal, hi: ExtReal, lo_closed: bool, hi_closed: bool) -> Result<Interval> {
        if lo > hi {
            return Err(Error::InvalidInterval(format!(
                "lower endpoint {} exceeds upper endpoint {}",
                lo, hi
            )));
        }
        if lo == hi {
            if !lo.is_finite() {
                return Err(Error::InvalidInterval(
                    "degenerate interval at infinity".into(),
                ));
            }
            if !(lo_closed && hi_closed) {
                return Err(Error::InvalidInterval(
                    "degenerate interval must be a closed singleton".into(),
                ));
            }
        }
        if (!lo.is_finite() && lo_closed) || (!hi.is_finite() && hi_closed) {
            return Err(Error::InvalidInterval(
                "infinite endpoints must be open".into(),
            ));
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn point(x: Rational) -> Interval {
        Interval {
            lo: ExtReal::Finite(x.clone()),
            hi: ExtReal::Finite(x),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn closed(a: Rational, b: Rational) -> Result<Interval> {
        Interval::new(ExtReal::Finite(a), ExtReal::Finite(b), true, true)
    }

    pub fn open(a: Rational, b: Rational) -> Result<Interval> {
        Interval::new(ExtReal::Finite(a), ExtReal::Finite(b), false, false)
    }

    pub fn real_line() -> Interval {
        Interval {
            lo: ExtReal::NegInf,
            hi: ExtReal::PosInf,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn lo(&self) -> &ExtReal {
        &self.lo
    }

    pub fn hi(&self) -> &ExtReal {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let p = ExtReal::Finite(x.clone());
        let above = match p.cmp(&self.lo) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => self.lo_closed,
            std::cmp::Ordering::Less => false,
        };
        let below = match p.cmp(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.hi_closed,
            std::cmp::Ordering::Greater => false,
        };
        above && below
    }

    /// Intersection, or `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        match lo.cmp(&hi) {
            std::cmp::Ordering::Greater => None,
            std::cmp::Ordering::Equal => {
                if lo_closed && hi_closed && lo.is_finite() {
                    Some(Interval::point(lo.as_finite().unwrap().clone()))
                } else {
                    None
                }
            }
            std::cmp::Ordering::Less => Some(Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }),
        }
    }

    /// The complement as zero, one or two intervals.
    pub fn complement(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        if let ExtReal::Finite(a) = &self.lo {
            out.push(Interval {
                lo: ExtReal::NegInf,
                hi: ExtReal::Finite(a.clone()),
                lo_closed: false,
                hi_closed: !self.lo_closed,
            });
        }
        if let ExtReal::Finite(b) = &self.hi {
            out.push(Interval {
                lo: ExtReal::Finite(b.clone()),
                hi: ExtReal::PosInf,
                lo_closed: !self.hi_closed,
                hi_closed: false,
            });
        }
        out
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            return write!(f, "{{{}}}", self.lo);
        }
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{}{},{}{}", open, self.lo, self.hi, close)
    }
}
