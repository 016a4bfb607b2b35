//! Intervals with irrational endpoints and increasing affine maps between
//! them.

use alloc::string::String;
use core::fmt;

use serde::Serialize;

use super::quad::QuadNum;

/// `[lo, hi]` with `lo < hi` and both ends irrational, so its trace on Q is
/// clopen and coincides with that of `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QClopenInterval {
    lo: QuadNum,
    hi: QuadNum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntervalError {
    NotOrdered,
    RationalEndpoint,
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalError::NotOrdered => f.write_str("interval needs lo < hi"),
            IntervalError::RationalEndpoint => f.write_str("interval endpoint is rational"),
        }
    }
}

impl QClopenInterval {
    pub fn new(lo: QuadNum, hi: QuadNum) -> Result<Self, IntervalError> {
        if lo >= hi {
            return Err(IntervalError::NotOrdered);
        }
        if lo.is_rational() || hi.is_rational() {
            return Err(IntervalError::RationalEndpoint);
        }
        Ok(QClopenInterval { lo, hi })
    }

    /// `[center - radius, center + radius]`.
    pub fn centered(center: &QuadNum, radius: &QuadNum) -> Result<Self, IntervalError> {
        Self::new(center - radius, center + radius)
    }

    pub fn lo(&self) -> &QuadNum {
        &self.lo
    }

    pub fn hi(&self) -> &QuadNum {
        &self.hi
    }

    pub fn midpoint(&self) -> QuadNum {
        (&self.lo + &self.hi).scale(&num_rational::BigRational::new(1.into(), 2.into()))
    }

    pub fn contains(&self, x: &QuadNum) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `other` lies in the open interval `(lo, hi)`.
    pub fn contains_interval(&self, other: &QClopenInterval) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn meets(&self, other: &QClopenInterval) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }

    /// The closed middle third.
    pub fn middle_third(&self) -> Result<Self, IntervalError> {
        let third = (&self.hi - &self.lo).scale(&num_rational::BigRational::new(1.into(), 3.into()));
        Self::new(&self.lo + &third, &self.hi - &third)
    }
}

impl fmt::Display for QClopenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The increasing affine bijection `x -> slope x + intercept` from `source`
/// onto `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffinePiece {
    pub label: String,
    pub source: QClopenInterval,
    pub target: QClopenInterval,
    pub slope: QuadNum,
    pub intercept: QuadNum,
}

impl AffinePiece {
    pub fn between(label: String, source: QClopenInterval, target: QClopenInterval) -> Self {
        let slope = (&target.hi - &target.lo)
            .checked_div(&(&source.hi - &source.lo))
            .expect("source interval has positive length");
        let intercept = &target.lo - &(&slope * &source.lo);
        let piece = AffinePiece { label, source, target, slope, intercept };
        debug_assert!(piece.slope.signum() > 0);
        debug_assert_eq!(piece.apply(&piece.source.hi), piece.target.hi);
        piece
    }

    pub fn apply(&self, x: &QuadNum) -> QuadNum {
        &(&self.slope * x) + &self.intercept
    }

    pub fn apply_inverse(&self, y: &QuadNum) -> QuadNum {
        (y - &self.intercept).checked_div(&self.slope).expect("slope is positive")
    }

    /// Image of a subinterval of the source, or `None` if it is not one.
    pub fn image(&self, i: &QClopenInterval) -> Option<QClopenInterval> {
        if !(self.source.lo <= i.lo && i.hi <= self.source.hi) {
            return None;
        }
        Some(QClopenInterval { lo: self.apply(&i.lo), hi: self.apply(&i.hi) })
    }

    /// Preimage of a subinterval of the target, or `None` if it is not one.
    pub fn preimage(&self, i: &QClopenInterval) -> Option<QClopenInterval> {
        if !(self.target.lo <= i.lo && i.hi <= self.target.hi) {
            return None;
        }
        Some(QClopenInterval { lo: self.apply_inverse(&i.lo), hi: self.apply_inverse(&i.hi) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2(k: i64) -> QuadNum {
        QuadNum::from_pairs((0, 1), (k, 1), (0, 1), (0, 1))
    }

    #[test]
    fn interval_rules() {
        assert_eq!(QClopenInterval::new(s2(1), s2(-1)), Err(IntervalError::NotOrdered));
        assert_eq!(QClopenInterval::new(QuadNum::from_int(0), s2(1)), Err(IntervalError::RationalEndpoint));
        let a = QClopenInterval::new(s2(-1), s2(1)).unwrap();
        let b = QClopenInterval::new(s2(1), s2(2)).unwrap();
        let c = QClopenInterval::new(s2(2), s2(3)).unwrap();
        assert!(a.meets(&b) && !a.meets(&c));
        assert!(a.contains(&QuadNum::zero()));
        let m = a.middle_third().unwrap();
        assert!(a.contains_interval(&m));
        assert_eq!(m.hi(), &QuadNum::from_pairs((0, 1), (1, 3), (0, 1), (0, 1)));
    }

    #[test]
    fn affine_piece_round_trip() {
        let src = QClopenInterval::new(s2(-1), s2(1)).unwrap();
        let seven = QuadNum::sqrt7();
        let tgt = QClopenInterval::centered(&QuadNum::from_int(3), &seven.inv().unwrap()).unwrap();
        let p = AffinePiece::between("p".into(), src.clone(), tgt.clone());
        assert_eq!(p.apply(&QuadNum::zero()), QuadNum::from_int(3));
        assert_eq!(p.image(&src).unwrap(), tgt);
        assert_eq!(p.preimage(&tgt).unwrap(), src);
        let x = QuadNum::from_pairs((1, 3), (0, 1), (0, 1), (0, 1));
        assert_eq!(p.apply_inverse(&p.apply(&x)), x);
        assert!(p.image(&tgt).is_none());
    }
}
