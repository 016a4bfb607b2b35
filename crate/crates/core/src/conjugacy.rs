//! The conjugacy `g` between translation by one and a fixed-point free
//! increasing map `f`.
//!
//! Anchors: `g(n) = f^n(0)` for integer `n`. On the unit interval `g` is the
//! affine `h(t) = t * f(0)`, and in general `g(n + t) = f^n(h(t))` for
//! `t` in `[0, 1)`. Then `g(u + 1) = f(g(u))` holds by construction.
//!
//! A map below the identity is handled through its mirror `x -> -f(-x)`,
//! which lies above the identity; the resulting `g` is the mirror image and
//! therefore order-reversing.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use spin::RwLock;

use crate::expr::EvalError;
use crate::monotone::{expand_bracket, forward_fn, solve_bracketed, Displacement, InvertError, MonotoneMap1D};
use crate::num::{split_floor, ONE_MINUS_ULP};

pub const DEFAULT_LADDER_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConjugacyError {
    /// Reaching the requested point needs more than `cap` rungs.
    LadderCapExceeded {
        cap: usize,
    },
    /// `f` stopped moving points at double precision near `at`.
    LadderStalled {
        at: f64,
    },
    OutOfUnitInterval {
        t: f64,
    },
    NonFinite {
        value: f64,
    },
    Eval(EvalError),
    Invert(InvertError),
}

impl fmt::Display for ConjugacyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjugacyError::LadderCapExceeded { cap } => {
                write!(f, "point lies beyond the ladder cap of {cap} rungs")
            }
            ConjugacyError::LadderStalled { at } => {
                write!(f, "ladder stalled at {at}: displacement below double resolution")
            }
            ConjugacyError::OutOfUnitInterval { t } => write!(f, "{t} is not in [0, 1)"),
            ConjugacyError::NonFinite { value } => write!(f, "non-finite argument {value}"),
            ConjugacyError::Eval(e) => write!(f, "{e}"),
            ConjugacyError::Invert(e) => write!(f, "{e}"),
        }
    }
}

impl From<EvalError> for ConjugacyError {
    fn from(e: EvalError) -> Self {
        ConjugacyError::Eval(e)
    }
}

impl From<InvertError> for ConjugacyError {
    fn from(e: InvertError) -> Self {
        ConjugacyError::Invert(e)
    }
}

/// Grow-only cache of `F^n(0)` for the above-identity map `F`.
/// `up[k] = F^k(0)`, `down[k] = F^{-k}(0)`.
struct Anchors {
    up: Vec<f64>,
    down: Vec<f64>,
}

pub struct ConjugacyMap {
    original: MonotoneMap1D,
    /// Above-identity map the ladder is built on (the mirror when reversing).
    oriented: MonotoneMap1D,
    reversing: bool,
    anchors: RwLock<Anchors>,
    cap: usize,
}

impl fmt::Debug for ConjugacyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.anchors.read();
        f.debug_struct("ConjugacyMap")
            .field("map", &self.original)
            .field("reversing", &self.reversing)
            .field("rungs_up", &(a.up.len() - 1))
            .field("rungs_down", &(a.down.len() - 1))
            .field("cap", &self.cap)
            .finish()
    }
}

impl ConjugacyMap {
    pub fn new(f: &MonotoneMap1D) -> Result<Self, ConjugacyError> {
        Self::with_cap(f, DEFAULT_LADDER_CAP)
    }

    pub fn with_cap(f: &MonotoneMap1D, cap: usize) -> Result<Self, ConjugacyError> {
        let reversing = f.displacement() == Displacement::Below;
        let oriented = if reversing { f.mirrored() } else { f.clone() };
        let first = oriented.eval(0.0)?;
        if first <= 0.0 {
            // The certified sign disagrees with the map at the origin.
            return Err(ConjugacyError::LadderStalled { at: 0.0 });
        }
        Ok(ConjugacyMap {
            original: f.clone(),
            oriented,
            reversing,
            anchors: RwLock::new(Anchors { up: vec![0.0, first], down: vec![0.0] }),
            cap,
        })
    }

    pub fn map(&self) -> &MonotoneMap1D {
        &self.original
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// True when `f` lies below the identity, so `g` reverses order.
    pub fn is_order_reversing(&self) -> bool {
        self.reversing
    }

    fn orient(&self, v: f64) -> f64 {
        if self.reversing {
            -v
        } else {
            v
        }
    }

    /// `f^n(0)`, memoized.
    pub fn anchor(&self, n: i64) -> Result<f64, ConjugacyError> {
        self.oriented_anchor(n).map(|a| self.orient(a))
    }

    fn oriented_anchor(&self, n: i64) -> Result<f64, ConjugacyError> {
        let k = self.check_cap(n)?;
        if n >= 0 {
            self.ensure_up(k)?;
            Ok(self.anchors.read().up[k])
        } else {
            self.ensure_down(k)?;
            Ok(self.anchors.read().down[k])
        }
    }

    /// Number of rungs currently cached above and below 0.
    pub fn cached_rungs(&self) -> (usize, usize) {
        let a = self.anchors.read();
        (a.up.len() - 1, a.down.len() - 1)
    }

    fn check_cap(&self, n: i64) -> Result<usize, ConjugacyError> {
        let k = n.unsigned_abs();
        if k > self.cap as u64 {
            return Err(ConjugacyError::LadderCapExceeded { cap: self.cap });
        }
        Ok(k as usize)
    }

    fn ensure_up(&self, k: usize) -> Result<(), ConjugacyError> {
        if self.anchors.read().up.len() > k {
            return Ok(());
        }
        let mut a = self.anchors.write();
        while a.up.len() <= k {
            let last = *a.up.last().unwrap();
            let next = self.oriented.eval(last)?;
            if next <= last {
                return Err(ConjugacyError::LadderStalled { at: last });
            }
            a.up.push(next);
        }
        Ok(())
    }

    fn ensure_down(&self, k: usize) -> Result<(), ConjugacyError> {
        if self.anchors.read().down.len() > k {
            return Ok(());
        }
        let mut a = self.anchors.write();
        while a.down.len() <= k {
            let len = a.down.len();
            let last = a.down[len - 1];
            let gap = if len >= 2 { a.down[len - 2] - last } else { a.up[1] };
            let next = self.step_down(last, gap)?;
            if next >= last {
                return Err(ConjugacyError::LadderStalled { at: last });
            }
            a.down.push(next);
        }
        Ok(())
    }

    /// `F^{-1}(y)` for a fresh anchor, bracketing from the previous gap.
    fn step_down(&self, y: f64, gap: f64) -> Result<f64, ConjugacyError> {
        if let Some(x) = self.oriented.closed_inverse(y) {
            return Ok(x?);
        }
        let f = forward_fn(&self.oriented);
        let (lo, hi) = expand_bracket(f, y, y, gap.max(f64::MIN_POSITIVE))?;
        Ok(solve_bracketed(f, y, lo, hi)?)
    }

    /// The affine unit map `h(t) = t * f(0)` on `[0, 1)`.
    pub fn unit(&self, t: f64) -> Result<f64, ConjugacyError> {
        Ok(self.orient(self.oriented_unit(t)?))
    }

    fn oriented_unit(&self, t: f64) -> Result<f64, ConjugacyError> {
        if !(0.0..1.0).contains(&t) {
            return Err(ConjugacyError::OutOfUnitInterval { t });
        }
        Ok(t * self.anchors.read().up[1])
    }

    /// `h^{-1}(w) = w / f(0)`, clamped into `[0, 1)`.
    pub fn unit_inverse(&self, w: f64) -> f64 {
        self.oriented_unit_inverse(self.orient(w))
    }

    fn oriented_unit_inverse(&self, w: f64) -> f64 {
        let t = w / self.anchors.read().up[1];
        t.clamp(0.0, ONE_MINUS_ULP)
    }

    /// `g(u)`.
    pub fn forward(&self, u: f64) -> Result<f64, ConjugacyError> {
        if !u.is_finite() {
            return Err(ConjugacyError::NonFinite { value: u });
        }
        let (n, t) = split_floor(u);
        self.forward_parts(n, t)
    }

    /// `g(n + t) = f^n(h(t))` from an explicit decomposition, so callers with
    /// exact rung and offset avoid rounding in `n + t`.
    pub fn forward_parts(&self, n: i64, t: f64) -> Result<f64, ConjugacyError> {
        if t == 0.0 {
            return self.anchor(n);
        }
        let w = self.oriented_unit(t)?;
        let k = self.check_cap(n)?;
        let v = if n >= 0 { self.walk_up(w, k)? } else { self.walk_down(w, 0, k)? };
        Ok(self.orient(v))
    }

    /// `g^{-1}(y)`.
    pub fn inverse(&self, y: f64) -> Result<f64, ConjugacyError> {
        let (n, t) = self.inverse_parts(y)?;
        Ok(n as f64 + t)
    }

    /// `g^{-1}(y)` as rung and unit offset.
    pub fn inverse_parts(&self, y: f64) -> Result<(i64, f64), ConjugacyError> {
        if !y.is_finite() {
            return Err(ConjugacyError::NonFinite { value: y });
        }
        let v = self.orient(y);
        let n = self.oriented_rung(v)?;
        let k = n.unsigned_abs() as usize;
        let w = if n >= 0 { self.walk_down(v, n, k)? } else { self.walk_up(v, k)? };
        Ok((n, self.oriented_unit_inverse(w)))
    }

    /// The rung index `n = floor(g^{-1}(y))`: `f^n(0) <= y < f^{n+1}(0)` when
    /// `f` is above the identity, and `f^{n+1}(0) < y <= f^n(0)` below it.
    pub fn locate_rung(&self, y: f64) -> Result<i64, ConjugacyError> {
        if !y.is_finite() {
            return Err(ConjugacyError::NonFinite { value: y });
        }
        // When mirrored, v in [a_n, a_{n+1}) is y in (-a_{n+1}, -a_n].
        self.oriented_rung(self.orient(y))
    }

    /// The oriented value of `y` with its rung.
    pub(crate) fn oriented_with_rung(&self, y: f64) -> Result<(f64, i64), ConjugacyError> {
        if !y.is_finite() {
            return Err(ConjugacyError::NonFinite { value: y });
        }
        let v = self.orient(y);
        Ok((v, self.oriented_rung(v)?))
    }

    fn oriented_rung(&self, v: f64) -> Result<i64, ConjugacyError> {
        if v >= 0.0 {
            loop {
                {
                    let a = self.anchors.read();
                    if *a.up.last().unwrap() > v {
                        let idx = a.up.partition_point(|&x| x <= v);
                        return Ok(idx as i64 - 1);
                    }
                }
                let len = self.anchors.read().up.len();
                self.ensure_up(self.grow_target(len)?)?;
            }
        } else {
            loop {
                {
                    let a = self.anchors.read();
                    if *a.down.last().unwrap() <= v {
                        let idx = a.down.partition_point(|&x| x > v);
                        return Ok(-(idx as i64));
                    }
                }
                let len = self.anchors.read().down.len();
                self.ensure_down(self.grow_target(len)?)?;
            }
        }
    }

    fn grow_target(&self, len: usize) -> Result<usize, ConjugacyError> {
        if len > self.cap {
            return Err(ConjugacyError::LadderCapExceeded { cap: self.cap });
        }
        Ok((len * 2).min(self.cap).max(len))
    }

    /// `F^k(w)`.
    fn walk_up(&self, w: f64, k: usize) -> Result<f64, ConjugacyError> {
        let mut v = w;
        for _ in 0..k {
            v = self.oriented.eval(v)?;
        }
        Ok(v)
    }

    /// `F^{-k}(v)` for `v` on rung `rung`, using cached anchors as brackets.
    fn walk_down(&self, v: f64, rung: i64, k: usize) -> Result<f64, ConjugacyError> {
        if k == 0 {
            return Ok(v);
        }
        let lowest = rung - k as i64;
        if lowest < 0 {
            self.ensure_down(self.check_cap(lowest)?)?;
        }
        if self.oriented.has_closed_form_inverse() {
            let mut x = v;
            for _ in 0..k {
                x = self.oriented.closed_inverse(x).unwrap()?;
            }
            return Ok(x);
        }
        let f = forward_fn(&self.oriented);
        let a = self.anchors.read();
        let anchor = |m: i64| if m >= 0 { a.up[m as usize] } else { a.down[(-m) as usize] };
        let mut x = v;
        let mut m = rung;
        for _ in 0..k {
            // x lies in [a_m, a_{m+1}), so its preimage lies in [a_{m-1}, a_m).
            x = solve_bracketed(f, x, anchor(m - 1), anchor(m))?;
            m -= 1;
        }
        Ok(x)
    }
}

/// Memoized `g(n + t)` for one fixed offset `t` and every `n` within the
/// cap. Values agree bit for bit with [`ConjugacyMap::forward_parts`]; the
/// ladder only saves repeating the walk.
pub struct OffsetLadder<'a> {
    conj: &'a ConjugacyMap,
    t: f64,
    rungs: RwLock<Anchors>,
}

impl<'a> OffsetLadder<'a> {
    pub fn new(conj: &'a ConjugacyMap, t: f64) -> Result<Self, ConjugacyError> {
        let start = conj.oriented_unit(t)?;
        Ok(OffsetLadder { conj, t, rungs: RwLock::new(Anchors { up: vec![start], down: vec![start] }) })
    }

    pub fn offset(&self) -> f64 {
        self.t
    }

    /// `g(n + t)`.
    pub fn get(&self, n: i64) -> Result<f64, ConjugacyError> {
        self.oriented(n).map(|v| self.conj.orient(v))
    }

    pub(crate) fn oriented(&self, n: i64) -> Result<f64, ConjugacyError> {
        let k = self.conj.check_cap(n)?;
        {
            let r = self.rungs.read();
            let side = if n >= 0 { &r.up } else { &r.down };
            if let Some(v) = side.get(k) {
                return Ok(*v);
            }
        }
        if n < 0 {
            self.conj.ensure_down(k)?;
        }
        let c = self.conj;
        let mut r = self.rungs.write();
        if n >= 0 {
            while r.up.len() <= k {
                let next = c.oriented.eval(*r.up.last().unwrap())?;
                r.up.push(next);
            }
            Ok(r.up[k])
        } else {
            let f = forward_fn(&c.oriented);
            let a = c.anchors.read();
            while r.down.len() <= k {
                let j = r.down.len() - 1;
                let x = r.down[j];
                // Same step as walking down from rung -j.
                let next = match c.oriented.closed_inverse(x) {
                    Some(v) => v?,
                    None => solve_bracketed(f, x, a.down[j + 1], a.down[j])?,
                };
                r.down.push(next);
            }
            Ok(r.down[k])
        }
    }
}

/// `f^n(0)`.
pub fn build_ladder(c: &ConjugacyMap, n: i64) -> Result<f64, ConjugacyError> {
    c.anchor(n)
}
