//! Certified monotone fixed-point free maps of the line and their inverses.
//!
//! Certification is sample based: the map is evaluated on a finite grid and
//! checked for strict increase and a constant sign of `f(x) - x`. This is a
//! desk-scale check of the hypotheses, not a proof.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::fmt;

use serde::Serialize;

use crate::expr::{EvalError, Expr};

/// A real function that may return infinities but never NaN.
pub trait RealFn: Send + Sync {
    fn eval_raw(&self, x: f64) -> Result<f64, EvalError>;

    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = self.eval_raw(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Overflow { x })
        }
    }
}

impl RealFn for Expr {
    fn eval_raw(&self, x: f64) -> Result<f64, EvalError> {
        Expr::eval_raw(self, x)
    }
}

/// `x -> x + offset`.
#[derive(Clone, Copy, Debug)]
pub struct Translation(pub f64);

impl RealFn for Translation {
    fn eval_raw(&self, x: f64) -> Result<f64, EvalError> {
        Ok(x + self.0)
    }
}

/// Adapter for plain closures.
pub struct FnMap<F>(pub F);

impl<F: Fn(f64) -> f64 + Send + Sync> RealFn for FnMap<F> {
    fn eval_raw(&self, x: f64) -> Result<f64, EvalError> {
        let v = (self.0)(x);
        if v.is_nan() {
            Err(EvalError::Domain { x })
        } else {
            Ok(v)
        }
    }
}

/// `x -> -inner(-x)`.
struct Mirror(Arc<dyn RealFn>);

impl RealFn for Mirror {
    fn eval_raw(&self, x: f64) -> Result<f64, EvalError> {
        self.0.eval_raw(-x).map(|v| -v)
    }
}

/// Sign of the displacement `f(x) - x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Displacement {
    /// `f(x) > x` everywhere.
    Above,
    /// `f(x) < x` everywhere.
    Below,
}

impl Displacement {
    pub fn flipped(self) -> Self {
        match self {
            Displacement::Above => Displacement::Below,
            Displacement::Below => Displacement::Above,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { lo: -100.0, hi: 100.0, points: 10_000 }
    }
}

impl Grid {
    pub const MIN_POINTS: usize = 1_000;

    pub fn symmetric(half_width: f64, points: usize) -> Self {
        Grid { lo: -half_width, hi: half_width, points }
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            return self.hi;
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        self.lo + step * k as f64
    }

    fn validate(&self) -> Result<(), CertifyError> {
        let reason = if !(self.lo.is_finite() && self.hi.is_finite()) {
            "grid bounds must be finite"
        } else if self.lo >= self.hi {
            "grid must have lo < hi"
        } else if self.lo != -self.hi {
            "grid must be symmetric about 0"
        } else if self.points < Self::MIN_POINTS {
            "grid needs at least 1000 points"
        } else {
            return Ok(());
        };
        Err(CertifyError::InvalidGrid { reason: reason.to_string() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertifyOptions {
    pub grid: Grid,
    /// Across a sign change of `f(x) - x`, a point where the displacement
    /// falls below this is reported as a fixed point.
    pub fixed_point_tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { grid: Grid::default(), fixed_point_tol: 1e-9 }
    }
}

/// What a successful certification observed. Sample based; not a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub direction: &'static str,
    pub displacement: Displacement,
    pub grid: Grid,
    pub min_abs_displacement: f64,
    pub sample_based: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertifyError {
    InvalidGrid { reason: String },
    Eval(EvalError),
    NotMonotone { left: f64, right: f64 },
    FixedPointDetected { x: f64 },
    NotFixedPointFree { left: f64, right: f64 },
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::InvalidGrid { reason } => write!(f, "invalid grid: {reason}"),
            CertifyError::Eval(e) => write!(f, "{e}"),
            CertifyError::NotMonotone { left, right } => {
                write!(f, "not strictly increasing between x = {left} and x = {right}")
            }
            CertifyError::FixedPointDetected { x } => write!(f, "fixed point detected near x = {x}"),
            CertifyError::NotFixedPointFree { left, right } => {
                write!(f, "displacement changes sign between x = {left} and x = {right}")
            }
        }
    }
}

impl From<EvalError> for CertifyError {
    fn from(e: EvalError) -> Self {
        CertifyError::Eval(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InvertError {
    BracketFailure { y: f64 },
    Eval(EvalError),
}

impl fmt::Display for InvertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvertError::BracketFailure { y } => write!(f, "could not bracket a preimage of {y}"),
            InvertError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl From<EvalError> for InvertError {
    fn from(e: EvalError) -> Self {
        InvertError::Eval(e)
    }
}

/// Bracket expansion stops once the step exceeds this.
pub const BRACKET_STEP_CAP: f64 = (1u64 << 60) as f64;
pub const DEFAULT_INVERT_TOL: f64 = 1e-12;

/// A strictly increasing bijection of the line with a known displacement sign.
#[derive(Clone)]
pub struct MonotoneMap1D {
    forward: Arc<dyn RealFn>,
    inverse: Option<Arc<dyn RealFn>>,
    displacement: Displacement,
    certificate: Option<Certificate>,
    label: String,
}

impl fmt::Debug for MonotoneMap1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneMap1D")
            .field("label", &self.label)
            .field("displacement", &self.displacement)
            .field("closed_form_inverse", &self.inverse.is_some())
            .finish()
    }
}

impl MonotoneMap1D {
    /// Wraps a map the caller vouches for, with no sampling.
    pub fn assume(
        forward: Arc<dyn RealFn>,
        inverse: Option<Arc<dyn RealFn>>,
        displacement: Displacement,
        label: impl Into<String>,
    ) -> Self {
        MonotoneMap1D { forward, inverse, displacement, certificate: None, label: label.into() }
    }

    /// Takes the displacement sign from `f(0)`; no monotonicity check is made.
    pub fn assume_expr(expr: &Expr) -> Result<Self, CertifyError> {
        let d = expr.eval(0.0)?;
        let displacement = if d > 0.0 {
            Displacement::Above
        } else if d < 0.0 {
            Displacement::Below
        } else {
            return Err(CertifyError::FixedPointDetected { x: 0.0 });
        };
        Ok(Self::from_expr(expr, displacement, None))
    }

    /// Exact translation `x -> x + c`, `c != 0`, with closed-form inverse.
    pub fn translation(c: f64) -> Self {
        assert!(c != 0.0 && c.is_finite(), "translation offset must be finite and nonzero");
        let displacement = if c > 0.0 { Displacement::Above } else { Displacement::Below };
        Self::assume(Arc::new(Translation(c)), Some(Arc::new(Translation(-c))), displacement, alloc::format!("x + {c}"))
    }

    fn from_expr(expr: &Expr, displacement: Displacement, certificate: Option<Certificate>) -> Self {
        let inverse: Option<Arc<dyn RealFn>> =
            expr.translation_offset().map(|c| Arc::new(Translation(-c)) as Arc<dyn RealFn>);
        MonotoneMap1D { forward: Arc::new(expr.clone()), inverse, displacement, certificate, label: expr.to_string() }
    }

    pub fn displacement(&self) -> Displacement {
        self.displacement
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_closed_form_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.forward.eval(x)
    }

    pub fn eval_raw(&self, x: f64) -> Result<f64, EvalError> {
        self.forward.eval_raw(x)
    }

    pub(crate) fn closed_inverse(&self, y: f64) -> Option<Result<f64, EvalError>> {
        self.inverse.as_ref().map(|inv| inv.eval(y))
    }

    /// The conjugate `x -> -f(-x)`; increasing with the opposite displacement.
    pub fn mirrored(&self) -> Self {
        MonotoneMap1D {
            forward: Arc::new(Mirror(self.forward.clone())),
            inverse: self.inverse.clone().map(|inv| Arc::new(Mirror(inv)) as Arc<dyn RealFn>),
            displacement: self.displacement.flipped(),
            certificate: None,
            label: alloc::format!("-f(-x) for f = {}", self.label),
        }
    }

    /// Preimage of `y`; see [`invert_map`].
    pub fn invert(&self, y: f64, tol: f64) -> Result<f64, InvertError> {
        invert_map(self, y, tol)
    }
}

/// Samples `expr` on the grid and certifies it as an increasing fixed-point
/// free map.
pub fn certify_map(expr: &Expr, grid: &Grid) -> Result<MonotoneMap1D, CertifyError> {
    certify_with(expr, &CertifyOptions { grid: *grid, ..CertifyOptions::default() })
}

pub fn certify_with(expr: &Expr, options: &CertifyOptions) -> Result<MonotoneMap1D, CertifyError> {
    let grid = &options.grid;
    grid.validate()?;

    let mut prev: Option<(f64, f64)> = None;
    let mut sign_change: Option<(f64, f64)> = None;
    let mut first_sign = 0.0f64;
    let mut min_abs = f64::INFINITY;

    let displacement = expr.displacement();
    for k in 0..grid.points {
        let x = grid.point(k);
        let y = expr.eval(x)?;
        let d = displacement.eval(x)?;
        // A displacement that is tiny but keeps its sign (x + exp(x) far to
        // the left) is not a fixed point; zeros and sign changes are.
        if d == 0.0 {
            return Err(CertifyError::FixedPointDetected { x });
        }
        min_abs = min_abs.min(libm::fabs(d));
        let sign = if d > 0.0 { 1.0 } else { -1.0 };
        if let Some((px, py)) = prev {
            if y <= py {
                return Err(CertifyError::NotMonotone { left: px, right: x });
            }
            if sign != first_sign && sign_change.is_none() {
                sign_change = Some((px, x));
            }
        } else {
            first_sign = sign;
        }
        prev = Some((x, y));
    }

    if let Some((left, right)) = sign_change {
        return Err(locate_fixed_point(expr, left, right, options.fixed_point_tol));
    }

    let displacement = if first_sign > 0.0 { Displacement::Above } else { Displacement::Below };
    let certificate = Certificate {
        direction: "increasing",
        displacement,
        grid: *grid,
        min_abs_displacement: min_abs,
        sample_based: true,
    };
    Ok(MonotoneMap1D::from_expr(expr, displacement, Some(certificate)))
}

/// Bisects `f(x) - x` across a sign change. A continuous map has a fixed point
/// there; a map that jumps across the diagonal does not.
fn locate_fixed_point(expr: &Expr, mut lo: f64, mut hi: f64, tol: f64) -> CertifyError {
    let displacement = expr.displacement();
    let disp = |x: f64| displacement.eval(x);
    let Ok(d_lo) = disp(lo) else {
        return CertifyError::NotFixedPointFree { left: lo, right: hi };
    };
    let (left, right) = (lo, hi);
    let lo_positive = d_lo > 0.0;
    for _ in 0..200 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        match disp(mid) {
            Ok(d) if libm::fabs(d) < tol => return CertifyError::FixedPointDetected { x: mid },
            Ok(d) if (d > 0.0) == lo_positive => lo = mid,
            Ok(_) => hi = mid,
            Err(_) => break,
        }
    }
    CertifyError::NotFixedPointFree { left, right }
}

/// Solves `f(x) = y` for increasing `f` by bracket expansion (step doubling
/// from 1, capped at 2^60) followed by bisection until `|f(x) - y| <= tol` or
/// the bracket reaches adjacent doubles. A closed-form inverse is used when
/// the map carries one.
pub fn invert_map(f: &MonotoneMap1D, y: f64, tol: f64) -> Result<f64, InvertError> {
    if let Some(x) = f.closed_inverse(y) {
        return Ok(x?);
    }
    let (lo, hi) = expand_bracket(&*f.forward, y, y, 1.0)?;
    Ok(bisect(&*f.forward, y, lo, hi, tol)?)
}

/// Finds `lo <= hi` with `f(lo) <= y <= f(hi)`, starting at `start` and
/// doubling the step from `step`.
pub(crate) fn expand_bracket(f: &dyn RealFn, y: f64, start: f64, step: f64) -> Result<(f64, f64), InvertError> {
    let f_start = f.eval_raw(start)?;
    if f_start == y {
        return Ok((start, start));
    }
    let mut step = step;
    let mut inner = start;
    loop {
        if step > BRACKET_STEP_CAP {
            return Err(InvertError::BracketFailure { y });
        }
        if f_start > y {
            let probe = start - step;
            if f.eval_raw(probe)? <= y {
                return Ok((probe, inner));
            }
            inner = probe;
        } else {
            let probe = start + step;
            if f.eval_raw(probe)? >= y {
                return Ok((inner, probe));
            }
            inner = probe;
        }
        step *= 2.0;
    }
}

/// Bisection on a bracket of an increasing function. `tol = 0` runs to
/// adjacent doubles.
pub(crate) fn bisect(f: &dyn RealFn, y: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, EvalError> {
    if lo == hi {
        return Ok(lo);
    }
    let mut best = lo;
    let mut best_residual = f64::INFINITY;
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f.eval_raw(mid)?;
        let residual = libm::fabs(v - y);
        if residual < best_residual {
            best = mid;
            best_residual = residual;
        }
        if residual <= tol {
            return Ok(mid);
        }
        if v < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for end in [lo, hi] {
        let residual = libm::fabs(f.eval_raw(end)? - y);
        if residual < best_residual {
            best = end;
            best_residual = residual;
        }
    }
    Ok(best)
}

/// Solves `f(x) = y` on a bracket of an increasing function to full double
/// resolution with the Illinois variant of regula falsi. A bisection step is
/// forced whenever four steps fail to halve the bracket.
pub(crate) fn solve_bracketed(f: &dyn RealFn, y: f64, mut lo: f64, mut hi: f64) -> Result<f64, EvalError> {
    if lo == hi {
        return Ok(lo);
    }
    let mut f_lo = f.eval_raw(lo)? - y;
    let mut f_hi = f.eval_raw(hi)? - y;
    if f_lo >= 0.0 {
        return Ok(lo);
    }
    if f_hi <= 0.0 {
        return Ok(hi);
    }
    let (mut best, mut best_residual) = if -f_lo < f_hi { (lo, -f_lo) } else { (hi, f_hi) };
    let mut last_side = 0i8;
    let mut checkpoint = hi - lo;
    for i in 0..400u32 {
        let force_half = i % 4 == 3 && hi - lo > 0.5 * checkpoint;
        if i % 4 == 3 {
            checkpoint = hi - lo;
        }
        let mut x = if force_half { lo + (hi - lo) / 2.0 } else { (lo * f_hi - hi * f_lo) / (f_hi - f_lo) };
        if !(x > lo && x < hi) {
            x = lo + (hi - lo) / 2.0;
            if !(x > lo && x < hi) {
                break;
            }
        }
        let fx = f.eval_raw(x)? - y;
        if libm::fabs(fx) < best_residual {
            best = x;
            best_residual = libm::fabs(fx);
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            if last_side == -1 {
                f_hi /= 2.0;
            }
            last_side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if last_side == 1 {
                f_lo /= 2.0;
            }
            last_side = 1;
        }
    }
    Ok(best)
}

pub(crate) fn forward_fn(f: &MonotoneMap1D) -> &dyn RealFn {
    &*f.forward
}
