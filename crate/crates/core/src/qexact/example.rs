//! The periodic-point free non-shift on Q, built from exact affine pieces.
//!
//! With `eps = 1/sqrt7` and `r_n = 1/(2^n sqrt2)`:
//!
//! * `g_1 : [-r_1, r_1] -> [1 - eps, 1 + eps]`,
//!   `g_{-1} : [-1 - eps, -1 + eps] -> [-r_1, r_1]`;
//! * for `n >= 2`, `g_n` maps `g_{n-1} ... g_1([-r_n, r_n])` onto
//!   `[n - eps, n + eps]` and `g_{-n}` maps `[-n - eps, -n + eps]` onto
//!   `g_{-(n-1)}^{-1} ... g_{-1}^{-1}([-r_n, r_n])`;
//! * `h_n : A_n -> B_n` with `A_n` in the gap of `[n - eps, n + eps]` right
//!   of `dom g_{n+1}` and `B_n` in the gap of `[-n - eps, -n + eps]` left of
//!   `ran g_{-(n+1)}`.
//!
//! Every map is affine. A build of depth `N` has `g_{+-1} ... g_{+-N}` and
//! `A_n, B_n, h_n` for `n < N`, since those need level `n + 1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::interval::{AffinePiece, IntervalError, QClopenInterval};
use super::quad::QuadNum;

pub const DEPTH_CAP: usize = 8;

/// Rounds of middle-third shrinking tried before giving up on `A_n`.
const SHRINK_ROUNDS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QexactError {
    DepthCapExceeded { depth: usize, cap: usize },
    InvalidLevel { n: usize },
    ConstructionFailure { reason: String },
    OutsideDomain,
}

impl fmt::Display for QexactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QexactError::DepthCapExceeded { depth, cap } => {
                write!(f, "depth {depth} exceeds the cap {cap}")
            }
            QexactError::InvalidLevel { n } => write!(f, "level {n} is not available"),
            QexactError::ConstructionFailure { reason } => write!(f, "construction failed: {reason}"),
            QexactError::OutsideDomain => f.write_str("point is outside the domain of g"),
        }
    }
}

impl From<IntervalError> for QexactError {
    fn from(e: IntervalError) -> Self {
        QexactError::ConstructionFailure { reason: format!("{e}") }
    }
}

fn half(k: u32) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(1u64 << k))
}

/// `eps = 1/sqrt7 = sqrt7/7`.
pub fn epsilon() -> QuadNum {
    QuadNum::from_pairs((0, 1), (0, 1), (1, 7), (0, 1))
}

/// `r_n = 1/(2^n sqrt2) = sqrt2 / 2^(n+1)`.
pub fn radius(n: usize) -> QuadNum {
    QuadNum::sqrt2().scale(&half(n as u32 + 1))
}

/// `[-r_n, r_n]`.
pub fn core_interval(n: usize) -> QClopenInterval {
    QClopenInterval::centered(&QuadNum::zero(), &radius(n)).expect("r_n is irrational")
}

/// `[k - eps, k + eps]`.
pub fn level_interval(k: i64) -> QClopenInterval {
    QClopenInterval::centered(&QuadNum::from_int(k), &epsilon()).expect("eps is irrational")
}

/// The built pieces. `pos[i]` is `g_{i+1}`, `neg[i]` is `g_{-(i+1)}`, and
/// `a[i], b[i], h[i]` belong to level `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExampleMap {
    depth: usize,
    epsilon: QuadNum,
    pos: Vec<AffinePiece>,
    neg: Vec<AffinePiece>,
    a: Vec<QClopenInterval>,
    b: Vec<QClopenInterval>,
    h: Vec<AffinePiece>,
}

/// Result of applying the partial map at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub value: QuadNum,
    pub piece: String,
    /// Whether the value is rational; affine pieces with irrational slope
    /// move most rationals off Q.
    pub rational: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub n: usize,
    pub a_in_level: bool,
    pub b_in_level: bool,
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    /// `g_n ... g_1 g_{-1} ... g_{-n}(B_n)`, when the chain is defined.
    pub p3_image: Option<QClopenInterval>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarWitness {
    pub n: usize,
    pub m: usize,
    /// `f^n((-r_n, r_n))`, which should be `(n - eps, n + eps)`.
    pub forward_image: QClopenInterval,
    /// `f^{-n}((-r_n, r_n))`, which should be `(-n - eps, -n + eps)`.
    pub backward_image: QClopenInterval,
    pub a_n: QClopenInterval,
    pub b_n: QClopenInterval,
    pub a_in_forward: bool,
    /// `h_n(A_n) = B_n`, so `B_n` lies in `f^{n+1}((-r_n, r_n))`.
    pub b_in_forward_next: bool,
    pub b_in_backward: bool,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicScan {
    pub samples: usize,
    pub max_period: usize,
    pub periodic: usize,
    pub exited: usize,
    pub survived: usize,
    /// Index and period of the first periodic sample.
    pub first_periodic: Option<(usize, usize)>,
    pub pass: bool,
}

pub fn build_example(depth: usize) -> Result<ExampleMap, QexactError> {
    if depth > DEPTH_CAP {
        return Err(QexactError::DepthCapExceeded { depth, cap: DEPTH_CAP });
    }
    if depth == 0 {
        return Err(QexactError::InvalidLevel { n: 0 });
    }
    let mut pos: Vec<AffinePiece> = Vec::with_capacity(depth);
    let mut neg: Vec<AffinePiece> = Vec::with_capacity(depth);
    for n in 1..=depth {
        let core = core_interval(n);
        let dom = chain_image(&core, pos.iter()).ok_or_else(|| broken(format!("dom g_{n}")))?;
        pos.push(AffinePiece::between(format!("g_{n}"), dom, level_interval(n as i64)));
        let ran = chain_preimage(&core, neg.iter()).ok_or_else(|| broken(format!("ran g_-{n}")))?;
        neg.push(AffinePiece::between(format!("g_-{n}"), level_interval(-(n as i64)), ran));
    }

    let mut map = ExampleMap { depth, epsilon: epsilon(), pos, neg, a: Vec::new(), b: Vec::new(), h: Vec::new() };
    for n in 1..depth {
        let b = map.select_b(n)?;
        let a = map.select_a(n, &b)?;
        map.h.push(AffinePiece::between(format!("h_{n}"), a.clone(), b.clone()));
        map.a.push(a);
        map.b.push(b);
    }
    Ok(map)
}

fn broken(what: String) -> QexactError {
    QexactError::ConstructionFailure { reason: format!("{what} leaves the built pieces") }
}

/// Pushes `i` forward through the pieces in order.
fn chain_image<'a>(i: &QClopenInterval, mut pieces: impl Iterator<Item = &'a AffinePiece>) -> Option<QClopenInterval> {
    pieces.try_fold(i.clone(), |acc, p| p.image(&acc))
}

/// Pulls `i` back through the pieces in order.
fn chain_preimage<'a>(
    i: &QClopenInterval,
    mut pieces: impl Iterator<Item = &'a AffinePiece>,
) -> Option<QClopenInterval> {
    pieces.try_fold(i.clone(), |acc, p| p.preimage(&acc))
}

impl ExampleMap {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn epsilon(&self) -> &QuadNum {
        &self.epsilon
    }

    /// `g_k` for `1 <= |k| <= depth`.
    pub fn g(&self, k: i64) -> Option<&AffinePiece> {
        let i = usize::try_from(k.unsigned_abs()).ok()?.checked_sub(1)?;
        if k > 0 {
            self.pos.get(i)
        } else {
            self.neg.get(i)
        }
    }

    pub fn a(&self, n: usize) -> Option<&QClopenInterval> {
        self.a.get(n.checked_sub(1)?)
    }

    pub fn b(&self, n: usize) -> Option<&QClopenInterval> {
        self.b.get(n.checked_sub(1)?)
    }

    pub fn h(&self, n: usize) -> Option<&AffinePiece> {
        self.h.get(n.checked_sub(1)?)
    }

    /// All pieces of the partial map `g`.
    pub fn pieces(&self) -> impl Iterator<Item = &AffinePiece> {
        self.pos.iter().chain(&self.neg).chain(&self.h)
    }

    /// Replaces `A_n` (and `h_n` with it) without any checks, for building
    /// maps that violate the construction.
    pub fn replace_a(&mut self, n: usize, a: QClopenInterval) -> Result<(), QexactError> {
        let i = self.level_index(n)?;
        self.h[i] = AffinePiece::between(format!("h_{n}"), a.clone(), self.b[i].clone());
        self.a[i] = a;
        Ok(())
    }

    fn level_index(&self, n: usize) -> Result<usize, QexactError> {
        if n >= 1 && n <= self.a.len() {
            Ok(n - 1)
        } else {
            Err(QexactError::InvalidLevel { n })
        }
    }

    /// `B_n`: middle third of the gap between `-n - eps` and `ran g_{-(n+1)}`.
    fn select_b(&self, n: usize) -> Result<QClopenInterval, QexactError> {
        let level = level_interval(-(n as i64));
        let ran = &self.neg[n].target;
        if !level.contains_interval(ran) {
            return Err(QexactError::ConstructionFailure {
                reason: format!("ran g_-{} is not inside level -{n}", n + 1),
            });
        }
        Ok(QClopenInterval::new(level.lo().clone(), ran.lo().clone())?.middle_third()?)
    }

    /// `A_n`: middle third of the gap between `dom g_{n+1}` and `n + eps`,
    /// shrunk by middle thirds while it meets the P3 image of `B_n`.
    fn select_a(&self, n: usize, b: &QClopenInterval) -> Result<QClopenInterval, QexactError> {
        let level = level_interval(n as i64);
        let dom = &self.pos[n].source;
        if !level.contains_interval(dom) {
            return Err(QexactError::ConstructionFailure {
                reason: format!("dom g_{} is not inside level {n}", n + 1),
            });
        }
        let image = self.round_trip(n, b).ok_or_else(|| broken(format!("P3 image of B_{n}")))?;
        let mut a = QClopenInterval::new(dom.hi().clone(), level.hi().clone())?.middle_third()?;
        for _ in 0..SHRINK_ROUNDS {
            if !a.meets(&image) {
                return Ok(a);
            }
            a = a.middle_third()?;
        }
        Err(QexactError::ConstructionFailure { reason: format!("no A_{n} avoids the P3 image") })
    }

    /// `g_n ... g_1 g_{-1} ... g_{-n}(i)`.
    fn round_trip(&self, n: usize, i: &QClopenInterval) -> Option<QClopenInterval> {
        let down = self.neg[..n].iter().rev();
        let up = self.pos[..n].iter();
        chain_image(i, down.chain(up))
    }

    /// Every source interval, with its label.
    fn sources(&self) -> impl Iterator<Item = (&str, &QClopenInterval)> {
        self.pieces().map(|p| (p.label.as_str(), &p.source))
    }

    pub fn check_domains_disjoint(&self) -> bool {
        pairwise_disjoint(&self.sources().map(|(_, s)| s).collect::<Vec<_>>())
    }

    /// Injectivity of `g`: the targets are pairwise disjoint too.
    pub fn check_ranges_disjoint(&self) -> bool {
        pairwise_disjoint(&self.pieces().map(|p| &p.target).collect::<Vec<_>>())
    }

    pub fn check_p123(&self, n: usize) -> Result<LevelReport, QexactError> {
        let i = self.level_index(n)?;
        let (a, b) = (&self.a[i], &self.b[i]);
        let a_in_level = level_interval(n as i64).contains_interval(a);
        let b_in_level = level_interval(-(n as i64)).contains_interval(b);
        let p1 = !a.meets(&self.pos[n].source);
        let p2 = !b.meets(&self.neg[n].target);
        let p3_image = self.round_trip(n, b);
        let p3 = p3_image.as_ref().is_some_and(|img| !img.meets(a));
        Ok(LevelReport {
            n,
            a_in_level,
            b_in_level,
            p1,
            p2,
            p3,
            p3_image,
            pass: a_in_level && b_in_level && p1 && p2 && p3,
        })
    }

    /// The piece whose source contains `x`, if any.
    pub fn piece_at(&self, x: &QuadNum) -> Option<&AffinePiece> {
        self.pieces().find(|p| p.source.contains(x))
    }

    pub fn apply_g(&self, x: &BigRational) -> Result<Evaluation, QexactError> {
        self.apply_point(&QuadNum::from_rational(x.clone()))
    }

    pub fn apply_point(&self, x: &QuadNum) -> Result<Evaluation, QexactError> {
        let piece = self.piece_at(x).ok_or(QexactError::OutsideDomain)?;
        let value = piece.apply(x);
        let rational = value.is_rational();
        Ok(Evaluation { value, piece: piece.label.clone(), rational })
    }

    /// Exact property (*) witness `m = n` at the point 0.
    pub fn star_witness(&self, n: usize) -> Result<StarWitness, QexactError> {
        if n >= self.depth {
            return Err(QexactError::DepthCapExceeded { depth: n, cap: self.depth.saturating_sub(1) });
        }
        let i = self.level_index(n)?;
        let core = core_interval(n);
        let forward_image = chain_image(&core, self.pos[..n].iter()).ok_or_else(|| broken(format!("f^{n}(I_{n})")))?;
        let backward_image =
            chain_preimage(&core, self.neg[..n].iter()).ok_or_else(|| broken(format!("f^-{n}(I_{n})")))?;
        let (a, b) = (&self.a[i], &self.b[i]);
        let a_in_forward = forward_image.contains_interval(a);
        let b_in_forward_next = a_in_forward && self.h[i].image(a).as_ref() == Some(b);
        let b_in_backward = backward_image.contains_interval(b);
        let certified = b_in_forward_next && b_in_backward;
        Ok(StarWitness {
            n,
            m: n,
            forward_image,
            backward_image,
            a_n: a.clone(),
            b_n: b.clone(),
            a_in_forward,
            b_in_forward_next,
            b_in_backward,
            certified,
        })
    }

    /// One rational point per piece: the midpoint when it is rational,
    /// otherwise the double nearest to it, read back exactly.
    pub fn default_samples(&self) -> Vec<QuadNum> {
        self.pieces()
            .map(|p| {
                let mid = p.source.midpoint();
                if mid.is_rational() {
                    return mid;
                }
                let approx = BigRational::from_float(mid.to_f64()).expect("midpoint is finite");
                let q = QuadNum::from_rational(approx);
                debug_assert!(p.source.contains(&q));
                q
            })
            .collect()
    }

    /// Follows each sample for up to `max_period` steps and counts exact
    /// returns to the start.
    pub fn no_periodic_scan(&self, samples: &[QuadNum], max_period: usize) -> PeriodicScan {
        let mut scan = PeriodicScan {
            samples: samples.len(),
            max_period,
            periodic: 0,
            exited: 0,
            survived: 0,
            first_periodic: None,
            pass: false,
        };
        for (idx, start) in samples.iter().enumerate() {
            let mut x = start.clone();
            let mut outcome = None;
            for step in 1..=max_period {
                match self.apply_point(&x) {
                    Ok(e) => x = e.value,
                    Err(_) => {
                        outcome = Some(false);
                        break;
                    }
                }
                if &x == start {
                    scan.first_periodic.get_or_insert((idx, step));
                    outcome = Some(true);
                    break;
                }
            }
            match outcome {
                Some(true) => scan.periodic += 1,
                Some(false) => scan.exited += 1,
                None => scan.survived += 1,
            }
        }
        scan.pass = scan.periodic == 0;
        scan
    }
}

fn pairwise_disjoint(items: &[&QClopenInterval]) -> bool {
    items.iter().enumerate().all(|(i, s)| items[i + 1..].iter().all(|t| !s.meets(t)))
}
