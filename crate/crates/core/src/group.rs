//! The group operation transported along the conjugacy `g`:
//! `x (+) y = g(g^{-1}(x) + g^{-1}(y))`.
//!
//! `g` is an isomorphism from `(R, +)` onto `(R, (+))`, and since
//! `g(u + 1) = f(g(u))`, the map `f` is translation by `g(1) = f(0)` in the
//! new operation.

use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::conjugacy::{ConjugacyError, ConjugacyMap};
use crate::monotone::MonotoneMap1D;
use crate::sampling::{rng, LawReport, LawTally, SampleConfig};

pub struct RebuiltGroup {
    conj: ConjugacyMap,
}

impl fmt::Debug for RebuiltGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RebuiltGroup").field("conjugacy", &self.conj).finish()
    }
}

/// Adds two `(rung, offset)` decompositions, keeping the offset in `[0, 1)`.
fn add_parts((n1, t1): (i64, f64), (n2, t2): (i64, f64)) -> (i64, f64) {
    let t = t1 + t2;
    if t >= 1.0 {
        (n1 + n2 + 1, t - 1.0)
    } else {
        (n1 + n2, t)
    }
}

fn neg_parts((n, t): (i64, f64)) -> (i64, f64) {
    if t == 0.0 {
        return (-n, 0.0);
    }
    let s = 1.0 - t;
    if s >= 1.0 {
        (-n, 0.0)
    } else {
        (-n - 1, s)
    }
}

impl RebuiltGroup {
    pub fn new(f: &MonotoneMap1D) -> Result<Self, ConjugacyError> {
        Ok(RebuiltGroup { conj: ConjugacyMap::new(f)? })
    }

    pub fn from_conjugacy(conj: ConjugacyMap) -> Self {
        RebuiltGroup { conj }
    }

    pub fn conjugacy(&self) -> &ConjugacyMap {
        &self.conj
    }

    pub fn map(&self) -> &MonotoneMap1D {
        self.conj.map()
    }

    /// `x (+) y`.
    pub fn op(&self, x: f64, y: f64) -> Result<f64, ConjugacyError> {
        let sum = add_parts(self.conj.inverse_parts(x)?, self.conj.inverse_parts(y)?);
        self.conj.forward_parts(sum.0, sum.1)
    }

    /// Synonym for [`op`](Self::op) under the name the operation goes by
    /// once it is attached to `f`.
    pub fn plus_f(&self, x: f64, y: f64) -> Result<f64, ConjugacyError> {
        self.op(x, y)
    }

    pub fn identity(&self) -> f64 {
        0.0
    }

    /// `g(-g^{-1}(x))`.
    pub fn inv(&self, x: f64) -> Result<f64, ConjugacyError> {
        let (n, t) = neg_parts(self.conj.inverse_parts(x)?);
        self.conj.forward_parts(n, t)
    }

    /// The element `f` translates by: `g(1) = f(0)`.
    pub fn shift_element(&self) -> f64 {
        self.conj.anchor(1).expect("f(0) is cached at construction")
    }

    /// Checks `f(x) = x (+) f(0)` at random `x` in the sample range.
    pub fn verify_shift(&self, cfg: &SampleConfig) -> LawReport {
        let mut rng = rng(cfg.seed);
        let shift = self.shift_element();
        let mut tally = LawTally::new("shift", cfg.tol);
        for _ in 0..cfg.samples {
            let x = cfg.draw(&mut rng);
            let outcome = (|| {
                let fx = self.map().eval(x)?;
                Ok::<_, ConjugacyError>(libm::fabs(fx - self.op(x, shift)?))
            })();
            tally.record(&[x], outcome);
        }
        tally.finish()
    }

    /// Samples triples and checks associativity, identity, inverses,
    /// commutativity and the homomorphism law `g(a + b) = g(a) (+) g(b)`.
    /// Group elements and `g`-coordinates are both drawn from the sample range.
    pub fn verify_axioms(&self, cfg: &SampleConfig) -> AxiomReport {
        let mut rng = rng(cfg.seed);
        let mut assoc = LawTally::new("associativity", cfg.tol);
        let mut ident = LawTally::new("identity", cfg.tol);
        let mut inverse = LawTally::new("inverse", cfg.tol);
        let mut comm = LawTally::new("commutativity", cfg.tol);
        let mut hom = LawTally::new("homomorphism", cfg.tol);
        let e = self.identity();
        for _ in 0..cfg.samples {
            let (x, y, z) = (cfg.draw(&mut rng), cfg.draw(&mut rng), cfg.draw(&mut rng));
            let (a, b) = (cfg.draw(&mut rng), cfg.draw(&mut rng));

            assoc.record(
                &[x, y, z],
                (|| {
                    let left = self.op(self.op(x, y)?, z)?;
                    let right = self.op(x, self.op(y, z)?)?;
                    Ok::<_, ConjugacyError>(libm::fabs(left - right))
                })(),
            );
            ident.record(
                &[x],
                (|| {
                    let d1 = libm::fabs(self.op(x, e)? - x);
                    let d2 = libm::fabs(self.op(e, x)? - x);
                    Ok::<_, ConjugacyError>(d1.max(d2))
                })(),
            );
            inverse.record(
                &[x],
                (|| {
                    let ix = self.inv(x)?;
                    let d1 = libm::fabs(self.op(x, ix)? - e);
                    let d2 = libm::fabs(self.op(ix, x)? - e);
                    Ok::<_, ConjugacyError>(d1.max(d2))
                })(),
            );
            comm.record(&[x, y], (|| Ok::<_, ConjugacyError>(libm::fabs(self.op(x, y)? - self.op(y, x)?)))());
            hom.record(
                &[a, b],
                (|| {
                    let g = &self.conj;
                    let lhs = g.forward(a + b)?;
                    let rhs = self.op(g.forward(a)?, g.forward(b)?)?;
                    Ok::<_, ConjugacyError>(libm::fabs(lhs - rhs))
                })(),
            );
        }
        let laws = [assoc, ident, inverse, comm, hom].into_iter().map(LawTally::finish).collect::<Vec<_>>();
        AxiomReport { pass: laws.iter().all(|l| l.pass), laws }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub laws: Vec<LawReport>,
}

impl AxiomReport {
    pub fn law(&self, name: &str) -> Option<&LawReport> {
        self.laws.iter().find(|l| l.law == name)
    }

    pub fn max_deviation(&self) -> f64 {
        self.laws.iter().map(|l| l.max_deviation).fold(0.0, f64::max)
    }
}

/// A map on `{-window, ..., window}` given by its values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMapTable {
    window: i64,
    values: Vec<i64>,
}

impl IntMapTable {
    pub fn from_fn(window: i64, f: impl Fn(i64) -> i64) -> Self {
        assert!(window >= 0, "window must be non-negative");
        IntMapTable { window, values: (-window..=window).map(f).collect() }
    }

    /// `values[k]` is the image of `k - window`.
    pub fn from_values(window: i64, values: Vec<i64>) -> Option<Self> {
        (window >= 0 && values.len() as i64 == 2 * window + 1).then_some(IntMapTable { window, values })
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn get(&self, n: i64) -> Option<i64> {
        if n.abs() > self.window {
            return None;
        }
        Some(self.values[(n + self.window) as usize])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotMonotone {
    pub at: i64,
}

impl fmt::Display for NotMonotone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "integer map is not monotone at n = {}", self.at)
    }
}

/// On the integers every increasing bijection is a translation. Returns the
/// offset `c` when `n -> n + c` across the whole window, `None` when the
/// table is monotone but not a translation (decreasing maps included).
pub fn discrete_shift_detect(table: &IntMapTable) -> Result<Option<i64>, NotMonotone> {
    let w = table.window;
    let mut increasing = None;
    for n in -w..w {
        let (a, b) = (table.get(n).unwrap(), table.get(n + 1).unwrap());
        let up = match a.cmp(&b) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Greater => false,
            core::cmp::Ordering::Equal => return Err(NotMonotone { at: n }),
        };
        match increasing {
            None => increasing = Some(up),
            Some(dir) if dir != up => return Err(NotMonotone { at: n }),
            _ => {}
        }
    }
    if increasing == Some(false) {
        return Ok(None);
    }
    let c = table.get(-w).unwrap() + w;
    Ok((-w..=w).all(|n| table.get(n) == Some(n + c)).then_some(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::monotone::{certify_map, Grid};

    fn group(text: &str) -> RebuiltGroup {
        let f = certify_map(&parse_expr(text).unwrap(), &Grid::default()).unwrap();
        RebuiltGroup::new(&f).unwrap()
    }

    #[test]
    fn op_examples() {
        assert_eq!(group("x + 1").op(2.0, 3.0).unwrap(), 5.0);
        assert_eq!(group("x + 3").op(1.5, 3.0).unwrap(), 4.5);
        for text in ["x + 3", "x + exp(x)", "x - 1"] {
            let g = group(text);
            for x in [-2.5, 0.0, 0.75, 4.0] {
                assert!((g.op(x, 0.0).unwrap() - x).abs() <= 1e-12, "{text} {x}");
            }
        }
    }

    #[test]
    fn inv_examples() {
        assert_eq!(group("x + 3").inv(0.0).unwrap(), 0.0);
        assert_eq!(group("x + 3").inv(3.0).unwrap(), -3.0);
        assert_eq!(group("x + 1").inv(2.5).unwrap(), -2.5);
        assert_eq!(group("x + exp(x)").inv(0.0).unwrap(), 0.0);
    }

    #[test]
    fn shift_elements() {
        assert_eq!(group("x + 3").shift_element(), 3.0);
        assert_eq!(group("x + exp(x)").shift_element(), 1.0);
        assert_eq!(group("x + 0.5 + 0.4*sin(x)").shift_element(), 0.5);
        assert_eq!(group("x - 1").shift_element(), -1.0);
    }

    #[test]
    fn plus_f_is_op() {
        let g = group("x + 0.5 + 0.4*sin(x)");
        assert_eq!(g.plus_f(1.25, -3.0).unwrap(), g.op(1.25, -3.0).unwrap());
    }

    #[test]
    fn parts_arithmetic() {
        assert_eq!(add_parts((1, 0.75), (2, 0.5)), (4, 0.25));
        assert_eq!(add_parts((-1, 0.25), (0, 0.5)), (-1, 0.75));
        assert_eq!(neg_parts((2, 0.0)), (-2, 0.0));
        assert_eq!(neg_parts((2, 0.25)), (-3, 0.75));
        assert_eq!(neg_parts((0, 1e-300)), (0, 0.0));
    }

    #[test]
    fn shift_verification_examples() {
        let cfg = SampleConfig::default();
        let r = group("x + 3").verify_shift(&cfg.with_tol(1e-8));
        assert!(r.pass && r.max_deviation <= 1e-8, "{r:?}");
        let r = group("x + 1").verify_shift(&cfg.with_samples(1));
        assert!(r.pass && r.max_deviation == 0.0, "{r:?}");
        let r = group("x + exp(x)").verify_shift(&cfg.with_tol(1e-7).with_range(-5.0, 5.0));
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn axiom_examples() {
        let cfg = SampleConfig::default().with_samples(100);
        let r = group("x + 1").verify_axioms(&cfg.with_tol(1e-9));
        assert!(r.pass, "{r:?}");
        let r = group("x + 3").verify_axioms(&cfg.with_tol(1e-8));
        assert!(r.pass, "{r:?}");
        let r = group("x + 0.5 + 0.4*sin(x)").verify_axioms(&cfg.with_tol(1e-6));
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn discrete_examples() {
        assert_eq!(discrete_shift_detect(&IntMapTable::from_fn(100, |n| n + 2)), Ok(Some(2)));
        assert_eq!(discrete_shift_detect(&IntMapTable::from_fn(100, |n| n - 5)), Ok(Some(-5)));
        assert_eq!(discrete_shift_detect(&IntMapTable::from_fn(100, |n| 2 * n)), Ok(None));
        assert_eq!(discrete_shift_detect(&IntMapTable::from_fn(10, |n| 3 - n)), Ok(None));
        assert_eq!(discrete_shift_detect(&IntMapTable::from_fn(10, |n| n * n)), Err(NotMonotone { at: -10 + 10 }));
        assert!(IntMapTable::from_values(1, alloc::vec![1, 2]).is_none());
        let t = IntMapTable::from_values(1, alloc::vec![0, 1, 2]).unwrap();
        assert_eq!(discrete_shift_detect(&t), Ok(Some(1)));
    }
}
