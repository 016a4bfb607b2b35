//! Three-colouring of the line with `f(F_i)` disjoint from `F_i`.
//!
//! For the unit translation the pattern of period 2 made of three half-open
//! blocks of length 2/3 works: a block shifted by 1 lands in the next two
//! blocks and misses itself by 1/3 on each side. A general map is coloured by
//! pulling that pattern back through the conjugacy: `color(x)` is the block
//! of `g^{-1}(x)`. This pullback is this module's own construction.

use alloc::vec::Vec;

use serde::Serialize;

use crate::conjugacy::{ConjugacyError, ConjugacyMap, OffsetLadder};
use crate::sampling::{rng, SampleConfig};

pub const COLORS: usize = 3;

pub struct ColoringScheme<'a> {
    conj: &'a ConjugacyMap,
    /// `g(n + 1/3)` and `g(n + 2/3)`.
    thirds: [OffsetLadder<'a>; 2],
}

/// A maximal block. For an order-preserving `g` it is `[lo, hi)`; for an
/// order-reversing one it is `(lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Block {
    pub lo: f64,
    pub hi: f64,
    pub color: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColoringReport {
    pub samples: usize,
    pub violations: usize,
    pub unevaluated: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<alloc::string::String>,
}

/// Exact decomposition of the left end `2k/3` of block `k` as `(n, t)`.
fn block_start(k: i64) -> (i64, f64) {
    let period = k.div_euclid(3);
    match k.rem_euclid(3) {
        0 => (2 * period, 0.0),
        1 => (2 * period, 2.0 / 3.0),
        _ => (2 * period + 1, 1.0 / 3.0),
    }
}

impl<'a> ColoringScheme<'a> {
    pub fn new(conj: &'a ConjugacyMap) -> Self {
        let third = |t: f64| OffsetLadder::new(conj, t).expect("offset lies in [0, 1)");
        ColoringScheme { conj, thirds: [third(1.0 / 3.0), third(2.0 / 3.0)] }
    }

    /// Index `k` of the block holding `g^{-1}(x)`.
    pub fn block_of(&self, x: f64) -> Result<i64, ConjugacyError> {
        let (v, n) = self.conj.oriented_with_rung(x)?;
        // g^{-1}(x) lies in [n + j/3, n + (j+1)/3), so 3 g^{-1}(x) / 2 has
        // floor (3n + j) / 2.
        let mut j = 0;
        for ladder in &self.thirds {
            if ladder.oriented(n)? <= v {
                j += 1;
            }
        }
        Ok((3 * n + j).div_euclid(2))
    }

    pub fn color(&self, x: f64) -> Result<u8, ConjugacyError> {
        Ok(self.block_of(x)?.rem_euclid(3) as u8)
    }

    /// Checks `color(f(x)) != color(x)` at random points of the sample range.
    pub fn verify(&self, cfg: &SampleConfig) -> ColoringReport {
        let mut rng = rng(cfg.seed);
        let f = self.conj.map();
        let mut report = ColoringReport {
            samples: cfg.samples,
            violations: 0,
            unevaluated: 0,
            pass: false,
            first_violation: None,
            first_error: None,
        };
        for _ in 0..cfg.samples {
            let x = cfg.draw(&mut rng);
            let outcome = (|| {
                let fx = f.eval(x)?;
                Ok::<_, ConjugacyError>((self.color(x)?, self.color(fx)?))
            })();
            match outcome {
                Ok((a, b)) if a == b => {
                    report.violations += 1;
                    report.first_violation.get_or_insert(x);
                }
                Ok(_) => {}
                Err(e) => {
                    report.unevaluated += 1;
                    if report.first_error.is_none() {
                        report.first_error = Some(alloc::format!("{e} (input {x})"));
                    }
                }
            }
        }
        report.pass = report.violations == 0 && report.unevaluated == 0;
        report
    }

    /// The blocks meeting `[lo, hi)`, in increasing order of position.
    pub fn emit_blocks(&self, lo: f64, hi: f64) -> Result<Vec<Block>, ConjugacyError> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Ok(Vec::new());
        }
        let reversing = self.conj.is_order_reversing();
        // g-coordinates of the range ends; order flips with g.
        let (u_first, u_last) = if reversing { (hi, lo) } else { (lo, hi) };
        let (k_lo, k_hi) = {
            let a = self.block_of(u_first)?;
            let b = self.block_of(u_last)?;
            (a.min(b), a.max(b))
        };
        let mut blocks = Vec::new();
        for k in k_lo..=k_hi {
            let (sn, st) = block_start(k);
            let (en, et) = block_start(k + 1);
            let a = self.conj.forward_parts(sn, st)?;
            let b = self.conj.forward_parts(en, et)?;
            let (blo, bhi) = if a <= b { (a, b) } else { (b, a) };
            let meets = if reversing { blo < hi && bhi >= lo } else { blo < hi && bhi > lo };
            if meets && blo < bhi {
                blocks.push(Block { lo: blo, hi: bhi, color: k.rem_euclid(3) as u8 });
            }
        }
        blocks.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        Ok(blocks)
    }
}
