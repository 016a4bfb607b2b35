//! Seeded sampling and deviation bookkeeping shared by the numeric checks.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Name of the generator behind [`rng`], recorded in reports.
pub const GENERATOR: &str = "ChaCha8Rng";
pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleConfig {
    pub samples: usize,
    pub tol: f64,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { samples: 1000, tol: 1e-8, lo: -20.0, hi: 20.0, seed: DEFAULT_SEED }
    }
}

impl SampleConfig {
    pub fn with_samples(self, samples: usize) -> Self {
        SampleConfig { samples, ..self }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        SampleConfig { tol, ..self }
    }

    pub fn with_range(self, lo: f64, hi: f64) -> Self {
        SampleConfig { lo, hi, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SampleConfig { seed, ..self }
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo < self.hi {
            rng.gen_range(self.lo..self.hi)
        } else {
            self.lo
        }
    }
}

/// Outcome of checking one law over a batch of samples. Samples that could
/// not be evaluated at all (for instance beyond the ladder cap) count against
/// `pass` and are tallied in `unevaluated`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub pass: bool,
    pub tol: f64,
    pub unevaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_input: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

pub(crate) struct LawTally {
    report: LawReport,
}

impl LawTally {
    pub(crate) fn new(law: &str, tol: f64) -> Self {
        LawTally {
            report: LawReport {
                law: law.to_string(),
                samples: 0,
                max_deviation: 0.0,
                pass: true,
                tol,
                unevaluated: 0,
                worst_input: None,
                first_error: None,
            },
        }
    }

    pub(crate) fn record<E: core::fmt::Display>(&mut self, inputs: &[f64], outcome: Result<f64, E>) {
        let r = &mut self.report;
        r.samples += 1;
        match outcome {
            Ok(dev) => {
                // NaN deviations must not slip past the comparison.
                if dev.is_nan() || dev > r.max_deviation {
                    r.max_deviation = if dev.is_nan() { f64::INFINITY } else { dev };
                    r.worst_input = Some(inputs.to_vec());
                }
            }
            Err(e) => {
                r.unevaluated += 1;
                if r.first_error.is_none() {
                    r.first_error = Some(alloc::format!("{e} (input {inputs:?})"));
                }
            }
        }
    }

    pub(crate) fn finish(mut self) -> LawReport {
        let r = &mut self.report;
        r.pass = r.unevaluated == 0 && r.max_deviation <= r.tol;
        self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_draws_repeat() {
        let cfg = SampleConfig::default();
        let a: Vec<f64> = (0..5)
            .map({
                let mut r = rng(7);
                move |_| cfg.draw(&mut r)
            })
            .collect();
        let b: Vec<f64> = (0..5)
            .map({
                let mut r = rng(7);
                move |_| cfg.draw(&mut r)
            })
            .collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| (-20.0..20.0).contains(x)));
    }

    #[test]
    fn tally_fails_on_errors_and_nan() {
        let mut t = LawTally::new("demo", 1e-3);
        t.record::<&str>(&[1.0], Ok(1e-4));
        assert!(t.report.pass);
        t.record(&[2.0], Err("boom"));
        let r = t.finish();
        assert!(!r.pass);
        assert_eq!(r.unevaluated, 1);
        assert_eq!(r.max_deviation, 1e-4);

        let mut t = LawTally::new("nan", 1.0);
        t.record::<&str>(&[0.0], Ok(f64::NAN));
        assert!(!t.finish().pass);
    }
}
