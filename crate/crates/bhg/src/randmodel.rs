//! The random-sequence model `S(alpha, m)`: every integer `x >= m` belongs
//! to the sequence independently with probability `x^-alpha`; integers below
//! `m` never do.
//!
//! Sampling is driven by a keyed pseudo-random function of `(seed, x)`
//! (a splitmix-style counter construction), so membership of `x` depends only
//! on the seed and `x` itself. Ranges can be sampled in any order or in
//! parallel and always produce the same sequence, and distinct `x` values
//! decorrelate through the mixer's avalanche rather than shared generator
//! state.

use crate::error::{Error, Result};
use crate::sequence::{SeqMeta, Sequence, Source};
use crate::util::Kahan;

/// Enumeration cap for the exact expectation sum.
pub const EXPECTATION_TUPLE_CAP: u64 = 10_000_000;

/// Keyed uniform in `[0, 1)`: splitmix64 finalizer over a state derived from
/// the seed and the evaluation point.
pub fn uniform(seed: u64, x: u64) -> f64 {
    let mut z = x
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(seed ^ 0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A point in the parameter space of `S(alpha, m)` plus a sampling seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomModel {
    pub alpha: f64,
    pub m: u64,
    pub seed: u64,
}

impl RandomModel {
    pub fn new(alpha: f64, m: u64, seed: u64) -> Result<RandomModel> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha={alpha} must lie in (0, 1)")));
        }
        if m < 1 {
            return Err(Error::Domain("cutoff m must be >= 1".into()));
        }
        Ok(RandomModel { alpha, m, seed })
    }

    /// `P(x in A)`: zero below the cutoff, `x^-alpha` from it onward.
    pub fn inclusion_prob(&self, x: u64) -> f64 {
        if x < self.m {
            0.0
        } else {
            (x as f64).powf(-self.alpha)
        }
    }

    /// Membership of `x` under this seed, independent of evaluation order.
    pub fn includes(&self, x: u64) -> bool {
        x >= self.m && uniform(self.seed, x) < self.inclusion_prob(x)
    }

    /// All members `<= n_bound`, as raw values.
    pub fn sample_elements(&self, n_bound: u64) -> Vec<u64> {
        (self.m..=n_bound).filter(|&x| self.includes(x)).collect()
    }

    /// All members `<= n_bound`, packaged with full provenance.
    pub fn sample(&self, n_bound: u64) -> Sequence {
        let mut meta = SeqMeta::bare(Source::Random);
        meta.alpha = Some(self.alpha);
        meta.m = Some(self.m);
        meta.seed = Some(self.seed);
        meta.bound = Some(n_bound.into());
        Sequence::from_u64s(self.sample_elements(n_bound), meta)
            .expect("ascending scan is strictly increasing")
    }

    /// Exact `E(r_{h,A}(n))`: the sum over all nondecreasing h-tuples of
    /// integers `>= m` summing to `n` of the product of inclusion
    /// probabilities over the tuple's *distinct* values (repeated values
    /// contribute their probability once; the events coincide).
    pub fn exact_expected_reps(&self, h: u32, n: u64) -> Result<f64> {
        if h < 2 {
            return Err(Error::Domain(format!("order h={h} must be >= 2")));
        }
        let mut acc = Kahan::default();
        let mut visited: u64 = 0;
        self.expectation_rec(h as usize, self.m, n, 1.0, 0, &mut acc, &mut visited)?;
        Ok(acc.value())
    }

    #[allow(clippy::too_many_arguments)]
    fn expectation_rec(
        &self,
        parts: usize,
        min_val: u64,
        remaining: u64,
        prod: f64,
        prev: u64,
        acc: &mut Kahan,
        visited: &mut u64,
    ) -> Result<()> {
        *visited += 1;
        if *visited > EXPECTATION_TUPLE_CAP {
            return Err(Error::CapExceeded {
                what: "expectation tuple enumeration",
                cap: EXPECTATION_TUPLE_CAP,
                required: *visited,
            });
        }
        if parts == 1 {
            if remaining >= min_val {
                let p = if remaining == prev {
                    1.0
                } else {
                    self.inclusion_prob(remaining)
                };
                acc.add(prod * p);
            }
            return Ok(());
        }
        let mut x = min_val;
        while (x as u128) * parts as u128 <= remaining as u128 {
            let p = if x == prev { 1.0 } else { self.inclusion_prob(x) };
            self.expectation_rec(parts - 1, x, remaining - x, prod * p, x, acc, visited)?;
            x += 1;
        }
        Ok(())
    }
}

/// The explicit intermediate bound from the expectation estimate:
/// `(n/h)^-alpha * sum_{j=1..h} (n^(1-alpha)/(1-alpha))^(j-1)`.
///
/// Dominates `exact_expected_reps` for every `n >= h*m`: the largest tuple
/// coordinate is at least `n/h`, and the remaining distinct coordinates are
/// bounded by the integral of `x^-alpha` up to `n`.
pub fn erla_bound(h: u32, alpha: f64, n: u64) -> f64 {
    assert!(h >= 2 && n >= u64::from(h), "erla_bound needs h >= 2, n >= h");
    assert!(alpha > 0.0 && alpha < 1.0);
    let base = (n as f64 / f64::from(h)).powf(-alpha);
    let growth = (n as f64).powf(1.0 - alpha) / (1.0 - alpha);
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..h {
        sum += term;
        term *= growth;
    }
    base * sum
}
