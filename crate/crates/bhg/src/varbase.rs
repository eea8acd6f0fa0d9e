//! Variable-base numeral system.
//!
//! Every natural number has a unique expansion
//! `x = b_0 + b_1*q_1 + b_2*q_1*q_2 + ...` with `0 <= b_i < q_{i+1}`. The
//! bases here follow the doubly-exponential schedule
//! `q_i = floor(e^((1+r)^(i-1)))` with `r = log2(l)/l`, evaluated in
//! fixed-point decimal at a configurable precision so that the floors are
//! reproducible. `q_1 = 2` always, because `floor(e) = 2` no matter what `r`
//! is.
//!
//! Floors are only trusted when the computed value stays at least
//! `10^-(precision/2)` away from an integer; anything closer raises
//! [`Error::Precision`] instead of silently guessing a side.

use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::bigfloat::{self, Fx};
use crate::error::{Error, Result};

/// Default evaluation precision in decimal digits.
pub const DEFAULT_PRECISION: u32 = 64;
/// Lowest precision the guard-band argument supports.
pub const MIN_PRECISION: u32 = 50;
/// Refuse to materialize bases beyond this many decimal digits. The digit
/// products grow doubly exponentially; nothing at desk scale gets close.
pub const BASE_DIGITS_BUDGET: u64 = 20_000;

struct ScheduleState {
    /// `bases[i-1]` holds `q_i`; filled sequentially.
    bases: Vec<BigUint>,
    /// `r` at the largest scale computed so far.
    r: Option<Fx>,
}

/// The base schedule `q_1, q_2, ...` for a fixed window length `l`.
///
/// Thread-safe: concurrent `base_at` calls fill the cache at most once per
/// index.
pub struct BaseSchedule {
    l: u32,
    precision: u32,
    state: Mutex<ScheduleState>,
}

impl BaseSchedule {
    pub fn new(l: u32) -> Result<Self> {
        Self::with_precision(l, DEFAULT_PRECISION)
    }

    pub fn with_precision(l: u32, precision: u32) -> Result<Self> {
        if l < 2 {
            return Err(Error::Domain(format!("window length l={l} must be >= 2")));
        }
        if precision < MIN_PRECISION {
            return Err(Error::Domain(format!(
                "precision {precision} below minimum {MIN_PRECISION}"
            )));
        }
        Ok(BaseSchedule {
            l,
            precision,
            state: Mutex::new(ScheduleState {
                bases: Vec::new(),
                r: None,
            }),
        })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `r = log2(l) / l` as a double, for size estimation only.
    pub fn r_f64(&self) -> f64 {
        (self.l as f64).log2() / self.l as f64
    }

    /// `r` at the requested scale, served from cache when possible. Serving
    /// a rounded-down copy of a higher-precision value is sound because the
    /// floor guard band dwarfs the last-ulp differences it introduces.
    fn r_at(state: &mut ScheduleState, l: u32, scale: u32) -> Fx {
        let needs_compute = match &state.r {
            Some(r) => r.scale() < scale,
            None => true,
        };
        if needs_compute {
            let r = bigfloat::log2_u64(u64::from(l), scale).div(&Fx::from_u64(u64::from(l), scale));
            state.r = Some(r);
        }
        state.r.as_ref().unwrap().rescale(scale)
    }

    /// Decimal-digit estimate of `q_i`, used for working-scale selection and
    /// the size budget. `e^((1+r)^(i-1))` has about `(1+r)^(i-1) * log10(e)`
    /// digits.
    fn digits_estimate(&self, i: u32) -> f64 {
        let x_est = (1.0 + self.r_f64()).powi(i as i32 - 1);
        (x_est * std::f64::consts::LOG10_E).ceil() + 2.0
    }

    fn check_budget(&self, i: u32) -> Result<f64> {
        let digits_est = self.digits_estimate(i);
        if !digits_est.is_finite() || digits_est as u64 > BASE_DIGITS_BUDGET {
            return Err(Error::Budget {
                what: "base magnitude (decimal digits)",
                limit: BASE_DIGITS_BUDGET,
                required: if digits_est.is_finite() {
                    digits_est as u64
                } else {
                    u64::MAX
                },
            });
        }
        Ok(digits_est)
    }

    /// `q_i = floor(e^((1+r)^(i-1)))`, cached, 1-indexed.
    pub fn base_at(&self, i: u32) -> Result<BigUint> {
        if i == 0 {
            return Err(Error::Domain("base index is 1-based".into()));
        }
        self.check_budget(i)?;
        let mut state = self.state.lock().unwrap();
        if let Some(q) = state.bases.get(i as usize - 1) {
            return Ok(q.clone());
        }
        let first_missing = state.bases.len() as u32 + 1;
        for idx in first_missing..=i {
            let q = self.compute_base(&mut state, idx)?;
            state.bases.push(q);
        }
        Ok(state.bases[i as usize - 1].clone())
    }

    fn compute_base(&self, state: &mut ScheduleState, i: u32) -> Result<BigUint> {
        let digits_est = self.check_budget(i)?;
        let scale = self.precision + digits_est as u32 + 48;
        let r = Self::r_at(state, self.l, scale);
        let one = Fx::from_u64(1, scale);
        let x = one.add(&r).pow_u64(u64::from(i) - 1);
        let v = bigfloat::exp(&x);
        // Guard band: |v - nearest integer| must exceed 10^-(precision/2).
        let guard_ulps = BigInt::from(10u32).pow(scale - self.precision.div_ceil(2));
        if v.ulps_to_nearest_int() < guard_ulps {
            return Err(Error::Precision {
                index: i,
                precision: self.precision,
            });
        }
        let q = v
            .floor()
            .to_biguint()
            .ok_or_else(|| Error::Internal(format!("negative base at i={i}")))?;
        debug_assert!(q >= BigUint::from(2u32));
        Ok(q)
    }

    /// Indices `i >= 2` in the cached prefix where `q_{i+1} <= q_i`.
    ///
    /// The schedule does not promise strict growth for small `i` (consecutive
    /// floors can coincide, e.g. `l = 64` gives `q_3 = q_4 = 3`); violations
    /// are reported, never repaired.
    pub fn monotonicity_violations(&self) -> Vec<u32> {
        let state = self.state.lock().unwrap();
        let mut out = Vec::new();
        for i0 in 1..state.bases.len().saturating_sub(1) {
            if state.bases[i0 + 1] <= state.bases[i0] {
                out.push(i0 as u32 + 1); // 1-indexed i with q_{i+1} <= q_i
            }
        }
        out
    }

    /// Number of bases materialized so far.
    pub fn cached_len(&self) -> usize {
        self.state.lock().unwrap().bases.len()
    }

    /// Digit expansion of `x`; trailing zeros are dropped.
    pub fn decode(&self, x: &BigUint) -> Result<DigitVector<'_>> {
        let mut digits = Vec::new();
        let mut rest = x.clone();
        let mut i = 1u32;
        while !rest.is_zero() {
            let q = self.base_at(i)?;
            digits.push(&rest % &q);
            rest /= &q;
            i += 1;
        }
        Ok(DigitVector {
            digits,
            schedule: self,
        })
    }

    /// Inverse of [`Self::decode`]: `sum b_i * q_1*...*q_i`. Errors when some digit
    /// is out of range for its base.
    pub fn encode(&self, digits: &[BigUint]) -> Result<BigUint> {
        let mut acc = BigUint::zero();
        let mut place = BigUint::from(1u32);
        for (idx, b) in digits.iter().enumerate() {
            let q = self.base_at(idx as u32 + 1)?;
            if b >= &q {
                return Err(Error::DigitRange {
                    index: idx,
                    digit: b.to_string(),
                    base: q.to_string(),
                });
            }
            acc += b * &place;
            place *= &q;
        }
        Ok(acc)
    }
}

/// A digit vector tied to the schedule that defines its bases.
pub struct DigitVector<'a> {
    digits: Vec<BigUint>,
    schedule: &'a BaseSchedule,
}

impl<'a> DigitVector<'a> {
    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    pub fn schedule(&self) -> &'a BaseSchedule {
        self.schedule
    }

    pub fn encode(&self) -> Result<BigUint> {
        self.schedule.encode(&self.digits)
    }

    /// Smallest and largest indices carrying a nonzero digit.
    pub fn nonzero_span(&self) -> Option<(usize, usize)> {
        let first = self.digits.iter().position(|d| !d.is_zero())?;
        let last = self.digits.iter().rposition(|d| !d.is_zero())?;
        Some((first, last))
    }
}
