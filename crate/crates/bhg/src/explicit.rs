//! The explicit sequence: natural numbers whose digit expansions (in the
//! variable-base system) have every digit `b_i` in the digit set `A_{i+1}`
//! and all nonzero digits confined to `l` consecutive digit positions.
//!
//! Because each `A_{i+1}` sits inside `[0, q_{i+1}/h)`, adding `h` members
//! never carries between digit positions, and because each digit set is
//! `B_h[1]`, each digit of a sum decomposes in at most one way. That is the
//! whole mechanism behind the `(h!)^(lh)` representation bound.
//!
//! Window convention: membership requires some `w >= 0` with all nonzero
//! digit indices inside `{w, ..., w+l-1}`; equivalently the nonzero span is
//! shorter than `l`. Enumeration partitions members by their *lowest*
//! nonzero digit index, which visits every member exactly once.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bigfloat::{self, Fx};
use crate::digitsets::{digit_set_for_base, BhOneSet};
use crate::error::{Error, Result};
use crate::sequence::{SeqMeta, Sequence, Source};
use crate::varbase::{BaseSchedule, DEFAULT_PRECISION};

/// Refuse enumerations predicted to produce more members than this.
pub const ENUM_BUDGET: u64 = 10_000_000;

/// Parameters of the explicit construction: the order `h`, window length
/// `l`, the base schedule, and lazily-built digit sets per base index.
pub struct ExplicitParams {
    h: u32,
    l: u32,
    schedule: BaseSchedule,
    digit_sets: Mutex<BTreeMap<u32, Arc<BhOneSet>>>,
}

impl ExplicitParams {
    pub fn new(h: u32, l: u32) -> Result<ExplicitParams> {
        Self::with_precision(h, l, DEFAULT_PRECISION)
    }

    pub fn with_precision(h: u32, l: u32, precision: u32) -> Result<ExplicitParams> {
        if h < 2 {
            return Err(Error::Domain(format!("order h={h} must be >= 2")));
        }
        let schedule = BaseSchedule::with_precision(l, precision)?;
        Ok(ExplicitParams {
            h,
            l,
            schedule,
            digit_sets: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn schedule(&self) -> &BaseSchedule {
        &self.schedule
    }

    /// `A_i`, the digit set for base `q_i` (1-indexed); digit `b_(i-1)`
    /// ranges over it. Built on first use and cached.
    pub fn digit_set(&self, i: u32) -> Result<Arc<BhOneSet>> {
        if i == 0 {
            return Err(Error::Domain("digit set index is 1-based".into()));
        }
        {
            let cache = self.digit_sets.lock().unwrap();
            if let Some(set) = cache.get(&i) {
                return Ok(Arc::clone(set));
            }
        }
        // Build outside the lock: base computation may itself take a while,
        // and digit sets for different indices are independent.
        let q = self.schedule.base_at(i)?;
        let set = Arc::new(digit_set_for_base(self.h, &q)?);
        let mut cache = self.digit_sets.lock().unwrap();
        Ok(Arc::clone(cache.entry(i).or_insert(set)))
    }

    /// Membership test straight from the definition: decode, check every
    /// digit against its set, check the nonzero window. `0` is never a
    /// member (the sequence consists of positive integers).
    pub fn contains(&self, x: &BigUint) -> Result<bool> {
        let dv = self.schedule.decode(x)?;
        let (first, last) = match dv.nonzero_span() {
            Some(span) => span,
            None => return Ok(false), // x = 0
        };
        if last - first + 1 > self.l as usize {
            return Ok(false);
        }
        for (idx, digit) in dv.digits().iter().enumerate() {
            if digit.is_zero() {
                continue;
            }
            let set = self.digit_set(idx as u32 + 1)?;
            match digit.to_u64() {
                Some(d) => {
                    if !set.contains(d) {
                        return Ok(false);
                    }
                }
                None => return Ok(false), // digit sets live far below u64
            }
        }
        Ok(true)
    }

    /// Exactly `{ y in [1, x] : contains(y) }`, by direct generation:
    /// members are grouped by the lowest nonzero digit index `w`, with
    /// `b_w` ranging over `A_(w+1) \ {0}` and the remaining window digits
    /// over their full sets.
    pub fn enumerate_upto(&self, x: &BigUint) -> Result<Sequence> {
        if x.is_zero() {
            return Err(Error::Domain("enumeration bound must be >= 1".into()));
        }
        // Budget check: predicted member count across admissible windows.
        // Window positions whose place value q_1...q_i already exceeds x can
        // only carry digit 0, so they neither multiply the prediction nor
        // need their digit sets built. Aborts as soon as the partial product
        // crosses the budget.
        let mut predicted: u64 = 0;
        let mut place = BigUint::one(); // q_1 ... q_w
        let mut w = 0u32;
        loop {
            if &place > x {
                break;
            }
            let lead_len = self.digit_set(w + 1)?.len() as u64;
            if lead_len > 1 {
                let mut combos = lead_len - 1;
                let mut pos_place = place.clone();
                for t in 1..self.l {
                    pos_place *= self.schedule.base_at(w + t)?;
                    if &pos_place > x {
                        break; // digits from here on are forced to zero
                    }
                    if predicted.saturating_add(combos) > ENUM_BUDGET {
                        break; // already over; combos only grows from here
                    }
                    combos = combos.saturating_mul(self.digit_set(w + t + 1)?.len() as u64);
                }
                predicted = predicted.saturating_add(combos);
                if predicted > ENUM_BUDGET {
                    return Err(Error::Budget {
                        what: "explicit enumeration",
                        limit: ENUM_BUDGET,
                        required: predicted,
                    });
                }
            }
            place *= self.schedule.base_at(w + 1)?;
            w += 1;
        }

        let mut out: Vec<BigUint> = Vec::new();
        let mut place = BigUint::one();
        let mut w = 0u32;
        loop {
            if &place > x {
                break;
            }
            // places and digit sets for positions w .. w+l-1, truncated at
            // the first position whose place value exceeds x
            let mut places = Vec::with_capacity(self.l as usize);
            let mut sets: Vec<Arc<BhOneSet>> = Vec::with_capacity(self.l as usize);
            let mut p = place.clone();
            for t in 0..self.l {
                if &p > x {
                    break;
                }
                places.push(p.clone());
                sets.push(self.digit_set(w + t + 1)?);
                p *= self.schedule.base_at(w + t + 1)?;
            }
            self.window_members(&places, &sets, 0, BigUint::zero(), x, &mut out)?;
            place *= self.schedule.base_at(w + 1)?;
            w += 1;
        }
        out.sort_unstable();
        debug_assert!(out.windows(2).all(|p| p[0] < p[1]), "windows are disjoint");

        let mut meta = SeqMeta::bare(Source::Explicit);
        meta.h = Some(self.h);
        meta.l = Some(self.l);
        meta.bound = Some(x.clone());
        Sequence::new(out, meta)
    }

    fn window_members(
        &self,
        places: &[BigUint],
        sets: &[Arc<BhOneSet>],
        t: usize,
        acc: BigUint,
        x: &BigUint,
        out: &mut Vec<BigUint>,
    ) -> Result<()> {
        if t == places.len() {
            if !acc.is_zero() && &acc <= x {
                out.push(acc);
            }
            return Ok(());
        }
        for &d in sets[t].elements() {
            if t == 0 && d == 0 {
                continue; // lowest window digit is nonzero by construction
            }
            let next = &acc + d * &places[t];
            // digits are positive contributions; beyond x every larger
            // digit in this slot is also beyond x
            if &next > x && d > 0 {
                break;
            }
            self.window_members(places, sets, t + 1, next, x, out)?;
        }
        Ok(())
    }

    /// `N` of the counting argument: the number of integers whose digits
    /// `b_(j-l) .. b_(j-1)` range over their sets with every other digit
    /// zero: the product of the window's digit-set sizes, all-zero choice
    /// included (callers subtract 1 to exclude 0).
    pub fn window_count(&self, j: u32) -> Result<BigUint> {
        if j < self.l {
            return Err(Error::Domain(format!(
                "window count needs j >= l (got j={j}, l={})",
                self.l
            )));
        }
        let mut product = BigUint::one();
        for i in (j - self.l + 1)..=j {
            product *= BigUint::from(self.digit_set(i)?.len());
        }
        Ok(product)
    }
}

/// The guaranteed representation bound of the construction: `(h!)^(l*h)`.
pub fn rep_bound(h: u32, l: u32) -> Result<BigUint> {
    if h < 2 || l < 2 {
        return Err(Error::Domain(format!(
            "rep_bound needs h >= 2 and l >= 2 (got h={h}, l={l})"
        )));
    }
    let mut fact = BigUint::one();
    for k in 2..=u64::from(h) {
        fact *= BigUint::from(k);
    }
    Ok(fact.pow(l * h))
}

/// The density diagnostic chain at explicit `j`, evaluated in fixed-point
/// decimal and reported as doubles.
#[derive(Clone, Debug, Serialize)]
pub struct DiagReport {
    pub h: u32,
    pub l: u32,
    pub j: u32,
    pub r: f64,
    /// Upper bound for `log n`: `(1+r)^(j+1) / r`.
    pub log_n_upper: f64,
    /// Lower bound for `log N`: `(1+r)^j (1 - (1+r)^-l) / (h r) - 2l`.
    pub log_big_n_lower: f64,
    /// `h * log N / log n` using the two bounds above.
    pub ratio: f64,
    /// Left side of the window-loss estimate: `(1 - (1+r)^-l) / (1+r)`.
    pub des_lhs: f64,
    /// Its closed-form floor: `1 - 2 log2(l)/l`.
    pub des_rhs: f64,
    /// Tail correction at this `j`: `2 l r h / (1+r)^(j+1)`.
    pub j_lhs: f64,
    /// What the tail must stay below: `log2(l)/l`.
    pub j_rhs: f64,
    /// The density target `1 - 3 log2(l)/l`.
    pub threshold: f64,
    /// Whether `ratio > threshold` at this `j`.
    pub flag: bool,
}

pub fn diagnostics(h: u32, l: u32, j: u32) -> Result<DiagReport> {
    diagnostics_with_precision(h, l, j, DEFAULT_PRECISION)
}

pub fn diagnostics_with_precision(h: u32, l: u32, j: u32, precision: u32) -> Result<DiagReport> {
    if h < 2 || l < 2 {
        return Err(Error::Domain(format!(
            "diagnostics need h >= 2 and l >= 2 (got h={h}, l={l})"
        )));
    }
    if j < l {
        return Err(Error::Domain(format!(
            "diagnostics need j >= l (got j={j}, l={l})"
        )));
    }
    // (1+r)^(j+1) has about (j+1) log10(1+r) digits; size the scale to fit.
    let r_est = (l as f64).log2() / l as f64;
    let digits_est = ((j as f64 + 1.0) * (1.0 + r_est).log10()).ceil() as u32 + 2;
    let scale = precision + digits_est + 16;

    let log2l = bigfloat::log2_u64(u64::from(l), scale);
    let l_fx = Fx::from_u64(u64::from(l), scale);
    let h_fx = Fx::from_u64(u64::from(h), scale);
    let one = Fx::from_u64(1, scale);
    let two = Fx::from_u64(2, scale);
    let three = Fx::from_u64(3, scale);

    let r = log2l.div(&l_fx);
    let one_plus_r = one.add(&r);
    let pow_j = one_plus_r.pow_u64(u64::from(j));
    let pow_j1 = pow_j.mul(&one_plus_r);
    let inv_l = one.div(&one_plus_r.pow_u64(u64::from(l)));

    let log_n_upper = pow_j1.div(&r);
    let log_big_n_lower = pow_j
        .mul(&one.sub(&inv_l))
        .div(&h_fx.mul(&r))
        .sub(&two.mul(&l_fx));
    let ratio = h_fx.mul(&log_big_n_lower).div(&log_n_upper);

    let des_lhs = one.sub(&inv_l).div(&one_plus_r);
    let log2l_over_l = log2l.div(&l_fx);
    let des_rhs = one.sub(&two.mul(&log2l_over_l));
    let j_lhs = two.mul(&l_fx).mul(&r).mul(&h_fx).div(&pow_j1);
    let j_rhs = log2l_over_l.clone();
    let threshold = one.sub(&three.mul(&log2l_over_l));
    let flag = ratio.cmp_value(&threshold) == std::cmp::Ordering::Greater;

    Ok(DiagReport {
        h,
        l,
        j,
        r: r.to_f64(),
        log_n_upper: log_n_upper.to_f64(),
        log_big_n_lower: log_big_n_lower.to_f64(),
        ratio: ratio.to_f64(),
        des_lhs: des_lhs.to_f64(),
        des_rhs: des_rhs.to_f64(),
        j_lhs: j_lhs.to_f64(),
        j_rhs: j_rhs.to_f64(),
        threshold: threshold.to_f64(),
        flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params22() -> ExplicitParams {
        ExplicitParams::new(2, 2).unwrap()
    }

    #[test]
    fn rep_bound_values() {
        assert_eq!(rep_bound(2, 2).unwrap(), BigUint::from(16u32));
        assert_eq!(rep_bound(3, 2).unwrap(), BigUint::from(46_656u32));
        assert_eq!(rep_bound(2, 3).unwrap(), BigUint::from(64u32));
        assert!(rep_bound(1, 2).is_err());
        assert!(rep_bound(2, 1).is_err());
    }

    #[test]
    fn digit_sets_for_l2_h2() {
        let p = params22();
        // built from q = 2, 4, 9, 29, 157
        assert_eq!(p.digit_set(1).unwrap().elements(), &[0]);
        assert_eq!(p.digit_set(2).unwrap().elements(), &[0, 1]);
        assert_eq!(p.digit_set(3).unwrap().len(), 2);
        assert_eq!(p.digit_set(4).unwrap().len(), 3);
        assert_eq!(p.digit_set(5).unwrap().len(), 7);
    }

    #[test]
    fn one_is_not_a_member() {
        // b_0 = 1 but A_1 = {0}
        let p = params22();
        assert!(!p.contains(&BigUint::from(1u32)).unwrap());
        assert!(!p.contains(&BigUint::zero()).unwrap());
    }

    #[test]
    fn windowed_digits_are_members() {
        let p = params22();
        // digits (0, a, c) with a in A_2\{0}, c in A_3: value = a q_1 + c q_1 q_2
        let a = 1u64; // A_2 = {0,1}
        for &c in p.digit_set(3).unwrap().elements() {
            let x = BigUint::from(a * 2 + c * 8);
            if x.is_zero() {
                continue;
            }
            assert!(p.contains(&x).unwrap(), "x={x}");
        }
    }

    #[test]
    fn wide_span_is_rejected() {
        let p = params22();
        // nonzero digits at positions 1 and 3 span 3 > l = 2:
        // x = 1*q_1 + d*q_1 q_2 q_3 with d in A_4\{0}
        let d = p.digit_set(4).unwrap().elements()[1];
        let x = BigUint::from(2 + d * 72);
        assert!(!p.contains(&x).unwrap());
    }

    #[test]
    fn enumeration_matches_membership_filter() {
        let p = params22();
        let bound = 100_000u64;
        let seq = p.enumerate_upto(&BigUint::from(bound)).unwrap();
        let mut by_filter = Vec::new();
        for y in 1..=bound {
            if p.contains(&BigUint::from(y)).unwrap() {
                by_filter.push(BigUint::from(y));
            }
        }
        assert_eq!(seq.elements(), &by_filter[..]);
        assert!(!seq.is_empty());
    }

    #[test]
    fn enumerate_below_smallest_member_is_empty() {
        let p = params22();
        let seq = p.enumerate_upto(&BigUint::one()).unwrap();
        assert!(seq.is_empty());
    }

    #[test]
    fn window_count_products() {
        let p = params22();
        assert_eq!(p.window_count(2).unwrap(), BigUint::from(2u32)); // |A_1||A_2|
        assert_eq!(p.window_count(3).unwrap(), BigUint::from(4u32)); // |A_2||A_3|
        assert_eq!(p.window_count(4).unwrap(), BigUint::from(6u32)); // |A_3||A_4|
        assert!(p.window_count(1).is_err());
    }

    #[test]
    fn window_count_bounds_enumeration() {
        let p = params22();
        for j in [3u32, 4, 5] {
            let mut bound = BigUint::one();
            for i in 1..=j {
                bound *= p.schedule().base_at(i).unwrap();
            }
            let members = p.enumerate_upto(&bound).unwrap().len() as u64;
            let wc = p.window_count(j).unwrap().to_u64().unwrap();
            assert!(wc - 1 <= members, "j={j}: {wc}-1 > {members}");
        }
    }

    #[test]
    fn no_carry_digit_law() {
        let p = params22();
        let seq = p.enumerate_upto(&BigUint::from(327_815u64)).unwrap();
        let elems = seq.elements();
        assert_eq!(elems.len(), 25);
        // all pairs: digitwise sums stay below the next base and match the
        // decoding of the integer sum
        let sched = p.schedule();
        for (ai, a) in elems.iter().enumerate() {
            for b in &elems[ai..] {
                let da = sched.decode(a).unwrap();
                let db = sched.decode(b).unwrap();
                let len = da.digits().len().max(db.digits().len());
                let mut digit_sum = vec![BigUint::zero(); len];
                for (i, slot) in digit_sum.iter_mut().enumerate() {
                    let x = da.digits().get(i).cloned().unwrap_or_default();
                    let y = db.digits().get(i).cloned().unwrap_or_default();
                    *slot = x + y;
                    assert!(*slot < sched.base_at(i as u32 + 1).unwrap(), "carry at {i}");
                }
                let total = sched.decode(&(a + b)).unwrap();
                let mut expect = digit_sum;
                while expect.last().map(|d| d.is_zero()) == Some(true) {
                    expect.pop();
                }
                assert_eq!(total.digits(), &expect[..]);
            }
        }
    }

    #[test]
    fn representation_bound_holds_on_prefix() {
        let p = params22();
        let seq = p.enumerate_upto(&BigUint::from(327_815u64)).unwrap();
        let max = seq.elements().last().unwrap().to_u64().unwrap();
        let elems = seq.upto_u64(max);
        let bound = rep_bound(2, 2).unwrap().to_u64().unwrap();
        let prof = crate::repcount::profile(&elems, 2, 2 * max).unwrap();
        assert!(prof.max_count() <= bound, "max r = {}", prof.max_count());
    }

    #[test]
    fn diagnostics_thresholds() {
        let d64 = diagnostics(2, 64, 80).unwrap();
        assert!((d64.threshold - 0.71875).abs() < 1e-12);
        let d2 = diagnostics(2, 2, 4).unwrap();
        assert!((d2.threshold + 0.5).abs() < 1e-12);
        assert!(d2.flag, "negative threshold is trivially exceeded");
    }

    #[test]
    fn diagnostics_flag_at_large_j() {
        let d = diagnostics(2, 8, 40).unwrap();
        assert!(d.flag, "ratio {} must exceed threshold {}", d.ratio, d.threshold);
        assert!(d.j_lhs < d.j_rhs, "tail term must be small at j = 40");
        assert!(d.des_lhs > d.des_rhs, "closed-form floor holds for every l");
        // sanity on magnitudes: r = 3/8
        assert!((d.r - 0.375).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_validates_inputs() {
        assert!(diagnostics(2, 2, 1).is_err());
        assert!(diagnostics(1, 2, 5).is_err());
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        // l = 64 keeps bases tiny, so windows multiply into the budget fast
        let p = ExplicitParams::new(2, 64).unwrap();
        let huge = BigUint::from(10u32).pow(400);
        match p.enumerate_upto(&huge) {
            Err(Error::Budget { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
