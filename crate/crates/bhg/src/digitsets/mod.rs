//! Generation and verification of `B_h[1]` digit sets.
//!
//! The explicit construction needs, for every base `q_i`, a set
//! `A_i` inside `[0, q_i/h)` that contains 0 and in which every integer has
//! at most one representation as a nondecreasing h-fold sum. Two generators
//! are provided: the Bose–Chowla finite-field construction (p elements
//! inside `[0, p^h - 2]`, the size workhorse) and a lexicographic greedy
//! scan (the total fallback for ranges too small to host any `p >= 2`).

mod gf;

use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Enumeration cap for the Bose–Chowla walk: `p^h` may not exceed this.
pub const BOSE_CHOWLA_CAP: u64 = 10_000_000;
/// Verification cap: `|s|^h` may not exceed this for exhaustive checking.
pub const VERIFY_CAP: u64 = 100_000_000;

/// How a digit set was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitSource {
    Greedy,
    BoseChowla { p: u64 },
    Extended,
}

impl DigitSource {
    pub fn tag(&self) -> &'static str {
        match self {
            DigitSource::Greedy => "greedy",
            DigitSource::BoseChowla { .. } => "bose_chowla",
            DigitSource::Extended => "extended",
        }
    }
}

/// A verified-or-verifiable `B_h[1]` set inside `[0, bound)` containing 0.
#[derive(Clone, Debug)]
pub struct BhOneSet {
    h: u32,
    bound: u64,
    elements: Vec<u64>,
    source: DigitSource,
}

impl BhOneSet {
    pub fn h(&self) -> u32 {
        self.h
    }

    /// Exclusive upper bound of the admissible range.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn source(&self) -> DigitSource {
        self.source
    }

    pub fn contains(&self, v: u64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    /// Exhaustive `B_h[1]` check: true iff all h-multiset sums are distinct.
    pub fn verify(&self) -> bool {
        verify_bh1(&self.elements, self.h)
    }
}

/// True iff every integer has at most one representation as a nondecreasing
/// sum of `h` elements of `s` (elements may repeat inside a sum). Exhaustive:
/// callers must respect [`VERIFY_CAP`] on `|s|^h`.
pub fn verify_bh1(s: &[u64], h: u32) -> bool {
    assert!(h >= 1, "order must be positive");
    let n = s.len() as u64;
    assert!(
        n.checked_pow(h).is_some_and(|v| v <= VERIFY_CAP),
        "verify_bh1 cap exceeded: |s|^h too large"
    );
    if s.len() <= 1 {
        return true;
    }
    let mut sums = Vec::new();
    collect_multiset_sums(s, h as usize, 0, 0, &mut sums);
    sums.sort_unstable();
    sums.windows(2).all(|w| w[0] != w[1])
}

fn collect_multiset_sums(s: &[u64], parts: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
    if parts == 0 {
        out.push(acc);
        return;
    }
    for (offset, &v) in s[start..].iter().enumerate() {
        collect_multiset_sums(s, parts - 1, start + offset, acc + v, out);
    }
}

/// Lexicographically-greedy maximal `B_h[1]` subset of `[0, bound)` containing
/// 0: accept each candidate in increasing order that keeps all h-fold sums
/// distinct. Rejections are permanent (a collision never disappears as the
/// set grows), which is what makes the result maximal.
pub fn greedy_bh1(h: u32, bound: u64) -> Result<BhOneSet> {
    if h < 2 {
        return Err(Error::Domain(format!("order h={h} must be >= 2")));
    }
    if bound < 1 {
        return Err(Error::Domain("bound must be >= 1".into()));
    }
    let mut elements: Vec<u64> = Vec::new();
    let mut sums: HashSet<u64> = HashSet::new();
    let mut scratch: Vec<u64> = Vec::new();
    for z in 0..bound {
        scratch.clear();
        // New h-multiset sums are prefix (j elements of the current set,
        // nondecreasing) + (h - j) copies of z, for j = 0 .. h-1.
        for j in 0..h as usize {
            let tail = (h as usize - j) as u64 * z;
            collect_multiset_sums(&elements, j, 0, tail, &mut scratch);
        }
        scratch.sort_unstable();
        let internal_clash = scratch.windows(2).any(|w| w[0] == w[1]);
        if internal_clash || scratch.iter().any(|v| sums.contains(v)) {
            continue;
        }
        elements.push(z);
        sums.extend(scratch.iter().copied());
    }
    Ok(BhOneSet {
        h,
        bound,
        elements,
        source: DigitSource::Greedy,
    })
}

/// Bose–Chowla: a `B_h[1]` set with exactly `p` elements inside
/// `[0, p^h - 2]`, built from the multiplicative group of `F_(p^h)` and
/// translated so its minimum is 0.
pub fn bose_chowla(h: u32, p: u64) -> Result<BhOneSet> {
    if h < 2 {
        return Err(Error::Domain(format!("order h={h} must be >= 2")));
    }
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("p={p} is not prime")));
    }
    let ph = p
        .checked_pow(h)
        .filter(|&v| v <= BOSE_CHOWLA_CAP)
        .ok_or(Error::CapExceeded {
            what: "Bose-Chowla group enumeration (p^h)",
            cap: BOSE_CHOWLA_CAP,
            required: p.checked_pow(h).unwrap_or(u64::MAX),
        })?;
    let mut exponents = gf::bose_chowla_exponents(p, h);
    if exponents.len() != p as usize {
        return Err(Error::Internal(format!(
            "Bose-Chowla walk found {} exponents, expected p={p}",
            exponents.len()
        )));
    }
    let min = exponents[0];
    for e in exponents.iter_mut() {
        *e -= min;
    }
    exponents.sort_unstable();
    let set = BhOneSet {
        h,
        bound: ph - 1,
        elements: exponents,
        source: DigitSource::BoseChowla { p },
    };
    if !set.verify() {
        return Err(Error::Internal(format!(
            "Bose-Chowla output for (h={h}, p={p}) failed B_h[1] verification"
        )));
    }
    Ok(set)
}

/// The digit set for base `q`: a `B_h[1]` subset of `[0, ceil(q/h) - 1]`
/// containing 0. Uses Bose–Chowla with the largest admissible prime when one
/// exists (then `|A| = p > (q/h)^(1/h) / 2`), greedy otherwise. The prime is
/// additionally capped so the group enumeration stays within
/// [`BOSE_CHOWLA_CAP`]; past that point the size guarantee is whatever the
/// capped prime provides.
pub fn digit_set_for_base(h: u32, q: &BigUint) -> Result<BhOneSet> {
    if h < 2 {
        return Err(Error::Domain(format!("order h={h} must be >= 2")));
    }
    if q < &BigUint::from(2u32) {
        return Err(Error::Domain("base q must be >= 2".into()));
    }
    let h_big = BigUint::from(h);
    // ceil(q / h), saturated to u64 for the bound field.
    let upper = (q + &h_big - 1u32) / &h_big;
    let bound = upper.to_u64().unwrap_or(u64::MAX);

    // Largest p with h * p^h < q + 2h, i.e. p^h - 2 < q/h.
    let limit = (q + 2u32 * &h_big - 1u32) / &h_big; // floor((q + 2h - 1) / h)
    let p_unbounded = limit.nth_root(h);
    let p_cap = BOSE_CHOWLA_CAP.nth_root(h);
    let p_start = p_unbounded.to_u64().unwrap_or(u64::MAX).min(p_cap);

    let mut p = p_start;
    while p >= 2 {
        if is_prime_u64(p) {
            let set = bose_chowla(h, p)?;
            debug_assert!(set.elements.last().copied().unwrap_or(0) < bound);
            return Ok(BhOneSet { bound, ..set });
        }
        p -= 1;
    }
    greedy_bh1(h, bound)
}

/// Deterministic Miller–Rabin, valid for every u64 with this witness set.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        e >>= 1;
        b = mul_mod_u64(b, b, m);
    }
    acc
}
