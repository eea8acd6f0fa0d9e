//! Disjoint-representation machinery.
//!
//! `r*_{h,A}(n)` is the maximum number of representations of `n` whose value
//! sets are pairwise disjoint (a tuple's value set collapses duplicates, so
//! `(3,3)` occupies only `{3}`). An element `x` is `(g+1)_h`-bad when it is
//! the largest entry of a representation of some `n` with `r_{h,A}(n) >=
//! g+1`; the star variant uses `r*` for the threshold instead. Removing
//! every bad element of a truncated sequence leaves a `B_h[g]` truncation
//! (each violating `n` loses the top of every one of its representations),
//! and that prune step is what turns "few bad elements" into an actual
//! `B_h[g]` object.
//!
//! Badness here is always relative to the truncation `A ∩ [1, N]` with `n`
//! scanned up to `h*N`; it under-approximates badness in the infinite model
//! but makes the prune provably sound for the truncated object.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::repcount::{profile, reps_list};
use crate::sequence::{Sequence, Source};
use crate::util::par_map;

/// Cap on the representation count fed to the exact packing search.
pub const PACKING_REP_CAP: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Star,
}

/// `r*_{h,A}(n)` by exact branch-and-bound over the representation list,
/// seeded with a greedy packing and pruned with the counting bound.
pub fn disjoint_count(a: &[u64], h: u32, n: u64) -> Result<u64> {
    let reps = crate::repcount::count_reps(a, h, n, false).count;
    if reps == 0 {
        return Ok(0);
    }
    if reps > PACKING_REP_CAP {
        return Err(Error::CapExceeded {
            what: "disjoint packing representation list",
            cap: PACKING_REP_CAP,
            required: reps,
        });
    }
    let tuples = reps_list(a, h, n);
    Ok(max_disjoint(&tuples))
}

/// Maximum pairwise-disjoint subfamily size among the tuples' value sets.
fn max_disjoint(tuples: &[Vec<u64>]) -> u64 {
    // Dense element indices so occupancy is a small bitset.
    let mut values: Vec<u64> = tuples.iter().flatten().copied().collect();
    values.sort_unstable();
    values.dedup();
    let mut sets: Vec<Vec<usize>> = tuples
        .iter()
        .map(|t| {
            let mut s: Vec<usize> = t
                .iter()
                .map(|v| values.binary_search(v).expect("value present"))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    // Small sets constrain the most; keep ties deterministic.
    sets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));

    let words = values.len().div_ceil(64);
    let mut used = vec![0u64; words];

    // Greedy incumbent.
    let mut best = 0u64;
    {
        let mut taken = vec![0u64; words];
        for s in &sets {
            if s.iter().all(|&i| taken[i / 64] & (1 << (i % 64)) == 0) {
                for &i in s {
                    taken[i / 64] |= 1 << (i % 64);
                }
                best += 1;
            }
        }
    }

    fn descend(sets: &[Vec<usize>], idx: usize, chosen: u64, used: &mut [u64], best: &mut u64) {
        if chosen > *best {
            *best = chosen;
        }
        // counting upper bound: even taking every remaining set cannot win
        if chosen + (sets.len() - idx) as u64 <= *best {
            return;
        }
        if idx == sets.len() {
            return;
        }
        let s = &sets[idx];
        let free = s.iter().all(|&i| used[i / 64] & (1 << (i % 64)) == 0);
        if free {
            for &i in s {
                used[i / 64] |= 1 << (i % 64);
            }
            descend(sets, idx + 1, chosen + 1, used, best);
            for &i in s {
                used[i / 64] &= !(1 << (i % 64));
            }
        }
        descend(sets, idx + 1, chosen, used, best);
    }
    descend(&sets, 0, 0, &mut used, &mut best);
    best
}

/// Outcome of a bad-element scan, including the pruned sequence.
#[derive(Clone, Debug)]
pub struct BadReport {
    pub h: u32,
    pub g: u64,
    pub variant: Variant,
    pub n_bound: u64,
    /// Bad elements, ascending. Always a subset of `A ∩ [1, n_bound]`.
    pub bad: Vec<u64>,
    /// `k ->` number of bad elements in `[h^k, h^(k+1))`, for `h^k <= n_bound`.
    pub blocks: std::collections::BTreeMap<u32, u64>,
    pub original_count: u64,
    pub pruned: Sequence,
}

#[derive(Serialize)]
struct BadReportJson<'a> {
    h: u32,
    g: u64,
    variant: Variant,
    #[serde(rename = "N")]
    n_bound: u64,
    bad: &'a [u64],
    blocks: &'a std::collections::BTreeMap<u32, u64>,
    pruned_count: u64,
    original_count: u64,
}

impl BadReport {
    pub fn to_json(&self) -> String {
        let view = BadReportJson {
            h: self.h,
            g: self.g,
            variant: self.variant,
            n_bound: self.n_bound,
            bad: &self.bad,
            blocks: &self.blocks,
            pruned_count: self.pruned.len() as u64,
            original_count: self.original_count,
        };
        serde_json::to_string_pretty(&view).expect("report serialization")
    }
}

/// Scan for `(g+1)_h`-bad (or starred) elements of `A ∩ [1, n_bound]`.
pub fn bad_elements(
    seq: &Sequence,
    h: u32,
    g: u64,
    n_bound: u64,
    variant: Variant,
) -> Result<BadReport> {
    bad_elements_threaded(seq, h, g, n_bound, variant, 1)
}

/// Same scan with a parallelism budget; results are identical for any value.
pub fn bad_elements_threaded(
    seq: &Sequence,
    h: u32,
    g: u64,
    n_bound: u64,
    variant: Variant,
    threads: usize,
) -> Result<BadReport> {
    if h < 2 {
        return Err(Error::Domain(format!("order h={h} must be >= 2")));
    }
    if g < 1 {
        return Err(Error::Domain("g must be >= 1".into()));
    }
    let elements = seq.upto_u64(n_bound);
    let scan_max = u64::from(h)
        .checked_mul(n_bound)
        .ok_or(Error::Budget {
            what: "bad-element scan range",
            limit: u64::MAX,
            required: u64::MAX,
        })?;
    let prof = profile(&elements, h, scan_max)?;
    // Representations of every n <= h*N over the truncation are complete, so
    // any n with count > g convicts the top element of each of its tuples.
    let candidates: Vec<u64> = prof
        .iter()
        .filter(|&(_, c)| c > g)
        .map(|(n, _)| n)
        .collect();

    let marks: Vec<Result<Vec<u64>>> = par_map(threads, candidates, |&n| {
        let count = prof.get(n);
        if variant == Variant::Star {
            if count > PACKING_REP_CAP {
                return Err(Error::CapExceeded {
                    what: "disjoint packing representation list",
                    cap: PACKING_REP_CAP,
                    required: count,
                });
            }
            let tuples = reps_list(&elements, h, n);
            if max_disjoint(&tuples) <= g {
                return Ok(Vec::new());
            }
            return Ok(tuples.iter().map(|t| *t.last().unwrap()).collect());
        }
        Ok(reps_list(&elements, h, n)
            .iter()
            .map(|t| *t.last().unwrap())
            .collect())
    });

    let mut bad_set: BTreeSet<u64> = BTreeSet::new();
    for marked in marks {
        bad_set.extend(marked?);
    }
    let bad: Vec<u64> = bad_set.into_iter().collect();

    let mut blocks = std::collections::BTreeMap::new();
    let mut lo = 1u64; // h^0
    let mut k = 0u32;
    while lo <= n_bound {
        let hi = lo.saturating_mul(u64::from(h));
        let count = bad
            .iter()
            .filter(|&&x| x >= lo && x < hi)
            .count() as u64;
        blocks.insert(k, count);
        k += 1;
        lo = hi;
    }

    let pruned = remove_elements(seq, &bad);
    Ok(BadReport {
        h,
        g,
        variant,
        n_bound,
        bad,
        blocks,
        original_count: seq.len() as u64,
        pruned,
    })
}

fn remove_elements(seq: &Sequence, bad: &[u64]) -> Sequence {
    let bad_big: Vec<BigUint> = bad.iter().map(|&b| BigUint::from(b)).collect();
    let kept: Vec<BigUint> = seq
        .elements()
        .iter()
        .filter(|e| bad_big.binary_search(e).is_err())
        .cloned()
        .collect();
    let mut meta = seq.meta().clone();
    meta.source = Source::Pruned;
    Sequence::new(kept, meta).expect("subsequence stays sorted")
}

/// `A` minus the report's bad set, tagged as pruned. For the plain variant
/// the result is `B_h[g]` on `[1, n_bound]`; for the star variant it satisfies
/// `r* <= g` there.
pub fn prune(seq: &Sequence, report: &BadReport) -> Sequence {
    remove_elements(seq, &report.bad)
}
