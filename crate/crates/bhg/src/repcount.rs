//! Exact computation of the representation function `r_{h,A}(n)`: the number
//! of nondecreasing h-tuples of elements of `A` (repetition allowed) summing
//! to `n`.
//!
//! Two bulk strategies produce identical profiles: direct enumeration of all
//! h-multisets (cheap when `C(|A|+h-1, h)` is small) and a dynamic program
//! over (parts used, partial sum) that processes one element at a time with
//! in-place reuse (cheap when the element count is large relative to the
//! range). `profile` picks automatically; `profile_with` pins a strategy,
//! which the agreement tests exercise.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::util::binomial;

/// Stop bulk work beyond this many DP cells / histogram slots.
pub const CELL_BUDGET: u64 = 300_000_000;
/// Prefer enumeration while the multiset count stays below this.
const ENUM_LIMIT: u128 = 2_000_000;

/// Bulk profile `n -> r_{h,A}(n)` for `n <= n_max`; absent keys mean 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepProfile {
    h: u32,
    n_max: u64,
    counts: BTreeMap<u64, u64>,
}

impl RepProfile {
    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn get(&self, n: u64) -> u64 {
        self.counts.get(&n).copied().unwrap_or(0)
    }

    /// Nonzero entries in increasing `n` order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&n, &c)| (n, c))
    }

    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    /// Smallest `n` with `count > g`.
    pub fn first_exceeding(&self, g: u64) -> Option<u64> {
        self.counts.iter().find(|(_, &c)| c > g).map(|(&n, _)| n)
    }

    /// Sum of all counts (number of h-multisets with sum `<= n_max`).
    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }

    /// `# bhgprof v1` header plus `n,count` rows for nonzero counts.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# bhgprof v1 h={} N={}", self.h, self.n_max)?;
        for (n, c) in self.iter() {
            writeln!(w, "{n},{c}")?;
        }
        Ok(())
    }
}

/// Result of a single-`n` count. `tuples` is populated on request, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepCount {
    pub count: u64,
    pub tuples: Option<Vec<Vec<u64>>>,
}

fn assert_sorted_distinct(a: &[u64]) {
    debug_assert!(
        a.windows(2).all(|w| w[0] < w[1]),
        "element slice must be sorted and distinct"
    );
}

/// `r_{h,A}(n)` with optional tuple list. `a` must be sorted and distinct.
pub fn count_reps(a: &[u64], h: u32, n: u64, with_list: bool) -> RepCount {
    assert!(h >= 1, "order must be positive");
    assert_sorted_distinct(a);
    let mut tuples = if with_list { Some(Vec::new()) } else { None };
    let mut stack = Vec::with_capacity(h as usize);
    let count = count_rec(a, h as usize, 0, n, &mut stack, &mut tuples);
    RepCount { count, tuples }
}

fn count_rec(
    a: &[u64],
    parts: usize,
    start: usize,
    remaining: u64,
    stack: &mut Vec<u64>,
    tuples: &mut Option<Vec<Vec<u64>>>,
) -> u64 {
    if parts == 1 {
        // last coordinate must be exactly `remaining`, at or after `start`
        if a[start..].binary_search(&remaining).is_ok() {
            if let Some(list) = tuples {
                let mut t = stack.clone();
                t.push(remaining);
                list.push(t);
            }
            return 1;
        }
        return 0;
    }
    let mut total = 0;
    for (offset, &v) in a[start..].iter().enumerate() {
        // nondecreasing suffix: every later coordinate is >= v
        if (v as u128) * parts as u128 > remaining as u128 {
            break;
        }
        stack.push(v);
        total += count_rec(a, parts - 1, start + offset, remaining - v, stack, tuples);
        stack.pop();
    }
    total
}

/// Convenience wrapper returning just the tuple list.
pub fn reps_list(a: &[u64], h: u32, n: u64) -> Vec<Vec<u64>> {
    count_reps(a, h, n, true).tuples.unwrap()
}

/// Bulk strategy selector; `Auto` is what callers normally want.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Enumerate,
    Dp,
}

/// Full profile of `r_{h,A}(n)` for `n <= n_max`. `a` must be sorted and
/// distinct; elements above `n_max` cannot participate and are dropped.
pub fn profile(a: &[u64], h: u32, n_max: u64) -> Result<RepProfile> {
    profile_with(a, h, n_max, Strategy::Auto)
}

pub fn profile_with(a: &[u64], h: u32, n_max: u64, strategy: Strategy) -> Result<RepProfile> {
    if h < 2 {
        return Err(Error::Domain(format!("order h={h} must be >= 2")));
    }
    assert_sorted_distinct(a);
    let cut = a.partition_point(|&v| v <= n_max);
    let a = &a[..cut];
    if n_max.checked_add(1).is_none() || n_max + 1 > CELL_BUDGET {
        return Err(Error::Budget {
            what: "profile range",
            limit: CELL_BUDGET,
            required: n_max,
        });
    }
    let multisets = binomial(a.len() as u64 + u64::from(h) - 1, u64::from(h));
    let use_enum = match strategy {
        Strategy::Enumerate => true,
        Strategy::Dp => false,
        Strategy::Auto => multisets <= ENUM_LIMIT,
    };
    let dense: Vec<u64> = if use_enum {
        let mut hist = vec![0u64; n_max as usize + 1];
        enumerate_into(a, h as usize, 0, 0, n_max, &mut hist);
        hist
    } else {
        let cells = (u64::from(h) + 1).saturating_mul(n_max + 1);
        if cells > CELL_BUDGET {
            return Err(Error::Budget {
                what: "profile DP cells",
                limit: CELL_BUDGET,
                required: cells,
            });
        }
        profile_dp(a, h as usize, n_max as usize)
    };
    let counts: BTreeMap<u64, u64> = dense
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(n, c)| (n as u64, c))
        .collect();
    Ok(RepProfile { h, n_max, counts })
}

fn enumerate_into(a: &[u64], parts: usize, start: usize, acc: u64, n_max: u64, hist: &mut [u64]) {
    if parts == 0 {
        hist[acc as usize] += 1;
        return;
    }
    for (offset, &v) in a[start..].iter().enumerate() {
        // remaining coordinates are all >= v
        let min_total = acc as u128 + v as u128 * parts as u128;
        if min_total > n_max as u128 {
            break;
        }
        enumerate_into(a, parts - 1, start + offset, acc + v, n_max, hist);
    }
}

fn profile_dp(a: &[u64], h: usize, n_max: usize) -> Vec<u64> {
    // dp[j][s] = number of j-multisets of processed elements summing to s;
    // per element, ascending j then ascending s makes dp[j-1][s-v] already
    // include repeated use of the element, so each multiset counts once.
    let width = n_max + 1;
    let mut dp = vec![0u64; (h + 1) * width];
    dp[0] = 1;
    for &v in a {
        let v = v as usize;
        for j in 1..=h {
            let (lower, upper) = dp.split_at_mut(j * width);
            let prev = &lower[(j - 1) * width..];
            let row = &mut upper[..width];
            for s in v..width {
                row[s] += prev[s - v];
            }
        }
    }
    dp[h * width..(h + 1) * width].to_vec()
}

/// Outcome of a `B_h[g]` verification over `n <= n_max`.
#[derive(Clone, Debug)]
pub struct BhgCheck {
    pub ok: bool,
    /// Smallest violating `n` with all of its representations.
    pub witness: Option<(u64, Vec<Vec<u64>>)>,
}

/// True iff `max_{n <= n_max} r_{h,A}(n) <= g`; otherwise the smallest
/// violating `n` plus its representation list is reported.
pub fn is_bhg(a: &[u64], h: u32, g: u64, n_max: u64) -> Result<BhgCheck> {
    let prof = profile(a, h, n_max)?;
    match prof.first_exceeding(g) {
        None => Ok(BhgCheck {
            ok: true,
            witness: None,
        }),
        Some(n) => Ok(BhgCheck {
            ok: false,
            witness: Some((n, reps_list(a, h, n))),
        }),
    }
}
