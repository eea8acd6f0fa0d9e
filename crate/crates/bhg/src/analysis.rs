//! Density measurement and end-to-end experiments: counting functions,
//! log-log exponent fits, the g/epsilon parameter maps, the sample-prune-
//! measure pipeline for order 3, and the Monte Carlo star-violation
//! frequency table.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::packing::{bad_elements_threaded, disjoint_count, BadReport, Variant};
use crate::randmodel::RandomModel;
use crate::repcount::{is_bhg, profile};
use crate::sequence::{Sequence, Source};
use crate::util::par_map;

/// `A(x) = |A intersect [1, x]|`.
pub fn count_upto(seq: &Sequence, x: &BigUint) -> u64 {
    seq.count_upto(x)
}

/// Least-squares fit of `log A(x)` against `log x`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Largest relative deviation `|exp(fit)/A(x) - 1|` over the checkpoints.
    pub max_rel_residual: f64,
}

/// Fit the density exponent over the given checkpoints. Requires at least 4
/// checkpoints, every count positive, and at least two distinct counts.
pub fn exponent_fit(seq: &Sequence, checkpoints: &[u64]) -> Result<FitResult> {
    if checkpoints.len() < 4 {
        return Err(Error::Domain(format!(
            "exponent fit needs >= 4 checkpoints, got {}",
            checkpoints.len()
        )));
    }
    let mut xs = Vec::with_capacity(checkpoints.len());
    let mut ys = Vec::with_capacity(checkpoints.len());
    for &cp in checkpoints {
        let count = seq.count_upto_u64(cp);
        if count == 0 {
            return Err(Error::Domain(format!(
                "checkpoint {cp} has no elements below it"
            )));
        }
        xs.push((cp as f64).ln());
        ys.push((count as f64).ln());
    }
    if ys.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let slope = num / den;
    let intercept = my - slope * mx;
    let max_rel_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((slope * x + intercept) - y).exp() - 1.0)
        .map(f64::abs)
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_rel_residual,
    })
}

/// Geometric checkpoint grid for density fits: `x = m * 2^t` up to
/// `n_bound`, discarding the warmup region below `512 m` where the cutoff
/// still dominates the counting function and biases the log-log slope
/// upward. When the range is too short for four such checkpoints the warmup
/// threshold halves until the grid is usable (accepting the extra bias;
/// a short-range fit is better than none in an explicitly requested run).
pub fn default_checkpoints(m: u64, n_bound: u64) -> Vec<u64> {
    let mut warmup = 512u64;
    loop {
        let mut out = Vec::new();
        let mut x = m.saturating_mul(warmup);
        while x <= n_bound {
            out.push(x);
            match x.checked_mul(2) {
                Some(next) => x = next,
                None => break,
            }
        }
        if out.len() >= 4 || warmup == 1 {
            return out;
        }
        warmup /= 2;
    }
}

/// The closed-form parameter relations between g, epsilon and delta.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParamMap {
    pub h: u32,
    pub epsilon: f64,
    pub delta: f64,
    /// `2^(h-3) h ((h-1)!)^2`; equals 1 at h = 2.
    pub c_h: u64,
    /// Smallest admissible g of the probabilistic bound: `ceil(c_h / epsilon)`.
    pub g_theorem_e: u64,
    /// Star threshold `((h-1)/(2h-3) - (h-1)d) / ((h-3)/(2h-3) + h d)`.
    pub g_star_threshold: f64,
    /// The order-3 specialization `2/(9d) - 2/3` (equals the star threshold
    /// at h = 3).
    pub g_theorem3: f64,
}

fn c_h(h: u32) -> Result<u64> {
    if h == 2 {
        return Ok(1);
    }
    let mut fact: u64 = 1;
    for k in 2..u64::from(h) {
        fact = fact
            .checked_mul(k)
            .ok_or_else(|| Error::Domain(format!("c_h overflows u64 at h={h}")))?;
    }
    2u64.checked_pow(h - 3)
        .and_then(|p| p.checked_mul(u64::from(h)))
        .and_then(|p| p.checked_mul(fact))
        .and_then(|p| p.checked_mul(fact))
        .ok_or_else(|| Error::Domain(format!("c_h overflows u64 at h={h}")))
}

pub fn param_map(h: u32, epsilon: f64, delta: f64) -> Result<ParamMap> {
    if h < 2 {
        return Err(Error::Domain(format!("order h={h} must be >= 2")));
    }
    if epsilon <= 0.0 || delta <= 0.0 {
        return Err(Error::Domain("epsilon and delta must be positive".into()));
    }
    let c = c_h(h)?;
    // nudge below the value so exact integer ratios do not round up
    let g_theorem_e = (c as f64 / epsilon - 1e-9).ceil().max(1.0) as u64;
    let hh = f64::from(h);
    let denom = (hh - 3.0) / (2.0 * hh - 3.0) + hh * delta;
    if denom == 0.0 {
        return Err(Error::Domain(format!(
            "star threshold denominator vanishes at h={h}, delta={delta}"
        )));
    }
    let g_star_threshold = ((hh - 1.0) / (2.0 * hh - 3.0) - (hh - 1.0) * delta) / denom;
    let g_theorem3 = 2.0 / (9.0 * delta) - 2.0 / 3.0;
    Ok(ParamMap {
        h,
        epsilon,
        delta,
        c_h: c,
        g_theorem_e,
        g_star_threshold,
        g_theorem3,
    })
}

/// One dyadic block row of a pipeline report: the interval `[3^k, 3^(k+1))`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockRow {
    pub k: u32,
    pub lo: u64,
    pub hi: u64,
    /// `|A ∩ block|` before pruning.
    pub elements: u64,
    pub bad_star: u64,
    pub bad_plain: u64,
    /// `(bad_star + bad_plain distinct) / elements`, 0 on empty blocks.
    pub bad_fraction: f64,
}

/// Plot-ready row: `x, A(x) after pruning, bad elements <= x`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckpointRow {
    pub x: u64,
    pub count: u64,
    pub bad_upto: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub schema: &'static str,
    pub delta: f64,
    pub g: u64,
    pub m: u64,
    #[serde(rename = "N")]
    pub n_bound: u64,
    pub seed: u64,
    pub alpha: f64,
    pub original_count: u64,
    pub bad_star_count: u64,
    pub bad_plain_count: u64,
    pub bad_union_count: u64,
    pub pruned_count: u64,
    pub pruned_fraction: f64,
    /// Deterministic soundness verdict of the post-prune `B_3[g]` check.
    pub is_bhg: bool,
    /// Absent when the pruned sequence is too thin for a meaningful log-log
    /// fit (degenerate counts across the checkpoint grid).
    pub exponent: Option<FitResult>,
    pub blocks: Vec<BlockRow>,
    pub checkpoints: Vec<CheckpointRow>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// The companion CSV: `x,A_x,B_x` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,A_x,B_x")?;
        for row in &self.checkpoints {
            writeln!(w, "{},{},{}", row.x, row.count, row.bad_upto)?;
        }
        Ok(())
    }
}

/// Sample `S(2/3 + delta, m)`, remove the order-3 star-bad and order-2
/// plain-bad elements, verify the result is `B_3[g]` below `n_bound`, and
/// measure its density exponent.
///
/// The verification step is not statistical: pruning removes the top of
/// every representation of every violating sum, so a failure indicates a
/// bug and surfaces as an internal error.
pub fn pipeline_theorem3(
    delta: f64,
    g: u64,
    m: u64,
    n_bound: u64,
    seed: u64,
    threads: usize,
) -> Result<PipelineReport> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(Error::Domain(format!(
            "delta={delta} must lie in (0, 1/3)"
        )));
    }
    let threshold = 2.0 / (9.0 * delta) - 2.0 / 3.0;
    if (g as f64) <= threshold {
        return Err(Error::Domain(format!(
            "g={g} must exceed 2/(9 delta) - 2/3 = {threshold:.4}"
        )));
    }
    if m < 2 {
        return Err(Error::Domain("cutoff m must be >= 2".into()));
    }
    if n_bound < 100 * m {
        return Err(Error::Domain(format!(
            "n_bound={n_bound} must be at least 100 m = {}",
            100 * m
        )));
    }
    let alpha = 2.0 / 3.0 + delta;
    let model = RandomModel::new(alpha, m, seed)?;
    let sample = model.sample(n_bound);

    let star = bad_elements_threaded(&sample, 3, g, n_bound, Variant::Star, threads)?;
    let plain = bad_elements_threaded(&sample, 2, 1, n_bound, Variant::Plain, threads)?;

    let mut union: Vec<u64> = star.bad.iter().chain(plain.bad.iter()).copied().collect();
    union.sort_unstable();
    union.dedup();

    let pruned = remove_from(&sample, &union);
    let pruned_elems = pruned.upto_u64(n_bound);
    let check = is_bhg(&pruned_elems, 3, g, n_bound)?;
    if !check.ok {
        let (n, _) = check.witness.unwrap();
        return Err(Error::Internal(format!(
            "post-prune sequence violates B_3[{g}] at n={n}; the prune step is broken"
        )));
    }

    let checkpoints_x = default_checkpoints(m, n_bound);
    let exponent = match exponent_fit(&pruned, &checkpoints_x) {
        Ok(fit) => Some(fit),
        Err(Error::DegenerateFit) | Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };

    let blocks = block_rows(&sample, &star, &plain, n_bound);
    let checkpoint_rows: Vec<CheckpointRow> = checkpoints_x
        .iter()
        .map(|&x| CheckpointRow {
            x,
            count: pruned.count_upto_u64(x),
            bad_upto: union.partition_point(|&b| b <= x) as u64,
        })
        .collect();

    Ok(PipelineReport {
        schema: "bhgreport/v1",
        delta,
        g,
        m,
        n_bound,
        seed,
        alpha,
        original_count: sample.len() as u64,
        bad_star_count: star.bad.len() as u64,
        bad_plain_count: plain.bad.len() as u64,
        bad_union_count: union.len() as u64,
        pruned_count: pruned.len() as u64,
        pruned_fraction: if sample.is_empty() {
            0.0
        } else {
            union.len() as f64 / sample.len() as f64
        },
        is_bhg: true,
        exponent,
        blocks,
        checkpoints: checkpoint_rows,
    })
}

fn remove_from(seq: &Sequence, bad: &[u64]) -> Sequence {
    let kept: Vec<BigUint> = seq
        .elements()
        .iter()
        .filter(|e| {
            use num_traits::ToPrimitive;
            e.to_u64()
                .map(|v| bad.binary_search(&v).is_err())
                .unwrap_or(true)
        })
        .cloned()
        .collect();
    let mut meta = seq.meta().clone();
    meta.source = Source::Pruned;
    Sequence::new(kept, meta).expect("subsequence stays sorted")
}

fn block_rows(
    sample: &Sequence,
    star: &BadReport,
    plain: &BadReport,
    n_bound: u64,
) -> Vec<BlockRow> {
    let mut rows = Vec::new();
    let mut lo = 1u64;
    let mut k = 0u32;
    while lo <= n_bound {
        let hi = lo.saturating_mul(3);
        let elements = sample.count_upto_u64(hi.saturating_sub(1).min(n_bound))
            - sample.count_upto_u64(lo - 1);
        let in_block = |v: &&u64| **v >= lo && **v < hi;
        let bad_star = star.bad.iter().filter(in_block).count() as u64;
        let bad_plain = plain.bad.iter().filter(in_block).count() as u64;
        let mut distinct: Vec<u64> = star
            .bad
            .iter()
            .chain(plain.bad.iter())
            .copied()
            .filter(|&v| v >= lo && v < hi)
            .collect();
        distinct.sort_unstable();
        distinct.dedup();
        rows.push(BlockRow {
            k,
            lo,
            hi,
            elements,
            bad_star,
            bad_plain,
            bad_fraction: if elements == 0 {
                0.0
            } else {
                distinct.len() as f64 / elements as f64
            },
        });
        k += 1;
        lo = hi;
    }
    rows
}

/// One row of the star-violation frequency table.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationRow {
    pub m: u64,
    pub trials: u64,
    pub violations: u64,
    pub frequency: f64,
}

/// Over `trials` seeded samples of `S(1 - 1/h + epsilon, m)` per grid point,
/// the fraction containing any `n <= n_bound` with `r* >= g + 1`.
#[allow(clippy::too_many_arguments)]
pub fn montecarlo_star_violation(
    h: u32,
    epsilon: f64,
    g: u64,
    m_grid: &[u64],
    n_bound: u64,
    trials: u64,
    base_seed: u64,
    threads: usize,
) -> Result<Vec<ViolationRow>> {
    if h < 2 {
        return Err(Error::Domain(format!("order h={h} must be >= 2")));
    }
    let alpha = 1.0 - 1.0 / f64::from(h) + epsilon;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha = 1 - 1/h + epsilon = {alpha} must lie in (0, 1)"
        )));
    }
    let g_min = (2.0 / (f64::from(h) * epsilon)).ceil() as u64;
    if g < g_min {
        return Err(Error::Domain(format!(
            "g={g} below the admissible floor ceil(2/(h epsilon)) = {g_min}"
        )));
    }
    let mut rows = Vec::with_capacity(m_grid.len());
    for &m in m_grid {
        let seeds: Vec<u64> = (0..trials).map(|t| base_seed.wrapping_add(t)).collect();
        let flags: Vec<Result<bool>> = par_map(threads, seeds, |&seed| {
            let model = RandomModel::new(alpha, m, seed)?;
            let elems = model.sample_elements(n_bound);
            let prof = profile(&elems, h, n_bound)?;
            for (n, count) in prof.iter() {
                if count <= g {
                    continue; // r* <= r
                }
                if disjoint_count(&elems, h, n)? > g {
                    return Ok(true);
                }
            }
            Ok(false)
        });
        let mut violations = 0u64;
        for f in flags {
            if f? {
                violations += 1;
            }
        }
        rows.push(ViolationRow {
            m,
            trials,
            violations,
            frequency: violations as f64 / trials as f64,
        });
    }
    Ok(rows)
}
