//! `bhg`: construct, sample, verify and measure `B_h[g]` sequences.
//!
//! Every run is fully determined by its flags: no wall clock, no hidden
//! state, and identical invocations produce byte-identical artifacts. Large
//! outputs go to files; standard output carries a one-line summary.
//!
//! Exit codes: 0 success; 1 verification failure (a violation was found);
//! 2 usage/input errors; 3 budget, precision or cap errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use bhg::analysis;
use bhg::digitsets;
use bhg::error::Error;
use bhg::explicit::{self, ExplicitParams};
use bhg::packing::{self, Variant};
use bhg::randmodel::RandomModel;
use bhg::repcount;
use bhg::sequence::Sequence;

fn parse_u32(s: &str) -> Result<u32, String> {
    s.replace('_', "").parse().map_err(|e| format!("{e}"))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.replace('_', "").parse().map_err(|e| format!("{e}"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.replace('_', "").parse().map_err(|e| format!("{e}"))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.replace('_', "").parse().map_err(|e| format!("{e}"))
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    s.replace('_', "")
        .parse()
        .map_err(|_| format!("not a decimal natural: {s:?}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Plain,
    Star,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Star => Variant::Star,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bhg",
    about = "Construct, sample, verify and measure B_h[g] integer sequences",
    version
)]
struct Cli {
    /// Parallelism budget for the scan-heavy operations (results are
    /// identical for any value; 1 keeps everything on one thread).
    #[arg(long, global = true, default_value_t = 1, value_parser = parse_usize)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lexicographically-greedy maximal `B_h[1]` subset of `[0, limit)`.
    Greedy {
        #[arg(long, value_parser = parse_u32)]
        h: u32,
        #[arg(long, value_parser = parse_u64)]
        limit: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bose–Chowla `B_h[1]` set with p elements inside [0, p^h - 2].
    Bose {
        #[arg(long, value_parser = parse_u32)]
        h: u32,
        #[arg(long, value_parser = parse_u64)]
        p: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate the explicit windowed-digit sequence up to a bound.
    Explicit {
        #[arg(long, value_parser = parse_u32)]
        h: u32,
        #[arg(long, value_parser = parse_u32)]
        l: u32,
        #[arg(long, value_parser = parse_biguint)]
        max: BigUint,
        #[arg(long, value_parser = parse_u32)]
        precision: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the random model S(alpha, m) up to N.
    Sample {
        #[arg(long, value_parser = parse_f64)]
        alpha: f64,
        #[arg(long, value_parser = parse_u64)]
        m: u64,
        #[arg(long = "N", value_parser = parse_u64)]
        n: u64,
        #[arg(long, value_parser = parse_u64)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check r_{h,A}(n) <= g for every n <= max; exit 1 with a witness
    /// when the bound fails.
    Verify {
        #[arg(long, value_parser = parse_u32)]
        h: u32,
        #[arg(long, value_parser = parse_u64)]
        g: u64,
        #[arg(long, value_parser = parse_u64)]
        max: u64,
        #[arg(long = "in")]
        input: PathBuf,
        /// Optionally export the full profile as CSV.
        #[arg(long)]
        profile_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Maximum number of pairwise-disjoint representations of n.
    Pack {
        #[arg(long, value_parser = parse_u32)]
        h: u32,
        #[arg(long, value_parser = parse_u64)]
        n: u64,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Remove bad elements and write the pruned sequence.
    Prune {
        #[arg(long, value_parser = parse_u32)]
        h: u32,
        #[arg(long, value_parser = parse_u64)]
        g: u64,
        #[arg(long, value_parser = parse_u64)]
        max: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optionally export the bad-element report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Fit the density exponent of a sequence (log A(x) against log x).
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated checkpoint list; defaults to the geometric grid
        /// derived from the sequence's cutoff metadata.
        #[arg(long)]
        checkpoints: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sample S(2/3 + delta, m), prune order-3 star-bad and order-2 bad
    /// elements, verify `B_3[g]`, and measure the density exponent.
    Pipeline {
        #[arg(long, value_parser = parse_f64)]
        delta: f64,
        #[arg(long, value_parser = parse_u64)]
        g: u64,
        #[arg(long, value_parser = parse_u64)]
        m: u64,
        #[arg(long = "N", value_parser = parse_u64)]
        n: u64,
        #[arg(long, value_parser = parse_u64)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Optional plot-ready CSV (x, A(x), B(x)).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Density diagnostic chain of the explicit construction at explicit j.
    Diag {
        #[arg(long, value_parser = parse_u32)]
        h: u32,
        #[arg(long, value_parser = parse_u32)]
        l: u32,
        #[arg(long, value_parser = parse_u32)]
        j: u32,
        #[arg(long, value_parser = parse_u32)]
        precision: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } | Error::CapExceeded { .. } | Error::Precision { .. } => 3,
        Error::Internal(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let threads = cli.threads.max(1);
    match cli.command {
        Command::Greedy { h, limit, out } => {
            let set = digitsets::greedy_bh1(h, limit)?;
            Sequence::from_digit_set(&set).to_file(&out)?;
            println!(
                "greedy B_{h}[1]: {} elements in [0, {limit}) -> {}",
                set.len(),
                out.display()
            );
            Ok(0)
        }
        Command::Bose { h, p, out } => {
            let set = digitsets::bose_chowla(h, p)?;
            Sequence::from_digit_set(&set).to_file(&out)?;
            println!(
                "bose-chowla B_{h}[1]: {} elements in [0, {}] -> {}",
                set.len(),
                set.bound() - 1,
                out.display()
            );
            Ok(0)
        }
        Command::Explicit {
            h,
            l,
            max,
            precision,
            out,
        } => {
            let params = match precision {
                Some(p) => ExplicitParams::with_precision(h, l, p)?,
                None => ExplicitParams::new(h, l)?,
            };
            let seq = params.enumerate_upto(&max)?;
            seq.to_file(&out)?;
            println!(
                "explicit (h={h}, l={l}): {} members <= {max} -> {}",
                seq.len(),
                out.display()
            );
            Ok(0)
        }
        Command::Sample {
            alpha,
            m,
            n,
            seed,
            out,
        } => {
            let model = RandomModel::new(alpha, m, seed)?;
            let seq = model.sample(n);
            seq.to_file(&out)?;
            println!(
                "sample S({alpha}, {m}) seed={seed}: {} elements <= {n} -> {}",
                seq.len(),
                out.display()
            );
            Ok(0)
        }
        Command::Verify {
            h,
            g,
            max,
            input,
            profile_out,
            format,
        } => {
            let seq = Sequence::from_file(&input)?;
            let elems = seq.upto_u64(max);
            if let Some(path) = &profile_out {
                let prof = repcount::profile(&elems, h, max)?;
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                prof.write_csv(&mut f)?;
            }
            let check = repcount::is_bhg(&elems, h, g, max)?;
            match (&check.witness, format) {
                (None, Format::Text) => {
                    println!("ok: r_{h} <= {g} for all n <= {max}");
                    Ok(0)
                }
                (None, Format::Json) => {
                    println!("{}", serde_json::json!({ "ok": true, "h": h, "g": g, "N": max }));
                    Ok(0)
                }
                (Some((n, tuples)), Format::Text) => {
                    let shown: Vec<String> = tuples
                        .iter()
                        .map(|t| {
                            let parts: Vec<String> = t.iter().map(u64::to_string).collect();
                            format!("({})", parts.join(","))
                        })
                        .collect();
                    println!(
                        "violation: r_{h}({n}) = {} > {g}: {}",
                        tuples.len(),
                        shown.join(" ")
                    );
                    Ok(1)
                }
                (Some((n, tuples)), Format::Json) => {
                    println!(
                        "{}",
                        serde_json::json!({ "ok": false, "n": n, "tuples": tuples })
                    );
                    Ok(1)
                }
            }
        }
        Command::Pack { h, n, input } => {
            let seq = Sequence::from_file(&input)?;
            let elems = seq.upto_u64(n);
            let plain = repcount::count_reps(&elems, h, n, false).count;
            let star = packing::disjoint_count(&elems, h, n)?;
            println!("r_{h}({n}) = {plain}, r*_{h}({n}) = {star}");
            Ok(0)
        }
        Command::Prune {
            h,
            g,
            max,
            variant,
            input,
            out,
            report,
        } => {
            let seq = Sequence::from_file(&input)?;
            let bad = packing::bad_elements_threaded(&seq, h, g, max, variant.into(), threads)?;
            bad.pruned.to_file(&out)?;
            if let Some(path) = &report {
                std::fs::write(path, bad.to_json())?;
            }
            println!(
                "pruned {} of {} elements (h={h}, g={g}, variant={:?}) -> {}",
                bad.bad.len(),
                bad.original_count,
                variant,
                out.display()
            );
            Ok(0)
        }
        Command::Fit {
            input,
            checkpoints,
            format,
        } => {
            let seq = Sequence::from_file(&input)?;
            let grid: Vec<u64> = match checkpoints {
                Some(list) => list
                    .split(',')
                    .map(|s| parse_u64(s.trim()).map_err(Error::Domain))
                    .collect::<Result<_, _>>()?,
                None => {
                    let m = seq.meta().m.ok_or_else(|| {
                        Error::Domain(
                            "no --checkpoints given and the sequence has no cutoff metadata"
                                .into(),
                        )
                    })?;
                    let top = seq
                        .elements()
                        .last()
                        .and_then(num_traits_to_u64)
                        .ok_or_else(|| Error::Domain("empty sequence".into()))?;
                    analysis::default_checkpoints(m, top)
                }
            };
            let fit = analysis::exponent_fit(&seq, &grid)?;
            match format {
                Format::Text => println!(
                    "slope={:.6} intercept={:.6} max_rel_residual={:.6}",
                    fit.slope, fit.intercept, fit.max_rel_residual
                ),
                Format::Json => println!("{}", serde_json::to_string(&fit).expect("fit json")),
            }
            Ok(0)
        }
        Command::Pipeline {
            delta,
            g,
            m,
            n,
            seed,
            out,
            csv,
        } => {
            let report = analysis::pipeline_theorem3(delta, g, m, n, seed, threads)?;
            std::fs::write(&out, report.to_json())?;
            if let Some(path) = &csv {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                report.write_csv(&mut f)?;
            }
            let slope = report
                .exponent
                .map(|e| format!("{:.4}", e.slope))
                .unwrap_or_else(|| "n/a".into());
            println!(
                "pipeline seed={seed}: |A|={} bad={} pruned={} is_bhg={} exponent={slope} -> {}",
                report.original_count,
                report.bad_union_count,
                report.pruned_count,
                report.is_bhg,
                out.display()
            );
            Ok(0)
        }
        Command::Diag {
            h,
            l,
            j,
            precision,
            format,
        } => {
            let rep = match precision {
                Some(p) => explicit::diagnostics_with_precision(h, l, j, p)?,
                None => explicit::diagnostics(h, l, j)?,
            };
            match format {
                Format::Text => {
                    println!(
                        "h={} l={} j={} r={:.6}\nlog n upper bound   = {:.6e}\nlog N lower bound   = {:.6e}\nh logN / logn       = {:.6}\nwindow-loss floor   = {:.6} (closed form {:.6})\ntail term           = {:.6e} (must stay below {:.6})\nthreshold           = {:.6}\nflag (ratio > thr)  = {}",
                        rep.h,
                        rep.l,
                        rep.j,
                        rep.r,
                        rep.log_n_upper,
                        rep.log_big_n_lower,
                        rep.ratio,
                        rep.des_lhs,
                        rep.des_rhs,
                        rep.j_lhs,
                        rep.j_rhs,
                        rep.threshold,
                        rep.flag
                    );
                }
                Format::Json => println!("{}", serde_json::to_string(&rep).expect("diag json")),
            }
            Ok(0)
        }
    }
}

fn num_traits_to_u64(v: &BigUint) -> Option<u64> {
    u64::try_from(v).ok()
}
