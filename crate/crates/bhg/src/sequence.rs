//! The shared sequence container and its text file format.
//!
//! One format serves every producer: a single header line
//!
//! ```text
//! # bhgseq v1 source=<tag> h=<h> [l=<l>|alpha=<a> m=<m> seed=<s>] N=<N>
//! ```
//!
//! followed by one decimal element per line in strictly increasing order.
//! Output is byte-identical across platforms. Digit sets (which contain 0)
//! use the same format; sequences built by the explicit and random sources
//! consist of positive integers only.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::digitsets::BhOneSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Explicit,
    Random,
    Greedy,
    BoseChowla,
    Pruned,
    Literal,
}

impl Source {
    pub fn tag(&self) -> &'static str {
        match self {
            Source::Explicit => "explicit",
            Source::Random => "random",
            Source::Greedy => "greedy",
            Source::BoseChowla => "bose_chowla",
            Source::Pruned => "pruned",
            Source::Literal => "literal",
        }
    }

    fn from_tag(tag: &str) -> Source {
        match tag {
            "explicit" => Source::Explicit,
            "random" => Source::Random,
            "greedy" => Source::Greedy,
            "bose_chowla" => Source::BoseChowla,
            "pruned" => Source::Pruned,
            _ => Source::Literal,
        }
    }
}

/// Provenance carried alongside the elements; every field that applies to
/// the producing source is recorded so a run can be reproduced exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqMeta {
    pub source: Source,
    pub h: Option<u32>,
    pub l: Option<u32>,
    pub alpha: Option<f64>,
    pub m: Option<u64>,
    pub seed: Option<u64>,
    /// Truncation bound: elements beyond this were never examined.
    pub bound: Option<BigUint>,
}

impl SeqMeta {
    pub fn bare(source: Source) -> SeqMeta {
        SeqMeta {
            source,
            h: None,
            l: None,
            alpha: None,
            m: None,
            seed: None,
            bound: None,
        }
    }
}

/// Strictly increasing sequence of naturals with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    elements: Vec<BigUint>,
    meta: SeqMeta,
}

impl Sequence {
    pub fn new(elements: Vec<BigUint>, meta: SeqMeta) -> Result<Sequence> {
        for w in elements.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Domain(format!(
                    "sequence not strictly increasing at {} >= {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(bound) = &meta.bound {
            if let Some(last) = elements.last() {
                if last > bound {
                    return Err(Error::Domain(format!(
                        "element {last} exceeds declared bound {bound}"
                    )));
                }
            }
        }
        Ok(Sequence { elements, meta })
    }

    pub fn from_u64s(elements: Vec<u64>, meta: SeqMeta) -> Result<Sequence> {
        Self::new(elements.into_iter().map(BigUint::from).collect(), meta)
    }

    /// Wrap a digit set for serialization in the shared format.
    pub fn from_digit_set(set: &BhOneSet) -> Sequence {
        let source = match set.source() {
            crate::digitsets::DigitSource::BoseChowla { .. } => Source::BoseChowla,
            _ => Source::Greedy,
        };
        let mut meta = SeqMeta::bare(source);
        meta.h = Some(set.h());
        meta.bound = Some(BigUint::from(set.bound()));
        Sequence {
            elements: set.elements().iter().map(|&e| BigUint::from(e)).collect(),
            meta,
        }
    }

    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn meta(&self) -> &SeqMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements `<= limit`, converted to `u64` (always exact below the
    /// limit). This is the view the counting kernels work on.
    pub fn upto_u64(&self, limit: u64) -> Vec<u64> {
        let lim = BigUint::from(limit);
        self.elements
            .iter()
            .take_while(|e| **e <= lim)
            .map(|e| e.to_u64().expect("element below u64 limit"))
            .collect()
    }

    /// `A(x) = |A intersect [1, x]|` by binary search. Elements equal to 0
    /// (possible in digit-set files) are not counted.
    pub fn count_upto(&self, x: &BigUint) -> u64 {
        let upper = self.elements.partition_point(|e| e <= x) as u64;
        let zeros = self.elements.first().map_or(0, |e| u64::from(e.to_u64() == Some(0)));
        upper.saturating_sub(zeros)
    }

    pub fn count_upto_u64(&self, x: u64) -> u64 {
        self.count_upto(&BigUint::from(x))
    }

    pub fn with_meta(self, meta: SeqMeta) -> Sequence {
        Sequence {
            elements: self.elements,
            meta,
        }
    }

    fn header(&self) -> String {
        let mut s = format!("# bhgseq v1 source={}", self.meta.source.tag());
        if let Some(h) = self.meta.h {
            let _ = write!(s, " h={h}");
        }
        if let Some(l) = self.meta.l {
            let _ = write!(s, " l={l}");
        }
        if let Some(alpha) = self.meta.alpha {
            let _ = write!(s, " alpha={alpha}");
        }
        if let Some(m) = self.meta.m {
            let _ = write!(s, " m={m}");
        }
        if let Some(seed) = self.meta.seed {
            let _ = write!(s, " seed={seed}");
        }
        if let Some(bound) = &self.meta.bound {
            let _ = write!(s, " N={bound}");
        }
        s
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header())?;
        for e in &self.elements {
            writeln!(w, "{e}")?;
        }
        Ok(())
    }

    pub fn to_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Sequence> {
        let reader = BufReader::new(r);
        let mut meta = SeqMeta::bare(Source::Literal);
        let mut elements: Vec<BigUint> = Vec::new();
        let mut saw_header = false;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if !saw_header {
                    meta = parse_header(line, idx + 1)?;
                    saw_header = true;
                }
                continue;
            }
            let value: BigUint = line.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("expected a decimal natural, got {line:?}"),
            })?;
            if let Some(last) = elements.last() {
                if *last >= value {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("elements must be strictly increasing ({last} then {value})"),
                    });
                }
            }
            elements.push(value);
        }
        Ok(Sequence { elements, meta })
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Sequence> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<SeqMeta> {
    let rest = line
        .strip_prefix("# bhgseq v1")
        .ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("unrecognized header {line:?}"),
        })?;
    let mut meta = SeqMeta::bare(Source::Literal);
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("malformed header field {field:?}"),
        })?;
        let bad = |what: &str| Error::Parse {
            line: lineno,
            msg: format!("bad {what} value {value:?}"),
        };
        match key {
            "source" => meta.source = Source::from_tag(value),
            "h" => meta.h = Some(value.parse().map_err(|_| bad("h"))?),
            "l" => meta.l = Some(value.parse().map_err(|_| bad("l"))?),
            "alpha" => meta.alpha = Some(value.parse().map_err(|_| bad("alpha"))?),
            "m" => meta.m = Some(value.parse().map_err(|_| bad("m"))?),
            "seed" => meta.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "N" => meta.bound = Some(value.parse().map_err(|_| bad("N"))?),
            _ => {} // tolerate unknown fields from future versions
        }
    }
    Ok(meta)
}
