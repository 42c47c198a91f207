//! Domain types shared by every stage of the pipeline: cited references,
//! citing records, the distinct-variant table and year filters.

use std::cell::Cell;
use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Inclusive year range with a flag deciding what happens to items without a year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct YearRange {
    pub lo: i32,
    pub hi: i32,
    pub include_unknown: bool,
}

impl YearRange {
    pub fn new(lo: i32, hi: i32, include_unknown: bool) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("year range [{lo}, {hi}] is empty")));
        }
        Ok(Self {
            lo,
            hi,
            include_unknown,
        })
    }

    pub fn contains(&self, year: Option<i32>) -> bool {
        match year {
            Some(y) => self.lo <= y && y <= self.hi,
            None => self.include_unknown,
        }
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.lo, self.hi, self.include_unknown)
    }
}

/// Lowest and highest year accepted as a reference publication year.
pub const MIN_RPY: i32 = 1000;
pub const MAX_RPY: i32 = 3000;

/// Plain field bundle of a cited reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CrFields {
    pub raw: String,
    pub author: String,
    pub rpy: Option<i32>,
    pub source: String,
    pub volume: Option<String>,
    pub page: Option<String>,
    pub doi: Option<String>,
}

thread_local! {
    static LIVE_REFS: Cell<isize> = const { Cell::new(0) };
    static PEAK_REFS: Cell<isize> = const { Cell::new(0) };
}

fn track_alloc() {
    LIVE_REFS.with(|live| {
        let now = live.get() + 1;
        live.set(now);
        PEAK_REFS.with(|peak| {
            if now > peak.get() {
                peak.set(now);
            }
        });
    });
}

/// Counters of simultaneously live [`CitedReference`] values on the current thread.
///
/// Every construction and clone increments the live count and every drop
/// decrements it. The high-water mark lets tests assert that streaming
/// imports never hold more references than the sample plus one record.
pub mod instrument {
    use super::{LIVE_REFS, PEAK_REFS};

    pub fn live() -> isize {
        LIVE_REFS.with(|c| c.get())
    }

    pub fn peak() -> isize {
        PEAK_REFS.with(|c| c.get())
    }

    /// Resets the high-water mark to the current live count.
    pub fn reset_peak() {
        let now = live();
        PEAK_REFS.with(|c| c.set(now));
    }
}

/// One parsed cited reference (a single `CR` line).
#[derive(PartialEq, Eq, Hash)]
pub struct CitedReference(CrFields);

impl CitedReference {
    /// Builds a reference, normalizing author and source and discarding
    /// years outside the accepted range.
    pub fn new(mut fields: CrFields) -> Result<Self> {
        if fields.raw.trim().is_empty() {
            return Err(Error::Domain("cited reference text is empty".into()));
        }
        fields.author = normalize_text(&fields.author);
        fields.source = normalize_text(&fields.source);
        fields.rpy = fields.rpy.filter(|y| (MIN_RPY..=MAX_RPY).contains(y));
        track_alloc();
        Ok(Self(fields))
    }

    pub fn fields(&self) -> &CrFields {
        &self.0
    }

    /// Aggregation identity of this reference.
    pub fn key(&self) -> String {
        normalize_key(&self.0.raw)
    }
}

impl Deref for CitedReference {
    type Target = CrFields;

    fn deref(&self) -> &CrFields {
        &self.0
    }
}

impl Clone for CitedReference {
    fn clone(&self) -> Self {
        track_alloc();
        Self(self.0.clone())
    }
}

impl Drop for CitedReference {
    fn drop(&mut self) {
        LIVE_REFS.with(|c| c.set(c.get() - 1));
    }
}

impl fmt::Debug for CitedReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Upper-case, single-spaced, trimmed.
pub fn normalize_text(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_uppercase()
}

const TRAILING_PUNCT: &[char] = &['.', ',', ';', ':', '!', '?'];

/// Normalized form of a raw CR string: upper-cased, whitespace collapsed,
/// trimmed, trailing punctuation removed.
pub fn normalize_key(raw: &str) -> String {
    let mut key = normalize_text(raw);
    loop {
        let stripped = key.trim_end_matches(TRAILING_PUNCT).trim_end();
        if stripped.len() == key.len() {
            return key;
        }
        key.truncate(stripped.len());
    }
}

/// One citing publication with its reference list in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitingRecord {
    pub py: Option<i32>,
    pub doc_type: String,
    pub crs: Vec<CitedReference>,
}

/// A distinct CR string with its occurrence count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrVariant {
    pub key: String,
    pub reference: CitedReference,
    pub ncr: u64,
    pub cluster_id: Option<usize>,
    pub n_py_years: u32,
}

impl CrVariant {
    pub fn rpy(&self) -> Option<i32> {
        self.reference.rpy
    }
}

/// The working set of CR variants plus citing-record statistics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub variants: Vec<CrVariant>,
    pub n_citing: u64,
    pub n_cr_total: u64,
    pub rpy_filter: Option<YearRange>,
    pub py_filter: Option<YearRange>,
    pub provenance: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    pub fn total_ncr(&self) -> u64 {
        self.variants.iter().map(|v| v.ncr).sum()
    }

    pub fn get(&self, key: &str) -> Option<&CrVariant> {
        self.variants.iter().find(|v| v.key == key)
    }

    /// Per-key NCR table, handy for comparing datasets.
    pub fn ncr_by_key(&self) -> HashMap<&str, u64> {
        self.variants
            .iter()
            .map(|v| (v.key.as_str(), v.ncr))
            .collect()
    }

    pub fn log(&mut self, entry: impl Into<String>) {
        self.provenance.push(entry.into());
    }

    /// Sorts variants by (rpy, key) and renumbers cluster ids to the
    /// smallest member index in that order.
    pub fn canonicalize(&mut self) {
        self.variants
            .sort_by(|a, b| (a.rpy(), &a.key).cmp(&(b.rpy(), &b.key)));
        let mut first_index: HashMap<usize, usize> = HashMap::new();
        for (i, v) in self.variants.iter_mut().enumerate() {
            if let Some(old) = v.cluster_id {
                v.cluster_id = Some(*first_index.entry(old).or_insert(i));
            }
        }
    }
}

/// Counts occurrences of `(reference, citing year)` into a variant table.
///
/// The result is canonical: variants sorted by (rpy, key), no cluster ids,
/// `n_citing` zero (the caller knows how many citing records it read).
pub fn aggregate<I>(occurrences: I) -> Dataset
where
    I: IntoIterator<Item = (CitedReference, Option<i32>)>,
{
    struct Acc {
        reference: CitedReference,
        ncr: u64,
        years: HashSet<i32>,
    }

    let mut table: HashMap<String, Acc> = HashMap::new();
    let mut total = 0u64;
    for (cr, py) in occurrences {
        total += 1;
        let key = cr.key();
        let acc = match table.entry(key) {
            Entry::Occupied(e) => {
                let acc = e.into_mut();
                // Smallest raw spelling represents the key, independent of order.
                if cr.raw < acc.reference.raw {
                    acc.reference = cr;
                }
                acc
            }
            Entry::Vacant(e) => e.insert(Acc {
                reference: cr,
                ncr: 0,
                years: HashSet::new(),
            }),
        };
        acc.ncr += 1;
        if let Some(y) = py {
            acc.years.insert(y);
        }
    }

    let mut ds = Dataset {
        variants: table
            .into_iter()
            .map(|(key, acc)| CrVariant {
                key,
                reference: acc.reference,
                ncr: acc.ncr,
                cluster_id: None,
                n_py_years: acc.years.len() as u32,
            })
            .collect(),
        n_cr_total: total,
        ..Dataset::default()
    };
    ds.canonicalize();
    ds
}
