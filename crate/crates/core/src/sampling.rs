//! Random, systematic and cluster sampling over the filtered stream of
//! cited-reference occurrences.
//!
//! All samplers are single-pass and retain at most their target size
//! (cluster sampling: at most the chosen year's occurrences).
//!
//! Randomness comes from [`SampleRng`], ChaCha8 seeded through
//! `seed_from_u64` with a fixed rejection rule for bounded integers, so a
//! given seed selects the same references on every platform and release.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::record::{CitedReference, CitingRecord, YearRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SamplingMode {
    #[default]
    None,
    Random,
    Systematic,
    Cluster,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::None => "NONE",
            SamplingMode::Random => "RANDOM",
            SamplingMode::Systematic => "SYSTEMATIC",
            SamplingMode::Cluster => "CLUSTER",
        })
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Ok(SamplingMode::None),
            "RANDOM" => Ok(SamplingMode::Random),
            "SYSTEMATIC" => Ok(SamplingMode::Systematic),
            "CLUSTER" => Ok(SamplingMode::Cluster),
            _ => Err(Error::InvalidSampler(format!("unknown sampling mode `{s}`"))),
        }
    }
}

/// Seedable generator with a frozen algorithm.
pub struct SampleRng(ChaCha8Rng);

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform integer in `[0, bound)`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Values under `reject` would bias the modulo; draw again.
        let reject = bound.wrapping_neg() % bound;
        loop {
            let x = self.0.next_u64();
            if x >= reject {
                return x % bound;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// A cited reference together with the citing record it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub cr: CitedReference,
    pub py: Option<i32>,
    /// 0-based index of the citing record in the file.
    pub record: u64,
}

/// Reservoir sampler (Algorithm R): a uniform sample without replacement
/// of size `min(n, stream length)`.
pub struct Reservoir<T> {
    capacity: usize,
    seen: u64,
    items: Vec<T>,
    rng: SampleRng,
}

impl<T> Reservoir<T> {
    pub fn new(capacity: usize, seed: u64) -> Self {
        Self {
            capacity,
            seen: 0,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            rng: SampleRng::new(seed),
        }
    }

    pub fn offer(&mut self, item: T) {
        self.seen += 1;
        if self.items.len() < self.capacity {
            self.items.push(item);
            return;
        }
        let j = self.rng.below(self.seen);
        if (j as usize) < self.capacity {
            self.items[j as usize] = item;
        }
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn into_items(self) -> Vec<T> {
        self.items
    }
}

/// Simple random sample of `n` items from a stream.
pub fn random_sample<T, I>(stream: I, n: usize, seed: u64) -> Vec<T>
where
    I: IntoIterator<Item = T>,
{
    let mut reservoir = Reservoir::new(n, seed);
    for item in stream {
        reservoir.offer(item);
    }
    reservoir.into_items()
}

/// Distance between systematic picks: `max(1, floor(total / n))`.
pub fn systematic_step(total: u64, n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    (total / n).max(1)
}

/// Decides, position by position, whether an occurrence belongs to a
/// systematic sample.
#[derive(Debug, Clone)]
pub struct SystematicSelector {
    step: u64,
    next: u64,
    remaining: u64,
    position: u64,
}

impl SystematicSelector {
    pub fn new(total: u64, n: u64, offset: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSampler(
                "systematic sampling needs a sample size of at least 1".into(),
            ));
        }
        if total == 0 {
            return Err(Error::InvalidSampler(
                "systematic sampling needs a population count of at least 1".into(),
            ));
        }
        let step = systematic_step(total, n);
        if offset >= step {
            return Err(Error::OffsetTooLarge { offset, step });
        }
        Ok(Self {
            step,
            next: offset,
            remaining: n,
            position: 0,
        })
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Advances by one position and reports whether it is selected.
    pub fn accept(&mut self) -> bool {
        let pos = self.position;
        self.position += 1;
        if self.remaining > 0 && pos == self.next {
            self.remaining -= 1;
            self.next += self.step;
            true
        } else {
            false
        }
    }

    pub fn is_done(&self) -> bool {
        self.remaining == 0
    }
}

/// Systematic sample: positions `offset, offset + step, …`, at most `n` picks.
pub fn systematic_sample<T, I>(stream: I, n: u64, total: u64, offset: u64) -> Result<Vec<T>>
where
    I: IntoIterator<Item = T>,
{
    let mut selector = SystematicSelector::new(total, n, offset)?;
    let mut out = Vec::new();
    for item in stream {
        if selector.accept() {
            out.push(item);
        }
        if selector.is_done() {
            break;
        }
    }
    Ok(out)
}

/// Draws the citing year of a cluster sample uniformly from the range.
pub fn choose_cluster_year(range: &YearRange, seed: u64) -> i32 {
    let width = (range.hi as i64 - range.lo as i64 + 1) as u64;
    range.lo + SampleRng::new(seed).below(width) as i32
}

/// All occurrences of the citing records published in `year`.
pub fn cluster_sample_year<I>(records: I, year: i32) -> Result<Vec<Occurrence>>
where
    I: IntoIterator<Item = CitingRecord>,
{
    let mut out = Vec::new();
    let mut hit = false;
    for (idx, rec) in records.into_iter().enumerate() {
        if rec.py != Some(year) {
            continue;
        }
        hit = true;
        out.extend(rec.crs.into_iter().map(|cr| Occurrence {
            cr,
            py: Some(year),
            record: idx as u64,
        }));
    }
    if !hit {
        return Err(Error::EmptySample {
            mode: SamplingMode::Cluster.to_string(),
            detail: format!("no citing records published in {year}"),
        });
    }
    Ok(out)
}

/// Cluster sample: every CR of one citing year chosen uniformly from `py_range`.
pub fn cluster_sample<I>(records: I, py_range: &YearRange, seed: u64) -> Result<Vec<Occurrence>>
where
    I: IntoIterator<Item = CitingRecord>,
{
    cluster_sample_year(records, choose_cluster_year(py_range, seed))
}

/// Number of CRs to remove from a sample given the threshold chosen for the
/// full population: `round(threshold_full / (ncr_full / ncr_sample))`,
/// rounding half away from zero.
pub fn removal_threshold(threshold_full: i64, ncr_full: i64, ncr_sample: i64) -> Result<i64> {
    if threshold_full < 0 {
        return Err(Error::Domain(format!(
            "threshold must be non-negative, got {threshold_full}"
        )));
    }
    if ncr_sample < 1 || ncr_full < 1 {
        return Err(Error::Domain(format!(
            "CR counts must be positive (full {ncr_full}, sample {ncr_sample})"
        )));
    }
    if ncr_full < ncr_sample {
        return Err(Error::Domain(format!(
            "sample ({ncr_sample}) is larger than the population ({ncr_full})"
        )));
    }
    let ratio = ncr_full as f64 / ncr_sample as f64;
    Ok((threshold_full as f64 / ratio).round() as i64)
}

/// Sampling configuration resolved for one import.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sampler {
    pub mode: SamplingMode,
    /// Target sample size; 0 means unlimited for `None`.
    pub n: u64,
    pub offset: u64,
    /// Population size, required for systematic sampling.
    pub total: Option<u64>,
    /// Citing-year range, required for cluster sampling.
    pub py_range: Option<YearRange>,
    pub seed: u64,
}

impl Sampler {
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            SamplingMode::None => Ok(()),
            SamplingMode::Random if self.n == 0 => Err(Error::InvalidSampler(
                "random sampling needs maxCR of at least 1".into(),
            )),
            SamplingMode::Random => Ok(()),
            SamplingMode::Systematic => {
                SystematicSelector::new(self.total.unwrap_or(0), self.n, self.offset).map(|_| ())
            }
            SamplingMode::Cluster if self.py_range.is_none() => Err(Error::InvalidSampler(
                "cluster sampling needs a PY range".into(),
            )),
            SamplingMode::Cluster => Ok(()),
        }
    }

    /// Streaming state for one pass over the filtered occurrences.
    pub fn collector(&self) -> Result<Collector> {
        self.validate()?;
        let state = match self.mode {
            SamplingMode::None => CollectorState::All {
                limit: self.n,
                items: Vec::new(),
            },
            SamplingMode::Random => {
                CollectorState::Random(Box::new(Reservoir::new(self.n as usize, self.seed)))
            }
            SamplingMode::Systematic => CollectorState::Systematic {
                selector: SystematicSelector::new(
                    self.total.unwrap_or(0),
                    self.n,
                    self.offset,
                )?,
                items: Vec::new(),
            },
            SamplingMode::Cluster => {
                let range = self.py_range.expect("validated");
                CollectorState::Cluster {
                    year: choose_cluster_year(&range, self.seed),
                    records: 0,
                    items: Vec::new(),
                }
            }
        };
        Ok(Collector {
            mode: self.mode,
            state,
        })
    }
}

enum CollectorState {
    All {
        limit: u64,
        items: Vec<Occurrence>,
    },
    Random(Box<Reservoir<Occurrence>>),
    Systematic {
        selector: SystematicSelector,
        items: Vec<Occurrence>,
    },
    Cluster {
        year: i32,
        records: u64,
        items: Vec<Occurrence>,
    },
}

/// Receives filtered occurrences in file order and keeps the sample.
pub struct Collector {
    mode: SamplingMode,
    state: CollectorState,
}

impl Collector {
    /// Whether CRs of a citing record with this publication year can be selected.
    pub fn wants_record(&mut self, py: Option<i32>) -> bool {
        match &mut self.state {
            CollectorState::Cluster { year, records, .. } => {
                let hit = py == Some(*year);
                if hit {
                    *records += 1;
                }
                hit
            }
            _ => true,
        }
    }

    pub fn offer(&mut self, occ: Occurrence) {
        match &mut self.state {
            CollectorState::All { limit, items } => {
                if *limit == 0 || (items.len() as u64) < *limit {
                    items.push(occ);
                }
            }
            CollectorState::Random(r) => r.offer(occ),
            CollectorState::Systematic { selector, items } => {
                if selector.accept() {
                    items.push(occ);
                }
            }
            CollectorState::Cluster { items, .. } => items.push(occ),
        }
    }

    /// True once no further occurrence can be selected.
    pub fn is_saturated(&self) -> bool {
        match &self.state {
            CollectorState::All { limit, items } => *limit > 0 && items.len() as u64 >= *limit,
            CollectorState::Systematic { selector, .. } => selector.is_done(),
            _ => false,
        }
    }

    /// The chosen citing year of a cluster sample.
    pub fn cluster_year(&self) -> Option<i32> {
        match &self.state {
            CollectorState::Cluster { year, .. } => Some(*year),
            _ => None,
        }
    }

    pub fn finish(self) -> Result<Vec<Occurrence>> {
        let mode = self.mode;
        let items = match self.state {
            CollectorState::All { items, .. } => items,
            CollectorState::Random(r) => r.into_items(),
            CollectorState::Systematic { items, .. } => items,
            CollectorState::Cluster {
                year,
                records,
                items,
            } => {
                if records == 0 {
                    return Err(Error::EmptySample {
                        mode: mode.to_string(),
                        detail: format!("no citing records published in {year}"),
                    });
                }
                items
            }
        };
        if items.is_empty() && mode != SamplingMode::None {
            return Err(Error::EmptySample {
                mode: mode.to_string(),
                detail: "no cited references passed the filters".into(),
            });
        }
        Ok(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::CrFields;

    fn record(py: i32, n: usize) -> CitingRecord {
        CitingRecord {
            py: Some(py),
            doc_type: "Article".into(),
            crs: (0..n)
                .map(|i| {
                    CitedReference::new(CrFields {
                        raw: format!("A{py} {i}, 2000, J"),
                        author: format!("A{py} {i}"),
                        rpy: Some(2000),
                        source: "J".into(),
                        ..CrFields::default()
                    })
                    .unwrap()
                })
                .collect(),
        }
    }

    #[test]
    fn systematic_anchor_positions() {
        let picked = systematic_sample(0..400u64, 100, 400, 0).unwrap();
        let expected: Vec<u64> = (0..100).map(|k| 4 * k).collect();
        assert_eq!(picked, expected);
        assert_eq!(picked.last(), Some(&396));
    }

    #[test]
    fn systematic_offset_one() {
        let picked = systematic_sample(0..400u64, 100, 400, 1).unwrap();
        let expected: Vec<u64> = (0..100).map(|k| 4 * k + 1).collect();
        assert_eq!(picked, expected);
    }

    #[test]
    fn systematic_takes_everything_when_n_exceeds_total() {
        let picked = systematic_sample(0..10u64, 50, 10, 0).unwrap();
        assert_eq!(picked, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn systematic_rejects_large_offset() {
        let err = systematic_sample(0..400u64, 100, 400, 4).unwrap_err();
        assert!(matches!(err, Error::OffsetTooLarge { offset: 4, step: 4 }));
    }

    #[test]
    fn systematic_truncates_at_n() {
        // step floor(10/3) = 3 → 0, 3, 6 (9 would be a fourth pick)
        let picked = systematic_sample(0..10u64, 3, 10, 0).unwrap();
        assert_eq!(picked, vec![0, 3, 6]);
    }

    #[test]
    fn random_sample_takes_whole_small_population() {
        let mut picked = random_sample(0..20u32, 50, 9);
        picked.sort();
        assert_eq!(picked, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn random_sample_is_deterministic() {
        let a = random_sample(0..10_000u32, 25, 42);
        let b = random_sample(0..10_000u32, 25, 42);
        let c = random_sample(0..10_000u32, 25, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 25);
    }

    #[test]
    fn rng_below_stays_in_range() {
        let mut rng = SampleRng::new(1);
        for bound in [1u64, 2, 3, 7, 1000, u64::MAX] {
            for _ in 0..100 {
                assert!(rng.below(bound) < bound);
            }
        }
    }

    #[test]
    fn fixed_year_cluster_needs_no_randomness() {
        let range = YearRange::new(2011, 2011, false).unwrap();
        for seed in 0..5 {
            assert_eq!(choose_cluster_year(&range, seed), 2011);
        }
        let recs = vec![record(2010, 2), record(2011, 3), record(2011, 1)];
        let occ = cluster_sample(recs, &range, 0).unwrap();
        assert_eq!(occ.len(), 4);
        assert!(occ.iter().all(|o| o.py == Some(2011)));
    }

    #[test]
    fn cluster_picks_exactly_one_year() {
        let range = YearRange::new(2011, 2014, false).unwrap();
        for seed in 0..20 {
            let recs: Vec<_> = (2011..=2014).map(|y| record(y, (y - 2010) as usize)).collect();
            let year = choose_cluster_year(&range, seed);
            let occ = cluster_sample(recs, &range, seed).unwrap();
            assert_eq!(occ.len(), (year - 2010) as usize);
            assert!(occ.iter().all(|o| o.py == Some(year)));
        }
    }

    #[test]
    fn empty_cluster_year_is_an_error() {
        let recs = vec![record(2011, 2), record(2013, 2)];
        let err = cluster_sample_year(recs, 2012).unwrap_err();
        match err {
            Error::EmptySample { detail, .. } => assert!(detail.contains("2012")),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn removal_threshold_examples() {
        assert_eq!(removal_threshold(100, 6_594_657, 50_000).unwrap(), 1);
        assert_eq!(removal_threshold(0, 1234, 17).unwrap(), 0);
        assert_eq!(removal_threshold(100, 1_000, 500).unwrap(), 50);
        // round half away from zero: 5 / (4/2) = 2.5 -> 3
        assert_eq!(removal_threshold(5, 4, 2).unwrap(), 3);
    }

    #[test]
    fn removal_threshold_domain_errors() {
        assert!(removal_threshold(100, 0, 0).is_err());
        assert!(removal_threshold(100, 10, 0).is_err());
        assert!(removal_threshold(-1, 10, 5).is_err());
        assert!(removal_threshold(1, 5, 10).is_err());
    }

    #[test]
    fn sampler_validation() {
        let base = Sampler {
            mode: SamplingMode::Systematic,
            n: 100,
            offset: 0,
            total: None,
            py_range: None,
            seed: 0,
        };
        assert!(base.validate().is_err());
        assert!(Sampler { total: Some(400), ..base.clone() }.validate().is_ok());
        assert!(Sampler { mode: SamplingMode::Cluster, ..base.clone() }.validate().is_err());
        assert!(Sampler { mode: SamplingMode::Random, n: 0, ..base.clone() }.validate().is_err());
        assert!(Sampler { mode: SamplingMode::None, n: 0, ..base }.validate().is_ok());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("random".parse::<SamplingMode>().unwrap(), SamplingMode::Random);
        assert_eq!("SYSTEMATIC".parse::<SamplingMode>().unwrap(), SamplingMode::Systematic);
        assert!("STRATIFIED".parse::<SamplingMode>().is_err());
    }
}
