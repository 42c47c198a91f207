//! RPYS spectrograms: NCR per reference publication year, deviation from
//! the running median, and comparisons between samples.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::record::{CrVariant, Dataset};

/// Default number of neighbouring years on each side of the median window.
pub const DEFAULT_MEDIAN_RANGE: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectroRow {
    pub rpy: i32,
    pub ncr: u64,
    pub median_dev: f64,
}

/// Dense per-year series from the first to the last cited year.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrogram {
    pub rows: Vec<SpectroRow>,
}

impl Spectrogram {
    pub fn first_year(&self) -> Option<i32> {
        self.rows.first().map(|r| r.rpy)
    }

    pub fn last_year(&self) -> Option<i32> {
        self.rows.last().map(|r| r.rpy)
    }

    pub fn ncr_at(&self, year: i32) -> Option<u64> {
        let first = self.first_year()?;
        let idx = usize::try_from(year.checked_sub(first)?).ok()?;
        self.rows.get(idx).map(|r| r.ncr)
    }

    pub fn total_ncr(&self) -> u64 {
        self.rows.iter().map(|r| r.ncr).sum()
    }

    fn window(&self) -> Option<(i32, i32)> {
        Some((self.first_year()?, self.last_year()?))
    }

    fn max_in(&self, lo: i32, hi: i32) -> u64 {
        self.rows
            .iter()
            .filter(|r| lo <= r.rpy && r.rpy <= hi)
            .map(|r| r.ncr)
            .max()
            .unwrap_or(0)
    }
}

/// Running median over a window truncated at the series boundaries.
///
/// Returns `ncr[i] - median(ncr[i-r ..= i+r])` for every index; even-length
/// windows use the mean of the two central values.
pub fn median_deviation(ncr: &[u64], range: usize) -> Vec<f64> {
    let n = ncr.len();
    let mut out = Vec::with_capacity(n);
    let mut window: Vec<u64> = Vec::with_capacity(2 * range + 1);
    let insert = |w: &mut Vec<u64>, x: u64| {
        let at = w.partition_point(|&v| v < x);
        w.insert(at, x);
    };
    for &x in ncr.iter().take(range.min(n.saturating_sub(1)) + 1) {
        insert(&mut window, x);
    }
    for (i, &x) in ncr.iter().enumerate() {
        if i > 0 {
            if let Some(&entering) = ncr.get(i + range) {
                insert(&mut window, entering);
            }
            if i > range {
                let leaving = ncr[i - range - 1];
                let at = window.partition_point(|&v| v < leaving);
                window.remove(at);
            }
        }
        let len = window.len();
        let median = if len % 2 == 1 {
            window[len / 2] as f64
        } else {
            (window[len / 2 - 1] as f64 + window[len / 2] as f64) / 2.0
        };
        // `+ 0.0` turns a negative zero into zero.
        out.push(x as f64 - median + 0.0);
    }
    out
}

/// Builds the spectrogram of all variants that carry a publication year.
pub fn compute_spectrogram(dataset: &Dataset, median_range: u32) -> Result<Spectrogram> {
    let mut per_year: BTreeMap<i32, u64> = BTreeMap::new();
    for v in &dataset.variants {
        if let Some(y) = v.rpy() {
            *per_year.entry(y).or_default() += v.ncr;
        }
    }
    let (Some((&first, _)), Some((&last, _))) = (per_year.first_key_value(), per_year.last_key_value())
    else {
        return Err(Error::EmptyDataset);
    };
    let ncr: Vec<u64> = (first..=last)
        .map(|y| per_year.get(&y).copied().unwrap_or(0))
        .collect();
    let dev = median_deviation(&ncr, median_range as usize);
    Ok(Spectrogram {
        rows: (first..=last)
            .zip(ncr)
            .zip(dev)
            .map(|((rpy, ncr), median_dev)| SpectroRow {
                rpy,
                ncr,
                median_dev,
            })
            .collect(),
    })
}

fn shared_window(a: &Spectrogram, b: &Spectrogram) -> Result<(i32, i32)> {
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.window(), b.window()) else {
        return Err(Error::EmptyWindow);
    };
    let (lo, hi) = (alo.max(blo), ahi.min(bhi));
    if lo > hi {
        return Err(Error::EmptyWindow);
    }
    Ok((lo, hi))
}

/// `f = max NCR of the sample / max NCR of the reference` over their shared years.
pub fn scale_factor(sample: &Spectrogram, reference: &Spectrogram) -> Result<f64> {
    let (lo, hi) = shared_window(sample, reference)?;
    let ref_max = reference.max_in(lo, hi);
    if ref_max == 0 {
        return Err(Error::DivisionByZero("reference has no CRs in the shared years"));
    }
    Ok(sample.max_in(lo, hi) as f64 / ref_max as f64)
}

/// Sample NCR divided by the scale factor, for each shared year.
pub fn scale_to_reference(sample: &Spectrogram, reference: &Spectrogram) -> Result<Vec<(i32, f64)>> {
    let f = scale_factor(sample, reference)?;
    if f == 0.0 {
        return Err(Error::DivisionByZero("sample has no CRs in the shared years"));
    }
    let (lo, hi) = shared_window(sample, reference)?;
    Ok(sample
        .rows
        .iter()
        .filter(|r| lo <= r.rpy && r.rpy <= hi)
        .map(|r| (r.rpy, r.ncr as f64 / f))
        .collect())
}

/// Per-year difference of two spectrograms after scaling both to `reference`.
pub fn spectrogram_diff(
    a: &Spectrogram,
    b: &Spectrogram,
    reference: &Spectrogram,
) -> Result<Vec<(i32, f64)>> {
    let scaled_a: HashMap<i32, f64> = scale_to_reference(a, reference)?.into_iter().collect();
    let scaled_b = scale_to_reference(b, reference)?;
    Ok(scaled_b
        .into_iter()
        .filter_map(|(y, vb)| scaled_a.get(&y).map(|va| (y, va - vb + 0.0)))
        .collect())
}

/// The `k` most cited variants of one RPY, by NCR then key.
pub fn top_crs(dataset: &Dataset, rpy: i32, k: usize) -> Vec<&CrVariant> {
    let mut hits: Vec<&CrVariant> = dataset
        .variants
        .iter()
        .filter(|v| v.rpy() == Some(rpy))
        .collect();
    hits.sort_by(|a, b| b.ncr.cmp(&a.ncr).then_with(|| a.key.cmp(&b.key)));
    hits.truncate(k);
    hits
}

/// Share of a variant's NCR among all variants within `±range` years of
/// its RPY (variants without a year are compared with each other).
pub fn n_pct(dataset: &Dataset, variant: &CrVariant, range: u32) -> f64 {
    let r = range as i64;
    let denom: u64 = dataset
        .variants
        .iter()
        .filter(|v| match (v.rpy(), variant.rpy()) {
            (Some(a), Some(b)) => (a as i64 - b as i64).abs() <= r,
            (None, None) => true,
            _ => false,
        })
        .map(|v| v.ncr)
        .sum();
    if denom == 0 {
        0.0
    } else {
        variant.ncr as f64 / denom as f64
    }
}

/// [`n_pct`] for every variant of the dataset, in variant order.
pub fn n_pct_all(dataset: &Dataset, range: u32) -> Vec<f64> {
    let mut per_year: BTreeMap<i32, u64> = BTreeMap::new();
    let mut unknown = 0u64;
    for v in &dataset.variants {
        match v.rpy() {
            Some(y) => *per_year.entry(y).or_default() += v.ncr,
            None => unknown += v.ncr,
        }
    }
    let r = range as i32;
    dataset
        .variants
        .iter()
        .map(|v| {
            let denom = match v.rpy() {
                Some(y) => per_year
                    .range(y.saturating_sub(r)..=y.saturating_add(r))
                    .map(|(_, n)| *n)
                    .sum(),
                None => unknown,
            };
            if denom == 0 {
                0.0
            } else {
                v.ncr as f64 / denom as f64
            }
        })
        .collect()
}
