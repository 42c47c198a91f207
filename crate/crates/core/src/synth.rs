//! Seeded synthetic WoS corpora for tests, examples and benchmarks.
//!
//! Works are drawn from a Zipf-weighted pool. The most-cited works sit on
//! planted peak years, and some citations use misspelled variants that stay
//! compatible with the original (same year, volume, page and DOI).

use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sampling::SampleRng;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_records: usize,
    /// Inclusive bounds on the number of CR lines per record.
    pub crs_per_record: (usize, usize),
    pub py_range: (i32, i32),
    pub rpy_range: (i32, i32),
    pub n_works: usize,
    /// Number of top-ranked works placed on distinct peak years.
    pub n_peaks: usize,
    pub zipf_exponent: f64,
    /// Share of citations that use a misspelled variant.
    pub variant_rate: f64,
    pub doi_rate: f64,
    /// Share of works written without a year.
    pub yearless_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_records: 200,
            crs_per_record: (25, 25),
            py_range: (1980, 2014),
            rpy_range: (1970, 2014),
            n_works: 400,
            n_peaks: 4,
            zipf_exponent: 1.0,
            variant_rate: 0.1,
            doi_rate: 0.3,
            yearless_rate: 0.0,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("synthetic corpus: {m}")));
        if self.crs_per_record.0 > self.crs_per_record.1 {
            return bad("crs_per_record min exceeds max");
        }
        if self.py_range.0 > self.py_range.1 || self.rpy_range.0 > self.rpy_range.1 {
            return bad("empty year range");
        }
        if self.n_works == 0 && self.crs_per_record.1 > 0 {
            return bad("no works to cite");
        }
        for r in [self.variant_rate, self.doi_rate, self.yearless_rate] {
            if !(0.0..=1.0).contains(&r) {
                return bad("rates must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

/// A cited work and the spellings it can appear under. `lines[0]` is the
/// canonical form.
#[derive(Debug, Clone)]
pub struct Work {
    pub rpy: Option<i32>,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthRecord {
    pub py: i32,
    pub doc_type: &'static str,
    pub crs: Vec<String>,
}

const SYLLABLES: &[&str] = &[
    "BA", "KER", "LIN", "MO", "RA", "SEN", "TOR", "VAL", "WEN", "ZHU", "HAR", "DI", "NO", "PE",
    "SCH", "MIT", "GAR", "LO", "FU", "KI",
];
const WORDS: &[&str] = &[
    "CLIMATE", "DYNAMICS", "JOURNAL", "GEOPHYSICAL", "RESEARCH", "LETTERS", "NATURE", "SCIENCE",
    "ATMOSPHERIC", "OCEAN", "QUATERNARY", "REVIEWS", "CHANGE", "PALEOCLIMATOLOGY", "HYDROLOGY",
    "ECOLOGY", "GLOBAL", "ENVIRONMENTAL", "METEOROLOGY", "TELLUS",
];

fn pick<'a>(rng: &mut SampleRng, items: &[&'a str]) -> &'a str {
    items[rng.below(items.len() as u64) as usize]
}

fn letter(rng: &mut SampleRng) -> char {
    (b'A' + rng.below(26) as u8) as char
}

/// One letter edit inside the source part, so the variant keeps its year,
/// volume, page and DOI.
fn misspell(rng: &mut SampleRng, source: &str) -> String {
    let mut chars: Vec<char> = source.chars().collect();
    let letters: Vec<usize> = (0..chars.len())
        .filter(|&i| chars[i].is_ascii_alphabetic())
        .collect();
    let at = letters[rng.below(letters.len() as u64) as usize];
    match rng.below(3) {
        0 => {
            let mut c = letter(rng);
            while c == chars[at] {
                c = letter(rng);
            }
            chars[at] = c;
        }
        1 if letters.len() > 3 => {
            chars.remove(at);
        }
        _ => chars.insert(at, letter(rng)),
    }
    chars.into_iter().collect()
}

fn make_work(rng: &mut SampleRng, cfg: &SynthConfig, rank: usize, peak_years: &[i32]) -> Work {
    let mut author = String::new();
    for _ in 0..1 + rng.below(2) {
        author.push_str(pick(rng, SYLLABLES));
    }
    author.push(' ');
    for _ in 0..1 + rng.below(2) {
        author.push(letter(rng));
    }
    let mut source = pick(rng, WORDS).to_string();
    for _ in 0..rng.below(3) {
        source.push(' ');
        source.push_str(pick(rng, WORDS));
    }
    let rpy = if rank < peak_years.len() {
        Some(peak_years[rank])
    } else if rng.unit() < cfg.yearless_rate {
        None
    } else {
        // Linear skew toward recent years.
        let (lo, hi) = cfg.rpy_range;
        let span = (hi - lo + 1) as u64;
        let a = rng.below(span);
        let b = rng.below(span);
        Some(lo + a.max(b) as i32)
    };
    let tail = if rng.below(5) == 0 {
        String::new()
    } else {
        let mut t = format!(", V{}, P{}", 1 + rng.below(120), 1 + rng.below(900));
        if rng.unit() < cfg.doi_rate {
            t.push_str(&format!(", DOI 10.{}/W{rank}", 1000 + rng.below(9000)));
        }
        t
    };
    let line = |src: &str| match rpy {
        Some(y) => format!("{author}, {y}, {src}{tail}"),
        None => format!("{author}, {src}{tail}"),
    };
    let mut lines = vec![line(&source)];
    for _ in 0..rng.below(3) {
        let v = line(&misspell(rng, &source));
        if !lines.contains(&v) {
            lines.push(v);
        }
    }
    Work { rpy, lines }
}

/// A lazily generated corpus.
pub struct SynthCorpus {
    cfg: SynthConfig,
    pub works: Vec<Work>,
    cumulative: Vec<f64>,
}

impl SynthCorpus {
    pub fn new(cfg: SynthConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = SampleRng::new(cfg.seed ^ 0x5157_4f52_4b53);
        let (lo, hi) = cfg.rpy_range;
        let mut peak_years = Vec::new();
        let n_peaks = cfg.n_peaks.min((hi - lo + 1) as usize).min(cfg.n_works);
        while peak_years.len() < n_peaks {
            let y = lo + rng.below((hi - lo + 1) as u64) as i32;
            if !peak_years.contains(&y) {
                peak_years.push(y);
            }
        }
        let works: Vec<Work> = (0..cfg.n_works)
            .map(|rank| make_work(&mut rng, &cfg, rank, &peak_years))
            .collect();
        let mut acc = 0.0;
        let cumulative = (0..cfg.n_works)
            .map(|r| {
                acc += 1.0 / ((r + 1) as f64).powf(cfg.zipf_exponent);
                acc
            })
            .collect();
        Ok(Self {
            cfg,
            works,
            cumulative,
        })
    }

    pub fn config(&self) -> &SynthConfig {
        &self.cfg
    }

    /// Planted peak years, highest-ranked work first.
    pub fn peak_years(&self) -> Vec<i32> {
        self.works[..self.cfg.n_peaks.min(self.works.len())]
            .iter()
            .filter_map(|w| w.rpy)
            .collect()
    }

    fn draw_work(&self, rng: &mut SampleRng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let x = rng.unit() * total;
        self.cumulative.partition_point(|&c| c <= x).min(self.works.len() - 1)
    }

    pub fn records(&self) -> Records<'_> {
        Records {
            corpus: self,
            rng: SampleRng::new(self.cfg.seed),
            left: self.cfg.n_records,
        }
    }

    /// Streams the corpus in WoS tagged format and returns
    /// `(records, cr_lines)` written.
    pub fn write_wos(&self, out: &mut dyn Write) -> io::Result<(u64, u64)> {
        writeln!(out, "FN Clarivate Analytics Web of Science")?;
        writeln!(out, "VR 1.0")?;
        let (mut n, mut crs) = (0, 0);
        for (i, rec) in self.records().enumerate() {
            writeln!(out, "PT J")?;
            writeln!(out, "AU Author{i}")?;
            writeln!(out, "TI Synthetic record {i}")?;
            for (j, cr) in rec.crs.iter().enumerate() {
                let tag = if j == 0 { "CR" } else { "  " };
                writeln!(out, "{tag} {cr}")?;
            }
            writeln!(out, "NR {}", rec.crs.len())?;
            writeln!(out, "PY {}", rec.py)?;
            writeln!(out, "DT {}", rec.doc_type)?;
            writeln!(out, "ER")?;
            writeln!(out)?;
            n += 1;
            crs += rec.crs.len() as u64;
        }
        writeln!(out, "EF")?;
        Ok((n, crs))
    }

    pub fn write_wos_file(&self, path: &Path) -> Result<(u64, u64)> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = io::BufWriter::new(file);
        let counts = self.write_wos(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(counts)
    }
}

pub struct Records<'a> {
    corpus: &'a SynthCorpus,
    rng: SampleRng,
    left: usize,
}

impl Iterator for Records<'_> {
    type Item = SynthRecord;

    fn next(&mut self) -> Option<SynthRecord> {
        if self.left == 0 {
            return None;
        }
        self.left -= 1;
        let cfg = &self.corpus.cfg;
        let rng = &mut self.rng;
        let (lo, hi) = cfg.py_range;
        let span = (hi - lo + 1) as u64;
        let py = lo + rng.below(span).max(rng.below(span)) as i32;
        let doc_type = if rng.below(10) == 0 { "Review" } else { "Article" };
        let (cmin, cmax) = cfg.crs_per_record;
        let n = cmin + rng.below((cmax - cmin + 1) as u64) as usize;
        let crs = (0..n)
            .map(|_| {
                let w = &self.corpus.works[self.corpus.draw_work(rng)];
                let v = if w.lines.len() > 1 && rng.unit() < cfg.variant_rate {
                    1 + rng.below(w.lines.len() as u64 - 1) as usize
                } else {
                    0
                };
                w.lines[v].clone()
            })
            .collect();
        Some(SynthRecord { py, doc_type, crs })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.left, Some(self.left))
    }
}

impl ExactSizeIterator for Records<'_> {}
