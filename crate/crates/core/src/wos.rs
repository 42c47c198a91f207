//! Streaming reader for Web of Science tagged plain-text exports.
//!
//! Records are yielded one at a time; at no point does the reader hold more
//! than the record currently being assembled. See `docs/wos-format.md` for
//! the accepted layout.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::record::{aggregate, CitedReference, CitingRecord, CrFields, Dataset, YearRange};
use crate::sampling::{Occurrence, Sampler, SamplingMode};

/// Input formats known to `importFile`. Only WoS is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Wos,
    Scopus,
    Crossref,
}

impl FromStr for FileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "WOS" => Ok(FileFormat::Wos),
            "SCOPUS" => Ok(FileFormat::Scopus),
            "CROSSREF" => Ok(FileFormat::Crossref),
            other => Err(Error::Domain(format!("unknown file type `{other}`"))),
        }
    }
}

impl fmt::Display for FileFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FileFormat::Wos => "WOS",
            FileFormat::Scopus => "SCOPUS",
            FileFormat::Crossref => "CROSSREF",
        })
    }
}

impl FileFormat {
    pub fn ensure_supported(self) -> Result<()> {
        match self {
            FileFormat::Wos => Ok(()),
            other => Err(Error::NotImplemented {
                format: other.to_string(),
            }),
        }
    }
}

/// Parses one `CR` line.
///
/// Tokens are comma-separated: author, optional four-digit year, source,
/// then `V<digits>` (volume), `P<alnum>` (page) and `DOI <id>`. Anything
/// else is appended to the source.
pub fn parse_cr_line(line: &str) -> Result<CitedReference> {
    let raw = line.trim();
    let mut tokens = raw.split(',').map(str::trim).filter(|t| !t.is_empty());

    let mut fields = CrFields {
        raw: raw.to_string(),
        ..CrFields::default()
    };
    fields.author = tokens.next().unwrap_or_default().to_string();

    let mut rest: Vec<&str> = tokens.collect();
    if let Some(first) = rest.first() {
        if first.len() == 4 && first.bytes().all(|b| b.is_ascii_digit()) {
            fields.rpy = first.parse().ok();
            rest.remove(0);
        }
    }

    let mut source_parts: Vec<&str> = Vec::new();
    for (i, tok) in rest.into_iter().enumerate() {
        if let Some(doi) = strip_doi(tok) {
            if fields.doi.is_none() {
                fields.doi = Some(doi.to_string());
                continue;
            }
        } else if i > 0 {
            if let Some(v) = strip_numbered(tok, 'V', |b| b.is_ascii_digit()) {
                if fields.volume.is_none() {
                    fields.volume = Some(v.to_string());
                    continue;
                }
            } else if let Some(p) = strip_numbered(tok, 'P', |b| b.is_ascii_alphanumeric()) {
                if fields.page.is_none() {
                    fields.page = Some(p.to_string());
                    continue;
                }
            }
        }
        source_parts.push(tok);
    }
    fields.source = source_parts.join(", ");
    CitedReference::new(fields)
}

fn strip_doi(tok: &str) -> Option<&str> {
    let head = tok.get(..4)?;
    if head.eq_ignore_ascii_case("DOI ") {
        let id = tok[4..].trim();
        (!id.is_empty()).then_some(id)
    } else {
        None
    }
}

fn strip_numbered(tok: &str, prefix: char, ok: impl Fn(u8) -> bool) -> Option<&str> {
    let rest = tok.strip_prefix(prefix)?;
    let valid = rest.bytes().all(ok) && rest.bytes().any(|b| b.is_ascii_digit());
    valid.then_some(rest)
}

/// Decodes a line as UTF-8, falling back to Latin-1.
fn decode_line(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_string(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    }
}

fn split_tag(line: &str) -> Option<(&str, &str)> {
    let b = line.as_bytes();
    if b.len() < 2 || !b[..2].iter().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
        return None;
    }
    if !b[0].is_ascii_uppercase() {
        return None;
    }
    match b.get(2) {
        None => Some((&line[..2], "")),
        Some(b' ') => Some((&line[..2], line[3..].trim())),
        Some(_) => None,
    }
}

#[derive(Default)]
struct Builder {
    py: Option<i32>,
    doc_type: String,
    crs: Vec<CitedReference>,
}

/// Iterator over the citing records of a WoS export.
pub struct WosReader<R> {
    input: R,
    buf: Vec<u8>,
    line_no: usize,
    current: Option<Builder>,
    last_tag: [u8; 2],
    malformed: usize,
    finished: bool,
}

impl WosReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(BufReader::with_capacity(1 << 16, file)))
    }
}

impl<R: BufRead> WosReader<R> {
    pub fn new(input: R) -> Self {
        Self {
            input,
            buf: Vec::with_capacity(256),
            line_no: 0,
            current: None,
            last_tag: *b"  ",
            malformed: 0,
            finished: false,
        }
    }

    /// Records dropped because the file ended before their `ER` tag.
    pub fn malformed(&self) -> usize {
        self.malformed
    }

    fn abandon_open_record(&mut self) {
        if self.current.take().is_some() {
            self.malformed += 1;
            log::warn!("record without ER before line {} skipped", self.line_no);
        }
    }

    fn next_record(&mut self) -> std::io::Result<Option<CitingRecord>> {
        loop {
            self.buf.clear();
            if self.input.read_until(b'\n', &mut self.buf)? == 0 {
                self.abandon_open_record();
                return Ok(None);
            }
            self.line_no += 1;
            let mut bytes = &self.buf[..];
            while let [rest @ .., b'\n' | b'\r'] = bytes {
                bytes = rest;
            }
            if self.line_no == 1 {
                bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
            }
            let line = decode_line(bytes);

            if line.starts_with("   ") || line.starts_with('\t') {
                if let Some(rec) = self.current.as_mut() {
                    let value = line.trim();
                    if &self.last_tag == b"CR" && !value.is_empty() {
                        if let Ok(cr) = parse_cr_line(value) {
                            rec.crs.push(cr);
                        }
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let Some((tag, value)) = split_tag(&line) else {
                log::debug!("line {}: not a field tag, ignored", self.line_no);
                continue;
            };
            self.last_tag.copy_from_slice(tag.as_bytes());
            match tag {
                "FN" | "VR" if self.current.is_none() => {}
                "EF" => self.abandon_open_record(),
                "ER" => {
                    if let Some(b) = self.current.take() {
                        return Ok(Some(CitingRecord {
                            py: b.py,
                            doc_type: b.doc_type,
                            crs: b.crs,
                        }));
                    }
                }
                _ => {
                    let rec = self.current.get_or_insert_with(Builder::default);
                    match tag {
                        "PY" => rec.py = value.parse().ok(),
                        "DT" => rec.doc_type = value.to_string(),
                        "CR" if !value.is_empty() => {
                            if let Ok(cr) = parse_cr_line(value) {
                                rec.crs.push(cr);
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
    }
}

impl<R: BufRead> Iterator for WosReader<R> {
    type Item = std::io::Result<CitingRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match self.next_record() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}

/// Year filters plus sampling settings for one import.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImportFilter {
    pub rpy_range: Option<YearRange>,
    pub py_range: Option<YearRange>,
    /// Document types to keep (case-insensitive); empty keeps all.
    pub doc_types: Vec<String>,
    /// Sample size; 0 means no limit.
    pub max_cr: u64,
    pub sampling_mode: SamplingMode,
    /// Leading CRs to skip in systematic sampling.
    pub offset: u64,
    pub seed: Option<u64>,
}

impl ImportFilter {
    pub fn accepts_record(&self, rec: &CitingRecord) -> bool {
        self.py_range.is_none_or(|r| r.contains(rec.py))
            && (self.doc_types.is_empty()
                || self
                    .doc_types
                    .iter()
                    .any(|d| d.eq_ignore_ascii_case(&rec.doc_type)))
    }

    pub fn accepts_cr(&self, cr: &CitedReference) -> bool {
        self.rpy_range.is_none_or(|r| r.contains(cr.rpy))
    }

    fn describe(&self) -> String {
        let range = |r: &Option<YearRange>| r.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
        format!(
            "RPY={} PY={} sampling={} maxCR={} offset={} seed={}",
            range(&self.rpy_range),
            range(&self.py_range),
            self.sampling_mode,
            self.max_cr,
            self.offset,
            self.seed.unwrap_or(0)
        )
    }
}

/// Counts reported by [`analyze_file`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FileStats {
    /// Citing records passing the record filters.
    pub n_citing: u64,
    /// CRs of those records passing the RPY filter.
    pub n_cr: u64,
    /// Records skipped for lacking an `ER` tag.
    pub malformed: u64,
}

impl fmt::Display for FileStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "citing={} crs={}", self.n_citing, self.n_cr)
    }
}

/// Counting pass over a reader; retains at most one record.
pub fn analyze_reader<R: BufRead>(reader: R, filter: &ImportFilter) -> std::io::Result<FileStats> {
    let mut parser = WosReader::new(reader);
    let mut stats = FileStats::default();
    for rec in parser.by_ref() {
        let rec = rec?;
        if !filter.accepts_record(&rec) {
            continue;
        }
        stats.n_citing += 1;
        stats.n_cr += rec.crs.iter().filter(|cr| filter.accepts_cr(cr)).count() as u64;
    }
    stats.malformed = parser.malformed() as u64;
    Ok(stats)
}

/// Counts citing records and CRs that pass the filters (sampling fields ignored).
pub fn analyze_file(path: &Path, filter: &ImportFilter) -> Result<FileStats> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    analyze_reader(BufReader::with_capacity(1 << 16, file), filter).map_err(|e| Error::io(path, e))
}

fn sampler_for(filter: &ImportFilter, total: Option<u64>) -> Sampler {
    Sampler {
        mode: filter.sampling_mode,
        n: filter.max_cr,
        offset: if filter.sampling_mode == SamplingMode::Systematic {
            filter.offset
        } else {
            0
        },
        total,
        py_range: filter.py_range,
        seed: filter.seed.unwrap_or(0),
    }
}

/// Streams a reader through the filters and the sampler and aggregates the sample.
///
/// `total` is the filtered population size, required for systematic sampling.
pub fn import_reader<R: BufRead>(
    reader: R,
    filter: &ImportFilter,
    total: Option<u64>,
) -> std::io::Result<Result<Dataset>> {
    let sampler = sampler_for(filter, total);
    let mut collector = match sampler.collector() {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    let mut parser = WosReader::new(reader);
    let mut records_read = 0u64;
    for (idx, rec) in parser.by_ref().enumerate() {
        let rec = rec?;
        if !filter.accepts_record(&rec) || !collector.wants_record(rec.py) {
            continue;
        }
        records_read += 1;
        let py = rec.py;
        for cr in rec.crs {
            if filter.accepts_cr(&cr) {
                collector.offer(Occurrence {
                    cr,
                    py,
                    record: idx as u64,
                });
            }
        }
        if collector.is_saturated() {
            break;
        }
    }
    let cluster_year = collector.cluster_year();
    let sample = match collector.finish() {
        Ok(s) => s,
        Err(e) => return Ok(Err(e)),
    };

    let n_citing = match filter.sampling_mode {
        // Sampled occurrences come from a subset of the records read.
        SamplingMode::Random | SamplingMode::Systematic => {
            let mut recs: Vec<u64> = sample.iter().map(|o| o.record).collect();
            recs.sort_unstable();
            recs.dedup();
            recs.len() as u64
        }
        SamplingMode::None | SamplingMode::Cluster => records_read,
    };
    let mut ds = aggregate(sample.into_iter().map(|o| (o.cr, o.py)));
    ds.n_citing = n_citing;
    ds.rpy_filter = filter.rpy_range;
    ds.py_filter = filter.py_range;
    if let Some(year) = cluster_year {
        ds.log(format!("cluster sample of citing year {year}"));
    }
    if parser.malformed() > 0 {
        ds.log(format!("{} malformed records skipped", parser.malformed()));
    }
    Ok(Ok(ds))
}

/// Imports a WoS file into a [`Dataset`], sampling as configured.
///
/// Systematic sampling performs a counting pass over the file first.
pub fn import_file(path: &Path, filter: &ImportFilter) -> Result<Dataset> {
    let total = if filter.sampling_mode == SamplingMode::Systematic {
        Some(analyze_file(path, filter)?.n_cr)
    } else {
        None
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut ds = import_reader(BufReader::with_capacity(1 << 16, file), filter, total)
        .map_err(|e| Error::io(path, e))??;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    ds.provenance.insert(
        0,
        format!("importFile file={name} type=WOS {}", filter.describe()),
    );
    Ok(ds)
}
