//! CRE v1: a line-oriented, tab-separated dataset container.
//!
//! ```text
//! #CRE<TAB>1
//! #PROVENANCE<TAB><entry>          (zero or more)
//! #SETTINGS<TAB>median_range<TAB>2<TAB>n_pct_range<TAB>0
//! #RPY_FILTER<TAB><lo><TAB><hi><TAB><flag>   (empty columns when unset)
//! #PY_FILTER<TAB><lo><TAB><hi><TAB><flag>
//! #SUMMARY<TAB><n_citing><TAB><n_cr_total><TAB><n_variants>
//! #COLUMNS<TAB>KEY<TAB>RAW<TAB>AUTHOR<TAB>RPY<TAB>SOURCE<TAB>VOLUME<TAB>PAGE<TAB>DOI<TAB>NCR<TAB>CLUSTER<TAB>N_PY_YEARS
//! <one row per variant, sorted by rpy then key>
//! #END<TAB><sha256 of every preceding byte, lower-case hex>
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::write_atomic;
use crate::error::{Error, Result};
use crate::record::{CitedReference, CrFields, CrVariant, Dataset, YearRange};
use crate::settings::Settings;

pub const CRE_MAJOR_VERSION: &str = "1";

const COLUMNS: [&str; 11] = [
    "KEY",
    "RAW",
    "AUTHOR",
    "RPY",
    "SOURCE",
    "VOLUME",
    "PAGE",
    "DOI",
    "NCR",
    "CLUSTER",
    "N_PY_YEARS",
];

/// Contents of a CRE file.
#[derive(Debug, Clone, PartialEq)]
pub struct CreFile {
    pub version: String,
    pub settings: Settings,
    pub dataset: Dataset,
}

struct HashingWriter<'a> {
    inner: &'a mut dyn Write,
    hasher: Sha256,
}

impl Write for HashingWriter<'_> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(format!("bad escape sequence \\{}", other.unwrap_or(' '))),
        }
    }
    Ok(out)
}

fn opt(s: &Option<String>) -> String {
    s.as_deref().map(escape).unwrap_or_default()
}

fn range_cols(r: &Option<YearRange>) -> String {
    match r {
        Some(r) => format!("{}\t{}\t{}", r.lo, r.hi, r.include_unknown),
        None => "\t\t".into(),
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Serializes a dataset in canonical order.
pub fn write_cre(dataset: &Dataset, settings: &Settings, out: &mut dyn Write) -> io::Result<()> {
    let mut ds = dataset.clone();
    ds.canonicalize();

    let mut w = HashingWriter {
        inner: out,
        hasher: Sha256::new(),
    };
    writeln!(w, "#CRE\t{CRE_MAJOR_VERSION}")?;
    for entry in &ds.provenance {
        writeln!(w, "#PROVENANCE\t{}", escape(entry))?;
    }
    writeln!(
        w,
        "#SETTINGS\tmedian_range\t{}\tn_pct_range\t{}",
        settings.median_range, settings.n_pct_range
    )?;
    writeln!(w, "#RPY_FILTER\t{}", range_cols(&ds.rpy_filter))?;
    writeln!(w, "#PY_FILTER\t{}", range_cols(&ds.py_filter))?;
    writeln!(w, "#SUMMARY\t{}\t{}\t{}", ds.n_citing, ds.n_cr_total, ds.len())?;
    writeln!(w, "#COLUMNS\t{}", COLUMNS.join("\t"))?;
    for v in &ds.variants {
        let r = &v.reference;
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            escape(&v.key),
            escape(&r.raw),
            escape(&r.author),
            r.rpy.map(|y| y.to_string()).unwrap_or_default(),
            escape(&r.source),
            opt(&r.volume),
            opt(&r.page),
            opt(&r.doi),
            v.ncr,
            v.cluster_id.map(|c| c.to_string()).unwrap_or_default(),
            v.n_py_years,
        )?;
    }
    let digest = hex(&w.hasher.finalize_reset());
    writeln!(w.inner, "#END\t{digest}")?;
    w.flush()
}

/// Saves `dataset` atomically to `path`.
pub fn save_cre(dataset: &Dataset, settings: &Settings, path: &Path) -> Result<()> {
    write_atomic(path, |w| write_cre(dataset, settings, w))
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Split<'a, char>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.iter.next().map(|(i, l)| (i + 1, l))
    }
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::CreFormat {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| format_err(line, format!("invalid {what} `{s}`")))
}

fn parse_range(line: usize, cols: &[&str]) -> Result<Option<YearRange>> {
    match cols {
        ["", "", ""] => Ok(None),
        [lo, hi, flag] => {
            let lo = parse_num(line, "year", lo)?;
            let hi = parse_num(line, "year", hi)?;
            let flag = parse_num(line, "flag", flag)?;
            YearRange::new(lo, hi, flag)
                .map(Some)
                .map_err(|e| format_err(line, e.to_string()))
        }
        _ => Err(format_err(line, "filter needs three columns")),
    }
}

fn parse_opt(line: usize, s: &str) -> Result<Option<String>> {
    if s.is_empty() {
        Ok(None)
    } else {
        unescape(s).map(Some).map_err(|m| format_err(line, m))
    }
}

fn parse_row(line: usize, text: &str) -> Result<CrVariant> {
    let cols: Vec<&str> = text.split('\t').collect();
    if cols.len() != COLUMNS.len() {
        return Err(format_err(
            line,
            format!("expected {} columns, found {}", COLUMNS.len(), cols.len()),
        ));
    }
    let un = |s: &str| unescape(s).map_err(|m| format_err(line, m));
    let fields = CrFields {
        raw: un(cols[1])?,
        author: un(cols[2])?,
        rpy: if cols[3].is_empty() {
            None
        } else {
            Some(parse_num(line, "year", cols[3])?)
        },
        source: un(cols[4])?,
        volume: parse_opt(line, cols[5])?,
        page: parse_opt(line, cols[6])?,
        doi: parse_opt(line, cols[7])?,
    };
    let reference = CitedReference::new(fields).map_err(|e| format_err(line, e.to_string()))?;
    Ok(CrVariant {
        key: un(cols[0])?,
        reference,
        ncr: parse_num(line, "NCR", cols[8])?,
        cluster_id: if cols[9].is_empty() {
            None
        } else {
            Some(parse_num(line, "cluster id", cols[9])?)
        },
        n_py_years: parse_num(line, "year count", cols[10])?,
    })
}

/// Parses CRE bytes, verifying the checksum first.
pub fn parse_cre(bytes: &[u8]) -> Result<CreFile> {
    let trimmed = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let split = trimmed.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let (body, last) = trimmed.split_at(split);
    let n_lines = body.iter().filter(|&&b| b == b'\n').count() + 1;
    let Some(found) = last.strip_prefix(b"#END\t") else {
        return Err(format_err(n_lines, "missing #END line"));
    };
    let expected = hex(&Sha256::digest(body));
    if found != expected.as_bytes() {
        return Err(Error::ChecksumMismatch {
            expected,
            found: String::from_utf8_lossy(found).into_owned(),
        });
    }
    let body = std::str::from_utf8(body).map_err(|_| format_err(0, "body is not UTF-8"))?;
    let body = body.strip_suffix('\n').unwrap_or(body);
    let mut lines = Lines {
        iter: body.split('\n').enumerate(),
    };

    let version = match lines.next() {
        Some((_, l)) if l.starts_with("#CRE\t") => l["#CRE\t".len()..].to_string(),
        _ => return Err(format_err(1, "not a CRE file")),
    };
    if version.split('.').next() != Some(CRE_MAJOR_VERSION) {
        return Err(Error::VersionMismatch { found: version });
    }

    let mut ds = Dataset::default();
    let mut settings = Settings::default();
    let mut declared: Option<usize> = None;
    let mut in_rows = false;
    while let Some((no, line)) = lines.next() {
        if in_rows {
            ds.variants.push(parse_row(no, line)?);
            continue;
        }
        let mut cols = line.split('\t');
        let tag = cols.next().unwrap_or_default();
        let cols: Vec<&str> = cols.collect();
        match tag {
            "#PROVENANCE" => ds
                .provenance
                .push(unescape(&cols.join("\t")).map_err(|m| format_err(no, m))?),
            "#SETTINGS" => {
                for pair in cols.chunks(2) {
                    match pair {
                        ["median_range", v] => settings.median_range = parse_num(no, "setting", v)?,
                        ["n_pct_range", v] => settings.n_pct_range = parse_num(no, "setting", v)?,
                        _ => return Err(format_err(no, "unknown setting")),
                    }
                }
            }
            "#RPY_FILTER" => ds.rpy_filter = parse_range(no, &cols)?,
            "#PY_FILTER" => ds.py_filter = parse_range(no, &cols)?,
            "#SUMMARY" => {
                let [citing, total, n] = cols[..] else {
                    return Err(format_err(no, "summary needs three columns"));
                };
                ds.n_citing = parse_num(no, "count", citing)?;
                ds.n_cr_total = parse_num(no, "count", total)?;
                declared = Some(parse_num(no, "count", n)?);
            }
            "#COLUMNS" => {
                if cols != COLUMNS {
                    return Err(format_err(no, "unexpected column layout"));
                }
                in_rows = true;
            }
            other => return Err(format_err(no, format!("unexpected line `{other}`"))),
        }
    }
    match declared {
        Some(n) if n == ds.len() => {}
        Some(n) => {
            return Err(format_err(
                0,
                format!("summary declares {n} variants, file has {}", ds.len()),
            ))
        }
        None => return Err(format_err(0, "missing #SUMMARY line")),
    }
    Ok(CreFile {
        version,
        settings,
        dataset: ds,
    })
}

pub fn read_cre(path: &Path) -> Result<CreFile> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_cre(&bytes)
}

pub fn load_cre(path: &Path) -> Result<Dataset> {
    read_cre(path).map(|f| f.dataset)
}

/// Sums NCR over identical keys across CRE files.
///
/// Cluster ids are cleared, `n_py_years` takes the maximum, citing and CR
/// totals are summed. The result does not depend on the order of `paths`.
pub fn union_cre(paths: &[PathBuf]) -> Result<Dataset> {
    let loaded: Vec<Result<Dataset>> = paths.par_iter().map(|p| load_cre(p)).collect();

    let mut table: BTreeMap<String, CrVariant> = BTreeMap::new();
    let mut out = Dataset::default();
    let mut filters: Option<(Option<YearRange>, Option<YearRange>)> = None;
    let mut mixed_filters = false;
    for ds in loaded {
        let ds = ds?;
        out.n_citing += ds.n_citing;
        out.n_cr_total += ds.n_cr_total;
        match filters {
            None => filters = Some((ds.rpy_filter, ds.py_filter)),
            Some(f) if f != (ds.rpy_filter, ds.py_filter) => mixed_filters = true,
            _ => {}
        }
        for v in ds.variants {
            match table.get_mut(&v.key) {
                Some(acc) => {
                    acc.ncr += v.ncr;
                    acc.n_py_years = acc.n_py_years.max(v.n_py_years);
                    if v.reference.raw < acc.reference.raw {
                        acc.reference = v.reference;
                    }
                }
                None => {
                    table.insert(
                        v.key.clone(),
                        CrVariant {
                            cluster_id: None,
                            ..v
                        },
                    );
                }
            }
        }
    }
    if let (Some((rpy, py)), false) = (filters, mixed_filters) {
        out.rpy_filter = rpy;
        out.py_filter = py;
    }
    out.variants = table.into_values().collect();
    out.canonicalize();
    out.log(format!("union of {} CRE files", paths.len()));
    Ok(out)
}
