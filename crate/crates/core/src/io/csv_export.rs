use std::collections::HashMap;
use std::io::{self, Write};
use std::path::Path;

use csv::{QuoteStyle, Terminator, WriterBuilder};

use super::write_atomic;
use crate::error::{Error, Result};
use crate::record::Dataset;
use crate::spectro::{n_pct_all, Spectrogram};

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    WriterBuilder::new()
        .quote_style(QuoteStyle::Necessary)
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// `ID,CR,RPY,N_CR,PCT_RPY,CID,CID_SIZE`, rows sorted by (rpy, -ncr, key).
pub fn write_csv_cr(dataset: &Dataset, n_pct_range: u32, out: &mut dyn Write) -> io::Result<()> {
    let pct = n_pct_all(dataset, n_pct_range);
    let mut cluster_sizes: HashMap<usize, usize> = HashMap::new();
    for v in &dataset.variants {
        if let Some(id) = v.cluster_id {
            *cluster_sizes.entry(id).or_default() += 1;
        }
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.sort_by(|&a, &b| {
        let (va, vb) = (&dataset.variants[a], &dataset.variants[b]);
        va.rpy()
            .cmp(&vb.rpy())
            .then(vb.ncr.cmp(&va.ncr))
            .then_with(|| va.key.cmp(&vb.key))
    });

    let mut w = csv_writer(out);
    w.write_record(["ID", "CR", "RPY", "N_CR", "PCT_RPY", "CID", "CID_SIZE"])
        .map_err(csv_io)?;
    for (row, &i) in order.iter().enumerate() {
        let v = &dataset.variants[i];
        let size = v
            .cluster_id
            .and_then(|id| cluster_sizes.get(&id).copied())
            .unwrap_or(1);
        w.write_record([
            (row + 1).to_string(),
            v.key.clone(),
            v.rpy().map(|y| y.to_string()).unwrap_or_default(),
            v.ncr.to_string(),
            pct[i].to_string(),
            v.cluster_id.map(|c| c.to_string()).unwrap_or_default(),
            size.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

/// `RPY,N_CR,MEDIAN_DEV`, one row per year including gap years.
pub fn write_csv_graph(spectrogram: &Spectrogram, out: &mut dyn Write) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["RPY", "N_CR", "MEDIAN_DEV"]).map_err(csv_io)?;
    for r in &spectrogram.rows {
        w.write_record([r.rpy.to_string(), r.ncr.to_string(), r.median_dev.to_string()])
            .map_err(csv_io)?;
    }
    w.flush()
}

pub fn export_csv_cr(dataset: &Dataset, path: &Path, n_pct_range: u32) -> Result<()> {
    write_atomic(path, |w| write_csv_cr(dataset, n_pct_range, w))
}

/// Fails with [`Error::EmptyDataset`] before touching the file system when
/// the spectrogram has no rows.
pub fn export_csv_graph(spectrogram: &Spectrogram, path: &Path) -> Result<()> {
    if spectrogram.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    write_atomic(path, |w| write_csv_graph(spectrogram, w))
}
