//! File formats: the CRE dataset container and the CSV exports.

mod cre;
mod csv_export;

use std::io::{BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{Error, Result};

pub use cre::{load_cre, parse_cre, read_cre, save_cre, union_cre, write_cre, CreFile, CRE_MAJOR_VERSION};
pub use csv_export::{export_csv_cr, export_csv_graph, write_csv_cr, write_csv_graph};

/// Writes through a temporary sibling file and renames it into place.
pub(crate) fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => Path::new(".").to_path_buf(),
    };
    let tmp = NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut out = BufWriter::new(tmp);
    body(&mut out).map_err(|e| Error::io(path, e))?;
    let tmp = out
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
