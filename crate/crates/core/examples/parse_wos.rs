//! Streams a WoS export record by record and parses its CR lines.
//!
//! Pass a `savedrecs.txt` path, or run without arguments to use a small
//! synthetic file.

use std::path::PathBuf;

use rpys::synth::{SynthConfig, SynthCorpus};
use rpys::wos::{analyze_file, parse_cr_line, ImportFilter, WosReader};
use rpys::YearRange;

fn main() -> rpys::Result<()> {
    let scratch = tempfile::tempdir().expect("temp dir");
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = scratch.path().join("savedrecs.txt");
            SynthCorpus::new(SynthConfig::default())?.write_wos_file(&p)?;
            p
        }
    };

    let cr = parse_cr_line("STUIVER M, 1993, RADIOCARBON, V35, P215")?;
    println!(
        "author={} rpy={:?} source={} volume={:?} page={:?}",
        cr.author, cr.rpy, cr.source, cr.volume, cr.page
    );

    let mut reader = WosReader::open(&path)?;
    for rec in reader.by_ref().take(3) {
        let rec = rec.map_err(|e| rpys::Error::io(&path, e))?;
        println!("PY {:?} {} with {} CRs", rec.py, rec.doc_type, rec.crs.len());
        for cr in rec.crs.iter().take(2) {
            println!("    {}", cr.raw);
        }
    }

    let all = analyze_file(&path, &ImportFilter::default())?;
    let recent = analyze_file(
        &path,
        &ImportFilter {
            rpy_range: Some(YearRange::new(1970, 2014, false)?),
            py_range: Some(YearRange::new(2000, 2014, false)?),
            ..ImportFilter::default()
        },
    )?;
    println!("all: {all}");
    println!("RPY 1970-2014, PY 2000-2014: {recent}");
    Ok(())
}
