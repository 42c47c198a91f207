//! Writes a synthetic WoS export, handy for trying the `rpys` binary.
//!
//! ```text
//! cargo run --example make_fixture -- savedrecs.txt 2000
//! cargo run --bin rpys -- analyze savedrecs.txt
//! ```

use std::path::PathBuf;

use rpys::synth::{SynthConfig, SynthCorpus};

fn main() -> rpys::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| "savedrecs.txt".into()));
    let n_records = args.next().and_then(|n| n.parse().ok()).unwrap_or(200);
    let corpus = SynthCorpus::new(SynthConfig {
        n_records,
        ..SynthConfig::default()
    })?;
    let (records, crs) = corpus.write_wos_file(&path)?;
    println!("wrote {} ({records} records, {crs} CRs)", path.display());
    println!("planted peak years: {:?}", corpus.peak_years());
    Ok(())
}
