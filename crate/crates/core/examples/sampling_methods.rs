//! Random, systematic and cluster samples of the same file.

use rpys::sampling::SamplingMode;
use rpys::synth::{SynthConfig, SynthCorpus};
use rpys::wos::{import_file, ImportFilter};
use rpys::YearRange;

fn main() -> rpys::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("savedrecs.txt");
    let (_, total) = SynthCorpus::new(SynthConfig {
        n_records: 2000,
        ..SynthConfig::default()
    })?
    .write_wos_file(&path)?;
    println!("population: {total} CRs");

    let base = ImportFilter {
        max_cr: 5000,
        seed: Some(42),
        ..ImportFilter::default()
    };
    for mode in [SamplingMode::Random, SamplingMode::Systematic] {
        let ds = import_file(&path, &ImportFilter { sampling_mode: mode, ..base.clone() })?;
        println!(
            "{mode:<10} {} CRs from {} citing records, {} variants",
            ds.total_ncr(),
            ds.n_citing,
            ds.len()
        );
    }

    // Systematic samples at offsets 0..step are disjoint and cover the file.
    let step = total / 5000;
    let mut covered = 0;
    for offset in 0..step {
        let ds = import_file(
            &path,
            &ImportFilter {
                sampling_mode: SamplingMode::Systematic,
                offset,
                ..base.clone()
            },
        )?;
        covered += ds.total_ncr();
    }
    println!("{step} systematic offsets cover {covered} of {total} CRs");

    let ds = import_file(
        &path,
        &ImportFilter {
            sampling_mode: SamplingMode::Cluster,
            py_range: Some(YearRange::new(1980, 2014, false)?),
            ..base
        },
    )?;
    println!("cluster: {} ({} CRs)", ds.provenance.last().unwrap(), ds.total_ncr());
    Ok(())
}
