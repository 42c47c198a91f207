//! Scales two sample spectrograms to the population and prints their
//! per-year difference.

use rpys::sampling::SamplingMode;
use rpys::spectro::{compute_spectrogram, scale_factor, spectrogram_diff};
use rpys::synth::{SynthConfig, SynthCorpus};
use rpys::wos::{import_file, ImportFilter};

fn main() -> rpys::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("savedrecs.txt");
    SynthCorpus::new(SynthConfig {
        n_records: 4000,
        rpy_range: (1970, 2010),
        ..SynthConfig::default()
    })?
    .write_wos_file(&path)?;

    let population = compute_spectrogram(&import_file(&path, &ImportFilter::default())?, 2)?;
    let sample = |mode, n| -> rpys::Result<_> {
        let ds = import_file(
            &path,
            &ImportFilter {
                sampling_mode: mode,
                max_cr: n,
                seed: Some(1),
                ..ImportFilter::default()
            },
        )?;
        compute_spectrogram(&ds, 2)
    };
    let random = sample(SamplingMode::Random, 5000)?;
    let systematic = sample(SamplingMode::Systematic, 25_000)?;
    println!(
        "f(random) = {:.4}, f(systematic) = {:.4}",
        scale_factor(&random, &population)?,
        scale_factor(&systematic, &population)?
    );
    for (year, d) in spectrogram_diff(&random, &systematic, &population)? {
        println!("{year}  {d:>9.2}");
    }
    Ok(())
}
