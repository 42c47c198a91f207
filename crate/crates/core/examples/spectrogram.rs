//! Population spectrogram with five-year median deviation, and the top CRs
//! under its highest peak.

use rpys::clustering::{cluster_crs, merge_clusters, ClusterConfig};
use rpys::io::write_csv_graph;
use rpys::spectro::{compute_spectrogram, top_crs};
use rpys::synth::{SynthConfig, SynthCorpus};
use rpys::wos::{import_file, ImportFilter};

fn main() -> rpys::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("savedrecs.txt");
    let corpus = SynthCorpus::new(SynthConfig {
        n_records: 1000,
        rpy_range: (1970, 2010),
        ..SynthConfig::default()
    })?;
    corpus.write_wos_file(&path)?;

    let ds = import_file(&path, &ImportFilter::default())?;
    let ds = merge_clusters(&cluster_crs(&ds, &ClusterConfig::new(0.75, true, true, false)?));
    let graph = compute_spectrogram(&ds, 2)?;

    let mut csv = Vec::new();
    write_csv_graph(&graph, &mut csv).expect("in-memory write");
    print!("{}", String::from_utf8_lossy(&csv));

    let peak = graph
        .rows
        .iter()
        .max_by(|a, b| a.median_dev.total_cmp(&b.median_dev))
        .expect("non-empty");
    println!("\nlargest peak: {} (median deviation {})", peak.rpy, peak.median_dev);
    for v in top_crs(&ds, peak.rpy, 3) {
        println!("  {:>5}  {}", v.ncr, v.key);
    }
    println!("planted peak years: {:?}", corpus.peak_years());
    Ok(())
}
