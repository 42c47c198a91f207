//! Systematic samples saved per cycle with `forEach`, unioned afterwards and
//! re-clustered. Clustering batches separately can pick different
//! representatives than clustering the whole file at once.

use std::path::PathBuf;

use rpys::clustering::{cluster_crs, merge_clusters, ClusterConfig};
use rpys::io::union_cre;
use rpys::script::run_script_file;
use rpys::synth::{SynthConfig, SynthCorpus};
use rpys::wos::{analyze_file, import_file, ImportFilter};

const SCRIPT: &str = r#"
forEach(count: 4, dir: "batches", {index ->
    importFile(file: "savedrecs.txt", sampling: "SYSTEMATIC", maxCR: 2500, offset: index)
    cluster(threshold: 0.75, volume: true, page: true)
    merge()
})
"#;

fn main() -> rpys::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let data = dir.path().join("savedrecs.txt");
    SynthCorpus::new(SynthConfig {
        n_records: 400,
        ..SynthConfig::default()
    })?
    .write_wos_file(&data)?;
    println!("{}", analyze_file(&data, &ImportFilter::default())?);

    let script = dir.path().join("batches.crs");
    std::fs::write(&script, SCRIPT).expect("write script");
    run_script_file(&script, 0, None, false)?;

    let files: Vec<PathBuf> = (0..4)
        .map(|i| dir.path().join(format!("batches/cycle_{i:05}.cre")))
        .collect();
    let config = ClusterConfig::new(0.75, true, true, false)?;
    let union = union_cre(&files)?;
    let batched = merge_clusters(&cluster_crs(&union, &config));
    let whole = merge_clusters(&cluster_crs(&import_file(&data, &ImportFilter::default())?, &config));

    println!("union of 4 batches: {} variants, {} CRs", union.len(), union.total_ncr());
    println!("re-clustered:       {} variants, {} CRs", batched.len(), batched.total_ncr());
    println!("whole file:         {} variants, {} CRs", whole.len(), whole.total_ncr());
    let differing = batched
        .variants
        .iter()
        .filter(|v| whole.get(&v.key).map(|w| w.ncr) != Some(v.ncr))
        .count();
    println!("{differing} merged variants differ from the whole-file result");
    Ok(())
}
