//! Cluster sample: all CRs of the citing records from one publication year.

use rpys::script::run_script_file;
use rpys::synth::{SynthConfig, SynthCorpus};

const SCRIPT: &str = r#"
set(n_pct_range: 0, median_range: 2)
importFile(file: "savedrecs.txt", type: "WOS", RPY: [1970, 2014, false], PY: [2011, 2011, false])
cluster(threshold: 0.75, volume: true, page: true, DOI: false)
merge()
removeCR(N_CR: [0, 15])
info()
saveFile(file: "savedrecs_cs_2011.cre")
exportFile(file: "savedrecs_cs_2011_CR.csv", type: "CSV_CR")
exportFile(file: "savedrecs_cs_2011_GRAPH.csv", type: "CSV_GRAPH")

// A randomly drawn citing year instead of a fixed one.
importFile(file: "savedrecs.txt", PY: [1980, 2014, false], sampling: "CLUSTER")
info()
"#;

fn main() -> rpys::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    SynthCorpus::new(SynthConfig {
        n_records: 2000,
        ..SynthConfig::default()
    })?
    .write_wos_file(&dir.path().join("savedrecs.txt"))?;
    let script = dir.path().join("cluster.crs");
    std::fs::write(&script, SCRIPT).expect("write script");

    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let env = run_script_file(&script, seed, None, true)?;
    for line in &env.dataset.expect("dataset").provenance {
        println!("{line}");
    }
    Ok(())
}
