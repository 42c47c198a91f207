//! Full-population analysis driven by a script: import, cluster, merge,
//! remove rare variants, save CRE and both CSV exports.

use rpys::script::run_script_file;
use rpys::synth::{SynthConfig, SynthCorpus};

const SCRIPT: &str = r#"
set(n_pct_range: 0, median_range: 2)
importFile(file: "savedrecs.txt", type: "WOS", RPY: [1970, 2014, false], PY: [1980, 2014, false], maxCR: 0)
info()
cluster(threshold: 0.75, volume: true, page: true, DOI: false)
merge()
removeCR(N_CR: [0, 99])
saveFile(file: "savedrecs.cre")
exportFile(file: "savedrecs_CR.csv", type: "CSV_CR")
exportFile(file: "savedrecs_GRAPH.csv", type: "CSV_GRAPH")
"#;

fn main() -> rpys::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    SynthCorpus::new(SynthConfig {
        n_records: 1000,
        ..SynthConfig::default()
    })?
    .write_wos_file(&dir.path().join("savedrecs.txt"))?;
    let script = dir.path().join("population.crs");
    std::fs::write(&script, SCRIPT).expect("write script");

    let env = run_script_file(&script, 0, None, true)?;
    let ds = env.dataset.expect("dataset");
    println!("{} variants survive removeCR", ds.len());
    print!(
        "{}",
        std::fs::read_to_string(dir.path().join("savedrecs_CR.csv")).expect("csv")
    );
    Ok(())
}
