//! Ten random samples in a `forEachUnion` loop, merged into one dataset and
//! compared with the population spectrogram.

use rpys::io::load_cre;
use rpys::script::run_script_file;
use rpys::spectro::{compute_spectrogram, scale_factor};
use rpys::synth::{SynthConfig, SynthCorpus};
use rpys::wos::{import_file, ImportFilter};

const SCRIPT: &str = r#"
use("Loop.crs").with {
    forEachUnion(count: 10, dir: "cycles", {index ->
        set(n_pct_range: 0, median_range: 2)
        importFile(file: "savedrecs.txt", type: "WOS", RPY: [1970, 2014, false],
                   PY: [1980, 2014, false], sampling: "RANDOM", maxCR: 2000, offset: index+1)
        info()
        cluster(threshold: 0.75, volume: true, page: true, DOI: false)
        merge()
        removeCR(N_CR: [0, 1])
    })
    saveFile(file: "savedrecs_rs_10.cre")
    exportFile(file: "savedrecs_rs_10_GRAPH.csv", type: "CSV_GRAPH")
}
"#;

fn main() -> rpys::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let data = dir.path().join("savedrecs.txt");
    SynthCorpus::new(SynthConfig {
        n_records: 2000,
        rpy_range: (1970, 2010),
        ..SynthConfig::default()
    })?
    .write_wos_file(&data)?;
    let script = dir.path().join("random.crs");
    std::fs::write(&script, SCRIPT).expect("write script");

    run_script_file(&script, 2024, None, true)?;
    let union = load_cre(&dir.path().join("savedrecs_rs_10.cre"))?;
    let cycles = std::fs::read_dir(dir.path().join("cycles")).expect("cycles").count();
    println!("{cycles} cycle files kept, union has {} variants", union.len());

    let population = import_file(&data, &ImportFilter::default())?;
    let (s, p) = (compute_spectrogram(&union, 2)?, compute_spectrogram(&population, 2)?);
    let f = scale_factor(&s, &p)?;
    println!("scale factor f = {f:.4}");
    for row in p.rows.iter().step_by(5) {
        let scaled = s.ncr_at(row.rpy).unwrap_or(0) as f64 / f;
        println!("{}  population {:>5}  samples {:>8.1}", row.rpy, row.ncr, scaled);
    }
    Ok(())
}
