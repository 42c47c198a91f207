#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rpys::clustering::ClusterConfig;
use rpys::synth::{SynthConfig, SynthCorpus};
use rpys::{CitedReference, Dataset};

pub fn write_fixture(dir: &Path, name: &str, cfg: SynthConfig) -> (PathBuf, u64, u64) {
    let path = dir.join(name);
    let corpus = SynthCorpus::new(cfg).unwrap();
    let (records, crs) = corpus.write_wos_file(&path).unwrap();
    (path, records, crs)
}

/// The default fixture: 200 records, 5,000 CR lines.
pub fn default_fixture(dir: &Path) -> PathBuf {
    write_fixture(dir, "savedrecs.txt", SynthConfig::default()).0
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub fn oracle_similarity(a: &CitedReference, b: &CitedReference) -> f64 {
    if a.key() == b.key() {
        return 1.0;
    }
    let ta = format!("{}, {}", a.author, a.source).to_lowercase();
    let tb = format!("{}, {}", b.author, b.source).to_lowercase();
    let longest = ta.chars().count().max(tb.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&ta, &tb) as f64 / longest as f64
}

fn agrees(on: bool, a: &Option<String>, b: &Option<String>) -> bool {
    !on || a.is_none() || b.is_none() || a.as_deref().map(str::to_ascii_lowercase) == b.as_deref().map(str::to_ascii_lowercase)
}

pub fn oracle_compatible(a: &CitedReference, b: &CitedReference, c: &ClusterConfig) -> bool {
    a.rpy.is_some()
        && a.rpy == b.rpy
        && agrees(c.use_volume, &a.volume, &b.volume)
        && agrees(c.use_page, &a.page, &b.page)
        && agrees(c.use_doi, &a.doi, &b.doi)
}

/// Quadratic union-find over all pairs. Returns the partition as sorted
/// groups of keys.
pub fn oracle_partition(ds: &Dataset, c: &ClusterConfig) -> Vec<Vec<String>> {
    let n = ds.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] == x {
            x
        } else {
            let r = find(p, p[x]);
            p[x] = r;
            r
        }
    }
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&ds.variants[i].reference, &ds.variants[j].reference);
            if i != j && oracle_compatible(a, b, c) && oracle_similarity(a, b) >= c.threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<String>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(ds.variants[i].key.clone());
    }
    normalize_groups(groups.into_values().collect())
}

pub fn partition_of(ds: &Dataset) -> Vec<Vec<String>> {
    let mut groups: HashMap<usize, Vec<String>> = HashMap::new();
    for (i, v) in ds.variants.iter().enumerate() {
        groups
            .entry(v.cluster_id.unwrap_or(i))
            .or_default()
            .push(v.key.clone());
    }
    normalize_groups(groups.into_values().collect())
}

fn normalize_groups(mut groups: Vec<Vec<String>>) -> Vec<Vec<String>> {
    for g in &mut groups {
        g.sort();
    }
    groups.sort();
    groups
}

/// Median by sorting the window and picking the middle.
pub fn oracle_median(values: &[u64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] as f64 + v[m] as f64) / 2.0
    }
}

/// Dense per-year totals and median deviations, recomputed window by window.
pub fn oracle_spectrogram(ds: &Dataset, range: usize) -> Vec<(i32, u64, f64)> {
    let years: Vec<i32> = ds.variants.iter().filter_map(|v| v.rpy()).collect();
    let (Some(&lo), Some(&hi)) = (years.iter().min(), years.iter().max()) else {
        return Vec::new();
    };
    let mut ncr = vec![0u64; (hi - lo + 1) as usize];
    for v in &ds.variants {
        if let Some(y) = v.rpy() {
            ncr[(y - lo) as usize] += v.ncr;
        }
    }
    (0..ncr.len())
        .map(|i| {
            let a = i.saturating_sub(range);
            let b = (i + range).min(ncr.len() - 1);
            let med = oracle_median(&ncr[a..=b]);
            (lo + i as i32, ncr[i], ncr[i] as f64 - med)
        })
        .collect()
}

/// Occurrence counts per normalized key by plain hashing.
pub fn count_oracle<'a>(keys: impl IntoIterator<Item = &'a str>) -> HashMap<String, u64> {
    let mut m = HashMap::new();
    for k in keys {
        *m.entry(rpys::normalize_key(k)).or_insert(0) += 1;
    }
    m
}

pub fn ncr_table(ds: &Dataset) -> HashMap<String, u64> {
    ds.variants.iter().map(|v| (v.key.clone(), v.ncr)).collect()
}

pub fn workspace_test_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub const LISTINGS: &[(&str, &[&str])] = &[
    ("listing1", &["savedrecs.cre", "savedrecs_CR.csv", "savedrecs_GRAPH.csv"]),
    (
        "listing2",
        &["savedrecs_rs_10.cre", "savedrecs_rs_10_CR.csv", "savedrecs_rs_10_GRAPH.csv"],
    ),
    (
        "listing3",
        &["savedrecs_cs_2011.cre", "savedrecs_cs_2011_CR.csv", "savedrecs_cs_2011_GRAPH.csv"],
    ),
];

pub struct ListingRun {
    pub dir: tempfile::TempDir,
    pub env: rpys::script::Environment,
    pub outputs: Vec<(String, Vec<u8>)>,
}

/// Copies `tests/scripts/<name>.crs` next to a fresh default fixture and
/// runs it.
pub fn run_listing(name: &str, seed: u64) -> ListingRun {
    let outputs = LISTINGS.iter().find(|(n, _)| *n == name).unwrap().1;
    let dir = tempfile::tempdir().unwrap();
    default_fixture(dir.path());
    let script = dir.path().join(format!("{name}.crs"));
    std::fs::copy(workspace_test_dir().join("scripts").join(format!("{name}.crs")), &script).unwrap();
    let env = rpys::script::run_script_file(&script, seed, Some(dir.path()), false).unwrap();
    let outputs = outputs
        .iter()
        .map(|f| (f.to_string(), std::fs::read(dir.path().join(f)).unwrap()))
        .collect();
    ListingRun { dir, env, outputs }
}

/// Compares outputs with `tests/golden/<name>/`. With `UPDATE_GOLDENS=1`
/// the goldens are rewritten instead.
pub fn check_goldens(name: &str, outputs: &[(String, Vec<u8>)]) -> Result<(), String> {
    let dir = workspace_test_dir().join("golden").join(name);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::create_dir_all(&dir).unwrap();
        for (f, bytes) in outputs {
            std::fs::write(dir.join(f), bytes).unwrap();
        }
        return Ok(());
    }
    for (f, bytes) in outputs {
        let golden = std::fs::read(dir.join(f)).map_err(|e| format!("{name}/{f}: {e}"))?;
        if &golden != bytes {
            return Err(format!("{name}/{f} differs from golden"));
        }
    }
    Ok(())
}
