//! Grouping of CR variants that denote the same cited work.
//!
//! Two variants are linked when they share a reference publication year,
//! agree on every enabled bibliographic field that both carry, and their
//! `author, source` strings have normalized Levenshtein similarity at or
//! above the threshold. Clusters are the connected components of that
//! relation, computed per RPY block.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::record::{CitedReference, CrVariant, Dataset};

/// Blocks with more variants than this are split by the author's first letter.
pub const DEFAULT_BLOCK_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    pub threshold: f64,
    pub use_volume: bool,
    pub use_page: bool,
    pub use_doi: bool,
    pub block_cap: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            threshold: 0.75,
            use_volume: false,
            use_page: false,
            use_doi: false,
            block_cap: DEFAULT_BLOCK_CAP,
        }
    }
}

impl ClusterConfig {
    pub fn new(threshold: f64, use_volume: bool, use_page: bool, use_doi: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::Domain(format!(
                "similarity threshold {threshold} outside [0, 1]"
            )));
        }
        Ok(Self {
            threshold,
            use_volume,
            use_page,
            use_doi,
            block_cap: DEFAULT_BLOCK_CAP,
        })
    }
}

fn match_text(cr: &CitedReference) -> String {
    format!("{}, {}", cr.author, cr.source).to_lowercase()
}

fn normalized_similarity(a: &str, b: &str) -> f64 {
    strsim::normalized_levenshtein(a, b)
}

/// Similarity in `[0, 1]`; 1 for identical keys.
pub fn similarity(a: &CitedReference, b: &CitedReference) -> f64 {
    if a.key() == b.key() {
        return 1.0;
    }
    normalized_similarity(&match_text(a), &match_text(b))
}

fn field_agrees(enabled: bool, a: &Option<String>, b: &Option<String>) -> bool {
    match (enabled, a, b) {
        (true, Some(x), Some(y)) => x.eq_ignore_ascii_case(y),
        _ => true,
    }
}

/// Year gate plus the enabled field checks; absent fields never block.
pub fn compatible(a: &CitedReference, b: &CitedReference, config: &ClusterConfig) -> bool {
    matches!((a.rpy, b.rpy), (Some(x), Some(y)) if x == y)
        && field_agrees(config.use_volume, &a.volume, &b.volume)
        && field_agrees(config.use_page, &a.page, &b.page)
        && field_agrees(config.use_doi, &a.doi, &b.doi)
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Union keeping the smaller index as root.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Links within one block, given as global variant indices in ascending
/// order; returns the smallest member index for each entry.
fn cluster_block(variants: &[CrVariant], members: &[usize], config: &ClusterConfig) -> Vec<usize> {
    let texts: Vec<String> = members
        .iter()
        .map(|&i| match_text(&variants[i].reference))
        .collect();
    let lens: Vec<usize> = texts.iter().map(|t| t.chars().count()).collect();
    let mut sets = DisjointSet::new(members.len());

    for i in 0..members.len() {
        let a = &variants[members[i]].reference;
        for j in (i + 1)..members.len() {
            if sets.find(i) == sets.find(j) {
                continue;
            }
            let b = &variants[members[j]].reference;
            if !compatible(a, b, config) {
                continue;
            }
            let longest = lens[i].max(lens[j]);
            if longest > 0 {
                // Levenshtein distance is at least the length difference.
                let bound = 1.0 - lens[i].abs_diff(lens[j]) as f64 / longest as f64;
                if bound < config.threshold {
                    continue;
                }
            }
            if normalized_similarity(&texts[i], &texts[j]) >= config.threshold {
                sets.union(i, j);
            }
        }
    }
    (0..members.len())
        .map(|i| members[sets.find(i)])
        .collect()
}

fn first_author_char(v: &CrVariant) -> Option<char> {
    v.reference.author.chars().next()
}

/// Assigns `cluster_id` to every variant: the smallest canonical index of its cluster.
pub fn cluster_crs(dataset: &Dataset, config: &ClusterConfig) -> Dataset {
    let mut ds = dataset.clone();
    ds.canonicalize();

    let mut blocks: BTreeMap<(i32, Option<char>), Vec<usize>> = BTreeMap::new();
    let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, v) in ds.variants.iter().enumerate() {
        if let Some(y) = v.rpy() {
            by_year.entry(y).or_default().push(i);
        }
    }
    for (year, members) in by_year {
        if members.len() > config.block_cap {
            for i in members {
                blocks
                    .entry((year, first_author_char(&ds.variants[i])))
                    .or_default()
                    .push(i);
            }
        } else {
            blocks.insert((year, None), members);
        }
    }

    let block_list: Vec<Vec<usize>> = blocks.into_values().collect();
    let roots: Vec<Vec<usize>> = block_list
        .par_iter()
        .map(|members| cluster_block(&ds.variants, members, config))
        .collect();

    for (i, v) in ds.variants.iter_mut().enumerate() {
        v.cluster_id = Some(i);
    }
    for (members, roots) in block_list.iter().zip(roots) {
        for (&i, root) in members.iter().zip(roots) {
            ds.variants[i].cluster_id = Some(root);
        }
    }
    let n_clusters = {
        let mut ids: Vec<_> = ds.variants.iter().filter_map(|v| v.cluster_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    };
    ds.log(format!(
        "cluster threshold={} volume={} page={} DOI={} clusters={}",
        config.threshold, config.use_volume, config.use_page, config.use_doi, n_clusters
    ));
    ds
}

/// Collapses each cluster to one variant carrying the summed NCR.
///
/// The representative is the member with the largest NCR, ties going to the
/// lexicographically smallest key. Unclustered variants pass through.
pub fn merge_clusters(dataset: &Dataset) -> Dataset {
    let mut groups: BTreeMap<usize, Vec<&CrVariant>> = BTreeMap::new();
    let mut singles: Vec<CrVariant> = Vec::new();
    for v in &dataset.variants {
        match v.cluster_id {
            Some(id) => groups.entry(id).or_default().push(v),
            None => singles.push(v.clone()),
        }
    }

    let before = dataset.len();
    let mut variants = singles;
    for (id, members) in groups {
        let rep = members
            .iter()
            .copied()
            .max_by(|a, b| a.ncr.cmp(&b.ncr).then_with(|| b.key.cmp(&a.key)))
            .expect("cluster has members");
        variants.push(CrVariant {
            key: rep.key.clone(),
            reference: rep.reference.clone(),
            ncr: members.iter().map(|m| m.ncr).sum(),
            cluster_id: Some(id),
            n_py_years: members.iter().map(|m| m.n_py_years).max().unwrap_or(0),
        });
    }

    let mut ds = Dataset {
        variants,
        n_citing: dataset.n_citing,
        n_cr_total: dataset.n_cr_total,
        rpy_filter: dataset.rpy_filter,
        py_filter: dataset.py_filter,
        provenance: dataset.provenance.clone(),
    };
    ds.canonicalize();
    ds.log(format!("merge variants {before} -> {}", ds.len()));
    ds
}

/// Drops variants whose NCR lies in `[lo, hi]`.
pub fn remove_cr(dataset: &Dataset, lo: u64, hi: u64) -> Result<Dataset> {
    if lo > hi {
        return Err(Error::Domain(format!("removeCR range [{lo}, {hi}] is empty")));
    }
    let mut ds = dataset.clone();
    ds.variants.retain(|v| v.ncr < lo || v.ncr > hi);
    ds.canonicalize();
    ds.log(format!("removeCR N_CR=[{lo}, {hi}] kept {}", ds.len()));
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{aggregate, CrFields};
    use crate::wos::parse_cr_line;

    fn cr(line: &str) -> CitedReference {
        parse_cr_line(line).unwrap()
    }

    fn dataset(lines: &[(&str, u64)]) -> Dataset {
        aggregate(
            lines
                .iter()
                .flat_map(|&(l, n)| (0..n).map(move |_| (cr(l), Some(2010)))),
        )
    }

    /// Textbook dynamic-programming edit distance over chars.
    fn dp_levenshtein(a: &str, b: &str) -> usize {
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
                let sub = usize::from(a[i - 1] != b[j - 1]);
                d[i][j] = (d[i - 1][j] + 1)
                    .min(d[i][j - 1] + 1)
                    .min(d[i - 1][j - 1] + sub);
            }
        }
        d[a.len()][b.len()]
    }

    #[test]
    fn identical_references_have_similarity_one() {
        let a = cr("STUIVER M, 1993, RADIOCARBON, V35, P215");
        assert_eq!(similarity(&a, &a.clone()), 1.0);
    }

    #[test]
    fn disjoint_characters_have_similarity_zero() {
        let a = CitedReference::new(CrFields {
            raw: "AAAA".into(),
            author: "AAAA".into(),
            ..CrFields::default()
        })
        .unwrap();
        let b = CitedReference::new(CrFields {
            raw: "BBBB".into(),
            author: "BBBB".into(),
            ..CrFields::default()
        })
        .unwrap();
        // "aaaa, " vs "bbbb, " share the separator; compare the raw metric too
        assert_eq!(normalized_similarity("aaaa", "bbbb"), 0.0);
        let expected = 1.0 - dp_levenshtein("aaaa, ", "bbbb, ") as f64 / 6.0;
        assert!((similarity(&a, &b) - expected).abs() < 1e-12);
    }

    #[test]
    fn similarity_matches_dp_oracle() {
        let a = cr("ROPELEWSKI CF, 1987, MON WEATHER REV, V115, P1606");
        let b = cr("ROPELEWSKI C, 1987, MON WEA REV, V115, P1606");
        let ta = "ropelewski cf, mon weather rev";
        let tb = "ropelewski c, mon wea rev";
        let expected = 1.0 - dp_levenshtein(ta, tb) as f64 / ta.len().max(tb.len()) as f64;
        assert!((similarity(&a, &b) - expected).abs() < 1e-12);
        assert_eq!(similarity(&a, &b), similarity(&b, &a));
    }

    #[test]
    fn compatibility_rules() {
        let cfg = ClusterConfig::new(0.75, true, true, false).unwrap();
        let a = cr("STUIVER M, 1993, RADIOCARBON, V35, P215");
        let b = cr("STUIVER M, 1993, RADIOCARBON, V35");
        assert!(compatible(&a, &b, &cfg));
        let c = cr("STUIVER M, 1994, RADIOCARBON, V35, P215");
        assert!(!compatible(&a, &c, &ClusterConfig::default()));
        let d = cr("STUIVER M, 1993, RADIOCARBON, V36, P215");
        assert!(!compatible(&a, &d, &cfg));
        let e = cr("STUIVER M, RADIOCARBON");
        assert!(!compatible(&e, &e.clone(), &ClusterConfig::default()));
    }

    #[test]
    fn threshold_one_keeps_singletons() {
        let ds = dataset(&[("A B, 2010, X", 1), ("A C, 2010, X", 2), ("Z, 2010, Y", 1)]);
        let out = cluster_crs(&ds, &ClusterConfig::new(1.0, false, false, false).unwrap());
        let ids: Vec<_> = out.variants.iter().map(|v| v.cluster_id).collect();
        assert_eq!(ids, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn threshold_zero_joins_each_year() {
        let ds = aggregate(
            ["A, 2000, X", "B, 2000, Y", "C, 2001, Z", "D, 2001, W", "E, 2002, V"]
                .iter()
                .map(|l| (cr(l), None)),
        );
        let out = cluster_crs(&ds, &ClusterConfig::new(0.0, false, false, false).unwrap());
        let ids: Vec<_> = out.variants.iter().map(|v| v.cluster_id.unwrap()).collect();
        assert_eq!(ids, vec![0, 0, 2, 2, 4]);
    }

    #[test]
    fn sub_blocking_by_author_letter() {
        let ds = aggregate(
            ["AB, 2000, X", "AC, 2000, X", "BB, 2000, X"]
                .iter()
                .map(|l| (cr(l), None)),
        );
        let mut cfg = ClusterConfig::new(0.0, false, false, false).unwrap();
        cfg.block_cap = 2;
        let out = cluster_crs(&ds, &cfg);
        let ids: Vec<_> = out.variants.iter().map(|v| v.cluster_id.unwrap()).collect();
        assert_eq!(ids, vec![0, 0, 2]);
    }

    #[test]
    fn merge_of_singletons_only_logs() {
        let ds = dataset(&[("A, 2010, X", 2), ("B, 2010, Y", 1)]);
        let clustered = cluster_crs(&ds, &ClusterConfig::new(1.0, false, false, false).unwrap());
        let merged = merge_clusters(&clustered);
        assert_eq!(merged.variants, clustered.variants);
        assert_eq!(merged.provenance.len(), clustered.provenance.len() + 1);
    }

    #[test]
    fn merge_sums_and_picks_largest_representative() {
        let ds = dataset(&[
            ("STUIVER M, 1993, RADIOCARBON, V35, P215", 3),
            ("STUIVER MA, 1993, RADIOCARBON, V35, P215", 5),
        ]);
        let clustered = cluster_crs(&ds, &ClusterConfig::new(0.75, true, true, false).unwrap());
        let merged = merge_clusters(&clustered);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.variants[0].ncr, 8);
        assert_eq!(merged.variants[0].key, "STUIVER MA, 1993, RADIOCARBON, V35, P215");
    }

    #[test]
    fn merge_tie_breaks_on_smallest_key() {
        let ds = dataset(&[("SMITH J, 2010, NATURE", 2), ("SMITH JA, 2010, NATURE", 2)]);
        let merged = merge_clusters(&cluster_crs(&ds, &ClusterConfig::default()));
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.variants[0].key, "SMITH J, 2010, NATURE");
    }

    #[test]
    fn remove_cr_ranges() {
        let ds = dataset(&[("A, 2010, X", 50), ("B, 2010, Y", 100), ("C, 2010, Z", 150)]);
        let kept = remove_cr(&ds, 0, 99).unwrap();
        let ncrs: Vec<_> = kept.variants.iter().map(|v| v.ncr).collect();
        assert_eq!(ncrs, vec![100, 150]);
        assert_eq!(kept.n_cr_total, 300);

        assert_eq!(remove_cr(&ds, 0, 0).unwrap().variants, ds.variants);
        assert!(remove_cr(&ds, 0, 150).unwrap().is_empty());
        assert!(remove_cr(&ds, 5, 1).is_err());
    }
}
