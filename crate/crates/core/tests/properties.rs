mod common;

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use proptest::sample::select;
use rpys::clustering::{cluster_crs, merge_clusters, remove_cr, similarity, ClusterConfig};
use rpys::io::{parse_cre, union_cre, write_cre};
use rpys::sampling::{systematic_sample, systematic_step};
use rpys::script::parse_script;
use rpys::spectro::{compute_spectrogram, median_deviation, n_pct_all, top_crs};
use rpys::wos::parse_cr_line;
use rpys::{aggregate, normalize_key, CitedReference, Dataset, Settings, YearRange};

use common::*;

const AUTHORS: &[&str] = &["STUIVER M", "STUIVER M.", "FRITTS HC", "FRITS HC", "MANN ME", "JONES PD", "ANONYMOUS"];
const SOURCES: &[&str] = &["RADIOCARBON", "RADIOCARBN", "TREE RINGS CLIMATE", "NATURE", "NATUR", "J CLIMATE"];

prop_compose! {
    fn cr_line()(
        author in select(AUTHORS),
        year in prop::option::weighted(0.9, 1975i32..1985),
        source in select(SOURCES),
        vol in prop::option::of(1u32..4),
        page in prop::option::of(1u32..4),
        doi in prop::option::weighted(0.2, 1u32..3),
    ) -> String {
        let mut s = author.to_string();
        if let Some(y) = year {
            s.push_str(&format!(", {y}"));
        }
        s.push_str(&format!(", {source}"));
        if let Some(v) = vol {
            s.push_str(&format!(", V{v}"));
        }
        if let Some(p) = page {
            s.push_str(&format!(", P{p}"));
        }
        if let Some(d) = doi {
            s.push_str(&format!(", DOI 10.1/{d}"));
        }
        s
    }
}

fn occurrences() -> impl Strategy<Value = Vec<(String, Option<i32>)>> {
    prop::collection::vec((cr_line(), prop::option::of(1990i32..1995)), 0..120)
}

fn build(occ: &[(String, Option<i32>)]) -> Dataset {
    aggregate(occ.iter().map(|(l, py)| (parse_cr_line(l).unwrap(), *py)))
}

prop_compose! {
    fn dataset()(
        occ in occurrences(),
        n_citing in 0u64..1000,
        cluster in any::<bool>(),
        threshold in 0.5f64..1.0,
        rpy in prop::option::of((1950i32..2000, 0i32..30, any::<bool>())),
        notes in prop::collection::vec("[ -~\t\n\\\\]{0,12}", 0..3),
    ) -> Dataset {
        let mut ds = build(&occ);
        if cluster {
            ds = cluster_crs(&ds, &ClusterConfig::new(threshold, true, true, false).unwrap());
        }
        ds.n_citing = n_citing;
        ds.rpy_filter = rpy.map(|(lo, w, f)| YearRange::new(lo, lo + w, f).unwrap());
        ds.provenance.extend(notes);
        ds
    }
}

fn cluster_config() -> impl Strategy<Value = ClusterConfig> {
    (0.0f64..=1.0, any::<bool>(), any::<bool>(), any::<bool>())
        .prop_map(|(t, v, p, d)| ClusterConfig::new(t, v, p, d).unwrap())
}

proptest! {
    #[test]
    fn normalize_key_is_idempotent(s in "\\PC{0,40}") {
        let once = normalize_key(&s);
        prop_assert_eq!(normalize_key(&once), once);
    }

    #[test]
    fn normalize_key_ignores_case_spacing_and_trailing_punctuation(
        line in cr_line(),
        pad in "[ ]{0,3}",
        tail in "[.,;:!? ]{0,3}",
        lower in any::<bool>(),
    ) {
        let spaced = line.replace(", ", &format!(",{pad} "));
        let cased = if lower { spaced.to_lowercase() } else { spaced };
        let perturbed = format!("{pad}{cased}{tail}");
        prop_assert_eq!(normalize_key(&perturbed), normalize_key(&line));
    }

    #[test]
    fn aggregate_conserves_and_matches_count_oracle(occ in occurrences()) {
        let ds = build(&occ);
        prop_assert_eq!(ds.total_ncr(), occ.len() as u64);
        prop_assert_eq!(ds.n_cr_total, occ.len() as u64);
        let oracle = count_oracle(occ.iter().map(|(l, _)| l.as_str()));
        prop_assert_eq!(ncr_table(&ds), oracle);
    }

    #[test]
    fn aggregate_ignores_order(occ in occurrences(), seed in any::<u64>()) {
        let mut shuffled = occ.clone();
        let mut rng = rpys::sampling::SampleRng::new(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.below(i as u64 + 1) as usize);
        }
        prop_assert_eq!(build(&occ), build(&shuffled));
    }

    #[test]
    fn cre_round_trip(ds in dataset(), median in 0u32..5, pct in 0u32..5) {
        let settings = Settings { median_range: median, n_pct_range: pct };
        let mut bytes = Vec::new();
        write_cre(&ds, &settings, &mut bytes).unwrap();
        let back = parse_cre(&bytes).unwrap();
        let mut expected = ds.clone();
        expected.canonicalize();
        prop_assert_eq!(back.settings, settings);
        prop_assert_eq!(back.dataset, expected);
    }

    #[test]
    fn union_is_order_independent(a in dataset(), b in dataset(), c in dataset()) {
        let dir = tempfile::tempdir().unwrap();
        let paths: Vec<_> = [a, b, c].iter().enumerate().map(|(i, d)| {
            let p = dir.path().join(format!("{i}.cre"));
            rpys::io::save_cre(d, &Settings::default(), &p).unwrap();
            p
        }).collect();
        let forward = union_cre(&paths).unwrap();
        let reversed: Vec<_> = paths.iter().rev().cloned().collect();
        let rotated = vec![paths[1].clone(), paths[2].clone(), paths[0].clone()];
        prop_assert_eq!(&forward, &union_cre(&reversed).unwrap());
        prop_assert_eq!(&forward, &union_cre(&rotated).unwrap());
    }

    #[test]
    fn systematic_offsets_partition_the_stream(step in 1u64..8, n in 1u64..50) {
        let total = step * n;
        prop_assert_eq!(systematic_step(total, n), step);
        let mut seen = BTreeSet::new();
        for offset in 0..step {
            let picked = systematic_sample(0..total, n, total, offset).unwrap();
            prop_assert_eq!(picked.len() as u64, n);
            for p in picked {
                prop_assert_eq!(p % step, offset);
                prop_assert!(seen.insert(p));
            }
        }
        prop_assert_eq!(seen.len() as u64, total);
    }

    #[test]
    fn clustering_matches_quadratic_oracle(occ in occurrences(), config in cluster_config()) {
        let ds = build(&occ);
        let clustered = cluster_crs(&ds, &config);
        prop_assert_eq!(partition_of(&clustered), oracle_partition(&ds, &config));
        for v in &clustered.variants {
            let id = v.cluster_id.unwrap();
            prop_assert!(clustered.variants[id].cluster_id == Some(id));
        }
        let merged = merge_clusters(&clustered);
        prop_assert_eq!(merged.total_ncr(), ds.total_ncr());
    }

    #[test]
    fn similarity_is_symmetric_and_matches_dp(a in cr_line(), b in cr_line()) {
        let (a, b) = (parse_cr_line(&a).unwrap(), parse_cr_line(&b).unwrap());
        prop_assert_eq!(similarity(&a, &b), similarity(&b, &a));
        prop_assert_eq!(similarity(&a, &a), 1.0);
        prop_assert!((similarity(&a, &b) - oracle_similarity(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn remove_cr_clears_the_range(occ in occurrences(), lo in 0u64..4, w in 0u64..4) {
        let ds = build(&occ);
        let kept = remove_cr(&ds, lo, lo + w).unwrap();
        prop_assert!(kept.variants.iter().all(|v| v.ncr < lo || v.ncr > lo + w));
        prop_assert_eq!(kept.n_cr_total, ds.n_cr_total);
    }

    #[test]
    fn spectrogram_matches_window_oracle(occ in occurrences(), range in 0u32..5) {
        let ds = build(&occ);
        let Ok(s) = compute_spectrogram(&ds, range) else {
            prop_assert!(ds.variants.iter().all(|v| v.rpy().is_none()));
            return Ok(());
        };
        let oracle = oracle_spectrogram(&ds, range as usize);
        prop_assert_eq!(s.rows.len(), oracle.len());
        for (row, (y, n, m)) in s.rows.iter().zip(oracle) {
            prop_assert_eq!((row.rpy, row.ncr), (y, n));
            prop_assert!((row.median_dev - m).abs() <= 1e-12);
        }
        let dated: u64 = ds.variants.iter().filter(|v| v.rpy().is_some()).map(|v| v.ncr).sum();
        prop_assert_eq!(s.total_ncr(), dated);
    }

    #[test]
    fn median_deviation_is_translation_covariant(
        series in prop::collection::vec(0u64..1000, 1..60),
        c in 0u64..1000,
        range in 0usize..6,
    ) {
        let shifted: Vec<u64> = series.iter().map(|x| x + c).collect();
        prop_assert_eq!(median_deviation(&series, range), median_deviation(&shifted, range));
    }

    #[test]
    fn n_pct_shares_sum_to_one_per_year(occ in occurrences()) {
        let ds = build(&occ);
        let pct = n_pct_all(&ds, 0);
        let mut per_year: HashMap<Option<i32>, f64> = HashMap::new();
        for (v, p) in ds.variants.iter().zip(pct) {
            *per_year.entry(v.rpy()).or_default() += p;
        }
        for total in per_year.values() {
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn top_crs_is_a_dominating_prefix(occ in occurrences(), year in 1975i32..1985, k in 1usize..6) {
        let ds = build(&occ);
        let top = top_crs(&ds, year, k);
        let mut all: Vec<_> = ds.variants.iter().filter(|v| v.rpy() == Some(year)).collect();
        all.sort_by(|a, b| b.ncr.cmp(&a.ncr).then_with(|| a.key.cmp(&b.key)));
        all.truncate(k);
        let got: Vec<&str> = top.iter().map(|v| v.key.as_str()).collect();
        let want: Vec<&str> = all.iter().map(|v| v.key.as_str()).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn script_pretty_print_is_a_fixed_point(
        calls in prop::collection::vec(
            select(&[
                "set(n_pct_range: 0, median_range: 2)",
                "importFile(file: \"a b.txt\", type: \"WOS\", RPY: [1970, 2014, false], maxCR: 0)",
                "info()",
                "cluster(threshold: 0.75, volume: true, page: true, DOI: false)",
                "merge()",
                "removeCR(N_CR: [0, 99])",
                "saveFile(file: \"out\\\"q\\\".cre\")",
                "exportFile(file: \"g.csv\", type: \"CSV_GRAPH\")",
            ][..]),
            0..8,
        ),
        wrap in any::<bool>(),
    ) {
        let body = calls.join("\n");
        let src = if wrap {
            format!("use(\"Loop.crs\").with {{\n forEachUnion(count: 3, {{i ->\n importFile(file: \"x\", offset: i+1, maxCR: 10, sampling: \"SYSTEMATIC\")\n{body}\n}})\n}}")
        } else {
            body
        };
        let p1 = parse_script(&src).unwrap();
        let printed = p1.to_string();
        let p2 = parse_script(&printed).unwrap();
        prop_assert_eq!(&p1, &p2);
        prop_assert_eq!(printed, p2.to_string());
    }
}

#[test]
fn planted_misspellings_cluster_like_the_oracle() {
    let corpus = rpys::synth::SynthCorpus::new(rpys::synth::SynthConfig {
        n_works: 20,
        n_records: 10,
        crs_per_record: (5, 5),
        ..Default::default()
    })
    .unwrap();
    let refs: Vec<(CitedReference, Option<i32>)> = corpus
        .works
        .iter()
        .flat_map(|w| w.lines.iter())
        .map(|l| (parse_cr_line(l).unwrap(), None))
        .collect();
    let ds = aggregate(refs);
    assert!(ds.len() > 20, "fixture should contain variants");
    let config = ClusterConfig::new(0.75, true, true, false).unwrap();
    let clustered = cluster_crs(&ds, &config);
    assert_eq!(partition_of(&clustered), oracle_partition(&ds, &config));
    // Every planted variant joins its work.
    for w in &corpus.works {
        let ids: BTreeSet<_> = w
            .lines
            .iter()
            .map(|l| clustered.get(&normalize_key(l)).unwrap().cluster_id)
            .collect();
        assert_eq!(ids.len(), 1, "{:?}", w.lines);
    }
}
