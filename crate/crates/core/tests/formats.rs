mod common;

use std::process::Command;

use rpys::io::{load_cre, parse_cre, save_cre};
use rpys::wos::{analyze_file, import_file, ImportFilter, WosReader};
use rpys::{Error, Settings};

use common::*;

fn fixture(name: &str) -> std::path::PathBuf {
    workspace_test_dir().join("fixtures").join(name)
}

#[test]
fn documented_wos_fixture_parses_as_described() {
    let records: Vec<_> = WosReader::open(&fixture("tiny.txt")).unwrap().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), 2);
    assert_eq!((records[0].py, records[0].doc_type.as_str()), (Some(2011), "Article"));
    assert_eq!(records[0].crs.len(), 3);
    let first = &records[0].crs[0];
    assert_eq!(first.author, "MANN ME");
    assert_eq!(first.rpy, Some(1998));
    assert_eq!(first.source, "NATURE");
    assert_eq!(first.volume.as_deref(), Some("392"));
    assert_eq!(first.page.as_deref(), Some("779"));
    assert_eq!(first.doi.as_deref(), Some("10.1038/33859"));
    assert_eq!(records[1].crs[1].rpy, None);
    let stats = analyze_file(&fixture("tiny.txt"), &ImportFilter::default()).unwrap();
    assert_eq!((stats.n_citing, stats.n_cr), (2, 5));
}

#[test]
fn documented_cre_fixture_is_reproduced_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("tiny.txt"), dir.path().join("tiny.txt")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rpys"))
        .args(["sample", "tiny.txt", "--out", "tiny.cre"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let expected = std::fs::read(fixture("tiny.cre")).unwrap();
    assert_eq!(std::fs::read(dir.path().join("tiny.cre")).unwrap(), expected);

    let loaded = load_cre(&fixture("tiny.cre")).unwrap();
    let direct = import_file(&fixture("tiny.txt"), &ImportFilter::default()).unwrap();
    assert_eq!(loaded.variants, direct.variants);
    let again = dir.path().join("again.cre");
    save_cre(&loaded, &Settings::default(), &again).unwrap();
    assert_eq!(std::fs::read(again).unwrap(), expected);
}

#[test]
fn cre_corruption_is_detected() {
    let mut bytes = std::fs::read(fixture("tiny.cre")).unwrap();
    let at = bytes.iter().position(|&b| b == b'V').unwrap();
    bytes[at] = b'W';
    assert!(matches!(parse_cre(&bytes), Err(Error::ChecksumMismatch { .. })));
    let text = String::from_utf8(std::fs::read(fixture("tiny.cre")).unwrap()).unwrap();
    let truncated: String = text.lines().filter(|l| !l.starts_with("#END")).map(|l| format!("{l}\n")).collect();
    assert!(parse_cre(truncated.as_bytes()).is_err());
}
