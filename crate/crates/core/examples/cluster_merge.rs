//! Groups spelling variants of the same cited work and merges them.

use rpys::clustering::{cluster_crs, merge_clusters, remove_cr, similarity, ClusterConfig};
use rpys::wos::parse_cr_line;
use rpys::{aggregate, CitedReference};

fn main() -> rpys::Result<()> {
    let lines = [
        ("ROPELEWSKI CF, 1987, MON WEATHER REV, V115, P1606", 40),
        ("ROPELEWSKI C, 1987, MON WEA REV, V115, P1606", 7),
        ("ROPELEWSKI CF, 1987, MONTHLY WEATHER REV, V115, P1606", 3),
        ("ROPELEWSKI CF, 1987, MON WEATHER REV, V116, P1606", 2),
        ("MANN ME, 1998, NATURE, V392, P779", 25),
        ("MANN ME, 1998, NATURE, V392, P779, DOI 10.1038/33859", 4),
    ];
    let refs: Vec<CitedReference> = lines
        .iter()
        .map(|(l, _)| parse_cr_line(l))
        .collect::<Result<_, _>>()?;
    println!("similarity of the first two: {:.3}", similarity(&refs[0], &refs[1]));

    let ds = aggregate(
        lines
            .iter()
            .zip(&refs)
            .flat_map(|((_, n), r)| (0..*n).map(move |_| (r.clone(), None))),
    );
    let clustered = cluster_crs(&ds, &ClusterConfig::new(0.75, true, true, false)?);
    for v in &clustered.variants {
        println!("cluster {:?}  ncr {:>3}  {}", v.cluster_id, v.ncr, v.key);
    }

    let merged = merge_clusters(&clustered);
    println!("\nmerged ({} -> {} variants, NCR {} -> {}):", ds.len(), merged.len(), ds.total_ncr(), merged.total_ncr());
    for v in &merged.variants {
        println!("  ncr {:>3}  {}", v.ncr, v.key);
    }

    let kept = remove_cr(&merged, 0, 5)?;
    println!("\nafter removeCR [0, 5]: {} variants", kept.len());
    Ok(())
}
