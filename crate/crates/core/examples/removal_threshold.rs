//! How many CRs to drop from a sample, given the threshold used on the full
//! dataset.

use rpys::sampling::removal_threshold;

fn main() -> rpys::Result<()> {
    let full = 6_594_657;
    for (threshold, sample) in [(100, 50_000), (100, 500_000), (100, 2_000_000), (99, 50_000)] {
        let t = removal_threshold(threshold, full, sample)?;
        println!("threshold {threshold:>3} on {full} CRs -> {t:>2} on a sample of {sample}");
    }
    Ok(())
}
