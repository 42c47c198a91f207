use crate::spectro::DEFAULT_MEDIAN_RANGE;

/// Analysis options that travel with a dataset into saved files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    /// Neighbouring years on each side of the median window (2 = five-year window).
    pub median_range: u32,
    /// Years on each side used for the `PCT_RPY` share in CR exports.
    pub n_pct_range: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            median_range: DEFAULT_MEDIAN_RANGE,
            n_pct_range: 0,
        }
    }
}
