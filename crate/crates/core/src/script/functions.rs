//! Registered script functions and their named parameters.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    Int,
    /// Integers are accepted too.
    Real,
    Bool,
    Text,
    /// `[lo, hi, include_unknown]`
    YearRange,
    /// `[lo, hi]`
    IntPair,
}

impl ArgKind {
    pub fn describe(self) -> &'static str {
        match self {
            ArgKind::Int => "an integer",
            ArgKind::Real => "a number",
            ArgKind::Bool => "true or false",
            ArgKind::Text => "a string",
            ArgKind::YearRange => "a list [from, to, flag]",
            ArgKind::IntPair => "a list [from, to]",
        }
    }
}

type Params = &'static [(&'static str, ArgKind, bool)];

const IMPORT_PARAMS: Params = &[
    ("file", ArgKind::Text, true),
    ("type", ArgKind::Text, false),
    ("RPY", ArgKind::YearRange, false),
    ("PY", ArgKind::YearRange, false),
    ("sampling", ArgKind::Text, false),
    ("maxCR", ArgKind::Int, false),
    ("offset", ArgKind::Int, false),
    ("seed", ArgKind::Int, false),
];

const ANALYZE_PARAMS: Params = &[
    ("file", ArgKind::Text, true),
    ("type", ArgKind::Text, false),
    ("RPY", ArgKind::YearRange, false),
    ("PY", ArgKind::YearRange, false),
];

pub const LOOP_PARAMS: Params = &[("count", ArgKind::Int, true), ("dir", ArgKind::Text, false)];

/// Names of all callable functions (loops excluded).
pub const FUNCTIONS: &[&str] = &[
    "set",
    "importFile",
    "analyzeFile",
    "info",
    "cluster",
    "merge",
    "removeCR",
    "saveFile",
    "exportFile",
];

pub fn signature(name: &str) -> Option<Params> {
    Some(match name {
        "set" => &[
            ("n_pct_range", ArgKind::Int, false),
            ("median_range", ArgKind::Int, false),
        ],
        "importFile" => IMPORT_PARAMS,
        "analyzeFile" => ANALYZE_PARAMS,
        "info" | "merge" => &[],
        "cluster" => &[
            ("threshold", ArgKind::Real, false),
            ("volume", ArgKind::Bool, false),
            ("page", ArgKind::Bool, false),
            ("DOI", ArgKind::Bool, false),
        ],
        "removeCR" => &[("N_CR", ArgKind::IntPair, true)],
        "saveFile" => &[("file", ArgKind::Text, true)],
        "exportFile" => &[("file", ArgKind::Text, true), ("type", ArgKind::Text, true)],
        _ => return None,
    })
}
