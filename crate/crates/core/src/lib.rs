//! Memory-bounded reference publication year spectroscopy (RPYS).
//!
//! The crate streams Web of Science exports, draws random, systematic or
//! cluster samples of cited references, groups reference variants, computes
//! spectrograms and merges many samples into one dataset. Every step can be
//! driven from a `.crs` script (see [`script`]).
//!
//! ```no_run
//! use std::path::Path;
//! use rpys::{clustering, io, spectro, wos, Settings};
//!
//! let filter = wos::ImportFilter::default();
//! let ds = wos::import_file(Path::new("savedrecs.txt"), &filter)?;
//! let ds = clustering::merge_clusters(&clustering::cluster_crs(&ds, &Default::default()));
//! let graph = spectro::compute_spectrogram(&ds, 2)?;
//! io::save_cre(&ds, &Settings::default(), Path::new("savedrecs.cre"))?;
//! io::export_csv_graph(&graph, Path::new("savedrecs_GRAPH.csv"))?;
//! # Ok::<(), rpys::Error>(())
//! ```

pub mod cli;
pub mod clustering;
mod error;
pub mod io;
pub mod record;
pub mod sampling;
pub mod script;
mod settings;
pub mod spectro;
pub mod synth;
pub mod wos;

pub use error::{Error, Result};
pub use record::{aggregate, normalize_key, CitedReference, CitingRecord, CrVariant, Dataset, YearRange};
pub use settings::Settings;
pub use spectro::Spectrogram;
