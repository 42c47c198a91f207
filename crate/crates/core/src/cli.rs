//! Command-line front end shared by the `rpys` binary and its tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{export_csv_graph, load_cre, save_cre};
use crate::record::YearRange;
use crate::sampling::SamplingMode;
use crate::script::run_script_file;
use crate::settings::Settings;
use crate::spectro::{compute_spectrogram, DEFAULT_MEDIAN_RANGE};
use crate::wos::{analyze_file, import_file, ImportFilter};

#[derive(Debug, Parser)]
#[command(name = "rpys", version, about = "Reference publication year spectroscopy")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute a .crs script.
    Run {
        script: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parent directory for loop files when a loop gives no `dir`.
        #[arg(long)]
        tmpdir: Option<PathBuf>,
    },
    /// Count citing records and CRs passing the filters.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        years: YearFlags,
    },
    /// Import a sample of a WoS file and save it as CRE.
    Sample {
        input: PathBuf,
        #[arg(long, default_value = "none")]
        mode: SamplingMode,
        /// Sample size (maxCR); 0 means unlimited.
        #[arg(long, default_value_t = 0)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        offset: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        years: YearFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the CSV_GRAPH spectrogram of a CRE file.
    Spectro {
        cre: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MEDIAN_RANGE)]
        median_range: u32,
        /// Output CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct YearFlags {
    /// Reference publication years, `lo:hi` or `lo:hi:true` to keep CRs without a year.
    #[arg(long, alias = "rpy-range", value_parser = parse_year_range)]
    pub rpy: Option<YearRange>,
    /// Publication years of citing records, same syntax as --rpy.
    #[arg(long, alias = "py-range", value_parser = parse_year_range)]
    pub py: Option<YearRange>,
}

pub fn parse_year_range(s: &str) -> std::result::Result<YearRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let year = |p: &str| p.trim().parse::<i32>().map_err(|_| format!("bad year `{p}`"));
    let (lo, hi, flag) = match parts.as_slice() {
        [lo, hi] => (year(lo)?, year(hi)?, false),
        [lo, hi, f] => (
            year(lo)?,
            year(hi)?,
            f.parse::<bool>().map_err(|_| format!("bad flag `{f}`"))?,
        ),
        _ => return Err(format!("expected lo:hi, got `{s}`")),
    };
    YearRange::new(lo, hi, flag).map_err(|e| e.to_string())
}

fn describe(err: &Error, context: &Path) -> String {
    match err {
        Error::Io { path, source } if source.kind() == std::io::ErrorKind::NotFound => {
            format!("{}: file not found", path.display())
        }
        Error::Syntax { .. }
        | Error::UnknownFunction { .. }
        | Error::BadArgument { .. }
        | Error::Script { .. } => format!("{}:{err}", context.display()),
        _ => err.to_string(),
    }
}

fn run(script: &Path, seed: u64, tmpdir: Option<PathBuf>) -> Result<()> {
    let env = run_script_file(script, seed, tmpdir.as_deref(), true)?;
    match &env.dataset {
        Some(ds) => eprintln!("done: {} variants, {} CRs", ds.len(), ds.total_ncr()),
        None => eprintln!("done"),
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            script,
            seed,
            tmpdir,
        } => run(&script, seed, tmpdir),
        Command::Analyze { input, years } => {
            let filter = ImportFilter {
                rpy_range: years.rpy,
                py_range: years.py,
                ..ImportFilter::default()
            };
            let stats = analyze_file(&input, &filter)?;
            println!("{stats}");
            Ok(())
        }
        Command::Sample {
            input,
            mode,
            n,
            offset,
            seed,
            years,
            out,
        } => {
            let filter = ImportFilter {
                rpy_range: years.rpy,
                py_range: years.py,
                max_cr: n,
                sampling_mode: mode,
                offset,
                seed: Some(seed),
                ..ImportFilter::default()
            };
            let ds = import_file(&input, &filter)?;
            eprintln!(
                "{} citing publications, {} CRs, {} distinct variants",
                ds.n_citing,
                ds.total_ncr(),
                ds.len()
            );
            save_cre(&ds, &Settings::default(), &out)
        }
        Command::Spectro {
            cre,
            median_range,
            out,
        } => {
            let ds = load_cre(&cre)?;
            let graph = compute_spectrogram(&ds, median_range)?;
            match out {
                Some(path) => export_csv_graph(&graph, &path),
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    crate::io::write_csv_graph(&graph, &mut lock)
                        .and_then(|_| lock.flush())
                        .map_err(|e| Error::io(Path::new("<stdout>"), e))
                }
            }
        }
    }
}

fn context_path(command: &Command) -> PathBuf {
    match command {
        Command::Run { script, .. } => script.clone(),
        Command::Analyze { input, .. } | Command::Sample { input, .. } => input.clone(),
        Command::Spectro { cre, .. } => cre.clone(),
    }
}

/// Parses `args` (program name first) and runs the command. Usage errors
/// and failures exit with status 1.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();

    if let Command::Sample { mode, years, .. } = &cli.command {
        if *mode == SamplingMode::Cluster && years.py.is_none() {
            eprintln!("error: --mode cluster needs --py <lo:hi> to draw the citing year from\n");
            eprintln!("Usage: rpys sample <INPUT> --mode cluster --py <LO:HI> --out <OUT>");
            return ExitCode::FAILURE;
        }
    }

    let ctx = context_path(&cli.command);
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e, &ctx));
            ExitCode::FAILURE
        }
    }
}
