use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::ast::{Arg, Call, Expr, Loop, LoopKind, ScriptProgram, Statement};
use crate::clustering::{cluster_crs, merge_clusters, remove_cr, ClusterConfig};
use crate::error::{Error, Result};
use crate::io::{export_csv_cr, export_csv_graph, save_cre, union_cre};
use crate::record::{Dataset, YearRange};
use crate::sampling::SamplingMode;
use crate::settings::Settings;
use crate::spectro::compute_spectrogram;
use crate::wos::{analyze_file, import_file, FileFormat, FileStats, ImportFilter};

/// Runtime value of an argument expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
}

impl Value {
    fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    fn as_real(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// `[lo, hi, flag]` as a year range.
    fn as_year_range(&self) -> Option<Result<YearRange>> {
        match self {
            Value::List(v) => match v.as_slice() {
                [Value::Int(lo), Value::Int(hi), Value::Bool(flag)] => Some(
                    i32::try_from(*lo)
                        .and_then(|lo| i32::try_from(*hi).map(|hi| (lo, hi)))
                        .map_err(|_| Error::Domain("year out of range".into()))
                        .and_then(|(lo, hi)| YearRange::new(lo, hi, *flag)),
                ),
                _ => None,
            },
            _ => None,
        }
    }

    fn as_int_pair(&self) -> Option<(i64, i64)> {
        match self {
            Value::List(v) => match v.as_slice() {
                [Value::Int(a), Value::Int(b)] => Some((*a, *b)),
                _ => None,
            },
            _ => None,
        }
    }
}

/// Mutable state a script runs against.
#[derive(Debug)]
pub struct Environment {
    pub settings: Settings,
    pub dataset: Option<Dataset>,
    /// Relative file names resolve against this directory.
    pub work_dir: PathBuf,
    /// Parent for loop directories when a loop gives no `dir`.
    pub temp_dir: Option<PathBuf>,
    /// Base seed; the sample drawn in loop iteration `i` uses `seed + i`.
    pub seed: u64,
    /// Result of the last `analyzeFile`.
    pub last_stats: Option<FileStats>,
    /// Lines produced by `info` and `analyzeFile`.
    pub output: Vec<String>,
    /// Also print output lines to stderr.
    pub echo: bool,
    vars: HashMap<String, i64>,
    sample_index: u64,
}

impl Environment {
    pub fn new(work_dir: impl Into<PathBuf>) -> Self {
        Self {
            settings: Settings::default(),
            dataset: None,
            work_dir: work_dir.into(),
            temp_dir: None,
            seed: 0,
            last_stats: None,
            output: Vec::new(),
            echo: false,
            vars: HashMap::new(),
            sample_index: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.work_dir.join(p)
        }
    }

    fn emit(&mut self, line: String) {
        if self.echo {
            eprintln!("{line}");
        }
        self.output.push(line);
    }

    fn dataset(&self, call: &str) -> Result<&Dataset> {
        self.dataset
            .as_ref()
            .ok_or_else(|| Error::NoDataset(call.to_string()))
    }

    fn take_dataset(&mut self, call: &str) -> Result<Dataset> {
        self.dataset
            .take()
            .ok_or_else(|| Error::NoDataset(call.to_string()))
    }

    fn eval(&self, e: &Expr) -> Result<Value> {
        Ok(match e {
            Expr::Int(i) => Value::Int(*i),
            Expr::Real(r) => Value::Real(*r),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Text(s) => Value::Text(s.clone()),
            Expr::List(items) => {
                Value::List(items.iter().map(|i| self.eval(i)).collect::<Result<_>>()?)
            }
            Expr::Var(v) => Value::Int(
                *self
                    .vars
                    .get(v)
                    .ok_or_else(|| Error::Domain(format!("unknown variable `{v}`")))?,
            ),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                let add = matches!(e, Expr::Add(..));
                match (&a, &b) {
                    (Value::Int(x), Value::Int(y)) => Value::Int(if add { x + y } else { x - y }),
                    _ => {
                        let (x, y) = (
                            a.as_real().ok_or_else(|| Error::Domain("not a number".into()))?,
                            b.as_real().ok_or_else(|| Error::Domain("not a number".into()))?,
                        );
                        Value::Real(if add { x + y } else { x - y })
                    }
                }
            }
        })
    }
}

struct Args<'a> {
    env: &'a Environment,
    args: &'a [Arg],
}

impl Args<'_> {
    fn get(&self, name: &str) -> Result<Option<Value>> {
        self.args
            .iter()
            .find(|a| a.name == name)
            .map(|a| self.env.eval(&a.value))
            .transpose()
    }

    fn typed<T>(&self, name: &str, conv: impl Fn(&Value) -> Option<T>) -> Result<Option<T>> {
        match self.get(name)? {
            None => Ok(None),
            Some(v) => conv(&v)
                .map(Some)
                .ok_or_else(|| Error::Domain(format!("bad value for `{name}`"))),
        }
    }

    fn text(&self, name: &str) -> Result<Option<String>> {
        self.typed(name, |v| v.as_text().map(str::to_string))
    }

    fn required_text(&self, name: &str) -> Result<String> {
        self.text(name)?
            .ok_or_else(|| Error::Domain(format!("missing argument `{name}`")))
    }

    fn non_negative(&self, name: &str) -> Result<Option<u64>> {
        match self.typed(name, Value::as_int)? {
            None => Ok(None),
            Some(i) => u64::try_from(i)
                .map(Some)
                .map_err(|_| Error::Domain(format!("`{name}` must not be negative, got {i}"))),
        }
    }

    fn bool(&self, name: &str) -> Result<Option<bool>> {
        self.typed(name, Value::as_bool)
    }

    fn year_range(&self, name: &str) -> Result<Option<YearRange>> {
        self.typed(name, Value::as_year_range)?.transpose()
    }
}

fn file_filter(args: &Args<'_>) -> Result<(PathBuf, ImportFilter)> {
    let format: FileFormat = args
        .text("type")?
        .unwrap_or_else(|| "WOS".into())
        .parse()?;
    format.ensure_supported()?;
    let path = args.env.resolve(&args.required_text("file")?);
    let filter = ImportFilter {
        rpy_range: args.year_range("RPY")?,
        py_range: args.year_range("PY")?,
        ..ImportFilter::default()
    };
    Ok((path, filter))
}

fn run_call(env: &mut Environment, call: &Call) -> Result<()> {
    let args = Args {
        env,
        args: &call.args,
    };
    match call.name.as_str() {
        "set" => {
            let n_pct = args.non_negative("n_pct_range")?;
            let median = args.non_negative("median_range")?;
            let to_u32 = |v: u64| u32::try_from(v).map_err(|_| Error::Domain("setting too large".into()));
            if let Some(v) = n_pct {
                env.settings.n_pct_range = to_u32(v)?;
            }
            if let Some(v) = median {
                env.settings.median_range = to_u32(v)?;
            }
        }
        "importFile" => {
            let (path, mut filter) = file_filter(&args)?;
            filter.sampling_mode = match args.text("sampling")? {
                Some(s) => s.parse()?,
                None => SamplingMode::None,
            };
            filter.max_cr = args.non_negative("maxCR")?.unwrap_or(0);
            filter.offset = args.non_negative("offset")?.unwrap_or(0);
            let seed = match args.non_negative("seed")? {
                Some(s) => s,
                None => env.seed.wrapping_add(env.sample_index),
            };
            filter.seed = Some(seed);
            env.dataset = Some(import_file(&path, &filter)?);
        }
        "analyzeFile" => {
            let (path, filter) = file_filter(&args)?;
            let stats = analyze_file(&path, &filter)?;
            env.last_stats = Some(stats);
            env.emit(format!("analyzeFile: {stats}"));
        }
        "info" => {
            let ds = env.dataset("info")?;
            let line = format!(
                "{} citing publications, {} CRs, {} distinct variants",
                ds.n_citing,
                ds.total_ncr(),
                ds.len()
            );
            env.emit(line);
        }
        "cluster" => {
            let config = ClusterConfig::new(
                args.typed("threshold", Value::as_real)?.unwrap_or(0.75),
                args.bool("volume")?.unwrap_or(false),
                args.bool("page")?.unwrap_or(false),
                args.bool("DOI")?.unwrap_or(false),
            )?;
            let ds = cluster_crs(env.dataset("cluster")?, &config);
            env.dataset = Some(ds);
        }
        "merge" => {
            let ds = merge_clusters(env.dataset("merge")?);
            env.dataset = Some(ds);
        }
        "removeCR" => {
            let (lo, hi) = args
                .typed("N_CR", Value::as_int_pair)?
                .ok_or_else(|| Error::Domain("missing argument `N_CR`".into()))?;
            if lo < 0 || hi < 0 {
                return Err(Error::Domain(format!("removeCR range [{lo}, {hi}] is negative")));
            }
            let ds = remove_cr(env.dataset("removeCR")?, lo as u64, hi as u64)?;
            env.dataset = Some(ds);
        }
        "saveFile" => {
            let path = env.resolve(&args.required_text("file")?);
            save_cre(env.dataset("saveFile")?, &env.settings, &path)?;
        }
        "exportFile" => {
            let path = env.resolve(&args.required_text("file")?);
            let kind = args.required_text("type")?;
            let ds = env.dataset("exportFile")?;
            match kind.to_ascii_uppercase().as_str() {
                "CSV_CR" => export_csv_cr(ds, &path, env.settings.n_pct_range)?,
                "CSV_GRAPH" => {
                    let graph = compute_spectrogram(ds, env.settings.median_range)?;
                    export_csv_graph(&graph, &path)?;
                }
                other => return Err(Error::Domain(format!("unknown export type `{other}`"))),
            }
        }
        other => {
            return Err(Error::UnknownFunction {
                name: other.to_string(),
                line: call.pos.line,
                column: call.pos.column,
            })
        }
    }
    Ok(())
}

fn run_loop(env: &mut Environment, lp: &Loop) -> Result<()> {
    let args = Args {
        env,
        args: &lp.args,
    };
    let count = args.non_negative("count")?.unwrap_or(0);
    if count == 0 {
        return Err(Error::Domain(format!("{} needs count >= 1", lp.kind.name())));
    }
    let user_dir = args.text("dir")?.map(|d| env.resolve(&d));

    // Without a user directory the cycle files live in a scratch directory
    // removed after the loop.
    let scratch;
    let dir = match user_dir {
        Some(d) => {
            fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
            d
        }
        None => {
            let parent = env.temp_dir.clone().unwrap_or_else(std::env::temp_dir);
            scratch = tempfile::Builder::new()
                .prefix("rpys-loop-")
                .tempdir_in(&parent)
                .map_err(|e| Error::io(&parent, e))?;
            scratch.path().to_path_buf()
        }
    };

    let saved_var = env.vars.get(&lp.var).copied();
    let saved_index = env.sample_index;
    let mut files = Vec::with_capacity(count as usize);
    let mut result = Ok(());
    for index in 0..count {
        env.vars.insert(lp.var.clone(), index as i64);
        env.sample_index = index;
        env.dataset = None;
        if let Err(e) = run_block(env, &lp.body) {
            result = Err(e);
            break;
        }
        let ds = match env.take_dataset(lp.kind.name()) {
            Ok(ds) => ds,
            Err(e) => {
                result = Err(e);
                break;
            }
        };
        let path = dir.join(format!("cycle_{index:05}.cre"));
        if let Err(e) = save_cre(&ds, &env.settings, &path) {
            result = Err(e);
            break;
        }
        files.push(path);
        if lp.kind == LoopKind::ForEach {
            env.dataset = Some(ds);
        }
    }
    match saved_var {
        Some(v) => env.vars.insert(lp.var.clone(), v),
        None => env.vars.remove(&lp.var),
    };
    env.sample_index = saved_index;
    result?;

    if lp.kind == LoopKind::ForEachUnion {
        env.dataset = Some(union_cre(&files)?);
    }
    Ok(())
}

fn run_block(env: &mut Environment, body: &[Statement]) -> Result<()> {
    for s in body {
        match s {
            Statement::Call(c) => run_call(env, c).map_err(|e| match e {
                e @ Error::Script { .. } => e,
                e => Error::Script {
                    line: c.pos.line,
                    column: c.pos.column,
                    call: c.name.clone(),
                    source: Box::new(e),
                },
            })?,
            Statement::Loop(l) => run_loop(env, l).map_err(|e| match e {
                e @ Error::Script { .. } => e,
                e => Error::Script {
                    line: l.pos.line,
                    column: l.pos.column,
                    call: l.kind.name().to_string(),
                    source: Box::new(e),
                },
            })?,
            Statement::Use { body, .. } => run_block(env, body)?,
        }
    }
    Ok(())
}

/// Runs the statements of `program` in order against `env`.
pub fn execute(program: &ScriptProgram, env: &mut Environment) -> Result<()> {
    run_block(env, &program.statements)
}
