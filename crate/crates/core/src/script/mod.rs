//! A small Groovy-flavoured batch language.
//!
//! ```text
//! importFile(file: "savedrecs.txt", RPY: [1900, 2000, false])
//! cluster(threshold: 0.8, volume: true)
//! merge()
//! exportFile(file: "graph.csv", type: "CSV_GRAPH")
//! ```

pub mod ast;
mod exec;
mod functions;
mod parser;

pub use ast::ScriptProgram;
pub use exec::{execute, Environment, Value};
pub use functions::FUNCTIONS;
pub use parser::parse_script;

use std::path::Path;

use crate::error::{Error, Result};

/// Parses and executes the script at `path`. Relative file names in the
/// script resolve against the script's directory; `echo` copies output
/// lines to stderr.
pub fn run_script_file(
    path: &Path,
    seed: u64,
    temp_dir: Option<&Path>,
    echo: bool,
) -> Result<Environment> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let program = parse_script(&src)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut env = Environment::new(dir).with_seed(seed);
    env.temp_dir = temp_dir.map(Path::to_path_buf);
    env.echo = echo;
    execute(&program, &mut env)?;
    Ok(env)
}
