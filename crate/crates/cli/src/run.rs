use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use reasongraph::reason::Exec;
use serde::Serialize;

use crate::args::Cli;

/// Output directory bookkeeping shared by every command.
pub struct Run {
    pub out: PathBuf,
    pub seed: u64,
    pub exec: Exec,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(cli: &Cli) -> Result<Run> {
        fs::create_dir_all(&cli.out).with_context(|| format!("--out: cannot create {}", cli.out.display()))?;
        let exec = match cli.threads {
            Some(1) => Exec::Sequential,
            Some(n) => {
                // A second build in the same process (rerun) keeps the first pool.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
                Exec::Parallel
            }
            None => Exec::Parallel,
        };
        Ok(Run { out: cli.out.clone(), seed: cli.seed, exec, outputs: Vec::new() })
    }

    /// Resolves `rel` inside the output directory, creating parents.
    pub fn path(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.out.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).with_context(|| format!("--out: cannot create {}", parent.display()))?;
        }
        self.outputs.push(rel.to_string());
        Ok(p)
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> Result<()> {
        let p = self.path(rel)?;
        fs::write(&p, contents).with_context(|| format!("--out: cannot write {}", p.display()))
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(rel, &(text + "\n"))
    }

    pub fn csv(&mut self, rel: &str) -> Result<csv::Writer<fs::File>> {
        let p = self.path(rel)?;
        csv::Writer::from_path(&p).with_context(|| format!("--out: cannot write {}", p.display()))
    }

    pub fn finish(mut self, cli: &Cli, argv: &[String]) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            version: &'a str,
            argv: &'a [String],
            config: &'a Cli,
            outputs: &'a [String],
        }
        self.outputs.sort();
        self.outputs.dedup();
        let m = Manifest { version: env!("CARGO_PKG_VERSION"), argv, config: cli, outputs: &self.outputs };
        let text = serde_json::to_string_pretty(&m)? + "\n";
        let p = self.out.join("manifest.json");
        fs::write(&p, text).with_context(|| format!("--out: cannot write {}", p.display()))
    }
}

/// Reads an input file, naming the flag it came from on failure.
pub fn read_input(flag: &str, path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{flag}: cannot read {}", path.display()))
}

pub fn absolute(flag: &str, p: &mut PathBuf) -> Result<()> {
    *p = std::path::absolute(&*p).with_context(|| format!("{flag}: bad path {}", p.display()))?;
    Ok(())
}

pub fn absolute_opt(flag: &str, p: &mut Option<PathBuf>) -> Result<()> {
    if let Some(p) = p {
        absolute(flag, p)?;
    }
    Ok(())
}

pub fn nonempty<T>(flag: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        bail!("{flag}: expected at least one value");
    }
    Ok(())
}
