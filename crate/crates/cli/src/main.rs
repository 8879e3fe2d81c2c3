mod args;
mod commands;
mod plot;
mod run;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Command};
use run::{absolute, absolute_opt, read_input, Run};

/// Makes input paths absolute so a manifest can be replayed from anywhere.
fn normalise(cmd: &mut Command) -> Result<()> {
    let inputs = match cmd {
        Command::Ground(c) => Some(&mut c.inputs),
        Command::Reason(c) => Some(&mut c.inputs),
        Command::Explain(c) => Some(&mut c.inputs),
        Command::Learn(c) => {
            absolute_opt("--lang", &mut c.lang)?;
            absolute_opt("--modes", &mut c.modes)?;
            absolute_opt("--examples", &mut c.examples)?;
            absolute_opt("--background", &mut c.background)?;
            absolute_opt("--facts", &mut c.facts)?;
            None
        }
        Command::Rerun(c) => {
            absolute("--manifest", &mut c.manifest)?;
            None
        }
        Command::Bench(_) | Command::GenData(_) => None,
    };
    if let Some(i) = inputs {
        absolute("--lang", &mut i.lang)?;
        absolute("--program", &mut i.program)?;
        absolute_opt("--facts", &mut i.facts)?;
    }
    Ok(())
}

fn execute(mut cli: Cli, argv: &[String]) -> Result<()> {
    normalise(&mut cli.command)?;
    if let Command::Rerun(r) = &cli.command {
        let text = read_input("--manifest", &r.manifest)?;
        let v: serde_json::Value = serde_json::from_str(&text).context("--manifest: not JSON")?;
        let mut prev: Cli = serde_json::from_value(v.get("config").cloned().unwrap_or_default())
            .context("--manifest: missing or malformed `config`")?;
        if matches!(prev.command, Command::Rerun(_)) {
            bail!("--manifest: records a rerun, not an original run");
        }
        prev.out = cli.out.clone();
        return execute(prev, argv);
    }
    let mut run = Run::new(&cli)?;
    match &cli.command {
        Command::Ground(c) => commands::ground(c, &mut run)?,
        Command::Reason(c) => commands::reason(c, &mut run)?,
        Command::Learn(c) => commands::learn(c, &mut run)?,
        Command::Explain(c) => commands::explain(c, &mut run)?,
        Command::Bench(c) => commands::bench(c, &mut run)?,
        Command::GenData(c) => commands::gen_data(c, &mut run)?,
        Command::Rerun(_) => unreachable!("handled above"),
    }
    run.finish(&cli, argv)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
