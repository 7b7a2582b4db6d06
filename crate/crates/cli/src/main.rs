use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

mod args;
mod commands;
mod inputs;
mod report;

use args::{Cli, Format};
use report::{emit_columns, Report};

fn render(report: &Report, format: Format) -> Result<String> {
    Ok(match format {
        Format::Human => report.human(),
        Format::Structured => report.structured(),
        Format::Columns => match &report.columns {
            Some(rows) => emit_columns(&report.config, rows),
            None => bail!(
                "columns output is available for support, reproduce-paper-example and certify --method definition"
            ),
        },
    })
}

fn execute(cli: &Cli) -> Result<u8> {
    let report = commands::run(&cli.command)?;
    let common = commands::common(&cli.command);
    let text = render(&report, common.format)?;
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
