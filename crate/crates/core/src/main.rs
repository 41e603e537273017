use std::io::Write;
use std::process::ExitCode;

use ee_opt::cli::{
    apply_overrides, parse_args, parse_run_config, run, CliError, RunConfig, CONFIG_ENV,
};

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let subcommand = cli.command.name();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json(subcommand));
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &ee_opt::cli::Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(Into::into));
    let mut cfg = match path {
        Some(p) => parse_run_config(&std::fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    apply_overrides(&mut cfg, cli);

    let mut buf = Vec::new();
    run(&cli.command, &cfg, &mut buf)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
