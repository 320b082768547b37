mod commands;
mod config;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use ekr_core::Error;

use config::{resolve, Cli};

const EXIT_FAILURES: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_seed = std::env::var("EKR_SEED").ok();
    let cfg = match resolve(cli.flags, env_seed.as_deref()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let start = Instant::now();
    let outcome = match commands::run(cli.command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_code(&e));
        }
    };
    let config = report::to_value(&cfg);
    let value = report::report_value(
        cli.command.name(),
        config,
        &outcome,
        start.elapsed().as_secs_f64(),
    );
    let written = report::render(&value, cfg.format)
        .and_then(|bytes| report::emit(&bytes, cfg.output.as_deref()));
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    for f in &outcome.failures {
        eprintln!("failure: {f}");
    }
    ExitCode::from(verdict_code(&outcome))
}

fn verdict_code(outcome: &report::Outcome) -> u8 {
    if outcome.failures.is_empty() {
        0
    } else {
        EXIT_FAILURES
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        let mut o = report::Outcome::default();
        assert_eq!(verdict_code(&o), 0);
        o.failures.push("x".into());
        assert_eq!(verdict_code(&o), 1);
        assert_eq!(error_code(&Error::Resource("r".into())), 3);
        assert_eq!(error_code(&Error::Domain("d".into())), 2);
        assert_eq!(error_code(&Error::Contract("c".into())), 2);
    }
}
