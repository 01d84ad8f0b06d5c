//! `claimcheck` command-line entry point.

mod args;
mod backend;
mod commands;
mod config;
mod output;

use std::error::Error as StdError;
use std::process::ExitCode;

use clap::Parser;
use claimcheck::decompose::{CompletionError, DecomposeError};
use claimcheck::entail::EntailError;
use claimcheck::oracle::OracleError;
use claimcheck::retrieval::RetrievalError;
use claimcheck::scorer::ScoreError;

use crate::args::Cli;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_BACKEND: u8 = 3;

/// Bad flags or flag combinations.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl StdError for UsageError {}

fn is_backend_score_error(e: &ScoreError) -> bool {
    !matches!(e, ScoreError::InvalidRequest(_))
}

fn is_backend_entail_error(e: &EntailError) -> bool {
    matches!(e, EntailError::Score(s) if is_backend_score_error(s))
}

fn is_backend_error(e: &(dyn StdError + 'static)) -> bool {
    if let Some(e) = e.downcast_ref::<ScoreError>() {
        return is_backend_score_error(e);
    }
    if let Some(e) = e.downcast_ref::<CompletionError>() {
        return !matches!(e, CompletionError::Fixture(_));
    }
    if let Some(e) = e.downcast_ref::<EntailError>() {
        return is_backend_entail_error(e);
    }
    if let Some(e) = e.downcast_ref::<RetrievalError>() {
        return match e {
            RetrievalError::Score(s) => is_backend_score_error(s),
            RetrievalError::Entail(en) => is_backend_entail_error(en),
            _ => false,
        };
    }
    if let Some(OracleError::Entail(en)) = e.downcast_ref::<OracleError>() {
        return is_backend_entail_error(en);
    }
    if let Some(DecomposeError::Client { source, .. }) = e.downcast_ref::<DecomposeError>() {
        return !matches!(source, CompletionError::Fixture(_));
    }
    false
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|c| c.is::<UsageError>()) {
        EXIT_USAGE
    } else if err.chain().any(is_backend_error) {
        EXIT_BACKEND
    } else {
        EXIT_DATA
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            log::error!("{e:#}");
            ExitCode::from(code)
        }
    }
}
