//! Configuration, analysis orchestration, reports and the built-in example
//! suite behind the `bloch-wco` binary.

pub mod analyze;
pub mod config;
pub mod fields;
pub mod report;
pub mod suite;

use thiserror::Error;

pub use analyze::run_analyze;
pub use config::{AnalysisConfig, Check, Target};
pub use fields::run_fields;
pub use report::Report;
pub use suite::{run_paper_suite, SuiteOptions, SuiteOutcome};

/// Environment variable that replaces the default engine seed.
pub const SEED_ENV: &str = "BLOCH_WCO_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Engine(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Config(_) => 2,
            CliError::Engine(_) => 3,
        }
    }
}

impl From<bloch_wco::Error> for CliError {
    fn from(e: bloch_wco::Error) -> Self {
        use bloch_wco::Error as E;
        match e {
            E::InvalidDomain(_)
            | E::Argument(_)
            | E::Syntax { .. }
            | E::IndexOutOfRange { .. }
            | E::ConjNonConstant { .. } => CliError::Config(e.to_string()),
            E::OutsideDomain { .. }
            | E::Singularity { .. }
            | E::Numerical(_)
            | E::Engine(_)
            | E::NotSelfMap { .. } => CliError::Engine(e.to_string()),
        }
    }
}

/// Seed precedence: command-line flag, then the config file, then
/// [`SEED_ENV`], then the engine default.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={s:?} is not an unsigned integer"))),
        None => Ok(bloch_wco::SupConfig::default().seed),
    }
}

/// [`resolve_seed`] reading the environment.
pub fn seed_from_env(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    resolve_seed(flag, config, std::env::var(SEED_ENV).ok().as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some(2), Some("3")).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some(2), Some("3")).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, Some(" 3 ")).unwrap(), 3);
        assert_eq!(resolve_seed(None, None, None).unwrap(), 42);
        assert_eq!(resolve_seed(None, None, Some("")).unwrap(), 42);
        assert_eq!(resolve_seed(None, None, Some("x")).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn error_classes() {
        let e: CliError = bloch_wco::Error::Syntax { pos: 3, msg: "x".into() }.into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = bloch_wco::Error::NotSelfMap { witness: "a".into(), image: "b".into() }.into();
        assert_eq!(e.exit_code(), 3);
    }
}
