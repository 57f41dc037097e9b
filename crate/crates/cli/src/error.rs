use std::fmt;

use reorg_core::Error;

/// A failure with its exit status: 2 for bad input, 1 for everything that
/// goes wrong while running.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let usage = matches!(
            err,
            Error::StakeOutOfRange(_)
                | Error::OutOfRange { .. }
                | Error::ProposalNotInflated { .. }
                | Error::InitialEndorsersOutOfRange { .. }
                | Error::EndorsementsOutOfRange { .. }
                | Error::InvalidGrid(_)
                | Error::InvalidSimulation(_)
                | Error::WindowTooSmall(_)
                | Error::EmptyState
                | Error::NoSamples
        );
        if usage {
            CliError::Usage(err.to_string())
        } else {
            CliError::Runtime(err.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
