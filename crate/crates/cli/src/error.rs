//! Command errors mapped onto the documented exit codes.

use std::fmt;

use cwsim_core::features::FeatureError;
use cwsim_core::learn::LearnError;
use cwsim_core::metrics::MetricsError;
use cwsim_core::simlex::SimlexError;
use cwsim_core::wordnet::WordnetError;

use crate::config::ConfigError;

/// One error per exit-code class: usage = 1, data = 2, numeric = 3.
#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 1,
            CmdError::Data(_) => 2,
            CmdError::Numeric(_) => 3,
        }
    }

}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(m) => write!(f, "usage error: {m}"),
            CmdError::Data(m) => write!(f, "data error: {m}"),
            CmdError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CmdError {}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Usage(e.message)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Data(e.to_string())
    }
}

impl From<SimlexError> for CmdError {
    fn from(e: SimlexError) -> Self {
        CmdError::Data(e.to_string())
    }
}

impl From<WordnetError> for CmdError {
    fn from(e: WordnetError) -> Self {
        CmdError::Data(e.to_string())
    }
}

impl From<FeatureError> for CmdError {
    fn from(e: FeatureError) -> Self {
        match e {
            FeatureError::NoCoverage | FeatureError::Degenerate { .. } => {
                CmdError::Numeric(e.to_string())
            }
            other => CmdError::Data(other.to_string()),
        }
    }
}

impl From<LearnError> for CmdError {
    fn from(e: LearnError) -> Self {
        CmdError::Data(e.to_string())
    }
}

impl From<MetricsError> for CmdError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::ZeroVariance(_)
            | MetricsError::ConstantGold
            | MetricsError::NoComparablePairs => CmdError::Numeric(e.to_string()),
            other => CmdError::Data(other.to_string()),
        }
    }
}
