//! Scenario runner, file formats and self test behind the `gpake` binary.

mod config;
mod files;
mod scenario;
mod selftest;

use thiserror::Error;

use crate::attack::AttackError;
use crate::group::GroupError;
use crate::protocol::ProtocolError;

pub use config::{AdversaryKind, GroupChoice, ScenarioConfig};
pub use files::{
    load_dictionary, parse_dictionary, read_report, read_transcript, to_canonical_json,
    write_report, write_transcript,
};
pub use scenario::{run_scenario, ScenarioOutput, SessionKeys, Transcript};
pub use selftest::{selftest, CheckResult, SelftestHooks};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("group parameters: {0}")]
    Group(#[from] GroupError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: String, reason: String },
    #[error("dictionary {0} has no entries")]
    EmptyDictionary(String),
    /// An honest run failed; `transcript` holds what happened up to and
    /// including the failing step.
    #[error("protocol failure at {step}: {source}")]
    Protocol {
        step: &'static str,
        source: ProtocolError,
        transcript: Box<Transcript>,
    },
    #[error("attack aborted: {0}")]
    Attack(AttackError),
}

impl SimError {
    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_)
            | SimError::Group(_)
            | SimError::Format { .. }
            | SimError::EmptyDictionary(_)
            | SimError::Io { .. } => 2,
            SimError::Protocol { .. } | SimError::Attack(_) => 3,
        }
    }
}
