use std::fmt;
use std::process::ExitCode;

use emoprompt_core::corpus::LoadError;
use emoprompt_core::evaluation::EvalError;
use emoprompt_core::gateway::GatewayError;
use emoprompt_core::orchestrator::RunError;
use emoprompt_core::promptgen::PromptError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Other = 1,
    Usage = 2,
    Data = 3,
    Transport = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Data,
            message: message.into(),
        }
    }

    pub fn other(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Other,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<PromptError> for CliError {
    fn from(e: PromptError) -> Self {
        match e {
            PromptError::InvalidCandidateCount(_) => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::other(e.to_string())
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        let kind = match e.root() {
            RunError::Config(_) | RunError::EmptyGrid => Kind::Usage,
            RunError::Prompt(PromptError::InvalidCandidateCount(_)) => Kind::Usage,
            RunError::Load(_) | RunError::Data(_) | RunError::Eval(_) | RunError::Prompt(_) => Kind::Data,
            RunError::Transport(_) => Kind::Transport,
            RunError::Gateway(GatewayError::Journal { .. }) => Kind::Other,
            RunError::Gateway(_) => Kind::Transport,
            RunError::Io { .. } | RunError::Aborted { .. } => Kind::Other,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}
