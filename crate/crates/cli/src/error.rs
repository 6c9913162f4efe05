use colotame_core::Error;

/// Failure of a command, carrying its exit code class.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Certificate(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Certificate(_) => 3,
            Self::Numeric(_) | Self::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Certificate(_) => "certificate",
            Self::Numeric(_) => "numeric",
            Self::Io(_) => "io",
        }
    }

    /// Single-line `error kind=... code=... message="..."` form for stderr.
    pub fn line(&self) -> String {
        let message = self
            .to_string()
            .replace('\\', "\\\\")
            .replace('"', "\\\"")
            .replace('\n', " ");
        format!(
            "error kind={} code={} message=\"{message}\"",
            self.kind(),
            self.exit_code()
        )
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::InvalidConfig(_)
            | Error::VanishingDerivative { .. }
            | Error::InvalidGrading(_)
            | Error::InvalidArgument(_)
            | Error::DegenerateInput(_)
            | Error::InadmissibleTarget { .. }
            | Error::EtaRange { .. }
            | Error::Domain { .. } => Self::Config(message),
            Error::NotMember(_) | Error::PremiseViolated { .. } | Error::SolveFailed { .. } => {
                Self::Certificate(message)
            }
            _ => Self::Numeric(message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
