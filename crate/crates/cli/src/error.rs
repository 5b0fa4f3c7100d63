use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("change-loss assumption violated: sup theta* = {sup_theta_star} exceeds L = {lower_support}")]
    Assumption { sup_theta_star: f64, lower_support: f64 },
    #[error("menu failed audit: {0}")]
    AuditFailed(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Input(_) => ExitCode::from(2),
            Self::Assumption { .. } => ExitCode::from(3),
            Self::AuditFailed(_) | Self::Output(_) => ExitCode::from(1),
        }
    }
}

impl From<reinmenu::Error> for CliError {
    fn from(e: reinmenu::Error) -> Self {
        match e {
            reinmenu::Error::AssumptionViolated {
                sup_theta_star,
                lower_support,
            } => Self::Assumption {
                sup_theta_star,
                lower_support,
            },
            other => Self::Input(other.to_string()),
        }
    }
}
