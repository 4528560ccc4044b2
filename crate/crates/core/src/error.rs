use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// Each variant carries the operation that raised it as `"module::operation"`,
/// so callers (the CLI in particular) can report where a failure originated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument {value} outside the supported domain ({reason})")]
    Domain {
        func: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{func}: result overflows at x = {value}; use the exponentially scaled variant")]
    Range { func: &'static str, value: f64 },

    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("{func}: denominator {denominator:e} is numerically zero")]
    Singular { func: &'static str, denominator: f64 },

    #[error("{func}: transform has a pole at s = 0")]
    Pole { func: &'static str },

    #[error("{func}: no sign change of the characteristic function on [{lo}, {hi}]")]
    Bracket { func: &'static str, lo: f64, hi: f64 },

    #[error("{func}: root {index} at x = {root} has residual {residual:e} above 1e-12")]
    Residual {
        func: &'static str,
        index: usize,
        root: f64,
        residual: f64,
    },

    #[error("{func}: oracle did not converge: {detail}")]
    Oracle { func: &'static str, detail: String },

    #[error("{func}: no zero of the response found in ({from}, {to}]")]
    Search { func: &'static str, from: f64, to: f64 },
}

impl Error {
    /// Name of the module that raised the error.
    pub fn module(&self) -> &'static str {
        let func = match self {
            Error::Validation(_) => return "material",
            Error::Domain { func, .. }
            | Error::Range { func, .. }
            | Error::Singular { func, .. }
            | Error::Pole { func }
            | Error::Bracket { func, .. }
            | Error::Residual { func, .. }
            | Error::Oracle { func, .. }
            | Error::Search { func, .. } => func,
        };
        func.split("::").next().unwrap_or(func)
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::Range { .. } => "range",
            Error::Validation(_) => "validation",
            Error::Singular { .. } => "singular",
            Error::Pole { .. } => "pole",
            Error::Bracket { .. } => "bracket",
            Error::Residual { .. } => "residual",
            Error::Oracle { .. } => "oracle",
            Error::Search { .. } => "search",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
