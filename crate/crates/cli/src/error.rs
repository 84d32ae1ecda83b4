use std::fmt;

use dphbmu::sampler::SamplerError;
use dphbmu::synth::SynthError;

/// Error category, which fixes the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Bad flags or flag combinations.
    Usage,
    /// Input files that do not parse, validate or fit together.
    Input,
    /// Reading or writing files failed.
    Io,
    /// Sampling or analysis failed at run time.
    Run,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Usage => 2,
            Category::Input => 3,
            Category::Io => 4,
            Category::Run => 5,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub error: anyhow::Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl fmt::Display) -> CliError {
    CliError {
        category: Category::Usage,
        error: anyhow::anyhow!("{msg}"),
    }
}

pub fn input(msg: impl fmt::Display) -> CliError {
    CliError {
        category: Category::Input,
        error: anyhow::anyhow!("{msg}"),
    }
}

/// Attach a category and context to any error.
pub trait Categorize<T> {
    fn or_input(self, context: impl fmt::Display) -> CliResult<T>;
    fn or_io(self, context: impl fmt::Display) -> CliResult<T>;
    fn or_run(self, context: impl fmt::Display) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Categorize<T> for Result<T, E> {
    fn or_input(self, context: impl fmt::Display) -> CliResult<T> {
        wrap(self, Category::Input, context)
    }

    fn or_io(self, context: impl fmt::Display) -> CliResult<T> {
        wrap(self, Category::Io, context)
    }

    fn or_run(self, context: impl fmt::Display) -> CliResult<T> {
        wrap(self, Category::Run, context)
    }
}

fn wrap<T, E: Into<anyhow::Error>>(
    r: Result<T, E>,
    category: Category,
    context: impl fmt::Display,
) -> CliResult<T> {
    r.map_err(|e| CliError {
        category,
        error: e.into().context(context.to_string()),
    })
}

pub fn sampler_category(e: &SamplerError) -> Category {
    match e {
        SamplerError::InvalidConfig(_)
        | SamplerError::DimensionMismatch(_)
        | SamplerError::InvalidObservations(_)
        | SamplerError::InvalidState(_) => Category::Input,
        SamplerError::Io(_) => Category::Io,
        SamplerError::Pool(_) | SamplerError::Format(_) => Category::Run,
    }
}

pub fn synth_category(e: &SynthError) -> Category {
    match e {
        SynthError::Io(_) => Category::Io,
        SynthError::Simulation { .. } => Category::Run,
        _ => Category::Input,
    }
}

pub fn from_sampler(e: SamplerError, context: impl fmt::Display) -> CliError {
    CliError {
        category: sampler_category(&e),
        error: anyhow::Error::from(e).context(context.to_string()),
    }
}

pub fn from_synth(e: SynthError, context: impl fmt::Display) -> CliError {
    CliError {
        category: synth_category(&e),
        error: anyhow::Error::from(e).context(context.to_string()),
    }
}
