//! Spec I/O, verification reports and fixture search behind the `apm` binary.

use std::fmt;

pub mod report;
pub mod search;
pub mod spec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Validation(apm_core::Error),
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => EXIT_IO,
            CliError::Validation(_) | CliError::Config(_) => EXIT_VALIDATION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "IoError: {m}"),
            CliError::Parse(m) => write!(f, "ParseError: {m}"),
            CliError::Validation(e) => write!(f, "{}: {e}", e.name()),
            CliError::Config(m) => write!(f, "ConfigError: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<apm_core::Error> for CliError {
    fn from(e: apm_core::Error) -> Self {
        CliError::Validation(e)
    }
}

/// Loads and validates a spec file.
pub fn load_manifold(
    path: &std::path::Path,
) -> Result<(spec::ManifoldSpec, apm_core::FrameManifold), CliError> {
    let spec = spec::ManifoldSpec::load(path)?;
    let m = spec.to_manifold()?;
    Ok((spec, m))
}

/// Display name of a spec: its `name` field, or the file stem.
pub fn display_name(spec: &spec::ManifoldSpec, path: &std::path::Path) -> String {
    if spec.name.is_empty() {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    } else {
        spec.name.clone()
    }
}
