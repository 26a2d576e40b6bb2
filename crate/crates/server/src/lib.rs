//! HTTP API and command-line front end for `mddconf`.

pub mod api;
pub mod cli;
pub mod wire;

use mddconf::artifact::{Artifact, CompileError, CompileOptions};
use mddconf::model::{parse_model, Catalogue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentKind {
    /// JSON model document.
    Model,
    /// CSV catalogue of products.
    Catalogue,
}

impl DocumentKind {
    pub fn from_path(path: &std::path::Path) -> DocumentKind {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => DocumentKind::Catalogue,
            _ => DocumentKind::Model,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Limit(String),
}

impl From<CompileError> for LoadError {
    fn from(e: CompileError) -> Self {
        if e.is_limit() {
            LoadError::Limit(e.to_string())
        } else {
            LoadError::Parse(e.to_string())
        }
    }
}

/// Parse and compile a model or catalogue document.
pub fn compile_document(text: &str, kind: DocumentKind, options: CompileOptions) -> Result<Artifact, LoadError> {
    match kind {
        DocumentKind::Model => {
            let model = parse_model(text).map_err(|e| LoadError::from(CompileError::from(e)))?;
            Ok(Artifact::compile(&model, options)?)
        }
        DocumentKind::Catalogue => {
            let catalogue = Catalogue::parse(text).map_err(|e| LoadError::from(CompileError::from(e)))?;
            Ok(Artifact::from_catalogue(&catalogue)?)
        }
    }
}
