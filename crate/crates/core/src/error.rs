use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Invalid taxonomy, alias or build configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration syntax error: {0}")]
    Syntax(String),
    #[error("relation type entry #{entry} ({name:?}): {reason}")]
    InvalidEntry { entry: usize, name: String, reason: String },
    #[error("duplicate relation type `{0}`")]
    DuplicateType(String),
    #[error("alias file line {line}: {reason}")]
    InvalidAlias { line: usize, reason: String },
    #[error("alias cycle through `{0}`")]
    AliasCycle(String),
    #[error("relation filter must name at least one relation type")]
    EmptyRelationFilter,
}

/// Fatal ingestion failures. Per-line problems are reported as rejects instead.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("metadata table is missing required column `{0}`")]
    MissingColumn(String),
    #[error("metadata table: {0}")]
    Table(String),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("duplicate relation record id `{0}`")]
    DuplicateRecordId(String),
    #[error("duplicate evidence document id `{0}`")]
    DuplicateDocId(String),
    #[error("record `{record}` references unknown evidence document `{doc}`")]
    UnknownEvidence { record: String, doc: String },
    #[error("record `{0}` has no evidence")]
    MissingEvidence(String),
}

/// Errors raised while answering a query against a built index.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{0}` cannot be used here")]
    UnsupportedField(String),
    #[error("heat map axes must be distinct fields (both are `{0}`)")]
    SameAxis(String),
    #[error("invalid parameter `{param}`: {reason}")]
    InvalidParam { param: String, reason: String },
    #[error("{kind} `{id}` not found")]
    NotFound { kind: &'static str, id: String },
    #[error("functional type name `{name}` is ambiguous; use one of its ids: {candidates:?}")]
    Ambiguous { name: String, candidates: Vec<String> },
}

/// Reading or writing the serialized index artifact.
#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: not a semviz index artifact")]
    BadMagic { path: PathBuf },
    #[error("{path}: unsupported index format version {found} (expected {expected})")]
    Version { path: PathBuf, found: u32, expected: u32 },
    #[error("{path}: corrupt index payload: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}
