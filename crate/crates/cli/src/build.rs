//! `semviz build`: parse input dumps, build the index, write the artifact and
//! a rejects report.

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use semviz_core::index::{build_index, BuildOptions, Index};
use semviz_core::ingest::{
    align_by_pmid, canonicalize, parse_article_metadata, parse_causal_assertions, parse_kg_relations, AliasMap,
    ParsedRelations, Reject,
};
use semviz_core::{IngestError, Taxonomy};
use serde::Serialize;

pub const REJECTS_FILE: &str = "rejects.json";

#[derive(Debug, Clone, Default)]
pub struct BuildInputs {
    pub ca: Vec<PathBuf>,
    pub kg: Vec<PathBuf>,
    pub meta: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub out: PathBuf,
}

/// A fatal build failure with the process exit code it maps to.
#[derive(Debug)]
pub struct BuildFailure {
    pub exit_code: u8,
    pub message: String,
}

impl BuildFailure {
    fn io(path: &Path, e: std::io::Error) -> BuildFailure {
        BuildFailure { exit_code: 1, message: format!("{}: {e}", path.display()) }
    }

    fn format(path: &Path, e: impl std::fmt::Display) -> BuildFailure {
        BuildFailure { exit_code: 2, message: format!("{}: {e}", path.display()) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildReport {
    pub records: usize,
    pub docs: usize,
    pub articles: usize,
    pub aligned_docs: usize,
    pub functional_types: usize,
    pub input_lines: usize,
    pub duplicate_pmids: usize,
    pub used_builtin_taxonomy: bool,
    pub warnings: Vec<String>,
    pub rejects: Vec<Reject>,
}

fn open(path: &Path) -> Result<BufReader<File>, BuildFailure> {
    File::open(path).map(BufReader::new).map_err(|e| BuildFailure::io(path, e))
}

fn ingest_err(path: &Path, e: IngestError) -> BuildFailure {
    match e {
        IngestError::Io(io) => BuildFailure::io(path, io),
        other => BuildFailure::format(path, other),
    }
}

fn read_stopwords(path: &Path) -> Result<Vec<String>, BuildFailure> {
    let mut out = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|e| BuildFailure::io(path, e))?;
        let word = line.trim();
        if !word.is_empty() && !word.starts_with('#') {
            out.push(word.to_lowercase());
        }
    }
    Ok(out)
}

/// Parses every input and builds the in-memory index.
pub fn build(inputs: &BuildInputs) -> Result<(Index, BuildReport), BuildFailure> {
    // fail on any missing path before doing work
    let all_paths = inputs.ca.iter().chain(&inputs.kg).chain(&inputs.meta).chain(&inputs.taxonomy).chain(&inputs.aliases).chain(&inputs.stopwords);
    for p in all_paths {
        if !p.is_file() {
            return Err(BuildFailure { exit_code: 1, message: format!("{}: input file not found", p.display()) });
        }
    }
    let mut warnings = Vec::new();
    let taxonomy = match &inputs.taxonomy {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| BuildFailure::io(p, e))?;
            Taxonomy::from_toml_str(&text).map_err(|e| BuildFailure::format(p, e))?
        }
        None => {
            warnings.push("no --taxonomy given; using the built-in relation taxonomy".to_string());
            Taxonomy::builtin()
        }
    };
    let aliases = match &inputs.aliases {
        Some(p) => AliasMap::parse(open(p)?).map_err(|e| ingest_err(p, e))?,
        None => AliasMap::new(),
    };
    let stopwords = match &inputs.stopwords {
        Some(p) => read_stopwords(p)?,
        None => Vec::new(),
    };

    let mut records = Vec::new();
    let mut docs = Vec::new();
    let mut rejects = Vec::new();
    let mut input_lines = 0;
    type Parser = fn(BufReader<File>, usize) -> Result<ParsedRelations, IngestError>;
    let parsers: [(&[PathBuf], Parser); 2] =
        [(&inputs.ca, parse_causal_assertions), (&inputs.kg, parse_kg_relations)];
    for (paths, parse) in parsers {
        for (i, p) in paths.iter().enumerate() {
            let parsed = parse(open(p)?, i).map_err(|e| ingest_err(p, e))?;
            input_lines += parsed.input_lines;
            records.extend(parsed.records);
            docs.extend(parsed.docs);
            rejects.extend(parsed.rejects.into_iter().map(|r| Reject { file: p.display().to_string(), ..r }));
        }
    }
    let (articles, duplicate_pmids) = match &inputs.meta {
        Some(p) => {
            let parsed = parse_article_metadata(open(p)?).map_err(|e| ingest_err(p, e))?;
            warnings.extend(parsed.warnings.into_iter().map(|w| format!("{}: {w}", p.display())));
            (parsed.articles, parsed.duplicate_pmids)
        }
        None => (Vec::new(), 0),
    };

    let records = canonicalize(records, &aliases);
    let corpus = align_by_pmid(docs, articles);
    let aligned_docs = corpus.docs.iter().filter(|d| d.is_aligned()).count();
    let index = build_index(records, corpus, &taxonomy, &BuildOptions { aliases, stopwords })
        .map_err(|e| BuildFailure { exit_code: 2, message: e.to_string() })?;
    let report = BuildReport {
        records: index.records().len(),
        docs: index.num_docs(),
        articles: index.articles().len(),
        aligned_docs,
        functional_types: index.functional_types().len(),
        input_lines,
        duplicate_pmids,
        used_builtin_taxonomy: inputs.taxonomy.is_none(),
        warnings,
        rejects,
    };
    Ok((index, report))
}

/// Builds and writes `out/index.bin` and `out/rejects.json`.
pub fn run(inputs: &BuildInputs) -> Result<BuildReport, BuildFailure> {
    let (index, report) = build(inputs)?;
    let written = index.save(&inputs.out).map_err(|e| BuildFailure { exit_code: 1, message: e.to_string() })?;
    let dir = written.parent().map(Path::to_path_buf).unwrap_or_default();
    let rejects_path = dir.join(REJECTS_FILE);
    let json = serde_json::to_vec_pretty(&report).expect("report serializes");
    fs::write(&rejects_path, json).map_err(|e| BuildFailure::io(&rejects_path, e))?;
    Ok(report)
}
