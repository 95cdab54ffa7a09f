//! Parsers for pre-extracted relation dumps and article metadata, entity
//! canonicalization, and PMID alignment of evidence with articles.
//!
//! Relation files are JSON lines. A malformed line never aborts parsing: it is
//! recorded as a [`Reject`] with its 1-based line number and parsing continues.
//! Blank lines are ignored and do not count as input lines.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Read};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{ConfigError, IngestError};

/// An entity mention: the canonical key used for indexing and the trimmed
/// surface form used for display.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Entity {
    pub canonical: String,
    pub display: String,
}

impl Entity {
    /// Entity with the identity alias mapping applied.
    pub fn from_surface(surface: &str) -> Entity {
        let display = surface.trim().to_string();
        Entity { canonical: display.to_lowercase(), display }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    CausalAssertion,
    KnowledgeGraph,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::CausalAssertion => "causal_assertion",
            Source::KnowledgeGraph => "knowledge_graph",
        }
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s.trim().to_lowercase().chars().filter(|c| *c != '_').collect();
        match folded.as_str() {
            "causalassertion" | "ca" => Ok(Source::CausalAssertion),
            "knowledgegraph" | "kg" => Ok(Source::KnowledgeGraph),
            _ => Err(format!("unknown source `{}`", s.trim())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    ProteinProtein,
    ChemicalGene,
    ChemicalDisease,
    GeneDisease,
}

impl PairKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::ProteinProtein => "protein_protein",
            PairKind::ChemicalGene => "chemical_gene",
            PairKind::ChemicalDisease => "chemical_disease",
            PairKind::GeneDisease => "gene_disease",
        }
    }

    pub fn source(self) -> Source {
        match self {
            PairKind::ProteinProtein => Source::CausalAssertion,
            _ => Source::KnowledgeGraph,
        }
    }
}

impl FromStr for PairKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s.trim().to_lowercase().chars().filter(|c| *c != '_').collect();
        match folded.as_str() {
            "proteinprotein" => Ok(PairKind::ProteinProtein),
            "chemicalgene" => Ok(PairKind::ChemicalGene),
            "chemicaldisease" => Ok(PairKind::ChemicalDisease),
            "genedisease" => Ok(PairKind::GeneDisease),
            _ => Err(format!("unknown pair_kind `{}`", s.trim())),
        }
    }
}

/// One extracted relation with the ids of its evidencing documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub id: String,
    pub subject: Entity,
    pub object: Entity,
    pub relation: String,
    pub source: Source,
    pub pair_kind: PairKind,
    pub evidence_ids: Vec<String>,
}

/// An evidencing sentence with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceDoc {
    pub id: String,
    pub sentence: String,
    pub pmid: Option<String>,
    pub url: Option<String>,
}

/// Calendar prefix `YYYY`, `YYYY-MM` or `YYYY-MM-DD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PublishDate {
    pub year: u16,
    pub month: Option<u8>,
    pub day: Option<u8>,
}

impl PublishDate {
    /// Facet value at month granularity; year-only dates stay `YYYY`.
    pub fn month_key(&self) -> String {
        match self.month {
            Some(m) => format!("{:04}-{:02}", self.year, m),
            None => format!("{:04}", self.year),
        }
    }

    pub fn year_key(&self) -> String {
        format!("{:04}", self.year)
    }
}

impl fmt::Display for PublishDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
            if let Some(d) = self.day {
                write!(f, "-{d:02}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PublishDate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("invalid publish_time `{s}`");
        let parts: Vec<&str> = s.split('-').collect();
        if parts.is_empty() || parts.len() > 3 {
            return Err(bad());
        }
        let digits = |p: &str, n: usize| p.len() == n && p.bytes().all(|b| b.is_ascii_digit());
        if !digits(parts[0], 4) {
            return Err(bad());
        }
        let year: u16 = parts[0].parse().map_err(|_| bad())?;
        let month = match parts.get(1) {
            Some(p) if digits(p, 2) => {
                let m: u8 = p.parse().map_err(|_| bad())?;
                if !(1..=12).contains(&m) {
                    return Err(bad());
                }
                Some(m)
            }
            Some(_) => return Err(bad()),
            None => None,
        };
        let day = match parts.get(2) {
            Some(p) if digits(p, 2) => {
                let d: u8 = p.parse().map_err(|_| bad())?;
                chrono::NaiveDate::from_ymd_opt(year.into(), month.unwrap_or(1).into(), d.into())
                    .ok_or_else(bad)?;
                Some(d)
            }
            Some(_) => return Err(bad()),
            None => None,
        };
        Ok(PublishDate { year, month, day })
    }
}

impl Serialize for PublishDate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PublishDate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleMeta {
    pub pmid: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub authors: Vec<String>,
    pub publish_time: Option<PublishDate>,
    pub journal: String,
}

/// Case-insensitive alias → canonical mapping, flattened so that no target is
/// itself an alias.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasMap {
    // folded alias -> display form of the canonical name
    map: BTreeMap<String, String>,
}

impl AliasMap {
    pub fn new() -> AliasMap {
        AliasMap::default()
    }

    /// Builds a flattened map from `(alias, canonical)` pairs. Chains are
    /// collapsed onto their final target; cycles are rejected.
    pub fn from_pairs<I, A, C>(pairs: I) -> Result<AliasMap, ConfigError>
    where
        I: IntoIterator<Item = (A, C)>,
        A: AsRef<str>,
        C: AsRef<str>,
    {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (alias, target) in pairs {
            let key = alias.as_ref().trim().to_lowercase();
            let target = target.as_ref().trim().to_string();
            if key.is_empty() || target.is_empty() || key == target.to_lowercase() {
                continue;
            }
            raw.entry(key).or_insert(target);
        }
        let mut map = BTreeMap::new();
        for key in raw.keys() {
            let mut seen = HashSet::new();
            seen.insert(key.clone());
            let mut target = raw[key].clone();
            while let Some(next) = raw.get(&target.to_lowercase()) {
                if !seen.insert(target.to_lowercase()) {
                    return Err(ConfigError::AliasCycle(key.clone()));
                }
                target = next.clone();
            }
            map.insert(key.clone(), target);
        }
        Ok(AliasMap { map })
    }

    /// Parses `alias<TAB>canonical` lines. Blank lines and `#` comments are skipped.
    pub fn parse<R: BufRead>(reader: R) -> Result<AliasMap, IngestError> {
        let mut pairs = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((alias, canonical)) = line.split_once('\t') else {
                return Err(IngestError::Table(
                    ConfigError::InvalidAlias { line: n + 1, reason: "expected alias<TAB>canonical".into() }
                        .to_string(),
                ));
            };
            pairs.push((alias.to_string(), canonical.to_string()));
        }
        AliasMap::from_pairs(pairs).map_err(|e| IngestError::Table(e.to_string()))
    }

    /// Canonical display form for `name`, when `name` is an alias.
    pub fn target(&self, name: &str) -> Option<&str> {
        self.map.get(&name.trim().to_lowercase()).map(String::as_str)
    }

    /// trim → case-fold → alias lookup.
    pub fn canonical_key(&self, name: &str) -> String {
        let folded = name.trim().to_lowercase();
        match self.map.get(&folded) {
            Some(target) => target.to_lowercase(),
            None => folded,
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.map.values().map(String::as_str)
    }
}

/// A line that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub file: String,
    pub line: usize,
    pub reason: String,
}

/// Output of one relation-file parse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedRelations {
    pub records: Vec<RelationRecord>,
    pub docs: Vec<EvidenceDoc>,
    pub rejects: Vec<Reject>,
    /// Non-blank lines seen; always `records.len() + rejects.len()`.
    pub input_lines: usize,
}

fn opt_string_or_number<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    let v = Option::<serde_json::Value>::deserialize(d)?;
    Ok(match v {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::String(s)) => {
            let s = s.trim().to_string();
            (!s.is_empty()).then_some(s)
        }
        Some(serde_json::Value::Number(n)) => Some(n.to_string()),
        Some(other) => return Err(serde::de::Error::custom(format!("expected string or number, got {other}"))),
    })
}

#[derive(Deserialize)]
struct CaLine {
    subject: String,
    object: String,
    relation_type: String,
    evidence: Vec<CaEvidence>,
}

#[derive(Deserialize)]
struct CaEvidence {
    sentence: String,
    #[serde(default, deserialize_with = "opt_string_or_number")]
    pmid: Option<String>,
    #[serde(default)]
    url: Option<String>,
}

#[derive(Deserialize)]
struct KgLine {
    subject: String,
    object: String,
    relation_type: String,
    pair_kind: String,
    sentence: String,
    #[serde(default, deserialize_with = "opt_string_or_number")]
    pmid: Option<String>,
    #[serde(default)]
    url: Option<String>,
}

/// Evidence URL: the given one when well-formed, else a PubMed link when a
/// PMID is known.
fn evidence_url(url: Option<String>, pmid: Option<&str>) -> Result<Option<String>, String> {
    match url.map(|u| u.trim().to_string()).filter(|u| !u.is_empty()) {
        Some(u) => url::Url::parse(&u).map(|_| Some(u.clone())).map_err(|e| format!("malformed url `{u}`: {e}")),
        None => Ok(pmid.map(|p| format!("https://pubmed.ncbi.nlm.nih.gov/{p}/"))),
    }
}

fn check_endpoints(subject: &str, object: &str, relation: &str) -> Result<(), String> {
    if subject.trim().is_empty() {
        return Err("empty subject".into());
    }
    if object.trim().is_empty() {
        return Err("empty object".into());
    }
    if relation.trim().is_empty() {
        return Err("empty relation_type".into());
    }
    Ok(())
}

fn for_each_line<R: BufRead>(
    reader: R,
    mut handle: impl FnMut(usize, &str) -> Result<(), String>,
    file: &str,
) -> Result<(usize, Vec<Reject>), IngestError> {
    let mut rejects = Vec::new();
    let mut input_lines = 0;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        input_lines += 1;
        if let Err(reason) = handle(n + 1, &line) {
            rejects.push(Reject { file: file.to_string(), line: n + 1, reason });
        }
    }
    Ok((input_lines, rejects))
}

/// Parses a causal-assertion (protein-protein) JSON-lines stream.
///
/// Record ids are `ca{file_index}:{line}`; the k-th evidence entry of a line
/// becomes document `ca{file_index}:{line}:{k}`.
pub fn parse_causal_assertions<R: BufRead>(reader: R, file_index: usize) -> Result<ParsedRelations, IngestError> {
    let mut out = ParsedRelations::default();
    let label = format!("ca{file_index}");
    let (input_lines, rejects) = for_each_line(
        reader,
        |line_no, line| {
            let parsed: CaLine = serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
            check_endpoints(&parsed.subject, &parsed.object, &parsed.relation_type)?;
            if parsed.evidence.is_empty() {
                return Err("no evidence".into());
            }
            let id = format!("{label}:{line_no}");
            let mut docs = Vec::with_capacity(parsed.evidence.len());
            for (k, ev) in parsed.evidence.into_iter().enumerate() {
                let sentence = ev.sentence.trim().to_string();
                if sentence.is_empty() {
                    return Err(format!("evidence #{k} has an empty sentence"));
                }
                let url = evidence_url(ev.url, ev.pmid.as_deref())?;
                docs.push(EvidenceDoc { id: format!("{id}:{k}"), sentence, pmid: ev.pmid, url });
            }
            out.records.push(RelationRecord {
                id,
                subject: Entity::from_surface(&parsed.subject),
                object: Entity::from_surface(&parsed.object),
                relation: parsed.relation_type.trim().to_string(),
                source: Source::CausalAssertion,
                pair_kind: PairKind::ProteinProtein,
                evidence_ids: docs.iter().map(|d| d.id.clone()).collect(),
            });
            out.docs.extend(docs);
            Ok(())
        },
        &label,
    )?;
    out.input_lines = input_lines;
    out.rejects = rejects;
    Ok(out)
}

/// Parses a knowledge-graph relation JSON-lines stream (one evidence sentence
/// per line). Record and document ids are both `kg{file_index}:{line}`.
pub fn parse_kg_relations<R: BufRead>(reader: R, file_index: usize) -> Result<ParsedRelations, IngestError> {
    let mut out = ParsedRelations::default();
    let label = format!("kg{file_index}");
    let (input_lines, rejects) = for_each_line(
        reader,
        |line_no, line| {
            let parsed: KgLine = serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
            check_endpoints(&parsed.subject, &parsed.object, &parsed.relation_type)?;
            let pair_kind: PairKind = parsed.pair_kind.parse()?;
            if pair_kind == PairKind::ProteinProtein {
                return Err("pair_kind protein_protein is only valid for causal assertions".into());
            }
            let sentence = parsed.sentence.trim().to_string();
            if sentence.is_empty() {
                return Err("empty sentence".into());
            }
            let url = evidence_url(parsed.url, parsed.pmid.as_deref())?;
            let id = format!("{label}:{line_no}");
            out.docs.push(EvidenceDoc { id: id.clone(), sentence, pmid: parsed.pmid, url });
            out.records.push(RelationRecord {
                id: id.clone(),
                subject: Entity::from_surface(&parsed.subject),
                object: Entity::from_surface(&parsed.object),
                relation: parsed.relation_type.trim().to_string(),
                source: Source::KnowledgeGraph,
                pair_kind,
                evidence_ids: vec![id],
            });
            Ok(())
        },
        &label,
    )?;
    out.input_lines = input_lines;
    out.rejects = rejects;
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedArticles {
    pub articles: Vec<ArticleMeta>,
    pub duplicate_pmids: usize,
    pub warnings: Vec<String>,
}

pub const METADATA_COLUMNS: [&str; 6] = ["pmid", "title", "abstract", "authors", "publish_time", "journal"];

/// Parses the article metadata table (comma-delimited, header row required).
pub fn parse_article_metadata<R: Read>(reader: R) -> Result<ParsedArticles, IngestError> {
    let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = csv.headers().map_err(|e| IngestError::Table(e.to_string()))?.clone();
    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(METADATA_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim().trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))?;
    }
    let mut out = ParsedArticles::default();
    let mut seen = HashSet::new();
    for (row, result) in csv.records().enumerate() {
        let line = row + 2;
        let rec = match result {
            Ok(r) => r,
            Err(e) => {
                out.warnings.push(format!("row {line}: {e}"));
                continue;
            }
        };
        let cell = |i: usize| rec.get(columns[i]).unwrap_or("").trim();
        let pmid = cell(0).to_string();
        if pmid.is_empty() {
            out.warnings.push(format!("row {line}: empty pmid"));
            continue;
        }
        if !seen.insert(pmid.clone()) {
            out.duplicate_pmids += 1;
            out.warnings.push(format!("row {line}: duplicate pmid {pmid}"));
            continue;
        }
        let publish_time = match cell(4) {
            "" => None,
            raw => match raw.parse::<PublishDate>() {
                Ok(d) => Some(d),
                Err(e) => {
                    out.warnings.push(format!("row {line}: {e}"));
                    None
                }
            },
        };
        out.articles.push(ArticleMeta {
            pmid,
            title: cell(1).to_string(),
            abstract_text: cell(2).to_string(),
            authors: cell(3).split(';').map(str::trim).filter(|a| !a.is_empty()).map(String::from).collect(),
            publish_time,
            journal: cell(5).to_string(),
        });
    }
    Ok(out)
}

/// Re-derives every entity's canonical key from its display form through
/// `aliases`. Idempotent.
pub fn canonicalize(records: Vec<RelationRecord>, aliases: &AliasMap) -> Vec<RelationRecord> {
    records
        .into_iter()
        .map(|mut r| {
            r.subject.canonical = aliases.canonical_key(&r.subject.display);
            r.object.canonical = aliases.canonical_key(&r.object.display);
            r
        })
        .collect()
}

/// An evidence document and, when its PMID matched, the index of its article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedDoc {
    pub doc: EvidenceDoc,
    pub article: Option<usize>,
}

impl AlignedDoc {
    pub fn is_aligned(&self) -> bool {
        self.article.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignedCorpus {
    pub docs: Vec<AlignedDoc>,
    pub articles: Vec<ArticleMeta>,
}

/// Joins evidence documents with article metadata on PMID.
pub fn align_by_pmid(docs: Vec<EvidenceDoc>, articles: Vec<ArticleMeta>) -> AlignedCorpus {
    let mut by_pmid: HashMap<&str, usize> = HashMap::with_capacity(articles.len());
    for (i, a) in articles.iter().enumerate() {
        by_pmid.entry(a.pmid.as_str()).or_insert(i);
    }
    let docs = docs
        .into_iter()
        .map(|doc| {
            let article = doc.pmid.as_deref().and_then(|p| by_pmid.get(p).copied());
            AlignedDoc { doc, article }
        })
        .collect();
    AlignedCorpus { docs, articles }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn causal_assertion_line_yields_record_and_doc() {
        let input = r#"{"subject":"ocrelizumab","object":"COVID-19","relation_type":"Activation","evidence":[{"sentence":"Patients on ocrelizumab showed more severe COVID-19.","pmid":"32000001"}]}"#;
        let out = parse_causal_assertions(input.as_bytes(), 0).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.docs.len(), 1);
        let r = &out.records[0];
        assert_eq!(r.pair_kind, PairKind::ProteinProtein);
        assert_eq!(r.source, Source::CausalAssertion);
        assert_eq!(r.subject.display, "ocrelizumab");
        assert_eq!(r.object.canonical, "covid-19");
        assert_eq!(r.evidence_ids, vec!["ca0:1:0".to_string()]);
        assert_eq!(out.docs[0].url.as_deref(), Some("https://pubmed.ncbi.nlm.nih.gov/32000001/"));
    }

    #[test]
    fn empty_stream() {
        let out = parse_causal_assertions(&b""[..], 0).unwrap();
        assert!(out.records.is_empty() && out.docs.is_empty() && out.rejects.is_empty());
        assert_eq!(out.input_lines, 0);
    }

    #[test]
    fn malformed_middle_line_is_reported_and_skipped() {
        let input = [
            r#"{"subject":"A","object":"B","relation_type":"Activation","evidence":[{"sentence":"s1","pmid":"1"}]}"#,
            r#"{"subject":"A","object":"#,
            r#"{"subject":"B","object":"C","relation_type":"Inhibition","evidence":[{"sentence":"s3"}]}"#,
        ]
        .join("\n");
        let out = parse_causal_assertions(input.as_bytes(), 3).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.rejects.len(), 1);
        assert_eq!(out.rejects[0].line, 2);
        assert_eq!(out.records[1].id, "ca3:3");
        assert_eq!(out.input_lines, out.records.len() + out.rejects.len());
        assert_eq!(out.docs[1].url, None);
    }

    #[test]
    fn empty_subject_is_rejected() {
        let input = r#"{"subject":"  ","object":"B","relation_type":"Activation","evidence":[{"sentence":"s"}]}"#;
        let out = parse_causal_assertions(input.as_bytes(), 0).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.rejects[0].reason, "empty subject");
    }

    #[test]
    fn numeric_pmid_and_bad_url() {
        let ok = r#"{"subject":"A","object":"B","relation_type":"X","evidence":[{"sentence":"s","pmid":123}]}"#;
        let out = parse_causal_assertions(ok.as_bytes(), 0).unwrap();
        assert_eq!(out.docs[0].pmid.as_deref(), Some("123"));
        let bad = r#"{"subject":"A","object":"B","relation_type":"X","evidence":[{"sentence":"s","url":"not a url"}]}"#;
        let out = parse_causal_assertions(bad.as_bytes(), 0).unwrap();
        assert_eq!(out.rejects.len(), 1);
    }

    #[test]
    fn kg_lines() {
        let input = [
            r#"{"subject":"10074-G5","object":"MYC","relation_type":"Decrease Expression","pair_kind":"chemical_gene","sentence":"10074-G5 lowered MYC levels.","pmid":"9"}"#,
            r#"{"subject":"D014013","object":"CASP3","relation_type":"Decrease Reaction","pair_kind":"chemical_gene","sentence":"s","pmid":"10"}"#,
            r#"{"subject":"x","object":"y","relation_type":"r","pair_kind":"protein_gene","sentence":"s"}"#,
        ]
        .join("\n");
        let out = parse_kg_relations(input.as_bytes(), 0).unwrap();
        assert_eq!(out.records.len(), 2);
        assert!(out.records.iter().all(|r| r.pair_kind == PairKind::ChemicalGene));
        assert!(out.records.iter().all(|r| r.source == Source::KnowledgeGraph));
        assert_eq!(out.records[0].relation, "Decrease Expression");
        assert_eq!(out.rejects.len(), 1);
        assert!(out.rejects[0].reason.contains("pair_kind"));
    }

    #[test]
    fn metadata_row_with_two_authors() {
        let input = "pmid,title,abstract,authors,publish_time,journal\np1,T,A,\"Doe, J; Roe, R\",2020-03,Emerg Microbes Infect\n";
        let out = parse_article_metadata(input.as_bytes()).unwrap();
        assert_eq!(out.articles.len(), 1);
        let a = &out.articles[0];
        assert_eq!(a.authors, vec!["Doe, J", "Roe, R"]);
        assert_eq!(a.publish_time.unwrap().to_string(), "2020-03");
        assert_eq!(a.journal, "Emerg Microbes Infect");
    }

    #[test]
    fn metadata_header_only_and_duplicates() {
        let header = "pmid,title,abstract,authors,publish_time,journal\n";
        assert!(parse_article_metadata(header.as_bytes()).unwrap().articles.is_empty());
        let dup = format!("{header}p1,T1,A,,2020,J\np1,T2,A,,2021,J\n");
        let out = parse_article_metadata(dup.as_bytes()).unwrap();
        assert_eq!(out.articles.len(), 1);
        assert_eq!(out.articles[0].title, "T1");
        assert_eq!(out.duplicate_pmids, 1);
    }

    #[test]
    fn metadata_missing_column_is_fatal() {
        let err = parse_article_metadata("pmid,title,abstract,authors,journal\n".as_bytes()).unwrap_err();
        match err {
            IngestError::MissingColumn(c) => assert_eq!(c, "publish_time"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn publish_dates() {
        assert!("2020".parse::<PublishDate>().is_ok());
        assert!("2020-02-29".parse::<PublishDate>().is_ok());
        assert!("2021-02-29".parse::<PublishDate>().is_err());
        assert!("2020-13".parse::<PublishDate>().is_err());
        assert!("20-01".parse::<PublishDate>().is_err());
        assert_eq!("2020-03-15".parse::<PublishDate>().unwrap().month_key(), "2020-03");
    }

    #[test]
    fn canonicalize_examples() {
        let aliases = AliasMap::from_pairs([("NSP1", "SH2D3A")]).unwrap();
        let rec = RelationRecord {
            id: "r".into(),
            subject: Entity::from_surface("NSP1"),
            object: Entity::from_surface(" TNF "),
            relation: "Activation".into(),
            source: Source::CausalAssertion,
            pair_kind: PairKind::ProteinProtein,
            evidence_ids: vec!["d".into()],
        };
        let once = canonicalize(vec![rec], &aliases);
        assert_eq!(once[0].subject.canonical, "sh2d3a");
        assert_eq!(once[0].subject.display, "NSP1");
        assert_eq!(once[0].object.canonical, "tnf");
        assert_eq!(once[0].object.display, "TNF");
        let twice = canonicalize(once.clone(), &aliases);
        assert_eq!(once, twice);
        let plain = canonicalize(once, &AliasMap::new());
        assert_eq!(plain[0].subject.canonical, "nsp1");
    }

    #[test]
    fn alias_chains_flatten_and_cycles_fail() {
        let m = AliasMap::from_pairs([("a", "B"), ("b", "C")]).unwrap();
        assert_eq!(m.canonical_key("A"), "c");
        assert_eq!(m.target("a"), Some("C"));
        assert!(AliasMap::from_pairs([("a", "b"), ("b", "a")]).is_err());
        let parsed = AliasMap::parse("NSP1\tSH2D3A\n# comment\n\n".as_bytes()).unwrap();
        assert_eq!(parsed.canonical_key("nsp1"), "sh2d3a");
        assert!(AliasMap::parse("no tab here\n".as_bytes()).is_err());
    }

    fn doc(id: &str, pmid: Option<&str>) -> EvidenceDoc {
        EvidenceDoc { id: id.into(), sentence: "s".into(), pmid: pmid.map(String::from), url: None }
    }

    fn article(pmid: &str, journal: &str) -> ArticleMeta {
        ArticleMeta {
            pmid: pmid.into(),
            title: String::new(),
            abstract_text: String::new(),
            authors: vec![],
            publish_time: None,
            journal: journal.into(),
        }
    }

    #[test]
    fn alignment() {
        let corpus = align_by_pmid(
            vec![doc("d1", Some("p1")), doc("d2", None), doc("d3", Some("p1")), doc("d4", Some("p9"))],
            vec![article("p1", "J")],
        );
        assert_eq!(corpus.docs[0].article, Some(0));
        assert_eq!(corpus.articles[corpus.docs[0].article.unwrap()].journal, "J");
        assert!(!corpus.docs[1].is_aligned());
        assert_eq!(corpus.docs[2].article, Some(0));
        assert!(!corpus.docs[3].is_aligned());
    }
}
