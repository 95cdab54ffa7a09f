//! Visualization-facing aggregations over a resolved evidence set.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::QueryError;
use crate::index::{DocId, EvidenceSet, Field, FilterContext, Index, TermId};
use crate::semantics::{opposite_upstream_regulators, upstream_regulators, FunctionalType};

pub const UNKNOWN_BUCKET: &str = "unknown";

/// A tag-cloud field: a facet, or a second-order regulator column scoped to a
/// functional type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggField {
    Facet(Field),
    UpstreamRegulator,
    OppositeUpstreamRegulator,
}

impl AggField {
    pub fn as_str(self) -> &'static str {
        match self {
            AggField::Facet(f) => f.as_str(),
            AggField::UpstreamRegulator => "upstream_regulator",
            AggField::OppositeUpstreamRegulator => "opposite_upstream_regulator",
        }
    }
}

impl fmt::Display for AggField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AggField {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "upstream_regulator" => Ok(AggField::UpstreamRegulator),
            "opposite_upstream_regulator" => Ok(AggField::OppositeUpstreamRegulator),
            _ => s.parse().map(AggField::Facet),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountBy {
    /// Evidence documents carrying the term.
    #[default]
    Docs,
    /// Distinct PMIDs among those documents.
    Articles,
}

impl FromStr for CountBy {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "docs" | "evidence" => Ok(CountBy::Docs),
            "articles" => Ok(CountBy::Articles),
            _ => Err(QueryError::InvalidParam { param: "count_by".into(), reason: format!("expected docs or articles, got {s:?}") }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCount {
    /// Display form.
    pub term: String,
    /// Normalized key, usable as a filter term.
    pub key: String,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeatMatrix {
    pub x_terms: Vec<TermCount>,
    pub y_terms: Vec<TermCount>,
    /// `cells[y][x]`.
    pub cells: Vec<Vec<u64>>,
}

impl HeatMatrix {
    pub fn is_empty(&self) -> bool {
        self.x_terms.is_empty() && self.y_terms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub doc_id: String,
    pub sentence: String,
    pub url: Option<String>,
    pub pmid: Option<String>,
    pub subject: String,
    pub object: String,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TablePage {
    pub total: u64,
    pub page: u64,
    pub page_size: u64,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub evidence_count: u64,
    pub article_count: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Year,
    #[default]
    Month,
}

impl FromStr for Granularity {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "year" => Ok(Granularity::Year),
            "month" => Ok(Granularity::Month),
            _ => Err(QueryError::InvalidParam {
                param: "granularity".into(),
                reason: format!("expected year or month, got {s:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub bucket: String,
    pub count: u64,
}

fn sort_and_truncate(mut out: Vec<TermCount>, k: usize) -> Vec<TermCount> {
    out.retain(|t| t.count > 0);
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.key.cmp(&b.key)));
    out.truncate(k);
    out
}

/// Term ids of `field` carried by `doc`.
fn doc_field_terms(index: &Index, doc: DocId, field: Field) -> &[TermId] {
    let range = index.field_term_ids(field);
    let terms = index.doc_terms(doc);
    let lo = terms.partition_point(|&t| t < range.start);
    let hi = terms.partition_point(|&t| t < range.end);
    &terms[lo..hi]
}

fn distinct_pmids(index: &Index, docs: impl Iterator<Item = DocId>) -> BTreeSet<&str> {
    docs.filter_map(|d| index.doc(d).pmid.as_deref()).collect()
}

/// Per-term counts of `field` over `evidence`, unsorted and unpruned.
fn facet_counts(index: &Index, evidence: &EvidenceSet, field: Field, by: CountBy) -> Vec<(TermId, u64)> {
    let range = index.field_term_ids(field);
    match by {
        CountBy::Docs if evidence.len() == index.num_docs() => {
            range.map(|t| (t, index.term_postings(t).len() as u64)).collect()
        }
        CountBy::Docs => {
            let mut counts = vec![0u64; (range.end - range.start) as usize];
            for &d in &evidence.doc_ids {
                for &t in doc_field_terms(index, d, field) {
                    counts[(t - range.start) as usize] += 1;
                }
            }
            counts.into_iter().enumerate().map(|(i, c)| (range.start + i as TermId, c)).collect()
        }
        CountBy::Articles => {
            let mut pmids: HashMap<TermId, BTreeSet<&str>> = HashMap::new();
            for &d in &evidence.doc_ids {
                let Some(pmid) = index.doc(d).pmid.as_deref() else { continue };
                for &t in doc_field_terms(index, d, field) {
                    pmids.entry(t).or_default().insert(pmid);
                }
            }
            pmids.into_iter().map(|(t, s)| (t, s.len() as u64)).collect()
        }
    }
}

/// Top-`k` terms of `field` over `resolve(ctx)`, by count desc then key asc.
///
/// The regulator pseudo-fields need `scope`, the functional type whose
/// upstream (or opposite-upstream) regulators form the terms.
pub fn tag_cloud(
    index: &Index,
    ctx: &FilterContext,
    field: AggField,
    k: usize,
    by: CountBy,
    scope: Option<&FunctionalType>,
) -> Result<Vec<TermCount>, QueryError> {
    let evidence = index.resolve(ctx);
    tag_cloud_over(index, &evidence, field, k, by, scope)
}

pub fn tag_cloud_over(
    index: &Index,
    evidence: &EvidenceSet,
    field: AggField,
    k: usize,
    by: CountBy,
    scope: Option<&FunctionalType>,
) -> Result<Vec<TermCount>, QueryError> {
    if evidence.is_empty() {
        return Ok(Vec::new());
    }
    let set = match field {
        AggField::Facet(f) => {
            let out = facet_counts(index, evidence, f, by)
                .into_iter()
                .map(|(t, count)| {
                    let term = index.term(t);
                    TermCount { term: term.display.clone(), key: term.key.clone(), count }
                })
                .collect();
            return Ok(sort_and_truncate(out, k));
        }
        AggField::UpstreamRegulator | AggField::OppositeUpstreamRegulator => {
            let ft = scope.ok_or_else(|| QueryError::InvalidParam {
                param: "functional_type".into(),
                reason: format!("required for field {field}"),
            })?;
            if field == AggField::UpstreamRegulator {
                upstream_regulators(index, ft)
            } else {
                opposite_upstream_regulators(index, ft)
            }
        }
    };
    let mut docs_of: BTreeMap<&str, BTreeSet<DocId>> = BTreeMap::new();
    for reg in &set.regulators {
        let entry = docs_of.entry(reg.entity.as_str()).or_default();
        for rid in &reg.record_ids {
            if let Some(r) = index.record_ordinal(rid) {
                entry.extend(index.record(r).evidence.iter().copied().filter(|&d| evidence.contains(d)));
            }
        }
    }
    let out = docs_of
        .into_iter()
        .map(|(entity, docs)| {
            let count = match by {
                CountBy::Docs => docs.len() as u64,
                CountBy::Articles => distinct_pmids(index, docs.into_iter()).len() as u64,
            };
            TermCount { term: index.entity_display(entity).to_string(), key: entity.to_string(), count }
        })
        .collect();
    Ok(sort_and_truncate(out, k))
}

/// Co-occurrence matrix of the top-`kx` terms of `field_x` against the
/// top-`ky` terms of `field_y`; all-zero rows and columns are dropped.
pub fn heat_map(
    index: &Index,
    ctx: &FilterContext,
    field_x: Field,
    field_y: Field,
    kx: usize,
    ky: usize,
) -> Result<HeatMatrix, QueryError> {
    if field_x == field_y {
        return Err(QueryError::SameAxis(field_x.as_str().to_string()));
    }
    let evidence = index.resolve(ctx);
    let top = |field: Field, k: usize| -> Result<Vec<TermCount>, QueryError> {
        tag_cloud_over(index, &evidence, AggField::Facet(field), k, CountBy::Docs, None)
    };
    let xs = top(field_x, kx)?;
    let ys = top(field_y, ky)?;
    if xs.is_empty() || ys.is_empty() {
        return Ok(HeatMatrix::default());
    }
    let ids = |field: Field, terms: &[TermCount]| -> HashMap<TermId, usize> {
        terms.iter().enumerate().map(|(i, t)| (index.term_id(field, &t.key).unwrap(), i)).collect()
    };
    let x_ids = ids(field_x, &xs);
    let y_ids = ids(field_y, &ys);
    let mut cells = vec![vec![0u64; xs.len()]; ys.len()];
    let mut xs_here = Vec::new();
    for &d in &evidence.doc_ids {
        xs_here.clear();
        xs_here.extend(doc_field_terms(index, d, field_x).iter().filter_map(|t| x_ids.get(t).copied()));
        if xs_here.is_empty() {
            continue;
        }
        for t in doc_field_terms(index, d, field_y) {
            if let Some(&y) = y_ids.get(t) {
                for &x in &xs_here {
                    cells[y][x] += 1;
                }
            }
        }
    }
    let keep_x: Vec<usize> = (0..xs.len()).filter(|&x| cells.iter().any(|row| row[x] > 0)).collect();
    let keep_y: Vec<usize> = (0..ys.len()).filter(|&y| cells[y].iter().any(|&c| c > 0)).collect();
    Ok(HeatMatrix {
        x_terms: keep_x.iter().map(|&x| xs[x].clone()).collect(),
        y_terms: keep_y.iter().map(|&y| ys[y].clone()).collect(),
        cells: keep_y.iter().map(|&y| keep_x.iter().map(|&x| cells[y][x]).collect()).collect(),
    })
}

/// Evidence documents in (pmid asc, missing pmid last, document order) order.
pub fn table_order(index: &Index, evidence: &EvidenceSet) -> Vec<DocId> {
    let mut docs = evidence.doc_ids.clone();
    docs.sort_by(|&a, &b| {
        let (pa, pb) = (index.doc(a).pmid.as_deref(), index.doc(b).pmid.as_deref());
        match (pa, pb) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        }
        .then(a.cmp(&b))
    });
    docs
}

fn table_row(index: &Index, d: DocId) -> TableRow {
    let doc = index.doc(d);
    let rec = doc.records.first().map(|&r| index.record(r));
    TableRow {
        doc_id: doc.id.clone(),
        sentence: doc.sentence.clone(),
        url: doc.url.clone(),
        pmid: doc.pmid.clone(),
        subject: rec.map(|r| r.subject.display.clone()).unwrap_or_default(),
        object: rec.map(|r| r.object.display.clone()).unwrap_or_default(),
        relation: rec.map(|r| r.relation.clone()).unwrap_or_default(),
    }
}

/// One page of evidence rows; a page past the end is empty but keeps the total.
pub fn data_table(index: &Index, ctx: &FilterContext, page: usize, page_size: usize) -> Result<TablePage, QueryError> {
    if page_size == 0 {
        return Err(QueryError::InvalidParam { param: "page_size".into(), reason: "must be at least 1".into() });
    }
    let evidence = index.resolve(ctx);
    let ordered = table_order(index, &evidence);
    let start = page.saturating_mul(page_size).min(ordered.len());
    let end = start.saturating_add(page_size).min(ordered.len());
    Ok(TablePage {
        total: ordered.len() as u64,
        page: page as u64,
        page_size: page_size as u64,
        rows: ordered[start..end].iter().map(|&d| table_row(index, d)).collect(),
    })
}

pub fn metrics(index: &Index, ctx: &FilterContext) -> Metrics {
    let evidence = index.resolve(ctx);
    Metrics {
        evidence_count: evidence.len() as u64,
        article_count: distinct_pmids(index, evidence.doc_ids.iter().copied()).len() as u64,
    }
}

/// Ascending date buckets over aligned publish dates; year-only dates form a
/// `YYYY` bucket, and undated or unaligned documents land in a trailing
/// `unknown` bucket.
pub fn date_histogram(index: &Index, ctx: &FilterContext, granularity: Granularity) -> Vec<Bucket> {
    let evidence = index.resolve(ctx);
    let mut buckets: BTreeMap<String, u64> = BTreeMap::new();
    let mut unknown = 0u64;
    for &d in &evidence.doc_ids {
        match index.article_of(d).and_then(|a| a.publish_time) {
            Some(date) => {
                let key = match granularity {
                    Granularity::Month => date.month_key(),
                    Granularity::Year => date.year_key(),
                };
                *buckets.entry(key).or_default() += 1;
            }
            None => unknown += 1,
        }
    }
    let mut out: Vec<Bucket> = buckets.into_iter().map(|(bucket, count)| Bucket { bucket, count }).collect();
    if unknown > 0 {
        out.push(Bucket { bucket: UNKNOWN_BUCKET.to_string(), count: unknown });
    }
    out
}
