//! The three-layer hierarchical index.
//!
//! * document layer: evidencing sentences with their aligned article metadata;
//! * phrase layer: one term tuple per relation record plus derived
//!   (abstract keyword, journal) and (abstract keyword, publish month) tuples;
//! * type layer: entities and grounded functional types.
//!
//! Faceting is backed by one sorted posting list per `(field, term)` and a
//! free-text inverted index over sentence, title and abstract tokens. All
//! queries go through [`Index::resolve`], which turns a [`FilterContext`] into
//! an [`EvidenceSet`] of document ordinals.

mod build;
mod field;
mod store;
mod tokenize;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use build::{build_index, BuildOptions};
pub use field::Field;
pub use store::{INDEX_FILE, FORMAT_VERSION};
pub use tokenize::{tokenize, tokenize_with};

use crate::error::QueryError;
use crate::ingest::{AliasMap, ArticleMeta, Entity, PairKind, Source};
use crate::semantics::FunctionalType;
use crate::taxonomy::{Metatype, Polarity};

pub type DocId = u32;
pub type RecordId = u32;
pub type TermId = u32;

/// Document-layer entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredDoc {
    pub id: String,
    pub sentence: String,
    pub pmid: Option<String>,
    pub url: Option<String>,
    /// Ordinal into [`Index::articles`] when the PMID aligned.
    pub article: Option<u32>,
    /// Records this sentence evidences, ascending.
    pub records: Vec<RecordId>,
}

/// Phrase-layer relation tuple with its resolved classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredRecord {
    pub id: String,
    pub subject: Entity,
    pub object: Entity,
    /// Relation-type name as configured in the taxonomy (raw name for unknown types).
    pub relation: String,
    pub metatype: Metatype,
    pub polarity: Polarity,
    pub source: Source,
    pub pair_kind: PairKind,
    /// Evidence documents, ascending.
    pub evidence: Vec<DocId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetTerm {
    pub field: Field,
    pub key: String,
    pub display: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleKind {
    AbstractKeywordJournal,
    AbstractKeywordPublishTime,
}

/// Derived phrase-layer tuple pairing two facet terms that co-occur on an article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedTuple {
    pub kind: TupleKind,
    pub left: TermId,
    pub right: TermId,
    pub articles: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityEntry {
    pub canonical: String,
    pub display: String,
}

/// Persisted part of the index. Field order is the serialization order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct IndexData {
    pub docs: Vec<StoredDoc>,
    pub articles: Vec<ArticleMeta>,
    pub records: Vec<StoredRecord>,
    pub derived_tuples: Vec<DerivedTuple>,
    pub entities: Vec<EntityEntry>,
    pub functional_types: Vec<FunctionalType>,
    pub terms: Vec<FacetTerm>,
    pub postings: Vec<Vec<DocId>>,
    pub text_terms: Vec<String>,
    pub text_postings: Vec<Vec<DocId>>,
    pub aliases: AliasMap,
    pub stopwords: Vec<String>,
}

/// Lookup structures rebuilt on load; never serialized.
#[derive(Debug, Default)]
struct Lookups {
    field_start: Vec<usize>,
    doc_terms: Vec<Vec<TermId>>,
    doc_by_id: HashMap<String, DocId>,
    record_by_id: HashMap<String, RecordId>,
    records_by_object: HashMap<String, Vec<RecordId>>,
    records_by_subject: HashMap<String, Vec<RecordId>>,
    ft_by_name: HashMap<String, Vec<u32>>,
    ft_by_id: HashMap<String, u32>,
    ft_of_record: Vec<u32>,
}

/// Immutable hierarchical index. Cheap to share across threads behind `Arc`.
#[derive(Debug)]
pub struct Index {
    data: IndexData,
    lookups: Lookups,
}

/// Conjunctive set of field constraints plus optional free text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FilterContext {
    pub constraints: BTreeSet<(Field, String)>,
    pub text: Option<String>,
}

impl FilterContext {
    pub fn new() -> FilterContext {
        FilterContext::default()
    }

    pub fn with(mut self, field: Field, term: impl Into<String>) -> FilterContext {
        self.constraints.insert((field, term.into()));
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> FilterContext {
        self.text = Some(text.into());
        self
    }

    pub fn insert(&mut self, field: Field, term: impl Into<String>) -> bool {
        self.constraints.insert((field, term.into()))
    }

    /// Builds a context from untyped `(field, term)` pairs, rejecting unknown fields.
    pub fn parse<'a, I>(pairs: I, text: Option<String>) -> Result<FilterContext, QueryError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut ctx = FilterContext { constraints: BTreeSet::new(), text };
        for (field, term) in pairs {
            ctx.constraints.insert((field.parse()?, term.to_string()));
        }
        Ok(ctx)
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty() && self.text.as_deref().is_none_or(|t| t.trim().is_empty())
    }

    /// `true` when every constraint of `self` is also in `other` and the text matches.
    pub fn is_subset_of(&self, other: &FilterContext) -> bool {
        self.text == other.text && self.constraints.is_subset(&other.constraints)
    }
}

/// Materialized search state: sorted, duplicate-free document ordinals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvidenceSet {
    pub doc_ids: Vec<DocId>,
}

impl EvidenceSet {
    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn contains(&self, doc: DocId) -> bool {
        self.doc_ids.binary_search(&doc).is_ok()
    }

    /// Records whose evidence intersects this set, ascending.
    pub fn record_ids(&self, index: &Index) -> Vec<RecordId> {
        let mut out: Vec<RecordId> =
            self.doc_ids.iter().flat_map(|&d| index.doc(d).records.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A stored document joined with its article metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentView {
    pub id: String,
    pub sentence: String,
    pub pmid: Option<String>,
    pub url: Option<String>,
    pub aligned: bool,
    pub title: Option<String>,
    pub journal: Option<String>,
    pub publish_time: Option<String>,
    pub authors: Vec<String>,
    pub records: Vec<String>,
}

/// Intersection of two ascending, duplicate-free slices.
pub fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = Vec::with_capacity(small.len());
    if small.len() * 16 < large.len() {
        for &x in small {
            if large.binary_search(&x).is_ok() {
                out.push(x);
            }
        }
        return out;
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(small[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl Index {
    pub(crate) fn from_data(data: IndexData) -> Index {
        let mut lookups = Lookups::default();
        let n_fields = Field::ALL.len();
        lookups.field_start = vec![data.terms.len(); n_fields + 1];
        for (i, t) in data.terms.iter().enumerate().rev() {
            lookups.field_start[t.field as usize] = i;
        }
        for f in (0..n_fields).rev() {
            lookups.field_start[f] = lookups.field_start[f].min(lookups.field_start[f + 1]);
        }
        lookups.doc_terms = vec![Vec::new(); data.docs.len()];
        for (term, posting) in data.postings.iter().enumerate() {
            for &d in posting {
                lookups.doc_terms[d as usize].push(term as TermId);
            }
        }
        lookups.doc_by_id = data.docs.iter().enumerate().map(|(i, d)| (d.id.clone(), i as DocId)).collect();
        lookups.record_by_id = data.records.iter().enumerate().map(|(i, r)| (r.id.clone(), i as RecordId)).collect();
        for (i, r) in data.records.iter().enumerate() {
            lookups.records_by_object.entry(r.object.canonical.clone()).or_default().push(i as RecordId);
            lookups.records_by_subject.entry(r.subject.canonical.clone()).or_default().push(i as RecordId);
        }
        lookups.ft_of_record = vec![u32::MAX; data.records.len()];
        for (i, ft) in data.functional_types.iter().enumerate() {
            lookups.ft_by_name.entry(ft.name.to_lowercase()).or_default().push(i as u32);
            lookups.ft_by_id.insert(ft.id.clone(), i as u32);
            for m in &ft.members {
                for rid in &m.record_ids {
                    if let Some(&r) = lookups.record_by_id.get(rid) {
                        lookups.ft_of_record[r as usize] = i as u32;
                    }
                }
            }
        }
        Index { data, lookups }
    }

    pub fn num_docs(&self) -> usize {
        self.data.docs.len()
    }

    pub fn docs(&self) -> &[StoredDoc] {
        &self.data.docs
    }

    pub fn doc(&self, doc: DocId) -> &StoredDoc {
        &self.data.docs[doc as usize]
    }

    pub fn doc_ordinal(&self, id: &str) -> Option<DocId> {
        self.lookups.doc_by_id.get(id).copied()
    }

    pub fn records(&self) -> &[StoredRecord] {
        &self.data.records
    }

    pub fn record(&self, record: RecordId) -> &StoredRecord {
        &self.data.records[record as usize]
    }

    pub fn record_ordinal(&self, id: &str) -> Option<RecordId> {
        self.lookups.record_by_id.get(id).copied()
    }

    /// Records whose canonical object is `canonical`, ascending.
    pub fn records_with_object(&self, canonical: &str) -> &[RecordId] {
        self.lookups.records_by_object.get(canonical).map_or(&[], Vec::as_slice)
    }

    pub fn records_with_subject(&self, canonical: &str) -> &[RecordId] {
        self.lookups.records_by_subject.get(canonical).map_or(&[], Vec::as_slice)
    }

    pub fn articles(&self) -> &[ArticleMeta] {
        &self.data.articles
    }

    pub fn article_of(&self, doc: DocId) -> Option<&ArticleMeta> {
        self.doc(doc).article.map(|a| &self.data.articles[a as usize])
    }

    pub fn derived_tuples(&self) -> &[DerivedTuple] {
        &self.data.derived_tuples
    }

    pub fn entities(&self) -> &[EntityEntry] {
        &self.data.entities
    }

    /// Display form of a canonical entity (the canonical key itself when unknown).
    pub fn entity_display<'a>(&'a self, canonical: &'a str) -> &'a str {
        match self.data.entities.binary_search_by(|e| e.canonical.as_str().cmp(canonical)) {
            Ok(i) => &self.data.entities[i].display,
            Err(_) => canonical,
        }
    }

    pub fn functional_types(&self) -> &[FunctionalType] {
        &self.data.functional_types
    }

    pub fn functional_type_by_id(&self, id: &str) -> Option<&FunctionalType> {
        self.lookups.ft_by_id.get(id).map(|&i| &self.data.functional_types[i as usize])
    }

    /// Functional types whose display name matches case-insensitively.
    pub fn functional_types_named(&self, name: &str) -> Vec<&FunctionalType> {
        self.lookups
            .ft_by_name
            .get(&name.trim().to_lowercase())
            .map(|v| v.iter().map(|&i| &self.data.functional_types[i as usize]).collect())
            .unwrap_or_default()
    }

    /// The functional type a record was grounded into.
    pub fn functional_type_of(&self, record: RecordId) -> Option<&FunctionalType> {
        self.data.functional_types.get(self.lookups.ft_of_record[record as usize] as usize)
    }

    pub fn aliases(&self) -> &AliasMap {
        &self.data.aliases
    }

    pub fn stopwords(&self) -> &[String] {
        &self.data.stopwords
    }

    pub fn terms(&self) -> &[FacetTerm] {
        &self.data.terms
    }

    pub fn term(&self, term: TermId) -> &FacetTerm {
        &self.data.terms[term as usize]
    }

    /// Term ids belonging to `field`, in key order.
    pub fn field_term_ids(&self, field: Field) -> std::ops::Range<TermId> {
        let f = field as usize;
        self.lookups.field_start[f] as TermId..self.lookups.field_start[f + 1] as TermId
    }

    /// Term id for an already-normalized key.
    pub fn term_id(&self, field: Field, key: &str) -> Option<TermId> {
        let range = self.field_term_ids(field);
        let slice = &self.data.terms[range.start as usize..range.end as usize];
        slice.binary_search_by(|t| t.key.as_str().cmp(key)).ok().map(|i| range.start + i as TermId)
    }

    pub fn term_postings(&self, term: TermId) -> &[DocId] {
        &self.data.postings[term as usize]
    }

    /// Posting list for a user-supplied term (normalized through the field rules).
    pub fn posting(&self, field: Field, term: &str) -> &[DocId] {
        let key = field.normalize(term, &self.data.aliases);
        match self.term_id(field, &key) {
            Some(t) => &self.data.postings[t as usize],
            None => &[],
        }
    }

    /// Facet term ids carried by a document, ascending.
    pub fn doc_terms(&self, doc: DocId) -> &[TermId] {
        &self.lookups.doc_terms[doc as usize]
    }

    pub fn text_posting(&self, token: &str) -> &[DocId] {
        match self.data.text_terms.binary_search_by(|t| t.as_str().cmp(token)) {
            Ok(i) => &self.data.text_postings[i],
            Err(_) => &[],
        }
    }

    /// Documents containing every token of `text`.
    pub fn text_match(&self, text: &str) -> Option<Vec<DocId>> {
        let mut tokens = tokenize_with(text, &self.data.stopwords);
        if tokens.is_empty() {
            return None;
        }
        tokens.sort();
        tokens.dedup();
        let mut lists: Vec<&[DocId]> = tokens.iter().map(|t| self.text_posting(t)).collect();
        lists.sort_by_key(|l| l.len());
        let mut acc = lists[0].to_vec();
        for l in &lists[1..] {
            if acc.is_empty() {
                break;
            }
            acc = intersect_sorted(&acc, l);
        }
        Some(acc)
    }

    /// Conjunction of every constraint (and the free-text match) of `ctx`.
    /// An empty context selects every document.
    pub fn resolve(&self, ctx: &FilterContext) -> EvidenceSet {
        let mut lists: Vec<&[DocId]> = ctx.constraints.iter().map(|(f, t)| self.posting(*f, t)).collect();
        let text = ctx.text.as_deref().and_then(|t| self.text_match(t));
        if let Some(t) = &text {
            lists.push(t);
        }
        if lists.is_empty() {
            return EvidenceSet { doc_ids: (0..self.num_docs() as DocId).collect() };
        }
        lists.sort_by_key(|l| l.len());
        let mut acc = lists[0].to_vec();
        for l in &lists[1..] {
            if acc.is_empty() {
                break;
            }
            acc = intersect_sorted(&acc, l);
        }
        EvidenceSet { doc_ids: acc }
    }

    pub fn document_view(&self, doc: DocId) -> DocumentView {
        let d = self.doc(doc);
        let article = self.article_of(doc);
        DocumentView {
            id: d.id.clone(),
            sentence: d.sentence.clone(),
            pmid: d.pmid.clone(),
            url: d.url.clone(),
            aligned: article.is_some(),
            title: article.map(|a| a.title.clone()),
            journal: article.map(|a| a.journal.clone()),
            publish_time: article.and_then(|a| a.publish_time).map(|p| p.to_string()),
            authors: article.map(|a| a.authors.clone()).unwrap_or_default(),
            records: d.records.iter().map(|&r| self.record(r).id.clone()).collect(),
        }
    }

    /// Full document by external id.
    pub fn get_document(&self, id: &str) -> Result<DocumentView, QueryError> {
        self.doc_ordinal(id)
            .map(|d| self.document_view(d))
            .ok_or_else(|| QueryError::NotFound { kind: "document", id: id.to_string() })
    }

    pub(crate) fn data(&self) -> &IndexData {
        &self.data
    }
}
