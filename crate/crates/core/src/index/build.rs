use std::collections::{BTreeMap, HashMap};

use super::{
    tokenize_with, DerivedTuple, DocId, EntityEntry, FacetTerm, Field, Index, IndexData, RecordId, StoredDoc,
    StoredRecord, TermId, TupleKind,
};
use crate::error::BuildError;
use crate::ingest::{AlignedCorpus, AliasMap, PairKind, RelationRecord};
use crate::semantics;
use crate::taxonomy::{Metatype, Taxonomy};

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Kept with the index so that query terms canonicalize the same way.
    pub aliases: AliasMap,
    /// Tokens dropped from the text index and from abstract keywords.
    pub stopwords: Vec<String>,
}

#[derive(Default)]
struct TermAcc {
    docs: Vec<DocId>,
    displays: HashMap<String, u32>,
}

#[derive(Default)]
struct FacetBuilder {
    terms: HashMap<(Field, String), TermAcc>,
}

impl FacetBuilder {
    fn add(&mut self, field: Field, key: &str, display: &str, doc: DocId) {
        if key.is_empty() {
            return;
        }
        let acc = match self.terms.get_mut(&(field, key.to_string())) {
            Some(acc) => acc,
            None => self.terms.entry((field, key.to_string())).or_default(),
        };
        acc.docs.push(doc);
        match acc.displays.get_mut(display) {
            Some(n) => *n += 1,
            None => {
                acc.displays.insert(display.to_string(), 1);
            }
        }
    }

    fn finish(self) -> (Vec<FacetTerm>, Vec<Vec<DocId>>) {
        let mut entries: Vec<_> = self.terms.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut terms = Vec::with_capacity(entries.len());
        let mut postings = Vec::with_capacity(entries.len());
        for ((field, key), mut acc) in entries {
            acc.docs.sort_unstable();
            acc.docs.dedup();
            let display = pick_display(acc.displays.iter().map(|(d, n)| (d.as_str(), *n)));
            terms.push(FacetTerm { field, key, display });
            postings.push(acc.docs);
        }
        (terms, postings)
    }
}

/// Most frequent candidate; ties go to the lexicographically smallest.
fn pick_display<'a>(candidates: impl Iterator<Item = (&'a str, u32)>) -> String {
    candidates
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(d, _)| d.to_string())
        .unwrap_or_default()
}

/// Builds the hierarchical index from canonicalized records and an aligned corpus.
///
/// Output is a deterministic function of the inputs. Record and document
/// ordinals follow input order.
pub fn build_index(
    records: Vec<RelationRecord>,
    corpus: AlignedCorpus,
    taxonomy: &Taxonomy,
    options: &BuildOptions,
) -> Result<Index, BuildError> {
    let mut stopwords: Vec<String> = options.stopwords.iter().map(|s| s.trim().to_lowercase()).collect();
    stopwords.sort();
    stopwords.dedup();

    // document layer
    let mut doc_by_id: HashMap<&str, DocId> = HashMap::with_capacity(corpus.docs.len());
    for (i, d) in corpus.docs.iter().enumerate() {
        if doc_by_id.insert(d.doc.id.as_str(), i as DocId).is_some() {
            return Err(BuildError::DuplicateDocId(d.doc.id.clone()));
        }
    }
    let mut seen_records = HashMap::with_capacity(records.len());
    let mut stored = Vec::with_capacity(records.len());
    let mut doc_records: Vec<Vec<RecordId>> = vec![Vec::new(); corpus.docs.len()];
    for (i, r) in records.iter().enumerate() {
        if seen_records.insert(r.id.as_str(), i).is_some() {
            return Err(BuildError::DuplicateRecordId(r.id.clone()));
        }
        if r.evidence_ids.is_empty() {
            return Err(BuildError::MissingEvidence(r.id.clone()));
        }
        let mut evidence = Vec::with_capacity(r.evidence_ids.len());
        for e in &r.evidence_ids {
            let d = *doc_by_id
                .get(e.as_str())
                .ok_or_else(|| BuildError::UnknownEvidence { record: r.id.clone(), doc: e.clone() })?;
            evidence.push(d);
            doc_records[d as usize].push(i as RecordId);
        }
        evidence.sort_unstable();
        evidence.dedup();
        let class = taxonomy.lookup(&r.relation);
        stored.push(StoredRecord {
            id: r.id.clone(),
            subject: r.subject.clone(),
            object: r.object.clone(),
            relation: class.name,
            metatype: class.metatype,
            polarity: class.polarity,
            source: r.source,
            pair_kind: r.pair_kind,
            evidence,
        });
    }
    drop(doc_by_id);
    drop(seen_records);

    // type layer: entity display forms
    let entities = entity_registry(&stored, &options.aliases);
    let display_of = |canonical: &str| -> &str {
        match entities.binary_search_by(|e| e.canonical.as_str().cmp(canonical)) {
            Ok(i) => &entities[i].display,
            Err(_) => "",
        }
    };

    let mut facets = FacetBuilder::default();
    for r in &stored {
        let subject = (r.subject.canonical.as_str(), display_of(&r.subject.canonical));
        let object = (r.object.canonical.as_str(), display_of(&r.object.canonical));
        let relation_key = r.relation.to_lowercase();
        let (left_role, right_role) = match r.metatype {
            Metatype::RegulateActivity => (Some(Field::RoleSubject), Some(Field::RoleObject)),
            Metatype::Modification => (Some(Field::RoleEnzyme), Some(Field::RoleSubstrate)),
            Metatype::Other => (None, None),
        };
        let (left_kind, right_kind) = match r.pair_kind {
            PairKind::ProteinProtein => (None, None),
            PairKind::ChemicalGene => (Some(Field::Chemical), Some(Field::Gene)),
            PairKind::ChemicalDisease => (Some(Field::Chemical), Some(Field::Disease)),
            PairKind::GeneDisease => (Some(Field::Gene), Some(Field::Disease)),
        };
        for &d in &r.evidence {
            facets.add(Field::Subject, subject.0, subject.1, d);
            facets.add(Field::Object, object.0, object.1, d);
            facets.add(Field::RelationType, &relation_key, &r.relation, d);
            facets.add(Field::Metatype, r.metatype.as_str(), r.metatype.display(), d);
            facets.add(Field::PairKind, r.pair_kind.as_str(), r.pair_kind.as_str(), d);
            facets.add(Field::Source, r.source.as_str(), r.source.as_str(), d);
            for (field, (key, display)) in [(left_role, subject), (right_role, object), (left_kind, subject), (right_kind, object)]
            {
                if let Some(field) = field {
                    facets.add(field, key, display, d);
                }
            }
        }
    }

    // article-derived facets and text index
    let articles = corpus.articles;
    let mut article_tokens: HashMap<usize, (Vec<String>, Vec<String>)> = HashMap::new();
    let mut text: HashMap<String, Vec<DocId>> = HashMap::new();
    let mut doc_tokens: Vec<String> = Vec::new();
    let mut docs = Vec::with_capacity(corpus.docs.len());
    for (i, aligned) in corpus.docs.into_iter().enumerate() {
        let d = i as DocId;
        doc_tokens.clear();
        doc_tokens.extend(tokenize_with(&aligned.doc.sentence, &stopwords));
        if let Some(a) = aligned.article {
            let meta = &articles[a];
            let (abstract_tokens, title_tokens) = article_tokens.entry(a).or_insert_with(|| {
                let mut abs = tokenize_with(&meta.abstract_text, &stopwords);
                abs.sort();
                abs.dedup();
                let mut title = tokenize_with(&meta.title, &stopwords);
                title.sort();
                title.dedup();
                (abs, title)
            });
            for t in abstract_tokens.iter() {
                facets.add(Field::AbstractKeyword, t, t, d);
            }
            doc_tokens.extend(abstract_tokens.iter().cloned());
            doc_tokens.extend(title_tokens.iter().cloned());
            let journal = meta.journal.trim();
            facets.add(Field::Journal, &journal.to_lowercase(), journal, d);
            for author in &meta.authors {
                facets.add(Field::Author, &author.to_lowercase(), author, d);
            }
            if let Some(p) = meta.publish_time {
                let key = p.month_key();
                facets.add(Field::PublishTime, &key, &key, d);
            }
        }
        doc_tokens.sort_unstable();
        doc_tokens.dedup();
        for t in doc_tokens.drain(..) {
            text.entry(t).or_default().push(d);
        }
        docs.push(StoredDoc {
            id: aligned.doc.id,
            sentence: aligned.doc.sentence,
            pmid: aligned.doc.pmid,
            url: aligned.doc.url,
            article: aligned.article.map(|a| a as u32),
            records: std::mem::take(&mut doc_records[i]),
        });
    }
    for r in &mut docs {
        r.records.sort_unstable();
        r.records.dedup();
    }

    // type layer: functional types, registered as a facet
    let (functional_types, ft_of_record) = semantics::ground_records(&stored, |c| display_of(c).to_string());
    for (r, &ft) in stored.iter().zip(&ft_of_record) {
        let ft = &functional_types[ft as usize];
        let key = ft.name.to_lowercase();
        for &d in &r.evidence {
            facets.add(Field::FunctionalType, &key, &ft.name, d);
        }
    }

    let (terms, postings) = facets.finish();
    let mut text_entries: Vec<(String, Vec<DocId>)> = text.into_iter().collect();
    text_entries.sort_by(|a, b| a.0.cmp(&b.0));
    let (text_terms, text_postings) = text_entries.into_iter().unzip();

    let derived_tuples = derive_tuples(&docs, &articles, &terms);

    Ok(Index::from_data(IndexData {
        docs,
        articles,
        records: stored,
        derived_tuples,
        entities,
        functional_types,
        terms,
        postings,
        text_terms,
        text_postings,
        aliases: options.aliases.clone(),
        stopwords,
    }))
}

fn entity_registry(records: &[StoredRecord], aliases: &AliasMap) -> Vec<EntityEntry> {
    let mut surfaces: BTreeMap<&str, BTreeMap<&str, u32>> = BTreeMap::new();
    for r in records {
        for e in [&r.subject, &r.object] {
            *surfaces.entry(e.canonical.as_str()).or_default().entry(e.display.as_str()).or_default() += 1;
        }
    }
    let alias_targets: HashMap<String, &str> = aliases.targets().map(|t| (t.to_lowercase(), t)).collect();
    surfaces
        .into_iter()
        .map(|(canonical, forms)| {
            let display = match alias_targets.get(canonical) {
                Some(t) => t.to_string(),
                None => pick_display(forms.into_iter()),
            };
            EntityEntry { canonical: canonical.to_string(), display }
        })
        .collect()
}

fn derive_tuples(docs: &[StoredDoc], articles: &[crate::ingest::ArticleMeta], terms: &[FacetTerm]) -> Vec<DerivedTuple> {
    let lookup = |field: Field, key: &str| -> Option<TermId> {
        terms.binary_search_by(|t| (t.field, t.key.as_str()).cmp(&(field, key))).ok().map(|i| i as TermId)
    };
    let mut linked: Vec<u32> = docs.iter().filter_map(|d| d.article).collect();
    linked.sort_unstable();
    linked.dedup();
    let mut tuples: BTreeMap<(TupleKind, TermId, TermId), Vec<u32>> = BTreeMap::new();
    let mut keywords: Vec<TermId> = Vec::new();
    for a in linked {
        let meta = &articles[a as usize];
        keywords.clear();
        // stopwords were already applied when the abstract_keyword facet was built
        keywords.extend(super::tokenize(&meta.abstract_text).iter().filter_map(|t| lookup(Field::AbstractKeyword, t)));
        keywords.sort_unstable();
        keywords.dedup();
        let journal = lookup(Field::Journal, &meta.journal.trim().to_lowercase());
        let month = meta.publish_time.and_then(|p| lookup(Field::PublishTime, &p.month_key()));
        for &k in &keywords {
            if let Some(j) = journal {
                tuples.entry((TupleKind::AbstractKeywordJournal, k, j)).or_default().push(a);
            }
            if let Some(m) = month {
                tuples.entry((TupleKind::AbstractKeywordPublishTime, k, m)).or_default().push(a);
            }
        }
    }
    tuples
        .into_iter()
        .map(|((kind, left, right), articles)| DerivedTuple { kind, left, right, articles })
        .collect()
}
