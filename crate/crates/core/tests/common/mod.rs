#![allow(dead_code)]

pub mod equivalence;
pub mod oracle;

use semviz_core::index::{build_index, BuildOptions, Index};
use semviz_core::ingest::{align_by_pmid, ArticleMeta, Entity, EvidenceDoc, PairKind, RelationRecord, Source};
use semviz_core::synthetic::SyntheticCorpus;
use semviz_core::{PublishDate, Taxonomy};

#[allow(unused_imports)]
pub use equivalence::{ctx_of, random_ctx};
use oracle::Model;

pub fn build(corpus: &SyntheticCorpus, stopwords: &[&str]) -> (Index, Model) {
    let taxonomy = Taxonomy::builtin();
    let options = BuildOptions { stopwords: stopwords.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    let index = corpus.build(&taxonomy, &options).expect("synthetic corpus builds");
    let model = Model::new(&corpus.records, &corpus.docs, &corpus.articles, &taxonomy, stopwords);
    (index, model)
}

/// Hand-built corpus: one record per call, each with its own evidence docs.
#[derive(Default)]
pub struct Fixture {
    pub records: Vec<RelationRecord>,
    pub docs: Vec<EvidenceDoc>,
    pub articles: Vec<ArticleMeta>,
}

impl Fixture {
    pub fn new() -> Fixture {
        Fixture::default()
    }

    /// Adds a record with one evidence doc per entry of `pmids`.
    pub fn relation(mut self, s: &str, o: &str, rel: &str, kind: PairKind, pmids: &[Option<&str>]) -> Fixture {
        let id = format!("r{}", self.records.len());
        let mut evidence_ids = Vec::new();
        for (k, pmid) in pmids.iter().enumerate() {
            let doc_id = format!("{id}:{k}");
            self.docs.push(EvidenceDoc {
                id: doc_id.clone(),
                sentence: format!("{s} {rel} {o}"),
                pmid: pmid.map(str::to_string),
                url: pmid.map(|p| format!("https://pubmed.ncbi.nlm.nih.gov/{p}/")),
            });
            evidence_ids.push(doc_id);
        }
        self.records.push(RelationRecord {
            id,
            subject: Entity::from_surface(s),
            object: Entity::from_surface(o),
            relation: rel.to_string(),
            source: if kind == PairKind::ProteinProtein { Source::CausalAssertion } else { Source::KnowledgeGraph },
            pair_kind: kind,
            evidence_ids,
        });
        self
    }

    pub fn pp(self, s: &str, o: &str, rel: &str) -> Fixture {
        self.relation(s, o, rel, PairKind::ProteinProtein, &[None])
    }

    pub fn article(mut self, pmid: &str, abstract_text: &str, journal: &str, date: Option<&str>) -> Fixture {
        self.articles.push(ArticleMeta {
            pmid: pmid.to_string(),
            title: String::new(),
            abstract_text: abstract_text.to_string(),
            authors: Vec::new(),
            publish_time: date.map(|d| d.parse::<PublishDate>().unwrap()),
            journal: journal.to_string(),
        });
        self
    }

    pub fn build(&self) -> Index {
        let corpus = align_by_pmid(self.docs.clone(), self.articles.clone());
        build_index(self.records.clone(), corpus, &Taxonomy::builtin(), &BuildOptions::default()).unwrap()
    }

    pub fn model(&self) -> Model {
        Model::new(&self.records, &self.docs, &self.articles, &Taxonomy::builtin(), &[])
    }
}
