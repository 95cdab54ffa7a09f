//! Seeded synthetic corpora for tests and benchmarks.
//!
//! Generated record and document ids follow the parser conventions, so writing
//! a corpus out with [`SyntheticCorpus::ca_jsonl`] and friends and parsing it
//! back yields the same records.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::BuildError;
use crate::index::{build_index, BuildOptions, Index};
use crate::ingest::{align_by_pmid, ArticleMeta, Entity, EvidenceDoc, PairKind, PublishDate, RelationRecord, Source};
use crate::taxonomy::Taxonomy;

const CA_RELATIONS: &[&str] = &[
    "Activation",
    "Activation",
    "Activation",
    "Inhibition",
    "Inhibition",
    "IncreaseAmount",
    "DecreaseAmount",
    "Phosphorylation",
    "Ubiquitination",
    "Complex",
];
const KG_RELATIONS: &[&str] = &[
    "Increase Expression",
    "Decrease Expression",
    "Affect Binding",
    "Decrease Reaction",
    "Increase Activity",
    "Marker/Mechanism",
    "Therapeutic",
];
const JOURNALS: &[&str] = &["PLoS One", "Nature", "Cell", "J Virol", "Sci Rep", "Viruses"];

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub relations: usize,
    /// Protein/gene pool size; chemicals and diseases get a third each.
    pub entities: usize,
    pub articles: usize,
    /// Causal assertions carry 1..=max_evidence sentences.
    pub max_evidence: usize,
    /// Share of relations drawn as knowledge-graph pairs.
    pub kg_fraction: f64,
    /// Share of evidence sentences without a PMID.
    pub missing_pmid: f64,
    pub vocabulary: usize,
}

impl SyntheticConfig {
    pub fn small(seed: u64) -> SyntheticConfig {
        SyntheticConfig {
            seed,
            relations: 200,
            entities: 25,
            articles: 60,
            max_evidence: 3,
            kg_fraction: 0.3,
            missing_pmid: 0.1,
            vocabulary: 40,
        }
    }

    /// A corpus of `relations` records sized like a desk-scale benchmark.
    pub fn scaled(seed: u64, relations: usize) -> SyntheticConfig {
        SyntheticConfig {
            seed,
            relations,
            entities: (relations / 20).max(10),
            articles: (relations / 4).max(10),
            max_evidence: 2,
            kg_fraction: 0.3,
            missing_pmid: 0.05,
            vocabulary: 2_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub records: Vec<RelationRecord>,
    pub docs: Vec<EvidenceDoc>,
    pub articles: Vec<ArticleMeta>,
}

fn pubmed(pmid: &Option<String>) -> Option<String> {
    pmid.as_ref().map(|p| format!("https://pubmed.ncbi.nlm.nih.gov/{p}/"))
}

/// Surface form with random case so canonicalization has work to do.
fn surface(rng: &mut ChaCha8Rng, name: &str) -> String {
    if rng.random_bool(0.15) {
        name.to_lowercase()
    } else {
        name.to_string()
    }
}

impl SyntheticCorpus {
    pub fn generate(cfg: &SyntheticConfig) -> SyntheticCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n_prot = cfg.entities.max(2);
        let n_chem = (cfg.entities / 3).max(2);
        let n_dis = (cfg.entities / 3).max(2);
        let words: Vec<String> = (0..cfg.vocabulary.max(4)).map(|i| format!("w{i}")).collect();
        let sentence = |rng: &mut ChaCha8Rng, s: &str, o: &str| {
            let mut text = format!("{s} acts on {o}");
            for _ in 0..rng.random_range(2..6) {
                text.push(' ');
                text.push_str(words.choose(rng).unwrap());
            }
            text.push('.');
            text
        };

        let mut articles = Vec::with_capacity(cfg.articles);
        for a in 0..cfg.articles {
            let pmid = (10_000_000 + a).to_string();
            let year = rng.random_range(2019..=2021u16);
            let publish_time = match rng.random_range(0..10) {
                0 => None,
                1 => Some(PublishDate { year, month: None, day: None }),
                _ => Some(PublishDate { year, month: Some(rng.random_range(1..=12)), day: None }),
            };
            let abstract_text: Vec<&str> =
                (0..rng.random_range(3..9)).map(|_| words.choose(&mut rng).unwrap().as_str()).collect();
            let authors = (0..rng.random_range(1..4)).map(|_| format!("Author {}", rng.random_range(0..20))).collect();
            articles.push(ArticleMeta {
                pmid,
                title: format!("Study {a} of {}", words.choose(&mut rng).unwrap()),
                abstract_text: abstract_text.join(" "),
                authors,
                publish_time,
                journal: JOURNALS.choose(&mut rng).unwrap().to_string(),
            });
        }
        // a few PMIDs that never align
        let n_pmids = cfg.articles + cfg.articles / 10 + 1;
        let pick_pmid = |rng: &mut ChaCha8Rng| {
            (!rng.random_bool(cfg.missing_pmid)).then(|| (10_000_000 + rng.random_range(0..n_pmids)).to_string())
        };

        let mut ca = Vec::new();
        let mut kg = Vec::new();
        for _ in 0..cfg.relations {
            if rng.random_bool(cfg.kg_fraction) {
                let kind = *[PairKind::ChemicalGene, PairKind::GeneDisease, PairKind::ChemicalDisease]
                    .choose(&mut rng)
                    .unwrap();
                let chem = format!("C{}", rng.random_range(0..n_chem));
                let gene = format!("P{}", rng.random_range(0..n_prot));
                let dis = format!("D{}", rng.random_range(0..n_dis));
                let (s, o) = match kind {
                    PairKind::ChemicalGene => (chem, gene),
                    PairKind::GeneDisease => (gene, dis),
                    _ => (chem, dis),
                };
                kg.push((kind, s, o, KG_RELATIONS.choose(&mut rng).unwrap().to_string()));
            } else {
                let s = format!("P{}", rng.random_range(0..n_prot));
                let mut o = format!("P{}", rng.random_range(0..n_prot));
                if o == s {
                    o = format!("P{}", (rng.random_range(1..n_prot) + s[1..].parse::<usize>().unwrap()) % n_prot);
                }
                ca.push((s, o, CA_RELATIONS.choose(&mut rng).unwrap().to_string()));
            }
        }

        let mut out = SyntheticCorpus { records: Vec::new(), docs: Vec::new(), articles };
        for (line, (s, o, rel)) in ca.into_iter().enumerate() {
            let id = format!("ca0:{}", line + 1);
            let (s, o) = (surface(&mut rng, &s), surface(&mut rng, &o));
            let n = rng.random_range(1..=cfg.max_evidence.max(1));
            let mut evidence_ids = Vec::with_capacity(n);
            for k in 0..n {
                let pmid = pick_pmid(&mut rng);
                let doc = EvidenceDoc { id: format!("{id}:{k}"), sentence: sentence(&mut rng, &s, &o), url: pubmed(&pmid), pmid };
                evidence_ids.push(doc.id.clone());
                out.docs.push(doc);
            }
            out.records.push(RelationRecord {
                id,
                subject: Entity::from_surface(&s),
                object: Entity::from_surface(&o),
                relation: rel,
                source: Source::CausalAssertion,
                pair_kind: PairKind::ProteinProtein,
                evidence_ids,
            });
        }
        for (line, (kind, s, o, rel)) in kg.into_iter().enumerate() {
            let id = format!("kg0:{}", line + 1);
            let (s, o) = (surface(&mut rng, &s), surface(&mut rng, &o));
            let pmid = pick_pmid(&mut rng);
            out.docs.push(EvidenceDoc { id: id.clone(), sentence: sentence(&mut rng, &s, &o), url: pubmed(&pmid), pmid });
            out.records.push(RelationRecord {
                id: id.clone(),
                subject: Entity::from_surface(&s),
                object: Entity::from_surface(&o),
                relation: rel,
                source: Source::KnowledgeGraph,
                pair_kind: kind,
                evidence_ids: vec![id],
            });
        }
        out
    }

    pub fn build(&self, taxonomy: &Taxonomy, options: &BuildOptions) -> Result<Index, BuildError> {
        let corpus = align_by_pmid(self.docs.clone(), self.articles.clone());
        build_index(self.records.clone(), corpus, taxonomy, options)
    }

    fn docs_by_id(&self) -> HashMap<&str, &EvidenceDoc> {
        self.docs.iter().map(|d| (d.id.as_str(), d)).collect()
    }

    /// Causal-assertion records as JSON lines.
    pub fn ca_jsonl(&self) -> String {
        let docs = self.docs_by_id();
        let mut out = String::new();
        for r in self.records.iter().filter(|r| r.source == Source::CausalAssertion) {
            let evidence: Vec<_> = r
                .evidence_ids
                .iter()
                .map(|e| {
                    let d = docs[e.as_str()];
                    json!({"sentence": d.sentence, "pmid": d.pmid})
                })
                .collect();
            let line = json!({
                "subject": r.subject.display,
                "object": r.object.display,
                "relation_type": r.relation,
                "evidence": evidence,
            });
            writeln!(out, "{line}").unwrap();
        }
        out
    }

    /// Knowledge-graph records as JSON lines.
    pub fn kg_jsonl(&self) -> String {
        let docs = self.docs_by_id();
        let mut out = String::new();
        for r in self.records.iter().filter(|r| r.source == Source::KnowledgeGraph) {
            let d = docs[r.evidence_ids[0].as_str()];
            let line = json!({
                "subject": r.subject.display,
                "object": r.object.display,
                "relation_type": r.relation,
                "pair_kind": r.pair_kind.as_str(),
                "sentence": d.sentence,
                "pmid": d.pmid,
            });
            writeln!(out, "{line}").unwrap();
        }
        out
    }

    /// Article metadata table with a header row.
    pub fn metadata_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(crate::ingest::METADATA_COLUMNS).unwrap();
        for a in &self.articles {
            let date = a.publish_time.map(|p| p.to_string()).unwrap_or_default();
            w.write_record([&a.pmid, &a.title, &a.abstract_text, &a.authors.join("; "), &date, &a.journal]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}
