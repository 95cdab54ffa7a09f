//! Brute-force reference implementations.
//!
//! Everything here is recomputed from the raw corpus with nested loops and
//! linear scans. Nothing reads postings, lookups or graphs out of the index,
//! so agreement with the engine is evidence rather than tautology.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use semviz_core::ingest::{ArticleMeta, EvidenceDoc, PairKind, RelationRecord};
use semviz_core::taxonomy::{Metatype, Polarity, Taxonomy};
use semviz_core::Field;

/// Lowercased alphanumeric runs of at least two characters.
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() {
            cur.push(c);
        } else {
            if cur.chars().count() >= 2 {
                out.push(cur.to_lowercase());
            }
            cur.clear();
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ORecord {
    pub id: String,
    pub subject: String,
    pub object: String,
    pub relation: String,
    pub metatype: Metatype,
    pub polarity: Polarity,
    pub pair_kind: PairKind,
    pub docs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ODoc {
    pub id: String,
    pub pmid: Option<String>,
    pub article: Option<usize>,
    pub facets: BTreeSet<(Field, String)>,
    pub text: BTreeSet<String>,
}

/// Flat, unindexed view of a corpus.
#[derive(Debug, Clone)]
pub struct Model {
    pub records: Vec<ORecord>,
    pub docs: Vec<ODoc>,
    pub articles: Vec<ArticleMeta>,
    pub displays: BTreeMap<String, String>,
    pub stopwords: BTreeSet<String>,
}

fn snake_metatype(m: Metatype) -> &'static str {
    match m {
        Metatype::RegulateActivity => "regulate_activity",
        Metatype::Modification => "modification",
        Metatype::Other => "other",
    }
}

fn snake_pair(p: PairKind) -> &'static str {
    match p {
        PairKind::ProteinProtein => "protein_protein",
        PairKind::ChemicalGene => "chemical_gene",
        PairKind::ChemicalDisease => "chemical_disease",
        PairKind::GeneDisease => "gene_disease",
    }
}

pub fn month_key(a: &ArticleMeta) -> Option<String> {
    a.publish_time.map(|p| match p.month {
        Some(m) => format!("{:04}-{:02}", p.year, m),
        None => format!("{:04}", p.year),
    })
}

/// Independent statement of the functional-type naming rule.
pub fn ft_name(object_display: &str, polarity: Polarity, metatype: Metatype, relations: &BTreeSet<String>) -> String {
    let sym = match polarity {
        Polarity::Increase => "++",
        Polarity::Decrease => "--",
        Polarity::Affect => "→",
    };
    let only = if relations.len() == 1 { relations.iter().next().cloned() } else { None };
    match (metatype, only.as_deref()) {
        (Metatype::RegulateActivity, Some(r)) if r.eq_ignore_ascii_case("activation") => {
            format!("{object_display} Activator")
        }
        (Metatype::RegulateActivity, Some(r)) if r.eq_ignore_ascii_case("inhibition") => {
            format!("{object_display} Inhibitor")
        }
        (Metatype::Modification, Some(r)) => format!("{object_display} {r} target"),
        (Metatype::Modification, None) => format!("{object_display} Modifier"),
        _ => format!("{sym}{object_display} Regulator"),
    }
}

impl Model {
    pub fn new(
        records: &[RelationRecord],
        docs: &[EvidenceDoc],
        articles: &[ArticleMeta],
        taxonomy: &Taxonomy,
        stopwords: &[&str],
    ) -> Model {
        let stopwords: BTreeSet<String> = stopwords.iter().map(|s| s.to_lowercase()).collect();
        let keep = |t: &String| !stopwords.contains(t);

        // surface-form counts; most frequent wins, ties to the smallest string
        let mut forms: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for r in records {
            for e in [&r.subject, &r.object] {
                *forms.entry(e.display.to_lowercase()).or_default().entry(e.display.clone()).or_default() += 1;
            }
        }
        let displays: BTreeMap<String, String> = forms
            .into_iter()
            .map(|(k, f)| {
                let best = f.iter().fold(None::<(&String, usize)>, |acc, (s, &n)| match acc {
                    Some((_, m)) if m >= n => acc,
                    _ => Some((s, n)),
                });
                (k, best.unwrap().0.clone())
            })
            .collect();

        let mut odocs: Vec<ODoc> = Vec::new();
        for d in docs {
            let article = d.pmid.as_ref().and_then(|p| articles.iter().position(|a| &a.pmid == p));
            let mut text: BTreeSet<String> = tokens(&d.sentence).into_iter().filter(keep).collect();
            let mut facets = BTreeSet::new();
            if let Some(a) = article {
                let a = &articles[a];
                for t in tokens(&a.abstract_text).into_iter().filter(keep) {
                    facets.insert((Field::AbstractKeyword, t.clone()));
                    text.insert(t);
                }
                text.extend(tokens(&a.title).into_iter().filter(keep));
                if !a.journal.trim().is_empty() {
                    facets.insert((Field::Journal, a.journal.trim().to_lowercase()));
                }
                for au in &a.authors {
                    facets.insert((Field::Author, au.to_lowercase()));
                }
                if let Some(m) = month_key(a) {
                    facets.insert((Field::PublishTime, m));
                }
            }
            odocs.push(ODoc { id: d.id.clone(), pmid: d.pmid.clone(), article, facets, text });
        }

        let mut orecords = Vec::new();
        for r in records {
            let class = taxonomy.lookup(&r.relation);
            let doc_ords: Vec<usize> =
                r.evidence_ids.iter().map(|e| docs.iter().position(|d| &d.id == e).unwrap()).collect();
            orecords.push(ORecord {
                id: r.id.clone(),
                subject: r.subject.display.to_lowercase(),
                object: r.object.display.to_lowercase(),
                relation: class.name.clone(),
                metatype: class.metatype,
                polarity: class.polarity,
                pair_kind: r.pair_kind,
                docs: doc_ords,
            });
        }

        let mut model = Model { records: orecords, docs: odocs, articles: articles.to_vec(), displays, stopwords };
        let ft_names = model.functional_type_names();
        for r in model.records.clone() {
            let key = (r.object.clone(), r.polarity, r.metatype);
            let ft = ft_names[&key].to_lowercase();
            for &d in &r.docs {
                let f = &mut model.docs[d].facets;
                f.insert((Field::Subject, r.subject.clone()));
                f.insert((Field::Object, r.object.clone()));
                f.insert((Field::RelationType, r.relation.to_lowercase()));
                f.insert((Field::Metatype, snake_metatype(r.metatype).into()));
                f.insert((Field::PairKind, snake_pair(r.pair_kind).into()));
                let source = if r.pair_kind == PairKind::ProteinProtein { "causal_assertion" } else { "knowledge_graph" };
                f.insert((Field::Source, source.into()));
                match r.metatype {
                    Metatype::RegulateActivity => {
                        f.insert((Field::RoleSubject, r.subject.clone()));
                        f.insert((Field::RoleObject, r.object.clone()));
                    }
                    Metatype::Modification => {
                        f.insert((Field::RoleEnzyme, r.subject.clone()));
                        f.insert((Field::RoleSubstrate, r.object.clone()));
                    }
                    Metatype::Other => {}
                }
                let (l, rr) = match r.pair_kind {
                    PairKind::ProteinProtein => (None, None),
                    PairKind::ChemicalGene => (Some(Field::Chemical), Some(Field::Gene)),
                    PairKind::ChemicalDisease => (Some(Field::Chemical), Some(Field::Disease)),
                    PairKind::GeneDisease => (Some(Field::Gene), Some(Field::Disease)),
                };
                if let Some(l) = l {
                    f.insert((l, r.subject.clone()));
                }
                if let Some(rr) = rr {
                    f.insert((rr, r.object.clone()));
                }
                f.insert((Field::FunctionalType, ft.clone()));
            }
        }
        model
    }

    pub fn display(&self, canonical: &str) -> String {
        self.displays.get(canonical).cloned().unwrap_or_else(|| canonical.to_string())
    }

    /// `(object, polarity, metatype)` → display name.
    pub fn functional_type_names(&self) -> BTreeMap<(String, Polarity, Metatype), String> {
        let mut rels: BTreeMap<(String, Polarity, Metatype), BTreeSet<String>> = BTreeMap::new();
        for r in &self.records {
            rels.entry((r.object.clone(), r.polarity, r.metatype)).or_default().insert(r.relation.clone());
        }
        rels.into_iter()
            .map(|((o, p, m), rs)| {
                let name = ft_name(&self.display(&o), p, m, &rs);
                ((o, p, m), name)
            })
            .collect()
    }

    /// `(object, polarity, metatype)` → member subjects.
    pub fn functional_type_members(&self) -> BTreeMap<(String, Polarity, Metatype), BTreeSet<String>> {
        let mut out: BTreeMap<_, BTreeSet<String>> = BTreeMap::new();
        for r in &self.records {
            out.entry((r.object.clone(), r.polarity, r.metatype)).or_default().insert(r.subject.clone());
        }
        out
    }

    /// Document ordinals satisfying every constraint and the text, in order.
    /// Constraint terms are taken as already-normalized keys.
    pub fn resolve(&self, constraints: &[(Field, String)], text: Option<&str>) -> Vec<usize> {
        let wanted: Vec<String> = text
            .map(|t| tokens(t).into_iter().filter(|x| !self.stopwords.contains(x)).collect())
            .unwrap_or_default();
        (0..self.docs.len())
            .filter(|&d| {
                let doc = &self.docs[d];
                constraints.iter().all(|c| doc.facets.contains(c)) && wanted.iter().all(|w| doc.text.contains(w))
            })
            .collect()
    }

    /// `(key, count)` sorted by count desc then key, zero counts dropped, top k.
    pub fn tag_cloud(&self, evidence: &[usize], field: Field, k: usize) -> Vec<(String, u64)> {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for &d in evidence {
            for (f, key) in &self.docs[d].facets {
                if *f == field {
                    *counts.entry(key.clone()).or_default() += 1;
                }
            }
        }
        let mut v: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }

    /// `(x keys, y keys, cells[y][x])` with zero rows and columns pruned.
    pub fn heat_map(
        &self,
        evidence: &[usize],
        fx: Field,
        fy: Field,
        kx: usize,
        ky: usize,
    ) -> (Vec<String>, Vec<String>, Vec<Vec<u64>>) {
        let xs: Vec<String> = self.tag_cloud(evidence, fx, kx).into_iter().map(|t| t.0).collect();
        let ys: Vec<String> = self.tag_cloud(evidence, fy, ky).into_iter().map(|t| t.0).collect();
        let mut cells = vec![vec![0u64; xs.len()]; ys.len()];
        for (yi, y) in ys.iter().enumerate() {
            for (xi, x) in xs.iter().enumerate() {
                for &d in evidence {
                    let f = &self.docs[d].facets;
                    if f.contains(&(fx, x.clone())) && f.contains(&(fy, y.clone())) {
                        cells[yi][xi] += 1;
                    }
                }
            }
        }
        let keep_x: Vec<usize> = (0..xs.len()).filter(|&x| (0..ys.len()).any(|y| cells[y][x] > 0)).collect();
        let keep_y: Vec<usize> = (0..ys.len()).filter(|&y| (0..xs.len()).any(|x| cells[y][x] > 0)).collect();
        (
            keep_x.iter().map(|&x| xs[x].clone()).collect(),
            keep_y.iter().map(|&y| ys[y].clone()).collect(),
            keep_y.iter().map(|&y| keep_x.iter().map(|&x| cells[y][x]).collect()).collect(),
        )
    }

    pub fn metrics(&self, evidence: &[usize]) -> (u64, u64) {
        let pmids: BTreeSet<&String> = evidence.iter().filter_map(|&d| self.docs[d].pmid.as_ref()).collect();
        (evidence.len() as u64, pmids.len() as u64)
    }

    /// Upstream (or opposite-upstream) pairs `(x, via member)` with record ids.
    pub fn upstream(
        &self,
        object: &str,
        polarity: Polarity,
        metatype: Metatype,
        opposite: bool,
    ) -> BTreeMap<(String, String), BTreeSet<String>> {
        let mut out = BTreeMap::new();
        if polarity == Polarity::Affect || metatype == Metatype::Modification {
            return out;
        }
        let wanted = match (polarity, opposite) {
            (p, false) => p,
            (Polarity::Increase, true) => Polarity::Decrease,
            (_, true) => Polarity::Increase,
        };
        for member_rec in &self.records {
            if member_rec.object != object || member_rec.polarity != polarity || member_rec.metatype != metatype {
                continue;
            }
            let m = &member_rec.subject;
            for r in &self.records {
                if &r.object == m && r.metatype == Metatype::RegulateActivity && r.polarity == wanted {
                    out.entry((r.subject.clone(), m.clone())).or_insert_with(BTreeSet::new).insert(r.id.clone());
                }
            }
        }
        out
    }

    /// Natural join of chemical–gene and gene–disease records on the gene.
    pub fn triplets(&self) -> BTreeMap<(String, String, String, String, String), BTreeSet<String>> {
        let mut out: BTreeMap<_, BTreeSet<String>> = BTreeMap::new();
        for a in &self.records {
            for b in &self.records {
                if a.pair_kind == PairKind::ChemicalGene && b.pair_kind == PairKind::GeneDisease && a.object == b.subject {
                    let key = (a.subject.clone(), a.object.clone(), b.object.clone(), a.relation.clone(), b.relation.clone());
                    let e = out.entry(key).or_default();
                    e.insert(a.id.clone());
                    e.insert(b.id.clone());
                }
            }
        }
        out
    }
}

/// Distinct `(source, target, relation)` edges.
pub type Edges = BTreeSet<(String, String, String)>;

/// All simple paths of 2..=depth nodes ending at `target`, found by forward
/// search from every node over a flat edge list; sorted by (length, nodes,
/// relations).
pub fn simple_paths(edges: &Edges, target: &str, depth: usize) -> Vec<(Vec<String>, Vec<String>)> {
    fn go(
        edges: &Edges,
        target: &str,
        depth: usize,
        nodes: &mut Vec<String>,
        rels: &mut Vec<String>,
        out: &mut Vec<(Vec<String>, Vec<String>)>,
    ) {
        let last = nodes.last().unwrap().clone();
        if last == target && nodes.len() >= 2 {
            out.push((nodes.clone(), rels.clone()));
            return;
        }
        if nodes.len() >= depth {
            return;
        }
        for (s, t, r) in edges {
            if *s == last && !nodes.contains(t) {
                nodes.push(t.clone());
                rels.push(r.clone());
                go(edges, target, depth, nodes, rels, out);
                nodes.pop();
                rels.pop();
            }
        }
    }
    let starts: BTreeSet<&String> = edges.iter().map(|e| &e.0).collect();
    let mut out = Vec::new();
    for s in starts {
        if s == target {
            continue;
        }
        go(edges, target, depth, &mut vec![s.clone()], &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)).then_with(|| a.1.cmp(&b.1)));
    out
}

/// Walks (node repetition allowed) of 2..=depth nodes ending at `target`,
/// counted by explicit enumeration.
pub fn count_walks(edges: &Edges, target: &str, depth: usize) -> u64 {
    fn back(edges: &Edges, head: &str, remaining: usize) -> u64 {
        if remaining == 0 {
            return 0;
        }
        let mut n = 0;
        for (s, t, _) in edges {
            if t == head {
                n += 1 + back(edges, s, remaining - 1);
            }
        }
        n
    }
    if depth < 2 {
        return 0;
    }
    back(edges, target, depth - 1)
}
