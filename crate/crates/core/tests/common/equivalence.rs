//! Engine-versus-oracle comparisons over one corpus. Each check returns the
//! number of comparisons made, or a description of the first mismatch.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use semviz_core::aggregate::{self, AggField, CountBy};
use semviz_core::pathways::{EdgeSpec, RegulationGraph};
use semviz_core::semantics::{join_triplets, opposite_upstream_regulators, upstream_regulators};
use semviz_core::{Field, FilterContext, Index, Polarity};

use super::oracle::{self, Edges, Model};

pub fn ctx_of(constraints: &[(Field, String)], text: Option<&str>) -> FilterContext {
    let mut ctx = FilterContext::new();
    for (f, t) in constraints {
        ctx.insert(*f, t.clone());
    }
    ctx.text = text.map(str::to_string);
    ctx
}

/// Random conjunctive context biased towards non-empty results: constraints
/// are sampled from the facets of random documents.
pub fn random_ctx(rng: &mut impl Rng, model: &Model) -> (Vec<(Field, String)>, Option<String>) {
    let mut constraints = Vec::new();
    if model.docs.is_empty() {
        return (constraints, None);
    }
    for _ in 0..rng.random_range(0..=3) {
        let doc = model.docs.choose(rng).unwrap();
        let facets: Vec<_> = doc.facets.iter().collect();
        if let Some(c) = facets.choose(rng) {
            constraints.push((*c).clone());
        }
    }
    let text = rng.random_bool(0.2).then(|| {
        let doc = model.docs.choose(rng).unwrap();
        doc.text.iter().collect::<Vec<_>>().choose(rng).map(|t| t.to_string())
    });
    (constraints, text.flatten())
}

/// resolve, tag_cloud, heat_map and metrics under `contexts` random contexts.
pub fn check_aggregations(index: &Index, model: &Model, rng: &mut impl Rng, contexts: usize) -> Result<usize, String> {
    let mut n = 0;
    for _ in 0..contexts {
        let (constraints, text) = random_ctx(rng, model);
        let ctx = ctx_of(&constraints, text.as_deref());
        let want = model.resolve(&constraints, text.as_deref());
        let got = index.resolve(&ctx);
        let got_ids: Vec<&str> = got.doc_ids.iter().map(|&d| index.doc(d).id.as_str()).collect();
        let want_ids: Vec<&str> = want.iter().map(|&d| model.docs[d].id.as_str()).collect();
        if got_ids != want_ids {
            return Err(format!("resolve {ctx:?}: engine {} docs, oracle {} docs", got_ids.len(), want_ids.len()));
        }
        n += 1;

        for field in Field::ALL {
            for k in [3usize, usize::MAX] {
                let got: Vec<(String, u64)> =
                    aggregate::tag_cloud(index, &ctx, AggField::Facet(field), k, CountBy::Docs, None)
                        .map_err(|e| e.to_string())?
                        .into_iter()
                        .map(|t| (t.key, t.count))
                        .collect();
                let want = model.tag_cloud(&want, field, k);
                if got != want {
                    return Err(format!("tag_cloud {field} k={k} under {ctx:?}: {got:?} != {want:?}"));
                }
                n += 1;
            }
        }

        let pairs = [
            (Field::Subject, Field::Object),
            (Field::Chemical, Field::Disease),
            (Field::AbstractKeyword, Field::Journal),
            (Field::FunctionalType, Field::Disease),
        ];
        let &(fx, fy) = pairs.choose(rng).unwrap();
        let (kx, ky) = (rng.random_range(1..12), rng.random_range(1..12));
        let m = aggregate::heat_map(index, &ctx, fx, fy, kx, ky).map_err(|e| e.to_string())?;
        let got = (
            m.x_terms.iter().map(|t| t.key.clone()).collect::<Vec<_>>(),
            m.y_terms.iter().map(|t| t.key.clone()).collect::<Vec<_>>(),
            m.cells,
        );
        let want_hm = model.heat_map(&want, fx, fy, kx, ky);
        if got != want_hm {
            return Err(format!("heat_map {fx}×{fy} under {ctx:?}: {got:?} != {want_hm:?}"));
        }
        n += 1;

        let m = aggregate::metrics(index, &ctx);
        if (m.evidence_count, m.article_count) != model.metrics(&want) {
            return Err(format!("metrics under {ctx:?}: {m:?} != {:?}", model.metrics(&want)));
        }
        n += 1;
    }
    Ok(n)
}

/// Functional-type membership and naming, upstream and opposite-upstream sets.
pub fn check_semantics(index: &Index, model: &Model) -> Result<usize, String> {
    let mut n = 0;
    let want_members = model.functional_type_members();
    let want_names = model.functional_type_names();
    let got: BTreeMap<_, _> = index
        .functional_types()
        .iter()
        .map(|ft| ((ft.object.clone(), ft.polarity, ft.metatype), ft))
        .collect();
    if got.len() != want_members.len() {
        return Err(format!("{} functional types, oracle {}", got.len(), want_members.len()));
    }
    for (key, members) in &want_members {
        let ft = got.get(key).ok_or_else(|| format!("missing functional type {key:?}"))?;
        let have: BTreeSet<String> = ft.member_entities().map(String::from).collect();
        if &have != members {
            return Err(format!("members of {}: {have:?} != {members:?}", ft.name));
        }
        if ft.name != want_names[key] {
            return Err(format!("name {:?} != {:?}", ft.name, want_names[key]));
        }
        n += 2;
        for opposite in [false, true] {
            let set = if opposite { opposite_upstream_regulators(index, ft) } else { upstream_regulators(index, ft) };
            let have: BTreeMap<(String, String), BTreeSet<String>> = set
                .regulators
                .iter()
                .map(|r| ((r.entity.clone(), r.via_member.clone()), r.record_ids.iter().cloned().collect()))
                .collect();
            let want = model.upstream(&key.0, key.1, key.2, opposite);
            if have != want {
                return Err(format!("upstream(opposite={opposite}) of {}: {have:?} != {want:?}", ft.name));
            }
            n += 1;
        }
    }
    let have: BTreeMap<_, BTreeSet<String>> = join_triplets(index)
        .into_iter()
        .map(|t| ((t.chemical, t.gene, t.disease, t.cg_relation, t.gd_relation), t.evidence.into_iter().collect()))
        .collect();
    let want = model.triplets();
    if have != want {
        return Err(format!("triplets: {} rows, oracle {}", have.len(), want.len()));
    }
    Ok(n + 1)
}

fn compare_graph(graph: &RegulationGraph, edges: &Edges, targets: &[String], max_depth: usize) -> Result<usize, String> {
    let mut n = 0;
    for t in targets {
        for depth in 2..=max_depth {
            let got: Vec<(Vec<String>, Vec<String>)> = graph
                .enumerate_pathways(t, depth)
                .into_iter()
                .map(|p| (p.nodes, p.edges.into_iter().map(|e| e.relation).collect()))
                .collect();
            let want = oracle::simple_paths(edges, t, depth);
            if got != want {
                return Err(format!("pathways to {t} depth {depth}: {} != {}", got.len(), want.len()));
            }
            let walks = graph.walk_count_estimate(t, depth);
            let want_walks = oracle::count_walks(edges, t, depth);
            if walks != want_walks {
                return Err(format!("walks to {t} depth {depth}: {walks} != {want_walks}"));
            }
            n += 2;
        }
    }
    Ok(n)
}

/// Pathway enumeration and walk counts on the corpus' Activation graph.
pub fn check_corpus_pathways(index: &Index, model: &Model, max_depth: usize) -> Result<usize, String> {
    let graph = RegulationGraph::build(index, &["Activation"]).map_err(|e| e.to_string())?;
    let edges: Edges = model
        .records
        .iter()
        .filter(|r| r.relation == "Activation")
        .map(|r| (r.subject.clone(), r.object.clone(), r.relation.clone()))
        .collect();
    let nodes: BTreeSet<&String> = edges.iter().flat_map(|e| [&e.0, &e.1]).collect();
    if nodes.len() > 30 {
        return Err(format!("activation graph has {} nodes; expected at most 30", nodes.len()));
    }
    let targets: Vec<String> = nodes.into_iter().cloned().collect();
    compare_graph(&graph, &edges, &targets, max_depth)
}

/// A random multigraph on at most `max_nodes` nodes with Activation and
/// Inhibition edges, compared against the oracle for every target.
pub fn check_random_graph(rng: &mut impl Rng, max_nodes: usize, max_depth: usize) -> Result<usize, String> {
    let n_nodes = rng.random_range(2..=max_nodes);
    let n_edges = rng.random_range(0..=n_nodes * 3);
    let mut specs = Vec::new();
    let mut edges = Edges::new();
    for i in 0..n_edges {
        let s = format!("n{:02}", rng.random_range(0..n_nodes));
        let t = format!("n{:02}", rng.random_range(0..n_nodes));
        if s == t {
            continue;
        }
        let (rel, pol) =
            if rng.random_bool(0.7) { ("Activation", Polarity::Increase) } else { ("Inhibition", Polarity::Decrease) };
        edges.insert((s.clone(), t.clone(), rel.to_string()));
        specs.push(EdgeSpec { source: s, target: t, relation: rel.into(), polarity: pol, records: vec![i as u32] });
    }
    let graph = RegulationGraph::from_edges(specs);
    let targets: Vec<String> = (0..n_nodes).map(|i| format!("n{i:02}")).collect();
    compare_graph(&graph, &edges, &targets, max_depth)
}

/// Corpus shape for oracle runs: at most 500 relations, 1,000 documents and
/// 25 proteins (so the Activation graph stays within 30 nodes).
pub fn random_config(rng: &mut impl Rng, seed: u64) -> semviz_core::synthetic::SyntheticConfig {
    semviz_core::synthetic::SyntheticConfig {
        seed,
        relations: rng.random_range(1..=500),
        entities: rng.random_range(3..=25),
        articles: rng.random_range(1..=80),
        max_evidence: 2,
        kg_fraction: rng.random_range(0.0..0.6),
        missing_pmid: rng.random_range(0.0..0.3),
        vocabulary: rng.random_range(5..=60),
    }
}
