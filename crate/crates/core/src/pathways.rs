//! Signed regulation graph and bounded pathway search.
//!
//! Pathway length counts nodes: a direct regulator gives a 2-node pathway, and
//! the hard cap of 5 allows at most four edges. Before enumerating, the walk
//! count ending at the target is computed by dynamic programming; it bounds the
//! number of simple paths from above and is used to shrink the search depth
//! when the expected volume exceeds a budget.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::index::{DocId, DocumentView, Index, RecordId};
use crate::taxonomy::Polarity;

/// Hard cap on pathway length in nodes.
pub const MAX_PATHWAY_LENGTH: usize = 5;
pub const DEFAULT_BUDGET: u64 = 10_000;
pub const DEFAULT_RELATION: &str = "Activation";

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSpec {
    pub source: String,
    pub target: String,
    pub relation: String,
    pub polarity: Polarity,
    pub records: Vec<RecordId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub source: NodeId,
    pub target: NodeId,
    pub relation: String,
    pub polarity: Polarity,
    /// Supporting records, ascending.
    pub records: Vec<RecordId>,
}

/// Directed multigraph: one edge per distinct `(subject, object, relation)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegulationGraph {
    nodes: Vec<String>,
    edges: Vec<GraphEdge>,
    in_edges: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathwayEdge {
    pub relation: String,
    pub polarity: Polarity,
    pub records: Vec<RecordId>,
}

/// Simple path `v_k → … → v_1` with `v_1` the target; `nodes` are listed from
/// the start of the chain to the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pathway {
    pub nodes: Vec<String>,
    pub edges: Vec<PathwayEdge>,
    pub net_polarity: Polarity,
}

impl Pathway {
    pub fn length(&self) -> usize {
        self.nodes.len()
    }

    pub fn start(&self) -> &str {
        &self.nodes[0]
    }

    pub fn target(&self) -> &str {
        self.nodes.last().map(String::as_str).unwrap_or("")
    }
}

impl RegulationGraph {
    /// Graph over the index records whose relation type is in `relation_filter`
    /// (case-insensitive).
    pub fn build<S: AsRef<str>>(index: &Index, relation_filter: &[S]) -> Result<RegulationGraph, ConfigError> {
        let wanted: HashSet<String> = relation_filter.iter().map(|r| r.as_ref().trim().to_lowercase()).collect();
        if wanted.is_empty() || wanted.iter().all(String::is_empty) {
            return Err(ConfigError::EmptyRelationFilter);
        }
        let specs = index
            .records()
            .iter()
            .enumerate()
            .filter(|(_, r)| wanted.contains(&r.relation.to_lowercase()))
            .map(|(i, r)| EdgeSpec {
                source: r.subject.canonical.clone(),
                target: r.object.canonical.clone(),
                relation: r.relation.clone(),
                polarity: r.polarity,
                records: vec![i as RecordId],
            });
        Ok(RegulationGraph::from_edges(specs))
    }

    /// Builds a graph from edge specifications, merging duplicates of the same
    /// `(source, target, relation)`.
    pub fn from_edges(specs: impl IntoIterator<Item = EdgeSpec>) -> RegulationGraph {
        let mut merged: BTreeMap<(String, String, String), (Polarity, Vec<RecordId>)> = BTreeMap::new();
        for s in specs {
            let entry = merged.entry((s.source, s.target, s.relation)).or_insert((s.polarity, Vec::new()));
            entry.1.extend(s.records);
        }
        let names: BTreeSet<&str> = merged.keys().flat_map(|(s, t, _)| [s.as_str(), t.as_str()]).collect();
        let nodes: Vec<String> = names.into_iter().map(String::from).collect();
        let id = |name: &str| nodes.binary_search_by(|n| n.as_str().cmp(name)).unwrap() as NodeId;
        let mut edges = Vec::with_capacity(merged.len());
        for ((s, t, relation), (polarity, mut records)) in merged.iter().map(|(k, v)| (k.clone(), v.clone())) {
            records.sort_unstable();
            records.dedup();
            edges.push(GraphEdge { source: id(&s), target: id(&t), relation, polarity, records });
        }
        let mut in_edges = vec![Vec::new(); nodes.len()];
        // edges are sorted by (source, target, relation), so each in-list is
        // ordered by (neighbor, relation)
        for (e, edge) in edges.iter().enumerate() {
            in_edges[edge.target as usize].push(e as u32);
        }
        RegulationGraph { nodes, edges, in_edges }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| i as NodeId)
    }

    pub fn node_name(&self, node: NodeId) -> &str {
        &self.nodes[node as usize]
    }

    /// Incoming edges of `node`, ordered by (source, relation).
    pub fn in_edges(&self, node: NodeId) -> impl Iterator<Item = &GraphEdge> {
        self.in_edges[node as usize].iter().map(|&e| &self.edges[e as usize])
    }

    /// Walks ending at `target`, counted per node-length `0..=depth`
    /// (entries 0 and 1 are always zero). Saturates at `u64::MAX`.
    pub fn walk_counts(&self, target: &str, depth: usize) -> Vec<u64> {
        let mut per_length = vec![0u64; depth + 1];
        let Some(t) = self.node_id(target) else { return per_length };
        // ending[v] = number of walks of the current length from v to target
        let mut ending = vec![0u64; self.nodes.len()];
        ending[t as usize] = 1;
        for slot in per_length.iter_mut().skip(2) {
            let mut next = vec![0u64; self.nodes.len()];
            for e in &self.edges {
                let add = ending[e.target as usize];
                if add != 0 {
                    let cell = &mut next[e.source as usize];
                    *cell = cell.saturating_add(add);
                }
            }
            *slot = next.iter().fold(0u64, |acc, &x| acc.saturating_add(x));
            ending = next;
            if *slot == 0 {
                break;
            }
        }
        per_length
    }

    /// Number of walks (node repetition allowed) of node-length `2..=depth`
    /// ending at `target`. Zero for unknown targets.
    pub fn walk_count_estimate(&self, target: &str, depth: usize) -> u64 {
        self.walk_counts(target, depth).into_iter().fold(0u64, u64::saturating_add)
    }

    /// Largest depth in `2..=min(max_depth, 5)` whose walk estimate fits the
    /// budget; 2 when even direct regulators exceed it.
    pub fn effective_depth(&self, target: &str, max_depth: usize, budget: u64) -> usize {
        let cap = max_depth.clamp(2, MAX_PATHWAY_LENGTH);
        let counts = self.walk_counts(target, cap);
        let mut total = 0u64;
        let mut best = 2;
        for (d, c) in counts.iter().enumerate().skip(2) {
            total = total.saturating_add(*c);
            if total <= budget {
                best = d;
            } else {
                break;
            }
        }
        best
    }

    /// Every simple path of node-length `2..=depth` ending at `target`,
    /// ordered by (length, node sequence, relation sequence).
    pub fn enumerate_pathways(&self, target: &str, depth: usize) -> Vec<Pathway> {
        let Some(t) = self.node_id(target) else { return Vec::new() };
        if depth < 2 {
            return Vec::new();
        }
        let mut found: Vec<(Vec<NodeId>, Vec<u32>)> = Vec::new();
        let mut on_path = vec![false; self.nodes.len()];
        let mut nodes = vec![t];
        let mut edges: Vec<u32> = Vec::new();
        on_path[t as usize] = true;
        self.extend_backwards(depth, &mut on_path, &mut nodes, &mut edges, &mut found);
        let mut keyed: Vec<(Vec<NodeId>, Vec<u32>)> = found
            .into_iter()
            .map(|(mut n, mut e)| {
                n.reverse();
                e.reverse();
                (n, e)
            })
            .collect();
        keyed.sort_by(|a, b| {
            a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)).then_with(|| {
                let ra = a.1.iter().map(|&e| self.edges[e as usize].relation.as_str());
                let rb = b.1.iter().map(|&e| self.edges[e as usize].relation.as_str());
                ra.cmp(rb)
            })
        });
        keyed.into_iter().map(|(n, e)| self.materialize(&n, &e)).collect()
    }

    fn extend_backwards(
        &self,
        depth: usize,
        on_path: &mut [bool],
        nodes: &mut Vec<NodeId>,
        edges: &mut Vec<u32>,
        found: &mut Vec<(Vec<NodeId>, Vec<u32>)>,
    ) {
        if nodes.len() >= depth {
            return;
        }
        let head = *nodes.last().unwrap();
        for &e in &self.in_edges[head as usize] {
            let src = self.edges[e as usize].source;
            if on_path[src as usize] {
                continue;
            }
            on_path[src as usize] = true;
            nodes.push(src);
            edges.push(e);
            found.push((nodes.clone(), edges.clone()));
            self.extend_backwards(depth, on_path, nodes, edges, found);
            edges.pop();
            nodes.pop();
            on_path[src as usize] = false;
        }
    }

    fn materialize(&self, nodes: &[NodeId], edges: &[u32]) -> Pathway {
        let edges: Vec<PathwayEdge> = edges
            .iter()
            .map(|&e| {
                let edge = &self.edges[e as usize];
                PathwayEdge { relation: edge.relation.clone(), polarity: edge.polarity, records: edge.records.clone() }
            })
            .collect();
        let net_polarity = edges.iter().map(|e| e.polarity).reduce(Polarity::compose).unwrap_or(Polarity::Increase);
        Pathway { nodes: nodes.iter().map(|&n| self.nodes[n as usize].clone()).collect(), edges, net_polarity }
    }
}

/// How "most common" regulators are ranked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankBy {
    /// Number of supporting relation records.
    #[default]
    EvidenceRecords,
    /// Number of distinct PMIDs across the supporting records' evidence.
    DistinctArticles,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedEntity {
    pub entity: String,
    pub display: String,
    pub count: u64,
}

fn rank(
    index: Option<&Index>,
    support: BTreeMap<NodeId, Vec<RecordId>>,
    graph: &RegulationGraph,
    k: usize,
    by: RankBy,
) -> Vec<RankedEntity> {
    let mut ranked: Vec<RankedEntity> = support
        .into_iter()
        .map(|(node, mut records)| {
            records.sort_unstable();
            records.dedup();
            let count = match (by, index) {
                (RankBy::DistinctArticles, Some(index)) => {
                    let pmids: BTreeSet<&str> = records
                        .iter()
                        .flat_map(|&r| index.record(r).evidence.iter())
                        .filter_map(|&d| index.doc(d).pmid.as_deref())
                        .collect();
                    pmids.len() as u64
                }
                _ => records.len() as u64,
            };
            let entity = graph.node_name(node).to_string();
            let display = index.map_or_else(|| entity.clone(), |i| i.entity_display(&entity).to_string());
            RankedEntity { entity, display, count }
        })
        .filter(|r| r.count > 0)
        .collect();
    ranked.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.entity.cmp(&b.entity)));
    ranked.truncate(k);
    ranked
}

/// Direct regulators of `target` ranked by support (count desc, name asc),
/// truncated to `k`.
pub fn top_members(
    index: Option<&Index>,
    graph: &RegulationGraph,
    target: &str,
    k: usize,
    by: RankBy,
) -> Vec<RankedEntity> {
    let Some(t) = graph.node_id(target) else { return Vec::new() };
    let mut support: BTreeMap<NodeId, Vec<RecordId>> = BTreeMap::new();
    for e in graph.in_edges(t) {
        if e.source != t {
            support.entry(e.source).or_default().extend(&e.records);
        }
    }
    rank(index, support, graph, k, by)
}

/// Entities regulating one of the direct regulators of `target` (the start
/// nodes of 3-node pathways), ranked by the support of those first edges.
pub fn top_upstream(
    index: Option<&Index>,
    graph: &RegulationGraph,
    target: &str,
    k: usize,
    by: RankBy,
) -> Vec<RankedEntity> {
    let Some(t) = graph.node_id(target) else { return Vec::new() };
    let mut support: BTreeMap<NodeId, Vec<RecordId>> = BTreeMap::new();
    let members: BTreeSet<NodeId> = graph.in_edges(t).map(|e| e.source).filter(|&m| m != t).collect();
    for &m in &members {
        for e in graph.in_edges(m) {
            if e.source != t && e.source != m {
                support.entry(e.source).or_default().extend(&e.records);
            }
        }
    }
    rank(index, support, graph, k, by)
}

/// Evidence documents of the first relation of `pathway`, in document order.
pub fn first_edge_evidence(index: &Index, pathway: &Pathway) -> Vec<DocumentView> {
    let Some(first) = pathway.edges.first() else { return Vec::new() };
    let mut docs: Vec<DocId> = first.records.iter().flat_map(|&r| index.record(r).evidence.iter().copied()).collect();
    docs.sort_unstable();
    docs.dedup();
    docs.into_iter().map(|d| index.document_view(d)).collect()
}
