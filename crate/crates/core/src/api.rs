//! Request execution shared by the HTTP service and the command-line client.
//!
//! Every request is `(method, path, query string, body)` and every response is
//! a status code plus a compact JSON body. Responses depend only on the index
//! and the request, so replays are byte-identical.

use std::collections::BTreeMap;
use std::sync::Arc;

use percent_encoding::percent_decode_str;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::aggregate::{self, AggField, CountBy, Granularity};
use crate::error::{ConfigError, QueryError};
use crate::index::{DocumentView, Field, FilterContext, Index};
use crate::pathways::{
    first_edge_evidence, top_members, top_upstream, Pathway, RankBy, RankedEntity, RegulationGraph, DEFAULT_BUDGET,
    DEFAULT_RELATION, MAX_PATHWAY_LENGTH,
};
use crate::semantics::{opposite_upstream_regulators, upstream_regulators, FunctionalType, UpstreamSet};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_PAGE_SIZE: usize = 20;
pub const DEFAULT_FT_LIMIT: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    Stats,
    TagCloud,
    HeatMap,
    Table,
    Metrics,
    Histogram,
    FunctionalTypes,
    Upstream(String),
    OppositeUpstream(String),
    Pathways,
    Doc(String),
}

impl Route {
    /// Matches a request path. `Err` carries the status to report (404 or 405).
    pub fn parse(method: &str, path: &str) -> Result<Route, ApiError> {
        let trimmed = path.trim_end_matches('/');
        let segments: Vec<&str> = trimmed.split('/').skip(1).collect();
        let decode = |s: &str| percent_decode_str(s).decode_utf8_lossy().into_owned();
        let (route, expected) = match segments.as_slice() {
            ["api", "stats"] => (Route::Stats, "GET"),
            ["api", "agg", "tagcloud"] => (Route::TagCloud, "POST"),
            ["api", "agg", "heatmap"] => (Route::HeatMap, "POST"),
            ["api", "agg", "table"] => (Route::Table, "POST"),
            ["api", "agg", "metrics"] => (Route::Metrics, "POST"),
            ["api", "agg", "histogram"] => (Route::Histogram, "POST"),
            ["api", "functional-types"] => (Route::FunctionalTypes, "GET"),
            ["api", "functional-types", name, "upstream"] => (Route::Upstream(decode(name)), "GET"),
            ["api", "functional-types", name, "opposite-upstream"] => (Route::OppositeUpstream(decode(name)), "GET"),
            ["api", "pathways"] => (Route::Pathways, "GET"),
            ["api", "doc", id] => (Route::Doc(decode(id)), "GET"),
            _ => return Err(ApiError::new(404, "route_not_found", format!("no endpoint at {path}"), None)),
        };
        if !method.eq_ignore_ascii_case(expected) {
            return Err(ApiError::new(405, "method_not_allowed", format!("{path} expects {expected}"), None));
        }
        Ok(route)
    }
}

/// Structured request failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    pub fn new(status: u16, code: &'static str, message: impl Into<String>, field: Option<String>) -> ApiError {
        ApiError { status, code, message: message.into(), field }
    }

    fn bad(code: &'static str, message: impl Into<String>, field: &str) -> ApiError {
        ApiError::new(400, code, message, Some(field.to_string()))
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"code": self.code, "message": self.message, "field": self.field}})
    }

    fn from_query(e: QueryError, field: &str) -> ApiError {
        let message = e.to_string();
        match e {
            QueryError::UnknownField(_) => ApiError::bad("unknown_field", message, field),
            QueryError::UnsupportedField(_) => ApiError::bad("unsupported_field", message, field),
            QueryError::SameAxis(_) => ApiError::bad("same_axis", message, field),
            QueryError::InvalidParam { param, .. } => ApiError::bad("invalid_parameter", message, &param),
            QueryError::NotFound { .. } => ApiError::new(404, "not_found", message, Some(field.to_string())),
            QueryError::Ambiguous { .. } => ApiError::new(409, "ambiguous", message, Some(field.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: Vec<u8>,
}

impl Response {
    fn ok<T: Serialize>(value: &T) -> Response {
        Response { status: 200, body: serde_json::to_vec(value).expect("response serializes") }
    }

    fn error(e: &ApiError) -> Response {
        Response { status: e.status, body: serde_json::to_vec(&e.to_json()).expect("error serializes") }
    }

    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or(Value::Null)
    }
}

/// Untyped parameters from a JSON body or a query string, with the accessors
/// reporting the offending parameter on failure.
struct Params {
    values: Map<String, Value>,
}

impl Params {
    fn from_body(body: &[u8], allowed: &[&str]) -> Result<Params, ApiError> {
        let values = if body.iter().all(u8::is_ascii_whitespace) {
            Map::new()
        } else {
            match serde_json::from_slice::<Value>(body) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(ApiError::new(400, "invalid_body", "request body must be a JSON object", None)),
                Err(e) => return Err(ApiError::new(400, "invalid_json", format!("malformed JSON body: {e}"), None)),
            }
        };
        Params::check(values, allowed)
    }

    fn from_query(query: &BTreeMap<String, String>, allowed: &[&str]) -> Result<Params, ApiError> {
        let values = query.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        Params::check(values, allowed)
    }

    fn check(values: Map<String, Value>, allowed: &[&str]) -> Result<Params, ApiError> {
        if let Some(k) = values.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(ApiError::bad("unknown_parameter", format!("unknown parameter `{k}`"), k));
        }
        Ok(Params { values })
    }

    fn str(&self, key: &str) -> Result<Option<&str>, ApiError> {
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(ApiError::bad("invalid_parameter", format!("`{key}` must be a string"), key)),
        }
    }

    fn required_str(&self, key: &str) -> Result<&str, ApiError> {
        self.str(key)?
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| ApiError::bad("missing_parameter", format!("`{key}` is required"), key))
    }

    fn uint(&self, key: &str, default: u64) -> Result<u64, ApiError> {
        let invalid = || ApiError::bad("invalid_parameter", format!("`{key}` must be a non-negative integer"), key);
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(default),
            Some(Value::Number(n)) => n.as_u64().ok_or_else(invalid),
            Some(Value::String(s)) => s.trim().parse().map_err(|_| invalid()),
            Some(_) => Err(invalid()),
        }
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize, ApiError> {
        self.uint(key, default as u64).map(|v| usize::try_from(v).unwrap_or(usize::MAX))
    }

    fn parsed<T: std::str::FromStr<Err = QueryError>>(&self, key: &str) -> Result<Option<T>, ApiError> {
        self.str(key)?.map(|s| s.parse().map_err(|e| ApiError::from_query(e, key))).transpose()
    }

    /// `filters: [{field, term}]` plus optional `text`.
    fn context(&self) -> Result<FilterContext, ApiError> {
        let mut ctx = FilterContext::new();
        ctx.text = self.str("text")?.map(str::to_string).filter(|t| !t.trim().is_empty());
        let Some(filters) = self.values.get("filters") else { return Ok(ctx) };
        let Value::Array(items) = filters else {
            return Err(ApiError::bad("invalid_parameter", "`filters` must be a list of {field, term}", "filters"));
        };
        for (i, item) in items.iter().enumerate() {
            let at = format!("filters[{i}]");
            let obj = item
                .as_object()
                .ok_or_else(|| ApiError::bad("invalid_parameter", "filter must be an object {field, term}", &at))?;
            if let Some(k) = obj.keys().find(|k| *k != "field" && *k != "term") {
                return Err(ApiError::bad("unknown_parameter", format!("unknown filter key `{k}`"), &format!("{at}.{k}")));
            }
            let get = |k: &str| {
                obj.get(k).and_then(Value::as_str).ok_or_else(|| {
                    ApiError::bad("invalid_parameter", format!("filter `{k}` must be a string"), &format!("{at}.{k}"))
                })
            };
            let field: Field = get("field")?.parse().map_err(|e| ApiError::from_query(e, &format!("{at}.field")))?;
            ctx.insert(field, get("term")?);
        }
        Ok(ctx)
    }
}

const CTX: [&str; 2] = ["filters", "text"];

fn with_ctx(extra: &[&'static str]) -> Vec<&'static str> {
    CTX.iter().chain(extra).copied().collect()
}

#[derive(Serialize)]
struct FunctionalTypeSummary<'a> {
    id: &'a str,
    name: &'a str,
    object: &'a str,
    polarity: &'a str,
    metatype: &'a str,
    member_count: usize,
    members: Vec<&'a str>,
}

impl<'a> From<&'a FunctionalType> for FunctionalTypeSummary<'a> {
    fn from(ft: &'a FunctionalType) -> Self {
        FunctionalTypeSummary {
            id: &ft.id,
            name: &ft.name,
            object: &ft.object_display,
            polarity: ft.polarity.as_str(),
            metatype: ft.metatype.as_str(),
            member_count: ft.members.len(),
            members: ft.members.iter().map(|m| m.display.as_str()).collect(),
        }
    }
}

#[derive(Serialize)]
struct PathwayView {
    nodes: Vec<String>,
    entities: Vec<String>,
    relations: Vec<String>,
    records: Vec<Vec<String>>,
    net_polarity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_edge_evidence: Option<Vec<DocumentView>>,
}

#[derive(Serialize)]
struct PathwaysResponse<'a> {
    target: String,
    relations: Vec<String>,
    max_depth: usize,
    budget: u64,
    walk_estimate: u64,
    effective_depth: usize,
    regulators: Vec<RankedEntity>,
    upstream: Vec<RankedEntity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regulator: Option<&'a str>,
    pathway_count: usize,
    pathways: Vec<PathwayView>,
}

/// The query engine: an immutable index plus the default regulation graph.
#[derive(Debug)]
pub struct Engine {
    index: Arc<Index>,
    default_graph: RegulationGraph,
}

impl Engine {
    pub fn new(index: Arc<Index>) -> Engine {
        let default_graph = RegulationGraph::build(&index, &[DEFAULT_RELATION]).expect("default filter is non-empty");
        Engine { index, default_graph }
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn default_graph(&self) -> &RegulationGraph {
        &self.default_graph
    }

    /// Full dispatch from raw request parts. `query` is the undecoded query string.
    pub fn dispatch(&self, method: &str, path: &str, query: &str, body: &[u8]) -> Response {
        match Route::parse(method, path) {
            Ok(route) => {
                let params: BTreeMap<String, String> = url::form_urlencoded::parse(query.as_bytes()).into_owned().collect();
                self.handle(&route, &params, body)
            }
            Err(e) => Response::error(&e),
        }
    }

    pub fn handle(&self, route: &Route, query: &BTreeMap<String, String>, body: &[u8]) -> Response {
        match self.execute(route, query, body) {
            Ok(v) => v,
            Err(e) => Response::error(&e),
        }
    }

    fn execute(&self, route: &Route, query: &BTreeMap<String, String>, body: &[u8]) -> Result<Response, ApiError> {
        let index = &*self.index;
        match route {
            Route::Stats => {
                Params::from_query(query, &[])?;
                let m = aggregate::metrics(index, &FilterContext::new());
                Ok(Response::ok(&json!({
                    "evidence_count": m.evidence_count,
                    "article_count": m.article_count,
                    "functional_type_count": index.functional_types().len(),
                })))
            }
            Route::TagCloud => {
                let p = Params::from_body(body, &with_ctx(&["field", "k", "count_by", "functional_type"]))?;
                let ctx = p.context()?;
                let field: AggField = p
                    .required_str("field")?
                    .parse()
                    .map_err(|e| ApiError::from_query(e, "field"))?;
                let k = p.usize("k", DEFAULT_K)?;
                let by = p.parsed::<CountBy>("count_by")?.unwrap_or_default();
                let scope = match p.str("functional_type")? {
                    Some(name) => Some(self.functional_type(name, "functional_type")?),
                    None => None,
                };
                let terms = aggregate::tag_cloud(index, &ctx, field, k, by, scope)
                    .map_err(|e| ApiError::from_query(e, "functional_type"))?;
                Ok(Response::ok(&json!({"field": field.as_str(), "terms": terms})))
            }
            Route::HeatMap => {
                let p = Params::from_body(body, &with_ctx(&["x", "y", "kx", "ky"]))?;
                let ctx = p.context()?;
                let axis = |key: &str| -> Result<Field, ApiError> {
                    p.required_str(key)?.parse().map_err(|e| ApiError::from_query(e, key))
                };
                let (x, y) = (axis("x")?, axis("y")?);
                let m = aggregate::heat_map(index, &ctx, x, y, p.usize("kx", DEFAULT_K)?, p.usize("ky", DEFAULT_K)?)
                    .map_err(|e| ApiError::from_query(e, "y"))?;
                Ok(Response::ok(&json!({
                    "x": x.as_str(),
                    "y": y.as_str(),
                    "x_terms": m.x_terms,
                    "y_terms": m.y_terms,
                    "cells": m.cells,
                })))
            }
            Route::Table => {
                let p = Params::from_body(body, &with_ctx(&["page", "page_size"]))?;
                let ctx = p.context()?;
                let page = aggregate::data_table(index, &ctx, p.usize("page", 0)?, p.usize("page_size", DEFAULT_PAGE_SIZE)?)
                    .map_err(|e| ApiError::from_query(e, "page_size"))?;
                Ok(Response::ok(&page))
            }
            Route::Metrics => {
                let p = Params::from_body(body, &CTX)?;
                Ok(Response::ok(&aggregate::metrics(index, &p.context()?)))
            }
            Route::Histogram => {
                let p = Params::from_body(body, &with_ctx(&["granularity"]))?;
                let ctx = p.context()?;
                let g = p.parsed::<Granularity>("granularity")?.unwrap_or_default();
                let buckets = aggregate::date_histogram(index, &ctx, g);
                let name = match g {
                    Granularity::Year => "year",
                    Granularity::Month => "month",
                };
                Ok(Response::ok(&json!({"granularity": name, "buckets": buckets})))
            }
            Route::FunctionalTypes => {
                let p = Params::from_query(query, &["limit", "offset"])?;
                let all = index.functional_types();
                let offset = p.usize("offset", 0)?.min(all.len());
                let limit = p.usize("limit", DEFAULT_FT_LIMIT)?;
                let items: Vec<FunctionalTypeSummary> =
                    all[offset..].iter().take(limit).map(FunctionalTypeSummary::from).collect();
                Ok(Response::ok(&json!({
                    "total": all.len(),
                    "offset": offset,
                    "limit": limit,
                    "functional_types": items,
                })))
            }
            Route::Upstream(name) | Route::OppositeUpstream(name) => {
                Params::from_query(query, &[])?;
                let ft = self.functional_type(name, "name")?;
                let set: UpstreamSet = if matches!(route, Route::Upstream(_)) {
                    upstream_regulators(index, ft)
                } else {
                    opposite_upstream_regulators(index, ft)
                };
                Ok(Response::ok(&json!({
                    "functional_type": {"id": ft.id, "name": ft.name},
                    "note": set.note,
                    "regulator_count": set.entities().len(),
                    "regulators": set.regulators,
                })))
            }
            Route::Pathways => self.pathways(query),
            Route::Doc(id) => {
                Params::from_query(query, &[])?;
                index.get_document(id).map(|d| Response::ok(&d)).map_err(|e| ApiError::from_query(e, "id"))
            }
        }
    }

    /// Resolves a functional type by display name (case-insensitive) or id.
    pub fn functional_type(&self, name: &str, param: &str) -> Result<&FunctionalType, ApiError> {
        let named = self.index.functional_types_named(name);
        match named.as_slice() {
            [one] => Ok(one),
            [] => self.index.functional_type_by_id(name.trim()).ok_or_else(|| {
                ApiError::from_query(QueryError::NotFound { kind: "functional type", id: name.to_string() }, param)
            }),
            many => Err(ApiError::from_query(
                QueryError::Ambiguous { name: name.to_string(), candidates: many.iter().map(|f| f.id.clone()).collect() },
                param,
            )),
        }
    }

    fn pathways(&self, query: &BTreeMap<String, String>) -> Result<Response, ApiError> {
        let p = Params::from_query(query, &["target", "max_depth", "budget", "k", "relations", "regulator", "rank_by"])?;
        let index = &*self.index;
        let target = index.aliases().canonical_key(p.required_str("target")?);
        let max_depth = p.usize("max_depth", MAX_PATHWAY_LENGTH)?;
        if max_depth < 2 {
            return Err(ApiError::bad("invalid_parameter", "`max_depth` must be at least 2", "max_depth"));
        }
        let budget = p.uint("budget", DEFAULT_BUDGET)?;
        let k = p.usize("k", DEFAULT_K)?;
        let rank_by = match p.str("rank_by")?.map(|s| s.trim().to_lowercase()) {
            None => RankBy::EvidenceRecords,
            Some(s) if s == "evidence_records" || s == "evidence" => RankBy::EvidenceRecords,
            Some(s) if s == "distinct_articles" || s == "articles" => RankBy::DistinctArticles,
            Some(s) => {
                return Err(ApiError::bad(
                    "invalid_parameter",
                    format!("`rank_by` must be evidence_records or distinct_articles, got {s:?}"),
                    "rank_by",
                ))
            }
        };
        let relations: Vec<String> = match p.str("relations")? {
            None => vec![DEFAULT_RELATION.to_string()],
            Some(list) => list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
        };
        let custom;
        let graph = if relations.len() == 1 && relations[0].eq_ignore_ascii_case(DEFAULT_RELATION) {
            &self.default_graph
        } else {
            custom = RegulationGraph::build(index, &relations).map_err(|e: ConfigError| {
                ApiError::bad("invalid_parameter", e.to_string(), "relations")
            })?;
            &custom
        };
        if index.records_with_object(&target).is_empty() && index.records_with_subject(&target).is_empty() {
            return Err(ApiError::from_query(QueryError::NotFound { kind: "entity", id: target }, "target"));
        }
        let regulator = p.str("regulator")?.map(|r| index.aliases().canonical_key(r));
        let effective_depth = graph.effective_depth(&target, max_depth, budget);
        let walk_estimate = graph.walk_count_estimate(&target, effective_depth);
        let mut pathways: Vec<Pathway> = graph.enumerate_pathways(&target, effective_depth);
        if let Some(r) = &regulator {
            pathways.retain(|p| p.start() == r);
        }
        let views = pathways
            .iter()
            .map(|pw| PathwayView {
                nodes: pw.nodes.iter().map(|n| index.entity_display(n).to_string()).collect(),
                entities: pw.nodes.clone(),
                relations: pw.edges.iter().map(|e| e.relation.clone()).collect(),
                records: pw
                    .edges
                    .iter()
                    .map(|e| e.records.iter().map(|&r| index.record(r).id.clone()).collect())
                    .collect(),
                net_polarity: pw.net_polarity.as_str(),
                first_edge_evidence: regulator.as_ref().map(|_| first_edge_evidence(index, pw)),
            })
            .collect::<Vec<_>>();
        Ok(Response::ok(&PathwaysResponse {
            regulators: top_members(Some(index), graph, &target, k, rank_by),
            upstream: top_upstream(Some(index), graph, &target, k, rank_by),
            target,
            relations,
            max_depth,
            budget,
            walk_estimate,
            effective_depth,
            regulator: regulator.as_deref(),
            pathway_count: views.len(),
            pathways: views,
        }))
    }
}
