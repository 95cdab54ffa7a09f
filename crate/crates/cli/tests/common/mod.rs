#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::Request as HttpRequest;
use semviz_cli::build::{self, BuildInputs};
use semviz_core::{Engine, Index, Route};
use tower::ServiceExt;

pub const CA: &str = r#"{"subject": "ocrelizumab", "object": "COVID-19", "relation_type": "Activation", "evidence": [{"sentence": "Ocrelizumab raised the COVID-19 antibody response.", "pmid": "101"}]}
{"subject": "B", "object": "C", "relation_type": "Activation", "evidence": [{"sentence": "B activates C in coronavirus infection.", "pmid": "102"}]}
{"subject": "A", "object": "B", "relation_type": "Activation", "evidence": [{"sentence": "A activates B.", "pmid": "102"}, {"sentence": "A strongly activates B.", "pmid": "103"}]}
{"subject": "X", "object": "B", "relation_type": "Inhibition", "evidence": [{"sentence": "X inhibits B.", "pmid": null}]}
this line is not json
{"subject": "", "object": "B", "relation_type": "Activation", "evidence": [{"sentence": "nothing", "pmid": "1"}]}
"#;

pub const KG: &str = r#"{"subject": "D014013", "object": "CASP3", "relation_type": "Decrease Reaction", "pair_kind": "chemical_gene", "sentence": "D014013 decreases CASP3 activity.", "pmid": "101"}
{"subject": "CASP3", "object": "Sepsis", "relation_type": "Marker/Mechanism", "pair_kind": "gene_disease", "sentence": "CASP3 marks sepsis.", "pmid": 104}
"#;

pub const META: &str = "pmid,title,abstract,authors,publish_time,journal
101,Antibodies,SARS coronavirus outbreak,Smith J; Doe A,2020-03-02,PLoS One
102,Signalling,Coronavirus signalling,Doe A,2020-03,Nature
103,More signalling,Kinase cascade,Lee K,2020-04-30,PLoS One
104,Sepsis,Caspase in sepsis,,2019,Cell
";

pub struct Fixture {
    pub dir: tempfile::TempDir,
}

impl Fixture {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn inputs(&self) -> BuildInputs {
        BuildInputs {
            ca: vec![self.path("ca.jsonl")],
            kg: vec![self.path("kg.jsonl")],
            meta: Some(self.path("meta.csv")),
            out: self.path("index"),
            ..Default::default()
        }
    }
}

pub fn write_fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ca.jsonl"), CA).unwrap();
    fs::write(dir.path().join("kg.jsonl"), KG).unwrap();
    fs::write(dir.path().join("meta.csv"), META).unwrap();
    Fixture { dir }
}

pub fn fixture_engine() -> Engine {
    let f = write_fixture();
    let (index, _) = build::build(&f.inputs()).unwrap();
    Engine::new(Arc::new(index))
}

pub fn load_engine(dir: &Path) -> Engine {
    Engine::new(Arc::new(Index::load(dir).unwrap()))
}

/// HTTP method and path for a route, with the path segments percent-encoded.
pub fn http_target(route: &Route) -> (&'static str, String) {
    let enc = |s: &str| percent_encoding::utf8_percent_encode(s, percent_encoding::NON_ALPHANUMERIC).to_string();
    match route {
        Route::Stats => ("GET", "/api/stats".into()),
        Route::TagCloud => ("POST", "/api/agg/tagcloud".into()),
        Route::HeatMap => ("POST", "/api/agg/heatmap".into()),
        Route::Table => ("POST", "/api/agg/table".into()),
        Route::Metrics => ("POST", "/api/agg/metrics".into()),
        Route::Histogram => ("POST", "/api/agg/histogram".into()),
        Route::FunctionalTypes => ("GET", "/api/functional-types".into()),
        Route::Upstream(n) => ("GET", format!("/api/functional-types/{}/upstream", enc(n))),
        Route::OppositeUpstream(n) => ("GET", format!("/api/functional-types/{}/opposite-upstream", enc(n))),
        Route::Pathways => ("GET", "/api/pathways".into()),
        Route::Doc(id) => ("GET", format!("/api/doc/{}", enc(id))),
    }
}

/// Sends one request through the axum router and returns `(status, body)`.
pub async fn http(engine: Arc<Engine>, method: &str, uri: &str, body: Vec<u8>) -> (u16, Vec<u8>) {
    let req = HttpRequest::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    let resp = semviz_cli::router(engine).oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, bytes.to_vec())
}

/// URI for a CLI-built request, query parameters form-encoded.
pub fn request_uri(req: &semviz_cli::Request) -> (&'static str, String) {
    let (method, path) = http_target(&req.route);
    if req.query.is_empty() {
        return (method, path);
    }
    let q = url::form_urlencoded::Serializer::new(String::new()).extend_pairs(&req.query).finish();
    (method, format!("{path}?{q}"))
}
