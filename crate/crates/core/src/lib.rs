//! Semantic relation exploration engine.
//!
//! Pre-extracted biomedical relations and their evidencing sentences are
//! indexed into a document / phrase / type hierarchy. On top of the index sit
//! faceted aggregations (tag clouds, heat maps, tables, metrics, histograms),
//! functional-type grounding with second-order regulators, and bounded pathway
//! search over a signed regulation graph.

pub mod aggregate;
pub mod api;
pub mod error;
pub mod index;
pub mod ingest;
pub mod pathways;
pub mod semantics;
pub mod synthetic;
pub mod taxonomy;

pub use aggregate::{AggField, CountBy, Granularity, HeatMatrix, Metrics, TablePage, TermCount};
pub use api::{ApiError, Engine, Response, Route};
pub use error::{BuildError, ConfigError, IngestError, QueryError, StoreError};
pub use index::{build_index, BuildOptions, DocId, EvidenceSet, Field, FilterContext, Index, RecordId};
pub use ingest::{AliasMap, ArticleMeta, Entity, EvidenceDoc, PairKind, PublishDate, RelationRecord, Source};
pub use pathways::{Pathway, RankBy, RegulationGraph};
pub use semantics::{FunctionalType, UpstreamSet};
pub use taxonomy::{Metatype, Polarity, RelationType, Taxonomy};
