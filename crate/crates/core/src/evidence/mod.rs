//! Evidence data model: ingestion of grouped measurements and construction
//! of the (e_u, e_s, e_a) triple for a case.

pub mod dataset;
pub mod scenario;
pub mod set;

pub use dataset::{load_dataset, ColumnSchema, Dataset, Fragment, SourceGroup};
pub use scenario::{build_scenario, ScenarioSpec, TraceSelector};
pub use set::{validate_evidence, ComponentSummary, EvidenceSet, ValidationReport};
