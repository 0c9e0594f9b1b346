use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("duplicate unit `{0}`")]
    DuplicateUnit(String),
    #[error("self-loop on unit `{0}`")]
    SelfLoop(String),
    #[error("unknown collection `{0}`")]
    UnknownCollection(String),
    #[error("invalid instance:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("incomplete correspondence: label `{label}` of `{collection}` has no entry")]
    IncompleteCorrespondence { collection: String, label: String },
    #[error("correspondence for `{collection}` is not injective: `{target}` is hit twice")]
    NonInjective { collection: String, target: String },
    #[error("not one-dimensional: {0}")]
    NotOneDimensional(String),
    #[error("unequal 1D support counts: `{first}` has {first_count}, `{other}` has {other_count}")]
    UnequalSupportCounts {
        first: String,
        first_count: usize,
        other: String,
        other_count: usize,
    },
    #[error("instance too large for oracle: {0}")]
    TooLargeForOracle(String),
    #[error("infeasible delta {delta} for total {total}")]
    InfeasibleDelta { delta: u64, total: u64 },
    #[error("empty multiset")]
    EmptyMultiset,
    #[error("multiset values must be positive")]
    NonPositiveValue,
    #[error("surplus too large: {surplus} unmatched supports (limit {limit})")]
    SurplusTooLarge { surplus: usize, limit: usize },
    #[error("unattachable support `{label}` of `{collection}`")]
    Unattachable { collection: String, label: String },
    #[error("hypergraph too dense: {0} candidate hyperedges")]
    HypergraphTooDense(u128),
    #[error("matching shortfall: found {found} of {required} hyperedges")]
    MatchingShortfall { found: usize, required: usize },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("wrong number of collections: expected {expected}, got {got}")]
    CollectionCount { expected: &'static str, got: usize },
    #[error("region growing failed after {0} attempts")]
    GenerationFailed(usize),
    #[error("bad generator parameters: {0}")]
    BadParameters(String),
    #[error("no layout: {0}")]
    NoLayout(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  - {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
