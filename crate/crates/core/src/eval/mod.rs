//! Detector evaluation: ranking metrics, operating-point metrics,
//! subset and weekly breakdowns, exclusion filters, and report files.

pub mod dataset;
pub mod metrics;
pub mod report;

pub use dataset::{apply_exclusion, ExclusionFilter, ScoredDataset, ScoredRow};
pub use metrics::{pr_auc, roc_auc, threshold_metrics, ThresholdMetrics};
pub use report::{
    parse_report, read_report, render_report, round6, subset_report, weekly_roc, write_report,
    EvalReport, OverallMetrics, ReportFormat, SubsetMetrics, SubsetReport, WeekEntry,
    OPERATING_THRESHOLD,
};

use crate::corpus::RevisionId;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("both classes are required for this metric")]
    SingleClass,
    #[error("at least one positive example is required")]
    NoPositives,
    #[error("length mismatch: {scores} scores vs {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("duplicate revision id {0}")]
    DuplicateId(RevisionId),
    #[error("score {score} for revision {id} is outside [0, 1]")]
    ScoreOutOfRange { id: RevisionId, score: f64 },
    #[error("revision {id} has unusable timestamp {timestamp}")]
    BadTimestamp { id: RevisionId, timestamp: i64 },
    #[error("an exclusion filter needs at least one criterion")]
    EmptyFilter,
    #[error("exclusion removed every row")]
    EmptyResult,
    #[error("unsupported report format {0:?}")]
    UnsupportedFormat(String),
    #[error("malformed report: {0}")]
    BadReport(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}
