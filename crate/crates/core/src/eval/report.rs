//! Evaluation reports: subset breakdowns, weekly series, file formats.
//!
//! Reports store metric values already rounded to six decimals, and the
//! writers print exactly six decimals, so a write→read round trip
//! reproduces the in-memory report bit for bit in either format.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, Datelike};
use serde_json::{json, Value};

use super::dataset::ScoredDataset;
use super::metrics::{pr_auc, roc_auc, threshold_metrics, ThresholdMetrics};
use super::EvalError;
use crate::corpus::tsv::{escape_field, unescape_field};
use crate::corpus::ContentType;

/// Decision threshold used for the operating-point metrics.
pub const OPERATING_THRESHOLD: f64 = 0.5;

/// Round to six decimal places — the resolution reports are stored and
/// serialized at.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Ranking metrics for one filtered view; `None` means the view lacked
/// both classes (or was empty) and the pair is unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SubsetMetrics {
    pub roc_auc: Option<f64>,
    pub pr_auc: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SubsetReport {
    pub head: SubsetMetrics,
    pub body: SubsetMetrics,
    pub registered: SubsetMetrics,
    pub unregistered: SubsetMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeekEntry {
    pub iso_year: i32,
    pub iso_week: u32,
    /// `None` when the week held a single class
    pub roc_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverallMetrics {
    pub roc_auc: Option<f64>,
    pub pr_auc: Option<f64>,
    pub threshold: ThresholdMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub overall: OverallMetrics,
    pub subsets: SubsetReport,
    pub weekly: Vec<WeekEntry>,
    /// pointer (e.g. a path) to the leak audit that accompanied this run
    pub leak_report: Option<String>,
    /// human note about rows excluded before evaluation
    pub exclusion_note: Option<String>,
}

fn both_classes(labels: &[bool]) -> bool {
    labels.iter().any(|&l| l) && labels.iter().any(|&l| !l)
}

fn view_metrics(scores: &[f64], labels: &[bool]) -> SubsetMetrics {
    if !both_classes(labels) {
        return SubsetMetrics::default();
    }
    SubsetMetrics {
        roc_auc: roc_auc(scores, labels).ok(),
        pr_auc: pr_auc(scores, labels).ok(),
    }
}

/// Ranking metrics on the four standard views. A view without both
/// classes is reported as unavailable rather than erroring.
pub fn subset_report(dataset: &ScoredDataset) -> SubsetReport {
    let mut report = SubsetReport::default();
    let views: [(&mut SubsetMetrics, Box<dyn Fn(&super::dataset::ScoredRow) -> bool>); 4] = [
        (
            &mut report.head,
            Box::new(|r| r.content_type == ContentType::Head),
        ),
        (
            &mut report.body,
            Box::new(|r| r.content_type == ContentType::Body),
        ),
        (&mut report.registered, Box::new(|r| r.is_registered)),
        (&mut report.unregistered, Box::new(|r| !r.is_registered)),
    ];
    for (slot, keep) in views {
        let mut scores = Vec::new();
        let mut labels = Vec::new();
        for row in dataset.rows() {
            if keep(row) {
                scores.push(row.score);
                labels.push(row.vandalism);
            }
        }
        *slot = view_metrics(&scores, &labels);
    }
    report
}

/// ROC AUC per ISO-8601 week, ordered by (iso_year, iso_week).
/// Single-class weeks are emitted with an unavailable value so the
/// series keeps its shape.
pub fn weekly_roc(dataset: &ScoredDataset) -> Vec<WeekEntry> {
    let mut weeks: BTreeMap<(i32, u32), (Vec<f64>, Vec<bool>)> = BTreeMap::new();
    for row in dataset.rows() {
        // timestamps were validated at dataset construction
        let date = DateTime::from_timestamp(row.timestamp, 0)
            .expect("validated timestamp")
            .date_naive();
        let iso = date.iso_week();
        let slot = weeks.entry((iso.year(), iso.week())).or_default();
        slot.0.push(row.score);
        slot.1.push(row.vandalism);
    }
    weeks
        .into_iter()
        .map(|((iso_year, iso_week), (scores, labels))| WeekEntry {
            iso_year,
            iso_week,
            roc_auc: if both_classes(&labels) {
                roc_auc(&scores, &labels).ok()
            } else {
                None
            },
        })
        .collect()
}

impl EvalReport {
    /// Evaluate a dataset: overall ranking + operating-point metrics,
    /// the four subset views, and the weekly series. All values are
    /// rounded to six decimals on the way in.
    pub fn from_dataset(dataset: &ScoredDataset) -> EvalReport {
        let scores = dataset.scores();
        let labels = dataset.labels();
        let t = threshold_metrics(&scores, &labels, OPERATING_THRESHOLD);
        let overall = OverallMetrics {
            roc_auc: roc_auc(&scores, &labels).ok().map(round6),
            pr_auc: pr_auc(&scores, &labels).ok().map(round6),
            threshold: ThresholdMetrics {
                accuracy: t.accuracy.map(round6),
                precision: t.precision.map(round6),
                recall: t.recall.map(round6),
                f1: t.f1.map(round6),
            },
        };
        let raw = subset_report(dataset);
        let rounded = |m: SubsetMetrics| SubsetMetrics {
            roc_auc: m.roc_auc.map(round6),
            pr_auc: m.pr_auc.map(round6),
        };
        let subsets = SubsetReport {
            head: rounded(raw.head),
            body: rounded(raw.body),
            registered: rounded(raw.registered),
            unregistered: rounded(raw.unregistered),
        };
        let weekly = weekly_roc(dataset)
            .into_iter()
            .map(|w| WeekEntry {
                roc_auc: w.roc_auc.map(round6),
                ..w
            })
            .collect();
        EvalReport {
            overall,
            subsets,
            weekly,
            leak_report: None,
            exclusion_note: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
}

impl ReportFormat {
    pub fn from_name(name: &str) -> Result<ReportFormat, EvalError> {
        match name.to_ascii_lowercase().as_str() {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            other => Err(EvalError::UnsupportedFormat(other.to_string())),
        }
    }
}

fn fmt_metric(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "NA".to_string(),
    }
}

fn parse_metric(s: &str) -> Result<Option<f64>, EvalError> {
    if s == "NA" {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| EvalError::BadReport(format!("bad metric value {s:?}")))
}

fn fmt_note(v: &Option<String>) -> String {
    match v {
        Some(s) => escape_field(s),
        None => "NA".to_string(),
    }
}

fn parse_note(s: &str) -> Result<Option<String>, EvalError> {
    if s == "NA" {
        return Ok(None);
    }
    unescape_field(s)
        .map(Some)
        .map_err(EvalError::BadReport)
}

fn week_scope(iso_year: i32, iso_week: u32) -> String {
    format!("week:{iso_year:04}-W{iso_week:02}")
}

/// Render to the one-metric-per-row TSV form: scope, metric, value|NA.
pub fn render_tsv(report: &EvalReport) -> String {
    let mut out = String::new();
    let mut push = |scope: &str, metric: &str, value: String| {
        out.push_str(scope);
        out.push('\t');
        out.push_str(metric);
        out.push('\t');
        out.push_str(&value);
        out.push('\n');
    };
    push("overall", "roc_auc", fmt_metric(report.overall.roc_auc));
    push("overall", "pr_auc", fmt_metric(report.overall.pr_auc));
    push(
        "overall",
        "accuracy",
        fmt_metric(report.overall.threshold.accuracy),
    );
    push(
        "overall",
        "precision",
        fmt_metric(report.overall.threshold.precision),
    );
    push(
        "overall",
        "recall",
        fmt_metric(report.overall.threshold.recall),
    );
    push("overall", "f1", fmt_metric(report.overall.threshold.f1));
    for (name, m) in [
        ("head", report.subsets.head),
        ("body", report.subsets.body),
        ("registered", report.subsets.registered),
        ("unregistered", report.subsets.unregistered),
    ] {
        push(name, "roc_auc", fmt_metric(m.roc_auc));
        push(name, "pr_auc", fmt_metric(m.pr_auc));
    }
    for week in &report.weekly {
        push(
            &week_scope(week.iso_year, week.iso_week),
            "roc_auc",
            fmt_metric(week.roc_auc),
        );
    }
    push("meta", "leak_report", fmt_note(&report.leak_report));
    push("meta", "exclusion", fmt_note(&report.exclusion_note));
    out
}

/// Parse the TSV form produced by [`render_tsv`].
pub fn parse_tsv(text: &str) -> Result<EvalReport, EvalError> {
    let mut report = EvalReport {
        overall: OverallMetrics {
            roc_auc: None,
            pr_auc: None,
            threshold: ThresholdMetrics {
                accuracy: None,
                precision: None,
                recall: None,
                f1: None,
            },
        },
        subsets: SubsetReport::default(),
        weekly: Vec::new(),
        leak_report: None,
        exclusion_note: None,
    };
    for (lineno, line) in text.lines().enumerate() {
        let mut parts = line.split('\t');
        let (scope, metric, value) = match (parts.next(), parts.next(), parts.next(), parts.next())
        {
            (Some(s), Some(m), Some(v), None) => (s, m, v),
            _ => {
                return Err(EvalError::BadReport(format!(
                    "line {}: expected 3 tab-separated columns",
                    lineno + 1
                )))
            }
        };
        if let Some(tag) = scope.strip_prefix("week:") {
            let (year, week) = tag
                .split_once("-W")
                .ok_or_else(|| EvalError::BadReport(format!("bad week scope {scope:?}")))?;
            let entry = WeekEntry {
                iso_year: year
                    .parse()
                    .map_err(|_| EvalError::BadReport(format!("bad week scope {scope:?}")))?,
                iso_week: week
                    .parse()
                    .map_err(|_| EvalError::BadReport(format!("bad week scope {scope:?}")))?,
                roc_auc: parse_metric(value)?,
            };
            if metric != "roc_auc" {
                return Err(EvalError::BadReport(format!(
                    "unexpected weekly metric {metric:?}"
                )));
            }
            report.weekly.push(entry);
            continue;
        }
        match (scope, metric) {
            ("overall", "roc_auc") => report.overall.roc_auc = parse_metric(value)?,
            ("overall", "pr_auc") => report.overall.pr_auc = parse_metric(value)?,
            ("overall", "accuracy") => report.overall.threshold.accuracy = parse_metric(value)?,
            ("overall", "precision") => report.overall.threshold.precision = parse_metric(value)?,
            ("overall", "recall") => report.overall.threshold.recall = parse_metric(value)?,
            ("overall", "f1") => report.overall.threshold.f1 = parse_metric(value)?,
            ("meta", "leak_report") => report.leak_report = parse_note(value)?,
            ("meta", "exclusion") => report.exclusion_note = parse_note(value)?,
            (subset, metric @ ("roc_auc" | "pr_auc")) => {
                let slot = match subset {
                    "head" => &mut report.subsets.head,
                    "body" => &mut report.subsets.body,
                    "registered" => &mut report.subsets.registered,
                    "unregistered" => &mut report.subsets.unregistered,
                    other => {
                        return Err(EvalError::BadReport(format!("unknown scope {other:?}")))
                    }
                };
                if metric == "roc_auc" {
                    slot.roc_auc = parse_metric(value)?;
                } else {
                    slot.pr_auc = parse_metric(value)?;
                }
            }
            (s, m) => {
                return Err(EvalError::BadReport(format!(
                    "unknown row {s:?}/{m:?}"
                )))
            }
        }
    }
    Ok(report)
}

fn metric_value(v: Option<f64>) -> Value {
    match v {
        Some(x) => Value::String(format!("{x:.6}")),
        None => Value::Null,
    }
}

fn subset_value(m: &SubsetMetrics) -> Value {
    json!({
        "roc_auc": metric_value(m.roc_auc),
        "pr_auc": metric_value(m.pr_auc),
    })
}

/// Render to nested JSON. Metric values are six-decimal strings (or
/// null); keys serialize in sorted order, so the bytes are stable.
pub fn render_json(report: &EvalReport) -> String {
    let weekly: Vec<Value> = report
        .weekly
        .iter()
        .map(|w| {
            json!({
                "iso_year": w.iso_year,
                "iso_week": w.iso_week,
                "roc_auc": metric_value(w.roc_auc),
            })
        })
        .collect();
    let root = json!({
        "overall": {
            "roc_auc": metric_value(report.overall.roc_auc),
            "pr_auc": metric_value(report.overall.pr_auc),
            "accuracy": metric_value(report.overall.threshold.accuracy),
            "precision": metric_value(report.overall.threshold.precision),
            "recall": metric_value(report.overall.threshold.recall),
            "f1": metric_value(report.overall.threshold.f1),
        },
        "subsets": {
            "head": subset_value(&report.subsets.head),
            "body": subset_value(&report.subsets.body),
            "registered": subset_value(&report.subsets.registered),
            "unregistered": subset_value(&report.subsets.unregistered),
        },
        "weekly": weekly,
        "leak_report": report.leak_report.clone().map_or(Value::Null, Value::String),
        "exclusions": report.exclusion_note.clone().map_or(Value::Null, Value::String),
    });
    let mut text = serde_json::to_string_pretty(&root).expect("report serializes");
    text.push('\n');
    text
}

fn json_metric(v: &Value, what: &str) -> Result<Option<f64>, EvalError> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) => parse_metric(s),
        other => Err(EvalError::BadReport(format!(
            "{what}: expected string or null, got {other}"
        ))),
    }
}

fn json_note(v: &Value, what: &str) -> Result<Option<String>, EvalError> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) => Ok(Some(s.clone())),
        other => Err(EvalError::BadReport(format!(
            "{what}: expected string or null, got {other}"
        ))),
    }
}

fn json_field<'v>(obj: &'v Value, key: &str) -> Result<&'v Value, EvalError> {
    obj.get(key)
        .ok_or_else(|| EvalError::BadReport(format!("missing key {key:?}")))
}

fn json_subset(v: &Value, what: &str) -> Result<SubsetMetrics, EvalError> {
    Ok(SubsetMetrics {
        roc_auc: json_metric(json_field(v, "roc_auc")?, what)?,
        pr_auc: json_metric(json_field(v, "pr_auc")?, what)?,
    })
}

/// Parse the JSON form produced by [`render_json`].
pub fn parse_json(text: &str) -> Result<EvalReport, EvalError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| EvalError::BadReport(format!("invalid JSON: {e}")))?;
    let overall = json_field(&root, "overall")?;
    let subsets = json_field(&root, "subsets")?;
    let weekly = json_field(&root, "weekly")?
        .as_array()
        .ok_or_else(|| EvalError::BadReport("weekly: expected array".into()))?;
    let mut weeks = Vec::with_capacity(weekly.len());
    for w in weekly {
        weeks.push(WeekEntry {
            iso_year: json_field(w, "iso_year")?
                .as_i64()
                .ok_or_else(|| EvalError::BadReport("iso_year: expected integer".into()))?
                as i32,
            iso_week: json_field(w, "iso_week")?
                .as_u64()
                .ok_or_else(|| EvalError::BadReport("iso_week: expected integer".into()))?
                as u32,
            roc_auc: json_metric(json_field(w, "roc_auc")?, "weekly roc_auc")?,
        });
    }
    Ok(EvalReport {
        overall: OverallMetrics {
            roc_auc: json_metric(json_field(overall, "roc_auc")?, "overall roc_auc")?,
            pr_auc: json_metric(json_field(overall, "pr_auc")?, "overall pr_auc")?,
            threshold: ThresholdMetrics {
                accuracy: json_metric(json_field(overall, "accuracy")?, "accuracy")?,
                precision: json_metric(json_field(overall, "precision")?, "precision")?,
                recall: json_metric(json_field(overall, "recall")?, "recall")?,
                f1: json_metric(json_field(overall, "f1")?, "f1")?,
            },
        },
        subsets: SubsetReport {
            head: json_subset(json_field(subsets, "head")?, "head")?,
            body: json_subset(json_field(subsets, "body")?, "body")?,
            registered: json_subset(json_field(subsets, "registered")?, "registered")?,
            unregistered: json_subset(json_field(subsets, "unregistered")?, "unregistered")?,
        },
        weekly: weeks,
        leak_report: json_note(json_field(&root, "leak_report")?, "leak_report")?,
        exclusion_note: json_note(json_field(&root, "exclusions")?, "exclusions")?,
    })
}

pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Tsv => render_tsv(report),
        ReportFormat::Json => render_json(report),
    }
}

pub fn parse_report(text: &str, format: ReportFormat) -> Result<EvalReport, EvalError> {
    match format {
        ReportFormat::Tsv => parse_tsv(text),
        ReportFormat::Json => parse_json(text),
    }
}

pub fn write_report(
    report: &EvalReport,
    path: &Path,
    format: ReportFormat,
) -> Result<(), EvalError> {
    fs::write(path, render_report(report, format))?;
    Ok(())
}

pub fn read_report(path: &Path, format: ReportFormat) -> Result<EvalReport, EvalError> {
    let text = fs::read_to_string(path)?;
    parse_report(&text, format)
}
