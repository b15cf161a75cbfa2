//! Subcommand definitions and their implementations.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Subcommand, ValueEnum};
use wdvdb_core::corpus::{
    compute_stats, generate_corpus, load_corpus, load_rollbacks, load_truth, save_corpus,
    save_rollbacks, save_truth, user_is_anonymous, write_stats, DatasetManifest, RevisionId,
    SplitName, SynthConfig,
};
use wdvdb_core::eval::{
    apply_exclusion, render_report, write_report, EvalReport, ExclusionFilter, ScoredDataset,
    ScoredRow,
};
use wdvdb_core::learning::meta_mean;
use wdvdb_core::stream::{
    audit_leak, read_trace, run_client, serve_listener, write_trace, ClientMode, LeakReport,
};

use crate::config::{
    ensure_window, parse_format, parse_instant, parse_preset, parse_split, resolve, resolve_opt,
    FileConfig, DEFAULT_ADDRESS, DEFAULT_SEED, DEFAULT_TIMEOUT_SECS, DEFAULT_WINDOW,
};
use crate::error::CliError;
use crate::pipeline::{prepare_detector, run_self_play, split_rows};
use crate::score_table::{load_scores, save_scores};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with ground truth and rollback events
    Gen(GenArgs),
    /// Tabulate corpus counts by vandalism status and content type
    Stats(StatsArgs),
    /// Assign every corpus revision to a manifest split
    Split(SplitArgs),
    /// Replay one split to a client over TCP with a backpressure window
    Serve(ServeArgs),
    /// Train a preset and score a served split, writing a score table
    Detect(DetectArgs),
    /// Combine score tables by per-revision arithmetic mean
    Meta(MetaArgs),
    /// Evaluate a score table against ground truth and write a report
    Eval(EvalArgs),
    /// Quantify ground-truth leakage recorded in a replay trace
    LeakAudit(LeakAuditArgs),
}

impl Command {
    pub fn dispatch(self, file: &FileConfig) -> Result<(), CliError> {
        match self {
            Command::Gen(args) => run_gen(args, file),
            Command::Stats(args) => run_stats(args),
            Command::Split(args) => run_split(args, file),
            Command::Serve(args) => run_serve(args, file),
            Command::Detect(args) => run_detect(args, file),
            Command::Meta(args) => run_meta(args),
            Command::Eval(args) => run_eval(args, file),
            Command::LeakAudit(args) => run_leak_audit(args),
        }
    }
}

/// Opens `--out` or falls back to stdout.
fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p)
                .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn load_manifest(flag: Option<&Path>, file: &FileConfig) -> Result<DatasetManifest, CliError> {
    let path = flag
        .map(Path::to_path_buf)
        .or_else(|| file.manifest.as_ref().map(PathBuf::from));
    match path {
        Some(p) => Ok(DatasetManifest::load(&p)?),
        None => Ok(DatasetManifest::default_windows()),
    }
}

fn resolve_split(flag: Option<&str>, file: &FileConfig) -> Result<SplitName, CliError> {
    match flag.or(file.split.as_deref()) {
        Some(name) => parse_split(name),
        None => Ok(SplitName::Test),
    }
}

// ---------------------------------------------------------------- gen

#[derive(Debug, Args)]
pub struct GenArgs {
    /// corpus output path; truth and rollback paths are derived from it
    /// unless given explicitly
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[arg(long, env = "WDVDB_SEED")]
    pub seed: Option<u64>,
    /// number of revisions
    #[arg(long)]
    pub n: Option<usize>,
    /// registered-user pool size
    #[arg(long)]
    pub users: Option<usize>,
    #[arg(long)]
    pub items: Option<usize>,
    #[arg(long)]
    pub vandalism_rate: Option<f64>,
    #[arg(long)]
    pub anon_fraction: Option<f64>,
    /// chance a HEAD vandalism comment contains a bad word
    #[arg(long)]
    pub badword_prob: Option<f64>,
    /// chance a vandalism revision carries an abuse-filter tag
    #[arg(long)]
    pub tag_prob: Option<f64>,
    #[arg(long)]
    pub head_fraction: Option<f64>,
    #[arg(long)]
    pub rollback_delay_max: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub truth_out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub rollbacks_out: Option<PathBuf>,
}

fn run_gen(args: GenArgs, file: &FileConfig) -> Result<(), CliError> {
    let defaults = SynthConfig::default();
    let cfg = SynthConfig {
        n_revisions: args.n.unwrap_or(defaults.n_revisions),
        n_users: args.users.unwrap_or(defaults.n_users),
        n_items: args.items.unwrap_or(defaults.n_items),
        vandalism_rate: args.vandalism_rate.unwrap_or(defaults.vandalism_rate),
        anon_fraction: args.anon_fraction.unwrap_or(defaults.anon_fraction),
        badword_inject_prob: args.badword_prob.unwrap_or(defaults.badword_inject_prob),
        tag_inject_prob: args.tag_prob.unwrap_or(defaults.tag_inject_prob),
        head_fraction: args.head_fraction.unwrap_or(defaults.head_fraction),
        rollback_delay_max: args
            .rollback_delay_max
            .unwrap_or(defaults.rollback_delay_max),
        seed: resolve(args.seed, file.seed, DEFAULT_SEED),
    };
    let (records, truth, rollbacks) =
        generate_corpus(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;

    let truth_path = args
        .truth_out
        .unwrap_or_else(|| args.out.with_extension("truth.tsv"));
    let rollbacks_path = args
        .rollbacks_out
        .unwrap_or_else(|| args.out.with_extension("rollbacks.tsv"));
    save_corpus(&records, &args.out)?;
    save_truth(&truth, &truth_path)?;
    save_rollbacks(&rollbacks, &rollbacks_path)?;
    eprintln!(
        "generated {} revisions ({} vandalism) into {}; truth {}; rollbacks {}",
        records.len(),
        truth.vandalism_count(),
        args.out.display(),
        truth_path.display(),
        rollbacks_path.display()
    );
    Ok(())
}

// -------------------------------------------------------------- stats

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,
    /// output path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn run_stats(args: StatsArgs) -> Result<(), CliError> {
    let records = load_corpus(&args.corpus)?;
    let truth = load_truth(&args.truth)?;
    let stats = compute_stats(&records, &truth)?;
    let mut sink = open_sink(args.out.as_deref())?;
    write_stats(&stats, &mut sink)?;
    sink.flush()?;
    Ok(())
}

// -------------------------------------------------------------- split

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, value_name = "FILE", required_unless_present = "emit_manifest")]
    pub corpus: Option<PathBuf>,
    #[arg(long, env = "WDVDB_MANIFEST", value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// assignment output (`revision_id<TAB>split` rows; stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// write the manifest in effect as editable JSON and do nothing else
    /// unless --corpus is also given
    #[arg(long, value_name = "FILE")]
    pub emit_manifest: Option<PathBuf>,
}

fn run_split(args: SplitArgs, file: &FileConfig) -> Result<(), CliError> {
    let manifest = load_manifest(args.manifest.as_deref(), file)?;
    if let Some(path) = &args.emit_manifest {
        manifest.save(path)?;
    }
    let Some(corpus) = &args.corpus else {
        return Ok(());
    };
    let records = load_corpus(corpus)?;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut sink = open_sink(args.out.as_deref())?;
    for record in &records {
        let name = match manifest.locate(record.timestamp) {
            Some(split) => split.as_str(),
            None => "NONE",
        };
        *counts.entry(name).or_insert(0) += 1;
        writeln!(sink, "{}\t{}", record.revision_id, name)?;
    }
    sink.flush()?;
    let summary: Vec<String> = counts.iter().map(|(n, c)| format!("{n}={c}")).collect();
    eprintln!("assigned {} revisions: {}", records.len(), summary.join(" "));
    Ok(())
}

// -------------------------------------------------------------- serve

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    #[arg(long, env = "WDVDB_MANIFEST", value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = "WDVDB_SPLIT")]
    pub split: Option<String>,
    /// backpressure window: unscored revisions allowed in flight
    #[arg(long, env = "WDVDB_K")]
    pub k: Option<usize>,
    /// listen address; port 0 picks an ephemeral port, printed on stdout
    #[arg(long, env = "WDVDB_ADDR")]
    pub addr: Option<String>,
    /// how long to wait for a score before giving up on the client
    #[arg(long, value_name = "SECS")]
    pub timeout_secs: Option<u64>,
    /// record the replay trace for leak auditing
    #[arg(long, value_name = "FILE")]
    pub trace_out: Option<PathBuf>,
}

fn run_serve(args: ServeArgs, file: &FileConfig) -> Result<(), CliError> {
    let k = ensure_window(resolve(args.k, file.k, DEFAULT_WINDOW))?;
    let address = resolve(
        args.addr,
        file.addr.clone(),
        DEFAULT_ADDRESS.to_string(),
    );
    let split = resolve_split(args.split.as_deref(), file)?;
    let timeout = Duration::from_secs(args.timeout_secs.unwrap_or(DEFAULT_TIMEOUT_SECS));
    let manifest = load_manifest(args.manifest.as_deref(), file)?;
    let records = load_corpus(&args.corpus)?;
    let served = split_rows(&records, &manifest, split);
    if served.is_empty() {
        return Err(CliError::Data(format!(
            "split {} has no revisions",
            split.as_str()
        )));
    }

    let listener = TcpListener::bind(&address)
        .map_err(|e| CliError::Protocol(format!("bind {address}: {e}")))?;
    let bound = listener
        .local_addr()
        .map_err(|e| CliError::Protocol(e.to_string()))?;
    // announce the (possibly ephemeral) port so a client can find us
    println!("listening\t{bound}");
    std::io::stdout().flush()?;
    let trace = serve_listener(&listener, &served, k, timeout)?;
    if let Some(path) = &args.trace_out {
        write_trace(&trace, path)?;
    }
    eprintln!(
        "served {} revisions to one client (peak window {})",
        served.len(),
        trace.peak_window()
    );
    Ok(())
}

// ------------------------------------------------------------- detect

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StreamMode {
    /// hold at most one unscored revision
    Serial,
    /// read and score concurrently up to the server's window
    Pipelined,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,
    #[arg(long, env = "WDVDB_MANIFEST", value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// split the stream replays (training always comes from TRAINING)
    #[arg(long, env = "WDVDB_SPLIT")]
    pub split: Option<String>,
    /// wdvd | filter | ores | custom:<file>
    #[arg(long, env = "WDVDB_PRESET")]
    pub preset: Option<String>,
    #[arg(long, env = "WDVDB_SEED")]
    pub seed: Option<u64>,
    /// backpressure window for the self-play server
    #[arg(long, env = "WDVDB_K")]
    pub k: Option<usize>,
    /// connect to a running server instead of replaying in-process;
    /// the server must replay the same corpus and split
    #[arg(long, env = "WDVDB_ADDR")]
    pub addr: Option<String>,
    /// client name sent in the handshake
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_enum, default_value_t = StreamMode::Pipelined)]
    pub mode: StreamMode,
    /// training thread cap (defaults to all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// score table output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// self-play only: record the replay trace
    #[arg(long, value_name = "FILE")]
    pub trace_out: Option<PathBuf>,
    /// self-play only: server patience for each score
    #[arg(long, value_name = "SECS")]
    pub timeout_secs: Option<u64>,
}

fn run_detect(args: DetectArgs, file: &FileConfig) -> Result<(), CliError> {
    let seed = resolve(args.seed, file.seed, DEFAULT_SEED);
    let preset_name = resolve(
        args.preset,
        file.preset.clone(),
        "wdvd".to_string(),
    );
    let preset = parse_preset(&preset_name, seed)?;
    let split = resolve_split(args.split.as_deref(), file)?;
    let manifest = load_manifest(args.manifest.as_deref(), file)?;
    let records = load_corpus(&args.corpus)?;
    let truth = load_truth(&args.truth)?;
    let mode = match args.mode {
        StreamMode::Serial => ClientMode::Serial,
        StreamMode::Pipelined => ClientMode::Pipelined,
    };
    let client_name = args
        .name
        .unwrap_or_else(|| preset.name.as_str().to_ascii_lowercase());

    let mut detector =
        prepare_detector(&records, &truth, &manifest, &preset, split, args.threads)?;
    eprintln!(
        "trained {} ({} trees) on TRAINING; streaming {}",
        preset.name,
        detector.model().config.n_trees(),
        split.as_str()
    );

    let address = resolve_opt(args.addr, file.addr.clone());
    let scores = match address {
        Some(addr) => run_client(&addr, &client_name, mode, &mut detector)?,
        None => {
            let k = ensure_window(resolve(args.k, file.k, DEFAULT_WINDOW))?;
            let timeout =
                Duration::from_secs(args.timeout_secs.unwrap_or(DEFAULT_TIMEOUT_SECS));
            let served = split_rows(&records, &manifest, split);
            let (scores, trace) =
                run_self_play(&served, k, timeout, &client_name, mode, &mut detector)?;
            if let Some(path) = &args.trace_out {
                write_trace(&trace, path)?;
            }
            scores
        }
    };
    save_scores(&scores, &args.out)?;
    eprintln!("scored {} revisions into {}", scores.len(), args.out.display());
    Ok(())
}

// --------------------------------------------------------------- meta

#[derive(Debug, Args)]
pub struct MetaArgs {
    /// score tables to combine (repeat the flag or list several paths)
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    pub scores: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

fn run_meta(args: MetaArgs) -> Result<(), CliError> {
    let mut tables = Vec::with_capacity(args.scores.len());
    for path in &args.scores {
        let table = load_scores(path)?;
        tables.push(table.into_iter().collect::<Vec<(RevisionId, f64)>>());
    }
    let combined = meta_mean(&tables)?;
    let combined: BTreeMap<RevisionId, f64> = combined.into_iter().collect();
    save_scores(&combined, &args.out)?;
    eprintln!(
        "averaged {} tables over {} revisions into {}",
        args.scores.len(),
        combined.len(),
        args.out.display()
    );
    Ok(())
}

// --------------------------------------------------------------- eval

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,
    /// report output path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// tsv | json
    #[arg(long, env = "WDVDB_FORMAT")]
    pub format: Option<String>,
    /// drop rows by this editor before evaluating
    #[arg(long, value_name = "USER")]
    pub exclude_user: Option<String>,
    /// drop rows at or after this instant (RFC 3339; needs --exclude-to)
    #[arg(long, value_name = "WHEN", requires = "exclude_to")]
    pub exclude_from: Option<String>,
    /// drop rows before this instant (RFC 3339; needs --exclude-from)
    #[arg(long, value_name = "WHEN", requires = "exclude_from")]
    pub exclude_to: Option<String>,
    /// drop these revision ids (comma-separated)
    #[arg(long, value_name = "IDS", value_delimiter = ',')]
    pub exclude_revisions: Vec<RevisionId>,
    /// note recording where the accompanying leak audit lives
    #[arg(long, value_name = "NOTE")]
    pub leak_report: Option<String>,
}

fn run_eval(args: EvalArgs, file: &FileConfig) -> Result<(), CliError> {
    let format = parse_format(&resolve(
        args.format,
        file.format.clone(),
        "tsv".to_string(),
    ))?;
    let scores = load_scores(&args.scores)?;
    let records = load_corpus(&args.corpus)?;
    let truth = load_truth(&args.truth)?;
    let by_id: HashMap<RevisionId, &_> =
        records.iter().map(|r| (r.revision_id, r)).collect();

    let mut rows = Vec::with_capacity(scores.len());
    for (&id, &score) in &scores {
        let record = by_id
            .get(&id)
            .ok_or_else(|| CliError::Data(format!("scored revision {id} not in corpus")))?;
        let vandalism = truth
            .is_vandalism(id)
            .ok_or_else(|| CliError::Data(format!("revision {id} has no label")))?;
        rows.push(ScoredRow {
            revision_id: id,
            score,
            vandalism,
            timestamp: record.timestamp,
            content_type: record.content_type,
            is_registered: !user_is_anonymous(&record.user_id),
            user_id: record.user_id.clone(),
        });
    }
    let mut dataset = ScoredDataset::new(rows)?;

    let time_range = match (&args.exclude_from, &args.exclude_to) {
        (Some(from), Some(to)) => Some((parse_instant(from)?, parse_instant(to)?)),
        _ => None,
    };
    let ids: Option<HashSet<RevisionId>> = if args.exclude_revisions.is_empty() {
        None
    } else {
        Some(args.exclude_revisions.iter().copied().collect())
    };
    let mut exclusion_note = None;
    if args.exclude_user.is_some() || time_range.is_some() || ids.is_some() {
        let filter = ExclusionFilter::new(args.exclude_user.clone(), time_range, ids)?;
        let before = dataset.len();
        let (kept, removed) = apply_exclusion(&dataset, &filter)?;
        dataset = kept;
        exclusion_note = Some(format!("removed {removed} of {before} rows"));
    }

    let mut report = EvalReport::from_dataset(&dataset);
    report.leak_report = args.leak_report;
    report.exclusion_note = exclusion_note;
    match &args.out {
        Some(path) => write_report(&report, path, format)?,
        None => print!("{}", render_report(&report, format)),
    }
    Ok(())
}

// --------------------------------------------------------- leak-audit

#[derive(Debug, Args)]
pub struct LeakAuditArgs {
    /// replay trace written by serve or detect
    #[arg(long, value_name = "FILE")]
    pub trace: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub rollbacks: PathBuf,
    /// output path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn render_leak_report(report: &LeakReport) -> String {
    format!(
        "leaked_regular\t{}\nleaked_vandalism\t{}\nleaked_fraction\t{}\n",
        report.leaked_regular, report.leaked_vandalism, report.leaked_fraction
    )
}

fn run_leak_audit(args: LeakAuditArgs) -> Result<(), CliError> {
    let trace = read_trace(&args.trace)?;
    let records = load_corpus(&args.corpus)?;
    let truth = load_truth(&args.truth)?;
    let rollbacks = load_rollbacks(&args.rollbacks)?;
    let report = audit_leak(&trace, &truth, &rollbacks, &records)?;
    let mut sink = open_sink(args.out.as_deref())?;
    sink.write_all(render_leak_report(&report).as_bytes())?;
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leak_report_rendering_is_tab_separated() {
        let report = LeakReport {
            leaked_regular: 3,
            leaked_vandalism: 10,
            leaked_fraction: 0.25,
        };
        assert_eq!(
            render_leak_report(&report),
            "leaked_regular\t3\nleaked_vandalism\t10\nleaked_fraction\t0.25\n"
        );
    }

}
