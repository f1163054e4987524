use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lcmeval::corpus::{validate_campaign, write_external_scores, Campaign, LengthUnit};
use lcmeval::ratings::qc::DEFAULT_TIMING_CUTOFF_S;
use lcmeval::ratings::{aggregate_segment_human, schedule_traps, znormalize, AgreementScale};
use lcmeval::report::pipeline::{
    agreement_table, human_scores_table, native_system_table, qc_timing_table, qc_traps_table, write_files,
};
use lcmeval::report::{
    emit_sig_matrix, load_sig_matrix_csv, run_pipeline, score_command, with_threads, Analysis, RunOptions, SigFormat,
};
use lcmeval::significance::{DEFAULT_ALPHA, DEFAULT_BOOTSTRAP, DEFAULT_LEVEL, DEFAULT_PERMUTATIONS};
use lcmeval::{Error, Result, Task};

#[derive(Parser)]
#[command(name = "lcmeval", version, about = "Meta-evaluation of metrics for length-controllable MT")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master seed; defaults to the campaign's seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of hybrid systems for system-level correlation
    #[arg(long, global = true, default_value_t = lcmeval::meta_eval::hybrid::DEFAULT_HYBRIDS)]
    hybrids: usize,
    /// Permutation replicates for PERM-BOTH
    #[arg(long, global = true, default_value_t = DEFAULT_PERMUTATIONS)]
    permutations: usize,
    /// Bootstrap resamples for system comparison
    #[arg(long, global = true, default_value_t = DEFAULT_BOOTSTRAP)]
    bootstrap: usize,
    /// Significance level for segment-level tests
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Confidence level for system-level intervals
    #[arg(long, global = true, default_value_t = DEFAULT_LEVEL)]
    ci_level: f64,
    /// Durations at or above this many seconds are dropped from Cut.Ave
    #[arg(long, global = true, default_value_t = DEFAULT_TIMING_CUTOFF_S)]
    timing_cutoff: f64,
    /// Include trap ratings when computing z-score statistics
    #[arg(long, global = true)]
    include_traps: bool,
    /// Override the campaign's length unit
    #[arg(long, global = true, value_parser = parse_length_unit)]
    length_unit: Option<LengthUnit>,
    /// Scale of ratings used for agreement statistics
    #[arg(long, global = true, value_enum, default_value_t = ScaleArg::Raw)]
    agreement_scale: ScaleArg,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Raw,
    Z,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    System,
    Segment,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Textgrid,
    Svg,
    All,
}

impl FormatArg {
    fn formats(self) -> Vec<SigFormat> {
        match self {
            FormatArg::Csv => vec![SigFormat::Csv],
            FormatArg::Textgrid => vec![SigFormat::Textgrid],
            FormatArg::Svg => vec![SigFormat::Svg],
            FormatArg::All => SigFormat::ALL.to_vec(),
        }
    }
}

fn parse_length_unit(s: &str) -> std::result::Result<LengthUnit, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Check the campaign against its planned design
    Validate { config: PathBuf },
    /// Draw trap samples for every task and annotator slot
    Traps {
        config: PathBuf,
        #[arg(long, default_value_t = 60)]
        per_annotator: usize,
        #[arg(short, long, default_value = "traps.jsonl")]
        out: PathBuf,
    },
    /// Annotation timing and trap-score buckets
    Qc {
        config: PathBuf,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Z-normalize ratings and aggregate human segment scores
    Normalize {
        config: PathBuf,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute native lexical metrics
    Score {
        config: PathBuf,
        /// Restrict to one task, e.g. en-zh@0.8
        #[arg(long)]
        task: Option<Task>,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Load and check external metric score files
    Ingest { config: PathBuf },
    /// Metric-human correlations and variant selection
    Correlate {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = LevelArg::Both)]
        level: LevelArg,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Pairwise metric significance matrices
    Significance {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = LevelArg::Both)]
        level: LevelArg,
        #[arg(long, value_enum, default_value_t = FormatArg::All)]
        format: FormatArg,
        #[arg(long)]
        task: Option<Task>,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare systems with the paired bootstrap and report length deviation
    Syscompare {
        config: PathBuf,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Render a significance matrix CSV in another format
    Report {
        matrix: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the full pipeline
    Run {
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

impl GlobalArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            hybrids: self.hybrids,
            permutations: self.permutations,
            bootstrap: self.bootstrap,
            alpha: self.alpha,
            ci_level: self.ci_level,
            timing_cutoff: self.timing_cutoff,
            include_traps: self.include_traps,
            agreement_scale: match self.agreement_scale {
                ScaleArg::Raw => AgreementScale::Raw,
                ScaleArg::Z => AgreementScale::Z,
            },
            length_unit: self.length_unit,
            threads: self.threads,
        }
    }
}

fn load_campaign(config: &Path, options: &RunOptions) -> Result<Campaign> {
    let mut campaign = Campaign::load(config)?;
    if let Some(unit) = options.length_unit {
        campaign.config.length_unit = unit;
    }
    Ok(campaign)
}

fn emit(out: &Path, files: Vec<(String, String)>) -> Result<()> {
    for path in write_files(out, &files)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn execute(cli: Cli) -> Result<ExitCode> {
    let options = cli.global.options();
    match cli.command {
        Command::Validate { config } => {
            let campaign = load_campaign(&config, &options)?;
            let report = validate_campaign(&campaign);
            println!("{}", json(&report));
            if !report.is_clean() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Traps {
            config,
            per_annotator,
            out,
        } => {
            let campaign = load_campaign(&config, &options)?;
            let seed = options.seed.unwrap_or(campaign.config.seed);
            let traps = schedule_traps(&campaign.config, &campaign.segments, per_annotator, seed)?;
            let mut body = String::new();
            for t in &traps {
                body.push_str(&serde_json::to_string(t).expect("serializable"));
                body.push('\n');
            }
            fs::write(&out, body).map_err(|e| Error::io(&out, e))?;
            println!("{} ({} traps)", out.display(), traps.len());
        }
        Command::Qc { config, out } => {
            let campaign = load_campaign(&config, &options)?;
            emit(
                &out,
                vec![
                    (
                        "qc_timing.csv".into(),
                        qc_timing_table(&campaign, options.timing_cutoff)?.to_csv(),
                    ),
                    ("qc_traps.csv".into(), qc_traps_table(&campaign).to_csv()),
                    (
                        "agreement.csv".into(),
                        agreement_table(&campaign, options.agreement_scale)?.to_csv(),
                    ),
                ],
            )?;
        }
        Command::Normalize { config, out } => {
            let campaign = load_campaign(&config, &options)?;
            let normalized = znormalize(&campaign.ratings, options.include_traps)?;
            let human = aggregate_segment_human(&normalized, campaign.config.annotators_per_task);
            for w in &human.warnings {
                log::warn!("{w}");
            }
            emit(&out, vec![("human_scores.csv".into(), human_scores_table(&human).to_csv())])?;
        }
        Command::Score { config, task, out } => {
            let campaign = load_campaign(&config, &options)?;
            let tasks = match task {
                Some(t) => vec![t],
                None => campaign.config.tasks(),
            };
            let scores = tasks
                .iter()
                .map(|t| score_command(&campaign, t))
                .collect::<Result<Vec<_>>>()?;
            let mut files = Vec::new();
            for n in &scores {
                let mut tables = n.rouge.clone();
                tables.push(n.length.clone());
                files.push((
                    format!("native_scores_{}.tsv", n.task.file_label()),
                    write_external_scores(&tables)?,
                ));
            }
            let refs: Vec<_> = scores.iter().collect();
            files.push(("native_system_scores.csv".into(), native_system_table(&refs)?.to_csv()));
            emit(&out, files)?;
        }
        Command::Ingest { config } => {
            let campaign = load_campaign(&config, &options)?;
            let summary: Vec<serde_json::Value> = campaign
                .external_scores
                .iter()
                .flat_map(|(task, tables)| {
                    tables.iter().map(move |t| {
                        serde_json::json!({
                            "task": task.to_string(),
                            "metric": t.metric_id,
                            "variant": t.variant_id,
                            "systems": t.systems().len(),
                            "segments": t.segments().len(),
                        })
                    })
                })
                .collect();
            println!("{}", json(&summary));
        }
        Command::Correlate { config, level, out } => {
            let threads = options.threads;
            let files = with_threads(threads, || -> Result<Vec<(String, String)>> {
                let analysis = Analysis::load(&config, options)?;
                let mut files = Vec::new();
                if level != LevelArg::Segment {
                    files.push(("correlations_system.csv".into(), analysis.system_correlations()?.0.to_csv()));
                }
                if level != LevelArg::System {
                    files.push(("correlations_segment.csv".into(), analysis.segment_correlations()?.to_csv()));
                }
                files.push(("variant_selection.csv".into(), analysis.variant_table().to_csv()));
                Ok(files)
            })??;
            emit(&out, files)?;
        }
        Command::Significance {
            config,
            level,
            format,
            task,
            out,
        } => {
            let threads = options.threads;
            let files = with_threads(threads, || -> Result<Vec<(String, String)>> {
                let analysis = Analysis::load(&config, options)?;
                let tasks = match task {
                    Some(t) => vec![t],
                    None => analysis.tasks.clone(),
                };
                let mut files = Vec::new();
                for t in &tasks {
                    let mut matrices = Vec::new();
                    if level != LevelArg::Segment {
                        let (labels, _, out) = analysis.hybrids(t)?;
                        matrices.push(("system", analysis.system_sig(t, &labels, &out)?));
                    }
                    if level != LevelArg::System {
                        matrices.push(("segment", analysis.segment_sig(t)?));
                    }
                    for (kind, m) in &matrices {
                        for f in format.formats() {
                            files.push((
                                format!("sig_{kind}_{}.{}", t.file_label(), f.extension()),
                                emit_sig_matrix(m, f),
                            ));
                        }
                    }
                }
                Ok(files)
            })??;
            emit(&out, files)?;
        }
        Command::Syscompare { config, out } => {
            let threads = options.threads;
            let files = with_threads(threads, || -> Result<Vec<(String, String)>> {
                let analysis = Analysis::load(&config, options)?;
                Ok(vec![
                    ("system_eval.csv".into(), analysis.system_eval_table()?.to_csv()),
                    ("length_deviation.csv".into(), analysis.length_deviation_table()?.to_csv()),
                ])
            })??;
            emit(&out, files)?;
        }
        Command::Report { matrix, format, out } => {
            let text = fs::read_to_string(&matrix).map_err(|e| Error::io(&matrix, e))?;
            let m = load_sig_matrix_csv(&text, &matrix.display().to_string(), options.ci_level)?;
            let stem = matrix
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "matrix".into());
            let files = format
                .formats()
                .into_iter()
                .map(|f| (format!("{stem}.{}", f.extension()), emit_sig_matrix(&m, f)))
                .collect();
            emit(&out, files)?;
        }
        Command::Run { config, out } => {
            let artifacts = run_pipeline(&config, &out, &options)?;
            for f in &artifacts.files {
                println!("{}  {}", f.sha256, out.join(&f.name).display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
