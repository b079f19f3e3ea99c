//! Argument parsing and command execution for the `reviewclf` binary.
//!
//! [`parse_args`] turns an argv into a [`RunConfig`]; [`run`] executes it.
//! Data goes to `stdout` (or `--output`), diagnostics to standard error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use reviewclf::corpus::{load_records, OnError};
use reviewclf::eval::{evaluate_pipeline, fit_experiment, fraction_sweep, percent_grid, Experiment};
use reviewclf::model_file::{load_model, save_model, ModelFormat};
use reviewclf::models::{pipeline_fit, pipeline_predict, HyperParams, ModelKind};
use reviewclf::report::{write_report, Report, ReportFormat};
use reviewclf::textproc::StopList;
use reviewclf::{Fraction, LabeledCorpus, ReviewRecord, TaskKind};

#[derive(Debug, Parser)]
#[command(name = "reviewclf", version, about = "Train and evaluate review-rating classifiers")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Fit one model, report held-out accuracy and optionally save the model.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "posneg")]
        task: TaskKind,
        #[arg(long, default_value = "lr")]
        model: ModelKind,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Write the fitted model here.
        #[arg(long)]
        save: Option<PathBuf>,
        /// Model file encoding: bin or json.
        #[arg(long, default_value = "bin")]
        model_format: ModelFormat,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Score a saved model on the held-out part of a review file.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        load: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Repeat train/evaluate over a grid of data fractions.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "posneg")]
        task: TaskKind,
        /// Comma-separated list of nb, svm, lr.
        #[arg(long, value_delimiter = ',', default_value = "nb,svm,lr")]
        model: Vec<ModelKind>,
        /// Percent grid start:stop:step.
        #[arg(long, default_value = "10:100:10", value_parser = parse_grid)]
        grid: Grid,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Grid points fitted concurrently.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print one predicted label per input line (stdin, or --data).
    Predict {
        #[arg(long)]
        load: PathBuf,
        /// File of bare review texts, one per line. Defaults to stdin.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// JSON-lines review file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "0.7")]
    train_fraction: Fraction,
    /// Use only the first ceil(f * N) reviews.
    #[arg(long, default_value = "1")]
    data_fraction: Fraction,
    /// What to do with malformed lines: skip or abort.
    #[arg(long, default_value = "skip")]
    on_error: OnError,
}

#[derive(Debug, Args)]
struct HyperArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Naive Bayes smoothing.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// L2 penalty; model default when omitted.
    #[arg(long)]
    l2: Option<f64>,
    /// SVM passes over the data.
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    /// Logistic regression iteration cap.
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Report destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    output_format: ReportFormat,
}

#[derive(Debug, Clone)]
struct Grid(Vec<Fraction>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<u64> = parts
        .iter()
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("grid {s:?} is not start:stop:step in whole percent"))?;
    match nums[..] {
        [start, stop, step] => percent_grid(start, stop, step).map(Grid).map_err(|e| e.to_string()),
        [single] => percent_grid(single, single, 1).map(Grid).map_err(|e| e.to_string()),
        _ => Err(format!("grid {s:?} is not start:stop:step in whole percent")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Train,
    Evaluate,
    Sweep,
    Predict,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub data_path: Option<PathBuf>,
    /// `None` for `evaluate` and `predict`, which take the task from the model.
    pub task: Option<TaskKind>,
    pub models: Vec<ModelKind>,
    pub train_fraction: Fraction,
    pub data_fraction: Fraction,
    pub grid: Vec<Fraction>,
    pub hyper: HyperParams,
    pub stopwords_path: Option<PathBuf>,
    /// `--save` for `train`, `--load` otherwise.
    pub model_path: Option<PathBuf>,
    pub model_format: ModelFormat,
    pub output_path: Option<PathBuf>,
    pub output_format: ReportFormat,
    pub on_error: OnError,
    pub jobs: usize,
}

impl RunConfig {
    fn base(command: Command) -> Self {
        RunConfig {
            command,
            data_path: None,
            task: None,
            models: Vec::new(),
            train_fraction: "0.7".parse().expect("literal"),
            data_fraction: Fraction::ONE,
            grid: vec![Fraction::ONE],
            hyper: HyperParams::default(),
            stopwords_path: None,
            model_path: None,
            model_format: ModelFormat::Binary,
            output_path: None,
            output_format: ReportFormat::Json,
            on_error: OnError::Skip,
            jobs: 1,
        }
    }

    fn with_data(mut self, d: DataArgs) -> Self {
        self.data_path = Some(d.data);
        self.train_fraction = d.train_fraction;
        self.data_fraction = d.data_fraction;
        self.on_error = d.on_error;
        self
    }

    fn with_hyper(mut self, h: HyperArgs) -> Self {
        self.hyper = HyperParams {
            nb_alpha: h.alpha,
            l2_strength: h.l2,
            epochs: h.epochs,
            seed: h.seed,
            max_iter: h.max_iter,
            ..HyperParams::default()
        };
        self
    }

    fn with_output(mut self, o: OutputArgs) -> Self {
        self.output_path = o.output;
        self.output_format = o.output_format;
        self
    }
}

/// Parse a full argv (program name first). `--help` and `--version` come back
/// as errors whose kind says so; `clap::Error::exit` prints them and exits 0.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let cfg = match cli.command {
        CliCommand::Train {
            data,
            task,
            model,
            hyper,
            stopwords,
            save,
            model_format,
            output,
        } => {
            let mut c = RunConfig::base(Command::Train).with_data(data).with_hyper(hyper).with_output(output);
            c.task = Some(task);
            c.models = vec![model];
            c.stopwords_path = stopwords;
            c.model_path = save;
            c.model_format = model_format;
            c.grid = vec![c.data_fraction];
            c
        }
        CliCommand::Evaluate { data, load, output } => {
            let mut c = RunConfig::base(Command::Evaluate).with_data(data).with_output(output);
            c.model_path = Some(load);
            c.grid = vec![c.data_fraction];
            c
        }
        CliCommand::Sweep {
            data,
            task,
            model,
            grid,
            hyper,
            stopwords,
            jobs,
            output,
        } => {
            let mut c = RunConfig::base(Command::Sweep).with_data(data).with_hyper(hyper).with_output(output);
            c.task = Some(task);
            c.models = model;
            c.grid = grid.0;
            c.stopwords_path = stopwords;
            c.jobs = jobs as usize;
            c
        }
        CliCommand::Predict { load, data, output } => {
            let mut c = RunConfig::base(Command::Predict);
            c.model_path = Some(load);
            c.data_path = data;
            c.output_path = output;
            c
        }
    };
    if let Err(e) = cfg.hyper.validate() {
        return Err(Cli::command().error(ErrorKind::ValueValidation, e.to_string()));
    }
    if cfg.command == Command::Sweep && cfg.train_fraction == Fraction::ONE {
        return Err(Cli::command().error(
            ErrorKind::ValueValidation,
            "sweep needs a held-out part: --train-fraction must be below 1",
        ));
    }
    Ok(cfg)
}

/// Execute a parsed configuration. `stdin` feeds `predict` when no `--data`
/// is given; reports and labels go to `stdout` unless `--output` is set.
pub fn run(cfg: &RunConfig, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> reviewclf::Result<()> {
    match cfg.command {
        Command::Train => cmd_train(cfg, stdout),
        Command::Evaluate => cmd_evaluate(cfg, stdout),
        Command::Sweep => cmd_sweep(cfg, stdout),
        Command::Predict => cmd_predict(cfg, stdin, stdout),
    }
}

fn read_reviews(cfg: &RunConfig) -> reviewclf::Result<Vec<ReviewRecord>> {
    let path = cfg.data_path.as_deref().expect("parser requires --data");
    let loaded = load_records(BufReader::new(File::open(path)?), 1, None, cfg.on_error)?;
    if loaded.skipped > 0 {
        eprintln!("{}: skipped {} malformed line(s)", path.display(), loaded.skipped);
    }
    Ok(loaded.records)
}

fn stop_list(cfg: &RunConfig) -> reviewclf::Result<StopList> {
    match &cfg.stopwords_path {
        Some(p) => StopList::from_path(p),
        None => Ok(StopList::english()),
    }
}

fn experiment(cfg: &RunConfig, model: ModelKind) -> Experiment {
    Experiment {
        task: cfg.task.unwrap_or(TaskKind::PosNeg),
        model,
        hyper: cfg.hyper.clone(),
        train_fraction: cfg.train_fraction,
        data_fraction: cfg.data_fraction,
    }
}

fn emit(cfg: &RunConfig, report: Report<'_>, stdout: &mut dyn Write) -> reviewclf::Result<()> {
    match &cfg.output_path {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            write_report(report, cfg.output_format, &mut f)?;
            f.flush()?;
        }
        None => write_report(report, cfg.output_format, stdout)?,
    }
    Ok(())
}

fn save(cfg: &RunConfig, p: &reviewclf::TrainedPipeline) -> reviewclf::Result<()> {
    if let Some(path) = &cfg.model_path {
        save_model(p, path, cfg.model_format)?;
        eprintln!("saved {} model to {}", p.model_kind(), path.display());
    }
    Ok(())
}

fn cmd_train(cfg: &RunConfig, stdout: &mut dyn Write) -> reviewclf::Result<()> {
    let records = read_reviews(cfg)?;
    let sl = stop_list(cfg)?;
    let exp = experiment(cfg, cfg.models[0]);
    if cfg.train_fraction == Fraction::ONE {
        // Everything is training data; there is nothing to report on.
        let n_used = cfg.data_fraction.ceil_mul(records.len());
        let corpus = LabeledCorpus::from_records(&records[..n_used], exp.task);
        let p = pipeline_fit(&corpus, exp.model, &exp.hyper, &sl)?;
        eprintln!("fitted {} on {} reviews (no held-out part)", exp.model, corpus.len());
        return save(cfg, &p);
    }
    let (p, report) = fit_experiment(&records, &exp, &sl)?;
    eprintln!("{}", report.summary());
    save(cfg, &p)?;
    emit(cfg, Report::Eval(&report), stdout)
}

fn cmd_evaluate(cfg: &RunConfig, stdout: &mut dyn Write) -> reviewclf::Result<()> {
    let p = load_model(cfg.model_path.as_deref().expect("parser requires --load"))?;
    let records = read_reviews(cfg)?;
    let report = evaluate_pipeline(&p, &records, &experiment(cfg, p.model_kind()))?;
    eprintln!("{}", report.summary());
    emit(cfg, Report::Eval(&report), stdout)
}

fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> reviewclf::Result<()> {
    let records = read_reviews(cfg)?;
    let sl = stop_list(cfg)?;
    let sweep = fraction_sweep(
        &records,
        cfg.task.unwrap_or(TaskKind::PosNeg),
        &cfg.models,
        &cfg.hyper,
        cfg.train_fraction,
        &cfg.grid,
        &sl,
        cfg.jobs,
    )?;
    for r in &sweep.reports {
        eprintln!("{}", r.summary());
    }
    emit(cfg, Report::Sweep(&sweep), stdout)
}

fn cmd_predict(cfg: &RunConfig, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> reviewclf::Result<()> {
    let p = load_model(cfg.model_path.as_deref().expect("parser requires --load"))?;
    let texts = match &cfg.data_path {
        Some(path) => read_lines(&mut BufReader::new(File::open(path)?))?,
        None => read_lines(stdin)?,
    };
    let labels = pipeline_predict(&p, &texts);
    let write_all = |out: &mut dyn Write| -> io::Result<()> {
        for l in &labels {
            writeln!(out, "{l}")?;
        }
        out.flush()
    };
    match &cfg.output_path {
        Some(path) => write_all(&mut BufWriter::new(File::create(path)?))?,
        None => write_all(stdout)?,
    }
    Ok(())
}

/// Lines without their terminators; invalid UTF-8 is replaced, not fatal.
fn read_lines(r: &mut dyn BufRead) -> io::Result<Vec<String>> {
    let mut out = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if r.read_until(b'\n', &mut buf)? == 0 {
            return Ok(out);
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
        }
        out.push(String::from_utf8_lossy(&buf).into_owned());
    }
}
