//! Accuracy, confusion matrices, timed train/test runs and data-fraction sweeps.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::{split_contiguous, Label, LabeledCorpus, ReviewRecord, TaskKind};
use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::models::{pipeline_fit, pipeline_predict, Classifier, HyperParams, ModelKind, TrainedPipeline};
use crate::textproc::StopList;

/// Fraction of positions where `predicted` equals `truth`.
pub fn accuracy(predicted: &[Label], truth: &[Label]) -> Result<f64> {
    if predicted.len() != truth.len() || truth.is_empty() {
        return Err(Error::Range(format!(
            "accuracy needs equal non-empty lengths, got {} and {}",
            predicted.len(),
            truth.len()
        )));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// `m[t][p]` counts rows with truth `classes[t]` predicted as `classes[p]`.
pub fn confusion_matrix(
    predicted: &[Label],
    truth: &[Label],
    classes: &[Label],
) -> Result<Vec<Vec<u64>>> {
    if predicted.len() != truth.len() {
        return Err(Error::Range("predicted and truth lengths differ".into()));
    }
    let pos = |l: &Label| {
        classes
            .iter()
            .position(|c| c == l)
            .ok_or_else(|| Error::Range(format!("label {l} not in class list")))
    };
    let mut m = vec![vec![0u64; classes.len()]; classes.len()];
    for (p, t) in predicted.iter().zip(truth) {
        m[pos(t)?][pos(p)?] += 1;
    }
    Ok(m)
}

/// Every label a task can produce, in class order.
pub fn task_classes(task: TaskKind) -> Vec<Label> {
    match task {
        TaskKind::PosNeg => vec![Label::Negative, Label::Positive],
        TaskKind::FiveStar => (1..=5).map(Label::Stars).collect(),
    }
}

/// `0.929` → `"92.90%"`.
pub fn format_percent(accuracy: f64) -> String {
    format!("{:.2}%", accuracy * 100.0)
}

/// Seconds with two decimals.
pub fn format_seconds(seconds: f64) -> String {
    format!("{seconds:.2}")
}

/// Settings for one train/test run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub task: TaskKind,
    pub model: ModelKind,
    pub hyper: HyperParams,
    pub train_fraction: Fraction,
    pub data_fraction: Fraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task_kind: TaskKind,
    pub model_kind: ModelKind,
    pub data_fraction: Fraction,
    pub train_fraction: Fraction,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub classes: Vec<Label>,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<u64>>,
    pub seed: u64,
    pub stop_list_id: String,
    pub vocabulary_size: usize,
    pub converged: bool,
    pub train_seconds: f64,
    pub total_seconds: f64,
}

impl EvalReport {
    pub fn summary(&self) -> String {
        format!(
            "{} {} @ {}: accuracy {} (train {}, test {}), {} s train, {} s total",
            self.model_kind,
            self.task_kind,
            self.data_fraction,
            format_percent(self.accuracy),
            self.n_train,
            self.n_test,
            format_seconds(self.train_seconds),
            format_seconds(self.total_seconds),
        )
    }
}

/// Fit on the leading `train_fraction` of the first `ceil(data_fraction * N)`
/// records and score on the rest of that prefix.
pub fn run_experiment(
    records: &[ReviewRecord],
    exp: &Experiment,
    stoplist: &StopList,
) -> Result<EvalReport> {
    fit_experiment(records, exp, stoplist).map(|(_, report)| report)
}

/// [`run_experiment`], also returning the fitted pipeline.
pub fn fit_experiment(
    records: &[ReviewRecord],
    exp: &Experiment,
    stoplist: &StopList,
) -> Result<(TrainedPipeline, EvalReport)> {
    let (train, test) = experiment_split(records, exp)?;
    let start = Instant::now();
    let pipeline = pipeline_fit(&train, exp.model, &exp.hyper, stoplist)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let mut report = score(&pipeline, &test, exp, train.len())?;
    report.train_seconds = train_seconds;
    report.total_seconds = start.elapsed().as_secs_f64().max(train_seconds);
    Ok((pipeline, report))
}

/// Score an already fitted pipeline on the held-out part of the split that
/// `exp` describes. `exp.model` and `exp.task` are taken from the pipeline;
/// `train_seconds` is zero.
pub fn evaluate_pipeline(
    pipeline: &TrainedPipeline,
    records: &[ReviewRecord],
    exp: &Experiment,
) -> Result<EvalReport> {
    let exp = Experiment {
        task: pipeline.task_kind,
        model: pipeline.model_kind(),
        ..exp.clone()
    };
    let (train, test) = experiment_split(records, &exp)?;
    let start = Instant::now();
    let mut report = score(pipeline, &test, &exp, train.len())?;
    report.total_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn experiment_split(records: &[ReviewRecord], exp: &Experiment) -> Result<(LabeledCorpus, LabeledCorpus)> {
    let n_used = exp.data_fraction.ceil_mul(records.len());
    let corpus = LabeledCorpus::from_records(&records[..n_used], exp.task);
    let (train_range, test_range) = split_contiguous(n_used, exp.train_fraction)?;
    Ok((corpus.slice(train_range), corpus.slice(test_range)))
}

fn score(pipeline: &TrainedPipeline, test: &LabeledCorpus, exp: &Experiment, n_train: usize) -> Result<EvalReport> {
    let predicted = pipeline_predict(pipeline, &test.texts);
    let classes = task_classes(exp.task);
    let confusion = confusion_matrix(&predicted, &test.labels, &classes)?;
    let hits: u64 = (0..classes.len()).map(|c| confusion[c][c]).sum();
    let accuracy = hits as f64 / test.len() as f64;

    let converged = match &pipeline.classifier {
        Classifier::Linear(m) => m.converged,
        Classifier::NaiveBayes(_) => true,
    };

    Ok(EvalReport {
        task_kind: exp.task,
        model_kind: exp.model,
        data_fraction: exp.data_fraction,
        train_fraction: exp.train_fraction,
        n_train,
        n_test: test.len(),
        accuracy,
        classes,
        confusion,
        seed: exp.hyper.seed,
        stop_list_id: pipeline.stop_list_id.clone(),
        vocabulary_size: pipeline.vocabulary.len(),
        converged,
        train_seconds: 0.0,
        total_seconds: 0.0,
    })
}

/// 10%, 20%, …, 100%.
pub fn default_grid() -> Vec<Fraction> {
    percent_grid(10, 100, 10).expect("static grid is valid")
}

/// Percent grid `start, start + step, …` up to and including `stop` when it
/// lands on a step.
pub fn percent_grid(start: u64, stop: u64, step: u64) -> Result<Vec<Fraction>> {
    if step == 0 || start == 0 || start > stop || stop > 100 {
        return Err(Error::Range(format!(
            "bad percent grid {start}:{stop}:{step} (need 0 < start <= stop <= 100, step > 0)"
        )));
    }
    (start..=stop)
        .step_by(step as usize)
        .map(Fraction::from_percent)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub grid: Vec<Fraction>,
    pub models: Vec<ModelKind>,
    pub jobs: usize,
    /// Fraction-major, model-minor.
    pub reports: Vec<EvalReport>,
}

/// One [`run_experiment`] per (fraction, model) pair with the same
/// hyperparameters and seed throughout. `jobs > 1` runs grid points on that
/// many threads; report order does not depend on it.
#[allow(clippy::too_many_arguments)]
pub fn fraction_sweep(
    records: &[ReviewRecord],
    task: TaskKind,
    models: &[ModelKind],
    hyper: &HyperParams,
    train_fraction: Fraction,
    grid: &[Fraction],
    stoplist: &StopList,
    jobs: usize,
) -> Result<SweepReport> {
    if grid.is_empty() || models.is_empty() {
        return Err(Error::Range("sweep needs at least one fraction and one model".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Range("sweep grid must be strictly ascending".into()));
    }
    if jobs == 0 {
        return Err(Error::Range("jobs must be >= 1".into()));
    }

    let points: Vec<Experiment> = grid
        .iter()
        .flat_map(|&f| {
            models.iter().map(move |&m| Experiment {
                task,
                model: m,
                hyper: hyper.clone(),
                train_fraction,
                data_fraction: f,
            })
        })
        .collect();

    let reports = if jobs == 1 {
        points
            .iter()
            .map(|e| run_experiment(records, e, stoplist))
            .collect::<Result<Vec<_>>>()?
    } else {
        let slots: Vec<Mutex<Option<Result<EvalReport>>>> =
            points.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..jobs.min(points.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= points.len() {
                        break;
                    }
                    let r = run_experiment(records, &points[i], stoplist);
                    *slots[i].lock().unwrap() = Some(r);
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().unwrap().expect("every grid point ran"))
            .collect::<Result<Vec<_>>>()?
    };

    Ok(SweepReport {
        grid: grid.to_vec(),
        models: models.to_vec(),
        jobs,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_examples() {
        let p = [Label::Positive, Label::Negative];
        assert_eq!(accuracy(&p, &p).unwrap(), 1.0);
        assert_eq!(accuracy(&p, &[Label::Positive, Label::Positive]).unwrap(), 0.5);
        assert!(accuracy(&[], &[]).is_err());
        assert!(accuracy(&p, &p[..1]).is_err());
    }

    #[test]
    fn confusion_examples() {
        let classes = task_classes(TaskKind::FiveStar);
        let truth = [Label::Stars(1), Label::Stars(2)];
        let pred = [Label::Stars(2), Label::Stars(1)];
        let m = confusion_matrix(&pred, &truth, &classes).unwrap();
        assert_eq!(m[0][1], 1);
        assert_eq!(m[1][0], 1);
        assert!((0..5).all(|i| m[i][i] == 0));
        let m = confusion_matrix(&truth, &truth, &classes).unwrap();
        assert_eq!((m[0][0], m[1][1]), (1, 1));
        assert_eq!(m.iter().flatten().sum::<u64>(), 2);
    }

    #[test]
    fn rendering() {
        assert_eq!(format_percent(0.9290), "92.90%");
        assert_eq!(format_percent(0.6392), "63.92%");
        assert_eq!(format_seconds(178.52), "178.52");
        assert_eq!(format_seconds(585.92), "585.92");
    }

    #[test]
    fn grids() {
        let g = default_grid();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], Fraction::new(1, 10).unwrap());
        assert_eq!(g[9], Fraction::ONE);
        assert_eq!(percent_grid(25, 100, 25).unwrap().len(), 4);
        assert_eq!(percent_grid(10, 95, 10).unwrap().len(), 9);
        assert!(percent_grid(0, 100, 10).is_err());
        assert!(percent_grid(10, 110, 10).is_err());
        assert!(percent_grid(10, 100, 0).is_err());
    }

    fn records(n: usize) -> Vec<ReviewRecord> {
        (0..n)
            .map(|i| {
                let stars = if i % 2 == 0 { 5 } else { 1 };
                let text = if stars == 5 { "lovely tasty meal" } else { "dreadful soggy meal" };
                ReviewRecord {
                    text: text.to_string(),
                    stars,
                    source_line: i + 1,
                }
            })
            .collect()
    }

    #[test]
    fn experiment_split_arithmetic() {
        let exp = Experiment {
            task: TaskKind::PosNeg,
            model: ModelKind::NaiveBayes,
            hyper: HyperParams::default(),
            train_fraction: "0.7".parse().unwrap(),
            data_fraction: Fraction::ONE,
        };
        let r = run_experiment(&records(10), &exp, &StopList::english()).unwrap();
        assert_eq!((r.n_train, r.n_test), (7, 3));
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.confusion.iter().flatten().sum::<u64>(), 3);
        assert!(r.total_seconds >= r.train_seconds && r.train_seconds >= 0.0);
    }

    #[test]
    fn sweep_order_and_parallel_agreement() {
        let recs = records(40);
        let grid = percent_grid(50, 100, 25).unwrap();
        let models = [ModelKind::NaiveBayes, ModelKind::LogisticRegression];
        let h = HyperParams::default();
        let tf: Fraction = "0.7".parse().unwrap();
        let sl = StopList::english();
        let a = fraction_sweep(&recs, TaskKind::PosNeg, &models, &h, tf, &grid, &sl, 1).unwrap();
        let b = fraction_sweep(&recs, TaskKind::PosNeg, &models, &h, tf, &grid, &sl, 3).unwrap();
        assert_eq!(a.reports.len(), 6);
        for (x, y) in a.reports.iter().zip(&b.reports) {
            assert_eq!((x.data_fraction, x.model_kind, x.accuracy), (y.data_fraction, y.model_kind, y.accuracy));
        }
        assert_eq!(a.reports[1].model_kind, ModelKind::LogisticRegression);
        assert_eq!(a.reports[2].data_fraction, Fraction::new(3, 4).unwrap());
        assert!(fraction_sweep(&recs, TaskKind::PosNeg, &models, &h, tf, &[Fraction::ONE, Fraction::ONE], &sl, 1).is_err());
    }
}
