//! JSON and CSV report output.
//!
//! JSON is a direct dump of [`EvalReport`] / [`SweepReport`]. CSV has one row
//! per evaluation with header
//! `fraction,model,task,accuracy,train_seconds,total_seconds`, the fraction
//! written as a percentage and accuracy with four decimals.

use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{format_seconds, EvalReport, SweepReport};

pub const CSV_HEADER: [&str; 6] = [
    "fraction",
    "model",
    "task",
    "accuracy",
    "train_seconds",
    "total_seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Range(format!("unknown report format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Eval(&'a EvalReport),
    Sweep(&'a SweepReport),
}

pub fn write_report<W: Write>(report: Report<'_>, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            match report {
                Report::Eval(r) => serde_json::to_writer_pretty(&mut out, r),
                Report::Sweep(r) => serde_json::to_writer_pretty(&mut out, r),
            }
            .map_err(|e| Error::Report(e.to_string()))?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let rows: &[EvalReport] = match report {
                Report::Eval(r) => std::slice::from_ref(r),
                Report::Sweep(r) => &r.reports,
            };
            let mut w = csv::Writer::from_writer(&mut out);
            let csv_err = |e: csv::Error| Error::Report(e.to_string());
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for r in rows {
                let fraction = match r.data_fraction.as_whole_percent() {
                    Some(p) => p.to_string(),
                    None => format!("{}", r.data_fraction.to_f64() * 100.0),
                };
                w.write_record([
                    fraction,
                    r.model_kind.to_string(),
                    r.task_kind.to_string(),
                    format!("{:.4}", r.accuracy),
                    format_seconds(r.train_seconds),
                    format_seconds(r.total_seconds),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_eval_report(json: &str) -> Result<EvalReport> {
    serde_json::from_str(json).map_err(|e| Error::Report(e.to_string()))
}

pub fn read_sweep_report(json: &str) -> Result<SweepReport> {
    serde_json::from_str(json).map_err(|e| Error::Report(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Label, TaskKind};
    use crate::fraction::Fraction;
    use crate::models::ModelKind;

    fn lr_full() -> EvalReport {
        EvalReport {
            task_kind: TaskKind::PosNeg,
            model_kind: ModelKind::LogisticRegression,
            data_fraction: Fraction::ONE,
            train_fraction: "0.7".parse().unwrap(),
            n_train: 7,
            n_test: 1000,
            accuracy: 0.9290,
            classes: vec![Label::Negative, Label::Positive],
            confusion: vec![vec![100, 40], vec![31, 829]],
            seed: 42,
            stop_list_id: "english-318-v1".into(),
            vocabulary_size: 10,
            converged: true,
            train_seconds: 277.66,
            total_seconds: 280.0,
        }
    }

    #[test]
    fn csv_row_layout() {
        let mut buf = Vec::new();
        write_report(Report::Eval(&lr_full()), ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "fraction,model,task,accuracy,train_seconds,total_seconds");
        assert_eq!(lines[1], "100,lr,posneg,0.9290,277.66,280.00");
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let r = lr_full();
        let mut buf = Vec::new();
        write_report(Report::Eval(&r), ReportFormat::Json, &mut buf).unwrap();
        assert_eq!(read_eval_report(std::str::from_utf8(&buf).unwrap()).unwrap(), r);

        let sweep = SweepReport {
            grid: vec![Fraction::ONE],
            models: vec![ModelKind::LogisticRegression],
            jobs: 1,
            reports: vec![r],
        };
        let mut buf = Vec::new();
        write_report(Report::Sweep(&sweep), ReportFormat::Json, &mut buf).unwrap();
        assert_eq!(read_sweep_report(std::str::from_utf8(&buf).unwrap()).unwrap(), sweep);
    }
}
