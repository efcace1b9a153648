use std::fmt::Write as _;
use std::path::Path;

use leafwise_core::Complex64;

use crate::error::{HarnessError, Result};
use crate::run::ResultRecord;

pub const CSV_HEADER: [&str; 6] = [
    "scenario",
    "analytic_index",
    "pairing",
    "topological",
    "abs_err",
    "status",
];

/// Outcome of one scenario in a suite: a record or the error that stopped it.
#[derive(Debug)]
pub enum Outcome {
    Done(Box<ResultRecord>),
    Failed { name: String, error: HarnessError },
}

impl Outcome {
    pub fn name(&self) -> &str {
        match self {
            Self::Done(r) => &r.scenario.name,
            Self::Failed { name, .. } => name,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, Self::Done(r) if r.passed())
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    // adding zero folds −0 into +0
    format!("{:.12e}{:+.12e}i", z.re + 0.0, z.im + 0.0)
}

pub fn fmt_analytic(v: f64) -> String {
    if (v - v.round()).abs() <= 1e-12 {
        format!("{}", v.round() as i64)
    } else {
        format!("{:.12e}", v + 0.0)
    }
}

fn row(o: &Outcome) -> [String; 6] {
    match o {
        Outcome::Done(r) => [
            r.scenario.name.clone(),
            fmt_analytic(r.analytic),
            fmt_complex(r.pairing),
            fmt_complex(r.topological),
            format!("{:.3e}", r.abs_err()),
            if r.passed() { "pass" } else { "fail" }.into(),
        ],
        Outcome::Failed { name, error } => {
            let stage = match error {
                HarnessError::Stage { stage, .. } => stage.to_string(),
                _ => "setup".into(),
            };
            [
                name.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error:{stage}"),
            ]
        }
    }
}

/// CSV body for a list of outcomes; contains no timing information.
pub fn csv_string(outcomes: &[Outcome]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory csv");
    for o in outcomes {
        w.write_record(row(o)).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

pub fn table_string(outcomes: &[Outcome]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<26} {:>8} {:>34} {:>34} {:>10} {:>9}  status",
        "scenario", "analytic", "pairing", "topological", "abs_err", "wall"
    );
    for o in outcomes {
        match o {
            Outcome::Done(r) => {
                let _ = writeln!(
                    s,
                    "{:<26} {:>8} {:>34} {:>34} {:>10.2e} {:>8.2}s  {}",
                    r.scenario.name,
                    fmt_analytic(r.analytic),
                    fmt_complex(r.pairing),
                    fmt_complex(r.topological),
                    r.abs_err(),
                    r.wall.as_secs_f64(),
                    if r.passed() { "pass" } else { "FAIL" }
                );
                for (label, d) in r.checks().iter().skip(1) {
                    let _ = writeln!(s, "{:<26} {label}: {d:.2e}", "");
                }
            }
            Outcome::Failed { name, error } => {
                let _ = writeln!(s, "{name:<26} ERROR {error}");
            }
        }
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Writes `<stem>.csv`, `<stem>.txt` and, for finished scenarios, `<name>.scenario.toml`.
pub fn write_reports(out: &Path, stem: &str, outcomes: &[Outcome]) -> Result<()> {
    write_file(&out.join(format!("{stem}.csv")), &csv_string(outcomes))?;
    write_file(&out.join(format!("{stem}.txt")), &table_string(outcomes))?;
    for o in outcomes {
        if let Outcome::Done(r) = o {
            write_file(
                &out.join(format!("{}.scenario.toml", r.scenario.name)),
                &r.scenario.to_toml(),
            )?;
        }
    }
    Ok(())
}
