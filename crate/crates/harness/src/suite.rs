use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{HarnessError, Result};
use crate::props::{self, PropertyResult};
use crate::report::{self, Outcome};
use crate::run::run_scenario;
use crate::scenario::{catalog, Scenario};

pub const WORKERS_ENV: &str = "LEAFWISE_WORKERS";
pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Invariants,
    Scenarios,
    All,
}

/// Worker count from the environment, at least one.
pub fn workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// `f(0..n)` on up to `workers` threads, results in index order.
pub fn par_map<T: Send>(n: usize, workers: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|sc| {
        for _ in 0..workers.clamp(1, n.max(1)) {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let v = f(i);
                *slots[i].lock().expect("result slot") = Some(v);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .expect("result slot")
                .expect("every index ran")
        })
        .collect()
}

pub fn run_scenarios(list: &[Scenario], out: &Path, workers: usize) -> Vec<Outcome> {
    par_map(list.len(), workers, |i| match run_scenario(&list[i], out) {
        Ok(r) => Outcome::Done(Box::new(r)),
        Err(error) => Outcome::Failed {
            name: list[i].name.clone(),
            error,
        },
    })
}

/// A property result or the error that stopped it.
#[derive(Debug)]
pub enum PropOutcome {
    Done(PropertyResult),
    Failed {
        name: &'static str,
        error: HarnessError,
    },
}

pub fn run_invariants(seed: u64, workers: usize) -> Vec<PropOutcome> {
    let checks = props::all(seed);
    par_map(checks.len(), workers, |i| match (checks[i].1)() {
        Ok(r) => PropOutcome::Done(r),
        Err(error) => PropOutcome::Failed {
            name: checks[i].0,
            error,
        },
    })
}

pub fn invariants_csv(results: &[PropOutcome]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["property", "cases", "max_defect", "tolerance", "status"])
        .expect("in-memory csv");
    for r in results {
        let rec = match r {
            PropOutcome::Done(p) => [
                p.name.to_string(),
                p.cases.to_string(),
                format!("{:.3e}", p.worst),
                format!("{:.0e}", p.tol),
                if p.passed() { "pass" } else { "fail" }.to_string(),
            ],
            PropOutcome::Failed { name, error } => {
                let stage = match error {
                    HarnessError::Stage { stage, .. } => stage.to_string(),
                    _ => "setup".into(),
                };
                [
                    name.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error:{stage}"),
                ]
            }
        };
        w.write_record(rec).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn invariants_table(results: &[PropOutcome]) -> String {
    let mut s = format!(
        "{:<34} {:>6} {:>11} {:>8}  status\n",
        "property", "cases", "max_defect", "tol"
    );
    for r in results {
        match r {
            PropOutcome::Done(p) => {
                s += &format!(
                    "{:<34} {:>6} {:>11.3e} {:>8.0e}  {}\n",
                    p.name,
                    p.cases,
                    p.worst,
                    p.tol,
                    if p.passed() { "pass" } else { "FAIL" }
                )
            }
            PropOutcome::Failed { name, error } => s += &format!("{name:<34} ERROR {error}\n"),
        }
    }
    s
}

#[derive(Debug, Default)]
pub struct SuiteReport {
    pub invariants: Vec<PropOutcome>,
    pub scenarios: Vec<Outcome>,
}

impl SuiteReport {
    /// 0 when everything passed, 2 when anything errored, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let errored = self
            .invariants
            .iter()
            .any(|r| matches!(r, PropOutcome::Failed { .. }))
            || self
                .scenarios
                .iter()
                .any(|o| matches!(o, Outcome::Failed { .. }));
        let passed = self
            .invariants
            .iter()
            .all(|r| matches!(r, PropOutcome::Done(p) if p.passed()))
            && self.scenarios.iter().all(Outcome::passed);
        if errored {
            2
        } else if passed {
            0
        } else {
            1
        }
    }
}

/// Runs the selected suite and writes `invariants.{csv,txt}` and/or `scenarios.{csv,txt}`.
pub fn run_suite(which: Which, out: &Path) -> Result<SuiteReport> {
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    let n = workers();
    let mut rep = SuiteReport::default();
    if which != Which::Scenarios {
        rep.invariants = run_invariants(DEFAULT_SEED, n);
        report::write_file(
            &out.join("invariants.csv"),
            &invariants_csv(&rep.invariants),
        )?;
        report::write_file(
            &out.join("invariants.txt"),
            &invariants_table(&rep.invariants),
        )?;
    }
    if which != Which::Invariants {
        rep.scenarios = run_scenarios(&catalog(), out, n);
        report::write_reports(out, "scenarios", &rep.scenarios)?;
    }
    Ok(rep)
}
