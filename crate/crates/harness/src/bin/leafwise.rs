use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use leafwise_harness::report::{self, Outcome};
use leafwise_harness::{catalog, load_scenario, run_scenario, run_suite, Which};

#[derive(Parser)]
#[command(
    name = "leafwise",
    about = "Run index-pairing scenarios and property suites"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Invariants,
    Scenarios,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario file or builtin.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the pairing tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the property suite, the builtin scenarios, or both.
    Suite {
        #[arg(long, value_enum)]
        which: SuiteArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the builtin catalog.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::List => {
            for s in catalog() {
                println!("{}", s.name);
            }
            0
        }
        Cmd::Run {
            scenario,
            out,
            tol,
            seed,
        } => {
            let mut s = match load_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(t) = tol {
                s.tolerances.pairing_tol = t;
            }
            if let Some(v) = seed {
                s.seed = v;
            }
            let outcome = match run_scenario(&s, &out) {
                Ok(r) => Outcome::Done(Box::new(r)),
                Err(error) => Outcome::Failed {
                    name: s.name.clone(),
                    error,
                },
            };
            let outcomes = [outcome];
            if let Err(e) = report::write_reports(&out, &s.name, &outcomes) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            print!("{}", report::table_string(&outcomes));
            match &outcomes[0] {
                Outcome::Failed { error, .. } => {
                    eprintln!("error: {error}");
                    2
                }
                o if o.passed() => 0,
                _ => 1,
            }
        }
        Cmd::Suite { which, out } => {
            let which = match which {
                SuiteArg::Invariants => Which::Invariants,
                SuiteArg::Scenarios => Which::Scenarios,
                SuiteArg::All => Which::All,
            };
            match run_suite(which, &out) {
                Ok(rep) => {
                    let files: &[&str] = match which {
                        Which::Invariants => &["invariants.txt"],
                        Which::Scenarios => &["scenarios.txt"],
                        Which::All => &["invariants.txt", "scenarios.txt"],
                    };
                    for f in files {
                        if let Ok(t) = std::fs::read_to_string(out.join(f)) {
                            print!("{t}");
                        }
                    }
                    rep.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
