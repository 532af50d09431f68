//! `isoperc`: sample percolation configurations, solve for the Cheeger
//! constant, and run experiments. All file I/O in the workspace lives here.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or malformed input,
//! 3 solver guard violation, 4 undefined phi. Failures print one JSON line
//! on stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use isoperc_core::experiments::run_experiment;
use isoperc_core::formats::{self, ResultRecord};
use isoperc_core::{
    cheeger, epsilon_n, giant_component, iso_profile, sample_configuration, Error, EventConstants,
    FlipAnalysis, Method, ProfileMode, TorusSpec,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "isoperc",
    version,
    about = "Cheeger constants of percolation clusters on the torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Bernoulli bond configuration.
    Sample {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cheeger constant of the giant component.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-edge gradient of phi as CSV.
    Gradient {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the typicality events.
    Events {
        #[arg(long = "in")]
        input: PathBuf,
        /// Constants file; the shipped defaults when omitted.
        #[arg(long)]
        constants: Option<PathBuf>,
        #[command(flatten)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isoperimetric profile at a given epsilon.
    Profile {
        #[arg(long = "in")]
        input: PathBuf,
        /// `auto` for eps(n), or a real number above 1.
        #[arg(long, default_value = "auto")]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment plan.
    Experiment {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct ModeArg {
    /// Solver: brute, exact or heuristic.
    #[arg(long, default_value = "exact", conflicts_with_all = ["brute", "exact", "heuristic"])]
    mode: Method,
    #[arg(long, hide = true)]
    brute: bool,
    #[arg(long, hide = true)]
    exact: bool,
    #[arg(long, hide = true)]
    heuristic: bool,
}

impl ModeArg {
    fn get(&self) -> Method {
        if self.brute {
            Method::Brute
        } else if self.exact {
            Method::Exact
        } else if self.heuristic {
            Method::Heuristic
        } else {
            self.mode
        }
    }
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::PhiUndefined { .. }) => 4,
            Failure::Core(Error::Guard { .. } | Error::BudgetExceeded { .. }) => 3,
            Failure::Core(
                Error::Parse(_)
                | Error::InvalidTorus { .. }
                | Error::TorusTooLarge { .. }
                | Error::InvalidProbability(_)
                | Error::InvalidEpsilon(_),
            ) => 2,
            _ => 1,
        }
    }

    fn json(&self) -> serde_json::Value {
        let code = self.exit_code();
        match self {
            Failure::Core(e) => {
                let mut v = json!({"error": e.kind(), "message": e.to_string(), "exit_code": code});
                if let Error::Guard { what, value, limit } = e {
                    v["guard"] = json!({"what": what, "value": value, "limit": limit});
                }
                v
            }
            Failure::Io(path, e) => json!({
                "error": "io",
                "message": format!("{}: {e}", path.display()),
                "exit_code": code,
            }),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e)),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Sample { d, n, p, seed, out } => {
            let spec = TorusSpec::new(d, n)?;
            let omega = sample_configuration(spec, p, seed)?;
            let text = formats::write_config(&omega, &[format!("p={p} seed={seed}")]);
            emit(out.as_deref(), &text)
        }
        Command::Solve { input, mode, out } => {
            let cfg = formats::parse_config(&read(&input)?)?;
            let start = Instant::now();
            let giant = giant_component(&cfg.omega);
            let result = cheeger(&cfg.omega, &giant, mode.get())?;
            let record = ResultRecord::from_solve(
                &result,
                cfg.omega.spec(),
                giant.size(),
                cfg.comment_value("p").and_then(|v| v.parse().ok()),
                cfg.comment_value("seed").and_then(|v| v.parse().ok()),
                start.elapsed().as_secs_f64() * 1e3,
            );
            emit(out.as_deref(), &(record.to_json_line() + "\n"))
        }
        Command::Gradient { input, mode, out } => {
            let cfg = formats::parse_config(&read(&input)?)?;
            let analysis = FlipAnalysis::compute(&cfg.omega, mode.get())?;
            if analysis.base.is_none() {
                return Err(Error::PhiUndefined {
                    giant_size: analysis.giant_size,
                }
                .into());
            }
            emit(out.as_deref(), &formats::gradient_csv(analysis.gradients()))
        }
        Command::Events {
            input,
            constants,
            mode,
            out,
        } => {
            let cfg = formats::parse_config(&read(&input)?)?;
            let k = match constants {
                Some(path) => EventConstants::parse(&read(&path)?)?,
                None => EventConstants::default(),
            };
            let report = FlipAnalysis::compute(&cfg.omega, mode.get())?.events(&k);
            emit(out.as_deref(), &pretty(&report))
        }
        Command::Profile {
            input,
            epsilon,
            out,
        } => {
            let cfg = formats::parse_config(&read(&input)?)?;
            let eps = match epsilon.as_str() {
                "auto" => epsilon_n(cfg.omega.spec())?,
                s => s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad epsilon {s:?}")))?,
            };
            let giant = giant_component(&cfg.omega);
            let result = iso_profile(&cfg.omega, &giant, eps, ProfileMode::Exact)?;
            emit(out.as_deref(), &pretty(&result))
        }
        Command::Experiment { plan, out_dir } => {
            let plan = formats::parse_plan(&read(&plan)?)?;
            let output = run_experiment(&plan)?;
            fs::create_dir_all(&out_dir).map_err(|e| Failure::Io(out_dir.clone(), e))?;
            let write = |name: &str, text: String| {
                let path = out_dir.join(name);
                fs::write(&path, text).map_err(|e| Failure::Io(path, e))
            };
            let mut jsonl = String::new();
            for r in &output.records {
                jsonl.push_str(&ResultRecord::from_sample(r).to_json_line());
                jsonl.push('\n');
            }
            write("records.jsonl", jsonl)?;
            write("summary.csv", formats::summary_csv(&output.summaries))?;
            write("summary.json", pretty(&output.summaries))?;
            write("plan.txt", formats::write_plan(&plan))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("usage error")
                .trim_start_matches("error: ");
            eprintln!(
                "{}",
                json!({"error": "usage", "message": first, "exit_code": 2})
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.json());
            ExitCode::from(f.exit_code())
        }
    }
}
