use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qmct::pipeline::checks::verify_instance;
use qmct::pipeline::generate::{generate, GeneratorParams};
use qmct::pipeline::instance::{read_network, InstanceFile};
use qmct::pipeline::report::ReportJson;
use qmct::{solve, Mode, Network, SolveError, SolveOptions};

const EXIT_FAILURE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_HORIZON: u8 = 4;

#[derive(Parser)]
#[command(name = "qmct", version, about = "Quickest minimum cost transshipments over time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    QuickestMincost,
    Quickest,
    MincostStatic,
    Oracle,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::QuickestMincost => Mode::QuickestMincost,
            ModeArg::Quickest => Mode::Quickest,
            ModeArg::MincostStatic => Mode::MincostStatic,
            ModeArg::Oracle => Mode::Oracle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "quickest-mincost")]
        mode: ModeArg,
        /// Include the per-arc inflow schedule.
        #[arg(long)]
        emit_schedule: bool,
        /// Give up on horizons beyond this many grid steps.
        #[arg(long)]
        max_horizon: Option<u64>,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
        /// Record node stock per grid step (implies --emit-schedule).
        #[arg(long)]
        storage_trace: bool,
    },
    /// Solve and cross-check against the oracle and structural invariants.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write a random instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        terminals: usize,
        #[arg(long, default_value_t = 3)]
        tau_max: i64,
        /// Allow negative costs on an acyclic network.
        #[arg(long)]
        negative_costs: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(file: &PathBuf) -> Result<Network, ExitCode> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        ExitCode::from(EXIT_FAILURE)
    })?;
    read_network(&text).map_err(|e| {
        eprintln!("error: {}: {e}", file.display());
        ExitCode::from(EXIT_INVALID)
    })
}

fn fail(network: &Network, error: SolveError) -> ExitCode {
    match error {
        SolveError::Validation(report) => {
            for v in &report.violations {
                eprintln!("invalid: {}", describe(network, v));
            }
            ExitCode::from(EXIT_INVALID)
        }
        SolveError::Infeasible(msg) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        e @ SolveError::HorizonGuard { .. } => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_HORIZON)
        }
        e => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn describe(network: &Network, v: &qmct::netcore::Violation) -> String {
    use qmct::netcore::Violation;
    let arc = |a: &qmct::ArcId| {
        let d = network.arc(*a);
        format!("arc {} ({} -> {})", a.0, network.name(d.tail), network.name(d.head))
    };
    match v {
        Violation::NonPositiveCapacity { arc: a } => format!("{} has non-positive capacity", arc(a)),
        Violation::NegativeTransit { arc: a } => format!("{} has negative transit time", arc(a)),
        Violation::SelfLoop { arc: a } => format!("{} is a self-loop", arc(a)),
        other => other.to_string(),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve {
            file,
            mode,
            emit_schedule,
            max_horizon,
            json,
            text,
            storage_trace,
        } => {
            let network = match load(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            let options = SolveOptions {
                max_horizon,
                storage_trace,
                ..SolveOptions::default()
            };
            match solve(&network, mode.into(), &options) {
                Ok(report) => {
                    let out = ReportJson::new(&network, &report, emit_schedule || storage_trace);
                    if json || !text {
                        emit(&(out.to_json() + "\n"));
                    } else {
                        emit(&out.to_text());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&network, e),
            }
        }
        Command::Verify { file, json } => {
            let network = match load(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            match verify_instance(&network, &SolveOptions::default(), 10) {
                Ok(v) => {
                    if json {
                        emit(&(serde_json::to_string_pretty(&v.checks).expect("checks serialize") + "\n"));
                    } else {
                        let lines: String = v
                            .checks
                            .iter()
                            .map(|(name, ok)| format!("{:<28} {}\n", name, if *ok { "ok" } else { "FAILED" }))
                            .collect();
                        emit(&lines);
                    }
                    if v.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAILURE)
                    }
                }
                Err(e) => fail(&network, e),
            }
        }
        Command::Generate {
            seed,
            nodes,
            terminals,
            tau_max,
            negative_costs,
            out,
        } => {
            if nodes < 2 {
                eprintln!("error: need at least two nodes");
                return ExitCode::from(EXIT_FAILURE);
            }
            let params = GeneratorParams {
                nodes,
                terminals,
                tau_max,
                negative_costs,
                ..GeneratorParams::default()
            };
            let text = InstanceFile::from_network(&generate::<qmct::Rational>(seed, &params)).to_json();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_FAILURE);
                    }
                }
                None => emit(&(text + "\n")),
            }
            ExitCode::SUCCESS
        }
    }
}
