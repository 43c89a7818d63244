mod commands;
mod failure;
mod report;
mod statefile;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermi_ent::oracle::SearchBudget;
use fermi_ent::Parity;

use commands::{Mixture, Suite};
use failure::Failure;
use report::{to_structured, AnalyzeOptions};
use statefile::{Loaded, StateFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SectorArg {
    Even,
    Odd,
}

/// Entanglement analysis of fermionic states of definite number parity.
#[derive(Parser, Debug)]
#[command(name = "fermi-ent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads for oracle sampling (default: all cores).
    #[arg(long, global = true, env = "FERMI_ENT_THREADS")]
    threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    /// Random samples per oracle search.
    #[arg(long, default_value_t = 5000)]
    budget: usize,
    /// Refinement sweeps per refined sample.
    #[arg(long, default_value_t = 300)]
    refine: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget::new(self.budget, self.refine, self.seed)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report every entanglement measure of a state file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Split a density matrix with weight in both parity sectors.
        #[arg(long)]
        split: bool,
        /// Also run the numerical oracle and report its gap.
        #[arg(long)]
        oracle: bool,
        /// Include the optimal decomposition of four-mode density matrices.
        #[arg(long)]
        decomposition: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Concurrence and entanglement of formation along a mixing curve.
    SweepWerner {
        /// Sector of the built-in maximally entangled state.
        #[arg(long, value_enum, default_value_t = SectorArg::Odd)]
        parity: SectorArg,
        /// Four-mode pure state file used instead of the built-in state.
        #[arg(long)]
        pure_state: Option<PathBuf>,
        #[arg(long, default_value = "0:1:0.1")]
        grid: String,
        #[arg(long, value_enum, default_value_t = Mixture::Werner)]
        mixture: Mixture,
        /// Add the convex-roof oracle curve.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run property suites and print per-property margins.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Also check the identities of this state file.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Build the quasiparticle vacuum of a Bogoliubov map.
    Thouless {
        /// JSON list of rows of `[re, im]` pairs.
        #[arg(long)]
        u_matrix: PathBuf,
        #[arg(long)]
        v_matrix: PathBuf,
        /// Write the vacuum as a state file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .map_err(|e| Failure::io(format!("cannot write output: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { input, split, oracle, decomposition, budget } => {
            let state = StateFile::read(&input)?.load()?;
            let opts = AnalyzeOptions { split, oracle: oracle.then(|| budget.budget()), decomposition };
            if let Some(b) = &opts.oracle {
                b.validate()?;
            }
            let report = report::analyze(&state, &opts)?;
            emit(&match cli.format {
                Format::Table => report::render_table(&report),
                Format::Structured => to_structured(&report),
            })?;
            if !report.all_checks_pass() {
                return Err(Failure::invariant("a reported identity exceeds its tolerance"));
            }
            Ok(())
        }
        Command::SweepWerner { parity, pure_state, grid, mixture, oracle, budget } => {
            let psi = match pure_state {
                Some(path) => match StateFile::read(&path)?.load()? {
                    Loaded::Pure(s) => s,
                    Loaded::Mixed(_) => return Err(Failure::schema("--pure-state needs a pure state file")),
                },
                None => commands::max_entangled(match parity {
                    SectorArg::Even => Parity::Even,
                    SectorArg::Odd => Parity::Odd,
                }),
            };
            let grid = commands::parse_grid(&grid)?;
            let b = budget.budget();
            if oracle {
                b.validate()?;
            }
            let sweep = commands::sweep_werner(&psi, mixture, &grid, oracle.then_some(&b))?;
            emit(&match cli.format {
                Format::Table => commands::render_sweep(&sweep),
                Format::Structured => to_structured(&sweep),
            })
        }
        Command::Verify { suite, input, budget } => {
            let b = budget.budget();
            b.validate()?;
            let results = commands::verify(suite, &b, input.as_deref())?;
            emit(&match cli.format {
                Format::Table => commands::render_verify(&results),
                Format::Structured => to_structured(&results),
            })?;
            let failed = results.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(Failure::invariant(format!("{failed} properties failed")));
            }
            Ok(())
        }
        Command::Thouless { u_matrix, v_matrix, output } => {
            let u = commands::read_matrix(&u_matrix)?;
            let v = commands::read_matrix(&v_matrix)?;
            let vac = commands::thouless(u, v)?;
            if let Some(path) = &output {
                std::fs::write(path, vac.file.to_json() + "\n")
                    .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
            }
            let opts = AnalyzeOptions { split: false, oracle: None, decomposition: false };
            let mut report = report::analyze(&Loaded::Pure(vac.state), &opts)?;
            report.checks.push(report::Check {
                name: "rho_sp = V V^dagger".into(),
                residual: vac.sp_defect,
                tolerance: 1e-9,
                ok: vac.sp_defect <= 1e-9,
            });
            match cli.format {
                Format::Table => {
                    if output.is_none() {
                        emit(&vac.file.to_json())?;
                    }
                    emit(&report::render_table(&report))?;
                }
                Format::Structured => {
                    let both = serde_json::json!({ "state": vac.file, "report": report });
                    emit(&to_structured(&both))?;
                }
            }
            if !report.all_checks_pass() {
                return Err(Failure::invariant("a reported identity exceeds its tolerance"));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    match fermi_ent::par::with_threads(threads, || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
