use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use darcyflow_bench::config::{ProblemKind, ProblemSpec};
use darcyflow_bench::run::{solve, sweep, write_run, write_sweep, RunOutcome};
use darcyflow_bench::{acceptance, BenchError, BenchResult};

#[derive(Parser)]
#[command(name = "darcyflow", version, about = "Generalized Darcy flow benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configured problem and write its artifacts.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Solve once per value of one parameter and write a summary table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the acceptance suite, or only the listed criteria.
    Verify { criteria: Vec<u8> },
    /// Print the built-in configuration of a problem.
    Preset { problem: ProblemKind },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    formulation: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    nele: Option<String>,
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
}

impl Overrides {
    fn apply(&self, spec: &mut ProblemSpec) -> BenchResult<()> {
        let pairs = [
            ("formulation", &self.formulation),
            ("model", &self.model),
            ("theta", &self.theta),
            ("weight", &self.weight),
            ("order", &self.order),
            ("nele", &self.nele),
            ("tol", &self.tol),
            ("out_dir", &self.out_dir),
        ];
        for (name, value) in pairs {
            if let Some(v) = value {
                spec.set(name, v)?;
            }
        }
        Ok(())
    }
}

fn load(config: &Path, overrides: &Overrides) -> BenchResult<ProblemSpec> {
    let mut spec = ProblemSpec::load(config)?;
    overrides.apply(&mut spec)?;
    Ok(spec)
}

fn out_dir(spec: &ProblemSpec) -> PathBuf {
    spec.output
        .dir
        .as_ref()
        .map_or_else(|| PathBuf::from("out").join(spec.kind().to_string()), PathBuf::from)
}

fn summary(o: &RunOutcome) -> String {
    let s = &o.scalars;
    let mut parts = vec![format!("{} iterations", o.report.iterations)];
    if let Some(p) = s.p_injection {
        parts.push(format!("p_injection {p:.6}"));
    }
    if let Some(q) = s.flux {
        parts.push(format!("flux {q:.6}"));
    }
    if let Some(r) = s.max_mass_ratio {
        parts.push(format!("max mass ratio {r:.3e}"));
    }
    if let Some(e) = &s.errors {
        parts.push(format!("velocity L2 {:.3e} pressure L2 {:.3e}", e.velocity_l2, e.pressure_l2));
    }
    parts.push(format!("dissipation {:.6}", s.dissipation));
    parts.join(", ")
}

fn execute(command: Command) -> BenchResult<bool> {
    match command {
        Command::Run { config, overrides } => {
            let spec = load(&config, &overrides)?;
            let outcome = solve(&spec)?;
            println!("{}", summary(&outcome));
            for path in write_run(&outcome, &out_dir(&spec))? {
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Sweep {
            config,
            param,
            values,
            overrides,
        } => {
            let spec = load(&config, &overrides)?;
            let outcomes = sweep(&spec, &param, &values)?;
            for (value, o) in values.iter().zip(&outcomes) {
                match o {
                    Ok(o) => println!("{param} = {value}: {}", summary(o)),
                    Err(e) => println!("{param} = {value}: {e}"),
                }
            }
            for path in write_sweep(&spec, &outcomes, &out_dir(&spec))? {
                println!("wrote {}", path.display());
            }
            match outcomes.into_iter().find_map(Result::err) {
                Some(e) => Err(e),
                None => Ok(true),
            }
        }
        Command::Verify { criteria } => {
            let ids = if criteria.is_empty() { (1..=9).collect() } else { criteria };
            if let Some(bad) = ids.iter().find(|id| !(1..=9).contains(*id)) {
                return Err(BenchError::config(format!("there is no criterion {bad}")));
            }
            let mut all = true;
            for id in ids {
                let o = acceptance::run(id);
                println!("{} {} {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.title);
                for line in &o.details {
                    println!("    {line}");
                }
                all &= o.passed;
            }
            Ok(all)
        }
        Command::Preset { problem } => {
            print!("{}", ProblemSpec::preset(problem).to_toml());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
