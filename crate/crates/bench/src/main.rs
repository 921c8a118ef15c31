use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubic_minimax_bench::compare::{compare_report, write_member_outputs};
use cubic_minimax_bench::config::{ConfigBuilder, Origin, RunConfig};
use cubic_minimax_bench::experiment::run_experiment;
use cubic_minimax_bench::HarnessError;

#[derive(Parser)]
#[command(name = "minimax-bench", about = "Run and compare convex-concave minimax solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its CSV trace, instance and summary.
    Run(Box<RunArgs>),
    /// Run several configurations on the same problem and tabulate them.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key=value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    b_seed: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    h0: Option<String>,
    #[arg(long)]
    m0: Option<String>,
    #[arg(long)]
    d0: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    rho_known: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    grad_tol: Option<String>,
    #[arg(long)]
    max_outer: Option<String>,
    #[arg(long)]
    max_inner_iters: Option<String>,
    #[arg(long)]
    warm_start_m: Option<String>,
    /// CSV output path (default: $MINIMAX_OUT_DIR/<algo>-n<n>-rho<rho>-seed<seed>.csv).
    #[arg(long)]
    trace: Option<String>,
    /// outer, inner or all.
    #[arg(long)]
    granularity: Option<String>,
    #[arg(long)]
    trace_stride: Option<String>,
}

impl RunArgs {
    fn pairs(&self) -> [(&'static str, &Option<String>); 22] {
        [
            ("algo", &self.algo),
            ("problem", &self.problem),
            ("n", &self.n),
            ("rho", &self.rho),
            ("instance", &self.instance),
            ("b_seed", &self.b_seed),
            ("seed", &self.seed),
            ("c", &self.c),
            ("h0", &self.h0),
            ("m0", &self.m0),
            ("d0", &self.d0),
            ("eta", &self.eta),
            ("rho_known", &self.rho_known),
            ("eps", &self.eps),
            ("max_iters", &self.max_iters),
            ("grad_tol", &self.grad_tol),
            ("max_outer", &self.max_outer),
            ("max_inner_iters", &self.max_inner_iters),
            ("warm_start_m", &self.warm_start_m),
            ("trace", &self.trace),
            ("granularity", &self.granularity),
            ("trace_stride", &self.trace_stride),
        ]
    }

    fn build(&self) -> Result<RunConfig, HarnessError> {
        let mut b = ConfigBuilder::new();
        if let Some(path) = &self.config {
            b.read_file(path)?;
        }
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                b.set(key, v, Origin::Flag)?;
            }
        }
        Ok(b.build()?)
    }
}

#[derive(Args)]
struct CompareArgs {
    /// Two or more key=value configuration files.
    #[arg(required = true)]
    configs: Vec<PathBuf>,
    /// Comparison table path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write each member's CSV trace, instance and summary.
    #[arg(long)]
    write_traces: bool,
}

fn run(args: &RunArgs) -> Result<bool, HarnessError> {
    let config = args.build()?;
    let (result, written) = run_experiment(&config)?;
    print!("{}", result.summary);
    println!("trace={}", written.csv.display());
    Ok(!result.summary.failed)
}

fn compare(args: &CompareArgs) -> Result<bool, HarnessError> {
    let configs = args
        .configs
        .iter()
        .map(|path| {
            let mut b = ConfigBuilder::new();
            b.read_file(path)?;
            Ok(b.build()?)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let report = compare_report(&configs)?;
    if args.write_traces {
        write_member_outputs(&configs, &report)?;
    }
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            report
                .write_csv(BufWriter::new(file))
                .map_err(|source| HarnessError::Csv { path: path.clone(), source })?;
        }
        None => report.write_csv(std::io::stdout().lock()).map_err(|source| HarnessError::Csv {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    for e in &report.entries {
        eprintln!("{}: {}", e.label, e.result.summary.status);
    }
    Ok(report.entries.iter().all(|e| !e.result.summary.failed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
