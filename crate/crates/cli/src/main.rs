//! `frostgrid` command-line front end.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 infeasible, 4 limit reached without
//! a solution, 5 internal or numeric error.

mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frostgrid::GridParams;

#[derive(Debug, Parser)]
#[command(name = "frostgrid", version, about = "Heater layouts and pipe networks for orchard frost protection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a grid orchard instance (defaults: 180 m x 120 m reference orchard).
    Generate(GenerateArgs),
    /// Optimise the heater layout with the built-in MILP solver.
    Solve(SolveArgs),
    /// Build the partition-based baseline plan.
    Heuristic(HeuristicArgs),
    /// Solve once per alpha and write the Pareto CSV.
    Sweep(SweepArgs),
    /// Enumerate every k-subset of candidate sites for the exact optimum.
    Oracle(OracleArgs),
    /// Report the objective decomposition and violations of a plan.
    Evaluate(EvaluateArgs),
    /// Draw an instance and optionally a plan as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = GridParams::default().length_m)]
    length: f64,
    #[arg(long, default_value_t = GridParams::default().width_m)]
    width: f64,
    #[arg(long, default_value_t = GridParams::default().tree_spacing_m)]
    tree_spacing: f64,
    #[arg(long, default_value_t = GridParams::default().site_spacing_m)]
    site_spacing: f64,
    #[arg(long, default_value_t = GridParams::default().cp_spacing_m)]
    cp_spacing: f64,
    /// Number of heaters.
    #[arg(long, default_value_t = GridParams::default().k)]
    k: usize,
    /// Minimum heater-to-tree distance in meters.
    #[arg(long, default_value_t = GridParams::default().d_ht_m)]
    d_ht: f64,
    #[arg(long, default_value_t = GridParams::default().f_lo)]
    f_lo: f64,
    #[arg(long, default_value_t = GridParams::default().f_hi)]
    f_hi: f64,
    #[arg(long, default_value_t = GridParams::default().ku_lo)]
    ku_lo: f64,
    #[arg(long, default_value_t = GridParams::default().ku_hi)]
    ku_hi: f64,
    /// Heat decay rate per meter.
    #[arg(long, default_value_t = GridParams::default().k_tun)]
    k_tun: f64,
    #[arg(long, default_value_t = GridParams::default().alpha)]
    alpha: f64,
    #[arg(long, default_value_t = GridParams::default().beta1_nor)]
    beta1: f64,
    #[arg(long, default_value_t = GridParams::default().beta2_nor)]
    beta2: f64,
    #[arg(long)]
    out: PathBuf,
}

impl GenerateArgs {
    fn params(&self) -> GridParams {
        GridParams {
            length_m: self.length,
            width_m: self.width,
            tree_spacing_m: self.tree_spacing,
            site_spacing_m: self.site_spacing,
            cp_spacing_m: self.cp_spacing,
            k: self.k,
            d_ht_m: self.d_ht,
            f_lo: self.f_lo,
            f_hi: self.f_hi,
            ku_lo: self.ku_lo,
            ku_hi: self.ku_hi,
            k_tun: self.k_tun,
            alpha: self.alpha,
            beta1_nor: self.beta1,
            beta2_nor: self.beta2,
        }
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Relative optimality gap at which to stop.
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    /// Branch-and-bound worker threads.
    #[arg(long, env = "FROSTGRID_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Maximum number of branch-and-bound nodes.
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Plan file to write.
    #[arg(long, required_unless_present = "export_mps")]
    out: Option<PathBuf>,
    /// Override the instance's alpha.
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the model in MPS format; without --out nothing is solved.
    #[arg(long)]
    export_mps: Option<PathBuf>,
    /// Build the plan from an external solution file instead of solving.
    #[arg(long, requires = "out")]
    import_solution: Option<PathBuf>,
    /// Also write the solver's variable values as a solution file.
    #[arg(long, conflicts_with = "import_solution")]
    save_solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HeuristicArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Move heaters to their nearest free candidate sites.
    #[arg(long)]
    snap: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,5,10,100,1000")]
    alphas: Vec<f64>,
    /// Pareto CSV to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    /// Monte Carlo draws of the heater output factors.
    #[arg(long, default_value_t = frostgrid::evaluation::DEFAULT_DRAWS)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Plan to draw; without it only the orchard is drawn.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 900)]
    width_px: u32,
    #[arg(long, default_value_t = 700)]
    height_px: u32,
    #[arg(long, default_value_t = 30)]
    margin_px: u32,
    #[arg(long)]
    no_trees: bool,
    #[arg(long)]
    no_sites: bool,
    #[arg(long)]
    no_check_points: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Heuristic(a) => commands::heuristic(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Render(a) => commands::render(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit::code_for(&err))
        }
    }
}
