use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geomds_cli::commands::{
    parse_gen_target, parse_scheme, run_distances, run_embed, run_gen, run_trajectory, summarize,
    DistancesOpts, EmbedOpts, GenOpts, InputSource, TrajectoryOpts,
};
use geomds_cli::error::{CliError, Result};
use geomds_cli::Format;

/// Geodesic distance matrices on matrix manifolds and stress-based MDS maps.
#[derive(Parser)]
#[command(name = "geomds", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a dataset into R^2 or R^3 by weighted-stress MDS.
    Embed(EmbedArgs),
    /// Generate and embed a convergent trajectory on SO(q).
    Trajectory(TrajectoryArgs),
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Compute a distance matrix without embedding.
    Distances(DistancesArgs),
}

#[derive(Args)]
struct EmbedArgs {
    /// Distance-matrix CSV or manifold-point JSON.
    #[arg(long, required_unless_present = "demo")]
    input: Option<PathBuf>,
    /// Input format override (inferred from the extension by default).
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Use a bundled demo dataset instead of --input.
    #[arg(long, value_parser = ["cities"])]
    demo: Option<String>,
    /// Weighting scheme.
    #[arg(long, default_value = "dkm", value_parser = ["kruskal", "sammon", "dkm"])]
    scheme: String,
    /// Target dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Seed for the random initial guess (and for --init-perturb noise).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start from the coordinates in this CSV instead of a random guess.
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// Add seeded Gaussian noise of this scale to the initial guess.
    #[arg(long)]
    init_perturb: Option<f64>,
    /// Outer iteration cap.
    #[arg(long, default_value_t = geomds::solver::DEFAULT_OUTER_MAX)]
    outer_max: usize,
    /// Relative stress-decrease tolerance for outer termination.
    #[arg(long, default_value_t = geomds::solver::DEFAULT_OUTER_TOL)]
    tol: f64,
    /// Directory for coords.csv, trace.csv, dist_in.csv, dist_out.csv and
    /// figure.svg.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TrajectoryArgs {
    /// Rotation-group size parameter.
    #[arg(long, default_value_t = 9)]
    q: usize,
    /// Walk length before down-sampling.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Number of points kept for the embedding.
    #[arg(long, default_value_t = 20)]
    downsample: usize,
    /// Geodesic length of the first step.
    #[arg(long, default_value_t = 0.5)]
    step_scale: f64,
    /// Per-step geometric decay of the step length, in (0, 1].
    #[arg(long, default_value_t = 0.97)]
    decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target dimension.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value = "dkm", value_parser = ["kruskal", "sammon", "dkm"])]
    scheme: String,
    #[arg(long, default_value_t = geomds::solver::DEFAULT_OUTER_MAX)]
    outer_max: usize,
    #[arg(long, default_value_t = geomds::solver::DEFAULT_OUTER_TOL)]
    tol: f64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// so, sphere, spd, su or planar.
    #[arg(long)]
    manifold: String,
    /// Size parameter: matrix size, vector length or planar dimension.
    #[arg(long)]
    q: usize,
    /// Number of points.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file: points JSON for manifolds, coordinate CSV for planar.
    #[arg(long)]
    out: PathBuf,
    /// Also write the pairwise distance matrix to this CSV.
    #[arg(long)]
    out_dist: Option<PathBuf>,
}

#[derive(Args)]
struct DistancesArgs {
    /// Manifold-point JSON (or distance CSV, which is passed through).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_format(s: &Option<String>) -> Option<Format> {
    s.as_deref().map(|f| match f {
        "csv" => Format::DistanceCsv,
        _ => Format::PointsJson,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Embed(args) => {
            let input = match (&args.demo, &args.input) {
                (Some(_), _) => InputSource::Cities,
                (None, Some(path)) => InputSource::File {
                    path: path.clone(),
                    format: parse_format(&args.format),
                },
                (None, None) => {
                    return Err(CliError::Usage("either --input or --demo is required".into()))
                }
            };
            let opts = EmbedOpts {
                input,
                scheme: parse_scheme(&args.scheme)?,
                dim: args.dim,
                seed: args.seed,
                init_file: args.init_file.clone(),
                init_perturb: args.init_perturb,
                outer_max: args.outer_max,
                tol: args.tol,
                out_dir: Some(args.out_dir.clone()),
            };
            let report = run_embed(&opts)?;
            println!("{}", summarize(&report));
            println!("wrote {}", args.out_dir.display());
            Ok(())
        }
        Command::Trajectory(args) => {
            let opts = TrajectoryOpts {
                q: args.q,
                steps: args.steps,
                downsample: args.downsample,
                step_scale: args.step_scale,
                decay: args.decay,
                seed: args.seed,
                dim: args.dim,
                scheme: parse_scheme(&args.scheme)?,
                outer_max: args.outer_max,
                tol: args.tol,
                out_dir: Some(args.out_dir.clone()),
            };
            let report = run_trajectory(&opts)?;
            println!("{}", summarize(&report));
            println!("wrote {}", args.out_dir.display());
            Ok(())
        }
        Command::Gen(args) => {
            let opts = GenOpts {
                target: parse_gen_target(&args.manifold, args.q)?,
                n: args.n,
                seed: args.seed,
                out: args.out.clone(),
                out_dist: args.out_dist.clone(),
            };
            run_gen(&opts)?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
        Command::Distances(args) => {
            let opts = DistancesOpts {
                input: args.input.clone(),
                format: parse_format(&args.format),
                out: args.out.clone(),
            };
            run_distances(&opts)?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
