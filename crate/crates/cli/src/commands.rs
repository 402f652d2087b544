//! Implementations behind the CLI subcommands. Each takes a plain options
//! struct so the behavior is testable without spawning a process.

use std::path::{Path, PathBuf};

use geomds::stress::{make_weights, Configuration, DistanceMatrix, WeightVariant};
use geomds::{embed, geodesic_walk, pairwise_distances, random_point, Init, ManifoldKind,
    ManifoldPoint, SolverConfig};

use crate::dataio::{self, load_coords, load_dataset, Dataset, Format, RunReport};
use crate::error::{CliError, Result};

/// The bundled 9-city demo: the classic table of straight-line (flying)
/// mileages between U.S. cities used throughout the MDS literature.
pub const CITIES_CSV: &str = include_str!("../data/us_cities.csv");

pub fn cities_dataset() -> Result<Dataset> {
    let (labels, distances) =
        dataio::parse_distance_csv(Path::new("<bundled us_cities.csv>"), CITIES_CSV)?;
    Ok(Dataset::RawDistances { labels, distances })
}

#[derive(Clone, Debug)]
pub enum InputSource {
    File { path: PathBuf, format: Option<Format> },
    /// The bundled city-distance demo table.
    Cities,
}

impl InputSource {
    fn load(&self) -> Result<Dataset> {
        match self {
            InputSource::File { path, format } => load_dataset(path, *format),
            InputSource::Cities => cities_dataset(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EmbedOpts {
    pub input: InputSource,
    pub scheme: WeightVariant,
    pub dim: usize,
    pub seed: u64,
    /// Start from these coordinates instead of a random guess.
    pub init_file: Option<PathBuf>,
    /// Gaussian noise of this scale added to the initial guess (seeded).
    pub init_perturb: Option<f64>,
    pub outer_max: usize,
    pub tol: f64,
    pub out_dir: Option<PathBuf>,
}

impl EmbedOpts {
    pub fn new(input: InputSource) -> Self {
        Self {
            input,
            scheme: WeightVariant::Dkm,
            dim: 2,
            seed: 0,
            init_file: None,
            init_perturb: None,
            outer_max: geomds::solver::DEFAULT_OUTER_MAX,
            tol: geomds::solver::DEFAULT_OUTER_TOL,
            out_dir: None,
        }
    }
}

/// Loads the dataset, builds weights, runs the embedding and (optionally)
/// writes the report files.
pub fn run_embed(opts: &EmbedOpts) -> Result<RunReport> {
    let dataset = opts.input.load()?;
    let labels = dataset.labels().to_vec();
    let distances = dataset.to_distances()?;
    let weights = make_weights(opts.scheme.clone(), &distances)?;

    let mut init = match &opts.init_file {
        None => Init::Random {
            seed: opts.seed,
            scale: None,
        },
        Some(path) => {
            let (init_labels, coords) = load_coords(path)?;
            if init_labels != labels {
                return Err(CliError::Invalid {
                    path: path.clone(),
                    msg: "initial-guess labels do not match the dataset labels".to_string(),
                });
            }
            Init::Given(coords)
        }
    };
    if let Some(scale) = opts.init_perturb {
        let base = match init {
            Init::Given(z) => z,
            Init::Random { seed, scale: s } => {
                let sc = s.unwrap_or_else(|| {
                    let m = distances.mean_off_diagonal() / (opts.dim as f64).sqrt();
                    if m > 0.0 {
                        m
                    } else {
                        1.0
                    }
                });
                Configuration::random(distances.n(), opts.dim, sc, seed)
            }
        };
        init = Init::Given(base.perturbed(scale, opts.seed.wrapping_add(1)));
    }

    let cfg = SolverConfig {
        p: opts.dim,
        outer_max: opts.outer_max,
        outer_tol: opts.tol,
        init,
        ..SolverConfig::default()
    };
    let result = embed(&distances, &weights, &cfg)?;
    let report = RunReport::new(
        labels,
        result.coords,
        result.trace,
        distances,
        result.outer_iterations,
        result.converged,
    );
    if let Some(dir) = &opts.out_dir {
        report.write_files(dir)?;
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct TrajectoryOpts {
    pub q: usize,
    pub steps: usize,
    pub downsample: usize,
    pub step_scale: f64,
    pub decay: f64,
    pub seed: u64,
    pub dim: usize,
    pub scheme: WeightVariant,
    pub outer_max: usize,
    pub tol: f64,
    pub out_dir: Option<PathBuf>,
}

impl Default for TrajectoryOpts {
    fn default() -> Self {
        Self {
            q: 9,
            steps: 200,
            downsample: 20,
            step_scale: 0.5,
            decay: 0.97,
            seed: 0,
            dim: 3,
            scheme: WeightVariant::Dkm,
            outer_max: geomds::solver::DEFAULT_OUTER_MAX,
            tol: geomds::solver::DEFAULT_OUTER_TOL,
            out_dir: None,
        }
    }
}

/// Indices of a uniform down-sample of `total` items to at most `keep`,
/// always including the first and last.
pub fn downsample_indices(total: usize, keep: usize) -> Vec<usize> {
    if keep >= total || keep < 2 {
        return (0..total).collect();
    }
    (0..keep)
        .map(|k| (k as f64 * (total - 1) as f64 / (keep - 1) as f64).round() as usize)
        .collect()
}

/// Synthesizes a convergent rotation-group trajectory, down-samples it and
/// embeds the retained points, labeled by their order along the walk.
pub fn run_trajectory(opts: &TrajectoryOpts) -> Result<RunReport> {
    let kind = ManifoldKind::SpecialOrthogonal(opts.q);
    let walk = geodesic_walk(kind, opts.steps, opts.step_scale, opts.decay, opts.seed)?;
    let indices = downsample_indices(walk.len(), opts.downsample);
    let points: Vec<ManifoldPoint> = indices.iter().map(|&i| walk[i].clone()).collect();
    let labels: Vec<String> = (1..=points.len()).map(|k| k.to_string()).collect();

    let distances = pairwise_distances(&points)?;
    let weights = make_weights(opts.scheme.clone(), &distances)?;
    let cfg = SolverConfig {
        p: opts.dim,
        outer_max: opts.outer_max,
        outer_tol: opts.tol,
        init: Init::Random {
            seed: opts.seed,
            scale: None,
        },
        ..SolverConfig::default()
    };
    let result = embed(&distances, &weights, &cfg)?;
    let mut report = RunReport::new(
        labels,
        result.coords,
        result.trace,
        distances,
        result.outer_iterations,
        result.converged,
    );
    report.trajectory = true;
    if let Some(dir) = &opts.out_dir {
        report.write_files(dir)?;
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub enum GenTarget {
    Manifold(ManifoldKind),
    /// Gaussian points in the plane (q = ambient dimension).
    Planar { dim: usize },
}

#[derive(Clone, Debug)]
pub struct GenOpts {
    pub target: GenTarget,
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Also write the pairwise distance matrix of the sample.
    pub out_dist: Option<PathBuf>,
}

/// Generates a synthetic dataset: a JSON point file for manifold kinds, a
/// coordinate CSV for planar clouds.
pub fn run_gen(opts: &GenOpts) -> Result<()> {
    if opts.n < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 points, got {}",
            opts.n
        )));
    }
    let labels: Vec<String> = (1..=opts.n).map(|k| k.to_string()).collect();
    match &opts.target {
        GenTarget::Planar { dim } => {
            let coords = Configuration::random(opts.n, *dim, 1.0, opts.seed);
            dataio::save_coords(&opts.out, &labels, &coords)?;
            if let Some(dist_path) = &opts.out_dist {
                let d = DistanceMatrix::from_configuration(&coords);
                dataio::save_distances(dist_path, &labels, &d)?;
            }
        }
        GenTarget::Manifold(kind) => {
            let points: Vec<ManifoldPoint> = (0..opts.n)
                .map(|k| random_point(*kind, opts.seed.wrapping_add(k as u64)))
                .collect::<geomds::Result<_>>()?;
            dataio::save_points(&opts.out, *kind, &labels, &points)?;
            if let Some(dist_path) = &opts.out_dist {
                let d = pairwise_distances(&points)?;
                dataio::save_distances(dist_path, &labels, &d)?;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct DistancesOpts {
    pub input: PathBuf,
    pub format: Option<Format>,
    pub out: PathBuf,
}

/// Computes the distance matrix of a dataset and writes it as labeled CSV.
pub fn run_distances(opts: &DistancesOpts) -> Result<()> {
    let dataset = load_dataset(&opts.input, opts.format)?;
    let d = dataset.to_distances()?;
    dataio::save_distances(&opts.out, dataset.labels(), &d)
}

/// Human-readable one-line summary used by the binary after a run.
pub fn summarize(report: &RunReport) -> String {
    let final_db = report
        .trace
        .final_db()
        .map(|db| format!("{db:.2} dB"))
        .unwrap_or_else(|| "n/a (zero initial stress)".to_string());
    format!(
        "{} points embedded in {} iterations ({}), final stress {:.3e}, trace {}",
        report.coords.n(),
        report.outer_iterations,
        if report.converged {
            "converged"
        } else {
            "iteration cap"
        },
        report.trace.values.last().copied().unwrap_or(0.0),
        final_db
    )
}

/// Parses the scheme names used by `--scheme`.
pub fn parse_scheme(name: &str) -> Result<WeightVariant> {
    match name {
        "kruskal" => Ok(WeightVariant::Kruskal),
        "sammon" => Ok(WeightVariant::Sammon),
        "dkm" => Ok(WeightVariant::Dkm),
        other => Err(CliError::Usage(format!(
            "unknown scheme {other:?} (expected kruskal, sammon or dkm)"
        ))),
    }
}

/// Parses the manifold names used by `gen --manifold` (includes `planar`).
pub fn parse_gen_target(name: &str, q: usize) -> Result<GenTarget> {
    if name == "planar" {
        return Ok(GenTarget::Planar { dim: q });
    }
    dataio::parse_kind(name, q)
        .map(GenTarget::Manifold)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown manifold {name:?} (expected so, sphere, spd, su or planar)"
            ))
        })
}
