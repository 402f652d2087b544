//! Library surface behind the `geomds` binary: dataset formats, the
//! subcommand implementations and the SVG figure writer.

pub mod commands;
pub mod dataio;
pub mod error;
pub mod svg;

pub use commands::{
    cities_dataset, run_distances, run_embed, run_gen, run_trajectory, DistancesOpts, EmbedOpts,
    GenOpts, GenTarget, InputSource, TrajectoryOpts,
};
pub use dataio::{load_dataset, Dataset, Format, RunReport};
pub use error::{CliError, Result};
