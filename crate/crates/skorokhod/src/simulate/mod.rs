//! Time-discretized simulation with deterministic, counter-based noise.
//!
//! Path generation is pure given `(model, grid, master_seed, path_index)`;
//! batches may therefore run on any number of workers, and aggregation
//! happens in ascending path order so results are scheduling-independent.

mod coupling;
mod grid;
mod noise;
mod paths;
mod schemes;

pub use coupling::{
    girsanov_coupled, harnack_coupled, xi_derivative, xi_schedule, xi_value, RhoFn, RhoSpec,
    MEETING_TOL_SCALE,
};
pub use grid::TimeGrid;
pub use noise::{make_noise, mix_seed, standard_normal, NoisePanel};
pub use paths::{GirsanovCoupledPaths, HarnackCoupledPaths, Path, ReflectedPath};
pub use schemes::{
    euler_path, penalized_path, projected_path, sdel_path, sdel_path_with, BLOWUP_GUARD,
};

use rayon::prelude::*;

use crate::error::Result;

/// Maps `path_index in 0..n_paths` through `job` in parallel and returns the
/// results in ascending path order regardless of worker count.
pub fn simulate_batch<T: Send>(
    n_paths: usize,
    job: impl Fn(u64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..n_paths as u64)
        .into_par_iter()
        .map(&job)
        .collect::<Result<Vec<T>>>()
}
