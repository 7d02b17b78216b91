//! Data-parallel evaluation of independent cells. `ALLEE_ZONE_THREADS` caps
//! the number of worker threads; unset means all cores.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use allee_zone_core::{sweep_cell, BoundarySpec, EigenError, GrowthPair, SweepTable};

pub const THREADS_VAR: &str = "ALLEE_ZONE_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{THREADS_VAR} must be a positive integer, got {0:?}")]
pub struct ThreadsError(pub String);

/// Parses a thread cap; `None` for an unset or empty value.
pub fn parse_threads(raw: Option<&str>) -> Result<Option<usize>, ThreadsError> {
    match raw.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ThreadsError(s.to_owned())),
        },
    }
}

/// Pool sized by `ALLEE_ZONE_THREADS`.
pub fn pool_from_env() -> Result<ThreadPool, ThreadsError> {
    let raw = std::env::var(THREADS_VAR).ok();
    let threads = parse_threads(raw.as_deref())?;
    let mut b = ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    Ok(b.build().expect("thread pool"))
}

/// `f` over `items` on `pool`, results in input order.
pub fn map_ordered<T, R, E, F>(pool: &ThreadPool, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync,
{
    pool.install(|| items.par_iter().map(&f).collect())
}

/// As [`allee_zone_core::sweep`] with cells spread over `pool`.
pub fn par_sweep(
    pool: &ThreadPool,
    habitat: f64,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    alpha_grid: &[f64],
    l_grid: &[f64],
) -> Result<SweepTable, EigenError> {
    let cells: Vec<(f64, f64)> = l_grid.iter().flat_map(|&l| alpha_grid.iter().map(move |&a| (a, l))).collect();
    let flat = map_ordered(pool, &cells, |&(a, l)| sweep_cell(habitat, bc, growth, a, l))?;
    let values = if alpha_grid.is_empty() {
        vec![Vec::new(); l_grid.len()]
    } else {
        flat.chunks(alpha_grid.len()).map(<[_]>::to_vec).collect()
    };
    Ok(SweepTable { alphas: alpha_grid.to_vec(), ls: l_grid.to_vec(), values })
}
