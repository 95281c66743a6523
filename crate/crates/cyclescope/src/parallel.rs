//! Thread-pool sizing and order-preserving parallel maps.

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "CYCLESCOPE_THREADS";

/// Thread cap from `CYCLESCOPE_THREADS`, if set.
pub fn env_threads() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs `job` on a dedicated pool of `threads` workers (rayon's default when `None`).
pub fn with_threads<T, F>(threads: Option<usize>, job: F) -> CliResult<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Maps in parallel, keeping input order; the first error in input order wins.
pub fn ordered_map<I, T, E, F>(items: &[I], f: F) -> Result<Vec<T>, E>
where
    I: Sync,
    T: Send,
    E: Send,
    F: Fn(&I) -> Result<T, E> + Sync + Send,
{
    let results: Vec<Result<T, E>> = items.par_iter().map(f).collect();
    results.into_iter().collect()
}
