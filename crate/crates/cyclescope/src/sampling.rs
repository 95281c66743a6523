//! Seeded random perturbations, one independent ChaCha stream per task.

use cyclescope_core::PerturbationSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for task `task` under the run seed `seed`.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Dense spec of degree `n` with coefficients uniform on `[-1, 1)`.
pub fn random_spec<R: Rng>(rng: &mut R, n: usize) -> PerturbationSpec {
    PerturbationSpec::dense(n, || rng.gen_range(-1.0..1.0))
}

/// Spec for task `task`, independent of how other tasks are scheduled.
pub fn task_spec(seed: u64, task: u64, n: usize) -> PerturbationSpec {
    random_spec(&mut task_rng(seed, task), n)
}
