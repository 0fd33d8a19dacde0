//! Trajectories on element-free grids. The language has no conditionals, so
//! running a program on an empty grid yields its exact cell sequence; that
//! sequence is what world generation places elements around.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::emulator::execute;
use crate::error::GenError;
use crate::model::{Direction, GridWorld, Pose, Program, Trajectory};
use crate::seed;

pub const POSE_SAMPLE_RETRIES: usize = 200;

pub fn trace_on_empty(code: &Program, rows: usize, cols: usize, start: Pose) -> Trajectory {
    execute(code, &GridWorld::empty(rows, cols, start)).trajectory
}

/// A uniformly random start pose from which `code` stays on the grid.
///
/// Tries [`POSE_SAMPLE_RETRIES`] uniform samples, then scans every pose in a
/// seeded order, so it fails only when no pose works.
pub fn sample_valid_pose(
    code: &Program,
    rows: usize,
    cols: usize,
    rng_seed: u64,
) -> Result<Pose, GenError> {
    let mut rng = seed::rng(rng_seed);
    let fits = |pose: Pose| !trace_on_empty(code, rows, cols, pose).crashed();

    for _ in 0..POSE_SAMPLE_RETRIES {
        let pose = Pose::new(
            rng.gen_range(0..rows),
            rng.gen_range(0..cols),
            Direction::ALL[rng.gen_range(0..4)],
        );
        if fits(pose) {
            return Ok(pose);
        }
    }

    let mut all: Vec<Pose> = (0..rows)
        .flat_map(|r| (0..cols).flat_map(move |c| Direction::ALL.map(|d| Pose::new(r, c, d))))
        .collect();
    all.shuffle(&mut rng);
    all.into_iter()
        .find(|&p| fits(p))
        .ok_or(GenError::Exhaustion { rows, cols })
}
