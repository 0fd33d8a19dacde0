//! Candidate scoring and ranking.
//!
//! This is an automated proxy for expert quality ratings, not a reproduction
//! of them. Two hard gates (the code solves the task; no shorter code does)
//! zero the total when they fail. Otherwise the total is a weighted mean of
//! three soft components:
//!
//! * trajectory quality: turn ratio in the 0.25..=0.6 band, no immediate
//!   forward/back undo, path spanning at least two rows and two columns;
//! * visual quality: element density in 0.05..=0.35, start cell differs from
//!   the final cell;
//! * dissimilarity to the reference: different start pose, and the share of
//!   occupied cells whose contents changed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::emulator::{execute, is_solution};
use crate::error::{ConfigError, ScoringError};
use crate::minimality::minimality_oracle;
use crate::model::{
    canonical_hash, code_length, Basic, Cell, Command, GridWorld, ItemKind, Program, Task,
    TaskCode, Trajectory,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub trajectory: f64,
    pub visual: f64,
    pub dissimilarity: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            trajectory: 0.4,
            visual: 0.3,
            dissimilarity: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub threshold: f64,
    pub weights: Weights,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            threshold: 0.6,
            weights: Weights::default(),
        }
    }
}

impl ScoringConfig {
    /// Reads a TOML document such as
    ///
    /// ```toml
    /// threshold = 0.6
    /// [weights]
    /// trajectory = 0.4
    /// visual = 0.3
    /// dissimilarity = 0.3
    /// ```
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScoringConfig = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(ConfigError::Value(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        let w = self.weights;
        let all = [w.trajectory, w.visual, w.dissimilarity];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) || all.iter().sum::<f64>() <= 0.0 {
            return Err(ConfigError::Value(
                "weights must be nonnegative with a positive sum".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Components {
    pub validity: f64,
    pub minimality: f64,
    pub trajectory_quality: f64,
    pub visual_quality: f64,
    pub dissimilarity: f64,
}

impl Components {
    pub fn soft_total(&self, w: &Weights) -> f64 {
        let sum = w.trajectory + w.visual + w.dissimilarity;
        (w.trajectory * self.trajectory_quality
            + w.visual * self.visual_quality
            + w.dissimilarity * self.dissimilarity)
            / sum
    }

    pub fn total(&self, w: &Weights) -> f64 {
        if self.validity == 0.0 || self.minimality == 0.0 {
            0.0
        } else {
            self.soft_total(w)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub task: Task,
    pub code: Program,
    pub components: Components,
    pub total: f64,
    pub hash: String,
    /// The minimality search hit its budget; minimality was scored as 1.
    pub minimality_unknown: bool,
}

fn turn_ratio_term(turns: usize, moves: usize) -> f64 {
    if moves == 0 {
        return 0.0;
    }
    let r = (turns as f64 / moves as f64).clamp(0.0, 1.0);
    if r < 0.25 {
        r / 0.25
    } else if r <= 0.6 {
        1.0
    } else {
        (1.0 - r) / 0.4
    }
}

fn has_immediate_undo(code: &Program) -> bool {
    let basics: Vec<Basic> = code
        .unrolled()
        .filter_map(|c| match c {
            Command::Basic(b) => Some(b),
            Command::Pen(_) => None,
        })
        .collect();
    basics.windows(2).any(|w| {
        matches!(
            (w[0], w[1]),
            (Basic::Forward, Basic::Back) | (Basic::Back, Basic::Forward)
        )
    })
}

pub fn trajectory_quality(code: &Program, traj: &Trajectory) -> f64 {
    let (mut turns, mut moves) = (0, 0);
    for w in traj.poses.windows(2) {
        if w[0].cell() == w[1].cell() {
            turns += 1;
        } else {
            moves += 1;
        }
    }
    let rows: BTreeSet<usize> = traj.visited.iter().map(|c| c.row).collect();
    let cols: BTreeSet<usize> = traj.visited.iter().map(|c| c.col).collect();
    let undo = if has_immediate_undo(code) { 0.0 } else { 1.0 };
    let span = if rows.len() >= 2 && cols.len() >= 2 {
        1.0
    } else {
        0.0
    };
    (turn_ratio_term(turns, moves) + undo + span) / 3.0
}

fn density_term(d: f64) -> f64 {
    if d < 0.05 {
        d / 0.05
    } else if d <= 0.35 {
        1.0
    } else {
        ((1.0 - d) / 0.65).max(0.0)
    }
}

pub fn visual_quality(world: &GridWorld, traj: &Trajectory) -> f64 {
    let density = world.element_count() as f64 / (world.rows * world.cols) as f64;
    let moved = if traj.final_cell() != world.start.cell() {
        1.0
    } else {
        0.0
    };
    (density_term(density) + moved) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Content {
    Outside,
    Empty,
    Wall,
    Forbidden,
    Item(ItemKind),
}

fn content(world: &GridWorld, cell: Cell) -> Content {
    if !world.contains(cell) {
        Content::Outside
    } else if world.walls.contains(&cell) {
        Content::Wall
    } else if world.forbidden.contains(&cell) {
        Content::Forbidden
    } else if let Some(&kind) = world.items.get(&cell) {
        Content::Item(kind)
    } else {
        Content::Empty
    }
}

/// Changed cells over cells occupied in either grid, in [0, 1].
pub fn grid_edit_distance(a: &GridWorld, b: &GridWorld) -> f64 {
    let (rows, cols) = (a.rows.max(b.rows), a.cols.max(b.cols));
    let (mut changed, mut occupied) = (0usize, 0usize);
    for r in 0..rows {
        for c in 0..cols {
            let cell = Cell::new(r, c);
            let (x, y) = (content(a, cell), content(b, cell));
            if x != Content::Empty || y != Content::Empty {
                occupied += 1;
            }
            if x != y {
                changed += 1;
            }
        }
    }
    if occupied == 0 {
        0.0
    } else {
        (changed as f64 / occupied as f64).clamp(0.0, 1.0)
    }
}

pub fn dissimilarity(world: &GridWorld, reference: &GridWorld) -> f64 {
    let pose = if world.start != reference.start {
        1.0
    } else {
        0.0
    };
    (pose + grid_edit_distance(world, reference)) / 2.0
}

/// Validity and the three soft components; minimality is left at 1.
pub fn soft_components(candidate: &TaskCode, reference: &TaskCode) -> Components {
    let TaskCode { task, code } = candidate;
    let traj = execute(code, &task.world).trajectory;
    Components {
        validity: if is_solution(task, code) { 1.0 } else { 0.0 },
        minimality: 1.0,
        trajectory_quality: trajectory_quality(code, &traj),
        visual_quality: visual_quality(&task.world, &traj),
        dissimilarity: dissimilarity(&task.world, &reference.task.world),
    }
}

pub fn score(candidate: &TaskCode, reference: &TaskCode, weights: &Weights) -> ScoredCandidate {
    let mut components = soft_components(candidate, reference);
    let mut minimality_unknown = false;
    if components.validity == 1.0 {
        match minimality_oracle(&candidate.task, code_length(&candidate.code)) {
            Ok(minimal) => components.minimality = if minimal { 1.0 } else { 0.0 },
            Err(ScoringError::BudgetExceeded(_)) => minimality_unknown = true,
        }
    }
    ScoredCandidate {
        total: components.total(weights),
        hash: canonical_hash(&candidate.task, &candidate.code),
        task: candidate.task.clone(),
        code: candidate.code.clone(),
        components,
        minimality_unknown,
    }
}

/// The `k` best candidates with total at least `threshold`, one per
/// canonical hash, ordered by total (descending) then hash.
pub fn top_k(candidates: &[ScoredCandidate], k: usize, threshold: f64) -> Vec<ScoredCandidate> {
    let mut ranked: Vec<&ScoredCandidate> =
        candidates.iter().filter(|c| c.total >= threshold).collect();
    ranked.sort_by(|a, b| {
        b.total
            .total_cmp(&a.total)
            .then_with(|| a.hash.cmp(&b.hash))
    });
    let mut seen = BTreeSet::new();
    ranked
        .into_iter()
        .filter(|c| seen.insert(c.hash.as_str()))
        .take(k)
        .cloned()
        .collect()
}
