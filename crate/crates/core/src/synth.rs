//! End-to-end synthesis: templatize the reference, enumerate instantiations,
//! build worlds around them, score, and keep the best `k`.
//!
//! Seeds are derived from the request seed with [`seed::derive`]:
//!
//! | stage | index | used for |
//! |-------|-------|----------|
//! | 0 | 0 | extra-slot positions in the template |
//! | 1 | 0 | enumeration order of the instantiation CSP |
//! | 1 | 1 | shuffle of a fully enumerated solution set |
//! | 1 | j | j-th restart stream when the set is too large to enumerate |
//! | 2 | i·W + w | w-th world for the i-th instantiation (W worlds each) |

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::emulator::is_solution;
use crate::error::SynthError;
use crate::fdsolver::{count_solutions, solve_stream, Csp};
use crate::model::{canonical_hash, Difficulty, Task, TaskCode};
use crate::scoring::{score, soft_components, top_k, Components, ScoredCandidate, ScoringConfig};
use crate::seed;
use crate::templating::{templatize, Instantiation, Slot, TemplateSet};
use crate::worldgen::{generate_world, WorldRequest};

/// Solution sets up to this size are enumerated and shuffled; larger ones
/// are sampled with restarts.
const ENUMERATION_CAP: usize = 20_000;
/// Consecutive duplicate restarts after which sampling gives up.
const MAX_DUPLICATE_RESTARTS: u64 = 200;
/// Scored candidates to collect, per requested output, before stopping early.
const POOL_FACTOR: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub max_instantiations: usize,
    pub worlds_per_instantiation: usize,
    pub time: Duration,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_instantiations: 2000,
            worlds_per_instantiation: 3,
            time: Duration::from_secs(60),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthRequest {
    pub reference: TaskCode,
    pub difficulty: Difficulty,
    pub k: usize,
    pub seed: u64,
    pub budgets: Budgets,
    pub scoring: ScoringConfig,
}

impl SynthRequest {
    pub fn new(reference: TaskCode, difficulty: Difficulty, k: usize, seed: u64) -> Self {
        SynthRequest {
            reference,
            difficulty,
            k,
            seed,
            budgets: Budgets::default(),
            scoring: ScoringConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub instantiations_tried: usize,
    pub worlds_built: usize,
    pub world_failures: usize,
    pub hard_gate_rejections: usize,
    pub dedup_hits: usize,
    pub below_threshold: usize,
    pub minimality_unknown: usize,
}

#[derive(Debug, Clone)]
pub struct SynthReport {
    /// Best first; at most `k`.
    pub outputs: Vec<ScoredCandidate>,
    pub counters: Counters,
    pub elapsed: Duration,
}

/// Instantiations in a seed-determined order.
struct Instantiations<'a> {
    ts: &'a TemplateSet,
    csp: Csp<Slot>,
    seed: u64,
    shuffled: Option<std::vec::IntoIter<Vec<Slot>>>,
    seen: BTreeSet<Vec<Slot>>,
    restart: u64,
}

impl<'a> Instantiations<'a> {
    fn new(ts: &'a TemplateSet, seed: u64) -> Self {
        let csp = ts.to_csp();
        let shuffled = (count_solutions(&csp, ENUMERATION_CAP) < ENUMERATION_CAP).then(|| {
            let mut all: Vec<Vec<Slot>> = solve_stream(&csp, seed::derive(seed, 1, 0)).collect();
            all.shuffle(&mut seed::rng(seed::derive(seed, 1, 1)));
            all.into_iter()
        });
        Instantiations {
            ts,
            csp,
            seed,
            shuffled,
            seen: BTreeSet::new(),
            restart: 2,
        }
    }
}

impl Iterator for Instantiations<'_> {
    type Item = Instantiation;

    fn next(&mut self) -> Option<Instantiation> {
        if let Some(all) = &mut self.shuffled {
            return all.next().map(|v| self.ts.instantiate(&v));
        }
        let mut misses = 0;
        while misses < MAX_DUPLICATE_RESTARTS {
            let s = seed::derive(self.seed, 1, self.restart);
            self.restart += 1;
            let values = solve_stream(&self.csp, s).next()?;
            if self.seen.insert(values.clone()) {
                return Some(self.ts.instantiate(&values));
            }
            misses += 1;
        }
        None
    }
}

pub fn synthesize(req: &SynthRequest) -> Result<SynthReport, SynthError> {
    let started = Instant::now();
    let reference = &req.reference;
    reference.task.validate()?;
    if !is_solution(&reference.task, &reference.code) {
        return Err(SynthError::InvalidReference);
    }
    let cfg = &req.scoring;
    let ts = templatize(
        &reference.code,
        &reference.task.constraints,
        &reference.task.goal,
        req.difficulty,
        seed::derive(req.seed, 0, 0),
    );
    let world_ref = &reference.task.world;
    let pool_target = req.k.saturating_mul(POOL_FACTOR);

    let mut counters = Counters::default();
    let mut seen = BTreeSet::new();
    let mut pool: Vec<ScoredCandidate> = Vec::new();
    let mut passing = 0;

    'outer: for (i, inst) in Instantiations::new(&ts, req.seed).enumerate() {
        if i >= req.budgets.max_instantiations || started.elapsed() >= req.budgets.time {
            break;
        }
        counters.instantiations_tried += 1;
        let worlds = req.budgets.worlds_per_instantiation;
        for w in 0..worlds {
            let world = generate_world(&WorldRequest {
                code: &inst.code,
                goal: inst.goal,
                constraints: &inst.constraints,
                rows: world_ref.rows,
                cols: world_ref.cols,
                reference_forbidden: world_ref.forbidden.len(),
                seed: seed::derive(req.seed, 2, (i * worlds + w) as u64),
            });
            let Ok(world) = world else {
                counters.world_failures += 1;
                continue;
            };
            counters.worlds_built += 1;
            let task = Task {
                goal: inst.goal,
                constraints: inst.constraints.clone(),
                world,
            };
            let candidate = TaskCode::new(task, inst.code.clone());
            if !seen.insert(canonical_hash(&candidate.task, &candidate.code)) {
                counters.dedup_hits += 1;
                continue;
            }
            let soft: Components = soft_components(&candidate, reference);
            if soft.validity == 0.0 {
                counters.hard_gate_rejections += 1;
                continue;
            }
            // Minimality cannot raise the total, so weak candidates skip it.
            if soft.soft_total(&cfg.weights) < cfg.threshold {
                counters.below_threshold += 1;
                continue;
            }
            let scored = score(&candidate, reference, &cfg.weights);
            if scored.minimality_unknown {
                counters.minimality_unknown += 1;
            }
            if scored.components.minimality == 0.0 {
                counters.hard_gate_rejections += 1;
                continue;
            }
            passing += 1;
            pool.push(scored);
            if passing >= pool_target {
                break 'outer;
            }
        }
    }

    Ok(SynthReport {
        outputs: top_k(&pool, req.k, cfg.threshold),
        counters,
        elapsed: started.elapsed(),
    })
}

#[derive(Serialize)]
struct OutputEntry<'a> {
    file: String,
    hash: &'a str,
    total: f64,
    components: Components,
    minimality_unknown: bool,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    difficulty: &'static str,
    k: usize,
    seed: u64,
    threshold: f64,
    counters: Counters,
    outputs: Vec<OutputEntry<'a>>,
}

/// File stem of the `i`-th (0-based) output, e.g. `task_001`.
pub fn output_stem(i: usize) -> String {
    format!("task_{:03}", i + 1)
}

/// The report as pretty JSON. Elapsed time is left out so that identical
/// requests give identical reports.
pub fn report_json(req: &SynthRequest, report: &SynthReport) -> String {
    let file = ReportFile {
        difficulty: req.difficulty.name(),
        k: req.k,
        seed: req.seed,
        threshold: req.scoring.threshold,
        counters: report.counters,
        outputs: report
            .outputs
            .iter()
            .enumerate()
            .map(|(i, c)| OutputEntry {
                file: output_stem(i),
                hash: &c.hash,
                total: c.total,
                components: c.components,
                minimality_unknown: c.minimality_unknown,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use crate::model::{Block, Cell, CodeConstraint, Direction, Goal, GridWorld, ItemKind, Pose};

    fn reference() -> TaskCode {
        let mut world = GridWorld::empty(5, 5, Pose::new(4, 0, Direction::North));
        world.items.insert(Cell::new(2, 2), ItemKind::Strawberry);
        world.walls.insert(Cell::new(3, 1));
        let task = Task {
            goal: Goal::Find(ItemKind::Strawberry),
            constraints: [
                CodeConstraint::AtMostCommands(5),
                CodeConstraint::Forbid(Block::Repeat),
            ]
            .into(),
            world,
        };
        TaskCode::new(
            task,
            parse("forward forward right forward forward").unwrap(),
        )
    }

    #[test]
    fn rejects_invalid_reference() {
        let mut r = reference();
        r.code = parse("forward").unwrap();
        let req = SynthRequest::new(r, Difficulty::Easy, 2, 0);
        assert!(matches!(
            synthesize(&req),
            Err(SynthError::InvalidReference)
        ));
    }

    #[test]
    fn easy_outputs_are_valid_and_sorted() {
        let req = SynthRequest::new(reference(), Difficulty::Easy, 3, 7);
        let report = synthesize(&req).unwrap();
        assert!(!report.outputs.is_empty());
        for out in &report.outputs {
            assert!(is_solution(&out.task, &out.code));
            assert_eq!(out.task.constraints, req.reference.task.constraints);
        }
        assert!(report.outputs.windows(2).all(|w| w[0].total >= w[1].total));
        let again = synthesize(&req).unwrap();
        assert_eq!(report_json(&req, &report), report_json(&req, &again));
    }

    #[test]
    fn stems_are_one_based() {
        assert_eq!(output_stem(0), "task_001");
        assert_eq!(output_stem(11), "task_012");
    }
}
