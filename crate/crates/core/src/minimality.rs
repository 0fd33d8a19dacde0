//! Exhaustive search for a strictly shorter solution.
//!
//! The search space is every flat command sequence and every program with a
//! single repeat (prefix, repeated body, suffix) whose written length is
//! below the bound. Two reductions keep it small without changing the
//! answer: blocks ruled out by the task's constraints are never tried, and
//! pen colors are collapsed to the colors the goal can tell apart. Prefixes
//! that crash, or that draw an edge missing from a draw pattern, are pruned.
//! Every candidate that passes the cheap goal pre-check is confirmed with the
//! emulator.

use crate::emulator::is_solution;
use crate::error::ScoringError;
use crate::model::{
    Basic, Block, Cell, CodeConstraint, Command, Drawing, Edge, Goal, GridWorld, PenColor, Pose,
    Program, Stmt, Task, MAX_REPEAT, MIN_REPEAT,
};
use crate::templating::usable_blocks;

pub const MAX_SEARCH_LEN: usize = 8;
pub const SEARCH_BUDGET: u64 = 1_000_000;

/// Tokens worth trying for this task.
fn alphabet(task: &Task) -> (Vec<Command>, bool) {
    let usable = usable_blocks(&task.constraints);
    let mut tokens: Vec<Command> = Basic::ALL
        .iter()
        .filter(|b| usable.contains(&b.block()))
        .map(|&b| Command::Basic(b))
        .collect();
    if usable.contains(&Block::SetPenColor) {
        let colors: Vec<PenColor> = match task.goal {
            Goal::Draw => {
                // Colors outside the pattern are interchangeable; keep one.
                let mut used: Vec<PenColor> = PenColor::ALL
                    .iter()
                    .copied()
                    .filter(|c| task.world.pattern.values().any(|p| p == c))
                    .collect();
                if let Some(&spare) = PenColor::ALL.iter().find(|c| !used.contains(c)) {
                    used.push(spare);
                }
                used
            }
            _ => vec![PenColor::Black],
        };
        tokens.extend(colors.into_iter().map(Command::Pen));
    }
    (tokens, usable.contains(&Block::Repeat))
}

fn admissible_lengths(task: &Task, max_len: usize) -> Vec<usize> {
    (0..max_len)
        .filter(|&len| {
            task.constraints.iter().all(|c| match *c {
                CodeConstraint::AtMostCommands(n) => len <= n,
                CodeConstraint::ExactlyCommands(n) => len == n,
                _ => true,
            })
        })
        .collect()
}

/// Number of programs the search would enumerate.
pub fn search_space(task: &Task, max_len: usize) -> u64 {
    let (tokens, repeat) = alphabet(task);
    let t = tokens.len() as u64;
    let forms = u64::from(MAX_REPEAT - MIN_REPEAT + 1);
    admissible_lengths(task, max_len)
        .into_iter()
        .map(|len| {
            let seqs = t.saturating_pow(len as u32);
            let splits = (len * (len + 1) / 2) as u64;
            let repeated = if repeat { forms * splits } else { 0 };
            seqs.saturating_mul(1 + repeated)
        })
        .fold(0u64, u64::saturating_add)
}

/// Cheap turtle state used for pruning.
#[derive(Clone, Copy)]
struct Probe {
    pose: Pose,
    collected: u64,
}

struct Search<'a> {
    task: &'a Task,
    world: &'a GridWorld,
    tokens: Vec<Command>,
    pattern: Option<&'a Drawing>,
    targets: u64,
}

fn bit(world: &GridWorld, cell: Cell) -> u64 {
    1u64 << (cell.row * world.cols + cell.col)
}

impl<'a> Search<'a> {
    fn new(task: &'a Task, tokens: Vec<Command>) -> Self {
        let world = &task.world;
        let targets = match task.goal {
            Goal::CollectAll(item) => world
                .items
                .iter()
                .filter(|(_, &k)| k == item)
                .fold(0, |m, (&c, _)| m | bit(world, c)),
            _ => 0,
        };
        Search {
            task,
            world,
            tokens,
            pattern: matches!(task.goal, Goal::Draw).then_some(&world.pattern),
            targets,
        }
    }

    fn start(&self) -> Probe {
        let cell = self.world.start.cell();
        Probe {
            pose: self.world.start,
            collected: bit(self.world, cell),
        }
    }

    /// `None` when the command crashes or draws an edge the pattern lacks.
    fn advance(&self, p: Probe, cmd: Command) -> Option<Probe> {
        let dir = p.pose.dir;
        let heading = match cmd {
            Command::Pen(_) => return Some(p),
            Command::Basic(Basic::Left) => {
                return Some(Probe {
                    pose: Pose {
                        dir: dir.left(),
                        ..p.pose
                    },
                    ..p
                })
            }
            Command::Basic(Basic::Right) => {
                return Some(Probe {
                    pose: Pose {
                        dir: dir.right(),
                        ..p.pose
                    },
                    ..p
                })
            }
            Command::Basic(Basic::Forward) => dir,
            Command::Basic(Basic::Back) => dir.right().right(),
        };
        let here = p.pose.cell();
        let next = here.step(heading, self.world.rows, self.world.cols)?;
        if self.world.walls.contains(&next) || self.world.forbidden.contains(&next) {
            return None;
        }
        if let Some(pattern) = self.pattern {
            let edge = Edge::new(here, next).ok()?;
            if !pattern.contains_key(&edge) {
                return None;
            }
        }
        Some(Probe {
            pose: Pose::new(next.row, next.col, dir),
            collected: p.collected | bit(self.world, next),
        })
    }

    fn goal_possible(&self, p: Probe) -> bool {
        match self.task.goal {
            Goal::Find(item) => self.world.items.get(&p.pose.cell()) == Some(&item),
            Goal::CollectAll(_) => p.collected & self.targets == self.targets,
            Goal::Draw => true,
        }
    }

    fn confirm(&self, p: Probe, code: impl FnOnce() -> Program) -> bool {
        self.goal_possible(p) && is_solution(self.task, &code())
    }

    fn flat(&self, p: Probe, left: usize, seq: &mut Vec<Command>) -> bool {
        if left == 0 {
            return self.confirm(p, || Program::from_commands(seq.iter().copied()));
        }
        for &cmd in &self.tokens {
            if let Some(q) = self.advance(p, cmd) {
                seq.push(cmd);
                let hit = self.flat(q, left - 1, seq);
                seq.pop();
                if hit {
                    return true;
                }
            }
        }
        false
    }

    /// Extends `seq` through the prefix and the first pass of the body, then
    /// replays the body and continues with the suffix.
    fn looped(&self, p: Probe, seq: &mut Vec<Command>, shape: (usize, usize, usize, u8)) -> bool {
        let (pre, body, _, count) = shape;
        if seq.len() == pre + body {
            // Body just completed: replay the remaining iterations.
            let mut q = p;
            for _ in 1..count {
                for &cmd in &seq[pre..] {
                    match self.advance(q, cmd) {
                        Some(next) => q = next,
                        None => return false,
                    }
                }
            }
            return self.suffix(q, seq, shape);
        }
        for &cmd in &self.tokens {
            if let Some(q) = self.advance(p, cmd) {
                seq.push(cmd);
                let hit = self.looped(q, seq, shape);
                seq.pop();
                if hit {
                    return true;
                }
            }
        }
        false
    }

    fn suffix(&self, p: Probe, seq: &mut Vec<Command>, shape: (usize, usize, usize, u8)) -> bool {
        let (pre, body, post, count) = shape;
        if seq.len() == pre + body + post {
            return self.confirm(p, || {
                let mut stmts: Vec<Stmt> = seq[..pre].iter().map(|&c| Stmt::Cmd(c)).collect();
                stmts.push(Stmt::Repeat {
                    count,
                    body: seq[pre..pre + body].to_vec(),
                });
                stmts.extend(seq[pre + body..].iter().map(|&c| Stmt::Cmd(c)));
                Program::new(stmts)
            });
        }
        for &cmd in &self.tokens {
            if let Some(q) = self.advance(p, cmd) {
                seq.push(cmd);
                let hit = self.suffix(q, seq, shape);
                seq.pop();
                if hit {
                    return true;
                }
            }
        }
        false
    }
}

/// True iff no program shorter than `max_len` (flat, or with one repeat)
/// solves `task`.
pub fn minimality_oracle(task: &Task, max_len: usize) -> Result<bool, ScoringError> {
    let space = search_space(task, max_len);
    if max_len > MAX_SEARCH_LEN || space > SEARCH_BUDGET {
        return Err(ScoringError::BudgetExceeded(space));
    }
    let (tokens, repeat) = alphabet(task);
    let search = Search::new(task, tokens);
    let mut seq = Vec::with_capacity(max_len);
    for len in admissible_lengths(task, max_len) {
        if search.flat(search.start(), len, &mut seq) {
            return Ok(false);
        }
        if !repeat {
            continue;
        }
        for body in 1..=len {
            for pre in 0..=len - body {
                let post = len - body - pre;
                for count in MIN_REPEAT..=MAX_REPEAT {
                    if search.looped(search.start(), &mut seq, (pre, body, post, count)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
