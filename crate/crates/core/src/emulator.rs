//! Concrete execution of programs on grid worlds. This is the validity oracle
//! for everything the synthesizer emits.

use std::collections::BTreeSet;

use crate::model::{
    code_length, Basic, Block, Cell, CodeConstraint, Command, CrashReason, Drawing, Edge, Goal,
    GridWorld, PenColor, Pose, Program, Task, Trajectory,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecResult {
    pub trajectory: Trajectory,
    /// Cells holding an item that the turtle stood on at some point.
    pub collected: BTreeSet<Cell>,
}

/// Turtle state that can be advanced one command at a time.
#[derive(Debug, Clone)]
pub struct Turtle<'w> {
    world: &'w GridWorld,
    pose: Pose,
    pen: PenColor,
    poses: Vec<Pose>,
    visited: Vec<Cell>,
    segments: Drawing,
    collected: BTreeSet<Cell>,
    crash: Option<CrashReason>,
}

impl<'w> Turtle<'w> {
    pub fn new(world: &'w GridWorld) -> Self {
        let start = world.start;
        let mut collected = BTreeSet::new();
        if world.items.contains_key(&start.cell()) {
            collected.insert(start.cell());
        }
        Turtle {
            world,
            pose: start,
            pen: PenColor::Black,
            poses: vec![start],
            visited: vec![start.cell()],
            segments: Drawing::new(),
            collected,
            crash: None,
        }
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn crash(&self) -> Option<CrashReason> {
        self.crash
    }

    /// Executes one command. Once crashed, further commands are ignored.
    pub fn step(&mut self, cmd: Command) -> Result<(), CrashReason> {
        if let Some(reason) = self.crash {
            return Err(reason);
        }
        let dir = self.pose.dir;
        let heading = match cmd {
            Command::Pen(color) => {
                self.pen = color;
                return Ok(());
            }
            Command::Basic(Basic::Left) | Command::Basic(Basic::Right) => {
                self.pose.dir = if cmd == Command::Basic(Basic::Left) {
                    dir.left()
                } else {
                    dir.right()
                };
                self.poses.push(self.pose);
                return Ok(());
            }
            Command::Basic(Basic::Forward) => dir,
            Command::Basic(Basic::Back) => dir.right().right(),
        };

        let here = self.pose.cell();
        let target = match here.step(heading, self.world.rows, self.world.cols) {
            None => Err(CrashReason::OffGrid),
            Some(cell) if self.world.walls.contains(&cell) => Err(CrashReason::Wall),
            Some(cell) if self.world.forbidden.contains(&cell) => Err(CrashReason::Forbidden),
            Some(cell) => Ok(cell),
        };
        let target = target.inspect_err(|&reason| self.crash = Some(reason))?;

        let edge = Edge::new(here, target).expect("a single step joins adjacent cells");
        self.segments.insert(edge, self.pen);
        self.pose = Pose::new(target.row, target.col, dir);
        self.poses.push(self.pose);
        self.visited.push(target);
        if self.world.items.contains_key(&target) {
            self.collected.insert(target);
        }
        Ok(())
    }

    pub fn finish(self) -> ExecResult {
        ExecResult {
            trajectory: Trajectory {
                poses: self.poses,
                visited: self.visited,
                segments: self.segments,
                crash: self.crash,
            },
            collected: self.collected,
        }
    }
}

/// Runs `code` on `world` until it finishes or crashes.
pub fn execute(code: &Program, world: &GridWorld) -> ExecResult {
    let mut turtle = Turtle::new(world);
    for cmd in code.unrolled() {
        if turtle.step(cmd).is_err() {
            break;
        }
    }
    turtle.finish()
}

pub fn check_goal(goal: &Goal, world: &GridWorld, result: &ExecResult) -> bool {
    let traj = &result.trajectory;
    if traj.crashed() {
        return false;
    }
    match *goal {
        Goal::Find(item) => world.items.get(&traj.final_cell()) == Some(&item),
        Goal::CollectAll(item) => {
            let visited = traj.visited_set();
            world
                .items
                .iter()
                .filter(|&(_, &kind)| kind == item)
                .all(|(cell, _)| visited.contains(cell))
        }
        Goal::Draw => traj.segments == world.pattern,
    }
}

pub fn check_constraint(constraint: &CodeConstraint, code: &Program) -> bool {
    match constraint {
        CodeConstraint::AtMostCommands(n) => code_length(code) <= *n,
        CodeConstraint::ExactlyCommands(n) => code_length(code) == *n,
        CodeConstraint::AllowedBlocks(allowed) => Block::ALL
            .iter()
            .all(|b| allowed.contains(b) || code.occurrences(*b) == 0),
        CodeConstraint::MustUse(b) => code.occurrences(*b) > 0,
        CodeConstraint::Forbid(b) => code.occurrences(*b) == 0,
        CodeConstraint::MaxOccurrences(b, k) => code.occurrences(*b) <= *k,
    }
}

pub fn check_constraints<'a>(
    constraints: impl IntoIterator<Item = &'a CodeConstraint>,
    code: &Program,
) -> bool {
    constraints.into_iter().all(|c| check_constraint(c, code))
}

/// Separate goal and constraint verdicts for one (task, code) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub result: ExecResult,
    pub goal_met: bool,
    pub constraints_met: bool,
}

impl Verdict {
    pub fn solved(&self) -> bool {
        self.goal_met && self.constraints_met
    }
}

pub fn evaluate(task: &Task, code: &Program) -> Verdict {
    let result = execute(code, &task.world);
    Verdict {
        goal_met: check_goal(&task.goal, &task.world, &result),
        constraints_met: check_constraints(&task.constraints, code),
        result,
    }
}

pub fn is_solution(task: &Task, code: &Program) -> bool {
    check_constraints(&task.constraints, code) && {
        let result = execute(code, &task.world);
        check_goal(&task.goal, &task.world, &result)
    }
}
