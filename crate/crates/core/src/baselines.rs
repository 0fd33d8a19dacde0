//! Geometric baseline: rotate and/or mirror the reference grid.

use crate::model::{
    Basic, Block, Cell, CodeConstraint, Command, Difficulty, Direction, Drawing, Edge, GridWorld,
    Pose, Program, Stmt, Task, TaskCode,
};

fn map_world(
    world: &GridWorld,
    rows: usize,
    cols: usize,
    cell: impl Fn(Cell) -> Cell,
    dir: impl Fn(Direction) -> Direction,
) -> GridWorld {
    let s = cell(world.start.cell());
    let pattern: Drawing = world
        .pattern
        .iter()
        .map(|(e, &color)| {
            let edge = Edge::new(cell(e.from()), cell(e.to())).expect("adjacency is preserved");
            (edge, color)
        })
        .collect();
    GridWorld {
        rows,
        cols,
        start: Pose::new(s.row, s.col, dir(world.start.dir)),
        items: world.items.iter().map(|(&c, &k)| (cell(c), k)).collect(),
        walls: world.walls.iter().map(|&c| cell(c)).collect(),
        forbidden: world.forbidden.iter().map(|&c| cell(c)).collect(),
        pattern,
    }
}

/// 90° counterclockwise: (r, c) in an R×C grid goes to (C−1−c, r) in a C×R grid.
pub fn rotate_ccw(world: &GridWorld) -> GridWorld {
    let cols = world.cols;
    map_world(
        world,
        world.cols,
        world.rows,
        |c| Cell::new(cols - 1 - c.col, c.row),
        Direction::left,
    )
}

/// Left-right mirror: (r, c) goes to (r, C−1−c).
pub fn flip(world: &GridWorld) -> GridWorld {
    let cols = world.cols;
    let dir = |d| match d {
        Direction::East => Direction::West,
        Direction::West => Direction::East,
        other => other,
    };
    map_world(
        world,
        world.rows,
        world.cols,
        |c| Cell::new(c.row, cols - 1 - c.col),
        dir,
    )
}

fn mirror_block(b: Block) -> Block {
    match b {
        Block::Left => Block::Right,
        Block::Right => Block::Left,
        other => other,
    }
}

fn mirror_command(c: Command) -> Command {
    match c {
        Command::Basic(Basic::Left) => Command::Basic(Basic::Right),
        Command::Basic(Basic::Right) => Command::Basic(Basic::Left),
        other => other,
    }
}

/// Swaps every `left` and `right`.
pub fn mirror_code(code: &Program) -> Program {
    Program::new(
        code.stmts
            .iter()
            .map(|s| match s {
                Stmt::Cmd(c) => Stmt::Cmd(mirror_command(*c)),
                Stmt::Repeat { count, body } => Stmt::Repeat {
                    count: *count,
                    body: body.iter().copied().map(mirror_command).collect(),
                },
            })
            .collect(),
    )
}

/// Constraints naming `left` or `right` follow the mirrored code.
fn mirror_constraint(c: &CodeConstraint) -> CodeConstraint {
    match c {
        CodeConstraint::AllowedBlocks(bs) => {
            CodeConstraint::AllowedBlocks(bs.iter().copied().map(mirror_block).collect())
        }
        CodeConstraint::MustUse(b) => CodeConstraint::MustUse(mirror_block(*b)),
        CodeConstraint::Forbid(b) => CodeConstraint::Forbid(mirror_block(*b)),
        CodeConstraint::MaxOccurrences(b, k) => {
            CodeConstraint::MaxOccurrences(mirror_block(*b), *k)
        }
        other => other.clone(),
    }
}

fn flip_pair(task: &Task, code: &Program) -> TaskCode {
    TaskCode::new(
        Task {
            goal: task.goal,
            constraints: task.constraints.iter().map(mirror_constraint).collect(),
            world: flip(&task.world),
        },
        mirror_code(code),
    )
}

/// Easy rotates, Medium mirrors, Hard rotates then mirrors.
pub fn rotate_flip(reference: &TaskCode, difficulty: Difficulty) -> TaskCode {
    let rotated = || Task {
        world: rotate_ccw(&reference.task.world),
        ..reference.task.clone()
    };
    match difficulty {
        Difficulty::Easy => TaskCode::new(rotated(), reference.code.clone()),
        Difficulty::Medium => flip_pair(&reference.task, &reference.code),
        Difficulty::Hard => flip_pair(&rotated(), &reference.code),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::is_solution;
    use crate::lang::parse;
    use crate::model::{Goal, ItemKind};

    fn pair() -> TaskCode {
        let mut world = GridWorld::empty(3, 4, Pose::new(2, 0, Direction::East));
        world.items.insert(Cell::new(1, 1), ItemKind::Lemon);
        world.walls.insert(Cell::new(2, 2));
        let task = Task {
            goal: Goal::Find(ItemKind::Lemon),
            constraints: [CodeConstraint::Forbid(Block::Right)].into(),
            world,
        };
        TaskCode::new(task, parse("forward left forward").unwrap())
    }

    #[test]
    fn easy_rotation_maps_the_turtle() {
        let out = rotate_flip(&pair(), Difficulty::Easy);
        assert_eq!((out.task.world.rows, out.task.world.cols), (4, 3));
        assert_eq!(out.task.world.start, Pose::new(3, 2, Direction::North));
        assert_eq!(out.code, pair().code);
        assert!(is_solution(&out.task, &out.code));
    }

    #[test]
    fn medium_swaps_turns_and_constraints() {
        let out = rotate_flip(&pair(), Difficulty::Medium);
        assert_eq!(out.code, parse("forward right forward").unwrap());
        assert!(out
            .task
            .constraints
            .contains(&CodeConstraint::Forbid(Block::Left)));
        assert!(is_solution(&out.task, &out.code));
        let back = rotate_flip(&out, Difficulty::Medium);
        assert_eq!(back, pair());
    }

    #[test]
    fn four_rotations_are_identity() {
        let w = pair().task.world;
        assert_eq!(rotate_ccw(&rotate_ccw(&rotate_ccw(&rotate_ccw(&w)))), w);
        let hard = rotate_flip(&pair(), Difficulty::Hard);
        assert!(is_solution(&hard.task, &hard.code));
    }
}
