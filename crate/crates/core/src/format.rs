//! Task files.
//!
//! ```json
//! {
//!   "constraints": [{"n": 5, "type": "at_most_commands"}],
//!   "forbidden": [],
//!   "goal": {"item": "strawberry", "type": "find"},
//!   "grid": {"cols": 5, "rows": 5},
//!   "items": [{"col": 2, "kind": "strawberry", "row": 2}],
//!   "pattern": [],
//!   "turtle": {"col": 0, "dir": "N", "row": 4},
//!   "walls": [{"col": 1, "row": 3}]
//! }
//! ```
//!
//! Output is canonical: keys sorted, arrays sorted by (row, col), constraints
//! in their natural order. Missing arrays read as empty.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::model::{
    Block, Cell, CodeConstraint, Direction, Edge, Goal, GridWorld, ItemKind, PenColor, Pose, Task,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    rows: usize,
    cols: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TurtleFile {
    row: usize,
    col: usize,
    dir: Direction,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    row: usize,
    col: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemFile {
    row: usize,
    col: usize,
    kind: ItemKind,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentFile {
    from: [usize; 2],
    to: [usize; 2],
    color: PenColor,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum GoalFile {
    Find { item: ItemKind },
    CollectAll { item: ItemKind },
    Draw,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ConstraintFile {
    AtMostCommands { n: usize },
    ExactlyCommands { n: usize },
    AllowedBlocks { blocks: Vec<Block> },
    MustUse { block: Block },
    Forbid { block: Block },
    MaxOccurrences { block: Block, k: usize },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskFile {
    grid: GridFile,
    turtle: TurtleFile,
    #[serde(default)]
    items: Vec<ItemFile>,
    #[serde(default)]
    walls: Vec<CellFile>,
    #[serde(default)]
    forbidden: Vec<CellFile>,
    #[serde(default)]
    pattern: Vec<SegmentFile>,
    goal: GoalFile,
    #[serde(default)]
    constraints: Vec<ConstraintFile>,
}

fn cell_file(c: &Cell) -> CellFile {
    CellFile {
        row: c.row,
        col: c.col,
    }
}

fn to_file(task: &Task) -> TaskFile {
    let w = &task.world;
    TaskFile {
        grid: GridFile {
            rows: w.rows,
            cols: w.cols,
        },
        turtle: TurtleFile {
            row: w.start.row,
            col: w.start.col,
            dir: w.start.dir,
        },
        items: w
            .items
            .iter()
            .map(|(c, &kind)| ItemFile {
                row: c.row,
                col: c.col,
                kind,
            })
            .collect(),
        walls: w.walls.iter().map(cell_file).collect(),
        forbidden: w.forbidden.iter().map(cell_file).collect(),
        pattern: w
            .segments()
            .map(|s| SegmentFile {
                from: [s.edge.from().row, s.edge.from().col],
                to: [s.edge.to().row, s.edge.to().col],
                color: s.color,
            })
            .collect(),
        goal: match task.goal {
            Goal::Find(item) => GoalFile::Find { item },
            Goal::CollectAll(item) => GoalFile::CollectAll { item },
            Goal::Draw => GoalFile::Draw,
        },
        constraints: task
            .constraints
            .iter()
            .map(|c| match c {
                CodeConstraint::AtMostCommands(n) => ConstraintFile::AtMostCommands { n: *n },
                CodeConstraint::ExactlyCommands(n) => ConstraintFile::ExactlyCommands { n: *n },
                CodeConstraint::AllowedBlocks(b) => ConstraintFile::AllowedBlocks {
                    blocks: b.iter().copied().collect(),
                },
                CodeConstraint::MustUse(block) => ConstraintFile::MustUse { block: *block },
                CodeConstraint::Forbid(block) => ConstraintFile::Forbid { block: *block },
                CodeConstraint::MaxOccurrences(block, k) => ConstraintFile::MaxOccurrences {
                    block: *block,
                    k: *k,
                },
            })
            .collect(),
    }
}

fn from_file(file: TaskFile) -> Result<Task, FormatError> {
    let mut world = GridWorld::empty(
        file.grid.rows,
        file.grid.cols,
        Pose::new(file.turtle.row, file.turtle.col, file.turtle.dir),
    );
    let dup = |what: &str, c: Cell| FormatError::Schema(format!("duplicate {what} at {c}"));
    for it in file.items {
        let cell = Cell::new(it.row, it.col);
        if world.items.insert(cell, it.kind).is_some() {
            return Err(dup("item", cell));
        }
    }
    for c in file.walls {
        let cell = Cell::new(c.row, c.col);
        if !world.walls.insert(cell) {
            return Err(dup("wall", cell));
        }
    }
    for c in file.forbidden {
        let cell = Cell::new(c.row, c.col);
        if !world.forbidden.insert(cell) {
            return Err(dup("forbidden cell", cell));
        }
    }
    for s in file.pattern {
        let (a, b) = (Cell::new(s.from[0], s.from[1]), Cell::new(s.to[0], s.to[1]));
        let edge = Edge::new(a, b)?;
        if world.pattern.insert(edge, s.color).is_some() {
            return Err(FormatError::Schema(format!(
                "duplicate pattern edge {a}-{b}"
            )));
        }
    }
    let goal = match file.goal {
        GoalFile::Find { item } => Goal::Find(item),
        GoalFile::CollectAll { item } => Goal::CollectAll(item),
        GoalFile::Draw => Goal::Draw,
    };
    let mut constraints = BTreeSet::new();
    for c in file.constraints {
        let c = match c {
            ConstraintFile::AtMostCommands { n } => CodeConstraint::AtMostCommands(n),
            ConstraintFile::ExactlyCommands { n } => CodeConstraint::ExactlyCommands(n),
            ConstraintFile::AllowedBlocks { blocks } => {
                CodeConstraint::AllowedBlocks(blocks.into_iter().collect())
            }
            ConstraintFile::MustUse { block } => CodeConstraint::MustUse(block),
            ConstraintFile::Forbid { block } => CodeConstraint::Forbid(block),
            ConstraintFile::MaxOccurrences { block, k } => CodeConstraint::MaxOccurrences(block, k),
        };
        if !constraints.insert(c.clone()) {
            return Err(FormatError::Schema(format!("duplicate constraint `{c}`")));
        }
    }
    let task = Task {
        goal,
        constraints,
        world,
    };
    task.validate()?;
    Ok(task)
}

/// Parses and validates a task file.
pub fn task_from_json(text: &str) -> Result<Task, FormatError> {
    let file: TaskFile = serde_json::from_str(text)?;
    from_file(file)
}

/// Canonical pretty-printed JSON, without a trailing newline.
pub fn task_to_json(task: &Task) -> String {
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(to_file(task)).expect("task file serializes");
    serde_json::to_string_pretty(&value).expect("value serializes")
}
