//! Domain types shared by every stage of the pipeline: grid worlds, goals,
//! code constraints, programs and execution trajectories.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ModelError;

pub const MIN_GRID_SIDE: usize = 2;
pub const MAX_GRID_SIDE: usize = 8;
pub const MIN_REPEAT: u8 = 2;
pub const MAX_REPEAT: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "N")]
    North,
    #[serde(rename = "E")]
    East,
    #[serde(rename = "S")]
    South,
    #[serde(rename = "W")]
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub fn right(self) -> Self {
        match self {
            Direction::North => Direction::East,
            Direction::East => Direction::South,
            Direction::South => Direction::West,
            Direction::West => Direction::North,
        }
    }

    pub fn left(self) -> Self {
        match self {
            Direction::North => Direction::West,
            Direction::West => Direction::South,
            Direction::South => Direction::East,
            Direction::East => Direction::North,
        }
    }

    /// Row/column offset of one step forward.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::North => (-1, 0),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
            Direction::West => (0, -1),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Direction::North => 'N',
            Direction::East => 'E',
            Direction::South => 'S',
            Direction::West => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'N' => Direction::North,
            'E' => Direction::East,
            'S' => Direction::South,
            'W' => Direction::West,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col) == 1
    }

    /// The neighbouring cell in `dir`, if it lies inside a `rows`×`cols` grid.
    pub fn step(self, dir: Direction, rows: usize, cols: usize) -> Option<Cell> {
        let (dr, dc) = dir.delta();
        let row = self.row.checked_add_signed(dr)?;
        let col = self.col.checked_add_signed(dc)?;
        (row < rows && col < cols).then_some(Cell { row, col })
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pose {
    pub row: usize,
    pub col: usize,
    pub dir: Direction,
}

impl Pose {
    pub const fn new(row: usize, col: usize, dir: Direction) -> Self {
        Pose { row, col, dir }
    }

    pub fn cell(&self) -> Cell {
        Cell::new(self.row, self.col)
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.row, self.col, self.dir.letter())
    }
}

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn from_name(s: &str) -> Option<Self> {
                match s {
                    $($text => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named_enum!(
    /// Fruit kinds that can be placed on the grid.
    ItemKind {
        Strawberry => "strawberry",
        Lemon => "lemon",
        Apple => "apple",
        Banana => "banana",
    }
);

named_enum!(PenColor {
    Black => "black",
    Red => "red",
    Green => "green",
    Blue => "blue",
    Yellow => "yellow",
    White => "white",
});

named_enum!(
    /// The four movement commands.
    Basic {
        Forward => "forward",
        Back => "back",
        Left => "left",
        Right => "right",
    }
);

named_enum!(
    /// Block names as they appear in code constraints.
    Block {
        Forward => "forward",
        Back => "back",
        Left => "left",
        Right => "right",
        SetPenColor => "setpencolor",
        Repeat => "repeat",
    }
);

named_enum!(Difficulty {
    Easy => "easy",
    Medium => "medium",
    Hard => "hard",
});

impl Basic {
    pub fn block(self) -> Block {
        match self {
            Basic::Forward => Block::Forward,
            Basic::Back => Block::Back,
            Basic::Left => Block::Left,
            Basic::Right => Block::Right,
        }
    }

    pub fn is_turn(self) -> bool {
        matches!(self, Basic::Left | Basic::Right)
    }
}

impl Block {
    pub fn as_basic(self) -> Option<Basic> {
        match self {
            Block::Forward => Some(Basic::Forward),
            Block::Back => Some(Basic::Back),
            Block::Left => Some(Basic::Left),
            Block::Right => Some(Basic::Right),
            Block::SetPenColor | Block::Repeat => None,
        }
    }
}

/// An undirected grid edge between two 4-adjacent cells, stored with the
/// smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    a: Cell,
    b: Cell,
}

impl Edge {
    pub fn new(x: Cell, y: Cell) -> Result<Self, ModelError> {
        if !x.is_adjacent(y) {
            return Err(ModelError::NotAdjacent(x, y));
        }
        Ok(if x <= y {
            Edge { a: x, b: y }
        } else {
            Edge { a: y, b: x }
        })
    }

    pub fn from(&self) -> Cell {
        self.a
    }

    pub fn to(&self) -> Cell {
        self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub edge: Edge,
    pub color: PenColor,
}

/// Colored edges, at most one color per edge.
pub type Drawing = BTreeMap<Edge, PenColor>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWorld {
    pub rows: usize,
    pub cols: usize,
    pub start: Pose,
    pub items: BTreeMap<Cell, ItemKind>,
    pub walls: BTreeSet<Cell>,
    pub forbidden: BTreeSet<Cell>,
    pub pattern: Drawing,
}

impl GridWorld {
    /// An element-free world.
    pub fn empty(rows: usize, cols: usize, start: Pose) -> Self {
        GridWorld {
            rows,
            cols,
            start,
            items: BTreeMap::new(),
            walls: BTreeSet::new(),
            forbidden: BTreeSet::new(),
            pattern: Drawing::new(),
        }
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| Cell::new(r, c)))
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.pattern
            .iter()
            .map(|(&edge, &color)| Segment { edge, color })
    }

    pub fn element_count(&self) -> usize {
        self.items.len() + self.walls.len() + self.forbidden.len()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for side in [self.rows, self.cols] {
            if !(MIN_GRID_SIDE..=MAX_GRID_SIDE).contains(&side) {
                return Err(ModelError::GridSize(self.rows, self.cols));
            }
        }
        let start = self.start.cell();
        if !self.contains(start) {
            return Err(ModelError::OutOfGrid(start));
        }
        if self.walls.contains(&start) || self.forbidden.contains(&start) {
            return Err(ModelError::BlockedStart(start));
        }
        let cells = self
            .items
            .keys()
            .chain(&self.walls)
            .chain(&self.forbidden)
            .chain(self.pattern.keys().flat_map(|e| [&e.a, &e.b]));
        for &cell in cells {
            if !self.contains(cell) {
                return Err(ModelError::OutOfGrid(cell));
            }
        }
        for cell in self.items.keys().chain(&self.walls) {
            if self.forbidden.contains(cell) {
                return Err(ModelError::Overlap(*cell));
            }
        }
        for cell in self.items.keys() {
            if self.walls.contains(cell) {
                return Err(ModelError::Overlap(*cell));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GoalKind {
    Find,
    CollectAll,
    Draw,
}

impl GoalKind {
    pub fn name(self) -> &'static str {
        match self {
            GoalKind::Find => "find",
            GoalKind::CollectAll => "collect_all",
            GoalKind::Draw => "draw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Goal {
    Find(ItemKind),
    CollectAll(ItemKind),
    Draw,
}

impl Goal {
    pub fn kind(&self) -> GoalKind {
        match self {
            Goal::Find(_) => GoalKind::Find,
            Goal::CollectAll(_) => GoalKind::CollectAll,
            Goal::Draw => GoalKind::Draw,
        }
    }

    pub fn item(&self) -> Option<ItemKind> {
        match *self {
            Goal::Find(item) | Goal::CollectAll(item) => Some(item),
            Goal::Draw => None,
        }
    }

    pub fn with_kind(kind: GoalKind, item: ItemKind) -> Self {
        match kind {
            GoalKind::Find => Goal::Find(item),
            GoalKind::CollectAll => Goal::CollectAll(item),
            GoalKind::Draw => Goal::Draw,
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Find(item) => write!(f, "find the {item}"),
            Goal::CollectAll(item) => write!(f, "collect every {item}"),
            Goal::Draw => f.write_str("draw the pattern"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CodeConstraint {
    AtMostCommands(usize),
    ExactlyCommands(usize),
    AllowedBlocks(BTreeSet<Block>),
    MustUse(Block),
    Forbid(Block),
    MaxOccurrences(Block, usize),
}

impl fmt::Display for CodeConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeConstraint::AtMostCommands(n) => write!(f, "at most {n} commands"),
            CodeConstraint::ExactlyCommands(n) => write!(f, "exactly {n} commands"),
            CodeConstraint::AllowedBlocks(blocks) => {
                let names: Vec<_> = blocks.iter().map(|b| b.name()).collect();
                write!(f, "only blocks {{{}}}", names.join(", "))
            }
            CodeConstraint::MustUse(b) => write!(f, "must use {b}"),
            CodeConstraint::Forbid(b) => write!(f, "must not use {b}"),
            CodeConstraint::MaxOccurrences(b, k) => write!(f, "use {b} at most {k} times"),
        }
    }
}

pub type ConstraintSet = BTreeSet<CodeConstraint>;

pub fn validate_constraints(constraints: &ConstraintSet) -> Result<(), ModelError> {
    for c in constraints {
        match c {
            CodeConstraint::AtMostCommands(0)
            | CodeConstraint::ExactlyCommands(0)
            | CodeConstraint::MaxOccurrences(_, 0) => {
                return Err(ModelError::Constraint(format!(
                    "`{c}` needs a positive bound"
                )))
            }
            CodeConstraint::AllowedBlocks(blocks) if blocks.is_empty() => {
                return Err(ModelError::Constraint("empty allowed-block set".into()))
            }
            CodeConstraint::Forbid(b) if constraints.contains(&CodeConstraint::MustUse(*b)) => {
                return Err(ModelError::Constraint(format!(
                    "`{b}` is both required and forbidden"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub goal: Goal,
    pub constraints: ConstraintSet,
    pub world: GridWorld,
}

impl Task {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.world.validate()?;
        validate_constraints(&self.constraints)?;
        match self.goal {
            Goal::Draw if self.world.pattern.is_empty() => Err(ModelError::Goal(
                "a draw goal needs a nonempty pattern".into(),
            )),
            Goal::Find(_) | Goal::CollectAll(_) if !self.world.pattern.is_empty() => Err(
                ModelError::Goal("only draw goals may carry a pattern".into()),
            ),
            Goal::Find(_) if self.world.items.contains_key(&self.world.start.cell()) => Err(
                ModelError::Goal("find goals may not have an item on the start cell".into()),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Basic(Basic),
    Pen(PenColor),
}

impl Command {
    pub fn block(self) -> Block {
        match self {
            Command::Basic(b) => b.block(),
            Command::Pen(_) => Block::SetPenColor,
        }
    }
}

impl From<Basic> for Command {
    fn from(b: Basic) -> Self {
        Command::Basic(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stmt {
    Cmd(Command),
    Repeat { count: u8, body: Vec<Command> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

impl Program {
    pub fn new(stmts: Vec<Stmt>) -> Self {
        Program { stmts }
    }

    pub fn from_commands(cmds: impl IntoIterator<Item = Command>) -> Self {
        Program::new(cmds.into_iter().map(Stmt::Cmd).collect())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for stmt in &self.stmts {
            if let Stmt::Repeat { count, body } = stmt {
                if !(MIN_REPEAT..=MAX_REPEAT).contains(count) {
                    return Err(ModelError::RepeatCount(*count));
                }
                if body.is_empty() {
                    return Err(ModelError::EmptyRepeat);
                }
            }
        }
        Ok(())
    }

    /// Commands in execution order, with every repeat unrolled.
    pub fn unrolled(&self) -> impl Iterator<Item = Command> + '_ {
        self.stmts.iter().flat_map(|stmt| {
            let (times, cmds) = match stmt {
                Stmt::Cmd(c) => (1, std::slice::from_ref(c)),
                Stmt::Repeat { count, body } => (*count as usize, body.as_slice()),
            };
            (0..times).flat_map(move |_| cmds.iter().copied())
        })
    }

    /// Commands as written: repeat bodies appear once, repeat headers not at all.
    pub fn written(&self) -> impl Iterator<Item = Command> + '_ {
        self.stmts.iter().flat_map(|stmt| match stmt {
            Stmt::Cmd(c) => std::slice::from_ref(c).iter().copied(),
            Stmt::Repeat { body, .. } => body.iter().copied(),
        })
    }

    /// How many times `block` appears as written. For `repeat` this is the
    /// number of repeat statements.
    pub fn occurrences(&self, block: Block) -> usize {
        if block == Block::Repeat {
            return self
                .stmts
                .iter()
                .filter(|s| matches!(s, Stmt::Repeat { .. }))
                .count();
        }
        self.written().filter(|c| c.block() == block).count()
    }

    pub fn blocks_used(&self) -> BTreeSet<Block> {
        Block::ALL
            .iter()
            .copied()
            .filter(|&b| self.occurrences(b) > 0)
            .collect()
    }

    pub fn concat(&self, other: &Program) -> Program {
        Program::new(self.stmts.iter().chain(&other.stmts).cloned().collect())
    }
}

/// Number of basic and pen-color tokens as written; a repeat body counts once
/// and the repeat header counts zero.
pub fn code_length(code: &Program) -> usize {
    code.written().count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CrashReason {
    OffGrid,
    Wall,
    Forbidden,
}

impl CrashReason {
    pub fn name(self) -> &'static str {
        match self {
            CrashReason::OffGrid => "off_grid",
            CrashReason::Wall => "wall",
            CrashReason::Forbidden => "forbidden",
        }
    }
}

impl fmt::Display for CrashReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    /// One pose for the start plus one per executed move or turn.
    pub poses: Vec<Pose>,
    /// Start cell followed by every cell entered, revisits included.
    pub visited: Vec<Cell>,
    pub segments: Drawing,
    pub crash: Option<CrashReason>,
}

impl Trajectory {
    pub fn crashed(&self) -> bool {
        self.crash.is_some()
    }

    pub fn final_pose(&self) -> Pose {
        *self
            .poses
            .last()
            .expect("trajectory always holds the start pose")
    }

    pub fn final_cell(&self) -> Cell {
        self.final_pose().cell()
    }

    pub fn visited_set(&self) -> BTreeSet<Cell> {
        self.visited.iter().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskCode {
    pub task: Task,
    pub code: Program,
}

impl TaskCode {
    pub fn new(task: Task, code: Program) -> Self {
        TaskCode { task, code }
    }
}

/// SHA-256 over the canonical task JSON and canonical code text, hex-encoded.
/// Both encodings sort every collection, so insertion order never matters.
pub fn canonical_hash(task: &Task, code: &Program) -> String {
    let mut hasher = Sha256::new();
    hasher.update(crate::format::task_to_json(task).as_bytes());
    hasher.update([0u8]);
    hasher.update(crate::lang::print(code).as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn rotation_cycles() {
        for d in Direction::ALL {
            assert_eq!(d.right().right().right().right(), d);
            assert_eq!(d.left(), d.right().right().right());
        }
    }

    #[test]
    fn code_length_counts_written_tokens() {
        assert_eq!(code_length(&Program::default()), 0);
        assert_eq!(code_length(&parse("forward left forward").unwrap()), 3);
        assert_eq!(code_length(&parse("repeat 4 { forward left }").unwrap()), 2);
        assert_eq!(
            code_length(&parse("setpencolor red repeat 3 { forward }").unwrap()),
            2
        );
    }

    #[test]
    fn code_length_is_additive() {
        let a = parse("forward repeat 2 { left back }").unwrap();
        let b = parse("setpencolor blue right").unwrap();
        assert_eq!(
            code_length(&a.concat(&b)),
            code_length(&a) + code_length(&b)
        );
    }

    #[test]
    fn occurrences_treat_repeat_as_a_block() {
        let code = parse("forward repeat 2 { forward left } repeat 3 { back }").unwrap();
        assert_eq!(code.occurrences(Block::Repeat), 2);
        assert_eq!(code.occurrences(Block::Forward), 2);
        assert_eq!(code.occurrences(Block::Right), 0);
    }

    #[test]
    fn edge_normalizes_endpoints() {
        let a = Cell::new(1, 1);
        let b = Cell::new(1, 2);
        assert_eq!(Edge::new(a, b).unwrap(), Edge::new(b, a).unwrap());
        assert!(Edge::new(a, Cell::new(2, 2)).is_err());
    }

    fn sample_task() -> Task {
        let mut world = GridWorld::empty(5, 5, Pose::new(4, 0, Direction::East));
        world.items.insert(Cell::new(4, 2), ItemKind::Strawberry);
        world.items.insert(Cell::new(0, 0), ItemKind::Lemon);
        world.walls.insert(Cell::new(3, 3));
        Task {
            goal: Goal::Find(ItemKind::Strawberry),
            constraints: [CodeConstraint::AtMostCommands(2)].into(),
            world,
        }
    }

    #[test]
    fn canonical_hash_ignores_insertion_order() {
        let task = sample_task();
        let mut shuffled = GridWorld::empty(5, 5, task.world.start);
        shuffled.walls.insert(Cell::new(3, 3));
        shuffled.items.insert(Cell::new(0, 0), ItemKind::Lemon);
        shuffled.items.insert(Cell::new(4, 2), ItemKind::Strawberry);
        let other = Task {
            world: shuffled,
            ..task.clone()
        };
        let code = parse("forward forward").unwrap();
        assert_eq!(canonical_hash(&task, &code), canonical_hash(&other, &code));
        assert_eq!(canonical_hash(&task, &code).len(), 64);
    }

    #[test]
    fn canonical_hash_sees_content_changes() {
        let task = sample_task();
        let code = parse("forward forward").unwrap();
        let mut moved = task.clone();
        moved.world.walls = [Cell::new(2, 3)].into();
        assert_ne!(canonical_hash(&task, &code), canonical_hash(&moved, &code));
        let longer = parse("forward forward forward").unwrap();
        assert_ne!(canonical_hash(&task, &code), canonical_hash(&task, &longer));
    }

    #[test]
    fn task_validation_rejects_overlaps_and_bad_goals() {
        let mut task = sample_task();
        assert!(task.validate().is_ok());
        task.world.walls.insert(Cell::new(4, 2));
        assert!(matches!(task.validate(), Err(ModelError::Overlap(_))));

        let mut task = sample_task();
        task.world.items.insert(Cell::new(4, 0), ItemKind::Apple);
        assert!(matches!(task.validate(), Err(ModelError::Goal(_))));

        let mut task = sample_task();
        task.goal = Goal::Draw;
        assert!(matches!(task.validate(), Err(ModelError::Goal(_))));

        let mut task = sample_task();
        task.constraints
            .insert(CodeConstraint::MustUse(Block::Back));
        task.constraints.insert(CodeConstraint::Forbid(Block::Back));
        assert!(matches!(task.validate(), Err(ModelError::Constraint(_))));

        let mut task = sample_task();
        task.world.rows = 9;
        assert!(matches!(task.validate(), Err(ModelError::GridSize(..))));
    }
}
