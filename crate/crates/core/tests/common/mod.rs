//! Generators and independent reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use tasksyn::emulator::is_solution;
use tasksyn::fdsolver::Csp;
use tasksyn::model::{
    Basic, Block, Cell, CodeConstraint, Command, ConstraintSet, Direction, Edge, Goal, GridWorld,
    ItemKind, PenColor, Pose, Program, Stmt, Task, MAX_REPEAT, MIN_REPEAT,
};

pub fn any_direction() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

pub fn any_item() -> impl Strategy<Value = ItemKind> {
    prop::sample::select(ItemKind::ALL.to_vec())
}

pub fn any_color() -> impl Strategy<Value = PenColor> {
    prop::sample::select(PenColor::ALL.to_vec())
}

pub fn any_block() -> impl Strategy<Value = Block> {
    prop::sample::select(Block::ALL.to_vec())
}

pub fn any_command() -> impl Strategy<Value = Command> {
    prop_oneof![
        4 => prop::sample::select(Basic::ALL.to_vec()).prop_map(Command::Basic),
        1 => any_color().prop_map(Command::Pen),
    ]
}

pub fn any_stmt() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        3 => any_command().prop_map(Stmt::Cmd),
        1 => (MIN_REPEAT..=MAX_REPEAT, prop::collection::vec(any_command(), 1..4))
            .prop_map(|(count, body)| Stmt::Repeat { count, body }),
    ]
}

pub fn any_program() -> impl Strategy<Value = Program> {
    prop::collection::vec(any_stmt(), 0..8).prop_map(Program::new)
}

fn any_constraint() -> impl Strategy<Value = CodeConstraint> {
    prop_oneof![
        (1usize..12).prop_map(CodeConstraint::AtMostCommands),
        (1usize..12).prop_map(CodeConstraint::ExactlyCommands),
        prop::collection::btree_set(any_block(), 1..6).prop_map(CodeConstraint::AllowedBlocks),
        any_block().prop_map(CodeConstraint::MustUse),
        any_block().prop_map(CodeConstraint::Forbid),
        (any_block(), 1usize..5).prop_map(|(b, k)| CodeConstraint::MaxOccurrences(b, k)),
    ]
}

pub fn any_constraints() -> impl Strategy<Value = ConstraintSet> {
    prop::collection::vec(any_constraint(), 0..4).prop_map(|cs| {
        let mut set = ConstraintSet::new();
        for c in cs {
            if let CodeConstraint::Forbid(b) = c {
                if set.contains(&CodeConstraint::MustUse(b)) {
                    continue;
                }
            }
            if let CodeConstraint::MustUse(b) = c {
                if set.contains(&CodeConstraint::Forbid(b)) {
                    continue;
                }
            }
            set.insert(c);
        }
        set
    })
}

#[derive(Debug, Clone, Copy)]
enum Element {
    Item(ItemKind),
    Wall,
    Forbidden,
    Stroke(Direction, PenColor),
}

fn any_element() -> impl Strategy<Value = Element> {
    prop_oneof![
        any_item().prop_map(Element::Item),
        Just(Element::Wall),
        Just(Element::Forbidden),
        (any_direction(), any_color()).prop_map(|(d, c)| Element::Stroke(d, c)),
    ]
}

/// Any valid task, including ones no code solves.
pub fn any_task() -> impl Strategy<Value = Task> {
    (2usize..=8, 2usize..=8)
        .prop_flat_map(|(rows, cols)| {
            (
                Just((rows, cols)),
                (0..rows, 0..cols, any_direction()),
                prop::collection::vec(((0..rows, 0..cols), any_element()), 0..14),
                any_item(),
                0u8..3,
                any_constraints(),
            )
        })
        .prop_map(
            |((rows, cols), (r, c, d), elements, item, goal_pick, constraints)| {
                let start = Pose::new(r, c, d);
                let mut world = GridWorld::empty(rows, cols, start);
                let strokes_allowed = goal_pick == 2;
                for ((r, c), e) in elements {
                    let cell = Cell::new(r, c);
                    let free = !world.items.contains_key(&cell)
                        && !world.walls.contains(&cell)
                        && !world.forbidden.contains(&cell);
                    match e {
                        Element::Item(k) if free && cell != start.cell() => {
                            world.items.insert(cell, k);
                        }
                        Element::Wall if free && cell != start.cell() => {
                            world.walls.insert(cell);
                        }
                        Element::Forbidden if free && cell != start.cell() => {
                            world.forbidden.insert(cell);
                        }
                        Element::Stroke(dir, color) if strokes_allowed => {
                            if let Some(next) = cell.step(dir, rows, cols) {
                                world.pattern.insert(Edge::new(cell, next).unwrap(), color);
                            }
                        }
                        _ => {}
                    }
                }
                let goal = match goal_pick {
                    0 => Goal::Find(item),
                    1 => Goal::CollectAll(item),
                    _ if world.pattern.is_empty() => Goal::CollectAll(item),
                    _ => Goal::Draw,
                };
                Task {
                    goal,
                    constraints,
                    world,
                }
            },
        )
}

/// Straightforward interpreter written independently of the emulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveRun {
    pub poses: Vec<Pose>,
    pub cells: Vec<Cell>,
    pub strokes: BTreeMap<(Cell, Cell), PenColor>,
    pub crash: Option<&'static str>,
}

pub fn naive_run(program: &Program, world: &GridWorld) -> NaiveRun {
    let mut flat = Vec::new();
    for s in &program.stmts {
        match s {
            Stmt::Cmd(c) => flat.push(*c),
            Stmt::Repeat { count, body } => {
                for _ in 0..*count {
                    flat.extend(body.iter().copied());
                }
            }
        }
    }
    let (mut r, mut c) = (world.start.row as i64, world.start.col as i64);
    // Headings clockwise from north.
    let mut h = Direction::ALL
        .iter()
        .position(|d| *d == world.start.dir)
        .unwrap() as i64;
    let mut pen = PenColor::Black;
    let mut run = NaiveRun {
        poses: vec![world.start],
        cells: vec![world.start.cell()],
        strokes: BTreeMap::new(),
        crash: None,
    };
    for cmd in flat {
        let step = match cmd {
            Command::Pen(color) => {
                pen = color;
                continue;
            }
            Command::Basic(Basic::Left) => {
                h = (h + 3) % 4;
                None
            }
            Command::Basic(Basic::Right) => {
                h = (h + 1) % 4;
                None
            }
            Command::Basic(Basic::Forward) => Some(1),
            Command::Basic(Basic::Back) => Some(-1),
        };
        let dir = Direction::ALL[h as usize];
        if let Some(sign) = step {
            let (dr, dc) = [(-1, 0), (0, 1), (1, 0), (0, -1)][h as usize];
            let (nr, nc) = (r + sign * dr, c + sign * dc);
            if nr < 0 || nc < 0 || nr >= world.rows as i64 || nc >= world.cols as i64 {
                run.crash = Some("off_grid");
                break;
            }
            let next = Cell::new(nr as usize, nc as usize);
            if world.walls.contains(&next) {
                run.crash = Some("wall");
                break;
            }
            if world.forbidden.contains(&next) {
                run.crash = Some("forbidden");
                break;
            }
            let here = Cell::new(r as usize, c as usize);
            run.strokes.insert((here.min(next), here.max(next)), pen);
            run.cells.push(next);
            r = nr;
            c = nc;
        }
        run.poses.push(Pose::new(r as usize, c as usize, dir));
    }
    run
}

/// Every program with a single repeat or none, `len` tokens long, over all
/// commands.
pub fn all_programs(len: usize) -> Vec<Program> {
    let mut tokens: Vec<Command> = Basic::ALL.iter().map(|&b| Command::Basic(b)).collect();
    tokens.extend(PenColor::ALL.iter().map(|&c| Command::Pen(c)));
    let mut seqs: Vec<Vec<Command>> = vec![vec![]];
    for _ in 0..len {
        seqs = seqs
            .into_iter()
            .flat_map(|s| {
                tokens.iter().map(move |&t| {
                    let mut v = s.clone();
                    v.push(t);
                    v
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for seq in seqs {
        out.push(Program::from_commands(seq.iter().copied()));
        for start in 0..len {
            for end in start + 1..=len {
                for count in MIN_REPEAT..=MAX_REPEAT {
                    let mut stmts: Vec<Stmt> = seq[..start].iter().map(|&c| Stmt::Cmd(c)).collect();
                    stmts.push(Stmt::Repeat {
                        count,
                        body: seq[start..end].to_vec(),
                    });
                    stmts.extend(seq[end..].iter().map(|&c| Stmt::Cmd(c)));
                    out.push(Program::new(stmts));
                }
            }
        }
    }
    out
}

/// True iff no program (flat or with one repeat) shorter than `max_len` solves `task`.
pub fn naive_minimal(task: &Task, max_len: usize) -> bool {
    (0..max_len).all(|len| all_programs(len).iter().all(|p| !is_solution(task, p)))
}

/// Random small CSP over integers: variable domains and a list of
/// constraints picked from a fixed menu.
#[derive(Debug, Clone)]
pub struct CspSpec {
    pub domains: Vec<Vec<i32>>,
    pub constraints: Vec<(u8, Vec<usize>, i32)>,
}

pub fn any_csp_spec() -> impl Strategy<Value = CspSpec> {
    prop::collection::vec(prop::collection::btree_set(0i32..8, 1..6), 1..7)
        .prop_flat_map(|domains| {
            let n = domains.len();
            let constraint = (0u8..5, prop::collection::vec(0..n, 1..4), 0i32..6);
            (
                Just(
                    domains
                        .into_iter()
                        .map(|d| d.into_iter().collect())
                        .collect::<Vec<Vec<i32>>>(),
                ),
                prop::collection::vec(constraint, 0..6),
            )
        })
        .prop_map(|(domains, constraints)| CspSpec {
            domains,
            constraints,
        })
}

fn holds(kind: u8, vals: &[i32], k: i32) -> bool {
    match kind {
        0 => vals.windows(2).all(|w| w[0] != w[1]),
        1 => vals.windows(2).all(|w| w[0] <= w[1]),
        2 => vals.iter().sum::<i32>() % 3 == k % 3,
        3 => vals.iter().sum::<i32>() <= k + 4,
        _ => vals[0] != k,
    }
}

impl CspSpec {
    pub fn space(&self) -> usize {
        self.domains.iter().map(Vec::len).product()
    }

    pub fn build(&self) -> Csp<i32> {
        let mut csp = Csp::new();
        for (i, d) in self.domains.iter().enumerate() {
            csp.add_var(format!("v{i}"), d.clone()).unwrap();
        }
        for (j, (kind, scope, k)) in self.constraints.iter().cloned().enumerate() {
            csp.add_constraint(format!("c{j}"), scope, move |vals| {
                let v: Vec<i32> = vals.iter().map(|x| **x).collect();
                holds(kind, &v, k)
            })
            .unwrap();
        }
        csp
    }

    pub fn brute_force(&self) -> BTreeSet<Vec<i32>> {
        let mut all: Vec<Vec<i32>> = vec![vec![]];
        for d in &self.domains {
            all = all
                .into_iter()
                .flat_map(|a| {
                    d.iter().map(move |&x| {
                        let mut v = a.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        all.into_iter()
            .filter(|a| {
                self.constraints.iter().all(|(kind, scope, k)| {
                    let v: Vec<i32> = scope.iter().map(|&i| a[i]).collect();
                    holds(*kind, &v, *k)
                })
            })
            .collect()
    }
}

/// Inputs for a generated task with a known solution.
#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub code: Program,
    pub rows: usize,
    pub cols: usize,
    pub goal: Goal,
    pub forbid_repeat: bool,
    pub seed: u64,
}

pub fn small_case(max_len: usize) -> impl Strategy<Value = CaseSpec> {
    (
        prop::collection::vec(any_stmt(), 1..5)
            .prop_map(Program::new)
            .prop_filter("length", move |p| {
                (1..=max_len).contains(&tasksyn::model::code_length(p))
            }),
        3usize..=5,
        3usize..=5,
        0u8..3,
        any_item(),
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(
            |(code, rows, cols, g, item, forbid_repeat, seed)| CaseSpec {
                code,
                rows,
                cols,
                goal: match g {
                    0 => Goal::Find(item),
                    1 => Goal::CollectAll(item),
                    _ => Goal::Draw,
                },
                forbid_repeat,
                seed,
            },
        )
}

impl CaseSpec {
    /// A task around `code` built by world generation; `None` when the code
    /// does not fit or draws nothing for a draw goal.
    pub fn build(&self) -> Option<Task> {
        let len = tasksyn::model::code_length(&self.code);
        let mut constraints: ConstraintSet = [CodeConstraint::AtMostCommands(len)].into();
        if self.forbid_repeat && self.code.occurrences(Block::Repeat) == 0 {
            constraints.insert(CodeConstraint::Forbid(Block::Repeat));
        }
        let world = tasksyn::worldgen::generate_world(&tasksyn::worldgen::WorldRequest {
            code: &self.code,
            goal: self.goal,
            constraints: &constraints,
            rows: self.rows,
            cols: self.cols,
            reference_forbidden: 1,
            seed: self.seed,
        })
        .ok()?;
        Some(Task {
            goal: self.goal,
            constraints,
            world,
        })
    }
}
