//! Grid-world construction around a code's trajectory.
//!
//! A start pose is sampled, the code is traced on the empty grid, and a
//! placement CSP decides where items, walls and forbidden cells go:
//!
//! * nothing blocking ever lands on the trajectory;
//! * find: the target sits on the final cell only, other kinds stay off the path;
//! * collect-all: the target sits on 2 to 4 path cells including the final one;
//! * draw: the pattern is exactly the traced segments and there are no items;
//! * 0 to 3 distractor items of other kinds off the path (not for draw);
//! * 1 to ⌊rows·cols/5⌋ walls off the path, one of them touching it when
//!   some off-path cell touches it;
//! * forbidden cells only when the reference had some, count kept within ±1.

use std::collections::BTreeSet;

use crate::emulator::is_solution;
use crate::error::GenError;
use crate::fdsolver::{solve_stream, Csp};
use crate::model::{
    Cell, ConstraintSet, Goal, GridWorld, ItemKind, Pose, Program, Task, Trajectory,
};
use crate::seed;
use crate::symexec::{sample_valid_pose, trace_on_empty};

pub const PLACEMENT_ATTEMPTS: u64 = 50;
/// Assignments taken from one placement stream before resampling the pose.
const ASSIGNMENTS_PER_ATTEMPT: usize = 8;
pub const MAX_DISTRACTORS: usize = 3;
pub const MIN_COLLECT: usize = 2;
pub const MAX_COLLECT: usize = 4;

#[derive(Debug, Clone)]
pub struct WorldRequest<'a> {
    pub code: &'a Program,
    pub goal: Goal,
    pub constraints: &'a ConstraintSet,
    pub rows: usize,
    pub cols: usize,
    /// Forbidden cells in the reference task.
    pub reference_forbidden: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placement {
    Count(usize),
    Cell(Option<Cell>),
    Item(Option<(Cell, ItemKind)>),
}

impl Placement {
    fn cell(&self) -> Option<Cell> {
        match *self {
            Placement::Cell(c) => c,
            Placement::Item(x) => x.map(|(c, _)| c),
            Placement::Count(_) => None,
        }
    }

    fn count(&self) -> usize {
        match *self {
            Placement::Count(n) => n,
            _ => unreachable!("count variable"),
        }
    }

    fn present(&self) -> bool {
        self.cell().is_some()
    }
}

struct SlotGroup {
    count_var: usize,
    slots: Vec<usize>,
}

/// Variables of the placement problem, kept for decoding assignments.
struct PlacementCsp {
    csp: Csp<Placement>,
    collect: Option<SlotGroup>,
    distractors: SlotGroup,
    walls: SlotGroup,
    forbidden: SlotGroup,
}

fn counted_group(
    csp: &mut Csp<Placement>,
    name: &str,
    counts: Vec<usize>,
    slot_domains: Vec<Vec<Placement>>,
) -> SlotGroup {
    let count_var = csp
        .add_var(
            format!("{name}_count"),
            counts.into_iter().map(Placement::Count).collect(),
        )
        .expect("nonempty count domain");
    let mut slots = Vec::new();
    for (i, domain) in slot_domains.into_iter().enumerate() {
        let var = csp
            .add_var(format!("{name}{i}"), domain)
            .expect("nonempty slot domain");
        csp.add_constraint(
            format!("{name}{i}_presence"),
            vec![count_var, var],
            move |v| (i < v[0].count()) == v[1].present(),
        )
        .expect("scope in range");
        slots.push(var);
    }
    SlotGroup { count_var, slots }
}

fn build_placement(req: &WorldRequest<'_>, traj: &Trajectory) -> Option<PlacementCsp> {
    let (rows, cols) = (req.rows, req.cols);
    let on_path: BTreeSet<Cell> = traj.visited_set();
    let start = traj.poses[0].cell();
    let last = traj.final_cell();
    let off_path: Vec<Cell> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| Cell::new(r, c)))
        .filter(|c| !on_path.contains(c))
        .collect();

    let mut csp = Csp::new();

    let collect = match req.goal {
        Goal::Find(_) if last == start => return None,
        Goal::Draw if traj.segments.is_empty() => return None,
        Goal::CollectAll(_) => {
            if last == start {
                return None;
            }
            let extra: Vec<Cell> = on_path
                .iter()
                .copied()
                .filter(|&c| c != start && c != last)
                .collect();
            let max_extra = extra.len().min(MAX_COLLECT - 1);
            if max_extra + 1 < MIN_COLLECT {
                return None;
            }
            let mut domain = vec![Placement::Cell(None)];
            domain.extend(extra.iter().map(|&c| Placement::Cell(Some(c))));
            // Slot i holds the (i+2)-th collectible; v_n is always the first.
            Some(counted_group(
                &mut csp,
                "collect",
                (MIN_COLLECT - 1..=max_extra).collect(),
                vec![domain; MAX_COLLECT - 1],
            ))
        }
        _ => None,
    };

    let target = req.goal.item();
    let distractor_counts: Vec<usize> = match req.goal {
        Goal::Draw => vec![0],
        _ => (0..=MAX_DISTRACTORS).collect(),
    };
    let mut distractor_domain = vec![Placement::Item(None)];
    for &cell in &off_path {
        for &kind in ItemKind::ALL {
            if Some(kind) != target {
                distractor_domain.push(Placement::Item(Some((cell, kind))));
            }
        }
    }
    let distractors = counted_group(
        &mut csp,
        "distractor",
        distractor_counts,
        vec![distractor_domain; MAX_DISTRACTORS],
    );

    let max_walls = rows * cols / 5;
    let wall_counts: Vec<usize> = if max_walls == 0 {
        vec![0]
    } else {
        (1..=max_walls).collect()
    };
    let mut cell_domain = vec![Placement::Cell(None)];
    cell_domain.extend(off_path.iter().map(|&c| Placement::Cell(Some(c))));
    let mut wall_domains = vec![cell_domain.clone(); max_walls];
    let touching: Vec<Placement> = off_path
        .iter()
        .filter(|c| on_path.iter().any(|p| p.is_adjacent(**c)))
        .map(|&c| Placement::Cell(Some(c)))
        .collect();
    if let Some(first) = wall_domains.first_mut() {
        if !touching.is_empty() {
            *first = touching;
            first.insert(0, Placement::Cell(None));
        }
    }
    let walls = counted_group(&mut csp, "wall", wall_counts, wall_domains);

    let f = req.reference_forbidden;
    let forbidden_counts: Vec<usize> = if f == 0 {
        vec![0]
    } else {
        (f - 1..=f + 1).collect()
    };
    let max_forbidden = *forbidden_counts.last().expect("nonempty");
    let forbidden = counted_group(
        &mut csp,
        "forbidden",
        forbidden_counts,
        vec![cell_domain; max_forbidden],
    );

    let cell_vars: Vec<usize> = collect
        .iter()
        .chain([&distractors, &walls, &forbidden])
        .flat_map(|g| g.slots.iter().copied())
        .collect();
    for (i, &a) in cell_vars.iter().enumerate() {
        for &b in &cell_vars[i + 1..] {
            csp.add_constraint("distinct", vec![a, b], |v| {
                v[0].cell().is_none() || v[0].cell() != v[1].cell()
            })
            .expect("scope in range");
        }
    }

    Some(PlacementCsp {
        csp,
        collect,
        distractors,
        walls,
        forbidden,
    })
}

fn assemble(
    req: &WorldRequest<'_>,
    traj: &Trajectory,
    pc: &PlacementCsp,
    values: &[Placement],
) -> GridWorld {
    let mut world = GridWorld::empty(req.rows, req.cols, traj.poses[0]);
    let cells =
        |g: &SlotGroup| -> Vec<Cell> { g.slots.iter().filter_map(|&v| values[v].cell()).collect() };
    match req.goal {
        Goal::Find(item) => {
            world.items.insert(traj.final_cell(), item);
        }
        Goal::CollectAll(item) => {
            world.items.insert(traj.final_cell(), item);
            for cell in cells(pc.collect.as_ref().expect("collect slots")) {
                world.items.insert(cell, item);
            }
        }
        Goal::Draw => world.pattern = traj.segments.clone(),
    }
    for &v in &pc.distractors.slots {
        if let Placement::Item(Some((cell, kind))) = values[v] {
            world.items.insert(cell, kind);
        }
    }
    world.walls = cells(&pc.walls).into_iter().collect();
    world.forbidden = cells(&pc.forbidden).into_iter().collect();
    debug_assert!(values[pc.walls.count_var].count() == world.walls.len());
    world
}

/// Builds a world in which `req.code` solves the task assembled from the
/// request's goal and constraints.
pub fn generate_world(req: &WorldRequest<'_>) -> Result<GridWorld, GenError> {
    for attempt in 0..PLACEMENT_ATTEMPTS {
        let pose: Pose = sample_valid_pose(
            req.code,
            req.rows,
            req.cols,
            seed::derive(req.seed, 0, attempt),
        )?;
        let traj = trace_on_empty(req.code, req.rows, req.cols, pose);
        let Some(pc) = build_placement(req, &traj) else {
            continue;
        };
        for values in
            solve_stream(&pc.csp, seed::derive(req.seed, 1, attempt)).take(ASSIGNMENTS_PER_ATTEMPT)
        {
            let world = assemble(req, &traj, &pc, &values);
            let task = Task {
                goal: req.goal,
                constraints: req.constraints.clone(),
                world,
            };
            if task.validate().is_ok() && is_solution(&task, req.code) {
                return Ok(task.world);
            }
        }
    }
    Err(GenError::Placement(PLACEMENT_ATTEMPTS as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::execute;
    use crate::lang::parse;
    use crate::model::CodeConstraint;

    fn request<'a>(
        code: &'a Program,
        goal: Goal,
        constraints: &'a ConstraintSet,
        seed: u64,
    ) -> WorldRequest<'a> {
        WorldRequest {
            code,
            goal,
            constraints,
            rows: 5,
            cols: 5,
            reference_forbidden: 0,
            seed,
        }
    }

    #[test]
    fn find_target_sits_on_the_final_cell_only() {
        let code = parse("forward forward right forward").unwrap();
        let constraints = [CodeConstraint::AtMostCommands(4)].into();
        let goal = Goal::Find(ItemKind::Strawberry);
        for seed in 0..20 {
            let world = generate_world(&request(&code, goal, &constraints, seed)).unwrap();
            let traj = execute(&code, &world).trajectory;
            let targets: Vec<_> = world
                .items
                .iter()
                .filter(|(_, &k)| k == ItemKind::Strawberry)
                .map(|(c, _)| *c)
                .collect();
            assert_eq!(targets, vec![traj.final_cell()]);
            let path = traj.visited_set();
            for (cell, _) in world.items.iter().filter(|(c, _)| **c != traj.final_cell()) {
                assert!(!path.contains(cell));
            }
            assert!(world.walls.iter().all(|w| !path.contains(w)));
            assert!(!world.walls.is_empty() && world.walls.len() <= 5);
            assert!(world
                .walls
                .iter()
                .any(|w| path.iter().any(|p| p.is_adjacent(*w))));
        }
    }

    #[test]
    fn draw_pattern_is_the_trace() {
        let code = parse("forward forward right forward").unwrap();
        let constraints = ConstraintSet::new();
        let world = generate_world(&request(&code, Goal::Draw, &constraints, 3)).unwrap();
        assert_eq!(world.pattern, execute(&code, &world).trajectory.segments);
        assert!(world.items.is_empty());
        assert_eq!(world.pattern.len(), 3);
    }

    #[test]
    fn collect_all_places_two_to_four_on_path() {
        let code = parse("forward forward left forward forward").unwrap();
        let constraints = ConstraintSet::new();
        for seed in 0..20 {
            let goal = Goal::CollectAll(ItemKind::Apple);
            let world = generate_world(&request(&code, goal, &constraints, seed)).unwrap();
            let traj = execute(&code, &world).trajectory;
            let apples: Vec<Cell> = world
                .items
                .iter()
                .filter(|(_, &k)| k == ItemKind::Apple)
                .map(|(c, _)| *c)
                .collect();
            assert!((2..=4).contains(&apples.len()), "{apples:?}");
            assert!(apples.contains(&traj.final_cell()));
            assert!(!apples.contains(&traj.visited[0]));
        }
    }

    #[test]
    fn forbidden_cells_follow_the_reference() {
        let code = parse("forward right forward").unwrap();
        let constraints = ConstraintSet::new();
        let mut req = request(&code, Goal::Find(ItemKind::Lemon), &constraints, 1);
        let world = generate_world(&req).unwrap();
        assert!(world.forbidden.is_empty());
        req.reference_forbidden = 2;
        for seed in 0..10 {
            req.seed = seed;
            let world = generate_world(&req).unwrap();
            assert!((1..=3).contains(&world.forbidden.len()));
        }
    }

    #[test]
    fn turning_in_place_cannot_find() {
        let code = parse("left").unwrap();
        let constraints = ConstraintSet::new();
        let err = generate_world(&request(
            &code,
            Goal::Find(ItemKind::Apple),
            &constraints,
            0,
        ));
        assert_eq!(err, Err(GenError::Placement(PLACEMENT_ATTEMPTS as usize)));
    }

    #[test]
    fn oversized_code_exhausts() {
        let code = parse("repeat 5 { forward forward }").unwrap();
        let constraints = ConstraintSet::new();
        let err = generate_world(&request(
            &code,
            Goal::Find(ItemKind::Apple),
            &constraints,
            0,
        ));
        assert!(matches!(err, Err(GenError::Exhaustion { .. })));
    }

    #[test]
    fn seeded_worlds_repeat() {
        let code = parse("forward left forward forward").unwrap();
        let constraints = ConstraintSet::new();
        let req = request(&code, Goal::CollectAll(ItemKind::Banana), &constraints, 77);
        assert_eq!(generate_world(&req).unwrap(), generate_world(&req).unwrap());
    }
}
