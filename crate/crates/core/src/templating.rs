//! Abstraction of a reference (code, constraints, goal) triple into templates
//! with typed placeholders, and the difficulty rules that instantiations must
//! obey.
//!
//! Difficulty rules, relative to the reference code length `n`:
//!
//! * Easy: length `n`, reference constraints unchanged, same goal type.
//! * Medium: length in `n+1..=n+2`, constraint count unchanged, same goal type.
//! * Hard: length `n+2` and exactly one extra code constraint; navigation
//!   goals may switch between find and collect-all.
//!
//! Numeric length bounds in the reference constraints move with the code:
//! `AtMostCommands(m)` becomes `AtMostCommands(m + len(out) - n)`.

use std::collections::BTreeSet;

use rand::Rng;

use crate::emulator::check_constraints;
use crate::fdsolver::Csp;
use crate::model::{
    code_length, validate_constraints, Basic, Block, CodeConstraint, Command, ConstraintSet,
    Difficulty, Goal, GoalKind, ItemKind, PenColor, Program, Stmt, MAX_REPEAT, MIN_REPEAT,
};
use crate::seed;

/// Number of extra command slots added above Easy.
pub const EXTRA_SLOTS: usize = 2;

/// The extra constraint menu for Hard tasks, resolved against the generated
/// code at instantiation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtraConstraint {
    MustUseRepeat,
    /// Caps the most frequent basic command at its current count.
    CapMostFrequent,
    Forbid(Basic),
}

impl ExtraConstraint {
    pub fn resolve(self, code: &Program) -> Option<CodeConstraint> {
        match self {
            ExtraConstraint::MustUseRepeat => Some(CodeConstraint::MustUse(Block::Repeat)),
            ExtraConstraint::CapMostFrequent => most_frequent_basic(code)
                .map(|(b, count)| CodeConstraint::MaxOccurrences(b.block(), count)),
            ExtraConstraint::Forbid(b) => Some(CodeConstraint::Forbid(b.block())),
        }
    }
}

/// The most frequent basic command as written, ties going to the earlier
/// command in forward/back/left/right order.
pub fn most_frequent_basic(code: &Program) -> Option<(Basic, usize)> {
    Basic::ALL
        .iter()
        .map(|&b| (b, code.occurrences(b.block())))
        .filter(|&(_, n)| n > 0)
        .fold(None, |best: Option<(Basic, usize)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
}

/// A value a placeholder can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// A basic command; `None` marks an absent optional slot.
    Cmd(Option<Basic>),
    Color(PenColor),
    Count(u8),
    Item(ItemKind),
    GoalType(GoalKind),
    Extra(ExtraConstraint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placeholder {
    pub id: String,
    pub domain: Vec<Slot>,
    pub optional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkelCmd {
    Basic(usize),
    Pen(usize),
    /// Inserted slot; may be absent at Medium.
    Extra(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkelStmt {
    Cmd(SkelCmd),
    Repeat { count: usize, body: Vec<SkelCmd> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintTemplate {
    Fixed(CodeConstraint),
    /// `AtMostCommands(base + delta)` where delta is the length increase.
    AtMostShifted(usize),
    ExactlyShifted(usize),
}

impl ConstraintTemplate {
    fn of(c: &CodeConstraint) -> Self {
        match *c {
            CodeConstraint::AtMostCommands(n) => ConstraintTemplate::AtMostShifted(n),
            CodeConstraint::ExactlyCommands(n) => ConstraintTemplate::ExactlyShifted(n),
            ref other => ConstraintTemplate::Fixed(other.clone()),
        }
    }

    fn instantiate(&self, delta: isize) -> CodeConstraint {
        let shift = |n: usize| n.saturating_add_signed(delta).max(1);
        match self {
            ConstraintTemplate::Fixed(c) => c.clone(),
            ConstraintTemplate::AtMostShifted(n) => CodeConstraint::AtMostCommands(shift(*n)),
            ConstraintTemplate::ExactlyShifted(n) => CodeConstraint::ExactlyCommands(shift(*n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalTypeTemplate {
    Fixed(GoalKind),
    Var(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoalTemplate {
    pub kind: GoalTypeTemplate,
    pub item: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instantiation {
    pub code: Program,
    pub constraints: ConstraintSet,
    pub goal: Goal,
}

#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub placeholders: Vec<Placeholder>,
    pub code: Vec<SkelStmt>,
    pub constraints: Vec<ConstraintTemplate>,
    /// Placeholder holding the Hard extra constraint.
    pub extra_constraint: Option<usize>,
    pub goal: GoalTemplate,
    pub difficulty: Difficulty,
    pub ref_length: usize,
    pub ref_goal: Goal,
}

fn permitted_basics(constraints: &ConstraintSet) -> Vec<Basic> {
    let permitted: Vec<Basic> = Basic::ALL
        .iter()
        .copied()
        .filter(|b| {
            constraints.iter().all(|c| match c {
                CodeConstraint::AllowedBlocks(allowed) => allowed.contains(&b.block()),
                CodeConstraint::Forbid(f) => *f != b.block(),
                _ => true,
            })
        })
        .collect();
    if permitted.is_empty() {
        Basic::ALL.to_vec()
    } else {
        permitted
    }
}

struct Builder {
    placeholders: Vec<Placeholder>,
    counters: [usize; 4],
}

impl Builder {
    fn add(&mut self, prefix: &str, kind: usize, domain: Vec<Slot>, optional: bool) -> usize {
        self.counters[kind] += 1;
        self.placeholders.push(Placeholder {
            id: format!("{prefix}{}", self.counters[kind]),
            domain,
            optional,
        });
        self.placeholders.len() - 1
    }

    fn named(&mut self, id: &str, domain: Vec<Slot>) -> usize {
        self.placeholders.push(Placeholder {
            id: id.to_string(),
            domain,
            optional: false,
        });
        self.placeholders.len() - 1
    }
}

pub fn templatize(
    ref_code: &Program,
    ref_constraints: &ConstraintSet,
    ref_goal: &Goal,
    difficulty: Difficulty,
    seed: u64,
) -> TemplateSet {
    let mut b = Builder {
        placeholders: Vec::new(),
        counters: [0; 4],
    };
    let basics = permitted_basics(ref_constraints);
    let basic_domain: Vec<Slot> = basics.iter().map(|&x| Slot::Cmd(Some(x))).collect();

    let goal_kind = match (difficulty, ref_goal.kind()) {
        (Difficulty::Hard, GoalKind::Find | GoalKind::CollectAll) => {
            GoalTypeTemplate::Var(b.named(
                "goal_type",
                vec![
                    Slot::GoalType(GoalKind::Find),
                    Slot::GoalType(GoalKind::CollectAll),
                ],
            ))
        }
        (_, kind) => GoalTypeTemplate::Fixed(kind),
    };
    let item = ref_goal.item().map(|_| {
        b.named(
            "fruit_type",
            ItemKind::ALL.iter().map(|&k| Slot::Item(k)).collect(),
        )
    });

    let leaf = |b: &mut Builder, cmd: &Command| match cmd {
        Command::Basic(_) => SkelCmd::Basic(b.add("B", 0, basic_domain.clone(), false)),
        Command::Pen(_) => SkelCmd::Pen(b.add(
            "color",
            1,
            PenColor::ALL.iter().map(|&c| Slot::Color(c)).collect(),
            false,
        )),
    };
    let mut code: Vec<SkelStmt> = Vec::new();
    for stmt in &ref_code.stmts {
        match stmt {
            Stmt::Cmd(cmd) => code.push(SkelStmt::Cmd(leaf(&mut b, cmd))),
            Stmt::Repeat { body, .. } => {
                let count = b.add(
                    "N",
                    2,
                    (MIN_REPEAT..=MAX_REPEAT).map(Slot::Count).collect(),
                    false,
                );
                let body = body.iter().map(|c| leaf(&mut b, c)).collect();
                code.push(SkelStmt::Repeat { count, body });
            }
        }
    }

    let extra_domain: Option<Vec<Slot>> = match difficulty {
        Difficulty::Easy => None,
        Difficulty::Medium => {
            let mut d = vec![Slot::Cmd(None)];
            d.extend(basic_domain.iter().copied());
            Some(d)
        }
        Difficulty::Hard => Some(basic_domain.clone()),
    };
    if let Some(domain) = extra_domain {
        let mut rng = seed::rng(seed);
        let optional = difficulty == Difficulty::Medium;
        for _ in 0..EXTRA_SLOTS {
            let slot = SkelCmd::Extra(b.add("E", 3, domain.clone(), optional));
            insert_at_random_gap(&mut code, slot, &mut rng);
        }
    }

    let extra_constraint = (difficulty == Difficulty::Hard).then(|| {
        let mut menu = vec![
            Slot::Extra(ExtraConstraint::MustUseRepeat),
            Slot::Extra(ExtraConstraint::CapMostFrequent),
        ];
        menu.extend(
            Basic::ALL
                .iter()
                .map(|&x| Slot::Extra(ExtraConstraint::Forbid(x))),
        );
        b.named("X1", menu)
    });

    TemplateSet {
        placeholders: b.placeholders,
        code,
        constraints: ref_constraints.iter().map(ConstraintTemplate::of).collect(),
        extra_constraint,
        goal: GoalTemplate {
            kind: goal_kind,
            item,
        },
        difficulty,
        ref_length: code_length(ref_code),
        ref_goal: *ref_goal,
    }
}

/// Inserts `slot` at a uniformly chosen gap: between top-level statements or
/// between commands of a repeat body.
fn insert_at_random_gap(code: &mut Vec<SkelStmt>, slot: SkelCmd, rng: &mut impl Rng) {
    let top_gaps = code.len() + 1;
    let body_gaps: usize = code
        .iter()
        .map(|s| match s {
            SkelStmt::Repeat { body, .. } => body.len() + 1,
            SkelStmt::Cmd(_) => 0,
        })
        .sum();
    let mut pick = rng.gen_range(0..top_gaps + body_gaps);
    if pick < top_gaps {
        code.insert(pick, SkelStmt::Cmd(slot));
        return;
    }
    pick -= top_gaps;
    for stmt in code.iter_mut() {
        if let SkelStmt::Repeat { body, .. } = stmt {
            if pick <= body.len() {
                body.insert(pick, slot);
                return;
            }
            pick -= body.len() + 1;
        }
    }
    unreachable!("gap index within range");
}

impl TemplateSet {
    pub fn extra_slots(&self) -> usize {
        self.placeholders
            .iter()
            .filter(|p| p.id.starts_with('E'))
            .count()
    }

    pub fn placeholder(&self, id: &str) -> Option<&Placeholder> {
        self.placeholders.iter().find(|p| p.id == id)
    }

    /// Fills every placeholder from `values` (indexed like `placeholders`).
    pub fn instantiate(&self, values: &[Slot]) -> Instantiation {
        let cmd = |c: &SkelCmd| -> Option<Command> {
            let idx = match *c {
                SkelCmd::Basic(i) | SkelCmd::Pen(i) | SkelCmd::Extra(i) => i,
            };
            match values[idx] {
                Slot::Cmd(b) => b.map(Command::Basic),
                Slot::Color(color) => Some(Command::Pen(color)),
                other => panic!("placeholder {idx} holds {other:?}, expected a command"),
            }
        };
        let mut stmts = Vec::new();
        for stmt in &self.code {
            match stmt {
                SkelStmt::Cmd(c) => stmts.extend(cmd(c).map(Stmt::Cmd)),
                SkelStmt::Repeat { count, body } => {
                    let Slot::Count(count) = values[*count] else {
                        panic!("repeat count placeholder holds {:?}", values[*count]);
                    };
                    let body: Vec<Command> = body.iter().filter_map(cmd).collect();
                    if !body.is_empty() {
                        stmts.push(Stmt::Repeat { count, body });
                    }
                }
            }
        }
        let code = Program::new(stmts);

        let delta = code_length(&code) as isize - self.ref_length as isize;
        let mut constraints: ConstraintSet = self
            .constraints
            .iter()
            .map(|t| t.instantiate(delta))
            .collect();
        if let Some(x) = self.extra_constraint {
            if let Slot::Extra(extra) = values[x] {
                if let Some(c) = extra.resolve(&code) {
                    constraints.insert(c);
                }
            }
        }

        let kind = match self.goal.kind {
            GoalTypeTemplate::Fixed(kind) => kind,
            GoalTypeTemplate::Var(i) => match values[i] {
                Slot::GoalType(kind) => kind,
                other => panic!("goal type placeholder holds {other:?}"),
            },
        };
        let goal = match self.goal.item.map(|i| values[i]) {
            Some(Slot::Item(item)) => Goal::with_kind(kind, item),
            _ => Goal::Draw,
        };
        Instantiation {
            code,
            constraints,
            goal,
        }
    }

    /// The reference constraints with numeric bounds shifted by `delta`.
    pub fn base_constraints(&self, delta: isize) -> ConstraintSet {
        self.constraints
            .iter()
            .map(|t| t.instantiate(delta))
            .collect()
    }

    /// The difficulty predicate: length window, constraint-set shape and
    /// goal-type rule for this template's difficulty.
    pub fn accepts(&self, inst: &Instantiation) -> bool {
        let len = code_length(&inst.code);
        let n = self.ref_length;
        let length_ok = match self.difficulty {
            Difficulty::Easy => len == n,
            Difficulty::Medium => len > n && len <= n + EXTRA_SLOTS,
            Difficulty::Hard => len == n + EXTRA_SLOTS,
        };
        if !length_ok {
            return false;
        }
        let base = self.base_constraints(len as isize - n as isize);
        let ref_kind = self.ref_goal.kind();
        match self.difficulty {
            Difficulty::Easy | Difficulty::Medium => {
                inst.constraints == base && inst.goal.kind() == ref_kind
            }
            Difficulty::Hard => {
                let goal_ok = match ref_kind {
                    GoalKind::Draw => inst.goal.kind() == GoalKind::Draw,
                    _ => inst.goal.kind() != GoalKind::Draw,
                };
                let added: Vec<&CodeConstraint> = inst.constraints.difference(&base).collect();
                goal_ok
                    && base.is_subset(&inst.constraints)
                    && added.len() == 1
                    && is_valid_extra(added[0], &base, &inst.code)
            }
        }
    }

    /// `accepts` plus internal consistency: the constraint set is well formed
    /// and the generated code satisfies it.
    pub fn admissible(&self, inst: &Instantiation) -> bool {
        self.accepts(inst)
            && validate_constraints(&inst.constraints).is_ok()
            && check_constraints(&inst.constraints, &inst.code)
    }

    /// The instantiation CSP: one variable per placeholder (declaration
    /// order), the extra-slot count rule at Medium, and admissibility over
    /// the full assignment.
    pub fn to_csp(&self) -> Csp<Slot> {
        let mut csp = Csp::new();
        for p in &self.placeholders {
            csp.add_var(p.id.clone(), p.domain.clone())
                .expect("placeholder domains are nonempty");
        }
        let extras: Vec<usize> = self
            .placeholders
            .iter()
            .enumerate()
            .filter(|(_, p)| p.optional)
            .map(|(i, _)| i)
            .collect();
        if !extras.is_empty() {
            csp.add_constraint("extra_present", extras, |vals| {
                vals.iter().any(|v| **v != Slot::Cmd(None))
            })
            .expect("scope in range");
        }
        let ts = self.clone();
        let all: Vec<usize> = (0..self.placeholders.len()).collect();
        csp.add_constraint("admissible", all, move |vals| {
            let values: Vec<Slot> = vals.iter().map(|v| **v).collect();
            ts.admissible(&ts.instantiate(&values))
        })
        .expect("scope in range");
        csp
    }
}

/// Whether `extra` is a legal Hard addition on top of `base` for `code`.
pub fn is_valid_extra(extra: &CodeConstraint, base: &ConstraintSet, code: &Program) -> bool {
    let allowed_by_base = |b: Block| {
        base.iter().all(|c| match c {
            CodeConstraint::AllowedBlocks(allowed) => allowed.contains(&b),
            CodeConstraint::Forbid(f) => *f != b,
            _ => true,
        })
    };
    match *extra {
        CodeConstraint::MustUse(Block::Repeat) => allowed_by_base(Block::Repeat),
        CodeConstraint::MaxOccurrences(b, k) => {
            most_frequent_basic(code) == b.as_basic().map(|x| (x, k))
                && !base
                    .iter()
                    .any(|c| matches!(c, CodeConstraint::MaxOccurrences(other, _) if *other == b))
        }
        CodeConstraint::Forbid(b) => {
            b.as_basic().is_some() && code.occurrences(b) == 0 && allowed_by_base(b)
        }
        _ => false,
    }
}

/// Difficulty predicate as a standalone closure.
pub fn difficulty_constraints(ts: &TemplateSet) -> impl Fn(&Instantiation) -> bool + '_ {
    move |inst| ts.accepts(inst)
}

/// Statement/command kinds of a program with all values erased.
pub fn shape(code: &Program) -> Vec<Vec<char>> {
    let kind = |c: &Command| match c {
        Command::Basic(_) => 'b',
        Command::Pen(_) => 'p',
    };
    code.stmts
        .iter()
        .map(|s| match s {
            Stmt::Cmd(c) => vec![kind(c)],
            Stmt::Repeat { body, .. } => {
                let mut v = vec!['r'];
                v.extend(body.iter().map(kind));
                v
            }
        })
        .collect()
}

/// The set of blocks an instantiation's code may legally use.
pub fn usable_blocks(constraints: &ConstraintSet) -> BTreeSet<Block> {
    Block::ALL
        .iter()
        .copied()
        .filter(|b| {
            constraints.iter().all(|c| match c {
                CodeConstraint::AllowedBlocks(allowed) => allowed.contains(b),
                CodeConstraint::Forbid(f) => f != b,
                _ => true,
            })
        })
        .collect()
}
