//! A small finite-domain constraint solver.
//!
//! Backtracking search over variables in declaration order, with forward
//! checking: whenever a constraint has exactly one unassigned variable left
//! in its scope, that variable's live domain is filtered against it. Each
//! variable's values are tried in an order shuffled once per stream from the
//! stream seed, so different seeds enumerate the same solution set in
//! different orders.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::error::CspError;
use crate::seed;

pub type VarId = usize;

type Predicate<V> = Arc<dyn Fn(&[&V]) -> bool + Send + Sync>;

#[derive(Debug, Clone)]
pub struct Variable<V> {
    pub id: String,
    pub domain: Vec<V>,
}

#[derive(Clone)]
pub struct Constraint<V> {
    pub name: String,
    pub scope: Vec<VarId>,
    pred: Predicate<V>,
}

impl<V> Constraint<V> {
    /// Evaluates the predicate on values given in scope order.
    pub fn holds(&self, values: &[&V]) -> bool {
        (self.pred)(values)
    }
}

impl<V> fmt::Debug for Constraint<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Constraint")
            .field("name", &self.name)
            .field("scope", &self.scope)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct Csp<V> {
    vars: Vec<Variable<V>>,
    constraints: Vec<Constraint<V>>,
}

impl<V> Default for Csp<V> {
    fn default() -> Self {
        Csp {
            vars: Vec::new(),
            constraints: Vec::new(),
        }
    }
}

impl<V: Clone> Csp<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, id: impl Into<String>, domain: Vec<V>) -> Result<VarId, CspError> {
        let id = id.into();
        if domain.is_empty() {
            return Err(CspError::EmptyDomain(id));
        }
        self.vars.push(Variable { id, domain });
        Ok(self.vars.len() - 1)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        scope: Vec<VarId>,
        pred: impl Fn(&[&V]) -> bool + Send + Sync + 'static,
    ) -> Result<(), CspError> {
        let name = name.into();
        if let Some(&index) = scope.iter().find(|&&v| v >= self.vars.len()) {
            return Err(CspError::UnknownVariable { name, index });
        }
        self.constraints.push(Constraint {
            name,
            scope,
            pred: Arc::new(pred),
        });
        Ok(())
    }

    pub fn vars(&self) -> &[Variable<V>] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint<V>] {
        &self.constraints
    }

    pub fn var_index(&self, id: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.id == id)
    }

    /// Checks a complete assignment against every constraint.
    pub fn satisfies(&self, assignment: &[V]) -> bool {
        self.constraints.iter().all(|c| {
            let values: Vec<&V> = c.scope.iter().map(|&v| &assignment[v]).collect();
            c.holds(&values)
        })
    }

    /// Total number of complete assignments, saturating.
    pub fn space_size(&self) -> u128 {
        self.vars
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.domain.len() as u128))
    }
}

struct Frame {
    order: Vec<usize>,
    pos: usize,
    /// Live domains (value indices) when this variable was reached.
    saved: Vec<Vec<usize>>,
}

/// Lazy stream of satisfying assignments; see [`solve_stream`].
pub struct Solutions<'a, V> {
    csp: &'a Csp<V>,
    /// Constraints touching each variable.
    watch: Vec<Vec<usize>>,
    orders: Vec<Vec<usize>>,
    assigned: Vec<Option<usize>>,
    domains: Vec<Vec<usize>>,
    frames: Vec<Frame>,
    /// Set once for a zero-variable problem after its single check.
    exhausted: bool,
}

impl<'a, V: Clone> Solutions<'a, V> {
    fn new(csp: &'a Csp<V>, seed: u64) -> Self {
        let n = csp.vars.len();
        let mut rng = seed::rng(seed);
        let orders: Vec<Vec<usize>> = csp
            .vars
            .iter()
            .map(|v| {
                let mut order: Vec<usize> = (0..v.domain.len()).collect();
                order.shuffle(&mut rng);
                order
            })
            .collect();
        let mut watch = vec![Vec::new(); n];
        for (ci, c) in csp.constraints.iter().enumerate() {
            let mut scope = c.scope.clone();
            scope.sort_unstable();
            scope.dedup();
            for v in scope {
                watch[v].push(ci);
            }
        }
        let domains: Vec<Vec<usize>> = csp
            .vars
            .iter()
            .map(|v| (0..v.domain.len()).collect())
            .collect();

        let mut stream = Solutions {
            csp,
            watch,
            orders,
            assigned: vec![None; n],
            domains,
            frames: Vec::new(),
            exhausted: false,
        };

        let ground_ok = csp
            .constraints
            .iter()
            .filter(|c| c.scope.is_empty())
            .all(|c| c.holds(&[]));
        if !ground_ok {
            stream.exhausted = true;
        } else if n > 0 {
            stream.push_frame(0);
        }
        stream
    }

    fn push_frame(&mut self, var: VarId) {
        let live = &self.domains[var];
        let order = self.orders[var]
            .iter()
            .copied()
            .filter(|i| live.contains(i))
            .collect();
        self.frames.push(Frame {
            order,
            pos: 0,
            saved: self.domains.clone(),
        });
    }

    fn value(&self, var: VarId, idx: usize) -> &'a V {
        &self.csp.vars[var].domain[idx]
    }

    /// Evaluates constraint `ci` with `probe` standing in for one variable.
    fn eval(&self, ci: usize, probe: Option<(VarId, usize)>) -> bool {
        let c = &self.csp.constraints[ci];
        let values: Vec<&V> = c
            .scope
            .iter()
            .map(|&v| {
                let idx = match probe {
                    Some((pv, pi)) if pv == v => pi,
                    _ => self.assigned[v].expect("scope variable assigned"),
                };
                self.value(v, idx)
            })
            .collect();
        c.holds(&values)
    }

    /// Checks newly completed constraints and prunes neighbours. Returns
    /// false on a violation or a wiped-out domain.
    fn propagate(&mut self, var: VarId) -> bool {
        for k in 0..self.watch[var].len() {
            let ci = self.watch[var][k];
            let scope = &self.csp.constraints[ci].scope;
            let mut open = scope.iter().filter(|&&v| self.assigned[v].is_none());
            match (open.next().copied(), open.next()) {
                (None, _) => {
                    if !self.eval(ci, None) {
                        return false;
                    }
                }
                (Some(u), None) => {
                    let live = std::mem::take(&mut self.domains[u]);
                    let kept: Vec<usize> = live
                        .into_iter()
                        .filter(|&i| self.eval(ci, Some((u, i))))
                        .collect();
                    let empty = kept.is_empty();
                    self.domains[u] = kept;
                    if empty {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }
}

impl<V: Clone> Iterator for Solutions<'_, V> {
    type Item = Vec<V>;

    fn next(&mut self) -> Option<Vec<V>> {
        if self.csp.vars.is_empty() {
            if self.exhausted {
                return None;
            }
            self.exhausted = true;
            return Some(Vec::new());
        }
        loop {
            let var = self.frames.len().checked_sub(1)?;
            let frame = self.frames.last_mut().expect("nonempty");
            if frame.pos == frame.order.len() {
                self.frames.pop();
                self.assigned[var] = None;
                continue;
            }
            let idx = frame.order[frame.pos];
            frame.pos += 1;
            self.domains.clone_from(&frame.saved);
            self.domains[var] = vec![idx];
            self.assigned[var] = Some(idx);

            if !self.propagate(var) {
                self.assigned[var] = None;
                continue;
            }
            if var + 1 == self.csp.vars.len() {
                let solution = self
                    .assigned
                    .iter()
                    .enumerate()
                    .map(|(v, idx)| self.value(v, idx.expect("complete")).clone())
                    .collect();
                self.assigned[var] = None;
                return Some(solution);
            }
            self.push_frame(var + 1);
        }
    }
}

/// Every satisfying assignment exactly once, values in declaration order.
pub fn solve_stream<V: Clone>(csp: &Csp<V>, seed: u64) -> Solutions<'_, V> {
    Solutions::new(csp, seed)
}

pub fn count_solutions<V: Clone>(csp: &Csp<V>, cap: usize) -> usize {
    solve_stream(csp, 0).take(cap).count()
}
