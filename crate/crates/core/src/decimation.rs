//! Initial assignments by decimation: repeated unit propagation interleaved
//! with forced choices until every variable has a value.
//!
//! Two flavours share one loop:
//!
//! - [`unh_decimate`] resolves contradictory unit clauses with the best
//!   assignment of the previous search round and, when no unit clause is
//!   left, satisfies a random still-open hard clause before falling back to a
//!   random variable.
//! - [`up_decimate`] resolves contradictions with a coin flip and goes straight
//!   to a random variable when no unit clause is left.
//!
//! Hard unit clauses are always propagated before soft ones. A conflict
//! between a hard and a soft unit clause is settled in favour of the hard one.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::formula::{Assignment, Formula, Lit, Var};
use crate::index_set::IndexSet;

const HARD: usize = 0;
const SOFT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecimationMethod {
    /// UnH for PMS instances, UP for WPMS instances.
    #[default]
    Auto,
    Unh,
    Up,
}

impl FromStr for DecimationMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(DecimationMethod::Auto),
            "unh" => Ok(DecimationMethod::Unh),
            "up" => Ok(DecimationMethod::Up),
            _ => Err(format!(
                "unknown decimation method `{s}` (expected auto, unh or up)"
            )),
        }
    }
}

impl fmt::Display for DecimationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecimationMethod::Auto => "auto",
            DecimationMethod::Unh => "unh",
            DecimationMethod::Up => "up",
        })
    }
}

/// Status of a clause under the partial assignment of a [`DecimationView`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseStatus {
    Satisfied,
    /// Not satisfied yet; `unassigned` literals remain open. A count of 0
    /// means the clause is falsified for the rest of the pass.
    Active {
        unassigned: u32,
    },
}

/// The formula simplified by a growing partial assignment.
pub struct DecimationView<'f> {
    f: &'f Formula,
    values: Vec<Option<bool>>,
    satisfied: Vec<bool>,
    unassigned: Vec<u32>,
    /// Unit clauses split by kind: `[hard, soft]`.
    units: [IndexSet; 2],
    /// Number of unit clauses (by kind) forcing each literal.
    unit_lits: [Vec<u32>; 2],
    /// Variables forced both ways by unit clauses, detected as they appear.
    conflicts: Vec<u32>,
    /// Hard clauses that are neither satisfied nor fully assigned.
    open_hard: IndexSet,
    free_vars: IndexSet,
}

impl<'f> DecimationView<'f> {
    pub fn new(f: &'f Formula) -> Self {
        let n = f.num_vars();
        let m = f.num_clauses();
        let mut view = DecimationView {
            f,
            values: vec![None; n],
            satisfied: vec![false; m],
            unassigned: (0..m).map(|c| f.clause_lits(c).len() as u32).collect(),
            units: [IndexSet::new(m), IndexSet::new(m)],
            unit_lits: [vec![0; 2 * n], vec![0; 2 * n]],
            conflicts: Vec::new(),
            open_hard: IndexSet::new(m),
            free_vars: IndexSet::new(n),
        };
        for v in 0..n {
            view.free_vars.insert(v);
        }
        for &c in f.hard_clauses() {
            view.open_hard.insert(c as usize);
        }
        for c in 0..m {
            if view.unassigned[c] == 1 {
                view.make_unit(c);
            }
        }
        view
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        self.values[v.index()]
    }

    pub fn status(&self, c: usize) -> ClauseStatus {
        if self.satisfied[c] {
            ClauseStatus::Satisfied
        } else {
            ClauseStatus::Active {
                unassigned: self.unassigned[c],
            }
        }
    }

    pub fn is_hard_unit(&self, c: usize) -> bool {
        self.units[HARD].contains(c)
    }

    pub fn is_soft_unit(&self, c: usize) -> bool {
        self.units[SOFT].contains(c)
    }

    pub fn has_units(&self) -> bool {
        !self.units[HARD].is_empty() || !self.units[SOFT].is_empty()
    }

    pub fn num_free_vars(&self) -> usize {
        self.free_vars.len()
    }

    fn kind_slot(&self, c: usize) -> usize {
        if self.f.is_hard(c) {
            HARD
        } else {
            SOFT
        }
    }

    fn open_lit(&self, c: usize) -> Lit {
        *self
            .f
            .clause_lits(c)
            .iter()
            .find(|l| self.values[l.var().index()].is_none())
            .expect("active clause with an unassigned literal")
    }

    fn make_unit(&mut self, c: usize) {
        let k = self.kind_slot(c);
        let l = self.open_lit(c);
        self.units[k].insert(c);
        self.unit_lits[k][l.code()] += 1;
        let opposite = (!l).code();
        if self.unit_lits[HARD][opposite] + self.unit_lits[SOFT][opposite] > 0 {
            self.conflicts.push(l.var().index() as u32);
        }
    }

    /// Assigns `var := value` and simplifies: clauses containing the now
    /// true literal become satisfied, the others lose an open literal and may
    /// turn into unit clauses.
    pub fn assign(&mut self, var: Var, value: bool) {
        let v = var.index();
        debug_assert!(self.values[v].is_none(), "variable assigned twice");
        self.values[v] = Some(value);
        self.free_vars.remove(v);
        let f = self.f;
        let true_lit = var.lit(value);
        for &c in f.occurrences(true_lit) {
            let c = c as usize;
            self.unassigned[c] -= 1;
            if !self.satisfied[c] {
                self.satisfied[c] = true;
                self.units[HARD].remove(c);
                self.units[SOFT].remove(c);
                self.open_hard.remove(c);
            }
        }
        for &c in f.occurrences(!true_lit) {
            let c = c as usize;
            self.unassigned[c] -= 1;
            if self.satisfied[c] {
                continue;
            }
            match self.unassigned[c] {
                0 => {
                    self.units[HARD].remove(c);
                    self.units[SOFT].remove(c);
                    self.open_hard.remove(c);
                }
                1 => self.make_unit(c),
                _ => {}
            }
        }
    }

    /// An unassigned variable forced both ways by unit clauses of `kind`.
    fn next_conflict(&mut self, kind: usize) -> Option<Var> {
        let values = &self.values;
        self.conflicts.retain(|&v| values[v as usize].is_none());
        self.conflicts.iter().map(|&v| Var::new(v)).find(|v| {
            self.unit_lits[kind][v.pos().code()] > 0 && self.unit_lits[kind][v.neg().code()] > 0
        })
    }

    fn into_assignment(self) -> Assignment {
        Assignment::new(
            self.values
                .into_iter()
                .map(|v| v.expect("all variables assigned"))
                .collect(),
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode<'a> {
    Unh(&'a Assignment),
    Up,
}

fn decimate<R: Rng + ?Sized>(f: &Formula, mode: Mode<'_>, rng: &mut R) -> Assignment {
    let mut view = DecimationView::new(f);
    while view.num_free_vars() > 0 {
        if view.has_units() {
            // hard units first; a soft unit opposing a hard one simply loses
            let k = if view.units[HARD].is_empty() {
                SOFT
            } else {
                HARD
            };
            if let Some(var) = view.next_conflict(k) {
                let value = match mode {
                    Mode::Unh(prev) => prev.value(var),
                    Mode::Up => rng.gen(),
                };
                view.assign(var, value);
            } else {
                let queue = &view.units[k];
                let c = queue.get(rng.gen_range(0..queue.len()));
                let l = view.open_lit(c);
                view.assign(l.var(), l.is_positive());
            }
        } else if matches!(mode, Mode::Unh(_)) && !view.open_hard.is_empty() {
            let c = view.open_hard.get(rng.gen_range(0..view.open_hard.len()));
            let open: Vec<Lit> = f
                .clause_lits(c)
                .iter()
                .copied()
                .filter(|l| view.values[l.var().index()].is_none())
                .collect();
            let l = open[rng.gen_range(0..open.len())];
            view.assign(l.var(), l.is_positive());
        } else {
            let v = view.free_vars.get(rng.gen_range(0..view.free_vars.len()));
            view.assign(Var::new(v as u32), rng.gen());
        }
    }
    view.into_assignment()
}

/// Decimation that favours hard clauses; `prev` breaks contradictory units.
pub fn unh_decimate<R: Rng + ?Sized>(f: &Formula, prev: &Assignment, rng: &mut R) -> Assignment {
    assert_eq!(prev.len(), f.num_vars(), "previous best must be complete");
    decimate(f, Mode::Unh(prev), rng)
}

/// Classic unit-propagation decimation with random choices.
pub fn up_decimate<R: Rng + ?Sized>(f: &Formula, rng: &mut R) -> Assignment {
    decimate(f, Mode::Up, rng)
}
