use crate::formula::{Assignment, Cost, Formula, Var};
use crate::index_set::IndexSet;
use crate::weighting::{LocalOptimum, UpdatePlan, WeightParams, WeightState};

/// Scores at or below this value do not make a variable a GoodVar. Scores
/// are accumulated incrementally in doubles, so a variable whose exact score
/// is zero may carry round-off of either sign.
pub const GOOD_SCORE_EPS: f64 = 1e-9;

/// Incremental search state: the current assignment plus everything needed
/// to score flips in time proportional to the flipped variable's occurrences.
///
/// Invariants after every public operation:
/// - `sat_count[c]` is the number of true literals of clause `c`;
/// - `sat_var[c]` is the unique true literal's variable when `sat_count[c] == 1`;
/// - `gain(x)` sums the weights of falsified clauses containing `x`;
/// - `loss(x)` sums the weights of clauses whose unique true literal is on `x`;
/// - `good_vars` holds exactly the variables with `score > GOOD_SCORE_EPS`;
/// - the falsified sets hold exactly the clauses with `sat_count == 0`.
#[derive(Debug, Clone)]
pub struct SearchState {
    assignment: Assignment,
    sat_count: Vec<u32>,
    sat_var: Vec<u32>,
    gain: Vec<f64>,
    loss: Vec<f64>,
    /// `gain - loss`, cached for selection.
    score: Vec<f64>,
    good_vars: IndexSet,
    falsified_hard: IndexSet,
    falsified_soft: IndexSet,
    /// Step (1-based) at which each variable was last flipped, 0 if never.
    last_flip: Vec<u64>,
    step: u64,
    /// Original weight of falsified soft clauses, empty ones included.
    soft_cost: u64,
    has_empty_hard: bool,
}

impl SearchState {
    /// Builds the state for assignment `a` from scratch.
    pub fn new(f: &Formula, a: Assignment, ws: &WeightState) -> Self {
        assert_eq!(a.len(), f.num_vars(), "assignment must be complete");
        let n = f.num_vars();
        let m = f.num_clauses();
        let mut s = SearchState {
            assignment: a,
            sat_count: vec![0; m],
            sat_var: vec![0; m],
            gain: vec![0.0; n],
            loss: vec![0.0; n],
            score: vec![0.0; n],
            good_vars: IndexSet::new(n),
            falsified_hard: IndexSet::new(m),
            falsified_soft: IndexSet::new(m),
            last_flip: vec![0; n],
            step: 0,
            soft_cost: f.empty_soft_weight(),
            has_empty_hard: f.has_empty_hard(),
        };
        for c in 0..m {
            let w = ws.weight(c);
            let mut count = 0;
            for &l in f.clause_lits(c) {
                if s.assignment.satisfies(l) {
                    count += 1;
                    s.sat_var[c] = l.var().index() as u32;
                }
            }
            s.sat_count[c] = count;
            match count {
                0 => {
                    s.mark_falsified(f, c);
                    for &l in f.clause_lits(c) {
                        s.gain[l.var().index()] += w;
                    }
                }
                1 => s.loss[s.sat_var[c] as usize] += w,
                _ => {}
            }
        }
        for v in 0..n {
            s.refresh(v);
        }
        s
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    #[inline]
    pub fn gain(&self, v: Var) -> f64 {
        self.gain[v.index()]
    }

    #[inline]
    pub fn loss(&self, v: Var) -> f64 {
        self.loss[v.index()]
    }

    #[inline]
    pub fn score(&self, v: Var) -> f64 {
        self.score[v.index()]
    }

    pub(crate) fn scores(&self) -> &[f64] {
        &self.score
    }

    pub(crate) fn last_flips(&self) -> &[u64] {
        &self.last_flip
    }

    pub fn good_vars(&self) -> &IndexSet {
        &self.good_vars
    }

    pub fn falsified_hard(&self) -> &IndexSet {
        &self.falsified_hard
    }

    pub fn falsified_soft(&self) -> &IndexSet {
        &self.falsified_soft
    }

    pub fn sat_count(&self, c: usize) -> u32 {
        self.sat_count[c]
    }

    /// Variable of the unique true literal of `c`, if exactly one exists.
    pub fn unique_satisfier(&self, c: usize) -> Option<Var> {
        (self.sat_count[c] == 1).then(|| Var::new(self.sat_var[c]))
    }

    #[inline]
    pub fn last_flip(&self, v: Var) -> u64 {
        self.last_flip[v.index()]
    }

    /// Number of flips performed on this state.
    pub fn step(&self) -> u64 {
        self.step
    }

    #[inline]
    pub fn is_feasible(&self) -> bool {
        self.falsified_hard.is_empty() && !self.has_empty_hard
    }

    /// Total original weight of falsified soft clauses.
    #[inline]
    pub fn soft_cost(&self) -> u64 {
        self.soft_cost
    }

    pub fn cost(&self) -> Cost {
        if self.is_feasible() {
            Cost::Finite(self.soft_cost)
        } else {
            Cost::Infinite
        }
    }

    #[inline(always)]
    fn refresh(&mut self, v: usize) {
        let score = self.gain[v] - self.loss[v];
        self.score[v] = score;
        if score > GOOD_SCORE_EPS {
            self.good_vars.insert(v);
        } else {
            self.good_vars.remove(v);
        }
    }

    #[inline]
    fn mark_falsified(&mut self, f: &Formula, c: usize) {
        if f.is_hard(c) {
            self.falsified_hard.insert(c);
        } else {
            self.falsified_soft.insert(c);
            self.soft_cost += f.weight(c);
        }
    }

    #[inline]
    fn mark_satisfied(&mut self, f: &Formula, c: usize) {
        if f.is_hard(c) {
            self.falsified_hard.remove(c);
        } else {
            self.falsified_soft.remove(c);
            self.soft_cost -= f.weight(c);
        }
    }

    /// Flips `var` and updates all derived data incrementally.
    pub fn flip(&mut self, f: &Formula, ws: &WeightState, var: Var) {
        let v = var.index();
        self.assignment.flip(var);
        self.step += 1;
        self.last_flip[v] = self.step;
        let made_true = var.lit(self.assignment.value(var));

        for &c in f.occurrences(made_true) {
            let c = c as usize;
            let w = ws.weight(c);
            let count = self.sat_count[c];
            self.sat_count[c] = count + 1;
            match count {
                0 => {
                    self.mark_satisfied(f, c);
                    self.sat_var[c] = v as u32;
                    if w != 0.0 {
                        for &l in f.clause_lits(c) {
                            let u = l.var().index();
                            self.gain[u] -= w;
                            self.refresh(u);
                        }
                        self.loss[v] += w;
                    }
                }
                1 if w != 0.0 => {
                    let u = self.sat_var[c] as usize;
                    self.loss[u] -= w;
                    self.refresh(u);
                }
                _ => {}
            }
        }

        for &c in f.occurrences(!made_true) {
            let c = c as usize;
            let w = ws.weight(c);
            let count = self.sat_count[c];
            self.sat_count[c] = count - 1;
            match count {
                1 => {
                    self.mark_falsified(f, c);
                    if w != 0.0 {
                        self.loss[v] -= w;
                        for &l in f.clause_lits(c) {
                            let u = l.var().index();
                            self.gain[u] += w;
                            self.refresh(u);
                        }
                    }
                }
                2 => {
                    let u = f
                        .clause_lits(c)
                        .iter()
                        .find(|&&l| self.assignment.satisfies(l))
                        .expect("clause keeps one true literal")
                        .var()
                        .index();
                    self.sat_var[c] = u as u32;
                    if w != 0.0 {
                        self.loss[u] += w;
                        self.refresh(u);
                    }
                }
                _ => {}
            }
        }
        self.refresh(v);
    }

    /// Accounts for the dynamic weight of clause `c` having changed by `delta`.
    #[inline]
    pub fn apply_weight_delta(&mut self, f: &Formula, c: usize, delta: f64) {
        if delta == 0.0 {
            return;
        }
        match self.sat_count[c] {
            0 => {
                for &l in f.clause_lits(c) {
                    let u = l.var().index();
                    self.gain[u] += delta;
                    self.refresh(u);
                }
            }
            1 => {
                let u = self.sat_var[c] as usize;
                self.loss[u] += delta;
                self.refresh(u);
            }
            _ => {}
        }
    }

    /// Runs the clause-weight update for a local optimum and keeps scores in sync.
    pub fn update_weights(
        &mut self,
        f: &Formula,
        ws: &mut WeightState,
        p: &WeightParams,
        lo: &LocalOptimum,
    ) -> UpdatePlan {
        let plan = ws.plan(f.kind(), p, lo);
        if plan.hard {
            for i in 0..self.falsified_hard.len() {
                let c = self.falsified_hard.get(i);
                let d = ws.bump_hard(c, p);
                self.apply_weight_delta(f, c, d);
            }
        }
        if plan.soft {
            for &c in f.soft_clauses() {
                let c = c as usize;
                let d = ws.grow_soft(c, p);
                self.apply_weight_delta(f, c, d);
            }
        }
        plan
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn unit_weights(f: &Formula) -> WeightState {
        let mut ws = WeightState::new(f);
        ws.dyn_weight.iter_mut().for_each(|w| *w = 1.0);
        ws
    }

    #[test]
    fn single_hard_clause() {
        let f = Formula::from_clauses(vec![Clause::hard_dimacs(&[1])]).unwrap();
        let ws = unit_weights(&f);
        let mut s = SearchState::new(&f, Assignment::new(vec![false]), &ws);
        let x1 = Var::new(0);
        assert_eq!((s.gain(x1), s.loss(x1), s.score(x1)), (1.0, 0.0, 1.0));
        assert_eq!(s.good_vars().sorted(), vec![0]);
        assert_eq!(s.falsified_hard().sorted(), vec![0]);

        s.flip(&f, &ws, x1);
        assert!(s.falsified_hard().is_empty());
        assert_eq!(s.score(x1), -1.0);
        assert!(s.good_vars().is_empty());
        assert_eq!(s.cost(), Cost::Finite(0));
    }

    #[test]
    fn zero_weight_clause_contributes_nothing() {
        let f = Formula::from_clauses(vec![Clause::soft_dimacs(&[1], 1)]).unwrap();
        let mut ws = WeightState::new(&f);
        ws.initialize(&f, &WeightParams::defaults_for(f.kind()));
        assert_eq!(ws.weight(0), 0.0);
        let s = SearchState::new(&f, Assignment::new(vec![false]), &ws);
        assert_eq!(s.score(Var::new(0)), 0.0);
        assert!(s.good_vars().is_empty());
        assert_eq!(s.cost(), Cost::Finite(1));
    }

    #[test]
    fn double_flip_restores_state() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1, 2]),
            Clause::hard_dimacs(&[-1, 3]),
            Clause::soft_dimacs(&[-2, -3], 3),
            Clause::soft_dimacs(&[1, 3], 5),
        ])
        .unwrap();
        let mut ws = WeightState::new(&f);
        ws.dyn_weight = vec![2.0, 1.0, 0.5, 4.0];
        let start = SearchState::new(&f, Assignment::new(vec![true, false, false]), &ws);
        for v in 0..3 {
            let mut s = start.clone();
            s.flip(&f, &ws, Var::new(v));
            s.flip(&f, &ws, Var::new(v));
            assert_eq!(s.assignment, start.assignment);
            assert_eq!(s.sat_count, start.sat_count);
            assert_eq!(s.gain, start.gain);
            assert_eq!(s.loss, start.loss);
            assert_eq!(s.good_vars.sorted(), start.good_vars.sorted());
            assert_eq!(s.falsified_hard.sorted(), start.falsified_hard.sorted());
            assert_eq!(s.falsified_soft.sorted(), start.falsified_soft.sorted());
            assert_eq!(s.soft_cost, start.soft_cost);
        }
    }

    #[test]
    fn weight_update_keeps_scores_in_sync() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1, 2]),
            Clause::hard_dimacs(&[-1]),
            Clause::soft_dimacs(&[-2], 1),
            Clause::soft_dimacs(&[1, 2], 1),
        ])
        .unwrap();
        let p = WeightParams::defaults_for(f.kind());
        let mut ws = WeightState::new(&f);
        ws.first_feasible_found = true;
        ws.initialize(&f, &p);
        let mut s = SearchState::new(&f, Assignment::new(vec![true, false]), &ws);
        let lo = LocalOptimum {
            feasible: false,
            soft_cost: 2,
            best: Cost::Finite(2),
        };
        let plan = s.update_weights(&f, &mut ws, &p, &lo);
        assert!(plan.hard && plan.soft);
        let fresh = SearchState::new(&f, s.assignment.clone(), &ws);
        for v in 0..2 {
            assert!((s.gain[v] - fresh.gain[v]).abs() < 1e-12);
            assert!((s.loss[v] - fresh.loss[v]).abs() < 1e-12);
        }
        assert_eq!(s.good_vars.sorted(), fresh.good_vars.sorted());
    }
}
