use std::time::{Duration, Instant};

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use serde::{Serialize, Serializer};

use super::select::{pick_bms, pick_from_falsified};
use super::state::SearchState;
use crate::decimation::{unh_decimate, up_decimate, DecimationMethod};
use crate::formula::{Assignment, Cost, Formula, InstanceKind};
use crate::index_set::IndexSet;
use crate::weighting::{LocalOptimum, WeightParams, WeightState};

/// How often (in flips) the wall clock is consulted.
const CLOCK_POLL_MASK: u64 = 1023;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    /// Number of BMS samples.
    pub bms_k: usize,
    /// Steps without improvement before a restart.
    pub max_non_improve_steps: u64,
    pub cutoff: Duration,
    pub seed: u64,
    pub decimation: DecimationMethod,
    /// Total flip budget; when set, runs are exactly replayable.
    pub max_flips: Option<u64>,
    /// Stop as soon as a feasible assignment of at most this cost is found.
    pub target_cost: Option<u64>,
}

impl SearchParams {
    pub fn defaults_for(kind: InstanceKind) -> Self {
        SearchParams {
            bms_k: match kind {
                InstanceKind::Pms => 53,
                InstanceKind::Wpms => 97,
            },
            max_non_improve_steps: 10_000_000,
            cutoff: Duration::from_secs(60),
            seed: 1,
            decimation: DecimationMethod::Auto,
            max_flips: None,
            target_cost: None,
        }
    }
}

/// A new best solution, as reported to the progress sink.
#[derive(Debug, Clone, Copy)]
pub struct Improvement<'a> {
    pub elapsed: Duration,
    pub flips: u64,
    pub cost: u64,
    pub assignment: &'a Assignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub elapsed: f64,
    pub flips: u64,
    pub cost: u64,
}

/// Bookkeeping for one local-search round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundSummary {
    pub steps: u64,
    /// Step of the last improvement of the global best inside this round.
    pub last_improvement: Option<u64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    #[serde(serialize_with = "bitstring")]
    pub best_assignment: Option<Assignment>,
    pub best_cost: Cost,
    /// Seconds until the best solution was found.
    pub time_to_best: f64,
    pub total_flips: u64,
    pub elapsed: f64,
    /// The best cost equals the unavoidable cost of empty soft clauses
    /// (usually 0), so it is optimal.
    pub optimum_proven: bool,
    pub improvement_trace: Vec<TracePoint>,
    pub rounds: Vec<RoundSummary>,
}

fn bitstring<S: Serializer>(a: &Option<Assignment>, s: S) -> Result<S::Ok, S::Error> {
    match a {
        Some(a) => s.serialize_str(&a.to_bitstring()),
        None => s.serialize_none(),
    }
}

/// Anytime search: restarts from decimation, runs weighted local search
/// with BMS selection and clause weighting at local optima, and keeps the
/// best feasible assignment until the cutoff or flip budget is exhausted.
pub fn run(
    f: &Formula,
    sp: &SearchParams,
    wp: &WeightParams,
    sink: &mut dyn FnMut(&Improvement<'_>),
) -> RunResult {
    Search::new(f, sp, wp, sink).run()
}

struct Search<'a, 's> {
    f: &'a Formula,
    sp: &'a SearchParams,
    wp: &'a WeightParams,
    sink: &'s mut dyn FnMut(&Improvement<'_>),
    rng: SmallRng,
    start: Instant,
    ws: WeightState,
    best: Option<Assignment>,
    best_cost: Cost,
    time_to_best: f64,
    total_flips: u64,
    trace: Vec<TracePoint>,
    rounds: Vec<RoundSummary>,
    optimum_proven: bool,
}

impl<'a, 's> Search<'a, 's> {
    fn new(
        f: &'a Formula,
        sp: &'a SearchParams,
        wp: &'a WeightParams,
        sink: &'s mut dyn FnMut(&Improvement<'_>),
    ) -> Self {
        Search {
            f,
            sp,
            wp,
            sink,
            rng: SmallRng::seed_from_u64(sp.seed),
            start: Instant::now(),
            ws: WeightState::new(f),
            best: None,
            best_cost: Cost::Infinite,
            time_to_best: 0.0,
            total_flips: 0,
            trace: Vec::new(),
            rounds: Vec::new(),
            optimum_proven: false,
        }
    }

    fn out_of_budget(&self) -> bool {
        if let Some(max) = self.sp.max_flips {
            if self.total_flips >= max {
                return true;
            }
        }
        self.start.elapsed() >= self.sp.cutoff
    }

    /// Whether no further improvement is wanted.
    fn done(&self) -> bool {
        match self.best_cost {
            Cost::Finite(c) => {
                self.optimum_proven
                    || c <= self.f.empty_soft_weight()
                    || self.sp.target_cost.is_some_and(|t| c <= t)
            }
            Cost::Infinite => false,
        }
    }

    fn use_unh(&self) -> bool {
        match self.sp.decimation {
            DecimationMethod::Unh => true,
            DecimationMethod::Up => false,
            DecimationMethod::Auto => self.f.kind() == InstanceKind::Pms,
        }
    }

    fn record(&mut self, state: &SearchState) {
        let cost = state.soft_cost();
        let elapsed = self.start.elapsed();
        match &mut self.best {
            Some(b) => b.copy_from(state.assignment()),
            None => self.best = Some(state.assignment().clone()),
        }
        self.best_cost = Cost::Finite(cost);
        self.time_to_best = elapsed.as_secs_f64();
        self.trace.push(TracePoint {
            elapsed: self.time_to_best,
            flips: self.total_flips,
            cost,
        });
        (self.sink)(&Improvement {
            elapsed,
            flips: self.total_flips,
            cost,
            assignment: state.assignment(),
        });
        if cost <= self.f.empty_soft_weight() {
            self.optimum_proven = true;
        }
    }

    fn run(mut self) -> RunResult {
        let f = self.f;
        if !f.has_empty_hard() {
            self.search();
        }
        RunResult {
            best_assignment: self.best,
            best_cost: self.best_cost,
            time_to_best: self.time_to_best,
            total_flips: self.total_flips,
            elapsed: self.start.elapsed().as_secs_f64(),
            optimum_proven: self.optimum_proven,
            improvement_trace: self.trace,
            rounds: self.rounds,
        }
    }

    fn search(&mut self) {
        let f = self.f;
        let n = f.num_vars();
        let mut prev_best = Assignment::new((0..n).map(|_| self.rng.gen()).collect());
        // Variables flipped an odd number of times since the round's best state.
        let mut dirty = IndexSet::new(n);

        while !self.done() && !self.out_of_budget() {
            let init = if self.use_unh() {
                unh_decimate(f, &prev_best, &mut self.rng)
            } else {
                up_decimate(f, &mut self.rng)
            };
            self.ws.initialize(f, self.wp);
            let mut state = SearchState::new(f, init, &self.ws);

            let mut round_best = state.assignment().clone();
            let mut round_key = (state.falsified_hard().len(), state.soft_cost());
            dirty.clear();
            let mut summary = RoundSummary {
                steps: 0,
                last_improvement: None,
                feasible: false,
            };
            let mut limit = self.sp.max_non_improve_steps;
            let mut step = 0u64;
            let mut stop = false;

            while step < limit {
                let feasible = state.is_feasible();
                if feasible {
                    summary.feasible = true;
                    self.ws.first_feasible_found = true;
                    if Cost::Finite(state.soft_cost()) < self.best_cost {
                        self.record(&state);
                        summary.last_improvement = Some(step);
                        limit = step + self.sp.max_non_improve_steps;
                        if self.done() {
                            stop = true;
                            break;
                        }
                    }
                }
                let key = (state.falsified_hard().len(), state.soft_cost());
                if key < round_key {
                    round_key = key;
                    for &v in dirty.as_slice() {
                        round_best.flip(crate::formula::Var::new(v));
                    }
                    dirty.clear();
                }

                let v = if !state.good_vars().is_empty() {
                    pick_bms(&state, self.sp.bms_k, &mut self.rng)
                } else {
                    let lo = LocalOptimum {
                        feasible,
                        soft_cost: state.soft_cost(),
                        best: self.best_cost,
                    };
                    state.update_weights(f, &mut self.ws, self.wp, &lo);
                    match pick_from_falsified(&state, f, &mut self.rng) {
                        Ok(v) => v,
                        Err(_) => {
                            // every clause satisfied: nothing left to improve
                            self.optimum_proven = true;
                            stop = true;
                            break;
                        }
                    }
                };
                state.flip(f, &self.ws, v);
                if !dirty.remove(v.index()) {
                    dirty.insert(v.index());
                }
                step += 1;
                self.total_flips += 1;
                if self.sp.max_flips.is_some_and(|m| self.total_flips >= m)
                    || (self.total_flips & CLOCK_POLL_MASK == 0
                        && self.start.elapsed() >= self.sp.cutoff)
                {
                    stop = true;
                    break;
                }
            }

            summary.steps = step;
            self.rounds.push(summary);
            if stop {
                break;
            }
            prev_best = round_best;
            self.ws.prev_round_feasible = summary.feasible;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn quick(kind: InstanceKind) -> SearchParams {
        SearchParams {
            cutoff: Duration::from_secs(1),
            max_flips: Some(200_000),
            ..SearchParams::defaults_for(kind)
        }
    }

    #[test]
    fn defaults() {
        let p = SearchParams::defaults_for(InstanceKind::Pms);
        assert_eq!((p.bms_k, p.max_non_improve_steps), (53, 10_000_000));
        assert_eq!(SearchParams::defaults_for(InstanceKind::Wpms).bms_k, 97);
    }

    #[test]
    fn trivially_satisfiable() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1]),
            Clause::soft_dimacs(&[2], 1),
        ])
        .unwrap();
        let r = run(
            &f,
            &quick(f.kind()),
            &WeightParams::defaults_for(f.kind()),
            &mut |_| {},
        );
        assert_eq!(r.best_cost, Cost::Finite(0));
        assert!(r.optimum_proven);
        assert_eq!(r.best_assignment.unwrap().values(), &[true, true]);
    }

    #[test]
    fn infeasible_instance_reports_nothing() {
        let f = Formula::from_clauses(vec![Clause::hard_dimacs(&[1]), Clause::hard_dimacs(&[-1])])
            .unwrap();
        let sp = SearchParams {
            max_flips: Some(10_000),
            ..quick(f.kind())
        };
        let r = run(&f, &sp, &WeightParams::defaults_for(f.kind()), &mut |_| {});
        assert_eq!(r.best_cost, Cost::Infinite);
        assert!(r.best_assignment.is_none());
        assert!(r.improvement_trace.is_empty());
        assert_eq!(r.total_flips, 10_000);
    }

    #[test]
    fn empty_hard_clause_stops_immediately() {
        let f = Formula::from_clauses(vec![Clause::hard(vec![]), Clause::soft_dimacs(&[1], 1)])
            .unwrap();
        let r = run(
            &f,
            &quick(f.kind()),
            &WeightParams::defaults_for(f.kind()),
            &mut |_| {},
        );
        assert_eq!(r.best_cost, Cost::Infinite);
        assert_eq!(r.total_flips, 0);
    }

    #[test]
    fn empty_soft_clauses_bound_the_optimum() {
        let f = Formula::from_clauses(vec![Clause::soft(vec![], 4), Clause::soft_dimacs(&[1], 2)])
            .unwrap();
        let r = run(
            &f,
            &quick(f.kind()),
            &WeightParams::defaults_for(f.kind()),
            &mut |_| {},
        );
        assert_eq!(r.best_cost, Cost::Finite(4));
        assert!(r.optimum_proven);
    }

    #[test]
    fn conflicting_softs() {
        // Optimum 3: keep x1 true, falsify the weight-3 clause.
        let f = Formula::from_clauses(vec![
            Clause::soft_dimacs(&[1], 7),
            Clause::soft_dimacs(&[-1], 3),
            Clause::hard_dimacs(&[1, 2]),
        ])
        .unwrap();
        let mut seen = Vec::new();
        let r = run(
            &f,
            &quick(f.kind()),
            &WeightParams::defaults_for(f.kind()),
            &mut |imp| seen.push(imp.cost),
        );
        assert_eq!(r.best_cost, Cost::Finite(3));
        assert_eq!(
            seen,
            r.improvement_trace
                .iter()
                .map(|t| t.cost)
                .collect::<Vec<_>>()
        );
        assert!(seen.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn restart_budget_is_respected() {
        // Unsatisfiable hard part: never feasible, so every round runs exactly L steps.
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1, 2]),
            Clause::hard_dimacs(&[-1, 2]),
            Clause::hard_dimacs(&[1, -2]),
            Clause::hard_dimacs(&[-1, -2]),
        ])
        .unwrap();
        let sp = SearchParams {
            max_non_improve_steps: 500,
            max_flips: Some(2_200),
            ..quick(f.kind())
        };
        let r = run(&f, &sp, &WeightParams::defaults_for(f.kind()), &mut |_| {});
        let steps: Vec<u64> = r.rounds.iter().map(|r| r.steps).collect();
        assert_eq!(steps, vec![500, 500, 500, 500, 200]);
    }
}
