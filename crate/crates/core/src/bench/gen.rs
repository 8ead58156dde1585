//! Random instance families for tests and desk-scale benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{Clause, Formula, Lit, Var};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub num_vars: usize,
    pub num_clauses: usize,
    /// Probability that a clause is hard.
    pub hard_fraction: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Soft weights are drawn from `1..=max_weight`; 1 gives a PMS instance.
    pub max_weight: u64,
}

fn random_clause_lits<R: Rng + ?Sized>(
    rng: &mut R,
    num_vars: usize,
    min_len: usize,
    max_len: usize,
) -> Vec<Lit> {
    let len = rng.gen_range(min_len..=max_len).min(num_vars);
    let vars = rand::seq::index::sample(rng, num_vars, len);
    vars.into_iter()
        .map(|v| Var::new(v as u32).lit(rng.gen()))
        .collect()
}

/// Random instance whose hard clauses are all satisfied by a hidden
/// assignment, so it always has a feasible solution.
pub fn planted<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> Formula {
    let hidden: Vec<bool> = (0..spec.num_vars).map(|_| rng.gen()).collect();
    let mut clauses = Vec::with_capacity(spec.num_clauses);
    for _ in 0..spec.num_clauses {
        let mut lits = random_clause_lits(rng, spec.num_vars, spec.min_len, spec.max_len);
        if rng.gen_bool(spec.hard_fraction) {
            if !lits.iter().any(|l| l.holds(hidden[l.var().index()])) {
                let i = rng.gen_range(0..lits.len());
                lits[i] = !lits[i];
            }
            clauses.push(Clause::hard(lits));
        } else {
            clauses.push(Clause::soft(lits, rng.gen_range(1..=spec.max_weight)));
        }
    }
    let mut b = crate::formula::FormulaBuilder::new();
    b.reserve_vars(spec.num_vars);
    for c in clauses {
        b.add(c).expect("generated clauses are valid");
    }
    b.build().expect("generated weights are small")
}

/// Random instance without any feasibility guarantee.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> Formula {
    let mut b = crate::formula::FormulaBuilder::new();
    b.reserve_vars(spec.num_vars);
    for _ in 0..spec.num_clauses {
        let lits = random_clause_lits(rng, spec.num_vars, spec.min_len, spec.max_len);
        let c = if rng.gen_bool(spec.hard_fraction) {
            Clause::hard(lits)
        } else {
            Clause::soft(lits, rng.gen_range(1..=spec.max_weight))
        };
        b.add(c).expect("generated clauses are valid");
    }
    b.build().expect("generated weights are small")
}

/// Horn instance whose hard part is decided by unit propagation alone.
///
/// Variables are visited in random order; a few become unit facts and most
/// of the rest are implied by one or two earlier variables through clauses
/// `(¬p ∨ x)` or `(¬p ∨ ¬q ∨ x)`. Remaining variables stay unconstrained
/// by hard clauses. Random soft clauses are added on top.
pub fn horn_chain<R: Rng + ?Sized>(rng: &mut R, num_vars: usize, num_soft: usize) -> Formula {
    assert!(num_vars >= 1);
    let mut order: Vec<u32> = (0..num_vars as u32).collect();
    order.shuffle(rng);
    let mut clauses = Vec::new();
    let mut forced: Vec<Var> = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let x = Var::new(v);
        if i == 0 || rng.gen_bool(0.1) {
            clauses.push(Clause::hard([x.pos()]));
        } else if rng.gen_bool(0.85) {
            let p = forced[rng.gen_range(0..forced.len())];
            if forced.len() > 1 && rng.gen_bool(0.3) {
                let q = loop {
                    let q = forced[rng.gen_range(0..forced.len())];
                    if q != p {
                        break q;
                    }
                };
                clauses.push(Clause::hard([p.neg(), q.neg(), x.pos()]));
            } else {
                clauses.push(Clause::hard([p.neg(), x.pos()]));
            }
        } else {
            continue;
        }
        forced.push(x);
    }
    clauses.shuffle(rng);
    for _ in 0..num_soft {
        let lits = random_clause_lits(rng, num_vars, 1, 3);
        clauses.push(Clause::soft(lits, 1));
    }
    let mut b = crate::formula::FormulaBuilder::new();
    b.reserve_vars(num_vars);
    for c in clauses {
        b.add(c).expect("generated clauses are valid");
    }
    b.build().expect("generated weights are small")
}
