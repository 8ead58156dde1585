#![allow(dead_code)]

use rand::Rng;
use wpms_sls::formula::{Clause, FormulaBuilder};
use wpms_sls::search::SearchState;
use wpms_sls::weighting::WeightState;
use wpms_sls::{Formula, Var};

/// Random instance over exactly `num_vars` variables. Literals are drawn
/// with replacement, so duplicates and tautologies occur.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    num_clauses: usize,
    hard: f64,
    max_w: u64,
) -> Formula {
    let mut b = FormulaBuilder::new();
    b.reserve_vars(num_vars);
    for _ in 0..num_clauses {
        let len = rng.gen_range(1..=4);
        let lits: Vec<i64> = (0..len)
            .map(|_| {
                let v = rng.gen_range(1..=num_vars as i64);
                if rng.gen() {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let c = if rng.gen_bool(hard) {
            Clause::hard_dimacs(&lits)
        } else {
            Clause::soft_dimacs(&lits, rng.gen_range(1..=max_w))
        };
        b.add(c).unwrap();
    }
    b.build().unwrap()
}

/// Gain, loss and GoodVars computed straight from their definitions.
pub struct Naive {
    pub gain: Vec<f64>,
    pub loss: Vec<f64>,
    pub good: Vec<bool>,
}

pub fn naive_scores(f: &Formula, ws: &WeightState, s: &SearchState) -> Naive {
    let a = s.assignment();
    let n = f.num_vars();
    let mut gain = vec![0.0; n];
    let mut loss = vec![0.0; n];
    for c in 0..f.num_clauses() {
        let true_lits: Vec<_> = f
            .clause_lits(c)
            .iter()
            .filter(|&&l| a.satisfies(l))
            .collect();
        match true_lits.len() {
            0 => f
                .clause_lits(c)
                .iter()
                .for_each(|l| gain[l.var().index()] += ws.weight(c)),
            1 => loss[true_lits[0].var().index()] += ws.weight(c),
            _ => {}
        }
    }
    let good = (0..n)
        .map(|v| gain[v] - loss[v] > wpms_sls::search::GOOD_SCORE_EPS)
        .collect();
    Naive { gain, loss, good }
}

/// Largest absolute gain/loss deviation, plus whether GoodVars agree exactly.
pub fn compare(f: &Formula, ws: &WeightState, s: &SearchState) -> (f64, bool) {
    let naive = naive_scores(f, ws, s);
    let mut worst = 0.0f64;
    let mut sets_equal = s.good_vars().len() == naive.good.iter().filter(|&&g| g).count();
    for v in 0..f.num_vars() {
        let var = Var::new(v as u32);
        worst = worst
            .max((s.gain(var) - naive.gain[v]).abs())
            .max((s.loss(var) - naive.loss[v]).abs());
        sets_equal &= s.good_vars().contains(v) == naive.good[v];
    }
    (worst, sets_equal)
}

/// Cost of a `v` bitstring under a WCNF text, computed by a checker that
/// shares no code with the library. `None` means a hard clause is violated.
pub fn check_model(wcnf: &str, model: &str) -> Option<u64> {
    let values: Vec<bool> = model.chars().map(|c| c == '1').collect();
    let mut top = None;
    let mut cost = 0;
    for line in wcnf.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            top = line
                .split_whitespace()
                .nth(4)
                .map(|t| t.parse::<u64>().unwrap());
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        let (hard, weight) = match (head, top) {
            ("h", _) => (true, 0),
            (w, Some(t)) => {
                let w: u64 = w.parse().unwrap();
                (w >= t, w)
            }
            (w, None) => (false, w.parse().unwrap()),
        };
        let sat = toks
            .map(|t| t.parse::<i64>().unwrap())
            .take_while(|&l| l != 0)
            .any(|l| {
                let v = values[(l.unsigned_abs() - 1) as usize];
                if l > 0 {
                    v
                } else {
                    !v
                }
            });
        if !sat {
            if hard {
                return None;
            }
            cost += weight;
        }
    }
    Some(cost)
}
