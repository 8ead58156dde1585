use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use super::state::SearchState;
use crate::formula::{Formula, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no falsified clause to pick from")]
pub struct NoFalsifiedClause;

/// `a` beats `b`: higher score, ties to the least recently flipped.
#[inline]
fn better(state: &SearchState, a: Var, b: Var) -> bool {
    let (sa, sb) = (state.score(a), state.score(b));
    sa > sb || (sa == sb && state.last_flip(a) < state.last_flip(b))
}

/// Best from multiple selections: draws `k` GoodVars uniformly with
/// replacement and returns the best of them.
///
/// Panics if there are no GoodVars.
pub fn pick_bms<R: Rng + ?Sized>(state: &SearchState, k: usize, rng: &mut R) -> Var {
    let good = state.good_vars().as_slice();
    assert!(!good.is_empty(), "BMS needs at least one GoodVar");
    let (scores, last_flip) = (state.scores(), state.last_flips());
    let index = Uniform::new(0, good.len());
    let mut best = good[index.sample(rng)] as usize;
    let mut best_score = scores[best];
    for _ in 1..k.max(1) {
        let v = good[index.sample(rng)] as usize;
        let s = scores[v];
        if s > best_score || (s == best_score && last_flip[v] < last_flip[best]) {
            best = v;
            best_score = s;
        }
    }
    Var::new(best as u32)
}

/// Picks a random falsified hard clause (soft if no hard one is falsified)
/// and returns its best-scoring variable.
pub fn pick_from_falsified<R: Rng + ?Sized>(
    state: &SearchState,
    f: &Formula,
    rng: &mut R,
) -> Result<Var, NoFalsifiedClause> {
    let set = if !state.falsified_hard().is_empty() {
        state.falsified_hard()
    } else if !state.falsified_soft().is_empty() {
        state.falsified_soft()
    } else {
        return Err(NoFalsifiedClause);
    };
    let c = set.get(rng.gen_range(0..set.len()));
    let lits = f.clause_lits(c);
    let mut best = lits[0].var();
    for l in &lits[1..] {
        if better(state, l.var(), best) {
            best = l.var();
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Assignment, Clause};
    use crate::weighting::WeightState;
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    fn state(f: &Formula, weights: Vec<f64>, a: Vec<bool>) -> (WeightState, SearchState) {
        let mut ws = WeightState::new(f);
        ws.dyn_weight = weights;
        let s = SearchState::new(f, Assignment::new(a), &ws);
        (ws, s)
    }

    #[test]
    fn bms_singleton() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[3]),
            Clause::hard_dimacs(&[1, 2]),
        ])
        .unwrap();
        let (_, s) = state(&f, vec![1.0, 1.0], vec![true, false, false]);
        for seed in 0..20 {
            assert_eq!(
                pick_bms(&s, 5, &mut SmallRng::seed_from_u64(seed)),
                Var::new(2)
            );
        }
    }

    #[test]
    fn bms_prefers_higher_score() {
        // x1 gains 5, x2 gains 9.
        let f = Formula::from_clauses(vec![Clause::hard_dimacs(&[1]), Clause::hard_dimacs(&[2])])
            .unwrap();
        let (_, s) = state(&f, vec![5.0, 9.0], vec![false, false]);
        for seed in 0..50 {
            assert_eq!(
                pick_bms(&s, 20, &mut SmallRng::seed_from_u64(seed)),
                Var::new(1)
            );
        }
    }

    #[test]
    fn bms_ties_go_to_least_recently_flipped() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1]),
            Clause::hard_dimacs(&[2]),
            Clause::hard_dimacs(&[3]),
        ])
        .unwrap();
        let (ws, mut s) = state(&f, vec![1.0, 1.0, 1.0], vec![false, false, true]);
        // x1 flipped at step 2, x2 at step 4; both end up false with score 1.
        s.flip(&f, &ws, Var::new(0));
        s.flip(&f, &ws, Var::new(0));
        s.flip(&f, &ws, Var::new(1));
        s.flip(&f, &ws, Var::new(1));
        assert_eq!(s.last_flip(Var::new(0)), 2);
        assert_eq!(s.last_flip(Var::new(1)), 4);
        assert_eq!(s.score(Var::new(0)), s.score(Var::new(1)));
        for seed in 0..50 {
            assert_eq!(
                pick_bms(&s, 64, &mut SmallRng::seed_from_u64(seed)),
                Var::new(0)
            );
        }
    }

    #[test]
    fn falsified_pick_takes_max_score() {
        // x1 breaks clause 1 (w 1), x2 breaks clause 2 (w 4).
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1, 2]),
            Clause::hard_dimacs(&[-1, 3]),
            Clause::hard_dimacs(&[-2, 3]),
        ])
        .unwrap();
        let (_, s) = state(&f, vec![0.0, 1.0, 4.0], vec![false, false, false]);
        assert_eq!(s.score(Var::new(0)), -1.0);
        assert_eq!(s.score(Var::new(1)), -4.0);
        let got = pick_from_falsified(&s, &f, &mut SmallRng::seed_from_u64(1)).unwrap();
        assert_eq!(got, Var::new(0));
    }

    #[test]
    fn falsified_pick_soft_fallback_and_error() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1]),
            Clause::soft_dimacs(&[-5], 1),
        ])
        .unwrap();
        let (_, s) = state(&f, vec![1.0, 1.0], vec![true, false, false, false, true]);
        let got = pick_from_falsified(&s, &f, &mut SmallRng::seed_from_u64(1)).unwrap();
        assert_eq!(got, Var::new(4));

        let (_, s) = state(&f, vec![1.0, 1.0], vec![true, false, false, false, false]);
        assert_eq!(
            pick_from_falsified(&s, &f, &mut SmallRng::seed_from_u64(1)),
            Err(NoFalsifiedClause)
        );
    }

    #[test]
    fn falsified_clause_choice_is_uniform() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1]),
            Clause::hard_dimacs(&[2]),
            Clause::hard_dimacs(&[3]),
        ])
        .unwrap();
        let (_, s) = state(&f, vec![1.0; 3], vec![false; 3]);
        let mut rng = SmallRng::seed_from_u64(99);
        let mut counts = [0u32; 3];
        let trials = 3000;
        for _ in 0..trials {
            counts[pick_from_falsified(&s, &f, &mut rng).unwrap().index()] += 1;
        }
        let expected = trials as f64 / 3.0;
        let sigma = (trials as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }
}
