use crate::formula::{Cost, Formula};

/// Largest variable count [`brute_force_optimum`] will enumerate.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{num_vars} variables exceed the enumeration bound of {MAX_BRUTE_FORCE_VARS}")]
pub struct TooLarge {
    pub num_vars: usize,
}

/// Exact optimum by enumerating all `2^n` assignments.
///
/// Clauses are compiled to positive/negative bit masks so each check is two
/// word operations.
pub fn brute_force_optimum(f: &Formula) -> Result<Cost, TooLarge> {
    let n = f.num_vars();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(TooLarge { num_vars: n });
    }
    if f.has_empty_hard() {
        return Ok(Cost::Infinite);
    }
    let masks = |c: usize| {
        f.clause_lits(c).iter().fold((0u32, 0u32), |(p, q), l| {
            let bit = 1u32 << l.var().index();
            if l.is_positive() {
                (p | bit, q)
            } else {
                (p, q | bit)
            }
        })
    };
    let hard: Vec<(u32, u32)> = f
        .hard_clauses()
        .iter()
        .map(|&c| masks(c as usize))
        .collect();
    let soft: Vec<(u32, u32, u64)> = f
        .soft_clauses()
        .iter()
        .map(|&c| {
            let (p, q) = masks(c as usize);
            (p, q, f.weight(c as usize))
        })
        .collect();

    let mut best: Option<u64> = None;
    for a in 0u32..(1u32 << n) {
        if !hard.iter().all(|&(p, q)| (a & p) | (!a & q) != 0) {
            continue;
        }
        let cost: u64 = soft
            .iter()
            .filter(|&&(p, q, _)| (a & p) | (!a & q) == 0)
            .map(|&(_, _, w)| w)
            .sum();
        if best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    }
    Ok(best.map_or(Cost::Infinite, |b| Cost::Finite(b + f.empty_soft_weight())))
}
