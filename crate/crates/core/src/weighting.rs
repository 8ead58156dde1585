//! Dynamic clause weights: initialization at the start of every search
//! round and the update applied at local optima.
//!
//! Partial (PMS) and weighted (WPMS) instances use different rules:
//!
//! | event                         | PMS                               | WPMS                          |
//! |-------------------------------|-----------------------------------|-------------------------------|
//! | init, previous round infeasible | hard 1, soft 0                  | hard 1, soft 0                |
//! | init, previous round feasible   | hard 0, soft 1                  | hard 1, soft `w_org / avg_soft` |
//! | hard update                   | falsified hard `+= h_inc` when infeasible | same                  |
//! | soft update trigger           | feasible seen and `cost >= best`  | current solution feasible     |
//! | soft update                   | `w := delta * (w + w_org / avg_soft)` for every soft clause | same |

use std::fmt;
use std::str::FromStr;

use crate::formula::{Cost, Formula, InstanceKind};

/// Upper bound on any dynamic weight. The multiplicative soft update grows
/// weights geometrically, so long rounds would otherwise overflow to infinity.
pub const WEIGHT_CEILING: f64 = 1e18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightVariant {
    #[default]
    Standard,
    /// Soft-update triggers of PMS and WPMS swapped.
    Alt1,
    /// PMS keeps hard clauses at weight 1 after a feasible round.
    Alt2,
}

impl FromStr for WeightVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(WeightVariant::Standard),
            "alt1" => Ok(WeightVariant::Alt1),
            "alt2" => Ok(WeightVariant::Alt2),
            _ => Err(format!(
                "unknown weight variant `{s}` (expected standard, alt1 or alt2)"
            )),
        }
    }
}

impl fmt::Display for WeightVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightVariant::Standard => "standard",
            WeightVariant::Alt1 => "alt1",
            WeightVariant::Alt2 => "alt2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    /// Additive increment for falsified hard clauses.
    pub h_inc: f64,
    /// Multiplicative factor of the soft update, `> 1`.
    pub delta: f64,
    pub variant: WeightVariant,
}

impl WeightParams {
    pub fn defaults_for(kind: InstanceKind) -> Self {
        match kind {
            InstanceKind::Pms => WeightParams {
                h_inc: 1.0,
                delta: 1.00072,
                variant: WeightVariant::Standard,
            },
            InstanceKind::Wpms => WeightParams {
                h_inc: 28.0,
                delta: 1.001,
                variant: WeightVariant::Standard,
            },
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.h_inc.is_finite() && self.h_inc > 0.0) {
            return Err(format!(
                "h_inc must be a positive number, got {}",
                self.h_inc
            ));
        }
        if !(self.delta.is_finite() && self.delta > 1.0) {
            return Err(format!("delta must be greater than 1, got {}", self.delta));
        }
        Ok(())
    }
}

/// What the search saw at a local optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalOptimum {
    pub feasible: bool,
    /// Original weight of the soft clauses the current assignment falsifies,
    /// counted whether or not it is feasible.
    pub soft_cost: u64,
    /// Best cost found so far in this solve.
    pub best: Cost,
}

/// Which branches of the update fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UpdatePlan {
    pub hard: bool,
    pub soft: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    /// Dynamic weight per clause.
    pub dyn_weight: Vec<f64>,
    /// Mean original soft weight.
    pub avg_soft: f64,
    /// Set once any feasible assignment has been seen; survives restarts.
    pub first_feasible_found: bool,
    /// Whether the previous search round reached a feasible assignment.
    pub prev_round_feasible: bool,
    /// `w_org(c) / avg_soft` per clause, 0 for hard clauses.
    soft_unit: Vec<f64>,
}

impl WeightState {
    pub fn new(f: &Formula) -> Self {
        let avg_soft = f.avg_soft();
        let soft_unit = (0..f.num_clauses())
            .map(|c| {
                if f.is_hard(c) {
                    0.0
                } else {
                    f.weight(c) as f64 / avg_soft
                }
            })
            .collect();
        WeightState {
            dyn_weight: vec![0.0; f.num_clauses()],
            avg_soft,
            first_feasible_found: false,
            prev_round_feasible: false,
            soft_unit,
        }
    }

    #[inline]
    pub fn weight(&self, c: usize) -> f64 {
        self.dyn_weight[c]
    }

    /// `w_org(c) / avg_soft` for soft clauses.
    #[inline]
    pub fn soft_unit(&self, c: usize) -> f64 {
        self.soft_unit[c]
    }

    /// Resets every clause weight for a new round according to
    /// `prev_round_feasible` and the formula's instance kind.
    pub fn initialize(&mut self, f: &Formula, p: &WeightParams) {
        let (hard, soft_pms) = match (f.kind(), self.prev_round_feasible, p.variant) {
            (_, false, _) => (1.0, Some(0.0)),
            (InstanceKind::Pms, true, WeightVariant::Alt2) => (1.0, Some(1.0)),
            (InstanceKind::Pms, true, _) => (0.0, Some(1.0)),
            // soft weights follow w_org / avg_soft
            (InstanceKind::Wpms, true, _) => (1.0, None),
        };
        for c in 0..f.num_clauses() {
            self.dyn_weight[c] = if f.is_hard(c) {
                hard
            } else {
                soft_pms.unwrap_or(self.soft_unit[c])
            };
        }
    }

    pub fn plan(&self, kind: InstanceKind, p: &WeightParams, lo: &LocalOptimum) -> UpdatePlan {
        let pms_rule = self.first_feasible_found && Cost::Finite(lo.soft_cost) >= lo.best;
        let wpms_rule = lo.feasible;
        let soft = match (kind, p.variant) {
            (InstanceKind::Pms, WeightVariant::Alt1) => wpms_rule,
            (InstanceKind::Pms, _) => pms_rule,
            (InstanceKind::Wpms, WeightVariant::Alt1) => pms_rule,
            (InstanceKind::Wpms, _) => wpms_rule,
        };
        UpdatePlan {
            hard: !lo.feasible,
            soft,
        }
    }

    /// Adds `h_inc` to hard clause `c`; returns the change applied.
    #[inline]
    pub fn bump_hard(&mut self, c: usize, p: &WeightParams) -> f64 {
        let old = self.dyn_weight[c];
        let new = (old + p.h_inc).min(WEIGHT_CEILING);
        self.dyn_weight[c] = new;
        new - old
    }

    /// Applies `w := delta * (w + w_org / avg_soft)` to soft clause `c`;
    /// returns the change applied.
    #[inline]
    pub fn grow_soft(&mut self, c: usize, p: &WeightParams) -> f64 {
        let old = self.dyn_weight[c];
        let new = (p.delta * (old + self.soft_unit[c])).min(WEIGHT_CEILING);
        self.dyn_weight[c] = new;
        new - old
    }

    /// Applies a complete update without any score bookkeeping.
    /// `falsified_hard` lists the hard clauses falsified by the current assignment.
    pub fn update(
        &mut self,
        f: &Formula,
        p: &WeightParams,
        lo: &LocalOptimum,
        falsified_hard: &[u32],
    ) -> UpdatePlan {
        let plan = self.plan(f.kind(), p, lo);
        if plan.hard {
            for &c in falsified_hard {
                self.bump_hard(c as usize, p);
            }
        }
        if plan.soft {
            for &c in f.soft_clauses() {
                self.grow_soft(c as usize, p);
            }
        }
        plan
    }
}
