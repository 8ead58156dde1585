//! Clause database, assignments and the cost function of a (weighted)
//! partial MaxSAT instance.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// A propositional variable, zero-based internally.
///
/// DIMACS files number variables from 1; use [`Var::from_dimacs`] and
/// [`Var::to_dimacs`] at the I/O boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub const fn new(index: u32) -> Self {
        Var(index)
    }

    /// Variable number `n >= 1` as written in DIMACS.
    pub fn from_dimacs(n: u32) -> Self {
        assert!(n >= 1, "DIMACS variables start at 1");
        Var(n - 1)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn to_dimacs(self) -> u32 {
        self.0 + 1
    }

    pub const fn lit(self, positive: bool) -> Lit {
        Lit((self.0 << 1) | (!positive) as u32)
    }

    pub const fn pos(self) -> Lit {
        self.lit(true)
    }

    pub const fn neg(self) -> Lit {
        self.lit(false)
    }
}

/// A literal packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub const fn new(var: Var, positive: bool) -> Self {
        var.lit(positive)
    }

    /// Parses a non-zero DIMACS integer literal.
    pub fn from_dimacs(l: i64) -> Self {
        assert!(l != 0, "0 is not a literal");
        let v = Var::from_dimacs(l.unsigned_abs() as u32);
        v.lit(l > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().to_dimacs() as i64;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub const fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub const fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index usable for per-literal tables of size `2 * num_vars`.
    pub const fn code(self) -> usize {
        self.0 as usize
    }

    pub const fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    /// Whether the literal is true under `value` for its variable.
    #[inline]
    pub const fn holds(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseKind {
    Hard,
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    /// Partial MaxSAT: all soft clauses carry the same weight.
    Pms,
    /// Weighted partial MaxSAT.
    Wpms,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::Pms => "PMS",
            InstanceKind::Wpms => "WPMS",
        })
    }
}

/// A clause as handed to [`FormulaBuilder`]. Normalization (duplicate
/// removal, tautology dropping) happens when it is added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub lits: Vec<Lit>,
    pub kind: ClauseKind,
    /// Original weight; 0 for hard clauses.
    pub weight: u64,
}

impl Clause {
    pub fn hard(lits: impl IntoIterator<Item = Lit>) -> Self {
        Clause {
            lits: lits.into_iter().collect(),
            kind: ClauseKind::Hard,
            weight: 0,
        }
    }

    pub fn soft(lits: impl IntoIterator<Item = Lit>, weight: u64) -> Self {
        Clause {
            lits: lits.into_iter().collect(),
            kind: ClauseKind::Soft,
            weight,
        }
    }

    /// Convenience constructor from DIMACS integers.
    pub fn hard_dimacs(lits: &[i64]) -> Self {
        Clause::hard(lits.iter().map(|&l| Lit::from_dimacs(l)))
    }

    pub fn soft_dimacs(lits: &[i64], weight: u64) -> Self {
        Clause::soft(lits.iter().map(|&l| Lit::from_dimacs(l)), weight)
    }

    pub fn is_hard(&self) -> bool {
        self.kind == ClauseKind::Hard
    }
}

/// Borrowed view of a clause stored inside a [`Formula`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseRef<'a> {
    pub lits: &'a [Lit],
    pub kind: ClauseKind,
    pub weight: u64,
}

impl ClauseRef<'_> {
    pub fn is_hard(&self) -> bool {
        self.kind == ClauseKind::Hard
    }

    pub fn is_satisfied(&self, a: &Assignment) -> bool {
        self.lits.iter().any(|&l| a.satisfies(l))
    }

    pub fn to_owned(&self) -> Clause {
        Clause {
            lits: self.lits.to_vec(),
            kind: self.kind,
            weight: self.weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("soft clause has non-positive weight")]
    NonPositiveSoftWeight,
    #[error("total soft weight exceeds the 63-bit range")]
    WeightOverflow,
    #[error("literal {lit} refers to a variable beyond num_vars = {num_vars}")]
    LiteralOutOfRange { lit: i64, num_vars: usize },
}

/// Immutable (W)PMS instance.
///
/// Clauses are stored flat: literals of clause `i` live in
/// `lits[offsets[i]..offsets[i + 1]]`. The occurrence index maps each literal
/// code to the clauses containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    num_vars: usize,
    lits: Vec<Lit>,
    offsets: Vec<u32>,
    kinds: Vec<ClauseKind>,
    weights: Vec<u64>,
    hard: Vec<u32>,
    soft: Vec<u32>,
    occ_offsets: Vec<u32>,
    occ: Vec<u32>,
    kind: InstanceKind,
    total_soft_weight: u64,
    /// Weight of soft clauses that were empty in the input: always falsified.
    empty_soft_weight: u64,
    empty_soft: Vec<u64>,
    has_empty_hard: bool,
}

impl Formula {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    /// The same formula with its instance kind overridden.
    pub fn with_kind(mut self, kind: InstanceKind) -> Self {
        self.kind = kind;
        self
    }

    #[inline]
    pub fn clause_lits(&self, c: usize) -> &[Lit] {
        &self.lits[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }

    #[inline]
    pub fn clause_kind(&self, c: usize) -> ClauseKind {
        self.kinds[c]
    }

    #[inline]
    pub fn is_hard(&self, c: usize) -> bool {
        self.kinds[c] == ClauseKind::Hard
    }

    /// Original weight of clause `c` (0 for hard clauses).
    #[inline]
    pub fn weight(&self, c: usize) -> u64 {
        self.weights[c]
    }

    pub fn clause(&self, c: usize) -> ClauseRef<'_> {
        ClauseRef {
            lits: self.clause_lits(c),
            kind: self.kinds[c],
            weight: self.weights[c],
        }
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = ClauseRef<'_>> + '_ {
        (0..self.num_clauses()).map(move |c| self.clause(c))
    }

    pub fn hard_clauses(&self) -> &[u32] {
        &self.hard
    }

    pub fn soft_clauses(&self) -> &[u32] {
        &self.soft
    }

    /// Clauses containing `lit`, in increasing index order.
    #[inline]
    pub fn occurrences(&self, lit: Lit) -> &[u32] {
        let code = lit.code();
        &self.occ[self.occ_offsets[code] as usize..self.occ_offsets[code + 1] as usize]
    }

    pub fn total_soft_weight(&self) -> u64 {
        self.total_soft_weight
    }

    /// Mean original weight of the (non-empty) soft clauses, 0 if there are none.
    pub fn avg_soft(&self) -> f64 {
        if self.soft.is_empty() {
            0.0
        } else {
            let sum: u64 = self.soft.iter().map(|&c| self.weights[c as usize]).sum();
            sum as f64 / self.soft.len() as f64
        }
    }

    /// Cost contributed by empty soft clauses, paid by every assignment.
    pub fn empty_soft_weight(&self) -> u64 {
        self.empty_soft_weight
    }

    /// Weights of the empty soft clauses in input order.
    pub fn empty_soft_clauses(&self) -> &[u64] {
        &self.empty_soft
    }

    /// An empty hard clause makes every assignment infeasible.
    pub fn has_empty_hard(&self) -> bool {
        self.has_empty_hard
    }

    pub fn is_feasible(&self, a: &Assignment) -> bool {
        !self.has_empty_hard
            && self
                .hard
                .iter()
                .all(|&c| self.clause(c as usize).is_satisfied(a))
    }

    /// Sum of original weights of falsified soft clauses, ignoring hard clauses.
    pub fn soft_cost(&self, a: &Assignment) -> u64 {
        self.empty_soft_weight
            + self
                .soft
                .iter()
                .map(|&c| self.clause(c as usize))
                .filter(|cl| !cl.is_satisfied(a))
                .map(|cl| cl.weight)
                .sum::<u64>()
    }

    pub fn cost(&self, a: &Assignment) -> Cost {
        if self.is_feasible(a) {
            Cost::Finite(self.soft_cost(a))
        } else {
            Cost::Infinite
        }
    }
}

/// Incremental constructor for [`Formula`].
#[derive(Debug, Clone, Default)]
pub struct FormulaBuilder {
    num_vars: usize,
    clauses: Vec<Clause>,
    empty_soft: Vec<u64>,
    has_empty_hard: bool,
    fixed_vars: bool,
    scratch: Vec<Lit>,
}

impl FormulaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// A builder whose variable count is fixed; literals beyond it are rejected.
    pub fn with_num_vars(num_vars: usize) -> Self {
        FormulaBuilder {
            num_vars,
            fixed_vars: true,
            ..Self::default()
        }
    }

    /// Adds a clause after removing duplicate literals. Tautologies are
    /// dropped and empty clauses are recorded separately.
    pub fn add(&mut self, clause: Clause) -> Result<&mut Self, FormulaError> {
        if clause.kind == ClauseKind::Soft && clause.weight == 0 {
            return Err(FormulaError::NonPositiveSoftWeight);
        }
        for &l in &clause.lits {
            let needed = l.var().index() + 1;
            if needed > self.num_vars {
                if self.fixed_vars {
                    return Err(FormulaError::LiteralOutOfRange {
                        lit: l.to_dimacs(),
                        num_vars: self.num_vars,
                    });
                }
                self.num_vars = needed;
            }
        }
        self.scratch.clear();
        for &l in &clause.lits {
            if !self.scratch.contains(&l) {
                self.scratch.push(l);
            }
        }
        if self.scratch.iter().any(|&l| self.scratch.contains(&!l)) {
            return Ok(self);
        }
        if self.scratch.is_empty() {
            match clause.kind {
                ClauseKind::Hard => self.has_empty_hard = true,
                ClauseKind::Soft => self.empty_soft.push(clause.weight),
            }
            return Ok(self);
        }
        self.clauses.push(Clause {
            lits: self.scratch.clone(),
            kind: clause.kind,
            weight: clause.weight,
        });
        Ok(self)
    }

    /// Makes sure at least `n` variables exist.
    pub fn reserve_vars(&mut self, n: usize) -> &mut Self {
        self.num_vars = self.num_vars.max(n);
        self
    }

    pub fn build(self) -> Result<Formula, FormulaError> {
        let num_vars = self.num_vars;
        let m = self.clauses.len();
        let mut lits = Vec::with_capacity(self.clauses.iter().map(|c| c.lits.len()).sum());
        let mut offsets = Vec::with_capacity(m + 1);
        let mut kinds = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mut hard = Vec::new();
        let mut soft = Vec::new();
        let mut total: u64 = 0;
        offsets.push(0u32);
        for (i, c) in self.clauses.into_iter().enumerate() {
            lits.extend_from_slice(&c.lits);
            offsets.push(lits.len() as u32);
            kinds.push(c.kind);
            match c.kind {
                ClauseKind::Hard => {
                    hard.push(i as u32);
                    weights.push(0);
                }
                ClauseKind::Soft => {
                    soft.push(i as u32);
                    weights.push(c.weight);
                    total = add_weight(total, c.weight)?;
                }
            }
        }
        let mut empty_soft_weight = 0u64;
        for &w in &self.empty_soft {
            empty_soft_weight = add_weight(empty_soft_weight, w)?;
        }
        add_weight(total, empty_soft_weight)?;

        // Occurrence index in CSR form.
        let mut counts = vec![0u32; 2 * num_vars + 1];
        for &l in &lits {
            counts[l.code() + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let occ_offsets = counts.clone();
        let mut fill = counts;
        let mut occ = vec![0u32; lits.len()];
        for c in 0..m {
            for &l in &lits[offsets[c] as usize..offsets[c + 1] as usize] {
                occ[fill[l.code()] as usize] = c as u32;
                fill[l.code()] += 1;
            }
        }

        let kind = match soft.split_first() {
            Some((&first, rest))
                if rest
                    .iter()
                    .any(|&c| weights[c as usize] != weights[first as usize]) =>
            {
                InstanceKind::Wpms
            }
            _ => InstanceKind::Pms,
        };

        Ok(Formula {
            num_vars,
            lits,
            offsets,
            kinds,
            weights,
            hard,
            soft,
            occ_offsets,
            occ,
            kind,
            total_soft_weight: total,
            empty_soft_weight,
            empty_soft: self.empty_soft,
            has_empty_hard: self.has_empty_hard,
        })
    }
}

fn add_weight(total: u64, w: u64) -> Result<u64, FormulaError> {
    total
        .checked_add(w)
        .filter(|&t| t <= i64::MAX as u64)
        .ok_or(FormulaError::WeightOverflow)
}

impl Formula {
    /// Builds a formula from clauses with the variable count inferred.
    pub fn from_clauses(
        clauses: impl IntoIterator<Item = Clause>,
    ) -> Result<Formula, FormulaError> {
        let mut b = FormulaBuilder::new();
        for c in clauses {
            b.add(c)?;
        }
        b.build()
    }
}

/// Complete truth assignment, indexed by [`Var::index`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all_false(n: usize) -> Self {
        Assignment {
            values: vec![false; n],
        }
    }

    /// Bits of `mask` as values of the first `n` variables (bit `i` is variable `i`).
    pub fn from_bits(mask: u64, n: usize) -> Self {
        Assignment {
            values: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn value(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    #[inline]
    pub fn set(&mut self, v: Var, value: bool) {
        self.values[v.index()] = value;
    }

    #[inline]
    pub fn flip(&mut self, v: Var) {
        let x = &mut self.values[v.index()];
        *x = !*x;
    }

    #[inline]
    pub fn satisfies(&self, l: Lit) -> bool {
        l.holds(self.values[l.var().index()])
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn copy_from(&mut self, other: &Assignment) {
        self.values.clear();
        self.values.extend_from_slice(&other.values);
    }

    /// MaxSAT Evaluation model string: character `i` is the value of variable `i + 1`.
    pub fn to_bitstring(&self) -> String {
        self.values
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(s: &str) -> Option<Self> {
        s.chars()
            .map(|ch| match ch {
                '1' => Some(true),
                '0' => Some(false),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Assignment::new)
    }
}

/// Cost of an assignment: total weight of falsified soft clauses, or
/// `Infinite` when a hard clause is falsified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(u64),
    Infinite,
}

impl Cost {
    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Cost::Finite(c) => Some(c),
            Cost::Infinite => None,
        }
    }

    /// Strictly smaller cost; `Infinite` is never better than `Infinite`.
    pub fn better_than(self, other: Cost) -> bool {
        self < other
    }
}

pub fn better_than(c1: Cost, c2: Cost) -> bool {
    c1.better_than(c2)
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(c) => write!(f, "{c}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite costs serialize as numbers, `Infinite` as `null`.
impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(c) => s.serialize_u64(*c),
            Cost::Infinite => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(clauses: Vec<Clause>) -> Formula {
        Formula::from_clauses(clauses).unwrap()
    }

    #[test]
    fn feasibility() {
        let only_soft = f(vec![Clause::soft_dimacs(&[1], 1)]);
        assert!(only_soft.is_feasible(&Assignment::new(vec![false])));
        assert!(only_soft.is_feasible(&Assignment::new(vec![true])));

        let unit = f(vec![Clause::hard_dimacs(&[1])]);
        assert!(!unit.is_feasible(&Assignment::new(vec![false])));

        let bin = f(vec![Clause::hard_dimacs(&[1, -2])]);
        assert!(bin.is_feasible(&Assignment::new(vec![false, false])));
    }

    #[test]
    fn cost_examples() {
        let pms = f(vec![
            Clause::hard_dimacs(&[1]),
            Clause::soft_dimacs(&[2], 1),
            Clause::soft_dimacs(&[-2], 1),
        ]);
        assert_eq!(pms.kind(), InstanceKind::Pms);
        assert_eq!(
            pms.cost(&Assignment::new(vec![true, true])),
            Cost::Finite(1)
        );

        let wpms = f(vec![
            Clause::soft_dimacs(&[1], 3),
            Clause::soft_dimacs(&[-1], 7),
        ]);
        assert_eq!(wpms.kind(), InstanceKind::Wpms);
        assert_eq!(wpms.cost(&Assignment::new(vec![true])), Cost::Finite(7));

        let hard = f(vec![Clause::hard_dimacs(&[1])]);
        assert_eq!(hard.cost(&Assignment::new(vec![false])), Cost::Infinite);
    }

    #[test]
    fn cost_ordering() {
        assert!(better_than(Cost::Finite(3), Cost::Finite(5)));
        assert!(!better_than(Cost::Infinite, Cost::Finite(0)));
        assert!(!better_than(Cost::Infinite, Cost::Infinite));
        assert!(!better_than(Cost::Finite(5), Cost::Finite(5)));
        assert!(better_than(Cost::Finite(u64::MAX), Cost::Infinite));
    }

    #[test]
    fn normalization() {
        let formula = f(vec![
            Clause::hard_dimacs(&[1, 1, -2, 1]),
            Clause::soft_dimacs(&[3, -3], 4),
            Clause::hard_dimacs(&[2, -2, 1]),
        ]);
        assert_eq!(formula.num_clauses(), 1);
        assert_eq!(
            formula.clause_lits(0),
            &[Lit::from_dimacs(1), Lit::from_dimacs(-2)]
        );
        assert_eq!(formula.num_vars(), 3);
        // The dropped soft tautology never costs anything.
        assert_eq!(
            formula.cost(&Assignment::new(vec![true, false, false])),
            Cost::Finite(0)
        );
    }

    #[test]
    fn empty_clauses() {
        let formula = f(vec![Clause::soft(vec![], 5), Clause::soft_dimacs(&[1], 2)]);
        assert_eq!(formula.cost(&Assignment::new(vec![true])), Cost::Finite(5));
        assert_eq!(formula.cost(&Assignment::new(vec![false])), Cost::Finite(7));

        let formula = f(vec![Clause::hard(vec![]), Clause::soft_dimacs(&[1], 2)]);
        assert!(formula.has_empty_hard());
        assert_eq!(formula.cost(&Assignment::new(vec![true])), Cost::Infinite);
    }

    #[test]
    fn rejects_zero_weight_and_overflow() {
        assert_eq!(
            Formula::from_clauses(vec![Clause::soft_dimacs(&[1], 0)]),
            Err(FormulaError::NonPositiveSoftWeight)
        );
        let big = i64::MAX as u64;
        assert_eq!(
            Formula::from_clauses(vec![
                Clause::soft_dimacs(&[1], big),
                Clause::soft_dimacs(&[2], 1)
            ]),
            Err(FormulaError::WeightOverflow)
        );
        assert!(Formula::from_clauses(vec![Clause::soft_dimacs(&[1], big)]).is_ok());
    }

    #[test]
    fn occurrence_index() {
        let formula = f(vec![
            Clause::hard_dimacs(&[1, -2]),
            Clause::soft_dimacs(&[2, 3], 2),
            Clause::soft_dimacs(&[-2, 1], 5),
        ]);
        assert_eq!(formula.occurrences(Lit::from_dimacs(1)), &[0, 2]);
        assert_eq!(formula.occurrences(Lit::from_dimacs(-2)), &[0, 2]);
        assert_eq!(formula.occurrences(Lit::from_dimacs(2)), &[1]);
        assert!(formula.occurrences(Lit::from_dimacs(-3)).is_empty());
        assert_eq!(formula.hard_clauses(), &[0]);
        assert_eq!(formula.soft_clauses(), &[1, 2]);
        assert!((formula.avg_soft() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn bitstring() {
        let a = Assignment::new(vec![true, false, true]);
        assert_eq!(a.to_bitstring(), "101");
        assert_eq!(Assignment::from_bitstring("101"), Some(a));
        assert_eq!(Assignment::from_bitstring("1x"), None);
    }
}
