//! Boolean formulas, weight functions, and exact weighted counting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

mod cnf;
mod count;
mod wcnf;
mod weights;

pub use cnf::{to_cnf, CnfFormula};
pub use count::{wmc_count, wmc_count_with_cap, wmc_top, DEFAULT_COMPONENT_CAP};
pub use wcnf::{export_wcnf, parse_wcnf, WcnfDialect, WcnfInstance};
pub use weights::{rename_fresh, WeightFunction};

/// A Boolean variable, identified by a positive integer id.
///
/// Ids are handed out by a [`VarSource`] and are never reused within a
/// compilation session.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(u32);

impl Variable {
    pub fn new(id: u32) -> Self {
        assert!(id > 0, "variable ids are positive");
        Variable(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Source of fresh variable ids, strictly increasing.
#[derive(Debug, Clone)]
pub struct VarSource {
    next: u32,
}

impl VarSource {
    pub fn new() -> Self {
        VarSource { next: 1 }
    }

    /// Starts allocation after the given id (used when extending a parsed
    /// instance).
    pub fn starting_after(max_id: u32) -> Self {
        VarSource { next: max_id + 1 }
    }

    pub fn fresh(&mut self) -> Variable {
        let v = Variable::new(self.next);
        self.next += 1;
        v
    }

    pub fn fresh_many(&mut self, n: usize) -> Vec<Variable> {
        (0..n).map(|_| self.fresh()).collect()
    }

    /// Highest id allocated so far (0 if none).
    pub fn high_water(&self) -> u32 {
        self.next - 1
    }
}

impl Default for VarSource {
    fn default() -> Self {
        Self::new()
    }
}

/// A literal: a variable or its negation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: Variable,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: Variable) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: Variable) -> Self {
        Literal { var, positive: false }
    }

    pub fn negated(self) -> Self {
        Literal { var: self.var, positive: !self.positive }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{:?}", self.var)
        } else {
            write!(f, "!{:?}", self.var)
        }
    }
}

/// A structured Boolean formula over integer variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoolFormula {
    True,
    False,
    Lit(Literal),
    Not(Box<BoolFormula>),
    And(Vec<BoolFormula>),
    Or(Vec<BoolFormula>),
    Implies(Box<BoolFormula>, Box<BoolFormula>),
    Iff(Box<BoolFormula>, Box<BoolFormula>),
}

impl BoolFormula {
    pub fn var(v: Variable) -> Self {
        BoolFormula::Lit(Literal::pos(v))
    }

    pub fn nvar(v: Variable) -> Self {
        BoolFormula::Lit(Literal::neg(v))
    }

    pub fn lit(l: Literal) -> Self {
        BoolFormula::Lit(l)
    }

    pub fn not(f: BoolFormula) -> Self {
        BoolFormula::Not(Box::new(f))
    }

    /// Conjunction; flattens nested conjunctions, drops `true` children,
    /// and collapses to `false` on a `false` child.
    pub fn and(children: Vec<BoolFormula>) -> Self {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match c {
                BoolFormula::True => {}
                BoolFormula::False => return BoolFormula::False,
                BoolFormula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => BoolFormula::True,
            1 => flat.pop().unwrap(),
            _ => BoolFormula::And(flat),
        }
    }

    /// Disjunction; flattens nested disjunctions, drops `false` children,
    /// and collapses to `true` on a `true` child.
    pub fn or(children: Vec<BoolFormula>) -> Self {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match c {
                BoolFormula::False => {}
                BoolFormula::True => return BoolFormula::True,
                BoolFormula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => BoolFormula::False,
            1 => flat.pop().unwrap(),
            _ => BoolFormula::Or(flat),
        }
    }

    pub fn implies(a: BoolFormula, b: BoolFormula) -> Self {
        BoolFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: BoolFormula, b: BoolFormula) -> Self {
        BoolFormula::Iff(Box::new(a), Box::new(b))
    }

    /// Set of variables occurring in the formula.
    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    pub(crate) fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        match self {
            BoolFormula::True | BoolFormula::False => {}
            BoolFormula::Lit(l) => {
                out.insert(l.var);
            }
            BoolFormula::Not(f) => f.collect_variables(out),
            BoolFormula::And(cs) | BoolFormula::Or(cs) => {
                for c in cs {
                    c.collect_variables(out);
                }
            }
            BoolFormula::Implies(a, b) | BoolFormula::Iff(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Replaces variables according to `map`; variables not in the map are
    /// left untouched.
    pub fn substitute(&self, map: &BTreeMap<Variable, Variable>) -> BoolFormula {
        match self {
            BoolFormula::True => BoolFormula::True,
            BoolFormula::False => BoolFormula::False,
            BoolFormula::Lit(l) => {
                let var = map.get(&l.var).copied().unwrap_or(l.var);
                BoolFormula::Lit(Literal { var, positive: l.positive })
            }
            BoolFormula::Not(f) => BoolFormula::Not(Box::new(f.substitute(map))),
            BoolFormula::And(cs) => {
                BoolFormula::And(cs.iter().map(|c| c.substitute(map)).collect())
            }
            BoolFormula::Or(cs) => BoolFormula::Or(cs.iter().map(|c| c.substitute(map)).collect()),
            BoolFormula::Implies(a, b) => {
                BoolFormula::Implies(Box::new(a.substitute(map)), Box::new(b.substitute(map)))
            }
            BoolFormula::Iff(a, b) => {
                BoolFormula::Iff(Box::new(a.substitute(map)), Box::new(b.substitute(map)))
            }
        }
    }
}

/// A total assignment over a declared variable domain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<Variable, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment { values: BTreeMap::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Variable, bool)>) -> Self {
        Assignment { values: pairs.into_iter().collect() }
    }

    pub fn set(&mut self, var: Variable, value: bool) {
        self.values.insert(var, value);
    }

    pub fn get(&self, var: Variable) -> Option<bool> {
        self.values.get(&var).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = Variable> + '_ {
        self.values.keys().copied()
    }
}

/// Errors from the counting kernel and instance manipulation.
#[derive(Debug, Error)]
pub enum WmcError {
    #[error("variable {0} is not bound")]
    UnboundVariable(Variable),
    #[error("variable {0} is not in the weight function domain")]
    UnweightedVariable(Variable),
    #[error("component too large: {size} variables exceeds cap {cap}")]
    ComponentTooLarge { size: usize, cap: usize },
    #[error("complex weights not exportable: variable {0} has a nonzero imaginary part")]
    ComplexWeight(Variable),
    #[error("malformed weighted CNF at line {line}: {message}")]
    ParseError { line: usize, message: String },
}

/// Evaluates a formula under a total assignment of its variables.
pub fn evaluate(formula: &BoolFormula, tau: &Assignment) -> Result<bool, WmcError> {
    Ok(match formula {
        BoolFormula::True => true,
        BoolFormula::False => false,
        BoolFormula::Lit(l) => {
            let v = tau.get(l.var).ok_or(WmcError::UnboundVariable(l.var))?;
            v == l.positive
        }
        BoolFormula::Not(f) => !evaluate(f, tau)?,
        BoolFormula::And(cs) => {
            let mut acc = true;
            for c in cs {
                // No short-circuit: every variable must be bound.
                acc &= evaluate(c, tau)?;
            }
            acc
        }
        BoolFormula::Or(cs) => {
            let mut acc = false;
            for c in cs {
                acc |= evaluate(c, tau)?;
            }
            acc
        }
        BoolFormula::Implies(a, b) => !evaluate(a, tau)? | evaluate(b, tau)?,
        BoolFormula::Iff(a, b) => evaluate(a, tau)? == evaluate(b, tau)?,
    })
}
