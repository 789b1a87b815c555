//! Clausification preserving weighted counts.
//!
//! Structured formulas are converted to CNF with definitional auxiliary
//! variables. Every auxiliary variable is constrained by a full biconditional
//! to the subformula it names, so each model of the original formula extends
//! to exactly one model of the CNF; giving the auxiliaries weight `(1, 1)`
//! preserves the weighted count exactly.

use crate::field::Field;
use crate::wmc::{BoolFormula, Literal, VarSource, WeightFunction};

/// A formula in conjunctive normal form.
///
/// No clauses means the formula is true; an empty clause makes it false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    /// Structured view of the clause set, for evaluation and counting.
    pub fn to_formula(&self) -> BoolFormula {
        BoolFormula::and(
            self.clauses
                .iter()
                .map(|c| BoolFormula::or(c.iter().map(|&l| BoolFormula::lit(l)).collect()))
                .collect(),
        )
    }
}

/// Converts a formula to CNF. Returns the clause set together with the
/// weight function of the introduced auxiliary variables (all `(1, 1)`).
///
/// Original variable ids are preserved; auxiliaries come from `fresh`.
pub fn to_cnf<F: Field>(
    formula: &BoolFormula,
    fresh: &mut VarSource,
) -> (CnfFormula, WeightFunction<F>) {
    let mut enc = Encoder { clauses: Vec::new(), aux: WeightFunction::new(), fresh };
    let nnf = nnf(formula, true);
    enc.assert(&nnf);

    let mut num_vars = 0;
    for clause in &enc.clauses {
        for lit in clause {
            num_vars = num_vars.max(lit.var.id());
        }
    }
    (CnfFormula { num_vars, clauses: enc.clauses }, enc.aux)
}

struct Encoder<'a, F: Field> {
    clauses: Vec<Vec<Literal>>,
    aux: WeightFunction<F>,
    fresh: &'a mut VarSource,
}

/// Negation normal form with constant folding. `Not` survives only directly
/// above literals; implications become disjunctions.
fn nnf(f: &BoolFormula, polarity: bool) -> BoolFormula {
    match f {
        BoolFormula::True => {
            if polarity {
                BoolFormula::True
            } else {
                BoolFormula::False
            }
        }
        BoolFormula::False => {
            if polarity {
                BoolFormula::False
            } else {
                BoolFormula::True
            }
        }
        BoolFormula::Lit(l) => BoolFormula::lit(if polarity { *l } else { l.negated() }),
        BoolFormula::Not(g) => nnf(g, !polarity),
        BoolFormula::And(cs) => {
            let children = cs.iter().map(|c| nnf(c, polarity)).collect();
            if polarity {
                BoolFormula::and(children)
            } else {
                BoolFormula::or(children)
            }
        }
        BoolFormula::Or(cs) => {
            let children = cs.iter().map(|c| nnf(c, polarity)).collect();
            if polarity {
                BoolFormula::or(children)
            } else {
                BoolFormula::and(children)
            }
        }
        BoolFormula::Implies(a, b) => {
            if polarity {
                BoolFormula::or(vec![nnf(a, false), nnf(b, true)])
            } else {
                BoolFormula::and(vec![nnf(a, true), nnf(b, false)])
            }
        }
        // !(a <-> b) is a <-> !b; constants reduce to the other side.
        BoolFormula::Iff(a, b) => {
            let a = nnf(a, true);
            let b = nnf(b, polarity);
            match (a, b) {
                (BoolFormula::True, g) | (g, BoolFormula::True) => g,
                (BoolFormula::False, g) | (g, BoolFormula::False) => nnf(&g, false),
                (a, b) => BoolFormula::iff(a, b),
            }
        }
    }
}

impl<'a, F: Field> Encoder<'a, F> {
    /// Asserts an NNF formula at the top level.
    fn assert(&mut self, f: &BoolFormula) {
        match f {
            BoolFormula::True => {}
            BoolFormula::False => self.clauses.push(Vec::new()),
            BoolFormula::Lit(l) => self.clauses.push(vec![*l]),
            BoolFormula::And(cs) => {
                for c in cs {
                    self.assert(c);
                }
            }
            BoolFormula::Or(cs) => {
                let clause = cs.iter().map(|c| self.literal(c)).collect();
                self.clauses.push(clause);
            }
            BoolFormula::Iff(a, b) => {
                let la = self.literal(a);
                let lb = self.literal(b);
                self.clauses.push(vec![la.negated(), lb]);
                self.clauses.push(vec![la, lb.negated()]);
            }
            BoolFormula::Not(_) | BoolFormula::Implies(_, _) => {
                unreachable!("non-literal negation or implication in NNF")
            }
        }
    }

    /// Returns a literal equivalent to the subformula, defining an auxiliary
    /// variable when the subformula is not already a literal.
    fn literal(&mut self, f: &BoolFormula) -> Literal {
        match f {
            BoolFormula::Lit(l) => *l,
            BoolFormula::And(cs) => {
                let lits: Vec<Literal> = cs.iter().map(|c| self.literal(c)).collect();
                let t = Literal::pos(self.define());
                // t <-> (l1 & ... & ln)
                for &l in &lits {
                    self.clauses.push(vec![t.negated(), l]);
                }
                let mut long = vec![t];
                long.extend(lits.iter().map(|l| l.negated()));
                self.clauses.push(long);
                t
            }
            BoolFormula::Or(cs) => {
                let lits: Vec<Literal> = cs.iter().map(|c| self.literal(c)).collect();
                let t = Literal::pos(self.define());
                // t <-> (l1 | ... | ln)
                for &l in &lits {
                    self.clauses.push(vec![t, l.negated()]);
                }
                let mut long = vec![t.negated()];
                long.extend(lits.iter().copied());
                self.clauses.push(long);
                t
            }
            BoolFormula::Iff(a, b) => {
                let la = self.literal(a);
                let lb = self.literal(b);
                let t = Literal::pos(self.define());
                // t <-> (la <-> lb)
                self.clauses.push(vec![t.negated(), la.negated(), lb]);
                self.clauses.push(vec![t.negated(), la, lb.negated()]);
                self.clauses.push(vec![t, la, lb]);
                self.clauses.push(vec![t, la.negated(), lb.negated()]);
                t
            }
            BoolFormula::True | BoolFormula::False => {
                unreachable!("constants are folded before encoding")
            }
            BoolFormula::Not(_) | BoolFormula::Implies(_, _) => {
                unreachable!("non-literal negation or implication in NNF")
            }
        }
    }

    fn define(&mut self) -> crate::wmc::Variable {
        let t = self.fresh.fresh();
        self.aux.insert_unit(t);
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wmc::{wmc_count_with_cap, Variable};
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn single_literal_is_a_unit_clause() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let (cnf, aux) = to_cnf::<Complex64>(&BoolFormula::var(x), &mut src);
        assert_eq!(cnf.clauses, vec![vec![Literal::pos(x)]]);
        assert!(aux.is_empty());
    }

    #[test]
    fn literal_iff_needs_no_auxiliaries() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let y = src.fresh();
        let f = BoolFormula::iff(BoolFormula::var(x), BoolFormula::var(y));
        let (cnf, aux) = to_cnf::<Complex64>(&f, &mut src);
        assert_eq!(cnf.clauses.len(), 2);
        assert!(aux.is_empty());
    }

    #[test]
    fn implication_becomes_one_clause() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let y = src.fresh();
        let f = BoolFormula::implies(BoolFormula::var(x), BoolFormula::var(y));
        let (cnf, aux) = to_cnf::<Complex64>(&f, &mut src);
        assert_eq!(cnf.clauses, vec![vec![Literal::neg(x), Literal::pos(y)]]);
        assert!(aux.is_empty());
    }

    #[test]
    fn constants_fold_away() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let f = BoolFormula::iff(BoolFormula::var(x), BoolFormula::True);
        let (cnf, _) = to_cnf::<Complex64>(&f, &mut src);
        assert_eq!(cnf.clauses, vec![vec![Literal::pos(x)]]);
        let (cnf, _) = to_cnf::<Complex64>(&BoolFormula::False, &mut src);
        assert_eq!(cnf.clauses, vec![Vec::<Literal>::new()]);
    }

    #[test]
    fn clausification_preserves_the_count() {
        // (a & b) | (c & d), weights chosen so every assignment contributes
        // a distinct product. Enumerated directly: 7 satisfying assignments.
        let mut src = VarSource::new();
        let vars: Vec<Variable> = src.fresh_many(4);
        let f = BoolFormula::or(vec![
            BoolFormula::and(vec![BoolFormula::var(vars[0]), BoolFormula::var(vars[1])]),
            BoolFormula::and(vec![BoolFormula::var(vars[2]), BoolFormula::var(vars[3])]),
        ]);
        let mut w = WeightFunction::new();
        for (i, &v) in vars.iter().enumerate() {
            w.insert(v, c(1.0), c(2.0 + i as f64));
        }
        let direct = wmc_count_with_cap(&f, &w, None).unwrap();
        let (cnf, aux) = to_cnf(&f, &mut src);
        let via_cnf = wmc_count_with_cap(&cnf.to_formula(), &w.union(aux), None).unwrap();
        assert_eq!(direct, via_cnf);
    }

    #[test]
    fn negated_iff_preserves_the_count() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let y = src.fresh();
        let z = src.fresh();
        let f = BoolFormula::not(BoolFormula::iff(
            BoolFormula::var(x),
            BoolFormula::or(vec![BoolFormula::var(y), BoolFormula::nvar(z)]),
        ));
        let mut w = WeightFunction::new();
        w.insert(x, c(1.0), c(2.0));
        w.insert(y, c(3.0), c(5.0));
        w.insert(z, c(7.0), c(11.0));
        let direct = wmc_count_with_cap(&f, &w, None).unwrap();
        let (cnf, aux) = to_cnf(&f, &mut src);
        let via_cnf = wmc_count_with_cap(&cnf.to_formula(), &w.union(aux), None).unwrap();
        assert_eq!(direct, via_cnf);
    }
}
