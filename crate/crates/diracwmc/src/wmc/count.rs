//! Exact weighted model counting by component decomposition.
//!
//! The domain of the weight function is split into connected components of
//! the variable co-occurrence graph of the formula (conjuncts contribute
//! cliques; unconstrained variables are singletons). Each component is
//! counted by a DPLL-style weighted search: conjuncts with a single
//! unassigned variable are settled first (usually forcing the value), other
//! branch points pick the highest-id variable still touching an
//! undetermined conjunct, and once every conjunct is determined the
//! remaining variables are free and contribute the factor `w_false +
//! w_true` each without being enumerated. To keep conjuncts small and
//! propagation local, implications with literal antecedents are
//! distributed over conjunctions when the formula is flattened. The result
//! is the product of the component counts, taken in ascending order of the
//! smallest variable id of each component.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Float, Zero};

use crate::field::Field;
use crate::wmc::{BoolFormula, Variable, WeightFunction, WmcError};

/// Default cap on the number of variables in a single component.
pub const DEFAULT_COMPONENT_CAP: usize = 30;

/// Weighted count of the always-true formula: the product over the domain
/// of `w_false + w_true`.
pub fn wmc_top<F: Field>(weights: &WeightFunction<F>) -> F {
    let mut acc = F::one();
    for (_, (w0, w1)) in weights.iter() {
        acc = acc * (w0.clone() + w1.clone());
    }
    acc
}

/// Weighted model count with the default component cap.
pub fn wmc_count<F: Field>(
    formula: &BoolFormula,
    weights: &WeightFunction<F>,
) -> Result<F, WmcError> {
    wmc_count_with_cap(formula, weights, Some(DEFAULT_COMPONENT_CAP))
}

/// Weighted model count, summing over assignments of the whole weight
/// domain (including variables absent from the formula). `cap` bounds the
/// size of any single component; `None` disables the check.
pub fn wmc_count_with_cap<F: Field>(
    formula: &BoolFormula,
    weights: &WeightFunction<F>,
    cap: Option<usize>,
) -> Result<F, WmcError> {
    for v in formula.variables() {
        if !weights.contains(v) {
            return Err(WmcError::UnweightedVariable(v));
        }
    }

    let mut conjuncts = Vec::new();
    flatten_conjuncts(formula, &mut Vec::new(), &mut conjuncts);

    // Constant conjuncts short-circuit the whole count.
    let mut var_conjuncts = Vec::new();
    for c in conjuncts {
        match constant_value(&c) {
            Some(true) => {}
            Some(false) => return Ok(F::zero()),
            None => var_conjuncts.push(c),
        }
    }

    let domain: Vec<Variable> = weights.domain().collect();
    let index: HashMap<Variable, usize> =
        domain.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    // Union-find over the domain; each conjunct links its variables.
    let mut parent: Vec<usize> = (0..domain.len()).collect();
    let conjunct_vars: Vec<Vec<usize>> = var_conjuncts
        .iter()
        .map(|c| c.variables().into_iter().map(|v| index[&v]).collect::<Vec<_>>())
        .collect();
    for vars in &conjunct_vars {
        for w in vars.windows(2) {
            union(&mut parent, w[0], w[1]);
        }
    }

    let mut components: BTreeMap<usize, Component> = BTreeMap::new();
    for i in 0..domain.len() {
        let root = find(&mut parent, i);
        components.entry(root).or_default().vars.push(i);
    }
    for (ci, vars) in conjunct_vars.iter().enumerate() {
        if let Some(&first) = vars.first() {
            let root = find(&mut parent, first);
            components.get_mut(&root).unwrap().conjuncts.push(ci);
        } else {
            // A conjunct with no variables would have been constant-folded.
            unreachable!("variable-free conjunct survived folding");
        }
    }

    let mut total = F::one();
    for component in components.values() {
        if let Some(cap) = cap {
            if component.vars.len() > cap {
                return Err(WmcError::ComponentTooLarge { size: component.vars.len(), cap });
            }
        }
        let count = count_component(component, &domain, &var_conjuncts, weights)?;
        total = total * count;
    }
    Ok(total)
}

#[derive(Default)]
struct Component {
    vars: Vec<usize>,
    conjuncts: Vec<usize>,
}

/// Splits a formula into conjuncts. `guards` collects literal antecedents
/// on the path, so `a -> (b & c)` becomes the two conjuncts `a -> b` and
/// `a -> c`: finer conjuncts localize both pruning and the free-variable
/// check during the search.
fn flatten_conjuncts(f: &BoolFormula, guards: &mut Vec<BoolFormula>, out: &mut Vec<BoolFormula>) {
    match f {
        BoolFormula::And(cs) => {
            for c in cs {
                flatten_conjuncts(c, guards, out);
            }
        }
        BoolFormula::True => {}
        BoolFormula::Implies(a, b) if is_literal(a.as_ref()) => {
            guards.push((**a).clone());
            flatten_conjuncts(b, guards, out);
            guards.pop();
        }
        other => {
            let mut c = other.clone();
            for g in guards.iter().rev() {
                c = BoolFormula::implies(g.clone(), c);
            }
            out.push(c);
        }
    }
}

fn is_literal(f: &BoolFormula) -> bool {
    match f {
        BoolFormula::Lit(_) => true,
        BoolFormula::Not(g) => matches!(**g, BoolFormula::Lit(_)),
        _ => false,
    }
}

fn constant_value(f: &BoolFormula) -> Option<bool> {
    match f {
        BoolFormula::True => Some(true),
        BoolFormula::False => Some(false),
        BoolFormula::Lit(_) => None,
        BoolFormula::Not(g) => constant_value(g).map(|b| !b),
        BoolFormula::And(cs) => fold_const(cs, true),
        BoolFormula::Or(cs) => fold_const(cs, false),
        BoolFormula::Implies(a, b) => match (constant_value(a), constant_value(b)) {
            (Some(a), Some(b)) => Some(!a | b),
            (Some(false), _) => Some(true),
            (_, Some(true)) => Some(true),
            _ => None,
        },
        BoolFormula::Iff(a, b) => match (constant_value(a), constant_value(b)) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        },
    }
}

fn fold_const(children: &[BoolFormula], neutral: bool) -> Option<bool> {
    let mut all_known = true;
    for c in children {
        match constant_value(c) {
            Some(b) if b != neutral => return Some(b),
            Some(_) => {}
            None => all_known = false,
        }
    }
    if all_known {
        Some(neutral)
    } else {
        None
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        parent[rb] = ra;
    }
}

/// A count in scaled form, `m * 2^(40 * exp)`, with the mantissa kept in
/// the band `[2^-40, 2^40]`. Compiled sums carry reciprocal normalization
/// weights whose partial products can leave the representable range long
/// before the cancelling factors arrive, so plain floating point would
/// underflow to zero mid-search.
#[derive(Clone)]
struct Scaled<F> {
    m: F,
    exp: i32,
}

struct Search<'a, F: Field> {
    /// Component variables in ascending id order.
    vars: Vec<Variable>,
    /// Per-variable weights, indexed like `vars`.
    weights: Vec<(F, F)>,
    /// Conjuncts constraining this component.
    conjuncts: Vec<&'a BoolFormula>,
    /// Conjunct indices mentioning each variable.
    adjacency: Vec<Vec<usize>>,
    /// Variable indices of each conjunct.
    conj_vars: Vec<Vec<usize>>,
    /// Partial assignment, indexed like `vars`.
    values: Vec<Option<bool>>,
    /// Truth value of each conjunct once the partial assignment settles it.
    status: Vec<Option<bool>>,
    /// Unassigned-variable count per conjunct.
    unassigned_in: Vec<usize>,
    /// Worklist of conjuncts that reached one unassigned variable.
    pending: Vec<usize>,
    /// Number of undetermined conjuncts touching each variable.
    active: Vec<u32>,
    /// Bitset of decision candidates: unassigned variables with at least
    /// one undetermined adjacent conjunct, for O(vars/64) decision scans.
    eligible: Vec<u64>,
    var_index: HashMap<Variable, usize>,
    scale_up: F,
    scale_down: F,
    hi: F::Real,
    lo: F::Real,
}

fn count_component<'a, F: Field>(
    component: &Component,
    domain: &[Variable],
    conjuncts: &'a [BoolFormula],
    weights: &WeightFunction<F>,
) -> Result<F, WmcError> {
    let mut vars: Vec<Variable> = component.vars.iter().map(|&i| domain[i]).collect();
    vars.sort();

    if component.conjuncts.is_empty() {
        // Unconstrained variables contribute the factor w_false + w_true.
        let mut acc = F::one();
        for v in &vars {
            let (w0, w1) = weights.get(*v)?;
            acc = acc * (w0.clone() + w1.clone());
        }
        return Ok(acc);
    }

    let var_index: HashMap<Variable, usize> =
        vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let local: Vec<&BoolFormula> =
        component.conjuncts.iter().map(|&ci| &conjuncts[ci]).collect();
    let mut adjacency = vec![Vec::new(); vars.len()];
    let mut conj_vars = Vec::with_capacity(local.len());
    for (ci, c) in local.iter().enumerate() {
        let cv: Vec<usize> = c.variables().into_iter().map(|v| var_index[&v]).collect();
        for &i in &cv {
            adjacency[i].push(ci);
        }
        conj_vars.push(cv);
    }
    let var_weights: Vec<(F, F)> = vars
        .iter()
        .map(|v| weights.get(*v).cloned())
        .collect::<Result<_, _>>()?;

    let unassigned_in: Vec<usize> = conj_vars.iter().map(Vec::len).collect();
    let pending: Vec<usize> =
        (0..local.len()).filter(|&ci| unassigned_in[ci] == 1).collect();
    let active: Vec<u32> = adjacency.iter().map(|a| a.len() as u32).collect();
    let mut eligible = vec![0u64; vars.len().div_ceil(64)];
    for (i, &a) in active.iter().enumerate() {
        if a > 0 {
            eligible[i / 64] |= 1 << (i % 64);
        }
    }
    let num_vars = vars.len();
    let num_conjs = local.len();
    let mut search = Search {
        values: vec![None; num_vars],
        status: vec![None; num_conjs],
        unassigned_in,
        pending,
        active,
        eligible,
        vars,
        weights: var_weights,
        conjuncts: local,
        adjacency,
        conj_vars,
        var_index,
        scale_up: F::from_f64(2f64.powi(40)),
        scale_down: F::from_f64(2f64.powi(-40)),
        hi: F::from_f64(2f64.powi(40)).real(),
        lo: F::from_f64(2f64.powi(-40)).real(),
    };
    let result = search.count();
    Ok(search.s_value(result))
}

impl<'a, F: Field> Search<'a, F> {
    /// Rescales a mantissa back into the band `[2^-40, 2^40]`, adjusting
    /// the power-of-`2^40` exponent.
    fn renorm(&self, mut m: F, mut exp: i32) -> (F, i32) {
        let mut mag = m.modulus();
        if mag == F::Real::zero() || !mag.is_finite() {
            return (m, exp);
        }
        while mag > self.hi {
            m = m * self.scale_down.clone();
            exp += 1;
            mag = m.modulus();
        }
        while mag < self.lo {
            m = m * self.scale_up.clone();
            exp -= 1;
            mag = m.modulus();
        }
        (m, exp)
    }

    fn s_one(&self) -> Scaled<F> {
        Scaled { m: F::one(), exp: 0 }
    }

    fn s_mul_f(&self, a: Scaled<F>, b: F) -> Scaled<F> {
        let (m, exp) = self.renorm(a.m * b, a.exp);
        Scaled { m, exp }
    }

    fn s_add(&self, a: Scaled<F>, b: Scaled<F>) -> Scaled<F> {
        if a.m.is_zero() {
            return b;
        }
        if b.m.is_zero() {
            return a;
        }
        let (big, mut small) = if a.exp >= b.exp { (a, b) } else { (b, a) };
        if big.exp - small.exp > 30 {
            // The smaller term is beyond 2^1200 below the larger one.
            return big;
        }
        while small.exp < big.exp {
            small.m = small.m * self.scale_down.clone();
            small.exp += 1;
        }
        let (m, exp) = self.renorm(big.m + small.m, big.exp);
        Scaled { m, exp }
    }

    fn s_value(&self, mut s: Scaled<F>) -> F {
        while s.exp > 0 {
            s.m = s.m * self.scale_up.clone();
            s.exp -= 1;
        }
        while s.exp < 0 {
            s.m = s.m * self.scale_down.clone();
            s.exp += 1;
        }
        s.m
    }

    /// Weighted count of the residual problem under the current partial
    /// assignment: the sum over assignments of the unassigned variables
    /// satisfying the undetermined conjuncts, weighted by variable weights.
    fn count(&mut self) -> Scaled<F> {
        // Retire worklist entries that are no longer one-unassigned and
        // undetermined; they are restored on exit because backtracking at
        // an ancestor can make them relevant again.
        let mut stale = Vec::new();
        let next = loop {
            match self.pending.last().copied() {
                Some(ci) if self.status[ci].is_some() || self.unassigned_in[ci] != 1 => {
                    self.pending.pop();
                    stale.push(ci);
                }
                Some(ci) => {
                    break self.conj_vars[ci]
                        .iter()
                        .copied()
                        .find(|&i| self.values[i].is_none());
                }
                None => break self.decision_var(),
            }
        };

        let result = match next {
            None => {
                // Every conjunct is determined (and none false): the
                // remaining variables are free and factor out.
                let mut acc = self.s_one();
                for i in 0..self.vars.len() {
                    if self.values[i].is_none() {
                        let (w0, w1) = &self.weights[i];
                        let f = w0.clone() + w1.clone();
                        acc = self.s_mul_f(acc, f);
                    }
                }
                acc
            }
            Some(v) => {
                let mut acc = Scaled { m: F::zero(), exp: 0 };
                for value in [false, true] {
                    let mark = self.pending.len();
                    let (ok, settled) = self.assign(v, value);
                    if ok {
                        let r = self.count();
                        let (w0, w1) = &self.weights[v];
                        let wv = if value { w1.clone() } else { w0.clone() };
                        let r = self.s_mul_f(r, wv);
                        acc = self.s_add(acc, r);
                    }
                    self.pending.truncate(mark);
                    self.unassign(v, &settled);
                }
                acc
            }
        };
        self.pending.extend(stale.into_iter().rev());
        result
    }

    /// Branch variable when no conjunct is down to one unassigned
    /// variable: the highest-id unassigned variable still touching an
    /// undetermined conjunct. High ids are allocated late during
    /// compilation, so this settles selector and interface variables
    /// before the subformulas they guard. `None` means every conjunct is
    /// already determined.
    fn decision_var(&self) -> Option<usize> {
        for (word_idx, &word) in self.eligible.iter().enumerate().rev() {
            if word != 0 {
                return Some(word_idx * 64 + 63 - word.leading_zeros() as usize);
            }
        }
        None
    }

    fn set_eligible(&mut self, i: usize) {
        self.eligible[i / 64] |= 1 << (i % 64);
    }

    fn clear_eligible(&mut self, i: usize) {
        self.eligible[i / 64] &= !(1 << (i % 64));
    }

    /// Assigns a value and updates the adjacent conjuncts. Returns whether
    /// the assignment is still consistent, plus the conjuncts whose status
    /// became determined (for the undo).
    fn assign(&mut self, v: usize, value: bool) -> (bool, Vec<usize>) {
        self.values[v] = Some(value);
        self.clear_eligible(v);
        let mut settled = Vec::new();
        let mut ok = true;
        for k in 0..self.adjacency[v].len() {
            let ci = self.adjacency[v][k];
            self.unassigned_in[ci] -= 1;
            if self.status[ci].is_none() {
                match self.eval3(self.conjuncts[ci]) {
                    Some(b) => {
                        self.status[ci] = Some(b);
                        settled.push(ci);
                        ok &= b;
                    }
                    None => {
                        if self.unassigned_in[ci] == 1 {
                            self.pending.push(ci);
                        }
                    }
                }
            }
        }
        for &ci in &settled {
            for k in 0..self.conj_vars[ci].len() {
                let w = self.conj_vars[ci][k];
                self.active[w] -= 1;
                if self.active[w] == 0 {
                    self.clear_eligible(w);
                }
            }
        }
        (ok, settled)
    }

    fn unassign(&mut self, v: usize, settled: &[usize]) {
        for &ci in settled {
            self.status[ci] = None;
            for k in 0..self.conj_vars[ci].len() {
                let w = self.conj_vars[ci][k];
                self.active[w] += 1;
                if self.values[w].is_none() {
                    self.set_eligible(w);
                }
            }
        }
        for k in 0..self.adjacency[v].len() {
            let ci = self.adjacency[v][k];
            self.unassigned_in[ci] += 1;
        }
        self.values[v] = None;
        if self.active[v] > 0 {
            self.set_eligible(v);
        }
    }

    /// Three-valued evaluation: `Some(b)` when the value is determined by
    /// the partial assignment, `None` otherwise.
    fn eval3(&self, f: &BoolFormula) -> Option<bool> {
        match f {
            BoolFormula::True => Some(true),
            BoolFormula::False => Some(false),
            BoolFormula::Lit(l) => self
                .var_index
                .get(&l.var)
                .and_then(|&i| self.values[i])
                .map(|b| b == l.positive),
            BoolFormula::Not(g) => self.eval3(g).map(|b| !b),
            BoolFormula::And(cs) => {
                let mut unknown = false;
                for c in cs {
                    match self.eval3(c) {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => unknown = true,
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            BoolFormula::Or(cs) => {
                let mut unknown = false;
                for c in cs {
                    match self.eval3(c) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => unknown = true,
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            BoolFormula::Implies(a, b) => match (self.eval3(a), self.eval3(b)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
            BoolFormula::Iff(a, b) => match (self.eval3(a), self.eval3(b)) {
                (Some(a), Some(b)) => Some(a == b),
                _ => None,
            },
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::wmc::VarSource;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn worked_implication_instance() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let y = src.fresh();
        let f = BoolFormula::implies(BoolFormula::var(x), BoolFormula::var(y));
        let mut w = WeightFunction::new();
        w.insert(x, c(1.0), c(1.0));
        w.insert(y, c(0.5), c(0.5));
        assert_eq!(wmc_count(&f, &w).unwrap(), c(1.5));
    }

    #[test]
    fn top_sums_single_variable_weights() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let mut w = WeightFunction::new();
        w.insert(x, c(3.0), c(2.0));
        assert_eq!(wmc_count(&BoolFormula::True, &w).unwrap(), c(5.0));
        assert_eq!(wmc_top(&w), c(5.0));
    }

    #[test]
    fn iff_instance_by_enumeration() {
        // Enumerating all four assignments: (0,0) -> 3, (1,1) -> 2, sum 5.
        let mut src = VarSource::new();
        let x = src.fresh();
        let y = src.fresh();
        let f = BoolFormula::iff(BoolFormula::var(x), BoolFormula::var(y));
        let mut w = WeightFunction::new();
        w.insert(x, c(3.0), c(2.0));
        w.insert(y, c(1.0), c(1.0));
        assert_eq!(wmc_count(&f, &w).unwrap(), c(5.0));
    }

    #[test]
    fn top_with_empty_domain_is_one() {
        let w: WeightFunction<Complex64> = WeightFunction::new();
        assert_eq!(wmc_top(&w), c(1.0));
    }

    #[test]
    fn top_with_hyperbolic_weights() {
        let theta = 0.7f64;
        let mut src = VarSource::new();
        let x = src.fresh();
        let mut w = WeightFunction::new();
        w.insert(x, c((-theta).exp()), c(theta.exp()));
        let expect = 2.0 * theta.cosh();
        assert!((wmc_top(&w).re - expect).abs() < 1e-15);
    }

    #[test]
    fn cancelling_weights_give_zero_top() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let mut w = WeightFunction::new();
        w.insert(x, c(-1.0), c(1.0));
        assert_eq!(wmc_top(&w), c(0.0));
    }

    #[test]
    fn unweighted_formula_variable_is_an_error() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let f = BoolFormula::var(x);
        let w: WeightFunction<Complex64> = WeightFunction::new();
        assert!(matches!(
            wmc_count(&f, &w),
            Err(WmcError::UnweightedVariable(v)) if v == x
        ));
    }

    #[test]
    fn component_cap_is_enforced() {
        let mut src = VarSource::new();
        let vars = src.fresh_many(4);
        let f = BoolFormula::or(vars.iter().map(|&v| BoolFormula::var(v)).collect());
        let mut w = WeightFunction::new();
        for &v in &vars {
            w.insert(v, c(1.0), c(1.0));
        }
        let err = wmc_count_with_cap(&f, &w, Some(3)).unwrap_err();
        assert!(matches!(err, WmcError::ComponentTooLarge { size: 4, cap: 3 }));
        assert_eq!(wmc_count_with_cap(&f, &w, Some(4)).unwrap(), c(15.0));
    }

    #[test]
    fn unconstrained_variables_multiply_in() {
        let mut src = VarSource::new();
        let x = src.fresh();
        let free = src.fresh();
        let f = BoolFormula::var(x);
        let mut w = WeightFunction::new();
        w.insert(x, c(0.0), c(2.0));
        w.insert(free, c(3.0), c(4.0));
        assert_eq!(wmc_count(&f, &w).unwrap(), c(14.0));
    }

    #[test]
    fn product_structure_beats_the_cap() {
        // 40 independent two-variable blocks: far more than 30 variables in
        // total, but every component is tiny.
        let mut src = VarSource::new();
        let mut conj = Vec::new();
        let mut w = WeightFunction::new();
        for _ in 0..40 {
            let a = src.fresh();
            let b = src.fresh();
            conj.push(BoolFormula::iff(BoolFormula::var(a), BoolFormula::var(b)));
            w.insert(a, c(1.0), c(2.0));
            w.insert(b, c(1.0), c(1.0));
        }
        let f = BoolFormula::and(conj);
        let got = wmc_count(&f, &w).unwrap();
        let expect = 3f64.powi(40);
        assert!((got.re - expect).abs() / expect < 1e-12);
    }
}
