//! Weight functions mapping variables to per-polarity weights.

use std::collections::{BTreeMap, BTreeSet};

use crate::field::Field;
use crate::wmc::{BoolFormula, Variable, VarSource, WmcError};

/// Maps each variable of an instance to its weights `(w_false, w_true)`.
///
/// Lookups outside the domain are errors; the domain is exactly the set of
/// mapped variables and every domain variable participates in the count.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction<F: Field> {
    entries: BTreeMap<Variable, (F, F)>,
}

impl<F: Field> WeightFunction<F> {
    pub fn new() -> Self {
        WeightFunction { entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, var: Variable, w_false: F, w_true: F) {
        self.entries.insert(var, (w_false, w_true));
    }

    /// Inserts weights `(1, 1)`.
    pub fn insert_unit(&mut self, var: Variable) {
        self.entries.insert(var, (F::one(), F::one()));
    }

    pub fn get(&self, var: Variable) -> Result<&(F, F), WmcError> {
        self.entries.get(&var).ok_or(WmcError::UnweightedVariable(var))
    }

    pub fn weight(&self, var: Variable, value: bool) -> Result<F, WmcError> {
        let (w0, w1) = self.get(var)?;
        Ok(if value { w1.clone() } else { w0.clone() })
    }

    pub fn contains(&self, var: Variable) -> bool {
        self.entries.contains_key(&var)
    }

    pub fn domain(&self) -> impl Iterator<Item = Variable> + '_ {
        self.entries.keys().copied()
    }

    pub fn domain_set(&self) -> BTreeSet<Variable> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Variable, &(F, F))> {
        self.entries.iter().map(|(v, w)| (*v, w))
    }

    /// Union of two weight functions with disjoint domains.
    ///
    /// Panics if the domains overlap; the compiler guarantees disjointness
    /// by renaming first.
    pub fn union(mut self, other: WeightFunction<F>) -> WeightFunction<F> {
        for (v, w) in other.entries {
            let prev = self.entries.insert(v, w);
            assert!(prev.is_none(), "weight function union with overlapping domain: {v}");
        }
        self
    }

    /// Pointwise product on the domain overlap, either side elsewhere.
    pub fn merge_product(mut self, other: WeightFunction<F>) -> WeightFunction<F> {
        for (v, (o0, o1)) in other.entries {
            match self.entries.get_mut(&v) {
                Some((s0, s1)) => {
                    *s0 = s0.clone() * o0;
                    *s1 = s1.clone() * o1;
                }
                None => {
                    self.entries.insert(v, (o0, o1));
                }
            }
        }
        self
    }

    /// Applies a field endomorphism to every weight.
    pub fn map_weights(&self, f: impl Fn(&F) -> F) -> WeightFunction<F> {
        WeightFunction {
            entries: self
                .entries
                .iter()
                .map(|(v, (w0, w1))| (*v, (f(w0), f(w1))))
                .collect(),
        }
    }

    /// Replaces variables according to `map`, keeping weights.
    pub fn substitute(&self, map: &BTreeMap<Variable, Variable>) -> WeightFunction<F> {
        WeightFunction {
            entries: self
                .entries
                .iter()
                .map(|(v, w)| (map.get(v).copied().unwrap_or(*v), w.clone()))
                .collect(),
        }
    }
}

impl<F: Field> Default for WeightFunction<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// Renames every domain variable outside `protected` to a fresh variable,
/// consistently in the formula and the weight function. The weighted count
/// is preserved exactly.
pub fn rename_fresh<F: Field>(
    formula: &BoolFormula,
    weights: &WeightFunction<F>,
    protected: &BTreeSet<Variable>,
    fresh: &mut VarSource,
) -> (BoolFormula, WeightFunction<F>, BTreeMap<Variable, Variable>) {
    let mut map = BTreeMap::new();
    for v in weights.domain() {
        if !protected.contains(&v) {
            map.insert(v, fresh.fresh());
        }
    }
    (formula.substitute(&map), weights.substitute(&map), map)
}
