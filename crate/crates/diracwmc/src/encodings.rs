//! Boolean encodings of q-state variables and strings of them.
//!
//! A q-state encoding realizes a logical variable with values `0..q` over a
//! set of Boolean variables, together with formulas for "equals n", "has a
//! valid value", and "equals another encoding". Strings of encodings
//! represent numbers in `0..q^k` by base-q expansion, least significant
//! digit first.

use thiserror::Error;

use crate::wmc::{Assignment, BoolFormula, Variable, VarSource, WmcError};

/// How a q-state variable is realized over Boolean variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingKind {
    /// `ceil(log2 q)` variables holding the binary expansion.
    Logarithmic,
    /// `q - 1` variables; variable `i` is true iff the value exceeds `i`.
    Order,
    /// `q` variables, exactly one true.
    OneHot,
}

impl EncodingKind {
    /// Number of Boolean variables backing one digit of base `q`.
    pub fn var_count(self, q: u32) -> usize {
        match self {
            EncodingKind::Logarithmic => ceil_log2(q),
            EncodingKind::Order => (q - 1) as usize,
            EncodingKind::OneHot => q as usize,
        }
    }
}

fn ceil_log2(q: u32) -> usize {
    (32 - (q - 1).leading_zeros()) as usize
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("value {n} out of range for base {q} and length {len}")]
    ValueOutOfRange { n: u128, q: u32, len: usize },
    #[error("encoding base must be at least 2, got {0}")]
    BadBase(u32),
    #[error("expected {expected} variables for base {q}, got {got}")]
    WrongVariableCount { q: u32, expected: usize, got: usize },
    #[error("encoding variables must be distinct")]
    DuplicateVariable,
    #[error("mismatched encodings: {0}")]
    Mismatch(&'static str),
}

/// One q-state digit over Boolean variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QStateEncoding {
    q: u32,
    kind: EncodingKind,
    vars: Vec<Variable>,
}

impl QStateEncoding {
    /// Allocates fresh variables for one digit of base `q`.
    pub fn new(q: u32, kind: EncodingKind, fresh: &mut VarSource) -> Self {
        assert!(q >= 2, "encoding base must be at least 2");
        QStateEncoding { q, kind, vars: fresh.fresh_many(kind.var_count(q)) }
    }

    /// Wraps existing variables; they must be distinct and match the kind's
    /// variable count.
    pub fn from_vars(
        q: u32,
        kind: EncodingKind,
        vars: Vec<Variable>,
    ) -> Result<Self, EncodingError> {
        if q < 2 {
            return Err(EncodingError::BadBase(q));
        }
        let expected = kind.var_count(q);
        if vars.len() != expected {
            return Err(EncodingError::WrongVariableCount { q, expected, got: vars.len() });
        }
        let mut sorted: Vec<Variable> = vars.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != vars.len() {
            return Err(EncodingError::DuplicateVariable);
        }
        Ok(QStateEncoding { q, kind, vars })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    /// The cube asserting the digit equals `n`.
    pub fn equals(&self, n: u128) -> Result<BoolFormula, EncodingError> {
        if n >= self.q as u128 {
            return Err(EncodingError::ValueOutOfRange { n, q: self.q, len: 1 });
        }
        let lits = match self.kind {
            EncodingKind::Logarithmic => self
                .vars
                .iter()
                .enumerate()
                .map(|(i, &v)| polarity(v, (n >> i) & 1 == 1))
                .collect(),
            EncodingKind::Order => self
                .vars
                .iter()
                .enumerate()
                .map(|(i, &v)| polarity(v, (i as u128) < n))
                .collect(),
            EncodingKind::OneHot => self
                .vars
                .iter()
                .enumerate()
                .map(|(i, &v)| polarity(v, i as u128 == n))
                .collect(),
        };
        Ok(BoolFormula::and(lits))
    }

    /// Formula satisfied exactly by the patterns encoding some value in
    /// `0..q`, in the compact per-kind form.
    pub fn validity(&self) -> BoolFormula {
        match self.kind {
            EncodingKind::Logarithmic => {
                // Binary comparison against q - 1: for every zero bit of
                // q - 1, either that variable is false or some higher
                // one-bit variable is false.
                let top = (self.q - 1) as u128;
                let mut conj = Vec::new();
                for i in 0..self.vars.len() {
                    if (top >> i) & 1 == 1 {
                        continue;
                    }
                    let mut disj = vec![BoolFormula::nvar(self.vars[i])];
                    for j in i + 1..self.vars.len() {
                        if (top >> j) & 1 == 1 {
                            disj.push(BoolFormula::nvar(self.vars[j]));
                        }
                    }
                    conj.push(BoolFormula::or(disj));
                }
                BoolFormula::and(conj)
            }
            EncodingKind::Order => BoolFormula::and(
                (1..self.vars.len())
                    .map(|i| {
                        BoolFormula::implies(
                            BoolFormula::var(self.vars[i]),
                            BoolFormula::var(self.vars[i - 1]),
                        )
                    })
                    .collect(),
            ),
            EncodingKind::OneHot => {
                let mut conj = vec![BoolFormula::or(
                    self.vars.iter().map(|&v| BoolFormula::var(v)).collect(),
                )];
                for i in 0..self.vars.len() {
                    for j in i + 1..self.vars.len() {
                        conj.push(BoolFormula::or(vec![
                            BoolFormula::nvar(self.vars[i]),
                            BoolFormula::nvar(self.vars[j]),
                        ]));
                    }
                }
                BoolFormula::and(conj)
            }
        }
    }

    /// Formula asserting two like-kind digits hold the same value:
    /// variable-wise biconditionals.
    pub fn equiv(&self, other: &QStateEncoding) -> Result<BoolFormula, EncodingError> {
        if self.q != other.q {
            return Err(EncodingError::Mismatch("different bases"));
        }
        if self.kind != other.kind {
            return Err(EncodingError::Mismatch("different kinds"));
        }
        Ok(BoolFormula::and(
            self.vars
                .iter()
                .zip(&other.vars)
                .map(|(&v, &w)| BoolFormula::iff(BoolFormula::var(v), BoolFormula::var(w)))
                .collect(),
        ))
    }

    /// Decodes the digit under a total assignment: `Ok(None)` for patterns
    /// outside the valid range.
    pub fn value(&self, tau: &Assignment) -> Result<Option<u128>, WmcError> {
        let mut bits = Vec::with_capacity(self.vars.len());
        for &v in &self.vars {
            bits.push(tau.get(v).ok_or(WmcError::UnboundVariable(v))?);
        }
        Ok(match self.kind {
            EncodingKind::Logarithmic => {
                let n = bits
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| (b as u128) << i)
                    .sum::<u128>();
                (n < self.q as u128).then_some(n)
            }
            EncodingKind::Order => {
                let n = bits.iter().take_while(|&&b| b).count() as u128;
                bits.iter().skip(n as usize).all(|&b| !b).then_some(n)
            }
            EncodingKind::OneHot => {
                let trues: Vec<usize> =
                    bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
                match trues.as_slice() {
                    [i] => Some(*i as u128),
                    _ => None,
                }
            }
        })
    }
}

fn polarity(v: Variable, positive: bool) -> BoolFormula {
    if positive {
        BoolFormula::var(v)
    } else {
        BoolFormula::nvar(v)
    }
}

/// A string of like-kind digits; index `i` carries weight `q^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingString {
    digits: Vec<QStateEncoding>,
}

impl EncodingString {
    /// Allocates a fresh string of `len` digits of base `q`.
    pub fn new(q: u32, kind: EncodingKind, len: usize, fresh: &mut VarSource) -> Self {
        EncodingString { digits: (0..len).map(|_| QStateEncoding::new(q, kind, fresh)).collect() }
    }

    /// The zero-length string (scalar-side of a ket or bra).
    pub fn empty() -> Self {
        EncodingString { digits: Vec::new() }
    }

    /// Wraps existing digits; they must agree on base and kind and use
    /// pairwise disjoint variables.
    pub fn from_digits(digits: Vec<QStateEncoding>) -> Result<Self, EncodingError> {
        if let Some(first) = digits.first() {
            for d in &digits[1..] {
                if d.q != first.q {
                    return Err(EncodingError::Mismatch("different bases in string"));
                }
                if d.kind != first.kind {
                    return Err(EncodingError::Mismatch("different kinds in string"));
                }
            }
            let mut all: Vec<Variable> = digits.iter().flat_map(|d| d.vars.clone()).collect();
            let total = all.len();
            all.sort();
            all.dedup();
            if all.len() != total {
                return Err(EncodingError::DuplicateVariable);
            }
        }
        Ok(EncodingString { digits })
    }

    /// Concatenation with `high` taking the more significant positions.
    pub fn concat(low: &EncodingString, high: &EncodingString) -> Result<Self, EncodingError> {
        let mut digits = low.digits.clone();
        digits.extend(high.digits.iter().cloned());
        Self::from_digits(digits)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[QStateEncoding] {
        &self.digits
    }

    pub fn q(&self) -> Option<u32> {
        self.digits.first().map(|d| d.q)
    }

    /// All backing variables, least significant digit first.
    pub fn variables(&self) -> Vec<Variable> {
        self.digits.iter().flat_map(|d| d.vars.iter().copied()).collect()
    }

    /// Number of representable values `q^len`, or `None` if it overflows.
    pub fn bound(&self) -> Option<u128> {
        let q = match self.digits.first() {
            Some(d) => d.q as u128,
            None => return Some(1),
        };
        let mut acc: u128 = 1;
        for _ in 0..self.digits.len() {
            acc = acc.checked_mul(q)?;
        }
        Some(acc)
    }

    /// The cube asserting the string equals `n` in base-q expansion.
    pub fn equals(&self, n: u128) -> Result<BoolFormula, EncodingError> {
        if let Some(bound) = self.bound() {
            if n >= bound {
                return Err(EncodingError::ValueOutOfRange {
                    n,
                    q: self.q().unwrap_or(2),
                    len: self.digits.len(),
                });
            }
        }
        let mut rest = n;
        let mut conj = Vec::with_capacity(self.digits.len());
        for d in &self.digits {
            conj.push(d.equals(rest % d.q as u128)?);
            rest /= d.q as u128;
        }
        Ok(BoolFormula::and(conj))
    }

    /// Conjunction of the digit validity formulas.
    pub fn validity(&self) -> BoolFormula {
        BoolFormula::and(self.digits.iter().map(|d| d.validity()).collect())
    }

    /// Digit-wise equivalence of two like-kind strings of equal length.
    pub fn equiv(&self, other: &EncodingString) -> Result<BoolFormula, EncodingError> {
        if self.digits.len() != other.digits.len() {
            return Err(EncodingError::Mismatch("different string lengths"));
        }
        Ok(BoolFormula::and(
            self.digits
                .iter()
                .zip(&other.digits)
                .map(|(a, b)| a.equiv(b))
                .collect::<Result<_, _>>()?,
        ))
    }

    /// Decodes the string under a total assignment; `Ok(None)` if any digit
    /// holds an invalid pattern.
    pub fn value(&self, tau: &Assignment) -> Result<Option<u128>, WmcError> {
        let mut acc: u128 = 0;
        let mut weight: u128 = 1;
        for d in &self.digits {
            match d.value(tau)? {
                Some(n) => acc += weight * n,
                None => return Ok(None),
            }
            weight = weight.saturating_mul(d.q as u128);
        }
        Ok(Some(acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wmc::evaluate;

    const KINDS: [EncodingKind; 3] =
        [EncodingKind::Logarithmic, EncodingKind::Order, EncodingKind::OneHot];

    /// All assignments over the encoding's variables.
    fn all_assignments(vars: &[Variable]) -> Vec<Assignment> {
        let mut out = Vec::with_capacity(1 << vars.len());
        for mask in 0u32..1 << vars.len() {
            out.push(Assignment::from_pairs(
                vars.iter().enumerate().map(|(i, &v)| (v, (mask >> i) & 1 == 1)),
            ));
        }
        out
    }

    #[test]
    fn logarithmic_equals_is_the_binary_cube() {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(4, EncodingKind::Logarithmic, &mut src);
        let [v0, v1] = v.vars() else { panic!() };
        assert_eq!(
            v.equals(2).unwrap(),
            BoolFormula::and(vec![BoolFormula::nvar(*v0), BoolFormula::var(*v1)])
        );
    }

    #[test]
    fn order_zero_is_the_all_false_cube() {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(4, EncodingKind::Order, &mut src);
        let expected =
            BoolFormula::and(v.vars().iter().map(|&x| BoolFormula::nvar(x)).collect());
        assert_eq!(v.equals(0).unwrap(), expected);
    }

    #[test]
    fn onehot_one_sets_only_the_second_variable() {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(3, EncodingKind::OneHot, &mut src);
        let [v0, v1, v2] = v.vars() else { panic!() };
        assert_eq!(
            v.equals(1).unwrap(),
            BoolFormula::and(vec![
                BoolFormula::nvar(*v0),
                BoolFormula::var(*v1),
                BoolFormula::nvar(*v2),
            ])
        );
    }

    #[test]
    fn power_of_two_logarithmic_validity_is_trivial() {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(4, EncodingKind::Logarithmic, &mut src);
        assert_eq!(v.validity(), BoolFormula::True);
    }

    #[test]
    fn order_validity_is_the_monotone_chain() {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(3, EncodingKind::Order, &mut src);
        let [v0, v1] = v.vars() else { panic!() };
        assert_eq!(
            v.validity(),
            BoolFormula::implies(BoolFormula::var(*v1), BoolFormula::var(*v0))
        );
    }

    #[test]
    fn logarithmic_q3_validity_has_three_models() {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(3, EncodingKind::Logarithmic, &mut src);
        let val = v.validity();
        let count = all_assignments(v.vars())
            .iter()
            .filter(|tau| evaluate(&val, tau).unwrap())
            .count();
        assert_eq!(count, 3);
    }

    #[test]
    fn equals_values_partition_the_valid_patterns() {
        for kind in KINDS {
            for q in 2..=6u32 {
                let mut src = VarSource::new();
                let v = QStateEncoding::new(q, kind, &mut src);
                let val = v.validity();
                for tau in all_assignments(v.vars()) {
                    let matching: Vec<u128> = (0..q as u128)
                        .filter(|&n| evaluate(&v.equals(n).unwrap(), &tau).unwrap())
                        .collect();
                    let valid = evaluate(&val, &tau).unwrap();
                    assert_eq!(matching.len(), usize::from(valid), "q={q} kind={kind:?}");
                    assert_eq!(v.value(&tau).unwrap(), matching.first().copied());
                }
                // Exactly one satisfying assignment per value.
                for n in 0..q as u128 {
                    let eq = v.equals(n).unwrap();
                    let sat = all_assignments(v.vars())
                        .iter()
                        .filter(|tau| evaluate(&eq, tau).unwrap())
                        .count();
                    assert_eq!(sat, 1);
                }
            }
        }
    }

    #[test]
    fn string_equals_uses_base_q_digits() {
        // 5 in base 3 is digits (2, 1): least significant digit 2 first.
        let mut src = VarSource::new();
        let x = EncodingString::new(3, EncodingKind::OneHot, 2, &mut src);
        let f = x.equals(5).unwrap();
        let expected = BoolFormula::and(vec![
            x.digits()[0].equals(2).unwrap(),
            x.digits()[1].equals(1).unwrap(),
        ]);
        assert_eq!(f, expected);
    }

    #[test]
    fn string_equiv_transfers_the_value() {
        let mut src = VarSource::new();
        let x = EncodingString::new(3, EncodingKind::Logarithmic, 2, &mut src);
        let y = EncodingString::new(3, EncodingKind::Logarithmic, 2, &mut src);
        let f = BoolFormula::and(vec![
            x.equals(5).unwrap(),
            x.equiv(&y).unwrap(),
            y.validity(),
        ]);
        let vars: Vec<Variable> =
            x.variables().into_iter().chain(y.variables()).collect();
        let sats: Vec<Assignment> = all_assignments(&vars)
            .into_iter()
            .filter(|tau| evaluate(&f, tau).unwrap())
            .collect();
        assert_eq!(sats.len(), 1);
        assert_eq!(y.value(&sats[0]).unwrap(), Some(5));
    }

    #[test]
    fn mismatches_are_rejected() {
        let mut src = VarSource::new();
        let a = QStateEncoding::new(3, EncodingKind::Order, &mut src);
        let b = QStateEncoding::new(4, EncodingKind::Order, &mut src);
        let c = QStateEncoding::new(3, EncodingKind::OneHot, &mut src);
        assert!(a.equiv(&b).is_err());
        assert!(a.equiv(&c).is_err());
        assert!(a.equals(3).is_err());
        let x = EncodingString::from_digits(vec![a.clone()]).unwrap();
        let y = EncodingString::from_digits(vec![]).unwrap();
        assert!(x.equiv(&y).is_err());
        assert!(EncodingString::from_digits(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn empty_string_represents_only_zero() {
        let x = EncodingString::empty();
        assert_eq!(x.bound(), Some(1));
        assert_eq!(x.equals(0).unwrap(), BoolFormula::True);
        assert!(x.equals(1).is_err());
    }
}
