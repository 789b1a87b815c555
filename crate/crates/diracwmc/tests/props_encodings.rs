//! Properties of the q-state encodings over randomized parameters.

mod common;

use diracwmc::{
    evaluate, Assignment, BoolFormula, EncodingKind, EncodingString, QStateEncoding, VarSource,
    Variable,
};
use proptest::prelude::*;

fn kinds() -> impl Strategy<Value = EncodingKind> {
    prop_oneof![
        Just(EncodingKind::Logarithmic),
        Just(EncodingKind::Order),
        Just(EncodingKind::OneHot),
    ]
}

fn assignments(vars: &[Variable]) -> impl Iterator<Item = Assignment> + '_ {
    (0..(1u32 << vars.len())).map(move |bits| {
        Assignment::from_pairs(vars.iter().enumerate().map(move |(i, &v)| (v, bits >> i & 1 == 1)))
    })
}

proptest! {
    /// Each encoded value has exactly one satisfying assignment, and the
    /// encoding reads that value back.
    #[test]
    fn equality_pins_one_assignment(kind in kinds(), q in 2u32..=6, n in 0u128..6) {
        prop_assume!(n < q as u128);
        let mut src = VarSource::new();
        let v = QStateEncoding::new(q, kind, &mut src);
        let eq = v.equals(n).unwrap();
        let hits: Vec<Assignment> = assignments(v.vars())
            .filter(|tau| evaluate(&eq, tau).unwrap())
            .collect();
        prop_assert_eq!(hits.len(), 1);
        prop_assert_eq!(v.value(&hits[0]).unwrap(), Some(n));
    }

    /// Distinct values never share an assignment.
    #[test]
    fn distinct_values_exclude_each_other(kind in kinds(), q in 2u32..=6, n in 0u128..6, m in 0u128..6) {
        prop_assume!(n < q as u128 && m < q as u128 && n != m);
        let mut src = VarSource::new();
        let v = QStateEncoding::new(q, kind, &mut src);
        let both = BoolFormula::and(vec![v.equals(n).unwrap(), v.equals(m).unwrap()]);
        prop_assert!(assignments(v.vars()).all(|tau| !evaluate(&both, &tau).unwrap()));
    }

    /// The simplified validity formula is truth-table equivalent to the
    /// disjunction of all equalities.
    #[test]
    fn validity_is_the_disjunction_of_values(kind in kinds(), q in 2u32..=6) {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(q, kind, &mut src);
        let any = BoolFormula::or((0..q as u128).map(|n| v.equals(n).unwrap()).collect());
        for tau in assignments(v.vars()) {
            prop_assert_eq!(
                evaluate(&v.validity(), &tau).unwrap(),
                evaluate(&any, &tau).unwrap()
            );
        }
    }

    /// Equivalence of two encodings holds exactly on valid pairs encoding
    /// the same value.
    #[test]
    fn equivalence_means_equal_values(kind in kinds(), q in 2u32..=5) {
        let mut src = VarSource::new();
        let v = QStateEncoding::new(q, kind, &mut src);
        let w = QStateEncoding::new(q, kind, &mut src);
        let equiv = v.equiv(&w).unwrap();
        let vars: Vec<Variable> = v.vars().iter().chain(w.vars()).copied().collect();
        let valid = BoolFormula::and(vec![v.validity(), w.validity()]);
        let mut satisfied = 0usize;
        for tau in assignments(&vars) {
            if !evaluate(&valid, &tau).unwrap() {
                continue;
            }
            let same = v.value(&tau).unwrap() == w.value(&tau).unwrap();
            let holds = evaluate(&equiv, &tau).unwrap();
            prop_assert_eq!(holds, same);
            satisfied += usize::from(holds);
        }
        prop_assert_eq!(satisfied, q as usize);
    }

    /// A length-2 string pins its base-q digits, least significant first.
    #[test]
    fn string_equality_fixes_the_digits(kind in kinds(), q in 2u32..=4, n in 0u128..16) {
        prop_assume!(n < (q as u128).pow(2));
        let mut src = VarSource::new();
        let x = EncodingString::new(q, kind, 2, &mut src);
        let eq = x.equals(n).unwrap();
        let vars = x.variables();
        let hits: Vec<Assignment> = assignments(&vars)
            .filter(|tau| evaluate(&eq, tau).unwrap())
            .collect();
        prop_assert_eq!(hits.len(), 1);
        prop_assert_eq!(x.value(&hits[0]).unwrap(), Some(n));
        let digits = [
            x.digits()[0].value(&hits[0]).unwrap().unwrap(),
            x.digits()[1].value(&hits[0]).unwrap().unwrap(),
        ];
        prop_assert_eq!(digits[0] + (q as u128) * digits[1], n);
    }
}
