//! Compilation of typed expressions into weighted model counting
//! representations, and evaluation of those representations by exact
//! counting.
//!
//! A scalar representation `(phi, W)` stands for the number
//! `WMC(phi, W)`. A matrix representation `(phi, W, x, y, q)` stands for
//! the matrix with entries `M_ij = WMC(phi ∧ x = j ∧ y = i, W)`, where `x`
//! and `y` are strings of q-state encodings for the input and output
//! indices. Compilation is bottom-up with one rule per constructor; fresh
//! variables come from a caller-supplied source, so results are
//! reproducible.

use thiserror::Error;

use crate::encodings::{EncodingError, EncodingKind, EncodingString};
use crate::field::Field;
use crate::lang::{typecheck, Expr, TypeError};
use crate::value::DenseMatrix;
use crate::wmc::{
    export_wcnf, to_cnf, wmc_count_with_cap, wmc_top, BoolFormula, VarSource, WcnfDialect,
    WeightFunction, WmcError, DEFAULT_COMPONENT_CAP,
};

/// A weighted counting instance representing a scalar.
#[derive(Clone, Debug)]
pub struct ScalarRep<F: Field> {
    pub phi: BoolFormula,
    pub weights: WeightFunction<F>,
}

/// A weighted counting instance representing a `q^|y| x q^|x|` matrix.
///
/// The input and output strings may share variables; such representations
/// are diagonal-like (entries with differing index patterns count zero).
#[derive(Clone, Debug)]
pub struct MatrixRep<F: Field> {
    pub phi: BoolFormula,
    pub weights: WeightFunction<F>,
    pub input: EncodingString,
    pub output: EncodingString,
    pub q: u32,
}

/// Result of compiling an expression.
#[derive(Clone, Debug)]
pub enum Rep<F: Field> {
    Scalar(ScalarRep<F>),
    Matrix(MatrixRep<F>),
}

impl<F: Field> Rep<F> {
    pub fn into_scalar(self) -> ScalarRep<F> {
        match self {
            Rep::Scalar(r) => r,
            Rep::Matrix(_) => panic!("expected a scalar representation"),
        }
    }

    pub fn into_matrix(self) -> MatrixRep<F> {
        match self {
            Rep::Matrix(r) => r,
            Rep::Scalar(_) => panic!("expected a matrix representation"),
        }
    }
}

/// Options controlling compilation.
#[derive(Clone, Debug)]
pub struct CompileOptions {
    /// How q-state digits are realized over Boolean variables.
    pub kind: EncodingKind,
    /// Replace scalar subtrees by constants of their counted value.
    pub eval_scalars: bool,
    /// Component cap used when `eval_scalars` counts subtrees.
    pub component_cap: Option<usize>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            kind: EncodingKind::Logarithmic,
            eval_scalars: false,
            component_cap: Some(DEFAULT_COMPONENT_CAP),
        }
    }
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Wmc(#[from] WmcError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("matrix of {rows} x {cols} entries is too large to assemble densely")]
    TooLarge { rows: u128, cols: u128 },
}

/// Compiles a typed expression to a representation.
pub fn compile<F: Field>(
    e: &Expr<F>,
    opts: &CompileOptions,
    fresh: &mut VarSource,
) -> Result<Rep<F>, CompileError> {
    typecheck(e)?;
    compile_node(e, opts, fresh)
}

fn compile_node<F: Field>(
    e: &Expr<F>,
    opts: &CompileOptions,
    fresh: &mut VarSource,
) -> Result<Rep<F>, CompileError> {
    let rep = match e {
        Expr::Const(alpha) => Rep::Scalar(const_rep(alpha.clone(), fresh)),
        Expr::SMul(a, b) => {
            let r1 = compile_node(a, opts, fresh)?.into_scalar();
            let r2 = rename_scalar(compile_node(b, opts, fresh)?.into_scalar(), fresh);
            Rep::Scalar(ScalarRep {
                phi: BoolFormula::and(vec![r1.phi, r2.phi]),
                weights: r1.weights.union(r2.weights),
            })
        }
        Expr::SAdd(a, b) => {
            let r1 = normalize_scalar(compile_node(a, opts, fresh)?.into_scalar(), fresh);
            let r2 = rename_scalar(
                normalize_scalar(compile_node(b, opts, fresh)?.into_scalar(), fresh),
                fresh,
            );
            let c = fresh.fresh();
            let mut weights = r1.weights.clone().union(r2.weights.clone());
            // The control weights divide out the unconstrained factor of the
            // branch that is switched off.
            weights.insert(
                c,
                F::one() / wmc_top(&r2.weights),
                F::one() / wmc_top(&r1.weights),
            );
            let phi = BoolFormula::and(vec![
                BoolFormula::implies(BoolFormula::nvar(c), r1.phi),
                BoolFormula::implies(BoolFormula::var(c), r2.phi),
            ]);
            Rep::Scalar(ScalarRep { phi, weights })
        }
        Expr::Trace(m) => {
            let r = compile_node(m, opts, fresh)?.into_matrix();
            let phi = BoolFormula::and(vec![
                r.phi,
                r.input.equiv(&r.output)?,
                r.input.validity(),
            ]);
            Rep::Scalar(ScalarRep { phi, weights: r.weights })
        }
        Expr::Entry(i, j, m) => {
            let r = compile_node(m, opts, fresh)?.into_matrix();
            let phi = BoolFormula::and(vec![
                r.phi,
                r.input.equals(*j)?,
                r.output.equals(*i)?,
            ]);
            Rep::Scalar(ScalarRep { phi, weights: r.weights })
        }
        Expr::Apply(f, inner) => match compile_node(inner, opts, fresh)? {
            Rep::Scalar(r) => Rep::Scalar(ScalarRep {
                phi: r.phi,
                weights: r.weights.map_weights(|w| f.apply(w)),
            }),
            Rep::Matrix(r) => Rep::Matrix(MatrixRep {
                weights: r.weights.map_weights(|w| f.apply(w)),
                ..r
            }),
        },
        Expr::Bra(i, q) => {
            let x = EncodingString::new(*q, opts.kind, 1, fresh);
            Rep::Matrix(basis_rep(x, *i, *q, true)?)
        }
        Expr::Ket(i, q) => {
            let x = EncodingString::new(*q, opts.kind, 1, fresh);
            Rep::Matrix(basis_rep(x, *i, *q, false)?)
        }
        // `a * b` applies `b` first: `b` is the box's M1, `a` is M2.
        Expr::MatMul(a, b) => {
            let r1 = compile_node(b, opts, fresh)?.into_matrix();
            let r2 = compile_node(a, opts, fresh)?.into_matrix();
            // Unify M2's input string with M1's output string; the weight
            // domains then overlap exactly on the connected variables.
            let mut map = std::collections::BTreeMap::new();
            for (from, to) in r2.input.variables().into_iter().zip(r1.output.variables()) {
                map.insert(from, to);
            }
            let phi2 = r2.phi.substitute(&map);
            let w2 = r2.weights.substitute(&map);
            let output = substitute_string(&r2.output, &map)?;
            let phi = BoolFormula::and(vec![r1.phi, phi2, r1.output.validity()]);
            Rep::Matrix(MatrixRep {
                phi,
                weights: r1.weights.merge_product(w2),
                input: r1.input,
                output,
                q: r1.q,
            })
        }
        Expr::MatAdd(a, b) => {
            let r1 = normalize_matrix(compile_node(a, opts, fresh)?.into_matrix(), fresh);
            let r2 = rename_matrix(
                normalize_matrix(compile_node(b, opts, fresh)?.into_matrix(), fresh),
                fresh,
            )?;
            let q = r1.q;
            let input = EncodingString::new(q, opts.kind, r1.input.len(), fresh);
            let output = EncodingString::new(q, opts.kind, r1.output.len(), fresh);
            let c = fresh.fresh();
            let mut weights = r1.weights.clone().union(r2.weights.clone());
            weights.insert(
                c,
                F::one() / wmc_top(&r2.weights),
                F::one() / wmc_top(&r1.weights),
            );
            for v in input.variables().into_iter().chain(output.variables()) {
                weights.insert_unit(v);
            }
            let phi = BoolFormula::and(vec![
                BoolFormula::implies(
                    BoolFormula::nvar(c),
                    BoolFormula::and(vec![
                        input.equiv(&r1.input)?,
                        output.equiv(&r1.output)?,
                        r1.phi,
                    ]),
                ),
                BoolFormula::implies(
                    BoolFormula::var(c),
                    BoolFormula::and(vec![
                        input.equiv(&r2.input)?,
                        output.equiv(&r2.output)?,
                        r2.phi,
                    ]),
                ),
            ]);
            Rep::Matrix(MatrixRep { phi, weights, input, output, q })
        }
        Expr::Kron(a, b) => {
            let r1 = compile_node(a, opts, fresh)?.into_matrix();
            let r2 = rename_matrix(compile_node(b, opts, fresh)?.into_matrix(), fresh)?;
            // Digits of the right factor are less significant: index pairs
            // (i1, i2) map to i1 * q^{n2} + i2.
            let input = EncodingString::concat(&r2.input, &r1.input)?;
            let output = EncodingString::concat(&r2.output, &r1.output)?;
            Rep::Matrix(MatrixRep {
                phi: BoolFormula::and(vec![r1.phi, r2.phi]),
                weights: r1.weights.union(r2.weights),
                input,
                output,
                q: r1.q,
            })
        }
        Expr::ScalMul(s, m) => {
            let rs = compile_node(s, opts, fresh)?.into_scalar();
            let rm = rename_matrix(compile_node(m, opts, fresh)?.into_matrix(), fresh)?;
            Rep::Matrix(MatrixRep {
                phi: BoolFormula::and(vec![rm.phi, rs.phi]),
                weights: rm.weights.union(rs.weights),
                input: rm.input,
                output: rm.output,
                q: rm.q,
            })
        }
        Expr::Trans(m) => {
            let r = compile_node(m, opts, fresh)?.into_matrix();
            Rep::Matrix(MatrixRep {
                phi: r.phi,
                weights: r.weights,
                input: r.output,
                output: r.input,
                q: r.q,
            })
        }
    };

    if opts.eval_scalars {
        if let Rep::Scalar(r) = &rep {
            if !matches!(e, Expr::Const(_)) {
                let value = wmc_count_with_cap(&r.phi, &r.weights, opts.component_cap)?;
                return Ok(Rep::Scalar(const_rep(value, fresh)));
            }
        }
    }
    Ok(rep)
}

/// The constant box: a single variable forced true, with both weights
/// `alpha`.
pub fn const_rep<F: Field>(alpha: F, fresh: &mut VarSource) -> ScalarRep<F> {
    let x = fresh.fresh();
    let mut weights = WeightFunction::new();
    weights.insert(x, alpha.clone(), alpha);
    ScalarRep { phi: BoolFormula::var(x), weights }
}

fn basis_rep<F: Field>(
    x: EncodingString,
    i: u128,
    q: u32,
    is_bra: bool,
) -> Result<MatrixRep<F>, CompileError> {
    let mut weights = WeightFunction::new();
    for v in x.variables() {
        weights.insert_unit(v);
    }
    let phi = x.equals(i)?;
    let (input, output) =
        if is_bra { (x, EncodingString::empty()) } else { (EncodingString::empty(), x) };
    Ok(MatrixRep { phi, weights, input, output, q })
}

fn rename_scalar<F: Field>(r: ScalarRep<F>, fresh: &mut VarSource) -> ScalarRep<F> {
    let (phi, weights, _) =
        crate::wmc::rename_fresh(&r.phi, &r.weights, &Default::default(), fresh);
    ScalarRep { phi, weights }
}

fn rename_matrix<F: Field>(
    r: MatrixRep<F>,
    fresh: &mut VarSource,
) -> Result<MatrixRep<F>, CompileError> {
    let (phi, weights, map) =
        crate::wmc::rename_fresh(&r.phi, &r.weights, &Default::default(), fresh);
    Ok(MatrixRep {
        phi,
        weights,
        input: substitute_string(&r.input, &map)?,
        output: substitute_string(&r.output, &map)?,
        q: r.q,
    })
}

fn substitute_string(
    s: &EncodingString,
    map: &std::collections::BTreeMap<crate::wmc::Variable, crate::wmc::Variable>,
) -> Result<EncodingString, EncodingError> {
    let digits = s
        .digits()
        .iter()
        .map(|d| {
            crate::encodings::QStateEncoding::from_vars(
                d.q(),
                d.kind(),
                d.vars().iter().map(|v| map.get(v).copied().unwrap_or(*v)).collect(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    EncodingString::from_digits(digits)
}

/// Rewrites a scalar representation into an equivalent one whose weight
/// function has nonzero count on the always-true formula.
pub fn normalize_scalar<F: Field>(r: ScalarRep<F>, fresh: &mut VarSource) -> ScalarRep<F> {
    match normalize_parts(r.phi, r.weights, fresh) {
        Some((phi, weights)) => ScalarRep { phi, weights },
        // A doubly-zero weight makes every count zero; the canonical zero
        // scalar has an empty domain, so its top count is one.
        None => ScalarRep { phi: BoolFormula::False, weights: WeightFunction::new() },
    }
}

/// Matrix analog of [`normalize_scalar`]; the zero case keeps fresh
/// unit-weight index strings with an unsatisfiable formula.
pub fn normalize_matrix<F: Field>(r: MatrixRep<F>, fresh: &mut VarSource) -> MatrixRep<F> {
    let q = r.q;
    let (in_len, out_len) = (r.input.len(), r.output.len());
    let kind = r
        .input
        .digits()
        .first()
        .or_else(|| r.output.digits().first())
        .map(|d| d.kind())
        .unwrap_or(EncodingKind::Logarithmic);
    match normalize_parts(r.phi, r.weights, fresh) {
        Some((phi, weights)) => MatrixRep { phi, weights, input: r.input, output: r.output, q },
        None => {
            let input = EncodingString::new(q, kind, in_len, fresh);
            let output = EncodingString::new(q, kind, out_len, fresh);
            let mut weights = WeightFunction::new();
            for v in input.variables().into_iter().chain(output.variables()) {
                weights.insert_unit(v);
            }
            let phi = BoolFormula::And(vec![
                BoolFormula::False,
                input.validity(),
                output.validity(),
            ]);
            MatrixRep { phi, weights, input, output, q }
        }
    }
}

/// Shared normalization: `None` signals the all-zero representation.
fn normalize_parts<F: Field>(
    phi: BoolFormula,
    weights: WeightFunction<F>,
    fresh: &mut VarSource,
) -> Option<(BoolFormula, WeightFunction<F>)> {
    for (_, (w0, w1)) in weights.iter() {
        if w0.is_zero() && w1.is_zero() {
            return None;
        }
    }
    let cancelling: Vec<_> = weights
        .iter()
        .filter(|(_, (w0, w1))| (w0.clone() + w1.clone()).is_zero())
        .map(|(v, w)| (v, w.clone()))
        .collect();
    let mut phi = phi;
    let mut weights = weights;
    for (v, (w0, w1)) in cancelling {
        // Split v's weight between v and a mirror v': the pairing keeps
        // every assignment's product, while the per-variable sums become
        // nonzero (2*w0 + w1 = w0 since w0 + w1 = 0).
        let vp = fresh.fresh();
        phi = BoolFormula::and(vec![
            phi,
            BoolFormula::iff(BoolFormula::var(v), BoolFormula::var(vp)),
        ]);
        let two = F::one() + F::one();
        weights.insert(v, two * w0, w1);
        weights.insert(vp, F::one() / (F::one() + F::one()), F::one());
    }
    Some((phi, weights))
}

/// The number a scalar representation stands for.
pub fn rep_scalar_value<F: Field>(
    r: &ScalarRep<F>,
    cap: Option<usize>,
) -> Result<F, WmcError> {
    wmc_count_with_cap(&r.phi, &r.weights, cap)
}

/// One entry of the represented matrix: row `i`, column `j`.
pub fn rep_matrix_entry<F: Field>(
    r: &MatrixRep<F>,
    i: u128,
    j: u128,
    cap: Option<usize>,
) -> Result<F, CompileError> {
    let phi = BoolFormula::and(vec![
        r.phi.clone(),
        r.input.equals(j)?,
        r.output.equals(i)?,
    ]);
    Ok(wmc_count_with_cap(&phi, &r.weights, cap)?)
}

/// Assembles the full represented matrix by counting every entry.
pub fn rep_matrix_value<F: Field>(
    r: &MatrixRep<F>,
    cap: Option<usize>,
) -> Result<DenseMatrix<F>, CompileError> {
    let rows = r.output.bound().unwrap_or(u128::MAX);
    let cols = r.input.bound().unwrap_or(u128::MAX);
    if rows > crate::value::MAX_DENSE_DIM || cols > crate::value::MAX_DENSE_DIM {
        return Err(CompileError::TooLarge { rows, cols });
    }
    let mut out = DenseMatrix::zeros(rows as usize, cols as usize);
    for i in 0..rows {
        for j in 0..cols {
            out.set(i as usize, j as usize, rep_matrix_entry(r, i, j, cap)?);
        }
    }
    Ok(out)
}

/// Serializes a scalar representation: clausified formula, weights (the
/// clausification auxiliaries get weight 1), and clauses.
pub fn export_scalar_rep<F: Field>(
    r: &ScalarRep<F>,
    dialect: WcnfDialect,
) -> Result<String, WmcError> {
    let mut fresh = var_source_after(&r.weights, &r.phi);
    let (cnf, aux) = to_cnf(&r.phi, &mut fresh);
    export_wcnf(&cnf, &r.weights.clone().union(aux), dialect)
}

/// Serializes a matrix representation with `c x` / `c y` annotation lines
/// listing the input and output variables per digit (least significant
/// digit first).
pub fn export_matrix_rep<F: Field>(
    r: &MatrixRep<F>,
    dialect: WcnfDialect,
) -> Result<String, WmcError> {
    let mut fresh = var_source_after(&r.weights, &r.phi);
    let (cnf, aux) = to_cnf(&r.phi, &mut fresh);
    let mut out = export_wcnf(&cnf, &r.weights.clone().union(aux), dialect)?;
    for (label, string) in [("x", &r.input), ("y", &r.output)] {
        for (i, d) in string.digits().iter().enumerate() {
            out.push_str(&format!("c {label} {i}"));
            for v in d.vars() {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn var_source_after<F: Field>(weights: &WeightFunction<F>, phi: &BoolFormula) -> VarSource {
    let mut max = 0;
    for v in weights.domain() {
        max = max.max(v.id());
    }
    for v in phi.variables() {
        max = max.max(v.id());
    }
    VarSource::starting_after(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::QStateEncoding;
    use num_complex::Complex64;

    type E = Expr<Complex64>;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn opts(kind: EncodingKind) -> CompileOptions {
        CompileOptions { kind, ..CompileOptions::default() }
    }

    #[test]
    fn constant_compiles_to_a_single_weighted_variable() {
        let mut fresh = VarSource::new();
        let r = compile(&E::Const(c(1.5)), &CompileOptions::default(), &mut fresh)
            .unwrap()
            .into_scalar();
        assert_eq!(r.weights.len(), 1);
        assert_eq!(rep_scalar_value(&r, None).unwrap(), c(1.5));
    }

    #[test]
    fn scalar_addition_counts_to_the_sum() {
        let mut fresh = VarSource::new();
        let e = E::sadd(E::Const(c(2.0)), E::Const(c(5.0)));
        let r = compile(&e, &CompileOptions::default(), &mut fresh).unwrap().into_scalar();
        assert_eq!(rep_scalar_value(&r, None).unwrap(), c(7.0));
    }

    #[test]
    fn outer_product_matrix() {
        for kind in [EncodingKind::Logarithmic, EncodingKind::Order, EncodingKind::OneHot] {
            let mut fresh = VarSource::new();
            let e = E::matmul(E::Ket(0, 2), E::Bra(1, 2));
            let r = compile(&e, &opts(kind), &mut fresh).unwrap().into_matrix();
            let m = rep_matrix_value(&r, None).unwrap();
            assert_eq!(m.get(0, 1), &c(1.0), "{kind:?}");
            for (i, j) in [(0, 0), (1, 0), (1, 1)] {
                assert_eq!(m.get(i, j), &c(0.0), "{kind:?}");
            }
        }
    }

    #[test]
    fn diagonal_rep_of_z_exponential() {
        // (⊤, W(x) = (e^θ, e^{-θ}), x, x, 2) represents diag(e^θ, e^{-θ}).
        let theta = 0.4f64;
        let mut fresh = VarSource::new();
        let x = EncodingString::new(2, EncodingKind::Logarithmic, 1, &mut fresh);
        let mut weights = WeightFunction::new();
        weights.insert(x.variables()[0], c(theta.exp()), c((-theta).exp()));
        let r = MatrixRep {
            phi: BoolFormula::True,
            weights,
            input: x.clone(),
            output: x,
            q: 2,
        };
        let m = rep_matrix_value(&r, None).unwrap();
        assert!((m.get(0, 0).re - theta.exp()).abs() < 1e-15);
        assert!((m.get(1, 1).re - (-theta).exp()).abs() < 1e-15);
        assert_eq!(m.get(0, 1), &c(0.0));
        assert_eq!(m.get(1, 0), &c(0.0));
    }

    #[test]
    fn zz_exponential_rep() {
        // (z ↔ (x ↔ y), W(z) = (e^{-θ}, e^θ)) represents e^{θ Z⊗Z}.
        let theta = 0.3f64;
        let mut fresh = VarSource::new();
        let x = QStateEncoding::new(2, EncodingKind::Logarithmic, &mut fresh);
        let y = QStateEncoding::new(2, EncodingKind::Logarithmic, &mut fresh);
        let z = fresh.fresh();
        let mut weights = WeightFunction::new();
        weights.insert_unit(x.vars()[0]);
        weights.insert_unit(y.vars()[0]);
        weights.insert(z, c((-theta).exp()), c(theta.exp()));
        let string = EncodingString::from_digits(vec![y.clone(), x.clone()]).unwrap();
        let phi = BoolFormula::iff(
            BoolFormula::var(z),
            BoolFormula::iff(BoolFormula::var(x.vars()[0]), BoolFormula::var(y.vars()[0])),
        );
        let r = MatrixRep { phi, weights, input: string.clone(), output: string, q: 2 };
        let m = rep_matrix_value(&r, None).unwrap();
        for i in 0..4 {
            // Z⊗Z eigenvalue +1 on aligned spins (00, 11), -1 otherwise.
            let aligned = (i & 1) == ((i >> 1) & 1);
            let expect = if aligned { theta.exp() } else { (-theta).exp() };
            assert!((m.get(i, i).re - expect).abs() < 1e-15, "{i}");
        }
    }

    #[test]
    fn hadamard_rep_up_to_scale() {
        // (r ↔ (x ∧ y), W(r) = (1, -1)) represents sqrt(2) * H.
        let mut fresh = VarSource::new();
        let x = QStateEncoding::new(2, EncodingKind::Logarithmic, &mut fresh);
        let y = QStateEncoding::new(2, EncodingKind::Logarithmic, &mut fresh);
        let rvar = fresh.fresh();
        let mut weights = WeightFunction::new();
        weights.insert_unit(x.vars()[0]);
        weights.insert_unit(y.vars()[0]);
        weights.insert(rvar, c(1.0), c(-1.0));
        let phi = BoolFormula::iff(
            BoolFormula::var(rvar),
            BoolFormula::and(vec![
                BoolFormula::var(x.vars()[0]),
                BoolFormula::var(y.vars()[0]),
            ]),
        );
        let r = MatrixRep {
            phi,
            weights,
            input: EncodingString::from_digits(vec![x]).unwrap(),
            output: EncodingString::from_digits(vec![y]).unwrap(),
            q: 2,
        };
        let m = rep_matrix_value(&r, None).unwrap();
        for (i, j, expect) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
            assert_eq!(m.get(i, j), &c(expect));
        }
    }

    #[test]
    fn normalization_keeps_the_value() {
        // phi = x with weights (-1, 1): top count is zero until normalized.
        let mut fresh = VarSource::new();
        let x = fresh.fresh();
        let mut weights = WeightFunction::new();
        weights.insert(x, c(-1.0), c(1.0));
        let r = ScalarRep { phi: BoolFormula::var(x), weights };
        assert!(wmc_top(&r.weights).norm() == 0.0);
        let n = normalize_scalar(r, &mut fresh);
        assert!(wmc_top(&n.weights).norm() != 0.0);
        assert_eq!(rep_scalar_value(&n, None).unwrap(), c(1.0));
    }

    #[test]
    fn unchanged_when_top_is_nonzero() {
        let mut fresh = VarSource::new();
        let x = fresh.fresh();
        let mut weights = WeightFunction::new();
        weights.insert(x, c(1.0), c(1.0));
        let r = ScalarRep { phi: BoolFormula::var(x), weights: weights.clone() };
        let n = normalize_scalar(r, &mut fresh);
        assert_eq!(n.weights, weights);
    }

    #[test]
    fn doubly_zero_weight_collapses_to_false() {
        let mut fresh = VarSource::new();
        let x = fresh.fresh();
        let mut weights = WeightFunction::new();
        weights.insert(x, c(0.0), c(0.0));
        let r = ScalarRep { phi: BoolFormula::var(x), weights };
        let n = normalize_scalar(r, &mut fresh);
        assert_eq!(n.phi, BoolFormula::False);
        assert!(n.weights.is_empty());
        assert_eq!(rep_scalar_value(&n, None).unwrap(), c(0.0));
        assert_eq!(wmc_top(&n.weights), c(1.0));
    }

    #[test]
    fn matrix_addition_through_zero_operand() {
        // One operand is the zero matrix via a (0,0)-weight scalar factor.
        let mut fresh = VarSource::new();
        let zero = E::scalmul(E::Const(c(0.0)), E::matmul(E::Ket(0, 2), E::Bra(0, 2)));
        let other = E::matmul(E::Ket(1, 2), E::Bra(1, 2));
        let e = E::matadd(zero, other);
        let r = compile(&e, &CompileOptions::default(), &mut fresh).unwrap().into_matrix();
        let m = rep_matrix_value(&r, None).unwrap();
        assert_eq!(m.get(1, 1), &c(1.0));
        assert_eq!(m.get(0, 0), &c(0.0));
    }

    #[test]
    fn trace_of_three_level_identity_like_matrix() {
        // tr(2|0><0| + |1><1|) over q = 2 counts 3.
        let e = E::matadd(
            E::scalmul(E::Const(c(2.0)), E::matmul(E::Ket(0, 2), E::Bra(0, 2))),
            E::matmul(E::Ket(1, 2), E::Bra(1, 2)),
        );
        let mut fresh = VarSource::new();
        let r = compile(&E::trace(e), &CompileOptions::default(), &mut fresh)
            .unwrap()
            .into_scalar();
        let v = rep_scalar_value(&r, None).unwrap();
        assert!((v.re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eval_scalars_replaces_subtrees_by_constants() {
        let e = E::sadd(
            E::smul(E::Const(c(2.0)), E::Const(c(3.0))),
            E::Const(c(4.0)),
        );
        let mut fresh = VarSource::new();
        let o = CompileOptions { eval_scalars: true, ..CompileOptions::default() };
        let r = compile(&e, &o, &mut fresh).unwrap().into_scalar();
        assert_eq!(r.weights.len(), 1);
        assert_eq!(rep_scalar_value(&r, None).unwrap(), c(10.0));
    }

    #[test]
    fn export_includes_string_annotations() {
        let mut fresh = VarSource::new();
        let e = E::matmul(E::Ket(0, 2), E::Bra(1, 2));
        let r = compile(&e, &CompileOptions::default(), &mut fresh).unwrap().into_matrix();
        let text = export_matrix_rep(&r, WcnfDialect::Native).unwrap();
        assert!(text.starts_with("p cnf "));
        assert!(text.contains("\nc x 0 "));
        assert!(text.contains("\nc y 0 "));
        let parsed: crate::wmc::WcnfInstance<Complex64> =
            crate::wmc::parse_wcnf(&text).unwrap();
        assert_eq!(parsed.input_strings.len(), 1);
        assert_eq!(parsed.output_strings.len(), 1);
        assert_eq!(parsed.input_strings[0], r.input.variables());
        assert_eq!(parsed.output_strings[0], r.output.variables());
    }
}
