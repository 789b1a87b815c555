//! Physics front-ends: classical Ising, transverse-field Ising, and Potts
//! models, reduced to counting instances or matrix expressions, with
//! brute-force oracles for verification.
//!
//! Site 0 takes the most significant position in all Kronecker liftings.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::Field;
use crate::lang::Expr;
use crate::value::{dense_matexp, DenseMatrix};
use crate::wmc::{BoolFormula, VarSource, WeightFunction};

mod generate;
mod parse;

pub use generate::{generate_lattice, generate_random_graph, CouplingDist};
pub use parse::{parse_model, ModelFile};

/// Inverse temperature, strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beta(f64);

impl Beta {
    pub fn new(beta: f64) -> Result<Self, ModelError> {
        if beta > 0.0 && beta.is_finite() {
            Ok(Beta(beta))
        } else {
            Err(ModelError::BadBeta(beta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("inverse temperature must be positive and finite, got {0}")]
    BadBeta(f64),
    #[error("site index {index} out of range for {sites} sites")]
    SiteOutOfRange { index: usize, sites: usize },
    #[error("state {state} out of range for q = {q}")]
    StateOutOfRange { state: u32, q: u32 },
    #[error("coupling endpoints must differ, got site {0} twice")]
    SelfCoupling(usize),
    #[error("model with {sites} sites exceeds the oracle cap of {cap}")]
    OracleTooLarge { sites: usize, cap: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A classical Ising model: spins in {-1, +1}, pair couplings, site fields.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    sites: Vec<String>,
    /// Keyed by ordered pair (i, j) with i < j; each unordered pair once.
    couplings: BTreeMap<(usize, usize), f64>,
    fields: BTreeMap<usize, f64>,
}

impl IsingModel {
    pub fn new(num_sites: usize) -> Self {
        IsingModel {
            sites: (0..num_sites).map(|i| format!("s{i}")).collect(),
            couplings: BTreeMap::new(),
            fields: BTreeMap::new(),
        }
    }

    pub fn with_sites(sites: Vec<String>) -> Self {
        IsingModel { sites, couplings: BTreeMap::new(), fields: BTreeMap::new() }
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[String] {
        &self.sites
    }

    pub fn site_index(&self, name: &str) -> Option<usize> {
        self.sites.iter().position(|s| s == name)
    }

    pub fn set_coupling(&mut self, i: usize, j: usize, j_val: f64) -> Result<(), ModelError> {
        let (i, j) = self.check_pair(i, j)?;
        self.couplings.insert((i, j), j_val);
        Ok(())
    }

    pub fn set_field(&mut self, i: usize, h: f64) -> Result<(), ModelError> {
        self.check_site(i)?;
        self.fields.insert(i, h);
        Ok(())
    }

    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.couplings.iter().map(|(&k, &v)| (k, v))
    }

    pub fn fields(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.fields.iter().map(|(&k, &v)| (k, v))
    }

    fn check_site(&self, i: usize) -> Result<(), ModelError> {
        if i < self.sites.len() {
            Ok(())
        } else {
            Err(ModelError::SiteOutOfRange { index: i, sites: self.sites.len() })
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(usize, usize), ModelError> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(ModelError::SelfCoupling(i));
        }
        Ok((i.min(j), i.max(j)))
    }
}

/// A transverse-field Ising model: pair couplings plus uniform longitudinal
/// (`mu_z`) and transverse (`mu_x`) field strengths.
#[derive(Clone, Debug, PartialEq)]
pub struct TfimModel {
    pub ising: IsingModel,
    pub mu_z: f64,
    pub mu_x: f64,
}

impl TfimModel {
    pub fn new(num_sites: usize, mu_z: f64, mu_x: f64) -> Self {
        TfimModel { ising: IsingModel::new(num_sites), mu_z, mu_x }
    }

    pub fn num_sites(&self) -> usize {
        self.ising.num_sites()
    }
}

/// A Potts model: q-state sites, standard (uniform same-state coupling on
/// edges) or generalized (per-pair-of-states couplings and fields).
#[derive(Clone, Debug, PartialEq)]
pub enum PottsModel {
    Standard { sites: Vec<String>, edges: Vec<(usize, usize)>, j: f64, q: u32 },
    Generalized {
        sites: Vec<String>,
        /// Keyed by (i, j, s_i, s_j) with i < j.
        j: BTreeMap<(usize, usize, u32, u32), f64>,
        h: BTreeMap<(usize, u32), f64>,
        q: u32,
    },
}

impl PottsModel {
    pub fn standard(num_sites: usize, edges: Vec<(usize, usize)>, j: f64, q: u32) -> Self {
        PottsModel::Standard {
            sites: (0..num_sites).map(|i| format!("s{i}")).collect(),
            edges,
            j,
            q,
        }
    }

    pub fn num_sites(&self) -> usize {
        match self {
            PottsModel::Standard { sites, .. } | PottsModel::Generalized { sites, .. } => {
                sites.len()
            }
        }
    }

    pub fn q(&self) -> u32 {
        match self {
            PottsModel::Standard { q, .. } | PottsModel::Generalized { q, .. } => *q,
        }
    }
}

// ---------------------------------------------------------------------------
// Direct WMC encoding of the classical Ising model

/// The direct counting instance: one variable per site, one per coupling,
/// with `x_ij <-> (x_i <-> x_j)` and exponential weights. Its count is the
/// partition function.
pub fn ising_direct(
    model: &IsingModel,
    beta: Beta,
    fresh: &mut VarSource,
) -> (BoolFormula, WeightFunction<Complex64>) {
    let b = beta.value();
    let site_vars: Vec<_> = fresh.fresh_many(model.num_sites());
    let mut weights = WeightFunction::new();
    for (i, &v) in site_vars.iter().enumerate() {
        let h = model.fields.get(&i).copied().unwrap_or(0.0);
        weights.insert(v, real(-(b * h)).exp(), real(b * h).exp());
    }
    let mut conj = Vec::new();
    for ((i, j), j_val) in model.couplings() {
        let e = fresh.fresh();
        weights.insert(e, real(-(b * j_val)).exp(), real(b * j_val).exp());
        conj.push(BoolFormula::iff(
            BoolFormula::var(e),
            BoolFormula::iff(BoolFormula::var(site_vars[i]), BoolFormula::var(site_vars[j])),
        ));
    }
    (BoolFormula::and(conj), weights)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// ---------------------------------------------------------------------------
// Expression builders

fn projector<F: Field>(state: u128, q: u32) -> Expr<F> {
    Expr::matmul(Expr::Ket(state, q), Expr::Bra(state, q))
}

/// The q x q identity, written as the sum of the basis projectors (the
/// language has no identity primitive).
pub fn identity_expr<F: Field>(q: u32) -> Expr<F> {
    Expr::matadd_chain((0..q as u128).map(|a| projector(a, q)))
}

/// A diagonal operator on `num_sites` q-state sites, acting on the listed
/// sites: the sum over their joint states of `weight(states)` times the
/// projector, padded with identities elsewhere. Site 0 is most significant.
pub fn lifted_diagonal<F: Field>(
    num_sites: usize,
    q: u32,
    involved: &[usize],
    weight: impl Fn(&[u32]) -> F,
) -> Expr<F> {
    assert!(!involved.is_empty(), "diagonal operator needs at least one site");
    let mut terms = Vec::new();
    let combos = (q as u64).pow(involved.len() as u32);
    for mut code in 0..combos {
        let mut states = vec![0u32; involved.len()];
        for slot in states.iter_mut().rev() {
            *slot = (code % q as u64) as u32;
            code /= q as u64;
        }
        let factors = (0..num_sites).map(|site| {
            match involved.iter().position(|&s| s == site) {
                Some(k) => projector(states[k] as u128, q),
                None => identity_expr(q),
            }
        });
        terms.push(Expr::scalmul(Expr::Const(weight(&states)), Expr::kron_chain(factors)));
    }
    Expr::matadd_chain(terms.into_iter())
}

/// The full identity on `num_sites` q-state sites.
fn identity_product<F: Field>(num_sites: usize, q: u32) -> Expr<F> {
    Expr::kron_chain((0..num_sites).map(|_| identity_expr(q)))
}

/// `tr(e^{-beta H_I})` as an expression: the product of per-coupling
/// `e^{beta J Z_i Z_j}` and per-site `e^{beta h Z_i}` diagonal factors.
pub fn ising_expr(model: &IsingModel, beta: Beta) -> Expr<Complex64> {
    let n = model.num_sites();
    let b = beta.value();
    let mut factors: Vec<Expr<Complex64>> = Vec::new();
    for ((i, j), j_val) in model.couplings() {
        // Z_i Z_j eigenvalue +1 on aligned spins (states 0/0 or 1/1).
        factors.push(lifted_diagonal(n, 2, &[i, j], |s| {
            let sign = if s[0] == s[1] { 1.0 } else { -1.0 };
            real(b * j_val * sign).exp()
        }));
    }
    for (i, h) in model.fields() {
        // Z eigenvalue +1 on state 0.
        factors.push(lifted_diagonal(n, 2, &[i], |s| {
            let sign = if s[0] == 0 { 1.0 } else { -1.0 };
            real(b * h * sign).exp()
        }));
    }
    if factors.is_empty() {
        factors.push(identity_product(n, 2));
    }
    Expr::trace(Expr::matmul_chain(factors.into_iter()))
}

/// One single-site Hadamard as an expression, including its `1/sqrt(2)`.
fn hadamard_expr() -> Expr<Complex64> {
    let outer = |i: u128, j: u128| Expr::matmul(Expr::Ket(i, 2), Expr::Bra(j, 2));
    let sum = Expr::matadd_chain(
        [
            outer(0, 0),
            outer(0, 1),
            outer(1, 0),
            Expr::scalmul(Expr::Const(real(-1.0)), outer(1, 1)),
        ]
        .into_iter(),
    );
    Expr::scalmul(Expr::Const(real(1.0 / 2.0f64.sqrt())), sum)
}

/// The k-step Trotter approximant of `tr(e^{-beta H_Q})`:
/// `tr((e^{-beta H_QZ / k} H^{⊗n} e^{-beta H'_QX / k} H^{⊗n})^k)`,
/// where the transverse part is diagonalized by the Hadamard tensor.
pub fn tfim_expr(model: &TfimModel, beta: Beta, k: u32) -> Expr<Complex64> {
    assert!(k >= 1, "at least one Trotter step");
    let n = model.num_sites();
    let b = beta.value() / k as f64;

    // e^{-beta H_QZ / k}: per-coupling and per-site diagonal factors.
    let mut z_part: Vec<Expr<Complex64>> = Vec::new();
    for ((i, j), j_val) in model.ising.couplings() {
        z_part.push(lifted_diagonal(n, 2, &[i, j], |s| {
            let sign = if s[0] == s[1] { 1.0 } else { -1.0 };
            real(b * j_val * sign).exp()
        }));
    }
    if model.mu_z != 0.0 {
        for i in 0..n {
            let mu = model.mu_z;
            z_part.push(lifted_diagonal(n, 2, &[i], |s| {
                let sign = if s[0] == 0 { 1.0 } else { -1.0 };
                real(b * mu * sign).exp()
            }));
        }
    }
    if z_part.is_empty() {
        z_part.push(identity_product(n, 2));
    }

    // e^{-beta H'_QX / k} with H'_QX = -mu_x * sum Z_i.
    let x_part: Expr<Complex64> = if model.mu_x != 0.0 {
        Expr::matmul_chain((0..n).map(|i| {
            let mu = model.mu_x;
            lifted_diagonal(n, 2, &[i], move |s| {
                let sign = if s[0] == 0 { 1.0 } else { -1.0 };
                real(b * mu * sign).exp()
            })
        }))
    } else {
        identity_product(n, 2)
    };

    let hadamards = Expr::kron_chain((0..n).map(|_| hadamard_expr()));

    let mut step = z_part;
    step.push(hadamards.clone());
    step.push(x_part);
    step.push(hadamards);
    let step = Expr::matmul_chain(step.into_iter());
    Expr::trace(Expr::matmul_chain((0..k).map(|_| step.clone())))
}

/// Standard Potts partition function as an expression: the trace of the
/// product over edges of diagonal factors with entry `e^{beta J}` on equal
/// neighbor states and 1 otherwise.
pub fn potts_expr(model: &PottsModel, beta: Beta) -> Expr<Complex64> {
    let PottsModel::Standard { sites, edges, j, q } = model else {
        panic!("potts_expr requires the standard variant");
    };
    let n = sites.len();
    let b = beta.value();
    let mut factors: Vec<Expr<Complex64>> = Vec::new();
    for &(a, c) in edges {
        factors.push(lifted_diagonal(n, *q, &[a, c], |s| {
            if s[0] == s[1] { real(b * j).exp() } else { real(1.0) }
        }));
    }
    if factors.is_empty() {
        factors.push(identity_product(n, *q));
    }
    Expr::trace(Expr::matmul_chain(factors.into_iter()))
}

/// Generalized Potts partition function: one single-entry diagonal factor
/// per nonzero coupling entry `J_ij(s_i, s_j)` and field entry `h_i(s_i)`.
pub fn potts_generalized_expr(model: &PottsModel, beta: Beta) -> Expr<Complex64> {
    let PottsModel::Generalized { sites, j, h, q } = model else {
        panic!("potts_generalized_expr requires the generalized variant");
    };
    let n = sites.len();
    let b = beta.value();
    let mut factors: Vec<Expr<Complex64>> = Vec::new();
    for (&(site_a, site_b, sa, sb), &val) in j {
        if val == 0.0 {
            continue;
        }
        factors.push(lifted_diagonal(n, *q, &[site_a, site_b], move |s| {
            if s == [sa, sb] { real(b * val).exp() } else { real(1.0) }
        }));
    }
    for (&(site, state), &val) in h {
        if val == 0.0 {
            continue;
        }
        factors.push(lifted_diagonal(n, *q, &[site], move |s| {
            if s[0] == state { real(b * val).exp() } else { real(1.0) }
        }));
    }
    if factors.is_empty() {
        factors.push(identity_product(n, *q));
    }
    Expr::trace(Expr::matmul_chain(factors.into_iter()))
}

// ---------------------------------------------------------------------------
// Brute-force oracles

/// Largest classical model the enumeration oracles accept.
pub const ORACLE_MAX_SITES: usize = 16;
/// Largest TFIM the dense-exponential oracle accepts.
pub const TFIM_ORACLE_MAX_SITES: usize = 12;

/// `Z` by enumerating all spin configurations.
pub fn ising_oracle(model: &IsingModel, beta: Beta) -> Result<f64, ModelError> {
    let n = model.num_sites();
    if n > ORACLE_MAX_SITES {
        return Err(ModelError::OracleTooLarge { sites: n, cap: ORACLE_MAX_SITES });
    }
    let b = beta.value();
    let mut z = 0.0;
    for config in 0u64..1 << n {
        let spin = |i: usize| if (config >> i) & 1 == 0 { 1.0 } else { -1.0 };
        let mut energy = 0.0;
        for ((i, j), j_val) in model.couplings() {
            energy -= j_val * spin(i) * spin(j);
        }
        for (i, h) in model.fields() {
            energy -= h * spin(i);
        }
        z += (-b * energy).exp();
    }
    Ok(z)
}

/// `Z = tr(e^{-beta H_Q})` via the dense matrix exponential.
pub fn tfim_oracle(model: &TfimModel, beta: Beta) -> Result<f64, ModelError> {
    let n = model.num_sites();
    if n > TFIM_ORACLE_MAX_SITES {
        return Err(ModelError::OracleTooLarge { sites: n, cap: TFIM_ORACLE_MAX_SITES });
    }
    let dim = 1usize << n;
    let mut h: DenseMatrix<Complex64> = DenseMatrix::zeros(dim, dim);
    // Z at site i reads bit (n - 1 - i): site 0 most significant.
    let spin = |index: usize, i: usize| {
        if (index >> (n - 1 - i)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    for index in 0..dim {
        let mut diag = 0.0;
        for ((i, j), j_val) in model.ising.couplings() {
            diag -= j_val * spin(index, i) * spin(index, j);
        }
        for i in 0..n {
            diag -= model.mu_z * spin(index, i);
        }
        h.set(index, index, real(diag));
        for i in 0..n {
            let flipped = index ^ (1 << (n - 1 - i));
            let prev = h.get(index, flipped).clone();
            h.set(index, flipped, prev + real(-model.mu_x));
        }
    }
    let z = dense_matexp(&h.scale(&real(-beta.value())), false)
        .expect("square by construction")
        .trace();
    Ok(z.re)
}

/// `Z` by enumerating all q-ary configurations.
pub fn potts_oracle(model: &PottsModel, beta: Beta) -> Result<f64, ModelError> {
    let n = model.num_sites();
    if n > ORACLE_MAX_SITES {
        return Err(ModelError::OracleTooLarge { sites: n, cap: ORACLE_MAX_SITES });
    }
    let q = model.q() as u64;
    let b = beta.value();
    let total = q.pow(n as u32);
    let mut z = 0.0;
    for mut code in 0..total {
        let mut s = vec![0u32; n];
        for slot in s.iter_mut() {
            *slot = (code % q) as u32;
            code /= q;
        }
        let mut energy = 0.0;
        match model {
            PottsModel::Standard { edges, j, .. } => {
                for &(a, c) in edges {
                    if s[a] == s[c] {
                        energy -= j;
                    }
                }
            }
            PottsModel::Generalized { j, h, .. } => {
                for (&(site_a, site_b, sa, sb), &val) in j {
                    if s[site_a] == sa && s[site_b] == sb {
                        energy -= val;
                    }
                }
                for (&(site, state), &val) in h {
                    if s[site] == state {
                        energy -= val;
                    }
                }
            }
        }
        z += (-b * energy).exp();
    }
    Ok(z)
}

/// Shape summary of a formula (counts per node type), a diagnostic for
/// comparing structurally similar encodings without asserting identity.
pub fn formula_shape(f: &BoolFormula) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::new();
    fn walk(f: &BoolFormula, out: &mut BTreeMap<&'static str, usize>) {
        let name = match f {
            BoolFormula::True => "true",
            BoolFormula::False => "false",
            BoolFormula::Lit(_) => "lit",
            BoolFormula::Not(_) => "not",
            BoolFormula::And(_) => "and",
            BoolFormula::Or(_) => "or",
            BoolFormula::Implies(_, _) => "implies",
            BoolFormula::Iff(_, _) => "iff",
        };
        *out.entry(name).or_default() += 1;
        match f {
            BoolFormula::Not(g) => walk(g, out),
            BoolFormula::And(cs) | BoolFormula::Or(cs) => {
                for c in cs {
                    walk(c, out);
                }
            }
            BoolFormula::Implies(a, b) | BoolFormula::Iff(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            _ => {}
        }
    }
    walk(f, &mut out);
    out
}
