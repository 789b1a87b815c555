//! Compile typed Dirac-notation matrix expressions into weighted model
//! counting instances, count them exactly, and export them for external
//! counters. Includes front-ends that build partition-function instances
//! for Ising, transverse-field Ising, and Potts models.

pub mod encodings;
pub mod field;
pub mod lang;
pub mod models;
pub mod rep;
pub mod value;
pub mod wmc;

pub use encodings::{EncodingError, EncodingKind, EncodingString, QStateEncoding};
pub use field::{rel_dist, Field};
pub use lang::{parse, typecheck, Endomorphism, Expr, ExprType, ParseError, TypeError};
pub use models::{
    formula_shape, generate_lattice, generate_random_graph, identity_expr, ising_direct,
    ising_expr, ising_oracle, lifted_diagonal, parse_model, potts_expr, potts_generalized_expr,
    potts_oracle, tfim_expr, tfim_oracle, Beta, CouplingDist, IsingModel, ModelError, ModelFile,
    PottsModel, TfimModel, ORACLE_MAX_SITES, TFIM_ORACLE_MAX_SITES,
};
pub use rep::{
    compile, const_rep, export_matrix_rep, export_scalar_rep, normalize_matrix, normalize_scalar,
    rep_matrix_entry, rep_matrix_value, rep_scalar_value, CompileError, CompileOptions, MatrixRep,
    Rep, ScalarRep,
};
pub use value::{
    dense_matexp, eval_value, format_field, format_matrix, format_real, DenseMatrix, EvalError,
    Value,
};
pub use wmc::{
    evaluate, export_wcnf, parse_wcnf, rename_fresh, to_cnf, wmc_count, wmc_count_with_cap,
    wmc_top, Assignment, BoolFormula, CnfFormula, Literal, VarSource, Variable, WcnfDialect,
    WcnfInstance, WeightFunction, WmcError, DEFAULT_COMPONENT_CAP,
};

/// Complex scalar used by the physics front-ends and the default pipeline.
pub type C64 = num_complex::Complex64;
