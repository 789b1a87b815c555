//! Weighted CNF text format, export and import.
//!
//! The native dialect extends DIMACS CNF with one `w <var> <w_true> <w_false>`
//! line per weighted variable. The alternative dialect writes weights as
//! `c p weight <lit> <w>` comment lines (one per polarity) for counters that
//! expect that convention. Only real weights can be exported; numbers are
//! printed with the shortest representation that round-trips.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::field::Field;
use crate::wmc::{CnfFormula, Literal, Variable, VarSource, WeightFunction, WmcError};

/// Output dialect for [`export_wcnf`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcnfDialect {
    /// `w <var> <w_true> <w_false>` lines.
    Native,
    /// `c p weight <lit> <w>` lines, both polarities.
    DpmcStyle,
}

/// A parsed weighted CNF instance.
///
/// `input_strings` and `output_strings` hold the variable groups of any
/// `c x <index> <vars...>` / `c y <index> <vars...>` annotation lines,
/// ordered by index. They are empty for plain scalar instances.
#[derive(Clone, Debug)]
pub struct WcnfInstance<F: Field> {
    pub cnf: CnfFormula,
    pub weights: WeightFunction<F>,
    pub input_strings: Vec<Vec<Variable>>,
    pub output_strings: Vec<Vec<Variable>>,
}

impl<F: Field> WcnfInstance<F> {
    /// A variable source positioned after every id used by the instance.
    pub fn var_source(&self) -> VarSource {
        let mut max = self.cnf.num_vars;
        for v in self.weights.domain() {
            max = max.max(v.id());
        }
        VarSource::starting_after(max)
    }
}

/// Serializes an instance. The variable count in the header covers both the
/// clause variables and the weight domain.
pub fn export_wcnf<F: Field>(
    cnf: &CnfFormula,
    weights: &WeightFunction<F>,
    dialect: WcnfDialect,
) -> Result<String, WmcError> {
    let mut num_vars = cnf.num_vars;
    for v in weights.domain() {
        num_vars = num_vars.max(v.id());
    }

    let mut out = String::new();
    writeln!(out, "p cnf {} {}", num_vars, cnf.clauses.len()).unwrap();
    for (v, (w0, w1)) in weights.iter() {
        if w0.imag() != F::Real::zero() || w1.imag() != F::Real::zero() {
            return Err(WmcError::ComplexWeight(v));
        }
        match dialect {
            WcnfDialect::Native => {
                writeln!(out, "w {} {} {}", v, w1.real(), w0.real()).unwrap();
            }
            WcnfDialect::DpmcStyle => {
                writeln!(out, "c p weight {} {}", v, w1.real()).unwrap();
                writeln!(out, "c p weight -{} {}", v, w0.real()).unwrap();
            }
        }
    }
    for clause in &cnf.clauses {
        for lit in clause {
            if lit.positive {
                write!(out, "{} ", lit.var).unwrap();
            } else {
                write!(out, "-{} ", lit.var).unwrap();
            }
        }
        out.push_str("0\n");
    }
    Ok(out)
}

/// Parses the native dialect. Unrecognized comment lines are ignored;
/// `c x` / `c y` annotation lines are collected into the string tables.
pub fn parse_wcnf<F: Field>(text: &str) -> Result<WcnfInstance<F>, WmcError> {
    let mut header: Option<(u32, usize)> = None;
    let mut weights = WeightFunction::new();
    let mut clauses = Vec::new();
    let mut inputs: Vec<(usize, Vec<Variable>)> = Vec::new();
    let mut outputs: Vec<(usize, Vec<Variable>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: &str| WmcError::ParseError { line, message: message.to_string() };
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            ["c", "x" | "y", rest @ ..] => {
                if rest.len() < 2 {
                    return Err(err("string annotation needs an index and variables"));
                }
                let index: usize =
                    rest[0].parse().map_err(|_| err("malformed string index"))?;
                let vars = rest[1..]
                    .iter()
                    .map(|t| parse_var(t).ok_or_else(|| err("malformed variable id")))
                    .collect::<Result<Vec<_>, _>>()?;
                if tokens[1] == "x" {
                    inputs.push((index, vars));
                } else {
                    outputs.push((index, vars));
                }
            }
            ["c", ..] => {}
            ["p", "cnf", nv, nc] => {
                if header.is_some() {
                    return Err(err("duplicate problem line"));
                }
                let nv = nv.parse().map_err(|_| err("malformed variable count"))?;
                let nc = nc.parse().map_err(|_| err("malformed clause count"))?;
                header = Some((nv, nc));
            }
            ["p", ..] => return Err(err("malformed problem line")),
            ["w", v, w1, w0] => {
                let v = parse_var(v).ok_or_else(|| err("malformed variable id"))?;
                let w1: f64 = w1.parse().map_err(|_| err("malformed weight"))?;
                let w0: f64 = w0.parse().map_err(|_| err("malformed weight"))?;
                if weights.contains(v) {
                    return Err(err("duplicate weight line"));
                }
                weights.insert(v, F::from_f64(w0), F::from_f64(w1));
            }
            ["w", ..] => return Err(err("weight line needs a variable and two weights")),
            lits => {
                if header.is_none() {
                    return Err(err("clause before problem line"));
                }
                let mut clause = Vec::new();
                let mut terminated = false;
                for (i, t) in lits.iter().enumerate() {
                    let n: i64 = t.parse().map_err(|_| err("malformed literal"))?;
                    if n == 0 {
                        if i + 1 != lits.len() {
                            return Err(err("literals after clause terminator"));
                        }
                        terminated = true;
                    } else {
                        let var = Variable::new(n.unsigned_abs().try_into()
                            .map_err(|_| err("variable id out of range"))?);
                        clause.push(Literal { var, positive: n > 0 });
                    }
                }
                if !terminated {
                    return Err(err("clause not terminated by 0"));
                }
                clauses.push(clause);
            }
        }
    }

    let (num_vars, num_clauses) =
        header.ok_or(WmcError::ParseError { line: 0, message: "missing problem line".into() })?;
    if clauses.len() != num_clauses {
        return Err(WmcError::ParseError {
            line: 0,
            message: format!("expected {} clauses, found {}", num_clauses, clauses.len()),
        });
    }

    inputs.sort_by_key(|(i, _)| *i);
    outputs.sort_by_key(|(i, _)| *i);
    Ok(WcnfInstance {
        cnf: CnfFormula { num_vars, clauses },
        weights,
        input_strings: inputs.into_iter().map(|(_, v)| v).collect(),
        output_strings: outputs.into_iter().map(|(_, v)| v).collect(),
    })
}

fn parse_var(token: &str) -> Option<Variable> {
    let id: u32 = token.parse().ok()?;
    (id > 0).then(|| Variable::new(id))
}
