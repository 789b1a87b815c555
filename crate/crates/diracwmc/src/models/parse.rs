//! Line-oriented model description files.
//!
//! The first non-blank line names the model kind. `#` starts a comment,
//! blank lines are skipped, and sites are referenced by name.
//!
//! ```text
//! ising                # or tfim / potts
//! site a
//! site b
//! coupling a b 1.0     # ising / tfim
//! field a 0.5          # ising
//! mu_z 0.0             # tfim
//! mu_x 1.0             # tfim
//! q 3                  # potts
//! edge a b             # standard potts
//! J 4.0                # standard potts
//! Jgen a b 0 1 2.0     # generalized potts: J_ab(0, 1) = 2.0
//! hgen a 0 0.5         # generalized potts: h_a(0) = 0.5
//! ```

use std::collections::BTreeMap;

use super::{IsingModel, ModelError, PottsModel, TfimModel};

/// A parsed model description.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelFile {
    Ising(IsingModel),
    Tfim(TfimModel),
    Potts(PottsModel),
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(idx, raw)| {
                let body = raw.split('#').next().unwrap_or("");
                let tokens: Vec<_> = body.split_whitespace().collect();
                if tokens.is_empty() {
                    None
                } else {
                    Some((idx + 1, tokens))
                }
            })
            .collect();
        Lines { items, pos: 0 }
    }

    fn next(&mut self) -> Option<&(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos);
        self.pos += 1;
        item
    }
}

fn err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse { line, message: message.into() }
}

fn number(line: usize, token: &str) -> Result<f64, ModelError> {
    token.parse::<f64>().map_err(|_| err(line, format!("bad number `{token}`")))
}

fn integer<T: std::str::FromStr>(line: usize, token: &str) -> Result<T, ModelError> {
    token.parse::<T>().map_err(|_| err(line, format!("bad integer `{token}`")))
}

fn site_index(line: usize, sites: &[String], name: &str) -> Result<usize, ModelError> {
    sites
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| err(line, format!("unknown site `{name}`")))
}

fn expect_arity(line: usize, tokens: &[&str], n: usize) -> Result<(), ModelError> {
    if tokens.len() == n + 1 {
        Ok(())
    } else {
        Err(err(line, format!("`{}` takes {n} argument(s)", tokens[0])))
    }
}

/// Parses a model description file.
pub fn parse_model(text: &str) -> Result<ModelFile, ModelError> {
    let mut lines = Lines::new(text);
    let Some((header_line, header)) = lines.next().cloned() else {
        return Err(err(1, "empty model file"));
    };
    if header.len() != 1 {
        return Err(err(header_line, "the header line holds only the model kind"));
    }
    match header[0] {
        "ising" => parse_ising(lines).map(ModelFile::Ising),
        "tfim" => parse_tfim(lines).map(ModelFile::Tfim),
        "potts" => parse_potts(lines).map(ModelFile::Potts),
        other => Err(err(header_line, format!("unknown model kind `{other}`"))),
    }
}

fn parse_ising(mut lines: Lines<'_>) -> Result<IsingModel, ModelError> {
    let mut model = IsingModel::with_sites(Vec::new());
    while let Some((line, tokens)) = lines.next().cloned() {
        match tokens[0] {
            "site" => {
                expect_arity(line, &tokens, 1)?;
                add_site(line, &mut model.sites, tokens[1])?;
            }
            "coupling" => {
                expect_arity(line, &tokens, 3)?;
                let a = site_index(line, &model.sites, tokens[1])?;
                let b = site_index(line, &model.sites, tokens[2])?;
                let j = number(line, tokens[3])?;
                model.set_coupling(a, b, j).map_err(|e| err(line, e.to_string()))?;
            }
            "field" => {
                expect_arity(line, &tokens, 2)?;
                let a = site_index(line, &model.sites, tokens[1])?;
                let h = number(line, tokens[2])?;
                model.set_field(a, h).map_err(|e| err(line, e.to_string()))?;
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok(model)
}

fn parse_tfim(mut lines: Lines<'_>) -> Result<TfimModel, ModelError> {
    let mut model = TfimModel { ising: IsingModel::with_sites(Vec::new()), mu_z: 0.0, mu_x: 0.0 };
    while let Some((line, tokens)) = lines.next().cloned() {
        match tokens[0] {
            "site" => {
                expect_arity(line, &tokens, 1)?;
                add_site(line, &mut model.ising.sites, tokens[1])?;
            }
            "coupling" => {
                expect_arity(line, &tokens, 3)?;
                let a = site_index(line, &model.ising.sites, tokens[1])?;
                let b = site_index(line, &model.ising.sites, tokens[2])?;
                let j = number(line, tokens[3])?;
                model.ising.set_coupling(a, b, j).map_err(|e| err(line, e.to_string()))?;
            }
            "mu_z" => {
                expect_arity(line, &tokens, 1)?;
                model.mu_z = number(line, tokens[1])?;
            }
            "mu_x" => {
                expect_arity(line, &tokens, 1)?;
                model.mu_x = number(line, tokens[1])?;
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok(model)
}

fn parse_potts(mut lines: Lines<'_>) -> Result<PottsModel, ModelError> {
    let mut sites: Vec<String> = Vec::new();
    let mut q: Option<u32> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut j_std: Option<f64> = None;
    let mut j_gen: BTreeMap<(usize, usize, u32, u32), f64> = BTreeMap::new();
    let mut h_gen: BTreeMap<(usize, u32), f64> = BTreeMap::new();
    let mut last_line = 1;
    while let Some((line, tokens)) = lines.next().cloned() {
        last_line = line;
        match tokens[0] {
            "site" => {
                expect_arity(line, &tokens, 1)?;
                add_site(line, &mut sites, tokens[1])?;
            }
            "q" => {
                expect_arity(line, &tokens, 1)?;
                let v: u32 = integer(line, tokens[1])?;
                if v < 2 {
                    return Err(err(line, "q must be at least 2"));
                }
                q = Some(v);
            }
            "edge" => {
                expect_arity(line, &tokens, 2)?;
                let a = site_index(line, &sites, tokens[1])?;
                let b = site_index(line, &sites, tokens[2])?;
                if a == b {
                    return Err(err(line, "edge endpoints must differ"));
                }
                edges.push((a.min(b), a.max(b)));
            }
            "J" => {
                expect_arity(line, &tokens, 1)?;
                j_std = Some(number(line, tokens[1])?);
            }
            "Jgen" => {
                expect_arity(line, &tokens, 5)?;
                let a = site_index(line, &sites, tokens[1])?;
                let b = site_index(line, &sites, tokens[2])?;
                if a == b {
                    return Err(err(line, "coupling endpoints must differ"));
                }
                let sa: u32 = integer(line, tokens[3])?;
                let sb: u32 = integer(line, tokens[4])?;
                let v = number(line, tokens[5])?;
                let key = if a < b { (a, b, sa, sb) } else { (b, a, sb, sa) };
                j_gen.insert(key, v);
            }
            "hgen" => {
                expect_arity(line, &tokens, 3)?;
                let a = site_index(line, &sites, tokens[1])?;
                let s: u32 = integer(line, tokens[2])?;
                let v = number(line, tokens[3])?;
                h_gen.insert((a, s), v);
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    let q = q.ok_or_else(|| err(last_line, "potts model needs a `q` line"))?;
    let generalized = !j_gen.is_empty() || !h_gen.is_empty();
    if generalized && (!edges.is_empty() || j_std.is_some()) {
        return Err(err(
            last_line,
            "mixing standard (`edge`/`J`) and generalized (`Jgen`/`hgen`) directives",
        ));
    }
    if generalized {
        for &(_, _, sa, sb) in j_gen.keys() {
            for s in [sa, sb] {
                if s >= q {
                    return Err(err(last_line, format!("state {s} out of range for q = {q}")));
                }
            }
        }
        for &(_, s) in h_gen.keys() {
            if s >= q {
                return Err(err(last_line, format!("state {s} out of range for q = {q}")));
            }
        }
        Ok(PottsModel::Generalized { sites, j: j_gen, h: h_gen, q })
    } else {
        let j = j_std.ok_or_else(|| err(last_line, "standard potts model needs a `J` line"))?;
        Ok(PottsModel::Standard { sites, edges, j, q })
    }
}

fn add_site(line: usize, sites: &mut Vec<String>, name: &str) -> Result<(), ModelError> {
    if sites.iter().any(|s| s == name) {
        return Err(err(line, format!("duplicate site `{name}`")));
    }
    sites.push(name.to_string());
    Ok(())
}
