//! Free-format MPS export and a matching reader.
//!
//! Binaries are written inside `INTORG`/`INTEND` marker pairs with `BV`
//! bounds. Numbers use Rust's shortest round-trip formatting, so a written
//! model reads back with bit-identical coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::milp::{MilpModel, ModelError, Sense, VarId, VarKind};

const OBJ_ROW: &str = "OBJ";

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("name `{0}` cannot be written to MPS")]
    UnencodableName(String),
    #[error("MPS line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported MPS feature: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn check_name(name: &str) -> Result<(), MpsError> {
    let bad = name.is_empty()
        || name == OBJ_ROW
        || name.starts_with('$')
        || name.starts_with('*')
        || name.chars().any(|c| c.is_whitespace() || !c.is_ascii_graphic());
    if bad {
        Err(MpsError::UnencodableName(name.to_string()))
    } else {
        Ok(())
    }
}

/// Renders `model` as free-format MPS.
pub fn write_mps(model: &MilpModel) -> Result<String, MpsError> {
    let name = if model.name.is_empty() { "model" } else { model.name.as_str() };
    check_name(name)?;
    for v in model.variables() {
        check_name(&v.name)?;
    }
    for c in model.constraints() {
        check_name(&c.name)?;
    }

    // column-wise entries, duplicates within a row merged
    let mut columns: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); model.num_vars()];
    for (i, c) in model.constraints().iter().enumerate() {
        for &(v, a) in &c.terms {
            *columns[v.0].entry(i).or_insert(0.0) += a;
        }
    }

    let mut out = String::new();
    writeln!(out, "NAME {name}").unwrap();
    out.push_str("ROWS\n");
    writeln!(out, " N  {OBJ_ROW}").unwrap();
    for c in model.constraints() {
        let tag = match c.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        writeln!(out, " {tag}  {}", c.name).unwrap();
    }

    out.push_str("COLUMNS\n");
    let mut in_marker = false;
    let mut marker = 0;
    let objective = model.objective();
    for (j, var) in model.variables().iter().enumerate() {
        let int = var.kind == VarKind::Binary;
        if int != in_marker {
            let tag = if int { "INTORG" } else { "INTEND" };
            writeln!(out, "    MARKER{marker} 'MARKER' '{tag}'").unwrap();
            if !int {
                marker += 1;
            }
            in_marker = int;
        }
        let col = &columns[j];
        if objective[j] != 0.0 || col.is_empty() {
            writeln!(out, "    {} {OBJ_ROW} {}", var.name, objective[j]).unwrap();
        }
        for (&i, &a) in col {
            writeln!(out, "    {} {} {}", var.name, model.constraints()[i].name, a).unwrap();
        }
    }
    if in_marker {
        writeln!(out, "    MARKER{marker} 'MARKER' 'INTEND'").unwrap();
    }

    out.push_str("RHS\n");
    for c in model.constraints() {
        if c.rhs != 0.0 {
            writeln!(out, "    RHS {} {}", c.name, c.rhs).unwrap();
        }
    }

    out.push_str("BOUNDS\n");
    for var in model.variables() {
        let (lo, hi) = (var.lower, var.upper);
        let n = &var.name;
        if var.kind == VarKind::Binary && lo == 0.0 && hi == 1.0 {
            writeln!(out, " BV BND {n}").unwrap();
            continue;
        }
        if lo == hi {
            writeln!(out, " FX BND {n} {lo}").unwrap();
            continue;
        }
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => writeln!(out, " FR BND {n}").unwrap(),
            (false, true) => {
                writeln!(out, " MI BND {n}").unwrap();
                writeln!(out, " UP BND {n} {hi}").unwrap();
            }
            (true, _) => {
                if lo != 0.0 || (hi.is_finite() && hi < 0.0) {
                    writeln!(out, " LO BND {n} {lo}").unwrap();
                }
                if hi.is_finite() {
                    writeln!(out, " UP BND {n} {hi}").unwrap();
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

pub fn export_mps(model: &MilpModel, path: impl AsRef<Path>) -> Result<(), MpsError> {
    std::fs::write(path, write_mps(model)?)?;
    Ok(())
}

pub fn import_mps(path: impl AsRef<Path>) -> Result<MilpModel, MpsError> {
    read_mps(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

struct Col {
    name: String,
    integer: bool,
    cost: f64,
    lower: f64,
    upper: f64,
    binary_bound: bool,
}

/// Parses free-format MPS into a model. Objective constants, `RANGES` and
/// general integers are rejected.
pub fn read_mps(text: &str) -> Result<MilpModel, MpsError> {
    let mut name = String::from("model");
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut rows: Vec<(String, Sense)> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut row_terms: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut cols: Vec<Col> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut in_int = false;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let err = |msg: String| MpsError::Parse { line, msg };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('*') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            section = match tokens[0] {
                "NAME" => {
                    if let Some(n) = tokens.get(1) {
                        name = n.to_string();
                    }
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "RANGES" => return Err(MpsError::Unsupported("RANGES section".into())),
                "ENDATA" => Section::End,
                other => return Err(err(format!("unknown section `{other}`"))),
            };
            continue;
        }
        let number = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
        match section {
            Section::Rows => {
                let [kind, rname] = tokens[..] else {
                    return Err(err("expected `<type> <name>`".into()));
                };
                let sense = match kind {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(rname.to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    other => return Err(err(format!("unknown row type `{other}`"))),
                };
                if row_index.insert(rname.to_string(), rows.len()).is_some() {
                    return Err(err(format!("duplicate row `{rname}`")));
                }
                rows.push((rname.to_string(), sense));
                row_terms.push(Vec::new());
                rhs.push(0.0);
            }
            Section::Columns => {
                if tokens.len() == 3 && tokens[1].trim_matches('\'') == "MARKER" {
                    match tokens[2].trim_matches('\'') {
                        "INTORG" => in_int = true,
                        "INTEND" => in_int = false,
                        other => return Err(err(format!("unknown marker `{other}`"))),
                    }
                    continue;
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(err("expected `<col> <row> <value> [<row> <value>]`".into()));
                }
                let cname = tokens[0];
                let j = match col_index.get(cname) {
                    Some(&j) => j,
                    None => {
                        col_index.insert(cname.to_string(), cols.len());
                        cols.push(Col {
                            name: cname.to_string(),
                            integer: in_int,
                            cost: 0.0,
                            lower: 0.0,
                            upper: f64::INFINITY,
                            binary_bound: false,
                        });
                        cols.len() - 1
                    }
                };
                for pair in tokens[1..].chunks(2) {
                    let value = number(pair[1])?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        cols[j].cost += value;
                    } else {
                        let &i = row_index
                            .get(pair[0])
                            .ok_or_else(|| err(format!("unknown row `{}`", pair[0])))?;
                        row_terms[i].push((j, value));
                    }
                }
            }
            Section::Rhs => {
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(err("expected `<set> <row> <value> [<row> <value>]`".into()));
                }
                for pair in tokens[1..].chunks(2) {
                    let value = number(pair[1])?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        return Err(MpsError::Unsupported("objective constant in RHS".into()));
                    }
                    let &i = row_index
                        .get(pair[0])
                        .ok_or_else(|| err(format!("unknown row `{}`", pair[0])))?;
                    rhs[i] = value;
                }
            }
            Section::Bounds => {
                if tokens.len() < 3 {
                    return Err(err("expected `<type> <set> <col> [<value>]`".into()));
                }
                let &j = col_index
                    .get(tokens[2])
                    .ok_or_else(|| err(format!("unknown column `{}`", tokens[2])))?;
                let value = || -> Result<f64, MpsError> {
                    let s = tokens.get(3).ok_or_else(|| err("missing bound value".into()))?;
                    number(s)
                };
                let col = &mut cols[j];
                match tokens[0] {
                    "UP" => col.upper = value()?,
                    "LO" => col.lower = value()?,
                    "FX" => {
                        let v = value()?;
                        col.lower = v;
                        col.upper = v;
                    }
                    "FR" => {
                        col.lower = f64::NEG_INFINITY;
                        col.upper = f64::INFINITY;
                    }
                    "MI" => col.lower = f64::NEG_INFINITY,
                    "PL" => col.upper = f64::INFINITY,
                    "BV" => {
                        col.lower = 0.0;
                        col.upper = 1.0;
                        col.binary_bound = true;
                        col.integer = true;
                    }
                    other => return Err(MpsError::Unsupported(format!("bound type `{other}`"))),
                }
            }
            Section::None | Section::End => return Err(err("data outside a section".into())),
        }
    }
    if section != Section::End {
        return Err(MpsError::Parse { line: text.lines().count(), msg: "missing ENDATA".into() });
    }

    let mut model = MilpModel::new(name);
    for col in &cols {
        let binary = col.integer && (col.binary_bound || (col.lower >= 0.0 && col.upper <= 1.0));
        if col.integer && !binary {
            return Err(MpsError::Unsupported(format!("general integer column `{}`", col.name)));
        }
        let kind = if binary { VarKind::Binary } else { VarKind::Continuous };
        let id = model.add_variable(col.name.clone(), kind, col.lower, col.upper)?;
        model.set_objective_coeff(id, col.cost)?;
    }
    for (i, (rname, sense)) in rows.into_iter().enumerate() {
        let mut terms = std::mem::take(&mut row_terms[i]);
        terms.sort_by_key(|&(j, _)| j);
        let terms = terms.into_iter().map(|(j, a)| (VarId(j), a)).collect();
        model.add_constraint(rname, terms, sense, rhs[i])?;
    }
    Ok(model)
}
