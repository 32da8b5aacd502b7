//! Scenario documents: a TOML description of one triple plus the grids and
//! artifacts to produce from it.
//!
//! Complex numbers are `[re, im]`; matrices are lists of rows; `f1` and `f2`
//! are lists of columns, so `f1 = [[[1, 0], [0, 0]]]` is the single column
//! `(1, 0)^T`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::csvfmt::linspace;
use crate::error::{Error, Result};
use crate::matlin::{c64, CMatrix};
use crate::seed::{
    assemble_from_spec, Branch, GbdtTriple, JordanBlock, JordanSpec, MatrixSpec, SeedPotential,
    SystemKind,
};

/// `[re, im]`.
pub type Cplx = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: SystemKind,
    pub a: Cplx,
    #[serde(default)]
    pub c: f64,
    pub f1: Vec<Vec<Cplx>>,
    pub f2: Vec<Vec<Cplx>>,
    #[serde(rename = "S0", default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<Vec<Vec<Cplx>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<Cplx>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(rename = "A")]
    pub matrix: MatrixSection,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleMeta>,
}

/// Either `dense` rows or Jordan `blocks` (with an optional similarity).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<Vec<Cplx>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<Vec<Vec<Cplx>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSection {
    pub eigenvalue: Cplx,
    pub size: usize,
    #[serde(default)]
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default = "default_x")]
    pub x: GridSpec,
    #[serde(default = "default_xi")]
    pub xi: GridSpec,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            x: default_x(),
            xi: default_xi(),
        }
    }
}

fn default_x() -> GridSpec {
    GridSpec {
        start: -2.0,
        stop: 2.0,
        count: 101,
    }
}

fn default_xi() -> GridSpec {
    GridSpec {
        start: -1.0,
        stop: 1.0,
        count: 20,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    Potential,
    Weyl,
    Dynamical,
    Verify,
    Asymptotics,
}

impl Output {
    pub fn file_name(self) -> &'static str {
        match self {
            Output::Potential => "potential.csv",
            Output::Weyl => "weyl.csv",
            Output::Dynamical => "dynamical.csv",
            Output::Verify => "verify.csv",
            Output::Asymptotics => "asymptotics.csv",
        }
    }
}

fn default_outputs() -> Vec<Output> {
    vec![
        Output::Potential,
        Output::Weyl,
        Output::Dynamical,
        Output::Verify,
    ]
}

/// Which canned example produced the scenario and with which parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleMeta {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

fn field_err(field: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Scenario {
        field: field.into(),
        msg: msg.into(),
    }
}

fn cplx(v: Cplx) -> Complex64 {
    c64(v[0], v[1])
}

pub fn to_cplx(z: Complex64) -> Cplx {
    [z.re, z.im]
}

fn rows_to_matrix(rows: &[Vec<Cplx>], field: &str) -> Result<CMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || nc == 0 {
        return Err(field_err(field, "matrix must be nonempty"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != nc) {
        return Err(field_err(
            format!("{field}[{i}]"),
            format!("row has {} entries, expected {nc}", r.len()),
        ));
    }
    Ok(CMatrix::from_fn(nr, nc, |i, k| cplx(rows[i][k])))
}

fn columns_to_matrix(cols: &[Vec<Cplx>], field: &str) -> Result<CMatrix> {
    let nc = cols.len();
    let nr = cols.first().map_or(0, Vec::len);
    if nc == 0 || nr == 0 {
        return Err(field_err(field, "needs at least one nonempty column"));
    }
    if let Some((k, c)) = cols.iter().enumerate().find(|(_, c)| c.len() != nr) {
        return Err(field_err(
            format!("{field}[{k}]"),
            format!("column has {} entries, expected {nr}", c.len()),
        ));
    }
    Ok(CMatrix::from_fn(nr, nc, |i, k| cplx(cols[k][i])))
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Cplx>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|k| to_cplx(m[(i, k)])).collect())
        .collect()
}

pub fn matrix_to_columns(m: &CMatrix) -> Vec<Vec<Cplx>> {
    (0..m.ncols())
        .map(|k| (0..m.nrows()).map(|i| to_cplx(m[(i, k)])).collect())
        .collect()
}

/// Everything a triple needs, converted and dimension-checked.
#[derive(Debug, Clone)]
pub struct TripleInputs {
    pub spec: MatrixSpec,
    pub f1: CMatrix,
    pub f2: CMatrix,
    pub s0: Option<CMatrix>,
    pub seed: SeedPotential,
    pub kind: SystemKind,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario =
            toml::from_str(text).map_err(|e| field_err("document", e.to_string().trim_end()))?;
        s.inputs()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| field_err("document", e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Scenario::from_toml(&text).map_err(|e| match e {
            Error::Scenario { field, msg } => Error::Scenario {
                field,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        })
    }

    pub fn z_values(&self) -> Vec<Complex64> {
        self.z.iter().copied().map(cplx).collect()
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// Converts and cross-checks all dimensions without touching the engine.
    pub fn inputs(&self) -> Result<TripleInputs> {
        for (name, g) in [("grids.x", &self.grids.x), ("grids.xi", &self.grids.xi)] {
            if g.count == 0 || !g.start.is_finite() || !g.stop.is_finite() {
                return Err(field_err(name, "needs finite bounds and count >= 1"));
            }
        }
        if !self.c.is_finite() {
            return Err(field_err("c", "must be finite"));
        }
        let f1 = columns_to_matrix(&self.f1, "f1")?;
        let f2 = columns_to_matrix(&self.f2, "f2")?;
        if f1.shape() != f2.shape() {
            return Err(field_err(
                "f2",
                format!(
                    "is {}x{} but f1 is {}x{}",
                    f2.nrows(),
                    f2.ncols(),
                    f1.nrows(),
                    f1.ncols()
                ),
            ));
        }
        let (n, p) = f1.shape();
        let seed = SeedPotential::new(cplx(self.a), self.c, p).map_err(|e| e.in_field("a"))?;
        let spec = match (&self.matrix.dense, self.matrix.blocks.is_empty()) {
            (Some(rows), true) => {
                if self.matrix.similarity.is_some() {
                    return Err(field_err("A.similarity", "only allowed with Jordan blocks"));
                }
                MatrixSpec::Dense(rows_to_matrix(rows, "A.dense")?)
            }
            (None, false) => {
                let similarity = self
                    .matrix
                    .similarity
                    .as_ref()
                    .map(|r| rows_to_matrix(r, "A.similarity"))
                    .transpose()?;
                MatrixSpec::Jordan(JordanSpec {
                    blocks: self
                        .matrix
                        .blocks
                        .iter()
                        .map(|b| JordanBlock {
                            eigenvalue: cplx(b.eigenvalue),
                            size: b.size,
                            branch: b.branch,
                        })
                        .collect(),
                    similarity,
                })
            }
            _ => return Err(field_err("A", "give exactly one of `dense` or `blocks`")),
        };
        let a_n = match &spec {
            MatrixSpec::Dense(a) => {
                if a.nrows() != a.ncols() {
                    return Err(field_err("A.dense", "must be square"));
                }
                a.nrows()
            }
            MatrixSpec::Jordan(j) => {
                if let Some((i, _)) = j.blocks.iter().enumerate().find(|(_, b)| b.size == 0) {
                    return Err(field_err(format!("A.blocks[{i}].size"), "must be positive"));
                }
                if let Some(e) = &j.similarity {
                    if e.nrows() != j.n() || e.ncols() != j.n() {
                        return Err(field_err(
                            "A.similarity",
                            format!("must be {0}x{0} to match the blocks", j.n()),
                        ));
                    }
                }
                j.n()
            }
        };
        if a_n != n {
            return Err(field_err(
                "f1",
                format!("columns have {n} entries but A is {a_n}x{a_n}"),
            ));
        }
        let s0 = match &self.s0 {
            Some(rows) => {
                let m = rows_to_matrix(rows, "S0")?;
                if m.shape() != (n, n) {
                    return Err(field_err("S0", format!("must be {n}x{n}")));
                }
                Some(m)
            }
            None => None,
        };
        Ok(TripleInputs {
            spec,
            f1,
            f2,
            s0,
            seed,
            kind: self.kind,
        })
    }

    /// Builds the triple; engine failures name the scenario field at fault.
    pub fn triple(&self) -> Result<GbdtTriple> {
        let inp = self.inputs()?;
        let has_s0 = inp.s0.is_some();
        assemble_from_spec(&inp.spec, inp.f1, inp.f2, inp.seed, inp.kind, inp.s0).map_err(|e| {
            let field = match &e {
                Error::SupplyS0 { .. } => "S0",
                Error::Residual { what, .. } if what.contains("identity") && has_s0 => "S0",
                Error::Residual { what, .. } if what.contains("Hermitian") && has_s0 => "S0",
                Error::Shape { .. } => "f1",
                _ => "A",
            };
            e.in_field(field)
        })
    }
}
