//! File formats: graph interchange JSON, matrix JSON, homology tables,
//! structure-constants files and DOT export.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::connection::Connection;
use crate::graph::{GradedGraph, Graph};
use crate::homology::{AbelianGroup, ChainGraph, Coefficients, HomologyTable};
use crate::matrix::{IntMatrix, RepMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: String,
    #[serde(default)]
    pub grade: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: String,
    pub v: String,
    #[serde(default)]
    pub nu: Option<i64>,
}

/// Graph interchange format; grades and connection values are optional at
/// this layer and validated by whichever operation needs them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph, grades: Option<&[i64]>, nu: Option<&Connection>) -> Self {
        GraphFile {
            vertices: (0..g.len())
                .map(|v| VertexEntry {
                    id: g.id(v).to_string(),
                    grade: grades.map(|gr| gr[v]),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|&(u, v)| EdgeEntry {
                    u: g.id(u).to_string(),
                    v: g.id(v).to_string(),
                    nu: nu.map(|c| c.value(u, v)),
                })
                .collect(),
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn graph(&self) -> Result<Graph> {
        Graph::new(
            self.vertices.iter().map(|v| v.id.clone()),
            self.edges.iter().map(|e| (e.u.clone(), e.v.clone())),
        )
    }

    /// The gradation, when every vertex carries one.
    pub fn grades(&self) -> Result<Option<Vec<i64>>> {
        let present = self.vertices.iter().filter(|v| v.grade.is_some()).count();
        if present == 0 {
            return Ok(None);
        }
        if present < self.vertices.len() {
            return Err(Error::input("some vertices carry a grade and some do not"));
        }
        Ok(Some(
            self.vertices.iter().map(|v| v.grade.unwrap()).collect(),
        ))
    }

    pub fn graded_graph(&self) -> Result<GradedGraph> {
        let g = self.graph()?;
        let grades = self
            .grades()?
            .ok_or_else(|| Error::input("file carries no grades"))?;
        GradedGraph::new(g, grades)
    }

    /// The connection, when every edge carries a value.
    pub fn connection(&self, g: &Graph) -> Result<Option<Connection>> {
        let present = self.edges.iter().filter(|e| e.nu.is_some()).count();
        if present == 0 {
            return Ok(None);
        }
        if present < self.edges.len() {
            return Err(Error::input(
                "some edges carry a connection value and some do not",
            ));
        }
        Ok(Some(Connection::from_triples(
            g,
            self.edges
                .iter()
                .map(|e| (e.u.clone(), e.v.clone(), e.nu.unwrap())),
        )?))
    }

    pub fn chain_graph(&self) -> Result<ChainGraph> {
        let gg = self.graded_graph()?;
        let nu = self
            .connection(gg.graph())?
            .ok_or_else(|| Error::input("file carries no connection values"))?;
        ChainGraph::new(gg, nu)
    }
}

/// DOT export: vertices labeled "id:grade" when graded, undirected edges
/// labeled by their connection value when present.
pub fn to_dot(g: &Graph, grades: Option<&[i64]>, nu: Option<&Connection>) -> String {
    let mut out = String::from("graph {\n");
    for v in 0..g.len() {
        let label = match grades {
            Some(gr) => format!("{}:{}", g.id(v), gr[v]),
            None => g.id(v).to_string(),
        };
        out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", g.id(v), label));
    }
    for &(u, v) in g.edges() {
        match nu {
            Some(c) => out.push_str(&format!(
                "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
                g.id(u),
                g.id(v),
                c.value(u, v)
            )),
            None => out.push_str(&format!("  \"{}\" -- \"{}\";\n", g.id(u), g.id(v))),
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: Vec<Vec<i64>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl MatrixFile {
    pub fn from_rep(rep: &RepMatrix) -> Result<Self> {
        let mut rows = Vec::with_capacity(rep.mat.nrows());
        for i in 0..rep.mat.nrows() {
            let mut row = Vec::with_capacity(rep.mat.ncols());
            for j in 0..rep.mat.ncols() {
                row.push(i64::try_from(rep.mat.get(i, j)).map_err(|_| {
                    Error::input(format!("entry ({i},{j}) does not fit a 64-bit integer"))
                })?);
            }
            rows.push(row);
        }
        Ok(MatrixFile {
            rows,
            row_labels: rep.row_labels.clone(),
            col_labels: rep.col_labels.clone(),
        })
    }

    pub fn to_rep(&self) -> Result<RepMatrix> {
        RepMatrix::new(
            IntMatrix::from_i64_rows(&self.rows)?,
            self.row_labels.clone(),
            self.col_labels.clone(),
        )
    }
}

/// Aligned-column rendering for terminal output.
pub fn render_matrix(rep: &RepMatrix) -> String {
    let cells: Vec<Vec<String>> = (0..rep.mat.nrows())
        .map(|i| {
            (0..rep.mat.ncols())
                .map(|j| rep.mat.get(i, j).to_string())
                .collect()
        })
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    cells
        .iter()
        .map(|row| {
            let body = row
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect::<Vec<_>>()
                .join(" ");
            format!("[ {body} ]")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupEntry {
    pub free: usize,
    pub torsion: Vec<serde_json::Number>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomologyTableFile {
    pub coeff: String,
    pub groups: BTreeMap<String, GroupEntry>,
}

impl HomologyTableFile {
    pub fn from_table(t: &HomologyTable) -> Self {
        HomologyTableFile {
            coeff: t.coefficients.to_string(),
            groups: t
                .groups()
                .iter()
                .map(|(d, g)| {
                    (
                        d.to_string(),
                        GroupEntry {
                            free: g.free_rank,
                            torsion: g
                                .torsion
                                .iter()
                                .map(|x| {
                                    serde_json::Number::from_str(&x.to_string())
                                        .expect("integer literal")
                                })
                                .collect(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<HomologyTable> {
        let coefficients = match self.coeff.as_str() {
            "Z" => Coefficients::Integers,
            "Q" => Coefficients::Rationals,
            other => {
                let p = other
                    .strip_prefix("Fp:")
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| Error::input(format!("unknown coefficients {other:?}")))?;
                Coefficients::PrimeField(p)
            }
        };
        let mut groups = BTreeMap::new();
        for (d, entry) in &self.groups {
            let degree: i64 = d
                .parse()
                .map_err(|_| Error::input(format!("bad degree key {d:?}")))?;
            let torsion = entry
                .torsion
                .iter()
                .map(|n| {
                    BigInt::from_str(&n.to_string())
                        .map_err(|_| Error::input(format!("bad torsion value {n}")))
                })
                .collect::<Result<Vec<_>>>()?;
            groups.insert(degree, AbelianGroup::from_divisors(entry.free, torsion));
        }
        Ok(HomologyTable::new(coefficients, groups))
    }
}

/// Renders a homology table as "H_k = ..." lines, nonzero degrees only.
/// Over a field the groups are vector spaces and render as powers of the
/// field.
pub fn render_homology(t: &HomologyTable) -> String {
    if t.groups().is_empty() {
        return "all groups zero".to_string();
    }
    let field = match t.coefficients {
        Coefficients::Integers => None,
        Coefficients::Rationals => Some("Q".to_string()),
        Coefficients::PrimeField(p) => Some(format!("F{p}")),
    };
    t.groups()
        .iter()
        .map(|(d, g)| match &field {
            None => format!("H_{d} = {g}"),
            Some(f) if g.free_rank == 1 => format!("H_{d} = {f}"),
            Some(f) => format!("H_{d} = {f}^{}", g.free_rank),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermEntry {
    pub c: i64,
    pub z: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketEntry {
    pub x: String,
    pub y: String,
    pub terms: Vec<TermEntry>,
}

/// Structure-constants file; omitted pairs mean a zero bracket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureConstantsFile {
    pub symbols: Vec<String>,
    pub brackets: Vec<BracketEntry>,
}

impl StructureConstantsFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
