//! Python bindings: graphs with gradations and connections, their
//! homology, diamond and signature checks, and the weight decomposition
//! of the strictly upper-triangular algebras.
//!
//! Build with `cargo build --release -p gad-py`, then import the produced
//! cdylib as `gad_py` (see python/smoke_test.py for a loader).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use gad::connection::{self, Connection};
use gad::diamond;
use gad::graph::{self, Graph};
use gad::homology::{ChainGraph, Coefficients, HomologyTable};
use gad::io::{GraphFile, StructureConstantsFile};
use gad::lie::{self, LieBasis};
use gad::weight::{self, Weight, WeightTable};

fn err(e: gad::Error) -> PyErr {
    match e {
        gad::Error::Invariant { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn table_to_py(t: &HomologyTable) -> BTreeMap<i64, (usize, Vec<BigInt>)> {
    t.groups()
        .iter()
        .map(|(&d, g)| (d, (g.free_rank, g.torsion.clone())))
        .collect()
}

/// A graph with optional gradation and connection values.
#[pyclass(name = "Graph")]
struct PyGraph {
    graph: Graph,
    grades: Option<Vec<i64>>,
    nu: Option<Connection>,
}

impl PyGraph {
    fn file(&self) -> GraphFile {
        GraphFile::from_graph(&self.graph, self.grades.as_deref(), self.nu.as_ref())
    }

    fn chain(&self) -> PyResult<ChainGraph> {
        self.file().chain_graph().map_err(err)
    }

    fn connection(&self) -> PyResult<&Connection> {
        self.nu
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("graph carries no connection values"))
    }
}

#[pymethods]
impl PyGraph {
    /// Graph(vertices, edges): vertices as (id, grade-or-None) pairs,
    /// edges as (u, v, nu-or-None) triples.
    #[new]
    fn new(
        vertices: Vec<(String, Option<i64>)>,
        edges: Vec<(String, String, Option<i64>)>,
    ) -> PyResult<Self> {
        let graph = Graph::new(
            vertices.iter().map(|(id, _)| id.clone()),
            edges.iter().map(|(u, v, _)| (u.clone(), v.clone())),
        )
        .map_err(err)?;
        let grades = if vertices.iter().all(|(_, g)| g.is_some()) && !vertices.is_empty() {
            Some(
                vertices
                    .iter()
                    .map(|(_, g)| g.unwrap())
                    .collect::<Vec<i64>>(),
            )
        } else if vertices.iter().any(|(_, g)| g.is_some()) {
            return Err(PyValueError::new_err(
                "either every vertex carries a grade or none does",
            ));
        } else {
            None
        };
        let nu = if edges.iter().all(|(_, _, n)| n.is_some()) && !edges.is_empty() {
            Some(
                Connection::from_triples(
                    &graph,
                    edges
                        .iter()
                        .map(|(u, v, n)| (u.clone(), v.clone(), n.unwrap())),
                )
                .map_err(err)?,
            )
        } else if edges.iter().any(|(_, _, n)| n.is_some()) {
            return Err(PyValueError::new_err(
                "either every edge carries a connection value or none does",
            ));
        } else {
            None
        };
        if let Some(grades) = &grades {
            gad::graph::GradedGraph::new(graph.clone(), grades.clone()).map_err(err)?;
        }
        Ok(PyGraph { graph, grades, nu })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let graph = file.graph().map_err(err)?;
        let grades = file.grades().map_err(err)?;
        let nu = file.connection(&graph).map_err(err)?;
        Ok(PyGraph { graph, grades, nu })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.file())
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn to_dot(&self) -> String {
        gad::io::to_dot(&self.graph, self.grades.as_deref(), self.nu.as_ref())
    }

    fn vertices(&self) -> Vec<String> {
        self.graph.ids().to_vec()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.graph
            .edges()
            .iter()
            .map(|&(u, v)| (self.graph.id(u).to_string(), self.graph.id(v).to_string()))
            .collect()
    }

    /// Shortest path length, None when disconnected.
    fn distance(&self, u: &str, v: &str) -> PyResult<Option<usize>> {
        self.graph.distance(u, v).map_err(err)
    }

    fn is_gradable(&self) -> bool {
        graph::is_gradable(&self.graph).is_some()
    }

    /// The canonical {0,1} gradation as an id -> grade dict.
    fn representation_gradation(&self) -> PyResult<BTreeMap<String, i64>> {
        let gg = graph::representation_gradation(&self.graph).map_err(err)?;
        Ok((0..self.graph.len())
            .map(|v| (self.graph.id(v).to_string(), gg.grade(v)))
            .collect())
    }

    fn is_diamond(&self) -> bool {
        diamond::is_diamond_graph(&self.graph).is_diamond
    }

    fn diamond_rank(&self) -> PyResult<usize> {
        diamond::diamond_rank(&self.graph).map_err(err)
    }

    /// Signature as (u, v, sign) triples, or None with the obstruction
    /// available through find_signature_report().
    fn find_signature(&self) -> PyResult<Option<Vec<(String, String, i64)>>> {
        let search = diamond::find_signature(&self.graph).map_err(err)?;
        Ok(search.signature.map(|sig| {
            sig.pairs()
                .map(|(u, v, x)| {
                    (
                        self.graph.id(u).to_string(),
                        self.graph.id(v).to_string(),
                        x,
                    )
                })
                .collect()
        }))
    }

    /// (found, obstruction) pair.
    fn find_signature_report(&self) -> PyResult<(bool, Option<String>)> {
        let search = diamond::find_signature(&self.graph).map_err(err)?;
        Ok((search.signature.is_some(), search.obstruction))
    }

    fn is_deformable(&self) -> PyResult<bool> {
        Ok(connection::is_deformable(&self.graph, self.connection()?)
            .map_err(err)?
            .deformable)
    }

    fn graph_rank(&self) -> PyResult<u64> {
        connection::graph_rank(&self.graph, self.connection()?).map_err(err)
    }

    fn volume(&self) -> PyResult<usize> {
        connection::volume(&self.graph, self.connection()?).map_err(err)
    }

    fn characteristic_number(&self) -> PyResult<BigInt> {
        connection::characteristic_number(&self.graph, self.connection()?).map_err(err)
    }

    /// Integral homology: degree -> (free rank, [torsion divisors]).
    fn homology(&self) -> PyResult<BTreeMap<i64, (usize, Vec<BigInt>)>> {
        Ok(table_to_py(&self.chain()?.homology(Coefficients::Integers)))
    }

    fn cohomology(&self) -> PyResult<BTreeMap<i64, (usize, Vec<BigInt>)>> {
        Ok(table_to_py(
            &self.chain()?.cohomology(Coefficients::Integers),
        ))
    }

    /// Dimensions over the prime field p, degree -> dimension.
    fn homology_mod(&self, p: u64) -> PyResult<BTreeMap<i64, usize>> {
        if p < 2 || (2..=p.isqrt()).any(|d| p % d == 0) {
            return Err(PyValueError::new_err("p must be a prime"));
        }
        Ok(self
            .chain()?
            .homology(Coefficients::PrimeField(p))
            .groups()
            .iter()
            .map(|(&d, g)| (d, g.free_rank))
            .collect())
    }

    /// Lift a bottom vertex: returns (k, before, after) homology data.
    #[allow(clippy::type_complexity)]
    fn lift_report(
        &self,
        vertex: &str,
    ) -> PyResult<(
        BigInt,
        BTreeMap<i64, (usize, Vec<BigInt>)>,
        BTreeMap<i64, (usize, Vec<BigInt>)>,
    )> {
        let report = gad::homology::lift_homology_report(&self.chain()?, vertex).map_err(err)?;
        Ok((
            report.k,
            table_to_py(&report.before),
            table_to_py(&report.after),
        ))
    }
}

/// One of the bundled example files as a JSON string: "d1", "d2", "ex13".
#[pyfunction]
fn fixture(name: &str) -> PyResult<String> {
    let file = match name {
        "d1" => gad::fixtures::d1_file(),
        "d2" => gad::fixtures::d2_file(),
        "ex13" => gad::fixtures::ex13_file(),
        other => return Err(PyValueError::new_err(format!("unknown fixture {other:?}"))),
    };
    serde_json::to_string_pretty(&file).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// All admissible weights for the given n, lexicographically.
#[pyfunction]
fn omega(n: usize) -> Vec<Vec<usize>> {
    weight::enumerate_omega(n)
        .into_iter()
        .map(|w| w.0)
        .collect()
}

#[pyfunction]
fn is_admissible(entries: Vec<usize>) -> bool {
    weight::is_admissible_weight(&Weight(entries))
}

/// Reduction of a weight: (positions, left, right) or None.
#[pyfunction]
fn reduction(entries: Vec<usize>) -> PyResult<Option<(Vec<usize>, Vec<usize>, Vec<usize>)>> {
    Ok(weight::is_reducible(&Weight(entries))
        .map_err(err)?
        .map(|r| (r.positions, r.left.0, r.right.0)))
}

/// Weight of a 0/1 triangular matrix given by the positions of its ones.
#[pyfunction]
fn weight_of(n: usize, ones: Vec<(usize, usize)>) -> PyResult<Vec<usize>> {
    let mut m = weight::TriMatrix01::zero(n);
    for (i, j) in ones {
        if i >= j || j > n {
            return Err(PyValueError::new_err(format!("bad entry ({i},{j})")));
        }
        m = m.with_entry(i, j, true);
    }
    Ok(m.weight().0)
}

#[pyfunction]
fn rank_closed_form(entries: Vec<usize>) -> PyResult<usize> {
    weight::rank_closed_form(&Weight(entries)).map_err(err)
}

/// (weight, size, rank) rows for every realized weight.
#[pyfunction]
fn weight_table(n: usize) -> PyResult<Vec<(Vec<usize>, usize, usize)>> {
    if n > 6 {
        return Err(PyValueError::new_err("n exceeds the hard cap 6"));
    }
    let table = WeightTable::build(n);
    let mut rows = Vec::new();
    for w in table.weights().cloned().collect::<Vec<_>>() {
        let c = table.component(&w).map_err(err)?;
        rows.push((w.0.clone(), c.size(), c.counted_rank().map_err(err)?));
    }
    Ok(rows)
}

/// The weight subgraph as a Graph carrying its gradation and signature.
#[pyfunction]
fn weight_component(n: usize, entries: Vec<usize>) -> PyResult<PyGraph> {
    if n > 6 {
        return Err(PyValueError::new_err("n exceeds the hard cap 6"));
    }
    let table = WeightTable::build(n);
    let component = table.component(&Weight(entries)).map_err(err)?;
    match component.chain {
        None => Err(PyValueError::new_err("the weight subgraph is empty")),
        Some(chain) => Ok(PyGraph {
            graph: chain.graph().clone(),
            grades: Some(chain.graded().grades().to_vec()),
            nu: Some(chain.nu().clone()),
        }),
    }
}

/// Component decomposition of the exterior chain graph of the triangular
/// algebra: (component count, rank-zero count, total homology).
#[pyfunction]
#[allow(clippy::type_complexity)]
fn type_a_homology(n: usize) -> PyResult<(usize, usize, BTreeMap<i64, (usize, Vec<BigInt>)>)> {
    if n > 5 {
        return Err(PyValueError::new_err("full decompositions stop at n = 5"));
    }
    let lb = LieBasis::type_a(n);
    let cg = lie::exterior_chain_graph(&lb).map_err(err)?;
    let decomp = lie::component_decomposition(&cg).map_err(err)?;
    Ok((
        decomp.components.len(),
        decomp.free_component_count(),
        table_to_py(&decomp.total_homology()),
    ))
}

/// Jacobi check of a structure-constants JSON document; None when the
/// identity holds, else a description of the first violation.
#[pyfunction]
fn validate_lie_json(text: &str) -> PyResult<Option<String>> {
    let file: StructureConstantsFile =
        serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let lb = LieBasis::from_file(&file).map_err(err)?;
    let report = lie::validate_lie(&lb);
    Ok(report
        .violation
        .map(|(x, y, z, defect)| format!("triple ({x}, {y}, {z}) leaves {defect:?}")))
}

/// Diamond root-system axioms on a structure-constants JSON document:
/// (ok, first-violation description).
#[pyfunction]
fn diamond_root_system_json(text: &str) -> PyResult<(bool, Option<String>)> {
    let file: StructureConstantsFile =
        serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let lb = LieBasis::from_file(&file).map_err(err)?;
    let report = lie::is_diamond_root_system(&lb).map_err(err)?;
    Ok((
        report.ok,
        report
            .first_violation
            .map(|(axiom, detail)| format!("axiom {axiom}: {detail}")),
    ))
}

/// Sweep checks by token: "3.2", "3.3", "3.4" or "3.5".
#[pyfunction]
fn an_verify(n: usize, check: &str) -> PyResult<bool> {
    if n > 6 {
        return Err(PyValueError::new_err("n exceeds the hard cap 6"));
    }
    let table = WeightTable::build(n);
    let report = match check {
        "3.2" | "nonempty" => weight::verify_nonempty_iff_admissible(&table),
        "3.3" | "products" => weight::verify_reducible_products(&table).map_err(err)?,
        "3.4" | "connected" => weight::verify_connectivity_and_witnesses(&table).map_err(err)?,
        "3.5" | "rank" => weight::verify_rank_formula(&table).map_err(err)?,
        other => return Err(PyValueError::new_err(format!("unknown check {other:?}"))),
    };
    Ok(report.ok)
}

#[pymodule]
fn gad_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(reduction, m)?)?;
    m.add_function(wrap_pyfunction!(weight_of, m)?)?;
    m.add_function(wrap_pyfunction!(rank_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(weight_table, m)?)?;
    m.add_function(wrap_pyfunction!(weight_component, m)?)?;
    m.add_function(wrap_pyfunction!(type_a_homology, m)?)?;
    m.add_function(wrap_pyfunction!(validate_lie_json, m)?)?;
    m.add_function(wrap_pyfunction!(diamond_root_system_json, m)?)?;
    m.add_function(wrap_pyfunction!(an_verify, m)?)?;
    Ok(())
}
