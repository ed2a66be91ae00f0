//! Connections: symmetric integer edge weights that are nonzero exactly on
//! edges. Equivalence by vertex sign maps, deformability, vertex ranks,
//! volume and the characteristic number.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::graph::{representation_gradation, Graph, VertexId};
use crate::matrix::{IntMatrix, RepMatrix};
use crate::{Error, Result};

/// Symmetric edge weights, keyed by index pairs of the underlying graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    values: BTreeMap<(usize, usize), i64>,
}

impl Connection {
    /// Builds a connection from (id, id, value) triples. Symmetry is
    /// structural: both orientations of a pair share one entry, and giving
    /// a pair twice with different values is an input error.
    pub fn from_triples<I>(g: &Graph, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String, i64)>,
    {
        let mut values = BTreeMap::new();
        for (a, b, v) in triples {
            let u = g.vertex(&a)?;
            let w = g.vertex(&b)?;
            if u == w {
                return Err(Error::input(format!("connection value on a loop at {a:?}")));
            }
            let key = (u.min(w), u.max(w));
            if let Some(prev) = values.insert(key, v) {
                if prev != v {
                    return Err(Error::input(format!(
                        "conflicting values {prev} and {v} for pair [{a}, {b}]"
                    )));
                }
            }
        }
        Ok(Connection { values })
    }

    /// Constant connection on all edges of the graph.
    pub fn constant(g: &Graph, value: i64) -> Self {
        Connection {
            values: g.edges().iter().map(|&e| (e, value)).collect(),
        }
    }

    pub fn value(&self, u: usize, v: usize) -> i64 {
        if u == v {
            return 0;
        }
        *self.values.get(&(u.min(v), u.max(v))).unwrap_or(&0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.values.iter().map(|(&(u, v), &x)| (u, v, x))
    }

    /// Gauge twist: nu'(a,b) = e(a) e(b) nu(a,b).
    pub fn twisted(&self, signs: &[i64]) -> Connection {
        Connection {
            values: self
                .values
                .iter()
                .map(|(&(u, v), &x)| ((u, v), signs[u] * signs[v] * x))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectionViolation {
    /// An edge of the graph carrying value zero (or no value at all).
    MissingOnEdge(VertexId, VertexId),
    /// A nonzero value on a pair that is not an edge.
    SupportOffEdge(VertexId, VertexId),
}

/// Checks that the support of the connection is exactly the edge set.
/// Violations are data, not errors.
pub fn validate_connection(g: &Graph, c: &Connection) -> Vec<ConnectionViolation> {
    let mut out = Vec::new();
    for &(u, v) in g.edges() {
        if c.value(u, v) == 0 {
            out.push(ConnectionViolation::MissingOnEdge(
                g.id(u).to_string(),
                g.id(v).to_string(),
            ));
        }
    }
    for (u, v, x) in c.pairs() {
        if x != 0 && !g.has_edge(u, v) {
            out.push(ConnectionViolation::SupportOffEdge(
                g.id(u).to_string(),
                g.id(v).to_string(),
            ));
        }
    }
    out
}

fn require_valid(g: &Graph, c: &Connection) -> Result<()> {
    let violations = validate_connection(g, c);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::input(format!(
            "connection is invalid: {violations:?}"
        )))
    }
}

/// A vertex sign map witnessing connection equivalence.
pub type SignMap = BTreeMap<VertexId, i64>;

/// Searches for a sign map e with nu1(a,b) = e(a) e(b) nu2(a,b): signs are
/// propagated over a spanning tree of each component and verified on the
/// remaining edges. Vertices in no edge get +1.
pub fn connections_equivalent(
    g: &Graph,
    c1: &Connection,
    c2: &Connection,
) -> Result<Option<SignMap>> {
    require_valid(g, c1)?;
    require_valid(g, c2)?;
    // ratio per edge must be +-1
    let mut ratio = BTreeMap::new();
    for &(u, v) in g.edges() {
        let a = c1.value(u, v);
        let b = c2.value(u, v);
        if a.abs() != b.abs() {
            return Ok(None);
        }
        ratio.insert((u, v), if a == b { 1i64 } else { -1 });
    }
    let mut sign = vec![0i64; g.len()];
    for comp in g.components() {
        let root = comp[0];
        sign[root] = 1;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if sign[w] == 0 {
                    sign[w] = sign[v] * ratio[&(v.min(w), v.max(w))];
                    stack.push(w);
                }
            }
        }
    }
    for (&(u, v), &r) in &ratio {
        if sign[u] * sign[v] != r {
            return Ok(None);
        }
    }
    Ok(Some(
        (0..g.len())
            .map(|v| (g.id(v).to_string(), if sign[v] == 0 { 1 } else { sign[v] }))
            .collect(),
    ))
}

/// Signed two-step sums over all common neighbors, for every pair at
/// distance two.
#[derive(Debug, Clone)]
pub struct DeformabilityReport {
    pub deformable: bool,
    /// (a, b, sum) for every violating pair
    pub violations: Vec<(VertexId, VertexId, i64)>,
}

pub fn is_deformable(g: &Graph, c: &Connection) -> Result<DeformabilityReport> {
    require_valid(g, c)?;
    let mut sums: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for mid in 0..g.len() {
        let nb = g.neighbors(mid);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                *sums.entry((a, b)).or_insert(0) += c.value(a, mid) * c.value(mid, b);
            }
        }
    }
    let mut violations = Vec::new();
    for (&(a, b), &s) in &sums {
        // a pair with a common neighbor is at distance two exactly when it
        // is not an edge
        if !g.has_edge(a, b) && s != 0 {
            violations.push((g.id(a).to_string(), g.id(b).to_string(), s));
        }
    }
    Ok(DeformabilityReport {
        deformable: violations.is_empty(),
        violations,
    })
}

/// Sum of squared connection values at a vertex.
pub fn vertex_rank(g: &Graph, c: &Connection, id: &str) -> Result<u64> {
    require_valid(g, c)?;
    let v = g.vertex(id)?;
    Ok(g.neighbors(v)
        .iter()
        .map(|&w| {
            let x = c.value(v, w);
            (x * x) as u64
        })
        .sum())
}

/// The common vertex rank of a connected deformation graph.
pub fn graph_rank(g: &Graph, c: &Connection) -> Result<u64> {
    require_valid(g, c)?;
    if !g.is_connected() {
        return Err(Error::input("graph rank needs a connected graph"));
    }
    let report = is_deformable(g, c)?;
    if !report.deformable {
        return Err(Error::input(format!(
            "connection is not deformable: {:?}",
            report.violations
        )));
    }
    let ranks: Vec<u64> = (0..g.len())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&w| {
                    let x = c.value(v, w);
                    (x * x) as u64
                })
                .sum()
        })
        .collect();
    let r0 = ranks[0];
    if let Some(v) = (0..g.len()).find(|&v| ranks[v] != r0) {
        return Err(Error::invariant(
            "vertex-rank-uniformity",
            format!(
                "connected deformation graph with rank {} at {} but {} at {}",
                r0,
                g.id(0),
                ranks[v],
                g.id(v)
            ),
        ));
    }
    Ok(r0)
}

/// Sizes of the two distance components of a connected gradable graph,
/// in (part1, part2) order. A single vertex counts as (1, 0).
pub fn part_sizes(g: &Graph) -> Result<(usize, usize)> {
    if !g.is_connected() || g.is_empty() {
        return Err(Error::input("part sizes need a non-empty connected graph"));
    }
    let decomp =
        crate::graph::is_gradable(g).ok_or_else(|| Error::domain("graph is not gradable"))?;
    let d = &decomp[0];
    Ok((d.part1.len(), d.part2.len()))
}

/// Volume of a connected deformation graph: 0 for a single vertex, else
/// the common size of its distance components.
pub fn volume(g: &Graph, c: &Connection) -> Result<usize> {
    if g.len() == 1 {
        return Ok(0);
    }
    let _ = graph_rank(g, c)?;
    let (p1, p2) = part_sizes(g)?;
    if p1 != p2 {
        return Err(Error::invariant(
            "square-representation",
            format!("deformation graph with distance components of sizes {p1} and {p2}"),
        ));
    }
    Ok(p1)
}

/// Representation matrix: per connected component, rows are the grade-0
/// part of the representation gradation and columns the grade-1 part,
/// labels sorted by id; components are direct-summed in order of their
/// first listed vertex. A single vertex yields the 1x1 zero matrix.
pub fn representation_matrix(g: &Graph, c: &Connection) -> Result<RepMatrix> {
    require_valid(g, c)?;
    let rep = representation_gradation(g)?;
    let comps = g.components();
    let mut acc: Option<RepMatrix> = None;
    for comp in comps {
        let block = if comp.len() == 1 {
            let id = g.id(comp[0]).to_string();
            RepMatrix::new(IntMatrix::zeros(1, 1), vec![id.clone()], vec![id])?
        } else {
            let mut rows: Vec<usize> = comp
                .iter()
                .copied()
                .filter(|&v| rep.grade(v) == 0)
                .collect();
            let mut cols: Vec<usize> = comp
                .iter()
                .copied()
                .filter(|&v| rep.grade(v) == 1)
                .collect();
            rows.sort_by(|&a, &b| g.id(a).cmp(g.id(b)));
            cols.sort_by(|&a, &b| g.id(a).cmp(g.id(b)));
            let mat = IntMatrix::from_fn(rows.len(), cols.len(), |i, j| {
                BigInt::from(c.value(rows[i], cols[j]))
            });
            RepMatrix::new(
                mat,
                rows.iter().map(|&v| g.id(v).to_string()).collect(),
                cols.iter().map(|&v| g.id(v).to_string()).collect(),
            )?
        };
        acc = Some(match acc {
            None => block,
            Some(prev) => crate::matrix::direct_sum(&prev, &block),
        });
    }
    acc.ok_or_else(|| Error::input("empty graph has no representation matrix"))
}

/// |det A| of a representation matrix of a connected deformation graph;
/// 1 for a single vertex, so that the square identity reads 1 = r^0.
pub fn characteristic_number(g: &Graph, c: &Connection) -> Result<BigInt> {
    if g.len() == 1 {
        return Ok(BigInt::from(1));
    }
    let _ = volume(g, c)?;
    let rep = representation_matrix(g, c)?;
    Ok(rep.mat.det()?.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{global_dimension, matrices_equivalent, Equivalence, EquivalenceOptions};

    fn k2() -> Graph {
        Graph::new(
            ["a", "b"].map(String::from),
            vec![("a".to_string(), "b".to_string())],
        )
        .unwrap()
    }

    fn cycle4() -> Graph {
        Graph::new(
            ["a", "b", "c", "d"].map(String::from),
            [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]
                .map(|(u, v)| (u.to_string(), v.to_string())),
        )
        .unwrap()
    }

    fn cycle4_nu(values: [i64; 4]) -> Connection {
        let g = cycle4();
        Connection::from_triples(
            &g,
            vec![
                ("a".to_string(), "b".to_string(), values[0]),
                ("b".to_string(), "c".to_string(), values[1]),
                ("c".to_string(), "d".to_string(), values[2]),
                ("d".to_string(), "a".to_string(), values[3]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let g = k2();
        assert!(validate_connection(&g, &Connection::constant(&g, 1)).is_empty());
        assert!(!validate_connection(&g, &Connection::constant(&g, 0)).is_empty());
        assert!(validate_connection(&cycle4(), &cycle4_nu([1, 1, 1, -1])).is_empty());
    }

    #[test]
    fn equivalence_sign_maps() {
        let g = cycle4();
        let c = cycle4_nu([1, 1, 1, -1]);
        let identity = connections_equivalent(&g, &c, &c).unwrap().unwrap();
        assert!(identity.values().all(|&s| s == 1));

        // flipping vertex b negates both of its edges
        let c2 = cycle4_nu([-1, -1, 1, -1]);
        let e = connections_equivalent(&g, &c, &c2).unwrap().unwrap();
        for (&(u, v), _) in c.values.iter() {
            assert_eq!(
                c.value(u, v),
                e[g.id(u)] * e[g.id(v)] * c2.value(u, v),
                "witness property at ({u},{v})"
            );
        }

        // cycle sign product is a gauge invariant
        let c3 = cycle4_nu([1, 1, 1, 1]);
        assert!(connections_equivalent(&g, &c, &c3).unwrap().is_none());
    }

    #[test]
    fn deformability_cases() {
        let g = k2();
        assert!(
            is_deformable(&g, &Connection::constant(&g, 1))
                .unwrap()
                .deformable
        );
        assert!(
            is_deformable(&cycle4(), &cycle4_nu([1, 1, 1, -1]))
                .unwrap()
                .deformable
        );
        let rep = is_deformable(&cycle4(), &cycle4_nu([1, 1, 1, 1])).unwrap();
        assert!(!rep.deformable);
        assert_eq!(rep.violations.len(), 2);
        assert_eq!(rep.violations[0].2, 2);
    }

    #[test]
    fn ranks() {
        let single = Graph::new(["x".to_string()], Vec::<(String, String)>::new()).unwrap();
        let c = Connection::constant(&single, 0);
        assert_eq!(graph_rank(&single, &c).unwrap(), 0);

        let g = k2();
        assert_eq!(
            vertex_rank(&g, &Connection::constant(&g, 3), "a").unwrap(),
            9
        );
        assert_eq!(graph_rank(&g, &Connection::constant(&g, 3)).unwrap(), 9);

        let g = cycle4();
        let c = cycle4_nu([1, 1, 1, -1]);
        for v in ["a", "b", "c", "d"] {
            assert_eq!(vertex_rank(&g, &c, v).unwrap(), 2);
        }
        assert_eq!(graph_rank(&g, &c).unwrap(), 2);
    }

    #[test]
    fn representation_matrices() {
        let single = Graph::new(["x".to_string()], Vec::<(String, String)>::new()).unwrap();
        let rep = representation_matrix(&single, &Connection::constant(&single, 0)).unwrap();
        assert_eq!(rep.mat, IntMatrix::zeros(1, 1));
        assert_eq!(global_dimension(&rep), 1);

        let g = k2();
        let rep = representation_matrix(&g, &Connection::constant(&g, 1)).unwrap();
        assert_eq!(rep.mat, IntMatrix::from_i64_rows(&[vec![1]]).unwrap());
        assert_eq!(global_dimension(&rep), 0);

        let g = cycle4();
        let rep = representation_matrix(&g, &cycle4_nu([1, 1, 1, -1])).unwrap();
        assert_eq!(rep.row_labels, vec!["a".to_string(), "c".to_string()]);
        assert_eq!(rep.mat.rank(), 2);
        assert_eq!(global_dimension(&rep), 0);
        let target = IntMatrix::from_i64_rows(&[vec![1, 1], vec![1, -1]]).unwrap();
        match matrices_equivalent(&rep.mat, &target, EquivalenceOptions::default()).unwrap() {
            Equivalence::Equivalent(_) => {}
            other => panic!("expected equivalence, got {other:?}"),
        }
    }

    #[test]
    fn volume_and_chi() {
        let single = Graph::new(["x".to_string()], Vec::<(String, String)>::new()).unwrap();
        let c = Connection::constant(&single, 0);
        assert_eq!(volume(&single, &c).unwrap(), 0);
        assert_eq!(characteristic_number(&single, &c).unwrap(), BigInt::from(1));

        let g = cycle4();
        let c = cycle4_nu([1, 1, 1, -1]);
        assert_eq!(volume(&g, &c).unwrap(), 2);
        assert_eq!(characteristic_number(&g, &c).unwrap(), BigInt::from(2));
        // chi^2 = r^volume
        assert_eq!(4u64, graph_rank(&g, &c).unwrap().pow(2));
    }
}
