//! Chain graphs and their integral (co)homology.
//!
//! A chain graph pairs a graded graph with a connection whose signed
//! two-step sums vanish inside grade levels, so the boundary squared is
//! zero and the vertices span an integer chain complex. Homology is
//! computed degree by degree through Smith normal form; over a prime field
//! dimensions come from elimination mod p.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::connection::{self, Connection};
use crate::graph::{GradedGraph, Graph, VertexId};
use crate::matrix::IntMatrix;
use crate::snf::smith_normal_form;
use crate::{Error, Result};

/// A finitely generated abelian group in canonical form: free rank plus
/// elementary divisors, each greater than one, each dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        if n == 0 {
            return AbelianGroup::free(1);
        }
        if n == 1 {
            return AbelianGroup::trivial();
        }
        AbelianGroup {
            free_rank: 0,
            torsion: vec![BigInt::from(n)],
        }
    }

    pub fn from_divisors(free_rank: usize, divisors: Vec<BigInt>) -> Self {
        let mut torsion: Vec<BigInt> = divisors.into_iter().filter(|d| !d.is_one()).collect();
        torsion.sort();
        AbelianGroup { free_rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.free_rank == 0
    }

    /// Cardinality, when finite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product())
    }

    /// Whether `other` can be a quotient of `self` (equivalently, for
    /// finite abelian groups, a subgroup): divisor lists aligned from the
    /// largest end must divide entrywise, and ranks must not grow.
    pub fn has_quotient(&self, other: &AbelianGroup) -> bool {
        if other.free_rank > self.free_rank {
            return false;
        }
        if other.torsion.len() > self.torsion.len() + (self.free_rank - other.free_rank) {
            return false;
        }
        // compare largest-to-largest while both lists last
        let mut mine = self.torsion.iter().rev();
        for d in other.torsion.iter().rev() {
            match mine.next() {
                Some(m) => {
                    if !(m % d).is_zero() {
                        return false;
                    }
                }
                // covered by a free factor
                None => break,
            }
        }
        true
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl std::fmt::Display for Coefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Rationals => write!(f, "Q"),
            Coefficients::PrimeField(p) => write!(f, "Fp:{p}"),
        }
    }
}

/// Homology groups by degree; degrees that carry the zero group are not
/// stored, so structural equality is mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyTable {
    pub coefficients: Coefficients,
    groups: BTreeMap<i64, AbelianGroup>,
}

impl HomologyTable {
    pub fn new(coefficients: Coefficients, groups: BTreeMap<i64, AbelianGroup>) -> Self {
        let groups = groups
            .into_iter()
            .filter(|(_, g)| !g.is_trivial())
            .collect();
        HomologyTable {
            coefficients,
            groups,
        }
    }

    pub fn group(&self, degree: i64) -> AbelianGroup {
        self.groups
            .get(&degree)
            .cloned()
            .unwrap_or_else(AbelianGroup::trivial)
    }

    pub fn groups(&self) -> &BTreeMap<i64, AbelianGroup> {
        &self.groups
    }

    pub fn total_free_rank(&self) -> usize {
        self.groups.values().map(|g| g.free_rank).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn all_torsion(&self) -> bool {
        self.groups.values().all(AbelianGroup::is_torsion)
    }

    /// Same groups with every degree shifted by `offset`.
    pub fn shifted(&self, offset: i64) -> HomologyTable {
        HomologyTable {
            coefficients: self.coefficients,
            groups: self
                .groups
                .iter()
                .map(|(&d, g)| (d + offset, g.clone()))
                .collect(),
        }
    }

    /// Degree-wise direct sum.
    pub fn direct_sum(&self, other: &HomologyTable) -> HomologyTable {
        let mut groups = self.groups.clone();
        for (&d, g) in &other.groups {
            let mine = groups.entry(d).or_insert_with(AbelianGroup::trivial);
            mine.free_rank += g.free_rank;
            mine.torsion.extend(g.torsion.iter().cloned());
            mine.torsion.sort();
        }
        HomologyTable::new(self.coefficients, groups)
    }
}

/// Graded basis lists plus boundary matrices; the boundary in degree k maps
/// its basis into the degree k-1 basis, columns indexed by the source.
#[derive(Debug, Clone)]
pub struct IntegerChainComplex {
    bases: BTreeMap<i64, Vec<VertexId>>,
    boundaries: BTreeMap<i64, IntMatrix>,
}

impl IntegerChainComplex {
    /// Validates shapes and the vanishing of the composite boundary.
    pub fn new(
        bases: BTreeMap<i64, Vec<VertexId>>,
        boundaries: BTreeMap<i64, IntMatrix>,
    ) -> Result<Self> {
        for (&k, b) in &boundaries {
            let src = bases.get(&k).map_or(0, Vec::len);
            let dst = bases.get(&(k - 1)).map_or(0, Vec::len);
            if b.ncols() != src || b.nrows() != dst {
                return Err(Error::input(format!(
                    "boundary at degree {k} has shape {}x{}, bases give {}x{}",
                    b.nrows(),
                    b.ncols(),
                    dst,
                    src
                )));
            }
        }
        let cx = IntegerChainComplex { bases, boundaries };
        for &k in cx.bases.keys() {
            let lower = cx.boundary(k - 1);
            let upper = cx.boundary(k);
            if lower.ncols() == upper.nrows() && !lower.mul(&upper)?.is_zero() {
                return Err(Error::input(format!(
                    "composite boundary from degree {k} is nonzero"
                )));
            }
        }
        Ok(cx)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.bases.keys().copied()
    }

    pub fn basis(&self, degree: i64) -> &[VertexId] {
        self.bases.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.basis(degree).len()
    }

    /// Boundary matrix out of `degree`; a zero-shaped matrix when absent.
    pub fn boundary(&self, degree: i64) -> IntMatrix {
        self.boundaries
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.dim(degree - 1), self.dim(degree)))
    }

    pub fn total_dim(&self) -> usize {
        self.bases.values().map(Vec::len).sum()
    }
}

/// Homology of the complex over the chosen coefficients.
pub fn homology(cx: &IntegerChainComplex, coefficients: Coefficients) -> HomologyTable {
    let mut groups = BTreeMap::new();
    for k in cx.degrees().collect::<Vec<_>>() {
        let n = cx.dim(k);
        let out = cx.boundary(k);
        let inc = cx.boundary(k + 1);
        let group = match coefficients {
            Coefficients::Integers => {
                let r_out = out.rank();
                let s = smith_normal_form(&inc, false);
                AbelianGroup::from_divisors(n - r_out - s.rank(), s.torsion())
            }
            Coefficients::Rationals => AbelianGroup::free(n - out.rank() - inc.rank()),
            Coefficients::PrimeField(p) => {
                AbelianGroup::free(n - out.rank_mod_p(p) - inc.rank_mod_p(p))
            }
        };
        groups.insert(k, group);
    }
    HomologyTable::new(coefficients, groups)
}

/// Violations of the chain condition: pairs two grades apart whose signed
/// path sum through the middle grade is nonzero.
pub fn is_chain_graph(gg: &GradedGraph, nu: &Connection) -> Vec<(VertexId, VertexId, i64)> {
    let g = gg.graph();
    let mut sums: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for mid in 0..g.len() {
        let nb = g.neighbors(mid);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if (gg.grade(a) - gg.grade(b)).abs() == 2 {
                    *sums.entry((a, b)).or_insert(0) += nu.value(a, mid) * nu.value(mid, b);
                }
            }
        }
    }
    sums.into_iter()
        .filter(|&(_, s)| s != 0)
        .map(|((a, b), s)| (g.id(a).to_string(), g.id(b).to_string(), s))
        .collect()
}

/// A graded graph with a connection satisfying the chain condition.
#[derive(Debug, Clone)]
pub struct ChainGraph {
    gg: GradedGraph,
    nu: Connection,
}

impl ChainGraph {
    pub fn new(gg: GradedGraph, nu: Connection) -> Result<Self> {
        let violations = crate::connection::validate_connection(gg.graph(), &nu);
        if !violations.is_empty() {
            return Err(Error::input(format!("invalid connection: {violations:?}")));
        }
        let broken = is_chain_graph(&gg, &nu);
        if let Some((a, b, s)) = broken.first() {
            return Err(Error::domain(format!(
                "chain condition fails at pair [{a}, {b}] with sum {s}"
            )));
        }
        Ok(ChainGraph { gg, nu })
    }

    pub fn graded(&self) -> &GradedGraph {
        &self.gg
    }

    pub fn graph(&self) -> &Graph {
        self.gg.graph()
    }

    pub fn nu(&self) -> &Connection {
        &self.nu
    }

    /// Same connection, new gradation.
    pub fn regraded(&self, grades: Vec<i64>) -> Result<ChainGraph> {
        ChainGraph::new(
            GradedGraph::new(self.graph().clone(), grades)?,
            self.nu.clone(),
        )
    }

    /// The associated chain complex: bases by grade in listed vertex order.
    pub fn complex(&self) -> IntegerChainComplex {
        let g = self.graph();
        let mut bases: BTreeMap<i64, Vec<VertexId>> = BTreeMap::new();
        let mut index_in_grade = vec![0usize; g.len()];
        for v in 0..g.len() {
            let list = bases.entry(self.gg.grade(v)).or_default();
            index_in_grade[v] = list.len();
            list.push(g.id(v).to_string());
        }
        let mut boundaries = BTreeMap::new();
        for (&k, basis) in &bases {
            let below = bases.get(&(k - 1)).map_or(0, Vec::len);
            let mut mat = IntMatrix::zeros(below, basis.len());
            for v in 0..g.len() {
                if self.gg.grade(v) != k {
                    continue;
                }
                for &w in g.neighbors(v) {
                    if self.gg.grade(w) == k - 1 {
                        mat.set(
                            index_in_grade[w],
                            index_in_grade[v],
                            BigInt::from(self.nu.value(v, w)),
                        );
                    }
                }
            }
            boundaries.insert(k, mat);
        }
        IntegerChainComplex::new(bases, boundaries)
            .expect("chain condition was verified at construction")
    }

    /// The dual cochain complex, encoded as a chain complex on negated
    /// degrees (the coboundary raises the original degree).
    pub fn cochain_complex(&self) -> IntegerChainComplex {
        let g = self.graph();
        let mut bases: BTreeMap<i64, Vec<VertexId>> = BTreeMap::new();
        let mut index_in_grade = vec![0usize; g.len()];
        for v in 0..g.len() {
            let list = bases.entry(-self.gg.grade(v)).or_default();
            index_in_grade[v] = list.len();
            list.push(g.id(v).to_string());
        }
        let mut boundaries = BTreeMap::new();
        for (&k, basis) in &bases {
            let below = bases.get(&(k - 1)).map_or(0, Vec::len);
            let mut mat = IntMatrix::zeros(below, basis.len());
            for v in 0..g.len() {
                if -self.gg.grade(v) != k {
                    continue;
                }
                for &w in g.neighbors(v) {
                    if self.gg.grade(w) == self.gg.grade(v) + 1 {
                        mat.set(
                            index_in_grade[w],
                            index_in_grade[v],
                            BigInt::from(self.nu.value(v, w)),
                        );
                    }
                }
            }
            boundaries.insert(k, mat);
        }
        IntegerChainComplex::new(bases, boundaries)
            .expect("chain condition was verified at construction")
    }

    pub fn homology(&self, coefficients: Coefficients) -> HomologyTable {
        homology(&self.complex(), coefficients)
    }

    /// Cohomology, reported against the original (raising) degrees.
    pub fn cohomology(&self, coefficients: Coefficients) -> HomologyTable {
        let t = homology(&self.cochain_complex(), coefficients);
        HomologyTable {
            coefficients,
            groups: t.groups.iter().map(|(&d, g)| (-d, g.clone())).collect(),
        }
    }

    /// The chain graph induced on a set of vertices (a union of connected
    /// components keeps the chain condition).
    pub fn induced(&self, vertex_ids: &[VertexId]) -> Result<ChainGraph> {
        let g = self.graph();
        let keep: Vec<usize> = vertex_ids
            .iter()
            .map(|id| g.vertex(id))
            .collect::<Result<_>>()?;
        let in_set: std::collections::HashSet<usize> = keep.iter().copied().collect();
        let ids: Vec<String> = keep.iter().map(|&v| g.id(v).to_string()).collect();
        let mut edges = Vec::new();
        let mut triples = Vec::new();
        for &(u, v) in g.edges() {
            if in_set.contains(&u) && in_set.contains(&v) {
                edges.push((g.id(u).to_string(), g.id(v).to_string()));
                triples.push((
                    g.id(u).to_string(),
                    g.id(v).to_string(),
                    self.nu.value(u, v),
                ));
            }
        }
        let graph = Graph::new(ids, edges)?;
        let grades = (0..graph.len())
            .map(|v| self.gg.grade_of(graph.id(v)))
            .collect::<Result<Vec<_>>>()?;
        let nu = Connection::from_triples(&graph, triples)?;
        ChainGraph::new(GradedGraph::new(graph, grades)?, nu)
    }

    /// Connected components as chain graphs, ordered by first listed vertex.
    pub fn components(&self) -> Vec<ChainGraph> {
        self.graph()
            .components()
            .into_iter()
            .map(|comp| {
                let ids: Vec<String> = comp
                    .iter()
                    .map(|&v| self.graph().id(v).to_string())
                    .collect();
                self.induced(&ids).expect("component stays a chain graph")
            })
            .collect()
    }
}

/// Disjoint union; the vertex id sets must not collide.
pub fn disjoint_union(a: &ChainGraph, b: &ChainGraph) -> Result<ChainGraph> {
    let mut ids: Vec<String> = a.graph().ids().to_vec();
    for id in b.graph().ids() {
        if a.graph().vertex(id).is_ok() {
            return Err(Error::input(format!(
                "vertex id {id:?} appears in both graphs"
            )));
        }
        ids.push(id.clone());
    }
    let mut edges = Vec::new();
    let mut triples = Vec::new();
    for cg in [a, b] {
        for &(u, v) in cg.graph().edges() {
            let (iu, iv) = (cg.graph().id(u).to_string(), cg.graph().id(v).to_string());
            edges.push((iu.clone(), iv.clone()));
            triples.push((iu, iv, cg.nu().value(u, v)));
        }
    }
    let graph = Graph::new(ids, edges)?;
    let grades = (0..graph.len())
        .map(|v| {
            let id = graph.id(v);
            a.graded().grade_of(id).or_else(|_| b.graded().grade_of(id))
        })
        .collect::<Result<Vec<_>>>()?;
    let nu = Connection::from_triples(&graph, triples)?;
    ChainGraph::new(GradedGraph::new(graph, grades)?, nu)
}

pub fn product_vertex_id(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Product chain graph: vertices are pairs, grades add, and the connection
/// of a second-factor edge is twisted by the parity of the first factor's
/// grade.
pub fn product(a: &ChainGraph, b: &ChainGraph) -> Result<ChainGraph> {
    let (ga, gb) = (a.graph(), b.graph());
    let mut ids = Vec::with_capacity(ga.len() * gb.len());
    let mut grades = Vec::with_capacity(ga.len() * gb.len());
    for i in 0..ga.len() {
        for j in 0..gb.len() {
            ids.push(product_vertex_id(ga.id(i), gb.id(j)));
            grades.push(a.graded().grade(i) + b.graded().grade(j));
        }
    }
    let mut edges = Vec::new();
    let mut triples = Vec::new();
    for &(u, v) in ga.edges() {
        for j in 0..gb.len() {
            let x = product_vertex_id(ga.id(u), gb.id(j));
            let y = product_vertex_id(ga.id(v), gb.id(j));
            edges.push((x.clone(), y.clone()));
            triples.push((x, y, a.nu().value(u, v)));
        }
    }
    for &(u, v) in gb.edges() {
        for i in 0..ga.len() {
            let x = product_vertex_id(ga.id(i), gb.id(u));
            let y = product_vertex_id(ga.id(i), gb.id(v));
            let sign = if a.graded().grade(i).rem_euclid(2) == 0 {
                1
            } else {
                -1
            };
            edges.push((x.clone(), y.clone()));
            triples.push((x, y, sign * b.nu().value(u, v)));
        }
    }
    let graph = Graph::new(ids, edges)?;
    let nu = Connection::from_triples(&graph, triples)?;
    ChainGraph::new(GradedGraph::new(graph, grades)?, nu)
}

/// The tensor product complex of the two associated complexes, built
/// directly from the factors; basis order matches the product chain graph.
pub fn tensor_complex(a: &ChainGraph, b: &ChainGraph) -> Result<IntegerChainComplex> {
    let (ga, gb) = (a.graph(), b.graph());
    let mut bases: BTreeMap<i64, Vec<VertexId>> = BTreeMap::new();
    let mut pos: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..ga.len() {
        for j in 0..gb.len() {
            let k = a.graded().grade(i) + b.graded().grade(j);
            let list = bases.entry(k).or_default();
            pos.insert((i, j), list.len());
            list.push(product_vertex_id(ga.id(i), gb.id(j)));
        }
    }
    let mut boundaries: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    for (&k, basis) in &bases {
        let below = bases.get(&(k - 1)).map_or(0, Vec::len);
        boundaries.insert(k, IntMatrix::zeros(below, basis.len()));
    }
    for i in 0..ga.len() {
        for j in 0..gb.len() {
            let k = a.graded().grade(i) + b.graded().grade(j);
            let col = pos[&(i, j)];
            let mat = boundaries.get_mut(&k).unwrap();
            for &u in ga.neighbors(i) {
                if a.graded().grade(u) == a.graded().grade(i) - 1 {
                    mat.set(pos[&(u, j)], col, BigInt::from(a.nu().value(i, u)));
                }
            }
            let sign = if a.graded().grade(i).rem_euclid(2) == 0 {
                1
            } else {
                -1
            };
            for &w in gb.neighbors(j) {
                if b.graded().grade(w) == b.graded().grade(j) - 1 {
                    mat.set(pos[&(i, w)], col, BigInt::from(sign * b.nu().value(j, w)));
                }
            }
        }
    }
    IntegerChainComplex::new(bases, boundaries)
}

fn require_deformable_connected(cg: &ChainGraph) -> Result<u64> {
    if !cg.graph().is_connected() {
        return Err(Error::input("check needs a connected graph"));
    }
    connection::graph_rank(cg.graph(), cg.nu())
}

/// One pass/fail line of a verification.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub ok: bool,
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn new() -> Self {
        Report {
            ok: true,
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.ok &= ok;
        self.lines.push(CheckLine {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }
}

impl Default for Report {
    fn default() -> Self {
        Self::new()
    }
}

/// For a connected deformable chain graph of positive rank: homology and
/// cohomology are pure torsion and the cohomology in each degree equals the
/// homology one degree lower.
pub fn verify_torsion_duality(cg: &ChainGraph) -> Result<Report> {
    let rank = require_deformable_connected(cg)?;
    if rank == 0 {
        return Err(Error::input("torsion duality needs positive rank"));
    }
    let h = cg.homology(Coefficients::Integers);
    let ch = cg.cohomology(Coefficients::Integers);
    let mut report = Report::new();
    report.push(
        "homology-pure-torsion",
        h.all_torsion(),
        format!("free ranks {:?}", h.groups()),
    );
    report.push(
        "cohomology-pure-torsion",
        ch.all_torsion(),
        format!("free ranks {:?}", ch.groups()),
    );
    let mut degrees: Vec<i64> = h.groups().keys().map(|&d| d + 1).collect();
    degrees.extend(ch.groups().keys());
    degrees.sort_unstable();
    degrees.dedup();
    for k in degrees {
        let same = ch.group(k) == h.group(k - 1);
        report.push(
            format!("degree-{k}"),
            same,
            format!(
                "H^{k} = {}, lower homology = {}",
                ch.group(k),
                h.group(k - 1)
            ),
        );
    }
    Ok(report)
}

/// The outcome of lifting a bottom vertex: the divisor k of the rank that
/// relates the homology below and above the lifted grade.
#[derive(Debug, Clone)]
pub struct LiftReport {
    pub vertex: VertexId,
    pub grade: i64,
    pub rank: u64,
    pub k: BigInt,
    pub candidates: Vec<BigInt>,
    pub before: HomologyTable,
    pub after: HomologyTable,
    pub report: Report,
}

/// Lifts a bottom vertex and verifies the three relations between the
/// homology tables before and after.
pub fn lift_homology_report(cg: &ChainGraph, vertex: &str) -> Result<LiftReport> {
    let rank = require_deformable_connected(cg)?;
    if rank == 0 {
        return Err(Error::input("lifting report needs positive rank"));
    }
    let v = cg.graph().vertex(vertex)?;
    if !cg.graded().is_bottom(v) {
        return Err(Error::input(format!("{vertex:?} is not a bottom vertex")));
    }
    let q = cg.graded().grade(v);
    let lifted = cg.regraded({
        let mut grades = cg.graded().grades().to_vec();
        grades[v] += 2;
        grades
    })?;
    let before = cg.homology(Coefficients::Integers);
    let after = lifted.homology(Coefficients::Integers);
    let n = BigInt::from(rank);

    let mut report = Report::new();
    let infinite = !before.all_torsion() || !after.all_torsion();
    report.push(
        "finite-groups",
        !infinite,
        "all homology groups finite".to_string(),
    );
    if infinite {
        return Err(Error::invariant(
            "lift-finite-homology",
            "positive-rank component has infinite homology".to_string(),
        ));
    }
    let ord = |g: &AbelianGroup| g.order().expect("finite");
    let b_q = before.group(q);
    let a_q = after.group(q);
    let (k, rem) = num_integer::Integer::div_rem(&ord(&b_q), &ord(&a_q));
    report.push(
        "cardinality-ratio-integral",
        rem.is_zero(),
        format!("|H_{q}| before {} after {}", ord(&b_q), ord(&a_q)),
    );
    report.push(
        "k-divides-rank",
        rem.is_zero() && (&n % &k).is_zero(),
        format!("k = {k}, rank = {n}"),
    );
    report.push(
        "quotient-structure",
        b_q.has_quotient(&a_q),
        format!("H_{q}: {} onto {}", b_q, a_q),
    );
    let b_q1 = before.group(q + 1);
    let a_q1 = after.group(q + 1);
    let expected = if rem.is_zero() && !k.is_zero() {
        &n / &k
    } else {
        BigInt::zero()
    };
    let ratio_ok = !ord(&a_q1).is_zero()
        && (&ord(&a_q1) % &ord(&b_q1)).is_zero()
        && ord(&a_q1) / ord(&b_q1) == expected;
    report.push(
        "upper-ratio",
        ratio_ok,
        format!(
            "|H_{}| before {} after {}, expected factor {}",
            q + 1,
            ord(&b_q1),
            ord(&a_q1),
            expected
        ),
    );
    report.push(
        "subgroup-structure",
        a_q1.has_quotient(&b_q1),
        format!("H_{}: {} into {}", q + 1, b_q1, a_q1),
    );
    let mut degrees: Vec<i64> = before
        .groups()
        .keys()
        .chain(after.groups().keys())
        .copied()
        .collect();
    degrees.sort_unstable();
    degrees.dedup();
    for d in degrees {
        if d == q || d == q + 1 {
            continue;
        }
        report.push(
            format!("degree-{d}-unchanged"),
            before.group(d) == after.group(d),
            format!("{} vs {}", before.group(d), after.group(d)),
        );
    }
    if !report.ok {
        return Err(Error::invariant(
            "lift-divisor-relations",
            format!(
                "no divisor satisfies the lifting relations at {vertex:?}: {:?}",
                report
                    .lines
                    .iter()
                    .filter(|l| !l.ok)
                    .map(|l| &l.name)
                    .collect::<Vec<_>>()
            ),
        ));
    }
    Ok(LiftReport {
        vertex: vertex.to_string(),
        grade: q,
        rank,
        candidates: vec![k.clone()],
        k,
        before,
        after,
        report,
    })
}

/// Alternating product of homology orders: product over even degrees
/// divided by product over odd degrees, exact.
pub fn characteristic_number_graded(cg: &ChainGraph) -> Result<BigRational> {
    let rank = require_deformable_connected(cg)?;
    if rank == 0 {
        return Err(Error::input(
            "graded characteristic number needs positive rank",
        ));
    }
    let h = cg.homology(Coefficients::Integers);
    let mut even = BigInt::one();
    let mut odd = BigInt::one();
    for (&d, g) in h.groups() {
        let order = g
            .order()
            .ok_or_else(|| Error::domain(format!("infinite group in degree {d}")))?;
        if d.rem_euclid(2) == 0 {
            even *= order;
        } else {
            odd *= order;
        }
    }
    Ok(BigRational::new(even, odd))
}

/// Over a field whose characteristic does not divide the rank, homology
/// and cohomology of a positive-rank deformable chain graph vanish.
pub fn field_vanishing_check(cg: &ChainGraph, p: u64) -> Result<Report> {
    let rank = require_deformable_connected(cg)?;
    if rank == 0 {
        return Err(Error::input("vanishing check needs positive rank"));
    }
    if p != 0 && rank % p == 0 {
        return Err(Error::input(format!(
            "characteristic {p} divides the rank {rank}; check not applicable"
        )));
    }
    let coeff = if p == 0 {
        Coefficients::Rationals
    } else {
        Coefficients::PrimeField(p)
    };
    let h = cg.homology(coeff);
    let ch = cg.cohomology(coeff);
    let mut report = Report::new();
    report.push(
        "homology-vanishes",
        h.is_zero(),
        format!(
            "nonzero degrees {:?}",
            h.groups().keys().collect::<Vec<_>>()
        ),
    );
    report.push(
        "cohomology-vanishes",
        ch.is_zero(),
        format!(
            "nonzero degrees {:?}",
            ch.groups().keys().collect::<Vec<_>>()
        ),
    );
    Ok(report)
}

/// Empirical probe for the exponent mu in chi(graded) = chi(graph) * r^mu.
/// The counting measure behind mu is ambiguous, so both candidate readings
/// (vertices per gradation value, vertices per neighbor count) are
/// evaluated and reported; neither is asserted.
#[derive(Debug, Clone)]
pub struct CharacteristicProbe {
    pub chi_graded: BigRational,
    pub chi_graph: BigInt,
    pub rank: u64,
    /// Exponent solving the identity exactly, when one exists.
    pub exponent_actual: Option<i64>,
    pub exponent_by_grade: Option<i64>,
    pub exponent_by_valence: Option<i64>,
}

impl CharacteristicProbe {
    pub fn grade_reading_matches(&self) -> Option<bool> {
        Some(self.exponent_actual? == self.exponent_by_grade?)
    }
    pub fn valence_reading_matches(&self) -> Option<bool> {
        Some(self.exponent_actual? == self.exponent_by_valence?)
    }
}

pub fn characteristic_probe(cg: &ChainGraph) -> Result<CharacteristicProbe> {
    let rank = require_deformable_connected(cg)?;
    if rank == 0 {
        return Err(Error::input("probe needs positive rank"));
    }
    let chi_graded = characteristic_number_graded(cg)?;
    let chi_graph = connection::characteristic_number(cg.graph(), cg.nu())?;
    let r = BigInt::from(rank);
    let ratio = chi_graded.clone() / BigRational::from_integer(chi_graph.clone());
    let exponent_actual = exact_power_exponent(&ratio, &r);

    let mu_formula = |counts: &BTreeMap<i64, usize>| -> Option<i64> {
        let min = *counts.keys().next()?;
        let s = if min.rem_euclid(2) == 1 {
            (min - 1) / 2
        } else {
            // need some vertex one step above the even floor
            if !counts.contains_key(&(min + 1)) {
                return None;
            }
            min / 2
        };
        let count = |i: i64| *counts.get(&i).unwrap_or(&0) as i64;
        let max = *counts.keys().last()?;
        let mut mu = 0i64;
        let mut k = 0i64;
        while 2 * (k + s) <= max {
            mu += k * (count(2 * (k + s) + 1) - count(2 * (k + s)));
            k += 1;
        }
        Some(mu)
    };
    let mut by_grade: BTreeMap<i64, usize> = BTreeMap::new();
    for v in 0..cg.graph().len() {
        *by_grade.entry(cg.graded().grade(v)).or_insert(0) += 1;
    }
    let mut by_valence: BTreeMap<i64, usize> = BTreeMap::new();
    for v in 0..cg.graph().len() {
        *by_valence.entry(cg.graph().degree(v) as i64).or_insert(0) += 1;
    }
    Ok(CharacteristicProbe {
        chi_graded,
        chi_graph,
        rank,
        exponent_actual,
        exponent_by_grade: mu_formula(&by_grade),
        exponent_by_valence: mu_formula(&by_valence),
    })
}

/// Solves ratio = base^e for an integer e, if possible.
fn exact_power_exponent(ratio: &BigRational, base: &BigInt) -> Option<i64> {
    if ratio.is_one() {
        return Some(0);
    }
    if base.is_one() || base.is_zero() {
        return None;
    }
    let mut e = 0i64;
    let mut cur = ratio.clone();
    let base_r = BigRational::from_integer(base.clone());
    while cur.denom().is_one() && !cur.is_one() {
        if !(cur.numer() % base).is_zero() {
            return None;
        }
        cur /= &base_r;
        e += 1;
        if e > 4096 {
            return None;
        }
    }
    while !cur.denom().is_one() {
        cur *= &base_r;
        e -= 1;
        if e < -4096 {
            return None;
        }
    }
    if cur.is_one() {
        Some(e)
    } else {
        None
    }
}
