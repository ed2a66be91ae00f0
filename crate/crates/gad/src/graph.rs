//! Finite graphs, gradations and the distance-decomposition machinery.
//!
//! Vertices are opaque strings; the listed vertex order is the canonical
//! order wherever a basis is needed. All values are immutable after
//! construction and every operation is a pure function of its inputs.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::{Error, Result};

pub type VertexId = String;

/// A finite simple graph with no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from listed vertices and edges given by vertex id.
    /// Duplicate edges collapse; a self-loop or an unknown endpoint is an
    /// input error, as is a repeated vertex id.
    pub fn new<I, E>(vertices: I, edge_list: E) -> Result<Self>
    where
        I: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let ids: Vec<VertexId> = vertices.into_iter().collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate vertex id {id:?}")));
            }
        }
        let mut set = HashSet::new();
        for (a, b) in edge_list {
            let u = *index
                .get(&a)
                .ok_or_else(|| Error::input(format!("edge endpoint {a:?} is not a vertex")))?;
            let v = *index
                .get(&b)
                .ok_or_else(|| Error::input(format!("edge endpoint {b:?} is not a vertex")))?;
            if u == v {
                return Err(Error::input(format!("self-loop at {a:?}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut edges: Vec<(usize, usize)> = set.into_iter().collect();
        edges.sort_unstable();
        let mut adj = vec![Vec::new(); ids.len()];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            ids,
            index,
            adj,
            edges,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown vertex id {id:?}")))
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Breadth-first distances from `start`; `None` marks unreachable.
    pub fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest path length between two vertices; `None` when no path
    /// exists. Infinity is this explicit absence, never a large integer.
    pub fn distance(&self, u: &str, v: &str) -> Result<Option<usize>> {
        let u = self.vertex(u)?;
        let v = self.vertex(v)?;
        Ok(self.distances_from(u)[v])
    }
}

/// The two halves of a connected component under the parity of distance:
/// all edges cross between the parts, distances inside a part are even and
/// distances across are odd. `part1` holds the smallest vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceDecomposition {
    pub part1: Vec<VertexId>,
    pub part2: Vec<VertexId>,
}

/// Two-colors every component by BFS parity. Returns one decomposition per
/// component when the graph has no odd cycle, `None` otherwise.
pub fn is_gradable(g: &Graph) -> Option<Vec<DistanceDecomposition>> {
    parity_coloring(g).map(|colors| {
        g.components()
            .iter()
            .map(|comp| {
                // the part containing the smallest id in the component is part1
                let min_id_vertex = comp
                    .iter()
                    .copied()
                    .min_by(|&a, &b| g.id(a).cmp(g.id(b)))
                    .expect("component is non-empty");
                let c0 = colors[min_id_vertex];
                let mut part1 = Vec::new();
                let mut part2 = Vec::new();
                for &v in comp {
                    if colors[v] == c0 {
                        part1.push(g.id(v).to_string());
                    } else {
                        part2.push(g.id(v).to_string());
                    }
                }
                part1.sort();
                part2.sort();
                DistanceDecomposition { part1, part2 }
            })
            .collect()
    })
}

/// BFS 2-coloring; `None` when some edge joins two vertices of one color.
fn parity_coloring(g: &Graph) -> Option<Vec<u8>> {
    let mut color = vec![u8::MAX; g.len()];
    for start in 0..g.len() {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// A graph together with a gradation: an integer vertex labelling that
/// changes by exactly one across every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedGraph {
    graph: Graph,
    grades: Vec<i64>,
}

impl GradedGraph {
    /// Validates the gradation against every edge.
    pub fn new(graph: Graph, grades: Vec<i64>) -> Result<Self> {
        if grades.len() != graph.len() {
            return Err(Error::input(format!(
                "gradation lists {} grades for {} vertices",
                grades.len(),
                graph.len()
            )));
        }
        for &(u, v) in graph.edges() {
            if (grades[u] - grades[v]).abs() != 1 {
                return Err(Error::input(format!(
                    "edge [{}, {}] joins grades {} and {}",
                    graph.id(u),
                    graph.id(v),
                    grades[u],
                    grades[v]
                )));
            }
        }
        Ok(GradedGraph { graph, grades })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn grades(&self) -> &[i64] {
        &self.grades
    }

    pub fn grade(&self, v: usize) -> i64 {
        self.grades[v]
    }

    pub fn grade_of(&self, id: &str) -> Result<i64> {
        Ok(self.grades[self.graph.vertex(id)?])
    }

    /// A top vertex sits one grade above all of its neighbors; a bottom
    /// vertex one grade below. Isolated vertices are both.
    pub fn extreme_vertices(&self) -> (Vec<usize>, Vec<usize>) {
        let mut tops = Vec::new();
        let mut bottoms = Vec::new();
        for v in 0..self.graph.len() {
            let g = self.grades[v];
            let all_below = self
                .graph
                .neighbors(v)
                .iter()
                .all(|&w| self.grades[w] == g - 1);
            let all_above = self
                .graph
                .neighbors(v)
                .iter()
                .all(|&w| self.grades[w] == g + 1);
            if all_below {
                tops.push(v);
            }
            if all_above {
                bottoms.push(v);
            }
        }
        (tops, bottoms)
    }

    pub fn is_top(&self, v: usize) -> bool {
        let g = self.grades[v];
        self.graph
            .neighbors(v)
            .iter()
            .all(|&w| self.grades[w] == g - 1)
    }

    pub fn is_bottom(&self, v: usize) -> bool {
        let g = self.grades[v];
        self.graph
            .neighbors(v)
            .iter()
            .all(|&w| self.grades[w] == g + 1)
    }

    /// Lowering: drop a top vertex by two grades.
    pub fn lower(&self, id: &str) -> Result<GradedGraph> {
        let v = self.graph.vertex(id)?;
        if !self.is_top(v) {
            return Err(Error::domain(format!("{id:?} is not a top vertex")));
        }
        let mut grades = self.grades.clone();
        grades[v] -= 2;
        GradedGraph::new(self.graph.clone(), grades)
    }

    /// Lifting: raise a bottom vertex by two grades.
    pub fn lift(&self, id: &str) -> Result<GradedGraph> {
        let v = self.graph.vertex(id)?;
        if !self.is_bottom(v) {
            return Err(Error::domain(format!("{id:?} is not a bottom vertex")));
        }
        let mut grades = self.grades.clone();
        grades[v] += 2;
        GradedGraph::new(self.graph.clone(), grades)
    }

    /// Lowers maximal vertices above grade 1, then lifts minimal vertices
    /// below grade 0, until every grade lies in {0,1}. Among candidates of
    /// equal grade the smallest vertex id moves first, so the move sequence
    /// is deterministic. Termination: each move strictly shrinks the total
    /// distance of the grades from {0,1}.
    pub fn reduce_to_representation(&self) -> (Vec<GradeMove>, GradedGraph) {
        let mut moves = Vec::new();
        let mut current = self.clone();
        loop {
            let max = *current.grades.iter().max().expect("non-empty");
            if max <= 1 {
                break;
            }
            let v = (0..current.graph.len())
                .filter(|&v| current.grades[v] == max)
                .min_by(|&a, &b| current.graph.id(a).cmp(current.graph.id(b)))
                .expect("some vertex attains the maximum");
            // a vertex of maximal grade is a top vertex
            let id = current.graph.id(v).to_string();
            current = current.lower(&id).expect("maximal vertex is top");
            moves.push(GradeMove::Lower(id));
        }
        loop {
            let min = *current.grades.iter().min().expect("non-empty");
            if min >= 0 {
                break;
            }
            let v = (0..current.graph.len())
                .filter(|&v| current.grades[v] == min)
                .min_by(|&a, &b| current.graph.id(a).cmp(current.graph.id(b)))
                .expect("some vertex attains the minimum");
            let id = current.graph.id(v).to_string();
            current = current.lift(&id).expect("minimal vertex is bottom");
            moves.push(GradeMove::Lift(id));
        }
        (moves, current)
    }
}

/// One lowering or lifting move, by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradeMove {
    Lower(VertexId),
    Lift(VertexId),
}

/// The canonical {0,1}-valued gradation: zero on the part of each component
/// that contains the lexicographically smallest vertex id.
pub fn representation_gradation(g: &Graph) -> Result<GradedGraph> {
    let decomp = is_gradable(g).ok_or_else(|| Error::domain("graph is not gradable"))?;
    let mut grades = vec![0i64; g.len()];
    for part in &decomp {
        for id in &part.part2 {
            grades[g.vertex(id)?] = 1;
        }
    }
    GradedGraph::new(g.clone(), grades)
}

/// Two gradations on one graph are equivalent exactly when their difference
/// is even at every vertex.
pub fn gradations_equivalent(a: &GradedGraph, b: &GradedGraph) -> Result<bool> {
    if a.graph() != b.graph() {
        return Err(Error::input(
            "gradations live on different graphs".to_string(),
        ));
    }
    Ok(a.grades()
        .iter()
        .zip(b.grades())
        .all(|(x, y)| (x - y) % 2 == 0))
}

/// Verdict of the unique-extreme-vertex distance check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceCheck {
    /// A unique bottom vertex v with d(u,v) = |u| - |v| throughout.
    PositiveRelativeTo(VertexId),
    /// A unique top vertex v with d(u,v) = |v| - |u| throughout.
    NegativeRelativeTo(VertexId),
    Neither,
}

/// For a connected graded graph, reports whether it is a positive distance
/// graph (unique bottom vertex), a negative one (unique top vertex), or
/// neither, asserting the distance identity in the first two cases.
pub fn distance_graph_check(gg: &GradedGraph) -> Result<DistanceCheck> {
    if !gg.graph().is_connected() {
        return Err(Error::input("distance check needs a connected graph"));
    }
    let (tops, bottoms) = gg.extreme_vertices();
    if bottoms.len() == 1 {
        let v = bottoms[0];
        let dist = gg.graph().distances_from(v);
        for u in 0..gg.graph().len() {
            let d = dist[u].expect("connected") as i64;
            if d != gg.grade(u) - gg.grade(v) {
                return Err(Error::invariant(
                    "positive-distance",
                    format!(
                        "unique bottom {} but d({}, {}) = {} while grade difference is {}",
                        gg.graph().id(v),
                        gg.graph().id(u),
                        gg.graph().id(v),
                        d,
                        gg.grade(u) - gg.grade(v)
                    ),
                ));
            }
        }
        return Ok(DistanceCheck::PositiveRelativeTo(
            gg.graph().id(v).to_string(),
        ));
    }
    if tops.len() == 1 {
        let v = tops[0];
        let dist = gg.graph().distances_from(v);
        for u in 0..gg.graph().len() {
            let d = dist[u].expect("connected") as i64;
            if d != gg.grade(v) - gg.grade(u) {
                return Err(Error::invariant(
                    "negative-distance",
                    format!(
                        "unique top {} but d({}, {}) = {} while grade difference is {}",
                        gg.graph().id(v),
                        gg.graph().id(u),
                        gg.graph().id(v),
                        d,
                        gg.grade(v) - gg.grade(u)
                    ),
                ));
            }
        }
        return Ok(DistanceCheck::NegativeRelativeTo(
            gg.graph().id(v).to_string(),
        ));
    }
    Ok(DistanceCheck::Neither)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::new(
            ["a", "b", "c"].map(String::from),
            [("a", "b"), ("b", "c")].map(|(u, v)| (u.into(), v.into())),
        )
        .unwrap()
    }

    fn cycle4() -> Graph {
        Graph::new(
            ["a", "b", "c", "d"].map(String::from),
            [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")].map(|(u, v)| (u.into(), v.into())),
        )
        .unwrap()
    }

    fn triangle() -> Graph {
        Graph::new(
            ["a", "b", "c"].map(String::from),
            [("a", "b"), ("b", "c"), ("c", "a")].map(|(u, v)| (u.into(), v.into())),
        )
        .unwrap()
    }

    #[test]
    fn distance_basics() {
        let g = Graph::new(["a", "b"].map(String::from), Vec::<(String, String)>::new()).unwrap();
        assert_eq!(g.distance("a", "a").unwrap(), Some(0));
        assert_eq!(g.distance("a", "b").unwrap(), None);
        assert!(g.distance("a", "zzz").is_err());
    }

    #[test]
    fn distance_on_d1() {
        let g = crate::fixtures::d1_graph();
        assert_eq!(g.distance("v", "v1,2").unwrap(), Some(2));
    }

    #[test]
    fn gradable_cases() {
        let parts = is_gradable(&cycle4()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].part1, vec!["a".to_string(), "c".to_string()]);
        assert_eq!(parts[0].part2, vec!["b".to_string(), "d".to_string()]);
        assert!(is_gradable(&triangle()).is_none());
        assert!(is_gradable(&crate::fixtures::d1_graph()).is_none());
    }

    #[test]
    fn representation_gradation_cases() {
        let single = Graph::new(["x".to_string()], Vec::<(String, String)>::new()).unwrap();
        assert_eq!(representation_gradation(&single).unwrap().grades(), &[0]);

        let gg = representation_gradation(&cycle4()).unwrap();
        assert_eq!(gg.grades(), &[0, 1, 0, 1]);

        let gg = representation_gradation(&path3()).unwrap();
        assert_eq!(gg.grades(), &[0, 1, 0]);
    }

    #[test]
    fn equivalence_parity() {
        let g = path3();
        let a = GradedGraph::new(g.clone(), vec![0, 1, 2]).unwrap();
        let b = GradedGraph::new(g.clone(), vec![0, 1, 0]).unwrap();
        let c = GradedGraph::new(g.clone(), vec![1, 2, 1]).unwrap();
        assert!(gradations_equivalent(&a, &b).unwrap());
        assert!(!gradations_equivalent(&a, &c).unwrap());
        assert!(gradations_equivalent(&a, &a).unwrap());
    }

    #[test]
    fn lower_and_lift() {
        let g = path3();
        let a = GradedGraph::new(g.clone(), vec![0, 1, 2]).unwrap();
        let lowered = a.lower("c").unwrap();
        assert_eq!(lowered.grades(), &[0, 1, 0]);
        let lifted = lowered.lift("a").unwrap();
        assert_eq!(lifted.grades(), &[2, 1, 0]);
        assert_eq!(lowered.lift("c").unwrap().grades(), &[0, 1, 2]);
        // not a top vertex
        assert!(a.lower("a").is_err());
        // lower then lift at the same vertex restores the input
        assert_eq!(a.lower("c").unwrap().lift("c").unwrap(), a);
    }

    #[test]
    fn reduce_examples() {
        let g = path3();
        let a = GradedGraph::new(g.clone(), vec![0, 1, 0]).unwrap();
        let (moves, out) = a.reduce_to_representation();
        assert!(moves.is_empty());
        assert_eq!(out, a);

        let b = GradedGraph::new(g, vec![0, 1, 2]).unwrap();
        let (moves, out) = b.reduce_to_representation();
        assert_eq!(moves, vec![GradeMove::Lower("c".into())]);
        assert_eq!(out.grades(), &[0, 1, 0]);
    }

    #[test]
    fn reduce_star() {
        // center at grade 3, leaves at grade 2
        let ids: Vec<String> = ["hub", "l1", "l2", "l3"].map(String::from).into();
        let edges: Vec<(String, String)> = ["l1", "l2", "l3"]
            .iter()
            .map(|l| ("hub".to_string(), l.to_string()))
            .collect();
        let g = Graph::new(ids, edges).unwrap();
        let gg = GradedGraph::new(g, vec![3, 2, 2, 2]).unwrap();
        let (moves, out) = gg.reduce_to_representation();
        assert!(out.grades().iter().all(|&x| x == 0 || x == 1));
        // per-vertex move counts match each vertex's grade trajectory:
        // hub 3 -> 1 (one lowering), each leaf 2 -> 0 (one lowering each)
        assert_eq!(moves.len(), 4);
        assert_eq!(out.grades(), &[1, 0, 0, 0]);
    }

    #[test]
    fn extreme_vertices() {
        let g = path3();
        let gg = GradedGraph::new(g, vec![0, 1, 0]).unwrap();
        let (tops, bottoms) = gg.extreme_vertices();
        assert_eq!(tops, vec![1]);
        assert_eq!(bottoms, vec![0, 2]);

        let single = Graph::new(["x".to_string()], Vec::<(String, String)>::new()).unwrap();
        let gg = GradedGraph::new(single, vec![5]).unwrap();
        let (tops, bottoms) = gg.extreme_vertices();
        assert_eq!(tops, vec![0]);
        assert_eq!(bottoms, vec![0]);

        let gg = representation_gradation(&cycle4()).unwrap();
        let (tops, bottoms) = gg.extreme_vertices();
        assert_eq!(tops, vec![1, 3]);
        assert_eq!(bottoms, vec![0, 2]);
    }

    #[test]
    fn distance_check_cases() {
        let ids: Vec<String> = ["hub", "l1", "l2", "l3"].map(String::from).into();
        let edges: Vec<(String, String)> = ["l1", "l2", "l3"]
            .iter()
            .map(|l| ("hub".to_string(), l.to_string()))
            .collect();
        let star = Graph::new(ids, edges).unwrap();
        let gg = GradedGraph::new(star, vec![0, 1, 1, 1]).unwrap();
        assert_eq!(
            distance_graph_check(&gg).unwrap(),
            DistanceCheck::PositiveRelativeTo("hub".into())
        );

        // the middle of the path is a unique top vertex, so the path is a
        // negative distance graph even though it has two bottoms
        let gg = GradedGraph::new(path3(), vec![0, 1, 0]).unwrap();
        assert_eq!(
            distance_graph_check(&gg).unwrap(),
            DistanceCheck::NegativeRelativeTo("b".into())
        );

        // two tops and two bottoms: neither
        let square = Graph::new(
            ["a", "b", "c", "d"].map(String::from),
            [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]
                .map(|(u, v)| (u.to_string(), v.to_string())),
        )
        .unwrap();
        let gg = GradedGraph::new(square, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(distance_graph_check(&gg).unwrap(), DistanceCheck::Neither);

        let two = Graph::new(["a", "b"].map(String::from), Vec::<(String, String)>::new()).unwrap();
        let gg = GradedGraph::new(two, vec![0, 0]).unwrap();
        assert!(distance_graph_check(&gg).is_err());
    }

    #[test]
    fn graph_input_errors() {
        assert!(Graph::new(["a", "a"].map(String::from), Vec::<(String, String)>::new()).is_err());
        assert!(Graph::new(["a".to_string()], vec![("a".to_string(), "a".to_string())]).is_err());
        assert!(Graph::new(["a".to_string()], vec![("a".to_string(), "b".to_string())]).is_err());
    }
}
