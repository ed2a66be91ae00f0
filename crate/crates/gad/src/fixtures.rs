//! Bundled example graphs: the ungradable diamond graph on 16 vertices,
//! the gradable 22-vertex diamond graph of volume 11 and rank 5 that
//! admits no signature, and the 14-vertex chain graph whose only homology
//! is a single order-two class in degree two.

use crate::connection::Connection;
use crate::graph::{GradedGraph, Graph};
use crate::homology::ChainGraph;
use crate::io::GraphFile;
use crate::Result;

fn pair_id(i: usize, j: usize) -> String {
    format!("v{},{}", i.min(j), i.max(j))
}

/// Vertices v, v1..v5 and all pair vertices; pair vertices are joined when
/// their index sets are disjoint (a Petersen-like layer), which forces an
/// odd cycle.
pub fn d1_graph() -> Graph {
    let mut vertices = vec!["v".to_string()];
    for i in 1..=5 {
        vertices.push(format!("v{i}"));
    }
    for i in 1..=5 {
        for j in i + 1..=5 {
            vertices.push(pair_id(i, j));
        }
    }
    let mut edges = Vec::new();
    for i in 1..=5 {
        edges.push(("v".to_string(), format!("v{i}")));
    }
    for i in 1..=5 {
        for j in i + 1..=5 {
            edges.push((format!("v{i}"), pair_id(i, j)));
            edges.push((format!("v{j}"), pair_id(i, j)));
        }
    }
    let pairs: Vec<(usize, usize)> = (1..=5)
        .flat_map(|i| (i + 1..=5).map(move |j| (i, j)))
        .collect();
    for (a, p) in pairs.iter().enumerate() {
        for q in &pairs[a + 1..] {
            if p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1 {
                edges.push((pair_id(p.0, p.1), pair_id(q.0, q.1)));
            }
        }
    }
    Graph::new(vertices, edges).expect("fixture is well-formed")
}

pub fn d1_file() -> GraphFile {
    GraphFile::from_graph(&d1_graph(), None, None)
}

const D2_U_EDGES: [[(usize, usize); 5]; 6] = [
    [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)],
    [(1, 2), (2, 4), (4, 5), (5, 3), (3, 1)],
    [(1, 2), (2, 5), (5, 3), (3, 4), (4, 1)],
    [(3, 2), (2, 4), (4, 1), (1, 5), (5, 3)],
    [(3, 2), (2, 5), (5, 4), (4, 1), (1, 3)],
    [(4, 2), (2, 5), (5, 1), (1, 3), (3, 4)],
];

/// The 22-vertex graded diamond graph: a cone over the pair layer plus six
/// grade-3 vertices, each attached along a pentagon of pair vertices.
pub fn d2_graph() -> GradedGraph {
    let mut vertices = vec!["v".to_string()];
    let mut grades = vec![0i64];
    for i in 1..=5 {
        vertices.push(format!("v{i}"));
        grades.push(1);
    }
    for i in 1..=5 {
        for j in i + 1..=5 {
            vertices.push(pair_id(i, j));
            grades.push(2);
        }
    }
    for k in 1..=6 {
        vertices.push(format!("u{k}"));
        grades.push(3);
    }
    let mut edges = Vec::new();
    for i in 1..=5 {
        edges.push(("v".to_string(), format!("v{i}")));
    }
    for i in 1..=5 {
        for j in i + 1..=5 {
            edges.push((format!("v{i}"), pair_id(i, j)));
            edges.push((format!("v{j}"), pair_id(i, j)));
        }
    }
    for (k, ring) in D2_U_EDGES.iter().enumerate() {
        for &(i, j) in ring {
            edges.push((format!("u{}", k + 1), pair_id(i, j)));
        }
    }
    let graph = Graph::new(vertices, edges).expect("fixture is well-formed");
    GradedGraph::new(graph, grades).expect("fixture gradation is valid")
}

pub fn d2_file() -> GraphFile {
    let gg = d2_graph();
    GraphFile::from_graph(gg.graph(), Some(gg.grades()), None)
}

/// The chain graph of the three-sphere-like complex: a cone point, four
/// grade-1 vertices, six signed pair vertices and three grade-3 cells.
pub fn ex13_chain() -> ChainGraph {
    let mut vertices = vec!["v".to_string()];
    let mut grades = vec![0i64];
    for i in 1..=4 {
        vertices.push(format!("v{i}"));
        grades.push(1);
    }
    for i in 1..=4 {
        for j in i + 1..=4 {
            vertices.push(pair_id(i, j));
            grades.push(2);
        }
    }
    for k in 1..=3 {
        vertices.push(format!("e{k}"));
        grades.push(3);
    }
    let mut triples: Vec<(String, String, i64)> = Vec::new();
    for i in 1..=4 {
        triples.push((format!("v{i}"), "v".to_string(), 1));
    }
    for i in 1..=4 {
        for j in i + 1..=4 {
            triples.push((pair_id(i, j), format!("v{i}"), 1));
            triples.push((pair_id(i, j), format!("v{j}"), -1));
        }
    }
    // boundaries of the three cells, with v(j,i) = -v(i,j) folded in
    let cells: [[(usize, usize, i64); 4]; 3] = [
        [(1, 2, 1), (2, 3, 1), (3, 4, 1), (1, 4, -1)],
        [(1, 3, 1), (3, 4, 1), (2, 4, -1), (1, 2, -1)],
        [(1, 4, 1), (2, 4, -1), (2, 3, 1), (1, 3, -1)],
    ];
    for (k, cell) in cells.iter().enumerate() {
        for &(i, j, sign) in cell {
            triples.push((format!("e{}", k + 1), pair_id(i, j), sign));
        }
    }
    let edges: Vec<(String, String)> = triples
        .iter()
        .map(|(a, b, _)| (a.clone(), b.clone()))
        .collect();
    let graph = Graph::new(vertices, edges).expect("fixture is well-formed");
    let nu = Connection::from_triples(&graph, triples).expect("fixture connection is valid");
    let gg = GradedGraph::new(graph, grades).expect("fixture gradation is valid");
    ChainGraph::new(gg, nu).expect("fixture satisfies the chain condition")
}

pub fn ex13_file() -> GraphFile {
    let cg = ex13_chain();
    GraphFile::from_graph(cg.graph(), Some(cg.graded().grades()), Some(cg.nu()))
}

/// Writes d1.json, d2.json and ex13.json into the directory.
pub fn write_fixtures(dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, file) in [
        ("d1.json", d1_file()),
        ("d2.json", d2_file()),
        ("ex13.json", ex13_file()),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(&file)?)?;
        written.push(path);
    }
    Ok(written)
}
