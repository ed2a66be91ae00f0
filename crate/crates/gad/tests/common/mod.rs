#![allow(dead_code)]

//! Shared generators and independent oracles for the integration suites.
//!
//! Random deformation graphs are built as products of primitive factors
//! (an edge, a four-cycle with a deformable connection), then twisted by a
//! random vertex sign gauge and relisted in a random vertex order. The
//! oracles here are deliberately brute force.

use gad::connection::Connection;
use gad::graph::{GradedGraph, Graph};
use gad::homology::{self, ChainGraph};
use gad::io::{BracketEntry, StructureConstantsFile, TermEntry};
use rand::rngs::StdRng;
use rand::Rng;

pub fn singleton_chain(id: &str, grade: i64) -> ChainGraph {
    let g = Graph::new([id.to_string()], Vec::<(String, String)>::new()).unwrap();
    let gg = GradedGraph::new(g.clone(), vec![grade]).unwrap();
    ChainGraph::new(gg, Connection::constant(&g, 1)).unwrap()
}

pub fn k2_chain(prefix: &str, nu: i64) -> ChainGraph {
    let ids = [format!("{prefix}a"), format!("{prefix}b")];
    let g = Graph::new(ids.clone(), vec![(ids[0].clone(), ids[1].clone())]).unwrap();
    let gg = GradedGraph::new(g.clone(), vec![0, 1]).unwrap();
    ChainGraph::new(gg, Connection::constant(&g, nu)).unwrap()
}

/// Four-cycle with connection (x, y, -x, y): both two-step sums vanish.
pub fn c4_chain(prefix: &str, x: i64, y: i64) -> ChainGraph {
    let ids: Vec<String> = ["a", "b", "c", "d"]
        .iter()
        .map(|s| format!("{prefix}{s}"))
        .collect();
    let edges = vec![
        (ids[0].clone(), ids[1].clone()),
        (ids[1].clone(), ids[2].clone()),
        (ids[2].clone(), ids[3].clone()),
        (ids[3].clone(), ids[0].clone()),
    ];
    let g = Graph::new(ids.clone(), edges).unwrap();
    let nu = Connection::from_triples(
        &g,
        vec![
            (ids[0].clone(), ids[1].clone(), x),
            (ids[1].clone(), ids[2].clone(), y),
            (ids[2].clone(), ids[3].clone(), -x),
            (ids[3].clone(), ids[0].clone(), y),
        ],
    )
    .unwrap();
    let gg = GradedGraph::new(g, vec![0, 1, 0, 1]).unwrap();
    ChainGraph::new(gg, nu).unwrap()
}

fn nonzero(rng: &mut StdRng, bound: i64) -> i64 {
    let v = rng.random_range(1..=bound);
    if rng.random_bool(0.5) {
        -v
    } else {
        v
    }
}

/// Random vertex sign gauge and random relisting of the vertex order;
/// both preserve deformability and the equivalence class.
pub fn shuffle_chain(rng: &mut StdRng, cg: &ChainGraph) -> ChainGraph {
    let g = cg.graph();
    let signs: Vec<i64> = (0..g.len())
        .map(|_| if rng.random_bool(0.5) { -1 } else { 1 })
        .collect();
    let nu = cg.nu().twisted(&signs);
    let mut order: Vec<usize> = (0..g.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let ids: Vec<String> = order.iter().map(|&v| g.id(v).to_string()).collect();
    let grades: Vec<i64> = order.iter().map(|&v| cg.graded().grade(v)).collect();
    let edges: Vec<(String, String)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (g.id(u).to_string(), g.id(v).to_string()))
        .collect();
    let triples: Vec<(String, String, i64)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (g.id(u).to_string(), g.id(v).to_string(), nu.value(u, v)))
        .collect();
    let graph = Graph::new(ids, edges).unwrap();
    let nu = Connection::from_triples(&graph, triples).unwrap();
    ChainGraph::new(GradedGraph::new(graph, grades).unwrap(), nu).unwrap()
}

/// Random connected deformation graph with at most `max_vertices`
/// vertices, as a product of primitive factors. With `allow_singleton`
/// the result may be a single vertex.
pub fn random_deformation_chain(
    rng: &mut StdRng,
    max_vertices: usize,
    allow_singleton: bool,
) -> ChainGraph {
    let mut factors: Vec<ChainGraph> = Vec::new();
    let mut size = 1usize;
    let budget = rng.random_range(if allow_singleton { 1 } else { 2 }..=max_vertices);
    let mut tag = 0usize;
    loop {
        let choices: &[usize] = if size * 4 <= budget {
            &[2, 4]
        } else if size * 2 <= budget {
            &[2]
        } else {
            break;
        };
        let pick = choices[rng.random_range(0..choices.len())];
        tag += 1;
        let factor = match pick {
            2 => k2_chain(&format!("f{tag}."), nonzero(rng, 3)),
            _ => c4_chain(&format!("f{tag}."), nonzero(rng, 2), nonzero(rng, 2)),
        };
        size *= pick;
        factors.push(factor);
        if rng.random_bool(0.4) {
            break;
        }
    }
    let mut acc = match factors.pop() {
        Some(f) => f,
        None => singleton_chain("pt", 0),
    };
    for f in factors {
        acc = homology::product(&acc, &f).unwrap();
    }
    shuffle_chain(rng, &acc)
}

/// Random deformation graph that may be disconnected: a disjoint union of
/// one or two connected pieces.
pub fn random_deformation_union(rng: &mut StdRng, max_vertices: usize) -> ChainGraph {
    let first = random_deformation_chain(rng, max_vertices, true);
    if rng.random_bool(0.5) || first.graph().len() + 2 > max_vertices {
        return first;
    }
    let rest = max_vertices - first.graph().len();
    let second = random_deformation_chain(rng, rest.max(1), true);
    let relabeled = prefix_chain("u.", &second);
    match homology::disjoint_union(&first, &relabeled) {
        Ok(u) => u,
        Err(_) => first,
    }
}

pub fn prefix_chain(prefix: &str, cg: &ChainGraph) -> ChainGraph {
    let g = cg.graph();
    let ids: Vec<String> = (0..g.len())
        .map(|v| format!("{prefix}{}", g.id(v)))
        .collect();
    let edges: Vec<(String, String)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (
                format!("{prefix}{}", g.id(u)),
                format!("{prefix}{}", g.id(v)),
            )
        })
        .collect();
    let triples: Vec<(String, String, i64)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (
                format!("{prefix}{}", g.id(u)),
                format!("{prefix}{}", g.id(v)),
                cg.nu().value(u, v),
            )
        })
        .collect();
    let graph = Graph::new(ids, edges).unwrap();
    let grades: Vec<i64> = (0..graph.len())
        .map(|v| {
            let original = graph.id(v).strip_prefix(prefix).unwrap();
            cg.graded().grade_of(original).unwrap()
        })
        .collect();
    let nu = Connection::from_triples(&graph, triples).unwrap();
    ChainGraph::new(GradedGraph::new(graph, grades).unwrap(), nu).unwrap()
}

/// Random equivalent gradation: a walk of random lifts and lowers.
pub fn random_gradation_walk(rng: &mut StdRng, cg: &ChainGraph, steps: usize) -> ChainGraph {
    let mut gg = cg.graded().clone();
    for _ in 0..steps {
        let (tops, bottoms) = gg.extreme_vertices();
        let lower = rng.random_bool(0.5);
        let pool = if lower { &tops } else { &bottoms };
        if pool.is_empty() {
            continue;
        }
        let v = pool[rng.random_range(0..pool.len())];
        let id = gg.graph().id(v).to_string();
        gg = if lower {
            gg.lower(&id).unwrap()
        } else {
            gg.lift(&id).unwrap()
        };
    }
    cg.regraded(gg.grades().to_vec()).unwrap()
}

/// Exhaustive two-colorability check (all assignments), the independent
/// oracle for odd cycles.
pub fn bipartite_bruteforce(g: &Graph) -> bool {
    let n = g.len();
    assert!(n <= 16, "oracle is exponential");
    'outer: for mask in 0u32..1 << n {
        for &(u, v) in g.edges() {
            if (mask >> u & 1) == (mask >> v & 1) {
                continue 'outer;
            }
        }
        return true;
    }
    g.edges().is_empty() && n == 0
}

/// Quadruple-loop diamond count: chordless four-cycles, one per diagonal
/// labelling, halved.
pub fn diamond_count_bruteforce(g: &Graph) -> usize {
    let n = g.len();
    let mut count = 0usize;
    for a in 0..n {
        for b in 0..n {
            for c in b + 1..n {
                for d in a + 1..n {
                    if a == b || a == c || d == b || d == c {
                        continue;
                    }
                    if g.has_edge(a, b)
                        && g.has_edge(b, d)
                        && g.has_edge(a, c)
                        && g.has_edge(c, d)
                        && !g.has_edge(a, d)
                        && !g.has_edge(b, c)
                    {
                        count += 1;
                    }
                }
            }
        }
    }
    count / 2
}

const SP6_DIM: usize = 6;

type Mat6 = [[i64; SP6_DIM]; SP6_DIM];

fn mat_mul(a: &Mat6, b: &Mat6) -> Mat6 {
    let mut out = [[0i64; SP6_DIM]; SP6_DIM];
    for i in 0..SP6_DIM {
        for j in 0..SP6_DIM {
            for k in 0..SP6_DIM {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn mat_commutator(a: &Mat6, b: &Mat6) -> Mat6 {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    let mut out = [[0i64; SP6_DIM]; SP6_DIM];
    for i in 0..SP6_DIM {
        for j in 0..SP6_DIM {
            out[i][j] = ab[i][j] - ba[i][j];
        }
    }
    out
}

/// The nine positive-root vectors of the rank-three symplectic algebra in
/// the 6x6 matrix model: an oracle fixture whose structure constants carry
/// a coefficient two.
pub fn sp6_structure_constants() -> StructureConstantsFile {
    let e = |i: usize, j: usize| -> Mat6 {
        let mut m = [[0i64; SP6_DIM]; SP6_DIM];
        m[i][j] = 1;
        m
    };
    let add = |a: &Mat6, b: &Mat6| -> Mat6 {
        let mut out = *a;
        for i in 0..SP6_DIM {
            for j in 0..SP6_DIM {
                out[i][j] += b[i][j];
            }
        }
        out
    };
    let neg = |a: &Mat6| -> Mat6 {
        let mut out = *a;
        for row in out.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        out
    };
    let mut basis: Vec<(String, Mat6)> = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            basis.push((format!("x{i}{j}"), add(&e(i, j), &neg(&e(j + 3, i + 3)))));
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            basis.push((format!("y{i}{j}"), add(&e(i, j + 3), &e(j, i + 3))));
        }
    }
    for i in 0..3 {
        basis.push((format!("z{i}"), e(i, i + 3)));
    }
    // express a commutator in the basis by reading the defining cells
    let express = |m: &Mat6| -> Vec<(i64, String)> {
        let mut terms = Vec::new();
        let mut residue = *m;
        for (name, b) in &basis {
            // defining cell: the first nonzero entry of the basis matrix
            let (ci, cj) = (0..SP6_DIM)
                .flat_map(|i| (0..SP6_DIM).map(move |j| (i, j)))
                .find(|&(i, j)| b[i][j] != 0)
                .unwrap();
            let coeff = residue[ci][cj] / b[ci][cj];
            if coeff != 0 {
                terms.push((coeff, name.clone()));
                for i in 0..SP6_DIM {
                    for j in 0..SP6_DIM {
                        residue[i][j] -= coeff * b[i][j];
                    }
                }
            }
        }
        assert!(
            residue.iter().all(|row| row.iter().all(|&x| x == 0)),
            "commutator leaves the positive part"
        );
        terms
    };
    let mut brackets = Vec::new();
    for (a, (na, ma)) in basis.iter().enumerate() {
        for (nb, mb) in basis.iter().skip(a + 1) {
            let terms = express(&mat_commutator(ma, mb));
            if !terms.is_empty() {
                brackets.push(BracketEntry {
                    x: na.clone(),
                    y: nb.clone(),
                    terms: terms.into_iter().map(|(c, z)| TermEntry { c, z }).collect(),
                });
            }
        }
    }
    StructureConstantsFile {
        symbols: basis.into_iter().map(|(n, _)| n).collect(),
        brackets,
    }
}
