//! Weights of 0/1 strictly upper-triangular matrices and the weight
//! decomposition of the exterior chain graph of the triangular matrix
//! algebra: the admissible set omega_n, weight subgraphs with their ranks,
//! reducibility, and the permutation / transpose / rotation / duality
//! isomorphisms between weight subgraphs.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::connection::Connection;
use crate::diamond;
use crate::graph::{GradedGraph, Graph};
use crate::homology::{self, ChainGraph, Coefficients, Report};
use crate::lie::{boundary_targets, monomial_id, LieBasis};
use crate::{Error, Result};

/// A 0/1 strictly upper-triangular matrix with rows and columns indexed
/// 0..=n, stored as a bitmask over the generator positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TriMatrix01 {
    n: usize,
    mask: u64,
}

impl TriMatrix01 {
    pub fn new(n: usize, mask: u64) -> Self {
        debug_assert!(mask < (1u64 << (n * (n + 1) / 2)));
        TriMatrix01 { n, mask }
    }

    pub fn zero(n: usize) -> Self {
        TriMatrix01 { n, mask: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    fn position(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j <= self.n, "entry ({i},{j}) out of range");
        // column-major layout, row descending inside a column
        j * (j - 1) / 2 + (j - 1 - i)
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.mask >> self.position(i, j) & 1 == 1
    }

    pub fn with_entry(&self, i: usize, j: usize, value: bool) -> Self {
        let bit = 1u64 << self.position(i, j);
        TriMatrix01 {
            n: self.n,
            mask: if value {
                self.mask | bit
            } else {
                self.mask & !bit
            },
        }
    }

    /// The number of ones.
    pub fn length(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// The weight tuple: zeros above in each column plus ones rightwards
    /// in each row.
    pub fn weight(&self) -> Weight {
        let mut w: Vec<i64> = (0..=self.n as i64).collect();
        for j in 1..=self.n {
            for i in 0..j {
                if self.entry(i, j) {
                    w[i] += 1;
                    w[j] -= 1;
                }
            }
        }
        Weight(w.into_iter().map(|x| x as usize).collect())
    }

    pub fn monomial_id(&self, lb: &LieBasis) -> String {
        monomial_id(lb, self.mask)
    }
}

impl std::fmt::Display for TriMatrix01 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                (i + 1..=self.n)
                    .map(|j| if self.entry(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        write!(f, "[{}]", rows.join("|"))
    }
}

/// A weight tuple (i_0, ..., i_n).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(pub Vec<usize>);

impl Weight {
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn parse(text: &str) -> Result<Weight> {
        let entries: Vec<usize> = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::input(format!("bad weight entry {t:?}")))
            })
            .collect::<Result<_>>()?;
        if entries.is_empty() {
            return Err(Error::input("empty weight"));
        }
        Ok(Weight(entries))
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

fn triangular(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Admissibility: after sorting ascending, every prefix sum reaches the
/// matching triangular number and the total is exactly triangular. This is
/// equivalent to the condition over all subsets, since the minimum over
/// size-k subsets is attained by the k smallest entries.
pub fn is_admissible_weight(w: &Weight) -> bool {
    let n = w.n();
    if w.total() != triangular(n) {
        return false;
    }
    let mut sorted = w.0.clone();
    sorted.sort_unstable();
    let mut acc = 0usize;
    for (k, &x) in sorted.iter().enumerate() {
        acc += x;
        if acc < triangular(k) {
            return false;
        }
    }
    true
}

/// All admissible weights for the given n, lexicographically.
pub fn enumerate_omega(n: usize) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n + 1);
    fn recurse(n: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Weight>) {
        let slot = current.len();
        if slot == n + 1 {
            if remaining == 0 {
                let w = Weight(current.clone());
                if is_admissible_weight(&w) {
                    out.push(w);
                }
            }
            return;
        }
        let slots_left = n + 1 - slot;
        for x in 0..=n.min(remaining) {
            if remaining - x <= (slots_left - 1) * n {
                current.push(x);
                recurse(n, remaining - x, current, out);
                current.pop();
            }
        }
    }
    recurse(n, triangular(n), &mut current, &mut out);
    out
}

/// A reducible weight splits over a proper subset of positions summing to
/// a triangular number; the complement, shifted down, is the second
/// factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub positions: Vec<usize>,
    pub left: Weight,
    pub right: Weight,
}

/// Finds the least qualifying position set, smallest subsets first and
/// lexicographic within a size, if any.
pub fn is_reducible(w: &Weight) -> Result<Option<Reduction>> {
    if !is_admissible_weight(w) {
        return Err(Error::domain(format!("{w} is not admissible")));
    }
    let n = w.n();
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << (n + 1)) - 1)
        .map(|mask| (0..=n).filter(|&p| mask >> p & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for positions in subsets {
        let m = positions.len() - 1;
        let sum: usize = positions.iter().map(|&p| w.0[p]).sum();
        if sum != triangular(m) {
            continue;
        }
        let left = Weight(positions.iter().map(|&p| w.0[p]).collect());
        let right = Weight(
            (0..=n)
                .filter(|p| !positions.contains(p))
                .map(|p| w.0[p] - (m + 1))
                .collect(),
        );
        debug_assert!(is_admissible_weight(&left) && is_admissible_weight(&right));
        return Ok(Some(Reduction {
            positions,
            left,
            right,
        }));
    }
    Ok(None)
}

/// All matrices bucketed by weight. The scan is linear in 2^(n(n+1)/2).
pub struct WeightTable {
    n: usize,
    lie: LieBasis,
    buckets: BTreeMap<Weight, Vec<u64>>,
}

impl WeightTable {
    pub fn build(n: usize) -> WeightTable {
        let lie = LieBasis::type_a(n);
        let mut buckets: BTreeMap<Weight, Vec<u64>> = BTreeMap::new();
        for mask in 0..1u64 << (n * (n + 1) / 2) {
            let w = TriMatrix01::new(n, mask).weight();
            buckets.entry(w).or_default().push(mask);
        }
        WeightTable { n, lie, buckets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lie(&self) -> &LieBasis {
        &self.lie
    }

    pub fn weights(&self) -> impl Iterator<Item = &Weight> {
        self.buckets.keys()
    }

    pub fn matrices(&self, w: &Weight) -> &[u64] {
        self.buckets.get(w).map_or(&[], Vec::as_slice)
    }

    pub fn total_vertices(&self) -> u64 {
        self.buckets.values().map(|v| v.len() as u64).sum()
    }

    /// The weight subgraph with the connection restricted from the full
    /// exterior chain graph. Empty for unrealized weights; otherwise the
    /// subgraph is asserted connected.
    pub fn component(&self, w: &Weight) -> Result<WeightComponent> {
        if w.0.len() != self.n + 1 {
            return Err(Error::input(format!(
                "weight {w} has {} entries, expected {}",
                w.0.len(),
                self.n + 1
            )));
        }
        let masks = self.matrices(w);
        if masks.is_empty() {
            return Ok(WeightComponent {
                weight: w.clone(),
                matrices: Vec::new(),
                chain: None,
            });
        }
        let in_bucket: std::collections::HashSet<u64> = masks.iter().copied().collect();
        let ids: Vec<String> = masks.iter().map(|&m| monomial_id(&self.lie, m)).collect();
        let grades: Vec<i64> = masks.iter().map(|&m| m.count_ones() as i64).collect();
        let mut edges = Vec::new();
        let mut triples = Vec::new();
        for &m in masks {
            for (target, nu) in boundary_targets(&self.lie, m) {
                if !in_bucket.contains(&target) {
                    return Err(Error::invariant(
                        "weight-preservation",
                        format!(
                            "edge leaves the weight class: {} -> {}",
                            monomial_id(&self.lie, m),
                            monomial_id(&self.lie, target)
                        ),
                    ));
                }
                let a = monomial_id(&self.lie, m);
                let b = monomial_id(&self.lie, target);
                edges.push((a.clone(), b.clone()));
                triples.push((a, b, nu));
            }
        }
        let graph = Graph::new(ids, edges)?;
        let nu = Connection::from_triples(&graph, triples)?;
        let chain = ChainGraph::new(GradedGraph::new(graph, grades)?, nu)?;
        if !chain.graph().is_connected() {
            return Err(Error::invariant(
                "weight-subgraph-connected",
                format!("subgraph of weight {w} is disconnected"),
            ));
        }
        Ok(WeightComponent {
            weight: w.clone(),
            matrices: masks.iter().map(|&m| TriMatrix01::new(self.n, m)).collect(),
            chain: Some(chain),
        })
    }
}

/// One weight subgraph: its matrices and, when non-empty, the induced
/// chain graph carrying the restricted signature.
#[derive(Debug, Clone)]
pub struct WeightComponent {
    pub weight: Weight,
    pub matrices: Vec<TriMatrix01>,
    pub chain: Option<ChainGraph>,
}

impl WeightComponent {
    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn size(&self) -> usize {
        self.matrices.len()
    }

    /// Counted rank: the common neighbor count.
    pub fn counted_rank(&self) -> Result<usize> {
        match &self.chain {
            None => Err(Error::domain("empty component has no rank")),
            Some(chain) => {
                if chain.graph().len() == 1 {
                    Ok(0)
                } else {
                    diamond::diamond_rank(chain.graph())
                }
            }
        }
    }

    pub fn homology(&self) -> Option<crate::homology::HomologyTable> {
        self.chain
            .as_ref()
            .map(|c| c.homology(Coefficients::Integers))
    }
}

/// Convenience wrapper building a fresh table; sweeps should build one
/// `WeightTable` and reuse it.
pub fn weight_subgraph(n: usize, w: &Weight) -> Result<WeightComponent> {
    WeightTable::build(n).component(w)
}

/// Closed-form rank: sort ascending, sum the staircase defects on both
/// sides of the diagonal plus the total deficiency.
pub fn rank_closed_form(w: &Weight) -> Result<usize> {
    if !is_admissible_weight(w) {
        return Err(Error::domain(format!("{w} is not admissible")));
    }
    let mut sorted: Vec<i64> = w.0.iter().map(|&x| x as i64).collect();
    sorted.sort_unstable();
    let mut total = 0i64;
    for (k, &ik) in sorted.iter().enumerate() {
        let k = k as i64;
        if ik < k {
            // i_k + (i_k + 1) + ... + (k - 1)
            total += (ik..k).sum::<i64>();
            total += k - ik;
        } else if ik > k {
            // -(k + 1) - ... - i_k
            total -= (k + 1..=ik).sum::<i64>();
        }
    }
    usize::try_from(total).map_err(|_| {
        Error::invariant(
            "rank-nonnegative",
            format!("closed form gives {total} for {w}"),
        )
    })
}

/// The (s,t)-shift of a weight: position s up one, position t down one.
pub fn shifted_weight(w: &Weight, s: usize, t: usize) -> Result<Weight> {
    if s == t || s > w.n() || t > w.n() {
        return Err(Error::input(format!("bad shift positions ({s},{t})")));
    }
    if w.0[t] == 0 {
        return Err(Error::input(format!("position {t} of {w} is already zero")));
    }
    let mut v = w.0.clone();
    v[s] += 1;
    v[t] -= 1;
    Ok(Weight(v))
}

/// Verifies that shifting changes the closed-form rank by exactly
/// i - j - 1 and that both values agree with counted neighbor ranks.
pub fn rank_delta_check(table: &WeightTable, w: &Weight, s: usize, t: usize) -> Result<Report> {
    let shifted = shifted_weight(w, s, t)?;
    if !is_admissible_weight(w) || !is_admissible_weight(&shifted) {
        return Err(Error::input(format!(
            "both {w} and {shifted} must be admissible"
        )));
    }
    let j = w.0[s] as i64;
    let i = w.0[t] as i64;
    let before = rank_closed_form(w)? as i64;
    let after = rank_closed_form(&shifted)? as i64;
    let mut report = Report::new();
    report.push(
        "closed-form-delta",
        after - before == i - j - 1,
        format!("{w} -> {shifted}: {after} - {before} vs {}", i - j - 1),
    );
    let counted_before = table.component(w)?.counted_rank()? as i64;
    let counted_after = table.component(&shifted)?.counted_rank()? as i64;
    report.push(
        "counted-matches-formula",
        counted_before == before && counted_after == after,
        format!("counted {counted_before}/{counted_after}, formula {before}/{after}"),
    );
    Ok(report)
}

/// A matrix of weight w with entry (s,t) clear whose (s,t)-augmentation
/// has the shifted weight. Existence is guaranteed whenever both weights
/// are admissible, so a fruitless scan is an invariant violation.
pub fn edge_witness(table: &WeightTable, w: &Weight, s: usize, t: usize) -> Result<TriMatrix01> {
    if s >= t {
        return Err(Error::input("witness positions must satisfy s < t"));
    }
    let shifted = shifted_weight(w, s, t)?;
    if !is_admissible_weight(w) || !is_admissible_weight(&shifted) {
        return Err(Error::input(format!(
            "both {w} and {shifted} must be admissible"
        )));
    }
    for &mask in table.matrices(w) {
        let m = TriMatrix01::new(table.n(), mask);
        if !m.entry(s, t) {
            let augmented = m.with_entry(s, t, true);
            debug_assert_eq!(augmented.weight(), shifted);
            return Ok(m);
        }
    }
    Err(Error::invariant(
        "edge-witness",
        format!("no matrix of weight {w} has a clear ({s},{t}) entry"),
    ))
}

/// The block swap for one adjacent transposition: exchanges the two
/// columns above the pivot, complements the pivot entry, and exchanges
/// the two row tails.
pub fn apply_transposition(m: &TriMatrix01, k: usize) -> Result<TriMatrix01> {
    let n = m.n();
    if k == 0 || k > n {
        return Err(Error::input(format!(
            "transposition index {k} out of 1..={n}"
        )));
    }
    let mut out = *m;
    for row in 0..k.saturating_sub(1) {
        let (a, b) = (m.entry(row, k - 1), m.entry(row, k));
        out = out.with_entry(row, k - 1, b).with_entry(row, k, a);
    }
    out = out.with_entry(k - 1, k, !m.entry(k - 1, k));
    for col in k + 1..=n {
        let (a, b) = (m.entry(k - 1, col), m.entry(k, col));
        out = out.with_entry(k - 1, col, b).with_entry(k, col, a);
    }
    Ok(out)
}

/// A word in adjacent transpositions, applied left to right. The map on
/// matrices depends on the word, not only on the permutation it spells,
/// so the word is the interface.
pub fn apply_word(m: &TriMatrix01, word: &[usize]) -> Result<TriMatrix01> {
    let mut out = *m;
    for &k in word {
        out = apply_transposition(&out, k)?;
    }
    Ok(out)
}

/// Applies the word to weight positions.
pub fn permute_weight(w: &Weight, word: &[usize]) -> Result<Weight> {
    let mut v = w.0.clone();
    for &k in word {
        if k == 0 || k > w.n() {
            return Err(Error::input(format!(
                "transposition index {k} out of range"
            )));
        }
        v.swap(k - 1, k);
    }
    Ok(Weight(v))
}

/// Deterministic word spelling a one-line permutation, by bubble sort.
pub fn word_for_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::input(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    // sort perm back to the identity, recording swaps; applying the word
    // to (0..n) then reproduces perm
    let mut work = perm.to_vec();
    let mut word = Vec::new();
    loop {
        let mut swapped = false;
        for k in 1..n {
            if work[k - 1] > work[k] {
                work.swap(k - 1, k);
                word.push(k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    word.reverse();
    Ok(word)
}

/// Anti-diagonal flip: entry (i,j) moves to (n-j, n-i).
pub fn transpose_map(m: &TriMatrix01) -> TriMatrix01 {
    let n = m.n();
    let mut out = TriMatrix01::zero(n);
    for j in 1..=n {
        for i in 0..j {
            if m.entry(i, j) {
                out = out.with_entry(n - j, n - i, true);
            }
        }
    }
    out
}

pub fn transpose_weight(w: &Weight) -> Weight {
    let n = w.n();
    Weight(w.0.iter().rev().map(|&x| n - x).collect())
}

/// Rotation: the last column moves, complemented, into the first row and
/// everything else shifts down the diagonal.
pub fn rotation_map(m: &TriMatrix01) -> TriMatrix01 {
    let n = m.n();
    let mut out = TriMatrix01::zero(n);
    for j in 1..=n {
        if !m.entry(j - 1, n) {
            out = out.with_entry(0, j, true);
        }
    }
    for j in 2..=n {
        for i in 1..j {
            if m.entry(i - 1, j - 1) {
                out = out.with_entry(i, j, true);
            }
        }
    }
    out
}

pub fn rotation_weight(w: &Weight) -> Weight {
    let n = w.n();
    let mut v = Vec::with_capacity(n + 1);
    v.push(w.0[n]);
    v.extend_from_slice(&w.0[..n]);
    Weight(v)
}

/// Entrywise complement.
pub fn duality_map(m: &TriMatrix01) -> TriMatrix01 {
    let full = (1u64 << (m.n() * (m.n() + 1) / 2)) - 1;
    TriMatrix01::new(m.n(), m.mask() ^ full)
}

pub fn duality_weight(w: &Weight) -> Weight {
    let n = w.n();
    Weight(w.0.iter().map(|&x| n - x).collect())
}

/// Which of the four isomorphism families to verify or apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoKind {
    Permutation(Vec<usize>),
    Transpose,
    Rotation,
    Duality,
}

fn iso_apply(kind: &IsoKind, m: &TriMatrix01) -> Result<TriMatrix01> {
    match kind {
        IsoKind::Permutation(word) => apply_word(m, word),
        IsoKind::Transpose => Ok(transpose_map(m)),
        IsoKind::Rotation => Ok(rotation_map(m)),
        IsoKind::Duality => Ok(duality_map(m)),
    }
}

pub fn iso_weight(kind: &IsoKind, w: &Weight) -> Result<Weight> {
    match kind {
        IsoKind::Permutation(word) => permute_weight(w, word),
        IsoKind::Transpose => Ok(transpose_weight(w)),
        IsoKind::Rotation => Ok(rotation_weight(w)),
        IsoKind::Duality => Ok(duality_weight(w)),
    }
}

/// Verifies an isomorphism on all of G_n: bijectivity, the weight
/// transform, edge preservation, and for the three graded families a
/// vertex sign map making the connection match, found by transport over a
/// spanning tree of each component.
pub fn verify_iso(n: usize, kind: &IsoKind) -> Result<Report> {
    let lb = LieBasis::type_a(n);
    let cg = crate::lie::exterior_chain_graph(&lb)?;
    let total = 1u64 << (n * (n + 1) / 2);
    let mut image = vec![u64::MAX; total as usize];
    let mut seen = vec![false; total as usize];
    let mut report = Report::new();
    let mut bijective = true;
    let mut weights_ok = true;
    for mask in 0..total {
        let m = TriMatrix01::new(n, mask);
        let out = iso_apply(kind, &m)?;
        image[mask as usize] = out.mask();
        if std::mem::replace(&mut seen[out.mask() as usize], true) {
            bijective = false;
        }
        if iso_weight(kind, &m.weight())? != out.weight() {
            weights_ok = false;
        }
    }
    report.push("bijective", bijective, format!("on {total} vertices"));
    report.push("weight-transform", weights_ok, "per-vertex weight images");
    let g = cg.graph();
    let mut edges_ok = true;
    for &(u, v) in g.edges() {
        let mu = crate::lie::parse_monomial_id(&lb, g.id(u))?;
        let mv = crate::lie::parse_monomial_id(&lb, g.id(v))?;
        let iu = monomial_id(&lb, image[mu as usize]);
        let iv = monomial_id(&lb, image[mv as usize]);
        if !g.has_edge(g.vertex(&iu)?, g.vertex(&iv)?) {
            edges_ok = false;
        }
    }
    report.push(
        "edges-preserved",
        edges_ok,
        format!("{} edges", g.edges().len()),
    );
    if matches!(kind, IsoKind::Permutation(_)) {
        return Ok(report);
    }
    // graded families: recover the sign map by transport
    let mut gauge_ok = true;
    for comp in g.components() {
        let mut sign: BTreeMap<usize, i64> = BTreeMap::new();
        sign.insert(comp[0], 1);
        let mut stack = vec![comp[0]];
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if sign.contains_key(&w) {
                    continue;
                }
                let (iv, iw) = (&image_id(&lb, g, &image, v), &image_id(&lb, g, &image, w));
                let ratio = cg.nu().value(v, w) * cg.nu().value(g.vertex(iv)?, g.vertex(iw)?);
                sign.insert(w, sign[&v] * ratio);
                stack.push(w);
            }
        }
        for &(u, v) in g.edges() {
            if !comp.contains(&u) {
                continue;
            }
            let (iu, iv) = (&image_id(&lb, g, &image, u), &image_id(&lb, g, &image, v));
            let lhs = cg.nu().value(u, v);
            let rhs = sign[&u] * sign[&v] * cg.nu().value(g.vertex(iu)?, g.vertex(iv)?);
            if lhs != rhs {
                gauge_ok = false;
            }
        }
    }
    report.push(
        "sign-gauge",
        gauge_ok,
        "a vertex sign map matches the transported connection",
    );
    Ok(report)
}

fn image_id(lb: &LieBasis, g: &Graph, image: &[u64], v: usize) -> String {
    let mask = crate::lie::parse_monomial_id(lb, g.id(v)).expect("vertex ids parse");
    monomial_id(lb, image[mask as usize])
}

/// Verifies the product structure of a reducible weight: the subgraph has
/// the product size and, up to the degree shift of the embedding, the
/// product homology.
pub fn verify_product_iso(table: &WeightTable, w: &Weight) -> Result<Report> {
    let Some(reduction) = is_reducible(w)? else {
        return Err(Error::domain(format!("{w} is not reducible")));
    };
    let mut report = Report::new();
    let left_table = WeightTable::build(reduction.left.n());
    let right_table = WeightTable::build(reduction.right.n());
    let whole = table.component(w)?;
    let left = left_table.component(&reduction.left)?;
    let right = right_table.component(&reduction.right)?;
    report.push(
        "size-product",
        whole.size() == left.size() * right.size(),
        format!(
            "|G{w}| = {} vs |G{}| * |G{}| = {} * {}",
            whole.size(),
            reduction.left,
            reduction.right,
            left.size(),
            right.size()
        ),
    );
    let (Some(wc), Some(lc), Some(rc)) = (&whole.chain, &left.chain, &right.chain) else {
        report.push("components-non-empty", false, "an empty factor");
        return Ok(report);
    };
    // degree shift: cross entries forced to one, counted by inverted
    // position pairs between the factor embeddings
    let shift = {
        let n = w.n();
        let complement: Vec<usize> = (0..=n)
            .filter(|p| !reduction.positions.contains(p))
            .collect();
        let mut count = 0i64;
        for &q in &complement {
            for &p in &reduction.positions {
                if q < p {
                    count += 1;
                }
            }
        }
        count
    };
    let product = homology::product(lc, rc)?;
    let hp = product.homology(Coefficients::Integers).shifted(shift);
    let hw = wc.homology(Coefficients::Integers);
    report.push(
        "homology-matches-product",
        hp == hw,
        format!("product (shift {shift}) {hp:?} vs subgraph {hw:?}"),
    );
    Ok(report)
}

/// Admissibility matches non-emptiness over every tuple with the correct
/// total (entries bounded by n, which realized weights never exceed).
pub fn verify_nonempty_iff_admissible(table: &WeightTable) -> Report {
    let n = table.n();
    let mut report = Report::new();
    let mut all_ok = true;
    let mut checked = 0u64;
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == n + 1 {
            if prefix.iter().sum::<usize>() == triangular(n) {
                let w = Weight(prefix);
                let admissible = is_admissible_weight(&w);
                let nonempty = !table.matrices(&w).is_empty();
                if admissible != nonempty {
                    all_ok = false;
                    report.push(
                        format!("weight-{w}"),
                        false,
                        format!("admissible {admissible} but non-empty {nonempty}"),
                    );
                }
                checked += 1;
            }
            continue;
        }
        for x in (0..=n).rev() {
            let mut next = prefix.clone();
            next.push(x);
            if next.iter().sum::<usize>() <= triangular(n) {
                stack.push(next);
            }
        }
    }
    report.push(
        "admissible-iff-nonempty",
        all_ok,
        format!("{checked} tuples with the correct total"),
    );
    report
}

/// Connectivity of every weight subgraph, weights as the components of
/// the full graph, and edge witnesses for every admissible adjacent shift.
pub fn verify_connectivity_and_witnesses(table: &WeightTable) -> Result<Report> {
    let mut report = Report::new();
    let n = table.n();
    let weights: Vec<Weight> = table.weights().cloned().collect();
    let results: Vec<(Weight, bool)> = weights
        .par_iter()
        .map(|w| {
            let connected = table.component(w).is_ok();
            (w.clone(), connected)
        })
        .collect();
    let mut all_connected = true;
    for (w, connected) in &results {
        if !connected {
            all_connected = false;
            report.push(format!("connected-{w}"), false, "subgraph is disconnected");
        }
    }
    report.push(
        "all-weight-subgraphs-connected",
        all_connected,
        format!("{} weights", weights.len()),
    );
    // the components of the full graph are exactly the weights
    let lb = table.lie();
    let cg = crate::lie::exterior_chain_graph(lb)?;
    let comps = cg.graph().components();
    report.push(
        "component-count",
        comps.len() == weights.len(),
        format!("{} components vs {} weights", comps.len(), weights.len()),
    );
    let mut weight_per_component = true;
    let mut seen: std::collections::HashSet<Weight> = std::collections::HashSet::new();
    for comp in &comps {
        let mut ws = comp.iter().map(|&v| {
            let mask = crate::lie::parse_monomial_id(lb, cg.graph().id(v)).expect("id parses");
            TriMatrix01::new(n, mask).weight()
        });
        let first = ws.next().expect("non-empty component");
        if !ws.all(|w| w == first) || !seen.insert(first) {
            weight_per_component = false;
        }
    }
    report.push(
        "weights-constant-and-distinct",
        weight_per_component,
        "each component carries one weight, no weight repeats",
    );
    report.push(
        "sizes-sum-to-total",
        table.total_vertices() == 1u64 << (n * (n + 1) / 2),
        "bucket sizes cover every matrix",
    );
    // edge witnesses for admissible shifts
    let mut witnesses_ok = true;
    for w in &weights {
        for s in 0..n {
            for t in s + 1..=n {
                let Ok(shifted) = shifted_weight(w, s, t) else {
                    continue;
                };
                if !is_admissible_weight(&shifted) {
                    continue;
                }
                if edge_witness(table, w, s, t).is_err() {
                    witnesses_ok = false;
                    report.push(
                        format!("witness-{w}-{s}-{t}"),
                        false,
                        "no augmentable matrix found",
                    );
                }
            }
        }
    }
    report.push("edge-witnesses", witnesses_ok, "all admissible shifts");
    Ok(report)
}

/// Rank formula and shift deltas over the whole admissible set.
pub fn verify_rank_formula(table: &WeightTable) -> Result<Report> {
    let mut report = Report::new();
    let weights: Vec<Weight> = table.weights().cloned().collect();
    let n = table.n();
    let checks: Vec<(Weight, bool, String)> = weights
        .par_iter()
        .map(|w| {
            let formula = rank_closed_form(w);
            let counted = table.component(w).and_then(|c| c.counted_rank());
            match (formula, counted) {
                (Ok(f), Ok(c)) => (w.clone(), f == c, format!("formula {f}, counted {c}")),
                (f, c) => (w.clone(), false, format!("formula {f:?}, counted {c:?}")),
            }
        })
        .collect();
    let mut all_ok = true;
    for (w, ok, detail) in checks {
        if !ok {
            all_ok = false;
            report.push(format!("rank-{w}"), false, detail);
        }
    }
    report.push(
        "rank-formula-matches-counted",
        all_ok,
        format!("{} weights", weights.len()),
    );
    let mut deltas_ok = true;
    for w in &weights {
        for s in 0..=n {
            for t in 0..=n {
                if s == t {
                    continue;
                }
                let Ok(shifted) = shifted_weight(w, s, t) else {
                    continue;
                };
                if !is_admissible_weight(&shifted) {
                    continue;
                }
                let i = w.0[t] as i64;
                let j = w.0[s] as i64;
                let delta = rank_closed_form(&shifted)? as i64 - rank_closed_form(w)? as i64;
                if delta != i - j - 1 {
                    deltas_ok = false;
                    report.push(
                        format!("delta-{w}-{s}-{t}"),
                        false,
                        format!("delta {delta} vs {}", i - j - 1),
                    );
                }
            }
        }
    }
    report.push("shift-deltas", deltas_ok, "all admissible shifts");
    Ok(report)
}

/// The two degenerate product families: inserting a zero entry (with every
/// other entry up one) or inserting the new maximal entry reproduces the
/// base subgraph, up to the degree shift of the embedding.
pub fn verify_collapse_rules(table: &WeightTable, base: &WeightTable) -> Result<Report> {
    let n = table.n();
    if base.n() + 1 != n {
        return Err(Error::input(format!(
            "tables for n = {} and n = {n} are not consecutive",
            base.n()
        )));
    }
    let mut report = Report::new();
    let mut all_ok = true;
    let mut checked = 0u32;
    for w_base in base.weights().cloned().collect::<Vec<_>>() {
        let base_component = base.component(&w_base)?;
        let base_h = base_component
            .homology()
            .ok_or_else(|| Error::invariant("weight-subgraph-nonempty", format!("{w_base}")))?;
        for k in 0..=n {
            for (rule, built, shift) in [
                (
                    "insert-zero",
                    {
                        let mut v: Vec<usize> = w_base.0.iter().map(|&x| x + 1).collect();
                        v.insert(k, 0);
                        Weight(v)
                    },
                    k as i64,
                ),
                (
                    "insert-max",
                    {
                        let mut v = w_base.0.clone();
                        v.insert(k, n);
                        Weight(v)
                    },
                    (n - k) as i64,
                ),
            ] {
                checked += 1;
                let component = table.component(&built)?;
                let sizes_ok = component.size() == base_component.size();
                let homology_ok = component.homology() == Some(base_h.shifted(shift));
                if !(sizes_ok && homology_ok) {
                    all_ok = false;
                    report.push(
                        format!("{rule}-{w_base}-at-{k}"),
                        false,
                        format!(
                            "built {built}: sizes {}/{}, shift {shift}",
                            component.size(),
                            base_component.size()
                        ),
                    );
                }
            }
        }
    }
    report.push(
        "collapse-rules",
        all_ok,
        format!("{checked} insertions against the base table"),
    );
    Ok(report)
}

/// Reducible weights: sizes and homology match the factor products; the
/// two collapse families with a trivial factor reduce to the bare factor.
pub fn verify_reducible_products(table: &WeightTable) -> Result<Report> {
    let mut report = Report::new();
    let weights: Vec<Weight> = table.weights().cloned().collect();
    let mut all_ok = true;
    let mut reducible_count = 0;
    for w in &weights {
        if is_reducible(w)?.is_none() {
            continue;
        }
        reducible_count += 1;
        let sub = verify_product_iso(table, w)?;
        if !sub.ok {
            all_ok = false;
            for line in sub.lines {
                report.push(format!("{w}-{}", line.name), line.ok, line.detail);
            }
        }
    }
    report.push(
        "reducible-products",
        all_ok,
        format!("{reducible_count} reducible weights"),
    );
    Ok(report)
}
