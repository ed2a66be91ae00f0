//! Integral Lie algebras presented by structure constants on an ordered
//! base, the diamond root-system axioms, and the exterior chain graph whose
//! vertices are square-free monomials graded by length.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::connection::{self, Connection};
use crate::diamond::Diamond;
use crate::graph::{GradedGraph, Graph};
use crate::homology::{ChainGraph, Coefficients, HomologyTable, Report};
use crate::io::StructureConstantsFile;
use crate::{Error, Result};

/// A Lie algebra over the integers with ordered base symbols; brackets are
/// stored for index pairs i < j, antisymmetry is built in.
#[derive(Debug, Clone)]
pub struct LieBasis {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    brackets: BTreeMap<(usize, usize), Vec<(i64, usize)>>,
}

impl LieBasis {
    pub fn new(
        symbols: Vec<String>,
        raw: impl IntoIterator<Item = (String, String, Vec<(i64, String)>)>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate symbol {s:?}")));
            }
        }
        let mut brackets: BTreeMap<(usize, usize), Vec<(i64, usize)>> = BTreeMap::new();
        for (x, y, terms) in raw {
            let xi = *index
                .get(&x)
                .ok_or_else(|| Error::input(format!("unknown symbol {x:?}")))?;
            let yi = *index
                .get(&y)
                .ok_or_else(|| Error::input(format!("unknown symbol {y:?}")))?;
            if xi == yi {
                return Err(Error::input(format!("bracket [{x}, {x}] must be zero")));
            }
            let flip = xi > yi;
            let key = (xi.min(yi), xi.max(yi));
            let mut combined: BTreeMap<usize, i64> = brackets
                .remove(&key)
                .unwrap_or_default()
                .into_iter()
                .map(|(c, z)| (z, c))
                .collect();
            for (c, z) in terms {
                let zi = *index
                    .get(&z)
                    .ok_or_else(|| Error::input(format!("unknown symbol {z:?}")))?;
                *combined.entry(zi).or_insert(0) += if flip { -c } else { c };
            }
            let list: Vec<(i64, usize)> = combined
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|(z, c)| (c, z))
                .collect();
            if !list.is_empty() {
                brackets.insert(key, list);
            }
        }
        Ok(LieBasis {
            symbols,
            index,
            brackets,
        })
    }

    pub fn from_file(file: &StructureConstantsFile) -> Result<Self> {
        LieBasis::new(
            file.symbols.clone(),
            file.brackets.iter().map(|b| {
                (
                    b.x.clone(),
                    b.y.clone(),
                    b.terms.iter().map(|t| (t.c, t.z.clone())).collect(),
                )
            }),
        )
    }

    /// Strictly upper-triangular (n+1)x(n+1) integer matrices. Generators
    /// are listed column by column, the row index decreasing inside a
    /// column, matching the square-free monomial order.
    pub fn type_a(n: usize) -> Self {
        assert!(n <= 9, "single-digit indices only");
        let positions = type_a_positions(n);
        let symbols: Vec<String> = positions.iter().map(|&(i, j)| format!("e{i}{j}")).collect();
        let mut raw = Vec::new();
        for (a, &(i, j)) in positions.iter().enumerate() {
            for &(k, l) in positions.iter().skip(a + 1) {
                let mut terms: Vec<(i64, String)> = Vec::new();
                if j == k {
                    terms.push((1, format!("e{i}{l}")));
                }
                if l == i {
                    terms.push((-1, format!("e{k}{j}")));
                }
                if !terms.is_empty() {
                    raw.push((symbols[a].clone(), format!("e{k}{l}"), terms));
                }
            }
        }
        LieBasis::new(symbols, raw).expect("matrix bracket is well-formed")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol_index(&self, s: &str) -> Result<usize> {
        self.index
            .get(s)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown symbol {s:?}")))
    }

    /// Bracket of two base symbols as a combination, antisymmetry applied.
    pub fn bracket(&self, a: usize, b: usize) -> Vec<(i64, usize)> {
        if a == b {
            return Vec::new();
        }
        let key = (a.min(b), a.max(b));
        let Some(terms) = self.brackets.get(&key) else {
            return Vec::new();
        };
        if a < b {
            terms.clone()
        } else {
            terms.iter().map(|&(c, z)| (-c, z)).collect()
        }
    }

    /// The symbol of a single-term unit bracket, when the bracket has that
    /// shape.
    fn bracket_symbol(&self, a: usize, b: usize) -> Option<usize> {
        let terms = self.bracket(a, b);
        match terms.as_slice() {
            [(c, z)] if c.abs() == 1 => Some(*z),
            _ => None,
        }
    }

    fn bracket_combination(&self, lhs: &[(i64, usize)], rhs: &[(i64, usize)]) -> Vec<(i64, usize)> {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for &(ca, sa) in lhs {
            for &(cb, sb) in rhs {
                for (c, z) in self.bracket(sa, sb) {
                    *acc.entry(z).or_insert(0) += ca * cb * c;
                }
            }
        }
        acc.into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(z, c)| (c, z))
            .collect()
    }
}

/// Generator positions of the strictly upper-triangular
/// algebra: by column, row descending within a column.
pub fn type_a_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for j in 1..=n {
        for i in (0..j).rev() {
            out.push((i, j));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct JacobiReport {
    pub ok: bool,
    /// First violating triple of symbols, with the nonzero defect.
    pub violation: Option<(String, String, String, Vec<(i64, String)>)>,
}

/// Expands the Jacobi sum for every triple of base symbols.
pub fn validate_lie(lb: &LieBasis) -> JacobiReport {
    let n = lb.len();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let e = |s: usize| vec![(1i64, s)];
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for (lhs, rhs) in [((x, y), z), ((y, z), x), ((z, x), y)] {
                    let inner = lb.bracket(lhs.0, lhs.1);
                    for (c, s) in lb.bracket_combination(&inner, &e(rhs)) {
                        *acc.entry(s).or_insert(0) += c;
                    }
                }
                let defect: Vec<(i64, String)> = acc
                    .into_iter()
                    .filter(|&(_, c)| c != 0)
                    .map(|(s, c)| (c, lb.symbols[s].clone()))
                    .collect();
                if !defect.is_empty() {
                    return JacobiReport {
                        ok: false,
                        violation: Some((
                            lb.symbols[x].clone(),
                            lb.symbols[y].clone(),
                            lb.symbols[z].clone(),
                            defect,
                        )),
                    };
                }
            }
        }
    }
    JacobiReport {
        ok: true,
        violation: None,
    }
}

#[derive(Debug, Clone)]
pub struct RootSystemReport {
    pub ok: bool,
    /// (axiom number, detail) for the first failure.
    pub first_violation: Option<(u8, String)>,
    /// For each pair of pairs sharing a bracket, the ordering of the four
    /// elements under which the factorization axiom was satisfied. The
    /// statement fixes no ordering, so the one that worked is reported.
    pub factorizations: Vec<String>,
}

/// Checks the four diamond root-system axioms literally. Negated base
/// elements cannot occur in this encoding, so the first axiom reduces to
/// the coefficient conditions checked with the second.
pub fn is_diamond_root_system(lb: &LieBasis) -> Result<RootSystemReport> {
    let jacobi = validate_lie(lb);
    if !jacobi.ok {
        return Err(Error::input(format!(
            "not a Lie algebra: Jacobi fails at {:?}",
            jacobi.violation
        )));
    }
    let fail = |axiom: u8, detail: String| {
        Ok(RootSystemReport {
            ok: false,
            first_violation: Some((axiom, detail)),
            factorizations: Vec::new(),
        })
    };
    let mut factorizations: Vec<String> = Vec::new();
    let n = lb.len();
    // axiom 2: brackets land in +-S minus the operands, or vanish
    for a in 0..n {
        for b in a + 1..n {
            let terms = lb.bracket(a, b);
            if terms.is_empty() {
                continue;
            }
            match terms.as_slice() {
                [(c, z)] if c.abs() == 1 => {
                    if *z == a || *z == b {
                        return fail(
                            2,
                            format!("[{}, {}] lands on an operand", lb.symbols[a], lb.symbols[b]),
                        );
                    }
                }
                _ => {
                    return fail(
                        2,
                        format!(
                            "[{}, {}] = {:?} is not a unit multiple of one base symbol",
                            lb.symbols[a],
                            lb.symbols[b],
                            terms
                                .iter()
                                .map(|&(c, z)| (c, lb.symbols[z].clone()))
                                .collect::<Vec<_>>()
                        ),
                    );
                }
            }
        }
    }
    // axiom 3: whenever both inner brackets are nonzero, the outer
    // bracket vanishes, the inner brackets differ, and the two
    // associations of the triple bracket agree on one base symbol. The
    // triple bracket may vanish; adjacency requires it nonzero.
    for alpha in 0..n {
        for beta in 0..n {
            for gamma in 0..n {
                if alpha == beta || beta == gamma || alpha == gamma {
                    continue;
                }
                let (Some(s1), Some(s2)) = (
                    lb.bracket_symbol(alpha, beta),
                    lb.bracket_symbol(beta, gamma),
                ) else {
                    continue;
                };
                let names = || {
                    format!(
                        "({}, {}, {})",
                        lb.symbols[alpha], lb.symbols[beta], lb.symbols[gamma]
                    )
                };
                if !lb.bracket(alpha, gamma).is_empty() {
                    return fail(3, format!("triple {} with nonzero outer bracket", names()));
                }
                if s1 == s2 {
                    return fail(3, format!("triple {} with equal inner brackets", names()));
                }
                let w1 = lb.bracket_symbol(s1, gamma);
                let w2 = lb.bracket_symbol(alpha, s2);
                let left_zero = lb.bracket(s1, gamma).is_empty();
                let right_zero = lb.bracket(alpha, s2).is_empty();
                let consistent = match (left_zero, right_zero) {
                    (true, true) => true,
                    (false, false) => matches!((w1, w2), (Some(a), Some(b)) if a == b),
                    _ => false,
                };
                if !consistent {
                    return fail(
                        3,
                        format!(
                            "triple {} whose two triple-bracket associations disagree",
                            names()
                        ),
                    );
                }
            }
        }
    }
    // axiom 4: equal brackets factor through an adjacent triple, with the
    // asymmetric exclusion on the roles of the ends
    let mut by_symbol: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            if let Some(z) = lb.bracket_symbol(a, b) {
                by_symbol.entry(z).or_default().push((a, b));
            }
        }
    }
    let adjacent_with = |alpha: usize, target_symbol: usize| -> bool {
        // some adjacent (alpha, beta', gamma') with [beta', gamma'] = +-target
        for &(bp, gp) in by_symbol.get(&target_symbol).map_or(&[][..], |v| v) {
            for (b2, g2) in [(bp, gp), (gp, bp)] {
                if b2 != alpha && g2 != alpha && !lb.bracket(alpha, b2).is_empty() {
                    return true;
                }
            }
        }
        false
    };
    for (&_w, pairs) in &by_symbol {
        for (i, &p1) in pairs.iter().enumerate() {
            for &p2 in &pairs[i + 1..] {
                if p1.0 == p2.0 || p1.0 == p2.1 || p1.1 == p2.0 || p1.1 == p2.1 {
                    continue;
                }
                let mut satisfied = None;
                'arr: for (first, second) in [(p1, p2), (p2, p1)] {
                    for (xi, eta) in [(first.0, first.1), (first.1, first.0)] {
                        for (sigma, tau) in [(second.0, second.1), (second.1, second.0)] {
                            // positive part: adjacent (xi, beta, tau) with
                            // [beta, tau] = +-eta and [xi, beta] = +-sigma
                            let found = (0..n).find(|&beta| {
                                beta != xi
                                    && beta != tau
                                    && lb.bracket_symbol(beta, tau) == Some(eta)
                                    && lb.bracket_symbol(xi, beta) == Some(sigma)
                            });
                            if let Some(beta) = found {
                                if !adjacent_with(eta, xi) {
                                    satisfied = Some(format!(
                                        "[{},{}] = [{},{}]: ordering (xi={}, eta={}, sigma={}, \
                                         tau={}) via beta = {}",
                                        lb.symbols[p1.0],
                                        lb.symbols[p1.1],
                                        lb.symbols[p2.0],
                                        lb.symbols[p2.1],
                                        lb.symbols[xi],
                                        lb.symbols[eta],
                                        lb.symbols[sigma],
                                        lb.symbols[tau],
                                        lb.symbols[beta]
                                    ));
                                    break 'arr;
                                }
                            }
                        }
                    }
                }
                if let Some(line) = satisfied {
                    factorizations.push(line);
                } else {
                    return fail(
                        4,
                        format!(
                            "pairs [{}, {}] and [{}, {}] share a bracket but admit no \
                             factorization through an adjacent triple",
                            lb.symbols[p1.0], lb.symbols[p1.1], lb.symbols[p2.0], lb.symbols[p2.1]
                        ),
                    );
                }
            }
        }
    }
    Ok(RootSystemReport {
        ok: true,
        first_violation: None,
        factorizations,
    })
}

/// Vertex id of a square-free monomial mask: symbols joined by dots, "1"
/// for the empty product.
pub fn monomial_id(lb: &LieBasis, mask: u64) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for s in 0..lb.len() {
        if mask >> s & 1 == 1 {
            parts.push(lb.symbols[s].as_str());
        }
    }
    parts.join(".")
}

pub fn parse_monomial_id(lb: &LieBasis, id: &str) -> Result<u64> {
    if id == "1" {
        return Ok(0);
    }
    let mut mask = 0u64;
    for part in id.split('.') {
        mask |= 1 << lb.symbol_index(part)?;
    }
    Ok(mask)
}

/// Down-neighbors of a monomial under the exterior differential: for each
/// factor pair the bracket replaces the pair, with the permutation sign of
/// the pair positions and of re-sorting the bracket symbol folded in.
pub fn boundary_targets(lb: &LieBasis, mask: u64) -> Vec<(u64, i64)> {
    let bits: Vec<usize> = (0..lb.len()).filter(|&s| mask >> s & 1 == 1).collect();
    let mut out = Vec::new();
    for u in 0..bits.len() {
        for v in u + 1..bits.len() {
            let terms = lb.bracket(bits[u], bits[v]);
            if terms.is_empty() {
                continue;
            }
            let rest = mask & !(1u64 << bits[u]) & !(1u64 << bits[v]);
            let pair_sign = if (v - u) % 2 == 1 { -1 } else { 1 };
            for (c, k) in terms {
                if rest >> k & 1 == 1 {
                    continue;
                }
                let below = (rest & ((1u64 << k) - 1)).count_ones();
                let insert_sign = if below % 2 == 1 { -1 } else { 1 };
                out.push((rest | 1 << k, c * pair_sign * insert_sign));
            }
        }
    }
    out
}

/// The exterior chain graph: all square-free monomials graded by length,
/// with the connection read off the differential. Fails when the input is
/// not a Lie algebra, since the chain condition is the Jacobi identity.
pub fn exterior_chain_graph(lb: &LieBasis) -> Result<ChainGraph> {
    if lb.len() > 22 {
        return Err(Error::input(format!(
            "{} generators give 2^{} monomials; refusing",
            lb.len(),
            lb.len()
        )));
    }
    let total = 1u64 << lb.len();
    let ids: Vec<String> = (0..total).map(|m| monomial_id(lb, m)).collect();
    let grades: Vec<i64> = (0..total).map(|m| m.count_ones() as i64).collect();
    let mut edges = Vec::new();
    let mut triples = Vec::new();
    for m in 0..total {
        for (target, nu) in boundary_targets(lb, m) {
            edges.push((ids[m as usize].clone(), ids[target as usize].clone()));
            triples.push((ids[m as usize].clone(), ids[target as usize].clone(), nu));
        }
    }
    let graph = Graph::new(ids, edges)?;
    let nu = Connection::from_triples(&graph, triples)?;
    ChainGraph::new(GradedGraph::new(graph, grades)?, nu)
}

/// The six shapes a diamond of an exterior chain graph can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiamondType {
    /// Two disjoint bracket pairs acting independently.
    DisjointBrackets,
    /// An adjacent triple collapsing to its full bracket.
    AdjacentTriple,
    /// An adjacent triple with the inner bracket present as a factor.
    OneBracketFactor,
    /// An adjacent triple with both inner brackets present as factors.
    TwoBracketFactors,
    /// A flat diamond sharing the middle of an adjacent triple.
    FlatSharedMiddle,
    /// A flat diamond carrying the full triple bracket as a factor.
    FlatTripleBracket,
}

impl DiamondType {
    pub fn tag(&self) -> u8 {
        match self {
            DiamondType::DisjointBrackets => 1,
            DiamondType::AdjacentTriple => 2,
            DiamondType::OneBracketFactor => 3,
            DiamondType::TwoBracketFactors => 4,
            DiamondType::FlatSharedMiddle => 5,
            DiamondType::FlatTripleBracket => 6,
        }
    }
}

impl std::fmt::Display for DiamondType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.tag())
    }
}

type SymbolSet = BTreeSet<usize>;

fn mask_to_set(mask: u64) -> SymbolSet {
    (0..64).filter(|&s| mask >> s & 1 == 1).collect()
}

/// Classifies a diamond of the exterior chain graph of `lb` against the
/// six shapes; exactly one must match.
pub fn classify_diamond(lb: &LieBasis, dm: &Diamond) -> Result<DiamondType> {
    let masks: Vec<u64> = dm
        .vertices()
        .iter()
        .map(|id| parse_monomial_id(lb, id))
        .collect::<Result<_>>()?;
    let sets: Vec<SymbolSet> = masks.iter().map(|&m| mask_to_set(m)).collect();
    let sizes: Vec<usize> = sets.iter().map(BTreeSet::len).collect();
    let max = *sizes.iter().max().unwrap();
    let min = *sizes.iter().min().unwrap();

    let mut matches: BTreeSet<DiamondType> = BTreeSet::new();
    let union: Vec<usize> = sets
        .iter()
        .flat_map(|s| s.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let sym = |a: usize, b: usize| lb.bracket_symbol(a, b);
    let triple_sym = |a: usize, b: usize, g: usize| -> Option<usize> {
        let s1 = sym(a, b)?;
        sym(s1, g)
    };
    let with = |base: &SymbolSet, add: &[usize]| -> Option<SymbolSet> {
        let mut s = base.clone();
        for &x in add {
            if !s.insert(x) {
                return None;
            }
        }
        Some(s)
    };
    let without = |base: &SymbolSet, drop: &[usize]| -> Option<SymbolSet> {
        let mut s = base.clone();
        for &x in drop {
            if !s.remove(&x) {
                return None;
            }
        }
        Some(s)
    };

    if max - min == 2 {
        // vertical: unique top and bottom at opposite corners of the cycle
        let t = sizes.iter().position(|&s| s == max).unwrap();
        let b = sizes.iter().position(|&s| s == min).unwrap();
        let mids: Vec<usize> = (0..4).filter(|&i| i != t && i != b).collect();
        let top = &sets[t];
        let bottom = &sets[b];
        let (m1, m2) = (&sets[mids[0]], &sets[mids[1]]);

        // type 1: both moves remove disjoint pairs and add distinct symbols
        {
            let r1: Vec<usize> = top.difference(m1).copied().collect();
            let w1: Vec<usize> = m1.difference(top).copied().collect();
            let r2: Vec<usize> = top.difference(m2).copied().collect();
            let w2: Vec<usize> = m2.difference(top).copied().collect();
            if r1.len() == 2
                && w1.len() == 1
                && r2.len() == 2
                && w2.len() == 1
                && w1[0] != w2[0]
                && r1.iter().all(|x| !r2.contains(x))
                && sym(r1[0], r1[1]) == Some(w1[0])
                && sym(r2[0], r2[1]) == Some(w2[0])
            {
                if let Some(expect) = without(top, &[r1[0], r1[1], r2[0], r2[1]])
                    .and_then(|s| with(&s, &[w1[0], w2[0]]))
                {
                    if expect == *bottom {
                        matches.insert(DiamondType::DisjointBrackets);
                    }
                }
            }
        }
        // types 2, 3, 4: search the adjacent triple
        for &alpha in &union {
            for &beta in &union {
                for &gamma in &union {
                    if alpha == beta || beta == gamma || alpha == gamma {
                        continue;
                    }
                    let (Some(s1), Some(s2)) = (sym(alpha, beta), sym(beta, gamma)) else {
                        continue;
                    };
                    let Some(w) = triple_sym(alpha, beta, gamma) else {
                        continue;
                    };
                    // type 2: top = abg x
                    if let Some(x) = without(top, &[alpha, beta, gamma]) {
                        let shape = (|| {
                            let u1 = with(&x, &[alpha, s2])?;
                            let u2 = with(&x, &[gamma, s1])?;
                            let bot = with(&x, &[w])?;
                            Some((u1, u2, bot))
                        })();
                        if let Some((u1, u2, bot)) = shape {
                            if bot == *bottom
                                && ((u1 == *m1 && u2 == *m2) || (u1 == *m2 && u2 == *m1))
                            {
                                matches.insert(DiamondType::AdjacentTriple);
                            }
                        }
                    }
                    // type 3: top = abg[ab] x
                    if let Some(x) = without(top, &[alpha, beta, gamma, s1]) {
                        let shape = (|| {
                            let u1 = with(&x, &[alpha, s1, s2])?;
                            let u2 = with(&x, &[alpha, beta, w])?;
                            let bot = with(&x, &[s1, w])?;
                            Some((u1, u2, bot))
                        })();
                        if let Some((u1, u2, bot)) = shape {
                            if bot == *bottom
                                && ((u1 == *m1 && u2 == *m2) || (u1 == *m2 && u2 == *m1))
                            {
                                matches.insert(DiamondType::OneBracketFactor);
                            }
                        }
                    }
                    // type 4: top = abg[ab][bg] x
                    if let Some(x) = without(top, &[alpha, beta, gamma, s1, s2]) {
                        let shape = (|| {
                            let u1 = with(&x, &[alpha, beta, s2, w])?;
                            let u2 = with(&x, &[beta, gamma, s1, w])?;
                            let bot = with(&x, &[s1, s2, w])?;
                            Some((u1, u2, bot))
                        })();
                        if let Some((u1, u2, bot)) = shape {
                            if bot == *bottom
                                && ((u1 == *m1 && u2 == *m2) || (u1 == *m2 && u2 == *m1))
                            {
                                matches.insert(DiamondType::TwoBracketFactors);
                            }
                        }
                    }
                }
            }
        }
    } else if max - min == 1 {
        // flat: two tops and two bottoms at opposite corners
        let tops: Vec<usize> = (0..4).filter(|&i| sizes[i] == max).collect();
        let bots: Vec<usize> = (0..4).filter(|&i| sizes[i] == min).collect();
        for &(t1, t2) in &[(tops[0], tops[1]), (tops[1], tops[0])] {
            let (u1, u2) = (&sets[t1], &sets[t2]);
            let (d1, d2) = (&sets[bots[0]], &sets[bots[1]]);
            for &alpha in &union {
                for &beta in &union {
                    for &gamma in &union {
                        if alpha == beta || beta == gamma || alpha == gamma {
                            continue;
                        }
                        let (Some(s1), Some(s2)) = (sym(alpha, beta), sym(beta, gamma)) else {
                            continue;
                        };
                        let Some(w) = triple_sym(alpha, beta, gamma) else {
                            continue;
                        };
                        // type 5: tops ab[bg] x and bg[ab] x
                        if let Some(x) = without(u1, &[alpha, beta, s2]) {
                            let shape = (|| {
                                let top2 = with(&x, &[beta, gamma, s1])?;
                                let bot1 = with(&x, &[s1, s2])?;
                                let bot2 = with(&x, &[beta, w])?;
                                Some((top2, bot1, bot2))
                            })();
                            if let Some((top2, bot1, bot2)) = shape {
                                if top2 == *u2
                                    && ((bot1 == *d1 && bot2 == *d2)
                                        || (bot1 == *d2 && bot2 == *d1))
                                {
                                    matches.insert(DiamondType::FlatSharedMiddle);
                                }
                            }
                        }
                        // type 6: tops ag[ab][bg] x and abg[abg] x
                        if let Some(x) = without(u1, &[alpha, gamma, s1, s2]) {
                            let shape = (|| {
                                let top2 = with(&x, &[alpha, beta, gamma, w])?;
                                let bot1 = with(&x, &[alpha, s2, w])?;
                                let bot2 = with(&x, &[gamma, s1, w])?;
                                Some((top2, bot1, bot2))
                            })();
                            if let Some((top2, bot1, bot2)) = shape {
                                if top2 == *u2
                                    && ((bot1 == *d1 && bot2 == *d2)
                                        || (bot1 == *d2 && bot2 == *d1))
                                {
                                    matches.insert(DiamondType::FlatTripleBracket);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    match matches.len() {
        1 => Ok(matches.into_iter().next().unwrap()),
        0 => Err(Error::invariant(
            "diamond-classification",
            format!("no shape matches the diamond {dm:?}"),
        )),
        _ => Err(Error::invariant(
            "diamond-classification",
            format!("shapes {matches:?} all match the diamond {dm:?}"),
        )),
    }
}

#[derive(Debug, Clone)]
pub struct ComponentEntry {
    pub chain: ChainGraph,
    pub rank: u64,
    pub homology: HomologyTable,
}

#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    pub components: Vec<ComponentEntry>,
}

impl ComponentDecomposition {
    pub fn total_homology(&self) -> HomologyTable {
        let mut acc = HomologyTable::new(Coefficients::Integers, BTreeMap::new());
        for entry in &self.components {
            acc = acc.direct_sum(&entry.homology);
        }
        acc
    }

    pub fn free_component_count(&self) -> usize {
        self.components.iter().filter(|c| c.rank == 0).count()
    }
}

/// Connected components with per-component rank and integral homology,
/// computed concurrently, reported in deterministic component order.
pub fn component_decomposition(cg: &ChainGraph) -> Result<ComponentDecomposition> {
    let components = cg.components();
    let entries: Vec<Result<ComponentEntry>> = components
        .into_par_iter()
        .map(|chain| {
            let rank = connection::graph_rank(chain.graph(), chain.nu())?;
            let homology = chain.homology(Coefficients::Integers);
            Ok(ComponentEntry {
                chain,
                rank,
                homology,
            })
        })
        .collect();
    Ok(ComponentDecomposition {
        components: entries.into_iter().collect::<Result<_>>()?,
    })
}

/// For every component whose rank the prime does not divide, integral
/// homology carries no p-torsion and mod-p dimensions equal the free
/// ranks. Components of rank divisible by p are exempt; rank-zero
/// components are free and so are checked too.
pub fn torsion_exclusion_check(decomp: &ComponentDecomposition, p: u64) -> Result<Report> {
    if p < 2 {
        return Err(Error::input("p must be a prime"));
    }
    let mut report = Report::new();
    for (i, entry) in decomp.components.iter().enumerate() {
        if entry.rank > 0 && entry.rank % p == 0 {
            continue;
        }
        let name = entry.chain.graph().id(0).to_string();
        let p_torsion = entry
            .homology
            .groups()
            .values()
            .flat_map(|g| g.torsion.iter())
            .any(|d| num_traits::Zero::is_zero(&(d % num_bigint::BigInt::from(p))));
        report.push(
            format!("component-{i}-no-p-torsion"),
            !p_torsion,
            format!("component of {name}, rank {}", entry.rank),
        );
        let modp = entry.chain.homology(Coefficients::PrimeField(p));
        let mut degrees: Vec<i64> = entry
            .homology
            .groups()
            .keys()
            .chain(modp.groups().keys())
            .copied()
            .collect();
        degrees.sort_unstable();
        degrees.dedup();
        let dims_match = degrees
            .iter()
            .all(|&d| modp.group(d).free_rank == entry.homology.group(d).free_rank);
        report.push(
            format!("component-{i}-mod-p-dimensions"),
            dims_match,
            format!("component of {name} over F_{p}"),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::AbelianGroup;

    #[test]
    fn type_a_positions_order() {
        assert_eq!(type_a_positions(2), vec![(0, 1), (1, 2), (0, 2)]);
        assert_eq!(
            type_a_positions(3),
            vec![(0, 1), (1, 2), (0, 2), (2, 3), (1, 3), (0, 3)]
        );
    }

    #[test]
    fn jacobi_validation() {
        // abelian
        let lb = LieBasis::new(vec!["a".into(), "b".into()], Vec::new()).unwrap();
        assert!(validate_lie(&lb).ok);
        // matrix bracket
        for n in 1..=4 {
            assert!(validate_lie(&LieBasis::type_a(n)).ok, "n = {n}");
        }
        // constructed violation on four symbols
        let lb = LieBasis::new(
            ["x", "y", "z", "w"].map(String::from).to_vec(),
            vec![
                ("x".to_string(), "y".to_string(), vec![(2, "z".to_string())]),
                ("z".to_string(), "w".to_string(), vec![(1, "y".to_string())]),
                ("y".to_string(), "w".to_string(), vec![(1, "x".to_string())]),
            ],
        )
        .unwrap();
        let report = validate_lie(&lb);
        assert!(!report.ok);
        let (x, y, _, _) = report.violation.unwrap();
        assert_eq!((x.as_str(), y.as_str()), ("x", "y"));
    }

    #[test]
    fn root_system_axioms() {
        for n in 1..=4 {
            let report = is_diamond_root_system(&LieBasis::type_a(n)).unwrap();
            assert!(report.ok, "n = {n}: {:?}", report.first_violation);
        }
        // a coefficient-2 bracket fails the second axiom
        let lb = LieBasis::new(
            ["a", "b", "g"].map(String::from).to_vec(),
            vec![("a".to_string(), "b".to_string(), vec![(2, "g".to_string())])],
        )
        .unwrap();
        let report = is_diamond_root_system(&lb).unwrap();
        assert_eq!(report.first_violation.unwrap().0, 2);
    }

    #[test]
    fn small_exterior_graphs() {
        // one generator, trivial bracket: two isolated vertices
        let lb = LieBasis::new(vec!["a".into()], Vec::new()).unwrap();
        let cg = exterior_chain_graph(&lb).unwrap();
        assert_eq!(cg.graph().len(), 2);
        assert!(cg.graph().edges().is_empty());

        // three generators of the smallest matrix algebra: one edge
        let lb = LieBasis::type_a(2);
        let cg = exterior_chain_graph(&lb).unwrap();
        assert_eq!(cg.graph().len(), 8);
        assert_eq!(cg.graph().edges().len(), 1);
        let (u, v) = cg.graph().edges()[0];
        let mut ids = [cg.graph().id(u), cg.graph().id(v)];
        ids.sort();
        assert_eq!(ids, ["e01.e12", "e02"]);
        let value = cg.nu().value(u, v);
        assert_eq!(value.abs(), 1);
    }

    #[test]
    fn exterior_graph_is_gad_for_matrix_algebras() {
        let lb = LieBasis::type_a(3);
        let cg = exterior_chain_graph(&lb).unwrap();
        assert!(crate::diamond::is_diamond_graph(cg.graph()).is_diamond);
        assert!(cg.nu().pairs().all(|(_, _, v)| v.abs() == 1));
        let report = connection::is_deformable(cg.graph(), cg.nu()).unwrap();
        assert!(report.deformable);
    }

    #[test]
    fn decomposition_small() {
        // one generator: two singleton components, homology Z in 0 and 1
        let lb = LieBasis::new(vec!["a".into()], Vec::new()).unwrap();
        let cg = exterior_chain_graph(&lb).unwrap();
        let decomp = component_decomposition(&cg).unwrap();
        assert_eq!(decomp.components.len(), 2);
        let total = decomp.total_homology();
        assert_eq!(total.group(0), AbelianGroup::free(1));
        assert_eq!(total.group(1), AbelianGroup::free(1));

        // seven components, six of them singletons
        let lb = LieBasis::type_a(2);
        let cg = exterior_chain_graph(&lb).unwrap();
        let decomp = component_decomposition(&cg).unwrap();
        assert_eq!(decomp.components.len(), 7);
        assert_eq!(decomp.free_component_count(), 6);
        assert_eq!(
            decomp
                .components
                .iter()
                .filter(|c| c.chain.graph().len() == 1)
                .count(),
            6
        );
    }

    #[test]
    fn classify_on_small_graph() {
        let lb = LieBasis::type_a(3);
        let cg = exterior_chain_graph(&lb).unwrap();
        let diamonds = crate::diamond::enumerate_diamonds(cg.graph()).unwrap();
        assert!(!diamonds.is_empty());
        for dm in &diamonds {
            classify_diamond(&lb, dm).unwrap();
        }
    }
}
