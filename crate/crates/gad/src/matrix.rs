//! Exact integer matrices and the representation-matrix calculus:
//! direct sums, orthogonal products, global dimension and the equivalence
//! relation generated by row permutations, row negations, transposition and
//! block transposition.
//!
//! Ranks and determinants are computed fraction-free (Bareiss) over
//! arbitrary-precision integers, so intermediate growth never wraps.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("ragged matrix rows".to_string()));
        }
        Ok(IntMatrix::from_fn(r, c, |i, j| BigInt::from(rows[i][j])))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(IntMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = BigInt::zero();
            for k in 0..self.cols {
                if !self.get(i, k).is_zero() && !other.get(k, j).is_zero() {
                    acc += self.get(i, k) * other.get(k, j);
                }
            }
            acc
        }))
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        self.bareiss().0
    }

    /// Determinant of a square matrix, exact.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::input(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let (rank, last_pivot, sign) = self.bareiss();
        if rank < self.rows {
            return Ok(BigInt::zero());
        }
        Ok(if sign < 0 { -last_pivot } else { last_pivot })
    }

    /// Bareiss elimination; returns (rank, last pivot, row-swap sign).
    fn bareiss(&self) -> (usize, BigInt, i8) {
        let mut m = self.clone();
        let mut prev = BigInt::one();
        let mut sign = 1i8;
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pivot_row) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if pivot_row != r {
                for j in 0..m.cols {
                    m.data.swap(pivot_row * m.cols + j, r * m.cols + j);
                }
                sign = -sign;
            }
            for i in r + 1..m.rows {
                for j in c + 1..m.cols {
                    let num = m.get(r, c) * m.get(i, j) - m.get(i, c) * m.get(r, j);
                    m.set(i, j, num / &prev);
                }
                m.set(i, c, BigInt::zero());
            }
            prev = m.get(r, c).clone();
            r += 1;
        }
        (r, prev, sign)
    }

    /// Rank over the prime field F_p.
    pub fn rank_mod_p(&self, p: u64) -> usize {
        assert!(p >= 2);
        let pb = BigInt::from(p);
        let mut m: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let mut v = self.get(i, j) % &pb;
                        if v.is_negative() {
                            v += &pb;
                        }
                        u64::try_from(v).expect("reduced below p")
                    })
                    .collect()
            })
            .collect();
        let mut rank = 0usize;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pr) = (rank..self.rows).find(|&i| m[i][c] % p != 0) else {
                continue;
            };
            m.swap(rank, pr);
            let inv = mod_inverse(m[rank][c] % p, p);
            for i in rank + 1..self.rows {
                if m[i][c] % p != 0 {
                    let factor = (m[i][c] % p) * inv % p;
                    for j in c..self.cols {
                        let sub = (m[rank][j] % p) * factor % p;
                        m[i][j] = (m[i][j] % p + p - sub) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime, a != 0 mod p
    let mut exp = p - 2;
    let mut base = a % p;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc.wrapping_mul(base) % p;
        }
        base = base.wrapping_mul(base) % p;
        exp >>= 1;
    }
    acc
}

/// A representation matrix: entries are connection values between the two
/// distance components, rows on the grade-0 side, columns on the grade-1
/// side, labels sorted by vertex id within each part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepMatrix {
    pub mat: IntMatrix,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl RepMatrix {
    pub fn new(mat: IntMatrix, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        if row_labels.len() != mat.nrows() || col_labels.len() != mat.ncols() {
            return Err(Error::input("label count does not match matrix shape"));
        }
        Ok(RepMatrix {
            mat,
            row_labels,
            col_labels,
        })
    }
}

/// Block-diagonal assembly with concatenated labels.
pub fn direct_sum(a: &RepMatrix, b: &RepMatrix) -> RepMatrix {
    let (m1, n1) = (a.mat.nrows(), a.mat.ncols());
    let (m2, n2) = (b.mat.nrows(), b.mat.ncols());
    let mat = IntMatrix::from_fn(m1 + m2, n1 + n2, |i, j| {
        if i < m1 && j < n1 {
            a.mat.get(i, j).clone()
        } else if i >= m1 && j >= n1 {
            b.mat.get(i - m1, j - n1).clone()
        } else {
            BigInt::zero()
        }
    });
    let mut row_labels = a.row_labels.clone();
    row_labels.extend_from_slice(&b.row_labels);
    let mut col_labels = a.col_labels.clone();
    col_labels.extend_from_slice(&b.col_labels);
    RepMatrix {
        mat,
        row_labels,
        col_labels,
    }
}

/// The orthogonal product. Rows enumerate (row x row) pairs then
/// (col x col) pairs, columns enumerate (row x col) then (col x row); the
/// four placement families carry the first factor twice and the second
/// factor twice, the last with a minus sign. A cell written twice with
/// different values is an internal consistency error.
pub fn orthogonal_product(a: &RepMatrix, b: &RepMatrix) -> Result<RepMatrix> {
    let (m1, n1) = (a.mat.nrows(), a.mat.ncols());
    let (m2, n2) = (b.mat.nrows(), b.mat.ncols());
    let m = m1 * m2 + n1 * n2;
    let n = m1 * n2 + n1 * m2;
    let mut mat = IntMatrix::zeros(m, n);
    let mut written = vec![false; m * n];
    let mut place = |r: usize, c: usize, v: BigInt| -> Result<()> {
        if written[r * n + c] && *mat.get(r, c) != v {
            return Err(Error::invariant(
                "orthogonal-product-placement",
                format!("cell ({r}, {c}) assigned both {} and {v}", mat.get(r, c)),
            ));
        }
        written[r * n + c] = true;
        mat.set(r, c, v);
        Ok(())
    };
    for k in 0..m2 {
        for i in 0..m1 {
            for j in 0..n1 {
                place(k * m1 + i, m1 * n2 + k * n1 + j, a.mat.get(i, j).clone())?;
            }
        }
    }
    for l in 0..n2 {
        for j in 0..n1 {
            for i in 0..m1 {
                place(m1 * m2 + l * n1 + j, l * m1 + i, a.mat.get(i, j).clone())?;
            }
        }
    }
    for k in 0..m2 {
        for l in 0..n2 {
            for i in 0..m1 {
                place(k * m1 + i, l * m1 + i, b.mat.get(k, l).clone())?;
            }
            for j in 0..n1 {
                place(
                    m1 * m2 + l * n1 + j,
                    m1 * n2 + k * n1 + j,
                    -b.mat.get(k, l).clone(),
                )?;
            }
        }
    }
    let pair = |x: &str, y: &str| format!("({x},{y})");
    let mut row_labels = Vec::with_capacity(m);
    for k in 0..m2 {
        for i in 0..m1 {
            row_labels.push(pair(&a.row_labels[i], &b.row_labels[k]));
        }
    }
    for l in 0..n2 {
        for j in 0..n1 {
            row_labels.push(pair(&a.col_labels[j], &b.col_labels[l]));
        }
    }
    let mut col_labels = Vec::with_capacity(n);
    for l in 0..n2 {
        for i in 0..m1 {
            col_labels.push(pair(&a.row_labels[i], &b.col_labels[l]));
        }
    }
    for k in 0..m2 {
        for j in 0..n1 {
            col_labels.push(pair(&a.col_labels[j], &b.row_labels[k]));
        }
    }
    RepMatrix::new(mat, row_labels, col_labels)
}

/// Splits a matrix into its nonzero-connected blocks plus isolated zero
/// rows and columns.
struct BlockDecomposition {
    blocks: Vec<Block>,
    zero_rows: usize,
    zero_cols: usize,
}

struct Block {
    rows: Vec<usize>,
    cols: Vec<usize>,
    mat: IntMatrix,
}

fn decompose(m: &IntMatrix) -> BlockDecomposition {
    let (nr, nc) = (m.nrows(), m.ncols());
    // union-find over rows (0..nr) and columns (nr..nr+nc)
    let mut parent: Vec<usize> = (0..nr + nc).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for i in 0..nr {
        for j in 0..nc {
            if !m.get(i, j).is_zero() {
                let a = find(&mut parent, i);
                let b = find(&mut parent, nr + j);
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> =
        std::collections::BTreeMap::new();
    let mut zero_rows = 0usize;
    let mut zero_cols = 0usize;
    for i in 0..nr {
        if m.row(i).iter().all(Zero::is_zero) {
            zero_rows += 1;
        } else {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().0.push(i);
        }
    }
    for j in 0..nc {
        if (0..nr).all(|i| m.get(i, j).is_zero()) {
            zero_cols += 1;
        } else {
            let r = find(&mut parent, nr + j);
            groups.entry(r).or_default().1.push(j);
        }
    }
    let blocks = groups
        .into_values()
        .map(|(rows, cols)| {
            let mat = IntMatrix::from_fn(rows.len(), cols.len(), |i, j| {
                m.get(rows[i], cols[j]).clone()
            });
            Block { rows, cols, mat }
        })
        .collect();
    BlockDecomposition {
        blocks,
        zero_rows,
        zero_cols,
    }
}

/// Global dimension. Each nonzero-connected block contributes
/// rows + cols - 2 rank; a zero row paired with a zero column is the
/// 1x1 zero matrix of a single vertex and contributes 1, as does any
/// leftover zero line.
pub fn global_dimension(rep: &RepMatrix) -> usize {
    let d = decompose(&rep.mat);
    let blocks: usize = d
        .blocks
        .iter()
        .map(|b| b.rows.len() + b.cols.len() - 2 * b.mat.rank())
        .sum();
    blocks + d.zero_rows.max(d.zero_cols)
}

/// One transformation step of the matrix equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixMove {
    /// New row i is old row `perm[i]`.
    RowPerm(Vec<usize>),
    NegateRow(usize),
    Transpose,
    /// For a matrix of the form diag(A, B) with A the leading
    /// `rows` x `cols` block, replace A by its transpose.
    BlockTranspose {
        rows: usize,
        cols: usize,
    },
}

/// A transformation sequence; replaying it maps the source matrix to the
/// target exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Witness {
    pub moves: Vec<MatrixMove>,
}

pub fn apply_moves(m: &IntMatrix, moves: &[MatrixMove]) -> Result<IntMatrix> {
    let mut cur = m.clone();
    for mv in moves {
        cur = apply_move(&cur, mv)?;
    }
    Ok(cur)
}

fn apply_move(m: &IntMatrix, mv: &MatrixMove) -> Result<IntMatrix> {
    match mv {
        MatrixMove::RowPerm(perm) => {
            if perm.len() != m.nrows() {
                return Err(Error::input("row permutation length mismatch"));
            }
            let mut seen = vec![false; perm.len()];
            for &p in perm {
                if p >= perm.len() || seen[p] {
                    return Err(Error::input("not a permutation"));
                }
                seen[p] = true;
            }
            Ok(IntMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
                m.get(perm[i], j).clone()
            }))
        }
        MatrixMove::NegateRow(i) => {
            if *i >= m.nrows() {
                return Err(Error::input("row index out of range"));
            }
            Ok(IntMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
                if r == *i {
                    -m.get(r, c).clone()
                } else {
                    m.get(r, c).clone()
                }
            }))
        }
        MatrixMove::Transpose => Ok(m.transpose()),
        MatrixMove::BlockTranspose { rows, cols } => {
            let (r, c) = (*rows, *cols);
            if r > m.nrows() || c > m.ncols() {
                return Err(Error::input("block exceeds matrix"));
            }
            for i in 0..r {
                for j in c..m.ncols() {
                    if !m.get(i, j).is_zero() {
                        return Err(Error::input("matrix is not block-diagonal"));
                    }
                }
            }
            for i in r..m.nrows() {
                for j in 0..c {
                    if !m.get(i, j).is_zero() {
                        return Err(Error::input("matrix is not block-diagonal"));
                    }
                }
            }
            let nr = c + m.nrows() - r;
            let nc = r + m.ncols() - c;
            Ok(IntMatrix::from_fn(nr, nc, |i, j| {
                if i < c && j < r {
                    m.get(j, i).clone()
                } else if i >= c && j >= r {
                    m.get(i - c + r, j - r + c).clone()
                } else {
                    BigInt::zero()
                }
            }))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent(Witness),
    NotEquivalent,
    /// Above the exact-search bound only cheap invariants are compared;
    /// the verdict is partial, never a proof.
    Partial {
        invariants_match: bool,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct EquivalenceOptions {
    /// rows + cols bound for the exact decision.
    pub exact_dimension_limit: usize,
    /// Transposition of any diagonal block. When false, only whole-matrix
    /// transposition is available.
    pub per_block_transpose: bool,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            exact_dimension_limit: 16,
            per_block_transpose: true,
        }
    }
}

/// Decides matrix equivalence, producing a replayable witness on success.
pub fn matrices_equivalent(
    a: &IntMatrix,
    b: &IntMatrix,
    opts: EquivalenceOptions,
) -> Result<Equivalence> {
    let total = a.nrows() + a.ncols();
    if total != b.nrows() + b.ncols() {
        return Ok(Equivalence::NotEquivalent);
    }
    if total > opts.exact_dimension_limit {
        return Ok(Equivalence::Partial {
            invariants_match: equivalence_invariants(a) == equivalence_invariants(b),
        });
    }
    if equivalence_invariants(a) != equivalence_invariants(b) {
        return Ok(Equivalence::NotEquivalent);
    }
    if a == b {
        return Ok(Equivalence::Equivalent(Witness::default()));
    }
    if opts.per_block_transpose {
        match search_witness(a, b, true)? {
            Some(w) => Ok(Equivalence::Equivalent(w)),
            None => Ok(Equivalence::NotEquivalent),
        }
    } else {
        if let Some(w) = search_witness(a, b, false)? {
            return Ok(Equivalence::Equivalent(w));
        }
        let at = a.transpose();
        if let Some(w) = search_witness(&at, b, false)? {
            let mut moves = vec![MatrixMove::Transpose];
            moves.extend(w.moves);
            let witness = Witness { moves };
            verify_witness(a, b, &witness)?;
            return Ok(Equivalence::Equivalent(witness));
        }
        Ok(Equivalence::NotEquivalent)
    }
}

/// Invariants preserved by every transformation: total dimension, rational
/// rank, the multiset of absolute entries and the joint multiset of row and
/// column square sums.
fn equivalence_invariants(m: &IntMatrix) -> (usize, usize, Vec<BigInt>, Vec<BigInt>) {
    let mut abs: Vec<BigInt> = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !m.get(i, j).is_zero() {
                abs.push(m.get(i, j).abs());
            }
        }
    }
    abs.sort();
    let mut norms: Vec<BigInt> = Vec::new();
    for i in 0..m.nrows() {
        norms.push(m.row(i).iter().map(|x| x * x).sum());
    }
    for j in 0..m.ncols() {
        norms.push((0..m.nrows()).map(|i| m.get(i, j) * m.get(i, j)).sum());
    }
    norms.sort();
    (m.nrows() + m.ncols(), m.rank(), abs, norms)
}

/// The data of a matched block pair: where each source line goes and with
/// which sign, plus whether the source block was transposed first.
struct BlockMatch {
    a_index: usize,
    b_index: usize,
    transposed: bool,
    /// target row of source row i (after optional transpose)
    row_map: Vec<usize>,
    col_map: Vec<usize>,
    row_sign: Vec<i8>,
    col_sign: Vec<i8>,
}

fn search_witness(a: &IntMatrix, b: &IntMatrix, per_block: bool) -> Result<Option<Witness>> {
    if !per_block && (a.nrows() != b.nrows() || a.ncols() != b.ncols()) {
        return Ok(None);
    }
    let da = decompose(a);
    let db = decompose(b);
    if da.zero_rows + da.zero_cols != db.zero_rows + db.zero_cols {
        return Ok(None);
    }
    if !per_block && (da.zero_rows != db.zero_rows || da.zero_cols != db.zero_cols) {
        return Ok(None);
    }
    if da.blocks.len() != db.blocks.len() {
        return Ok(None);
    }
    let n = da.blocks.len();
    let mut assignment: Vec<Option<BlockMatch>> = Vec::new();
    let mut used = vec![false; n];
    if !match_blocks(
        &da.blocks,
        &db.blocks,
        per_block,
        0,
        &mut used,
        &mut assignment,
    ) {
        return Ok(None);
    }
    let matches: Vec<BlockMatch> = assignment.into_iter().map(Option::unwrap).collect();
    let witness = assemble_witness(a, b, &da, &db, &matches)?;
    verify_witness(a, b, &witness)?;
    Ok(Some(witness))
}

fn match_blocks(
    ab: &[Block],
    bb: &[Block],
    per_block: bool,
    pos: usize,
    used: &mut Vec<bool>,
    out: &mut Vec<Option<BlockMatch>>,
) -> bool {
    if pos == ab.len() {
        return true;
    }
    let x = &ab[pos];
    for (bi, y) in bb.iter().enumerate() {
        if used[bi] {
            continue;
        }
        let mut found = None;
        if let Some((rm, cm, rs, cs)) = block_iso(&x.mat, &y.mat) {
            found = Some(BlockMatch {
                a_index: pos,
                b_index: bi,
                transposed: false,
                row_map: rm,
                col_map: cm,
                row_sign: rs,
                col_sign: cs,
            });
        } else if per_block {
            let xt = x.mat.transpose();
            if let Some((rm, cm, rs, cs)) = block_iso(&xt, &y.mat) {
                found = Some(BlockMatch {
                    a_index: pos,
                    b_index: bi,
                    transposed: true,
                    row_map: rm,
                    col_map: cm,
                    row_sign: rs,
                    col_sign: cs,
                });
            }
        }
        if let Some(m) = found {
            used[bi] = true;
            out.push(Some(m));
            if match_blocks(ab, bb, per_block, pos + 1, used, out) {
                return true;
            }
            out.pop();
            used[bi] = false;
        }
    }
    false
}

/// Backtracking search for a signed row/column bijection X -> Y.
/// Returns (row map, col map, row signs, col signs) with
/// Y[rm[i]][cm[j]] = rs[i] * cs[j] * X[i][j].
fn block_iso(x: &IntMatrix, y: &IntMatrix) -> Option<(Vec<usize>, Vec<usize>, Vec<i8>, Vec<i8>)> {
    let (m, n) = (x.nrows(), x.ncols());
    if y.nrows() != m || y.ncols() != n {
        return None;
    }
    if m == 0 || n == 0 {
        return Some(((0..m).collect(), (0..n).collect(), vec![1; m], vec![1; n]));
    }
    let sorted_abs_row = |mat: &IntMatrix, i: usize| {
        let mut v: Vec<BigInt> = mat.row(i).iter().map(Signed::abs).collect();
        v.sort();
        v
    };
    let sorted_abs_col = |mat: &IntMatrix, j: usize| {
        let mut v: Vec<BigInt> = (0..mat.nrows()).map(|i| mat.get(i, j).abs()).collect();
        v.sort();
        v
    };
    let xr: Vec<_> = (0..m).map(|i| sorted_abs_row(x, i)).collect();
    let yr: Vec<_> = (0..m).map(|i| sorted_abs_row(y, i)).collect();
    let xc: Vec<_> = (0..n).map(|j| sorted_abs_col(x, j)).collect();
    let yc: Vec<_> = (0..n).map(|j| sorted_abs_col(y, j)).collect();

    let row_cands: Vec<u32> = (0..m)
        .map(|i| {
            let mut mask = 0u32;
            for r in 0..m {
                if xr[i] == yr[r] {
                    mask |= 1 << r;
                }
            }
            mask
        })
        .collect();
    let init_col_masks: Vec<u32> = (0..n)
        .map(|j| {
            let mut mask = 0u32;
            for c in 0..n {
                if xc[j] == yc[c] {
                    mask |= 1 << c;
                }
            }
            mask
        })
        .collect();
    if row_cands.iter().any(|&m| m == 0) || init_col_masks.iter().any(|&m| m == 0) {
        return None;
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| row_cands[i].count_ones());

    struct Search<'a> {
        x: &'a IntMatrix,
        y: &'a IntMatrix,
        order: Vec<usize>,
        row_cands: Vec<u32>,
        row_map: Vec<usize>,
        n: usize,
    }
    impl Search<'_> {
        fn rows(
            &mut self,
            pos: usize,
            used: u32,
            col_masks: &[u32],
        ) -> Option<(Vec<usize>, Vec<usize>, Vec<i8>, Vec<i8>)> {
            let m = self.x.nrows();
            if pos == m {
                let mut col_map = vec![usize::MAX; self.n];
                return self.cols(0, 0, col_masks, &mut col_map);
            }
            let i = self.order[pos];
            let mut cands = self.row_cands[i] & !used;
            while cands != 0 {
                let r = cands.trailing_zeros() as usize;
                cands &= cands - 1;
                let mut next_masks = col_masks.to_vec();
                let mut ok = true;
                'mask: for j in 0..self.n {
                    let mut nm = 0u32;
                    let mut rest = next_masks[j];
                    while rest != 0 {
                        let c = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        if self.x.get(i, j).abs() == self.y.get(r, c).abs() {
                            nm |= 1 << c;
                        }
                    }
                    if nm == 0 {
                        ok = false;
                        break 'mask;
                    }
                    next_masks[j] = nm;
                }
                if ok {
                    self.row_map[i] = r;
                    if let Some(found) = self.rows(pos + 1, used | (1 << r), &next_masks) {
                        return Some(found);
                    }
                }
            }
            None
        }
        fn cols(
            &self,
            pos: usize,
            used: u32,
            col_masks: &[u32],
            col_map: &mut Vec<usize>,
        ) -> Option<(Vec<usize>, Vec<usize>, Vec<i8>, Vec<i8>)> {
            if pos == self.n {
                let (rs, cs) = self.solve_signs(col_map)?;
                return Some((self.row_map.clone(), col_map.clone(), rs, cs));
            }
            // most constrained unresolved column first
            let mut best = usize::MAX;
            let mut best_count = u32::MAX;
            for j in 0..self.n {
                if col_map[j] == usize::MAX {
                    let count = (col_masks[j] & !used).count_ones();
                    if count < best_count {
                        best_count = count;
                        best = j;
                    }
                }
            }
            let j = best;
            let mut cands = col_masks[j] & !used;
            while cands != 0 {
                let c = cands.trailing_zeros() as usize;
                cands &= cands - 1;
                col_map[j] = c;
                if let Some(found) = self.cols(pos + 1, used | (1 << c), col_masks, col_map) {
                    return Some(found);
                }
                col_map[j] = usize::MAX;
            }
            None
        }
        fn solve_signs(&self, col_map: &[usize]) -> Option<(Vec<i8>, Vec<i8>)> {
            let m = self.x.nrows();
            let mut rs = vec![0i8; m];
            let mut cs = vec![0i8; self.n];
            for start in 0..m {
                if rs[start] != 0 {
                    continue;
                }
                rs[start] = 1;
                let mut stack = vec![(true, start)];
                while let Some((is_row, idx)) = stack.pop() {
                    if is_row {
                        let i = idx;
                        for j in 0..self.n {
                            if self.x.get(i, j).is_zero() {
                                continue;
                            }
                            let sx = if self.x.get(i, j).is_negative() {
                                -1
                            } else {
                                1
                            };
                            let sy = if self.y.get(self.row_map[i], col_map[j]).is_negative() {
                                -1
                            } else {
                                1
                            };
                            let need = sx * sy * rs[i];
                            if cs[j] == 0 {
                                cs[j] = need;
                                stack.push((false, j));
                            } else if cs[j] != need {
                                return None;
                            }
                        }
                    } else {
                        let j = idx;
                        for i in 0..m {
                            if self.x.get(i, j).is_zero() {
                                continue;
                            }
                            let sx = if self.x.get(i, j).is_negative() {
                                -1
                            } else {
                                1
                            };
                            let sy = if self.y.get(self.row_map[i], col_map[j]).is_negative() {
                                -1
                            } else {
                                1
                            };
                            let need = sx * sy * cs[j];
                            if rs[i] == 0 {
                                rs[i] = need;
                                stack.push((true, i));
                            } else if rs[i] != need {
                                return None;
                            }
                        }
                    }
                }
            }
            for s in &mut cs {
                if *s == 0 {
                    *s = 1;
                }
            }
            Some((rs, cs))
        }
    }
    let mut search = Search {
        x,
        y,
        order,
        row_cands,
        row_map: vec![usize::MAX; m],
        n,
    };
    search.rows(0, 0, &init_col_masks)
}

/// Builds a concrete move sequence from matched blocks, tracking every cell
/// through the transformations with tags.
fn assemble_witness(
    a: &IntMatrix,
    b: &IntMatrix,
    da: &BlockDecomposition,
    db: &BlockDecomposition,
    matches: &[BlockMatch],
) -> Result<Witness> {
    // grid of (value-is-nonzero tag), tag = source cell id or none
    #[derive(Clone)]
    struct Grid {
        rows: usize,
        cols: usize,
        tags: Vec<Option<u32>>,
    }
    impl Grid {
        fn get(&self, i: usize, j: usize) -> Option<u32> {
            self.tags[i * self.cols + j]
        }
    }
    fn apply_to_grid(g: &Grid, mv: &MatrixMove) -> Grid {
        match mv {
            MatrixMove::RowPerm(perm) => {
                let mut tags = Vec::with_capacity(g.tags.len());
                for i in 0..g.rows {
                    for j in 0..g.cols {
                        tags.push(g.get(perm[i], j));
                    }
                }
                Grid {
                    rows: g.rows,
                    cols: g.cols,
                    tags,
                }
            }
            MatrixMove::NegateRow(_) => g.clone(),
            MatrixMove::Transpose => {
                let mut tags = Vec::with_capacity(g.tags.len());
                for j in 0..g.cols {
                    for i in 0..g.rows {
                        tags.push(g.get(i, j));
                    }
                }
                Grid {
                    rows: g.cols,
                    cols: g.rows,
                    tags,
                }
            }
            MatrixMove::BlockTranspose { rows, cols } => {
                let (r, c) = (*rows, *cols);
                let nr = c + g.rows - r;
                let nc = r + g.cols - c;
                let mut tags = vec![None; nr * nc];
                for i in 0..nr {
                    for j in 0..nc {
                        tags[i * nc + j] = if i < c && j < r {
                            g.get(j, i)
                        } else if i >= c && j >= r {
                            g.get(i - c + r, j - r + c)
                        } else {
                            None
                        };
                    }
                }
                Grid {
                    rows: nr,
                    cols: nc,
                    tags,
                }
            }
        }
    }

    let mut moves: Vec<MatrixMove> = Vec::new();
    let mut grid = Grid {
        rows: a.nrows(),
        cols: a.ncols(),
        tags: (0..a.nrows() * a.ncols())
            .map(|k| {
                let (i, j) = (k / a.ncols(), k % a.ncols());
                if a.get(i, j).is_zero() {
                    None
                } else {
                    Some(k as u32)
                }
            })
            .collect(),
    };
    let push = |grid: &mut Grid, moves: &mut Vec<MatrixMove>, mv: MatrixMove| {
        *grid = apply_to_grid(grid, &mv);
        moves.push(mv);
    };

    // tag -> source cell in block-local coordinates
    let mut tag_block: std::collections::HashMap<u32, (usize, usize, usize)> =
        std::collections::HashMap::new();
    for (idx, blk) in da.blocks.iter().enumerate() {
        for (bi, &gi) in blk.rows.iter().enumerate() {
            for (bj, &gj) in blk.cols.iter().enumerate() {
                if !a.get(gi, gj).is_zero() {
                    tag_block.insert((gi * a.ncols() + gj) as u32, (idx, bi, bj));
                }
            }
        }
    }

    // Phase 1: transpose the blocks that need it. Rows and columns of a
    // block are located by their tags in the current grid.
    for bm in matches.iter().filter(|bm| bm.transposed) {
        let blk = &da.blocks[bm.a_index];
        let (bh, bw) = (blk.rows.len(), blk.cols.len());
        // current row of block-local row bi = the grid row containing any
        // of its tags; same for columns
        let mut cur_rows = vec![usize::MAX; bh];
        let mut cur_cols = vec![usize::MAX; bw];
        for i in 0..grid.rows {
            for j in 0..grid.cols {
                if let Some(t) = grid.get(i, j) {
                    if let Some(&(bidx, bi, bj)) = tag_block.get(&t) {
                        if bidx == bm.a_index {
                            cur_rows[bi] = i;
                            cur_cols[bj] = j;
                        }
                    }
                }
            }
        }
        // bring block rows to the front, in block order
        let mut perm: Vec<usize> = cur_rows.clone();
        let mut rest: Vec<usize> = (0..grid.rows).filter(|r| !cur_rows.contains(r)).collect();
        perm.append(&mut rest);
        push(&mut grid, &mut moves, MatrixMove::RowPerm(perm));
        // bring block columns to the front via transpose conjugation
        let mut perm: Vec<usize> = cur_cols.clone();
        let mut rest: Vec<usize> = (0..grid.cols).filter(|c| !cur_cols.contains(c)).collect();
        perm.append(&mut rest);
        push(&mut grid, &mut moves, MatrixMove::Transpose);
        push(&mut grid, &mut moves, MatrixMove::RowPerm(perm));
        push(&mut grid, &mut moves, MatrixMove::Transpose);
        push(
            &mut grid,
            &mut moves,
            MatrixMove::BlockTranspose { rows: bh, cols: bw },
        );
    }

    // Zero lines interchange freely: a zero row is a 1x0 diagonal block
    // and a zero column a 0x1 block, so transposing them alone adjusts
    // the shape to the target.
    while grid.rows > b.nrows() {
        let i = (0..grid.rows)
            .find(|&i| (0..grid.cols).all(|j| grid.get(i, j).is_none()))
            .ok_or_else(|| {
                Error::invariant("matrix-equivalence-witness", "no zero row to transpose")
            })?;
        let mut perm = vec![i];
        perm.extend((0..grid.rows).filter(|&r| r != i));
        push(&mut grid, &mut moves, MatrixMove::RowPerm(perm));
        push(
            &mut grid,
            &mut moves,
            MatrixMove::BlockTranspose { rows: 1, cols: 0 },
        );
    }
    while grid.cols > b.ncols() {
        let j = (0..grid.cols)
            .find(|&j| (0..grid.rows).all(|i| grid.get(i, j).is_none()))
            .ok_or_else(|| {
                Error::invariant("matrix-equivalence-witness", "no zero column to transpose")
            })?;
        let mut perm = vec![j];
        perm.extend((0..grid.cols).filter(|&c| c != j));
        push(&mut grid, &mut moves, MatrixMove::Transpose);
        push(&mut grid, &mut moves, MatrixMove::RowPerm(perm));
        push(&mut grid, &mut moves, MatrixMove::Transpose);
        push(
            &mut grid,
            &mut moves,
            MatrixMove::BlockTranspose { rows: 0, cols: 1 },
        );
    }

    if grid.rows != b.nrows() || grid.cols != b.ncols() {
        return Err(Error::invariant(
            "matrix-equivalence-witness",
            "assembled shape does not match the target".to_string(),
        ));
    }

    // Phase 2: target position and sign of every tag.
    let mut target: std::collections::HashMap<u32, (usize, usize, i8)> =
        std::collections::HashMap::new();
    for bm in matches {
        let ablk = &da.blocks[bm.a_index];
        let bblk = &db.blocks[bm.b_index];
        for (bi, &gi) in ablk.rows.iter().enumerate() {
            for (bj, &gj) in ablk.cols.iter().enumerate() {
                if a.get(gi, gj).is_zero() {
                    continue;
                }
                let tag = (gi * a.ncols() + gj) as u32;
                // after an in-place transpose the block-local row index is bj
                let (li, lj) = if bm.transposed { (bj, bi) } else { (bi, bj) };
                let ti = bblk.rows[bm.row_map[li]];
                let tj = bblk.cols[bm.col_map[lj]];
                let sign = bm.row_sign[li] * bm.col_sign[lj];
                target.insert(tag, (ti, tj, sign));
            }
        }
    }

    // row permutation: each current row carries tags of exactly one target row
    let mut row_of: Vec<Option<usize>> = vec![None; grid.rows]; // target row -> current row
    let mut col_of: Vec<Option<usize>> = vec![None; grid.cols];
    for i in 0..grid.rows {
        for j in 0..grid.cols {
            if let Some(t) = grid.get(i, j) {
                let &(ti, tj, _) = target.get(&t).expect("every tag has a target");
                if let Some(prev) = row_of[ti] {
                    if prev != i {
                        return Err(Error::invariant(
                            "matrix-equivalence-witness",
                            "inconsistent row routing".to_string(),
                        ));
                    }
                } else {
                    row_of[ti] = Some(i);
                }
                if let Some(prev) = col_of[tj] {
                    if prev != j {
                        return Err(Error::invariant(
                            "matrix-equivalence-witness",
                            "inconsistent column routing".to_string(),
                        ));
                    }
                } else {
                    col_of[tj] = Some(j);
                }
            }
        }
    }
    // spread the unconstrained (zero) lines over the leftover slots
    let mut free_rows: Vec<usize> = (0..grid.rows)
        .filter(|r| !row_of.iter().flatten().any(|&x| x == *r))
        .collect();
    for slot in row_of.iter_mut() {
        if slot.is_none() {
            *slot = Some(free_rows.remove(0));
        }
    }
    let mut free_cols: Vec<usize> = (0..grid.cols)
        .filter(|c| !col_of.iter().flatten().any(|&x| x == *c))
        .collect();
    for slot in col_of.iter_mut() {
        if slot.is_none() {
            *slot = Some(free_cols.remove(0));
        }
    }
    let row_perm: Vec<usize> = row_of.into_iter().map(Option::unwrap).collect();
    let col_perm: Vec<usize> = col_of.into_iter().map(Option::unwrap).collect();
    push(&mut grid, &mut moves, MatrixMove::RowPerm(row_perm));
    push(&mut grid, &mut moves, MatrixMove::Transpose);
    push(&mut grid, &mut moves, MatrixMove::RowPerm(col_perm));
    push(&mut grid, &mut moves, MatrixMove::Transpose);

    // Phase 3: signs, now that every tag sits at its target cell.
    let mut row_neg = vec![0i8; grid.rows];
    let mut col_neg = vec![0i8; grid.cols];
    for bm in matches {
        let bblk = &db.blocks[bm.b_index];
        let n_local = if bm.transposed {
            da.blocks[bm.a_index].cols.len()
        } else {
            da.blocks[bm.a_index].rows.len()
        };
        for li in 0..n_local {
            let ti = bblk.rows[bm.row_map[li]];
            row_neg[ti] = bm.row_sign[li];
        }
        let m_local = if bm.transposed {
            da.blocks[bm.a_index].rows.len()
        } else {
            da.blocks[bm.a_index].cols.len()
        };
        for lj in 0..m_local {
            let tj = bblk.cols[bm.col_map[lj]];
            col_neg[tj] = bm.col_sign[lj];
        }
    }
    for (i, &s) in row_neg.iter().enumerate() {
        if s == -1 {
            moves.push(MatrixMove::NegateRow(i));
        }
    }
    let col_flips: Vec<usize> = col_neg
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == -1)
        .map(|(j, _)| j)
        .collect();
    if !col_flips.is_empty() {
        moves.push(MatrixMove::Transpose);
        for j in col_flips {
            moves.push(MatrixMove::NegateRow(j));
        }
        moves.push(MatrixMove::Transpose);
    }
    Ok(Witness { moves })
}

fn verify_witness(a: &IntMatrix, b: &IntMatrix, w: &Witness) -> Result<()> {
    let replay = apply_moves(a, &w.moves)?;
    if &replay != b {
        return Err(Error::invariant(
            "matrix-equivalence-witness",
            "replaying the witness does not reproduce the target".to_string(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn rank_and_det() {
        let a = m(&[vec![1, 1], vec![1, -1]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.det().unwrap(), BigInt::from(-2));
        let z = IntMatrix::zeros(3, 2);
        assert_eq!(z.rank(), 0);
        let b = m(&[vec![2, 4], vec![1, 2]]);
        assert_eq!(b.rank(), 1);
        assert_eq!(b.det().unwrap(), BigInt::from(0));
    }

    #[test]
    fn rank_mod_p() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(a.rank_mod_p(2), 1);
        assert_eq!(a.rank_mod_p(3), 1);
        assert_eq!(a.rank_mod_p(5), 2);
    }

    fn rep(rows: &[Vec<i64>]) -> RepMatrix {
        let mat = m(rows);
        let rl = (0..mat.nrows()).map(|i| format!("r{i}")).collect();
        let cl = (0..mat.ncols()).map(|j| format!("c{j}")).collect();
        RepMatrix::new(mat, rl, cl).unwrap()
    }

    #[test]
    fn direct_sum_cases() {
        let a = rep(&[vec![1]]);
        let b = rep(&[vec![2]]);
        let s = direct_sum(&a, &b);
        assert_eq!(s.mat, m(&[vec![1, 0], vec![0, 2]]));

        let empty = RepMatrix::new(IntMatrix::zeros(0, 0), vec![], vec![]).unwrap();
        let s = direct_sum(&a, &empty);
        assert_eq!(s.mat, a.mat);

        let z = rep(&[vec![0]]);
        let zz = direct_sum(&z, &z);
        assert_eq!(zz.mat, IntMatrix::zeros(2, 2));
        assert_eq!(global_dimension(&zz), 2);
    }

    #[test]
    fn global_dimension_cases() {
        assert_eq!(global_dimension(&rep(&[vec![0]])), 1);
        assert_eq!(global_dimension(&rep(&[vec![1]])), 0);
        let s = direct_sum(&rep(&[vec![1, 0], vec![0, 2]]), &rep(&[vec![0]]));
        assert_eq!(global_dimension(&s), 1);
    }

    #[test]
    fn orthogonal_product_unit() {
        let a = rep(&[vec![1]]);
        let c = orthogonal_product(&a, &a).unwrap();
        assert_eq!(c.mat, m(&[vec![1, 1], vec![1, -1]]));
        // rank additivity
        assert_eq!(c.mat.rank(), 2);
    }

    #[test]
    fn equivalence_simple() {
        let opts = EquivalenceOptions::default();
        let a = m(&[vec![1, 1], vec![1, -1]]);
        match matrices_equivalent(&a, &a, opts).unwrap() {
            Equivalence::Equivalent(w) => assert!(w.moves.is_empty()),
            other => panic!("expected identity witness, got {other:?}"),
        }
        let b = m(&[vec![1, 1], vec![-1, 1]]);
        match matrices_equivalent(&a, &b, opts).unwrap() {
            Equivalence::Equivalent(w) => {
                assert_eq!(apply_moves(&a, &w.moves).unwrap(), b);
            }
            other => panic!("expected equivalence, got {other:?}"),
        }
        let one = m(&[vec![1]]);
        let two = m(&[vec![2]]);
        assert_eq!(
            matrices_equivalent(&one, &two, opts).unwrap(),
            Equivalence::NotEquivalent
        );
    }

    #[test]
    fn equivalence_column_swap() {
        // only reachable through transpose-conjugated row moves
        let opts = EquivalenceOptions::default();
        let a = m(&[vec![1, 2], vec![3, 4]]);
        let b = m(&[vec![2, 1], vec![4, 3]]);
        match matrices_equivalent(&a, &b, opts).unwrap() {
            Equivalence::Equivalent(w) => {
                assert_eq!(apply_moves(&a, &w.moves).unwrap(), b);
            }
            other => panic!("expected equivalence, got {other:?}"),
        }
    }

    #[test]
    fn equivalence_block_transpose() {
        let opts = EquivalenceOptions::default();
        // a 1x1 second block: the global transpose already matches
        let a = m(&[vec![1, 2, 0], vec![0, 0, 5]]);
        let b = m(&[vec![1, 0], vec![2, 0], vec![0, 5]]);
        for mode in [
            opts,
            EquivalenceOptions {
                per_block_transpose: false,
                ..opts
            },
        ] {
            match matrices_equivalent(&a, &b, mode).unwrap() {
                Equivalence::Equivalent(w) => {
                    assert_eq!(apply_moves(&a, &w.moves).unwrap(), b);
                }
                other => panic!("expected equivalence, got {other:?}"),
            }
        }
        // transposing only the first block changes the shape in a way no
        // global transpose can reach
        let a = m(&[vec![1, 2, 0], vec![0, 0, 3], vec![0, 0, 4]]);
        let b = m(&[vec![1, 0], vec![2, 0], vec![0, 3], vec![0, 4]]);
        match matrices_equivalent(&a, &b, opts).unwrap() {
            Equivalence::Equivalent(w) => {
                assert!(w
                    .moves
                    .iter()
                    .any(|mv| matches!(mv, MatrixMove::BlockTranspose { .. })));
                assert_eq!(apply_moves(&a, &w.moves).unwrap(), b);
            }
            other => panic!("expected equivalence, got {other:?}"),
        }
        let strict = EquivalenceOptions {
            per_block_transpose: false,
            ..opts
        };
        assert_eq!(
            matrices_equivalent(&a, &b, strict).unwrap(),
            Equivalence::NotEquivalent
        );
    }

    #[test]
    fn equivalence_partial_above_limit() {
        let a = IntMatrix::identity(9);
        let b = IntMatrix::identity(9);
        match matrices_equivalent(&a, &b, EquivalenceOptions::default()).unwrap() {
            Equivalence::Partial { invariants_match } => assert!(invariants_match),
            other => panic!("expected partial verdict, got {other:?}"),
        }
    }

    #[test]
    fn block_transpose_move_shape() {
        let a = m(&[vec![1, 2, 0], vec![0, 0, 5]]);
        let out = apply_moves(&a, &[MatrixMove::BlockTranspose { rows: 1, cols: 2 }]).unwrap();
        assert_eq!(out, m(&[vec![1, 0], vec![2, 0], vec![0, 5]]));
        // off-diagonal entries forbid the move
        let bad = m(&[vec![1, 2, 7], vec![0, 0, 5]]);
        assert!(apply_moves(&bad, &[MatrixMove::BlockTranspose { rows: 1, cols: 2 }]).is_err());
    }
}
