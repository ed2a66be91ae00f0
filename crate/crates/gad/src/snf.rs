//! Smith normal form over arbitrary-precision integers.
//!
//! Pivoting picks the smallest nonzero entry by absolute value with a
//! positional tie-break, which keeps entry growth manageable at desk scale
//! and makes the computation deterministic. When transforms are requested,
//! `left * input * right` equals the diagonal form exactly and both
//! transforms are unimodular.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonzero diagonal entries d1 | d2 | ... | dr, all positive.
    pub divisors: Vec<BigInt>,
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// Divisors greater than one: the torsion coefficients of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.divisors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

pub fn smith_normal_form(input: &IntMatrix, with_transforms: bool) -> Smith {
    let (nr, nc) = (input.nrows(), input.ncols());
    let mut m = input.clone();
    let mut left = with_transforms.then(|| IntMatrix::identity(nr));
    let mut right = with_transforms.then(|| IntMatrix::identity(nc));

    let mut k = 0usize;
    while k < nr.min(nc) {
        let Some((pi, pj)) = smallest_pivot(&m, k) else {
            break;
        };
        swap_rows(&mut m, left.as_mut(), k, pi);
        swap_cols(&mut m, right.as_mut(), k, pj);
        loop {
            // clear column k
            let mut dirty = false;
            for i in k + 1..nr {
                if m.get(i, k).is_zero() {
                    continue;
                }
                let (q, r) = m.get(i, k).div_rem(m.get(k, k));
                add_row_multiple(&mut m, left.as_mut(), i, k, &-q);
                if !r.is_zero() {
                    // remainder is smaller than the pivot; promote it
                    swap_rows(&mut m, left.as_mut(), k, i);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // clear row k
            for j in k + 1..nc {
                if m.get(k, j).is_zero() {
                    continue;
                }
                let (q, r) = m.get(k, j).div_rem(m.get(k, k));
                add_col_multiple(&mut m, right.as_mut(), j, k, &-q);
                if !r.is_zero() {
                    swap_cols(&mut m, right.as_mut(), k, j);
                    dirty = true;
                    break;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining submatrix by the pivot
            let mut fixed = true;
            'scan: for i in k + 1..nr {
                for j in k + 1..nc {
                    if !(m.get(i, j) % m.get(k, k)).is_zero() {
                        add_row_multiple(&mut m, left.as_mut(), k, i, &BigInt::one());
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if m.get(k, k).is_negative() {
            negate_row(&mut m, left.as_mut(), k);
        }
        k += 1;
    }

    let mut divisors = Vec::new();
    for i in 0..k {
        let d = m.get(i, i).clone();
        if d.is_zero() {
            break;
        }
        divisors.push(d);
    }
    Smith {
        divisors,
        left,
        right,
    }
}

fn smallest_pivot(m: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in k..m.nrows() {
        for j in k..m.ncols() {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            match &best {
                Some((cur, _, _)) if *cur <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn swap_rows(m: &mut IntMatrix, left: Option<&mut IntMatrix>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.ncols() {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
    if let Some(l) = left {
        for j in 0..l.ncols() {
            let x = l.get(a, j).clone();
            let y = l.get(b, j).clone();
            l.set(a, j, y);
            l.set(b, j, x);
        }
    }
}

fn swap_cols(m: &mut IntMatrix, right: Option<&mut IntMatrix>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.nrows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
    if let Some(r) = right {
        for i in 0..r.nrows() {
            let x = r.get(i, a).clone();
            let y = r.get(i, b).clone();
            r.set(i, a, y);
            r.set(i, b, x);
        }
    }
}

/// row a += q * row b
fn add_row_multiple(
    m: &mut IntMatrix,
    left: Option<&mut IntMatrix>,
    a: usize,
    b: usize,
    q: &BigInt,
) {
    if q.is_zero() {
        return;
    }
    for j in 0..m.ncols() {
        let v = m.get(a, j) + q * m.get(b, j);
        m.set(a, j, v);
    }
    if let Some(l) = left {
        for j in 0..l.ncols() {
            let v = l.get(a, j) + q * l.get(b, j);
            l.set(a, j, v);
        }
    }
}

/// col a += q * col b
fn add_col_multiple(
    m: &mut IntMatrix,
    right: Option<&mut IntMatrix>,
    a: usize,
    b: usize,
    q: &BigInt,
) {
    if q.is_zero() {
        return;
    }
    for i in 0..m.nrows() {
        let v = m.get(i, a) + q * m.get(i, b);
        m.set(i, a, v);
    }
    if let Some(r) = right {
        for i in 0..r.nrows() {
            let v = r.get(i, a) + q * r.get(i, b);
            r.set(i, a, v);
        }
    }
}

fn negate_row(m: &mut IntMatrix, left: Option<&mut IntMatrix>, a: usize) {
    for j in 0..m.ncols() {
        let v = -m.get(a, j).clone();
        m.set(a, j, v);
    }
    if let Some(l) = left {
        for j in 0..l.ncols() {
            let v = -l.get(a, j).clone();
            l.set(a, j, v);
        }
    }
}

/// Solves M x = b over the integers, when a solution exists.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.nrows());
    let s = smith_normal_form(m, true);
    let left = s.left.as_ref().unwrap();
    let right = s.right.as_ref().unwrap();
    // U M V = D, so with y = V^{-1} x we need D y = U b.
    let ub: Vec<BigInt> = (0..m.nrows())
        .map(|i| (0..m.nrows()).map(|j| left.get(i, j) * &b[j]).sum())
        .collect();
    let mut y = vec![BigInt::zero(); m.ncols()];
    for i in 0..m.nrows() {
        if i < s.divisors.len() {
            let (q, r) = ub[i].div_rem(&s.divisors[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    let x: Vec<BigInt> = (0..m.ncols())
        .map(|i| (0..m.ncols()).map(|j| right.get(i, j) * &y[j]).sum())
        .collect();
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    fn divisors_i64(s: &Smith) -> Vec<i64> {
        s.divisors.iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn snf_basics() {
        assert!(smith_normal_form(&IntMatrix::zeros(3, 2), false)
            .divisors
            .is_empty());
        assert_eq!(
            divisors_i64(&smith_normal_form(&m(&[vec![2, 0], vec![0, 3]]), false)),
            vec![1, 6]
        );
        assert_eq!(
            divisors_i64(&smith_normal_form(&m(&[vec![1, 1], vec![1, -1]]), false)),
            vec![1, 2]
        );
    }

    fn check_transforms(a: &IntMatrix) {
        let s = smith_normal_form(a, true);
        let left = s.left.clone().unwrap();
        let right = s.right.clone().unwrap();
        assert!(left.det().unwrap().abs().is_one());
        assert!(right.det().unwrap().abs().is_one());
        let d = left.mul(a).unwrap().mul(&right).unwrap();
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                let expect = if i == j && i < s.divisors.len() {
                    s.divisors[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(*d.get(i, j), expect, "at ({i},{j})");
            }
        }
        for w in s.divisors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
        }
    }

    #[test]
    fn snf_transforms_exact() {
        check_transforms(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]));
        check_transforms(&m(&[vec![0, 0], vec![0, 0]]));
        check_transforms(&m(&[vec![3, 1, 2], vec![6, 2, 4]]));
        check_transforms(&m(&[vec![5], vec![10], vec![15]]));
    }

    #[test]
    fn integer_solve() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        let b = vec![BigInt::from(4), BigInt::from(9)];
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        let b = vec![BigInt::from(1), BigInt::from(0)];
        assert!(solve_integer(&a, &b).is_none());
    }
}
