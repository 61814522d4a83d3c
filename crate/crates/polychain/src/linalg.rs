//! Small dense exact linear algebra over ℚ.

use num_traits::{One, Zero};

use crate::exact::Q;

pub type Matrix = Vec<Vec<Q>>;

/// Row-reduces in place; returns the pivot columns and the determinant sign
/// bookkeeping (product of pivots with swap parity).
fn eliminate(m: &mut Matrix) -> (Vec<usize>, Q) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut det = Q::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            det = -det;
        }
        let pivot = m[r][c].clone();
        det *= &pivot;
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..cols {
                let v = &f * &m[r][j];
                m[i][j] -= v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (pivots, det)
}

pub fn det(m: &Matrix) -> Q {
    let n = m.len();
    if n == 0 {
        return Q::one();
    }
    assert!(m.iter().all(|row| row.len() == n), "determinant of a non-square matrix");
    let mut a = m.clone();
    let (pivots, d) = eliminate(&mut a);
    if pivots.len() < n {
        Q::zero()
    } else {
        d
    }
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    eliminate(&mut a).0.len()
}

/// Solves `a·x = b` for square invertible `a`.
pub fn solve(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(p, c);
        let pivot = aug[c][c].clone();
        for j in c..=n {
            aug[c][j] = &aug[c][j] / &pivot;
        }
        for i in 0..n {
            if i == c || aug[i][c].is_zero() {
                continue;
            }
            let f = aug[i][c].clone();
            for j in c..=n {
                let v = &f * &aug[c][j];
                aug[i][j] -= v;
            }
        }
    }
    Some(aug.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Least-structure solve of a possibly non-square consistent system: returns
/// `x` with `a·x = b` when the solution is unique, `None` otherwise.
pub fn solve_unique(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = if rows == 0 { return Some(Vec::new()) } else { a[0].len() };
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (pivots, _) = eliminate(&mut aug);
    if pivots.len() != cols || pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut v = aug[r][cols].clone();
        for j in c + 1..cols {
            v -= &aug[r][j] * &x[j];
        }
        x[c] = v / &aug[r][c];
    }
    Some(x)
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut cols: Vec<Vec<Q>> = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Q> = (0..n).map(|i| if i == j { Q::one() } else { Q::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// `rows(a) · rows(b)ᵀ`.
pub fn gram(a: &[Vec<Q>], b: &[Vec<Q>]) -> Matrix {
    a.iter().map(|u| b.iter().map(|v| dot(u, v)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q2};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn determinant_and_rank() {
        assert_eq!(det(&m(&[&[2, 1], &[1, 3]])), q(5));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), q(-1));
        assert_eq!(det(&m(&[&[1, 2], &[2, 4]])), q(0));
        assert_eq!(rank(&m(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(det(&Vec::new()), q(1));
    }

    #[test]
    fn solves_and_inverts() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![q2(4, 5), q2(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[0][0], q2(3, 5));
        assert!(solve(&m(&[&[1, 2], &[2, 4]]), &[q(1), q(2)]).is_none());
        let tall = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(solve_unique(&tall, &[q(1), q(2), q(3)]), Some(vec![q(1), q(2)]));
        assert_eq!(solve_unique(&tall, &[q(1), q(2), q(4)]), None);
    }
}
