//! Exact-rational simplex method in standard form with Bland's rule.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0` on a dense tableau. The returned
//! dual vector `y` satisfies `Aᵀy ≤ c` and `bᵀy = cᵀx` at optimality, which
//! [`verify`] checks exactly.

use num_traits::{Signed, Zero};

use crate::exact::Q;
use crate::linalg::solve;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
    pub c: Vec<Q>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<Q>,
    pub objective: Q,
    pub dual: Vec<Q>,
    pub basis: Vec<usize>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }
}

struct Tableau {
    /// `m` constraint rows followed by the reduced-cost row; last column is
    /// the right-hand side.
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    /// original row index of each tableau row
    origin: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn width(&self) -> usize {
        self.rows[0].len()
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width();
        let p = self.rows[r][e].clone();
        if !p.is_zero() {
            for j in 0..w {
                if !self.rows[r][j].is_zero() {
                    self.rows[r][j] = &self.rows[r][j] / &p;
                }
            }
        }
        let nz: Vec<usize> = (0..w).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            let row = &mut self.rows[i];
            for &j in &nz {
                let v = &f * &pivot_row[j];
                row[j] -= v;
            }
        }
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Runs Bland's rule over the columns `< active`. `Some(false)` means
    /// unbounded.
    fn optimize(&mut self, active: usize) -> bool {
        let m = self.m();
        let rhs = self.width() - 1;
        loop {
            let Some(e) = (0..active).find(|&j| self.rows[m][j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..m {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return false,
            }
        }
    }

    fn set_costs(&mut self, costs: &[Q]) {
        let m = self.m();
        let w = self.width();
        let mut row: Vec<Q> = (0..w).map(|j| if j < costs.len() { costs[j].clone() } else { Q::zero() }).collect();
        for i in 0..m {
            let cb = if self.basis[i] < costs.len() { costs[self.basis[i]].clone() } else { Q::zero() };
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    row[j] -= &cb * v;
                }
            }
        }
        self.rows[m] = row;
    }
}

fn dual_from_basis(lp: &LinearProgram, basis: &[usize], origin: &[usize]) -> Option<Vec<Q>> {
    // Bᵀ y = c_B on the retained rows
    let k = basis.len();
    let bt: Vec<Vec<Q>> = (0..k).map(|j| origin.iter().map(|&r| lp.a[r][basis[j]].clone()).collect()).collect();
    let cb: Vec<Q> = basis.iter().map(|&j| lp.c[j].clone()).collect();
    let y_kept = if k == 0 { Vec::new() } else { solve(&bt, &cb)? };
    let mut y = vec![Q::zero(); lp.rows()];
    for (i, &r) in origin.iter().enumerate() {
        y[r] = y_kept[i].clone();
    }
    Some(y)
}

/// Solves the program. `start` may name a feasible basis (one column per
/// row); otherwise a phase-one problem with artificial columns is used.
pub fn solve_lp(lp: &LinearProgram, start: Option<&[usize]>) -> LpSolution {
    let m = lp.rows();
    let n = lp.cols();
    let infeasible = |pivots| LpSolution {
        status: LpStatus::Infeasible,
        x: Vec::new(),
        objective: Q::zero(),
        dual: Vec::new(),
        basis: Vec::new(),
        pivots,
    };

    let mut tab = if let Some(basis) = start.filter(|b| b.len() == m) {
        let mut rows: Vec<Vec<Q>> = (0..m)
            .map(|i| {
                let mut r = lp.a[i].clone();
                r.push(lp.b[i].clone());
                r
            })
            .collect();
        rows.push(vec![Q::zero(); n + 1]);
        let mut t = Tableau { rows, basis: basis.to_vec(), origin: (0..m).collect(), pivots: 0 };
        let mut ok = true;
        for i in 0..m {
            if t.rows[i][basis[i]].is_zero() {
                ok = false;
                break;
            }
            t.pivot(i, basis[i]);
        }
        t.pivots = 0;
        if ok && (0..m).all(|i| !t.rows[i][n].is_negative()) {
            Some(t)
        } else {
            None
        }
    } else {
        None
    };

    if tab.is_none() {
        // phase one: artificial identity, rows flipped so that b ≥ 0
        let width = n + m + 1;
        let mut rows: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
        for i in 0..m {
            let flip = lp.b[i].is_negative();
            let mut r: Vec<Q> = Vec::with_capacity(width);
            r.extend(lp.a[i].iter().map(|v| if flip { -v } else { v.clone() }));
            r.extend((0..m).map(|j| if j == i { Q::from_integer(1.into()) } else { Q::zero() }));
            r.push(if flip { -lp.b[i].clone() } else { lp.b[i].clone() });
            rows.push(r);
        }
        rows.push(vec![Q::zero(); width]);
        let mut t = Tableau { rows, basis: (n..n + m).collect(), origin: (0..m).collect(), pivots: 0 };
        let phase_one: Vec<Q> = (0..n + m).map(|j| if j < n { Q::zero() } else { Q::from_integer(1.into()) }).collect();
        t.set_costs(&phase_one);
        t.optimize(n + m);
        if !t.rows[m][width - 1].is_zero() {
            return infeasible(t.pivots);
        }
        // drive artificial columns out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.m() {
            if t.basis[i] >= n {
                match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        t.origin.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for r in t.rows.iter_mut() {
            r.drain(n..n + m);
        }
        tab = Some(t);
    }

    let mut t = tab.expect("tableau initialised");
    t.set_costs(&lp.c);
    let bounded = t.optimize(n);
    let mrows = t.m();
    if !bounded {
        return LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: Q::zero(),
            dual: Vec::new(),
            basis: t.basis.clone(),
            pivots: t.pivots,
        };
    }
    let mut x = vec![Q::zero(); n];
    for i in 0..mrows {
        x[t.basis[i]] = t.rows[i][n].clone();
    }
    let objective = x.iter().zip(&lp.c).fold(Q::zero(), |acc, (xi, ci)| acc + xi * ci);
    let dual = dual_from_basis(lp, &t.basis, &t.origin).unwrap_or_default();
    LpSolution { status: LpStatus::Optimal, x, objective, dual, basis: t.basis, pivots: t.pivots }
}

/// Exact optimality certificate: primal feasibility, dual feasibility and
/// equal objectives.
pub fn verify(lp: &LinearProgram, sol: &LpSolution) -> Result<(), String> {
    if sol.status != LpStatus::Optimal {
        return Err(format!("status {:?}", sol.status));
    }
    if sol.x.iter().any(|v| v.is_negative()) {
        return Err("negative primal entry".into());
    }
    for (i, row) in lp.a.iter().enumerate() {
        let lhs = row.iter().zip(&sol.x).fold(Q::zero(), |acc, (a, x)| acc + a * x);
        if lhs != lp.b[i] {
            return Err(format!("row {} violated", i));
        }
    }
    if sol.dual.len() != lp.rows() {
        return Err("missing dual vector".into());
    }
    for j in 0..lp.cols() {
        let aty = (0..lp.rows()).fold(Q::zero(), |acc, i| acc + &lp.a[i][j] * &sol.dual[i]);
        if aty > lp.c[j] {
            return Err(format!("dual constraint {} violated", j));
        }
    }
    let by = lp.b.iter().zip(&sol.dual).fold(Q::zero(), |acc, (b, y)| acc + b * y);
    if by != sol.objective {
        return Err("duality gap".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q2};

    fn lp(a: &[&[i64]], b: &[i64], c: &[i64]) -> LinearProgram {
        LinearProgram {
            a: a.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect(),
            b: b.iter().map(|&v| q(v)).collect(),
            c: c.iter().map(|&v| q(v)).collect(),
        }
    }

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let p = lp(&[&[1, 2, 1, 0], &[3, 1, 0, 1]], &[4, 6], &[-1, -1, 0, 0]);
        let s = solve_lp(&p, None);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, q2(-14, 5));
        verify(&p, &s).unwrap();
        let warm = solve_lp(&p, Some(&[2, 3]));
        assert_eq!(warm.objective, q2(-14, 5));
        verify(&p, &warm).unwrap();
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(&[&[1, 1]], &[-1], &[1, 1]);
        assert_eq!(solve_lp(&p, None).status, LpStatus::Infeasible);
        let p = lp(&[&[1, -1]], &[1], &[0, -1]);
        assert_eq!(solve_lp(&p, None).status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let p = lp(&[&[1, 1, 0], &[2, 2, 0], &[0, 1, 1]], &[2, 4, 3], &[1, 2, 1]);
        let s = solve_lp(&p, None);
        assert_eq!(s.status, LpStatus::Optimal);
        verify(&p, &s).unwrap();
        assert_eq!(s.objective, q(5));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule
        let p = LinearProgram {
            a: vec![
                vec![q2(1, 4), q(-8), q(-1), q(9), q(1), q(0), q(0)],
                vec![q2(1, 2), q(-12), q2(-1, 2), q(3), q(0), q(1), q(0)],
                vec![q(0), q(0), q(1), q(0), q(0), q(0), q(1)],
            ],
            b: vec![q(0), q(0), q(1)],
            c: vec![q2(-3, 4), q(20), q2(-1, 2), q(6), q(0), q(0), q(0)],
        };
        let s = solve_lp(&p, Some(&[4, 5, 6]));
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, q2(-5, 4));
        verify(&p, &s).unwrap();
    }
}
