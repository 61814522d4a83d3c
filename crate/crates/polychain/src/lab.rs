//! Concrete constructions: the dyadic staircase, the theta-graph
//! counterexample family, and the integer search for its product
//! decompositions.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{Chain, ChainError};
use crate::coeff::CoefficientGroup;
use crate::exact::{format_rational, q, q2, two_pow, CertifiedReal, Q};
use crate::geometry::{RationalPoint, SimplexCell};
use crate::linalg::rank;
use crate::slicing::{section, slice, splitting_test, SliceSpec, SlicingError, SplitVerdict, TypeIndex};
use crate::tensor::{TensorChain, TensorError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Slicing(#[from] SlicingError),
    #[error("staircase level {0} exceeds the limit 16")]
    LevelTooLarge(u32),
    #[error("invalid theta-graph spec: {0}")]
    SpecInvalid(String),
    #[error("search budget of {0} nodes exceeded")]
    SearchBudgetExceeded(u64),
    #[error("invalid search parameters: {0}")]
    InvalidSearch(String),
    #[error("level {level} on axis {axis} passes through a vertex")]
    NonGenericLevel { axis: usize, level: String },
}

const Z: CoefficientGroup = CoefficientGroup::Integers;

fn point2(x: Q, y: Q) -> RationalPoint {
    RationalPoint(vec![x, y])
}

fn segment(a: RationalPoint, b: RationalPoint) -> SimplexCell {
    SimplexCell::new(vec![a, b]).expect("distinct endpoints")
}

/// Weights of the truncated atomic measure: `(1/2)4^{−j}` at `i/2^j` for
/// `j ≤ J`, `1 ≤ i ≤ 2^j`, summed per point, in increasing order.
pub fn staircase_atoms(level: u32) -> Vec<(Q, Q)> {
    let mut atoms: std::collections::BTreeMap<Q, Q> = std::collections::BTreeMap::new();
    for j in 0..=level {
        let w = q2(1, 2) * two_pow(-2 * j as i32);
        for i in 1..=(1u64 << j) {
            let x = Q::new((i as i64).into(), (1i64 << j).into());
            *atoms.entry(x).or_insert_with(Q::zero) += &w;
        }
    }
    atoms.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct Staircase {
    pub level: u32,
    /// Horizontal pieces of the truncated graph of `f`, orientation `e₁`.
    pub a1: Chain,
    /// Upward vertical fillers at the jumps.
    pub a2: Chain,
    /// `f` just left of 1 and the total truncated mass.
    pub end_height: Q,
    pub total_mass: Q,
}

/// The level-`J` truncation. Jumps at interior atoms are always filled;
/// `terminal_jump` also fills the jump at `x₁ = 1`.
pub fn build_staircase(level: u32, terminal_jump: bool) -> Result<Staircase, LabError> {
    if level > 16 {
        return Err(LabError::LevelTooLarge(level));
    }
    let atoms = staircase_atoms(level);
    let cells = 1i64 << level;
    let mut heights = Vec::with_capacity(cells as usize);
    let mut f = Q::zero();
    let mut next = 0;
    for i in 0..cells {
        let x = Q::new(i.into(), cells.into());
        while next < atoms.len() && atoms[next].0 <= x {
            f += &atoms[next].1;
            next += 1;
        }
        heights.push(f.clone());
    }
    let mut a1 = Chain::new(2, 1, Z);
    let mut a2 = Chain::new(2, 1, Z);
    for i in 0..cells {
        let x0 = Q::new(i.into(), cells.into());
        let x1 = Q::new((i + 1).into(), cells.into());
        let y = heights[i as usize].clone();
        a1.add_cell(segment(point2(x0.clone(), y.clone()), point2(x1, y.clone())), &Q::one())?;
        if i > 0 {
            let below = heights[i as usize - 1].clone();
            a2.add_cell(segment(point2(x0.clone(), below), point2(x0, y)), &Q::one())?;
        }
    }
    let end_height = heights.last().cloned().unwrap_or_else(Q::zero);
    let total_mass: Q = atoms.iter().fold(Q::zero(), |acc, (_, w)| acc + w);
    if terminal_jump {
        a2.add_cell(segment(point2(Q::one(), end_height.clone()), point2(Q::one(), total_mass.clone())), &Q::one())?;
    }
    Ok(Staircase { level, a1, a2, end_height, total_mass })
}

/// `1/3 − 2^{−J−1} + (2/3)4^{−J−1}`: the ordinate of the curve just left of 1.
pub fn staircase_end_height_closed_form(level: u32) -> Q {
    q2(1, 3) - two_pow(-(level as i32) - 1) + q2(2, 3) * two_pow(-2 * (level as i32) - 2)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub level: u32,
    pub segments: usize,
    pub boundary_mass: String,
}

/// `(J, M(∂A₁^{(J)}))` for `J = 0..=jmax`.
pub fn staircase_boundary_growth(jmax: u32) -> Result<Vec<GrowthRow>, LabError> {
    (0..=jmax)
        .map(|j| {
            let s = build_staircase(j, false)?;
            let m = s.a1.boundary()?.mass(false).value;
            Ok(GrowthRow {
                level: j,
                segments: s.a1.len(),
                boundary_mass: m.as_rational().map(|v| format_rational(&v)).unwrap_or_else(|| m.to_string()),
            })
        })
        .collect()
}

/// `N ≥ 3` broken lines from `(0,0)` to `(1,0)` of a common length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ThetaGraphSpec {
    pub paths: Vec<Vec<RationalPoint>>,
}

#[derive(Debug, Clone)]
pub struct ValidatedTheta {
    pub spec: ThetaGraphSpec,
    pub length: CertifiedReal,
}

fn seg_len_sq(a: &RationalPoint, b: &RationalPoint) -> Q {
    a.sub(b).iter().map(|d| d * d).fold(Q::zero(), |acc, v| acc + v)
}

fn cross(o: &RationalPoint, a: &RationalPoint, b: &RationalPoint) -> Q {
    let u = a.sub(o);
    let v = b.sub(o);
    &u[0] * &v[1] - &u[1] * &v[0]
}

fn on_segment(p: &RationalPoint, a: &RationalPoint, b: &RationalPoint) -> bool {
    cross(a, b, p).is_zero()
        && (0..2).all(|i| {
            let (lo, hi) = if a.0[i] <= b.0[i] { (&a.0[i], &b.0[i]) } else { (&b.0[i], &a.0[i]) };
            *lo <= p.0[i] && p.0[i] <= *hi
        })
}

/// Closed segments `ab` and `cd` share a point.
fn segments_meet(a: &RationalPoint, b: &RationalPoint, c: &RationalPoint, d: &RationalPoint) -> bool {
    let d1 = cross(c, d, a).signum();
    let d2 = cross(c, d, b).signum();
    let d3 = cross(a, b, c).signum();
    let d4 = cross(a, b, d).signum();
    if d1 * &d2 < Q::zero() && d3 * &d4 < Q::zero() {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

fn path_length(path: &[RationalPoint]) -> CertifiedReal {
    path.windows(2)
        .fold(CertifiedReal::zero(), |acc, w| acc.add(&CertifiedReal::scaled_sqrt(&Q::one(), &seg_len_sq(&w[0], &w[1]))))
}

impl ThetaGraphSpec {
    /// Three paths of length `5/4`.
    pub fn default_rational() -> Self {
        let p = |x: Q, y: Q| point2(x, y);
        ThetaGraphSpec {
            paths: vec![
                vec![p(q(0), q(0)), p(q2(1, 2), q2(3, 8)), p(q(1), q(0))],
                vec![p(q(0), q(0)), p(q2(1, 2), q2(-3, 8)), p(q(1), q(0))],
                vec![
                    p(q(0), q(0)),
                    p(q2(5, 16), q(0)),
                    p(q2(1, 2), q2(1, 4)),
                    p(q2(11, 16), q(0)),
                    p(q(1), q(0)),
                ],
            ],
        }
    }

    /// Three paths of length `√5`.
    pub fn default_irrational() -> Self {
        let p = |x: Q, y: Q| point2(x, y);
        ThetaGraphSpec {
            paths: vec![
                vec![p(q(0), q(0)), p(q2(1, 2), q(1)), p(q(1), q(0))],
                vec![p(q(0), q(0)), p(q2(1, 2), q(-1)), p(q(1), q(0))],
                vec![
                    p(q(0), q(0)),
                    p(q2(3, 8), q2(3, 16)),
                    p(q2(1, 2), q2(-1, 2)),
                    p(q2(5, 8), q2(3, 16)),
                    p(q(1), q(0)),
                ],
            ],
        }
    }

    /// `N` x-monotone paths (`3 ≤ N ≤ 7`): legs of Pythagorean slopes to
    /// `x = 1/4` and back from `x = 3/4`, joined by a flat middle whose
    /// length is topped up with small teeth of slope `±24/7`.
    pub fn fan(n: usize) -> Result<Self, LabError> {
        if !(3..=7).contains(&n) {
            return Err(LabError::SpecInvalid(format!("fan family supports 3..=7 paths, got {}", n)));
        }
        // slope and length factor √(1 + slope²)
        let slopes: [(Q, Q); 7] = [
            (q(0), q(1)),
            (q2(5, 12), q2(13, 12)),
            (q2(-5, 12), q2(13, 12)),
            (q2(3, 4), q2(5, 4)),
            (q2(-3, 4), q2(5, 4)),
            (q2(4, 3), q2(5, 3)),
            (q2(-4, 3), q2(5, 3)),
        ];
        let used = &slopes[..n];
        let quarter = q2(1, 4);
        let base = |f: &Q| q2(1, 2) * f + q2(1, 2);
        let target = used.iter().map(|(_, f)| base(f)).max().expect("n ≥ 3");
        let heights: Vec<Q> = used.iter().map(|(s, _)| s * &quarter).collect();
        let mut paths = Vec::with_capacity(n);
        for (i, (_, f)) in used.iter().enumerate() {
            let y = heights[i].clone();
            let extra = &target - base(f);
            // each tooth of width w adds (18/7)w
            let total_w = &extra * q2(7, 18);
            let gap = heights
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, h)| (h - &y).abs())
                .min()
                .expect("other paths");
            let mut teeth = 0i64;
            let mut w = Q::zero();
            if total_w.is_positive() {
                teeth = 1;
                loop {
                    w = &total_w / Q::from_integer(teeth.into());
                    // amplitude 12w/7 below a quarter of the gap
                    if q2(12, 7) * &w * q(4) < gap {
                        break;
                    }
                    teeth += 1;
                }
            }
            let flat = q2(1, 2) - &total_w;
            let step = &flat / Q::from_integer((teeth + 1).into());
            let mut path = vec![point2(q(0), q(0)), point2(quarter.clone(), y.clone())];
            let mut x = quarter.clone();
            for t in 0..teeth {
                x += &step;
                path.push(point2(x.clone(), y.clone()));
                let amp = q2(12, 7) * &w * if t % 2 == 0 { q(1) } else { q(-1) };
                path.push(point2(&x + &w / q(2), &y + amp));
                x += &w;
                path.push(point2(x.clone(), y.clone()));
            }
            path.push(point2(q2(3, 4), y.clone()));
            path.push(point2(q(1), q(0)));
            path.dedup();
            paths.push(path);
        }
        Ok(ThetaGraphSpec { paths })
    }

    /// Checks endpoints, equal lengths (exactly), and that the paths are
    /// simple and meet only at the two endpoints.
    pub fn validate(&self) -> Result<ValidatedTheta, LabError> {
        let s = point2(q(0), q(0));
        let e = point2(q(1), q(0));
        if self.paths.len() < 3 {
            return Err(LabError::SpecInvalid(format!("need at least 3 paths, got {}", self.paths.len())));
        }
        for (i, p) in self.paths.iter().enumerate() {
            if p.len() < 2 || p.iter().any(|v| v.dim() != 2) {
                return Err(LabError::SpecInvalid(format!("path {} is not a planar broken line", i)));
            }
            if p[0] != s || p[p.len() - 1] != e {
                return Err(LabError::SpecInvalid(format!("path {} does not run from (0,0) to (1,0)", i)));
            }
            if p.windows(2).any(|w| w[0] == w[1]) {
                return Err(LabError::SpecInvalid(format!("path {} repeats a vertex", i)));
            }
            let segs = p.len() - 1;
            for a in 0..segs {
                for b in a + 2..segs {
                    if segments_meet(&p[a], &p[a + 1], &p[b], &p[b + 1]) {
                        return Err(LabError::SpecInvalid(format!("path {} crosses itself at segments {} and {}", i, a, b)));
                    }
                }
                // consecutive segments may only share their joint
                if a + 1 < segs {
                    let (u, v, w) = (&p[a], &p[a + 1], &p[a + 2]);
                    if cross(u, v, w).is_zero() && on_segment(w, u, v) || on_segment(u, v, w) {
                        return Err(LabError::SpecInvalid(format!("path {} folds back at vertex {}", i, a + 1)));
                    }
                }
            }
        }
        let lengths: Vec<CertifiedReal> = self.paths.iter().map(|p| path_length(p)).collect();
        for (i, l) in lengths.iter().enumerate().skip(1) {
            match l.equals(&lengths[0]) {
                Some(true) => {}
                Some(false) => {
                    return Err(LabError::SpecInvalid(format!("path {} has length {} but path 0 has {}", i, l, lengths[0])))
                }
                None => return Err(LabError::SpecInvalid(format!("cannot decide equality of the lengths of paths 0 and {}", i))),
            }
        }
        for i in 0..self.paths.len() {
            for j in i + 1..self.paths.len() {
                let (p, r) = (&self.paths[i], &self.paths[j]);
                for a in 0..p.len() - 1 {
                    for b in 0..r.len() - 1 {
                        let (u, v, x, y) = (&p[a], &p[a + 1], &r[b], &r[b + 1]);
                        if !segments_meet(u, v, x, y) {
                            continue;
                        }
                        // allowed: only the shared endpoint of first or last legs
                        let shared_start = a == 0 && b == 0 && !on_segment(v, x, y) && !on_segment(y, u, v) && cross(u, v, y) != Q::zero();
                        let shared_end = a == p.len() - 2 && b == r.len() - 2 && !on_segment(u, x, y) && !on_segment(x, u, v) && cross(u, v, x) != Q::zero();
                        if !(shared_start || shared_end) {
                            return Err(LabError::SpecInvalid(format!(
                                "paths {} and {} meet away from the endpoints (segments {} and {})",
                                i, j, a, b
                            )));
                        }
                    }
                }
            }
        }
        Ok(ValidatedTheta { spec: self.clone(), length: lengths[0].clone() })
    }
}

fn path_chain(path: &[RationalPoint]) -> Chain {
    Chain::from_terms(2, 1, Z, path.windows(2).map(|w| (segment(w[0].clone(), w[1].clone()), Q::one())))
        .expect("validated path")
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub a: TensorChain,
    pub n: usize,
    pub length: CertifiedReal,
    /// `2Nℓ²`.
    pub expected_mass: CertifiedReal,
    pub mass: CertifiedReal,
    pub mass_certified: bool,
    pub boundary_zero: bool,
    pub split: bool,
}

/// `A = Σᵢ Cᵢ × (C'ᵢ − C'_{i+1 mod N})` with `C'ᵢ` the copy of `Cᵢ` in the
/// last two coordinates.
pub fn build_counterexample(spec: &ThetaGraphSpec) -> Result<Counterexample, LabError> {
    let v = spec.validate()?;
    let n = spec.paths.len();
    let chains: Vec<Chain> = spec.paths.iter().map(|p| path_chain(p)).collect();
    let mut a = TensorChain::new((2, 2), TypeIndex::new(1, 1), Z);
    for i in 0..n {
        let diff = chains[i].sub(&chains[(i + 1) % n])?;
        a = a.add(&TensorChain::wedge(&chains[i], &diff)?)?;
    }
    let embedded = a.embed();
    let report = embedded.mass(true);
    let boundary_zero = embedded.boundary()?.is_zero();
    let split = splitting_test(&embedded, 2, TypeIndex::new(1, 1))? == SplitVerdict::Split;
    let expected_mass = v.length.mul(&v.length).scale(&Q::from_integer((2 * n as i64).into()));
    Ok(Counterexample {
        a,
        n,
        length: v.length,
        expected_mass,
        mass: report.value,
        mass_certified: report.certified == Some(true),
        boundary_zero,
        split,
    })
}

/// Mass of the slice of the counterexample by `x₁ = s`, `x₃ = t`.
pub fn counterexample_slice_mass(c: &Counterexample, s: &Q, t: &Q) -> Result<CertifiedReal, LabError> {
    let spec = SliceSpec { gamma: vec![0, 2], point: RationalPoint(vec![s.clone(), t.clone()]) };
    Ok(slice(&c.a.embed(), &spec)?.mass(false).value)
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub max_terms: usize,
    pub bound: i64,
    /// `None` when no decomposition exists within the limits.
    pub min_found: Option<i64>,
    /// `(m_j, m'_j)` with `Σ_j m_j m'_jᵀ = I − P`.
    pub witness: Vec<(Vec<i64>, Vec<i64>)>,
    /// Every zero-sum vector in the box has even ℓ¹ norm, so every product
    /// cost lies in `{0, 4, 8, …}`.
    pub parity_ok: bool,
    pub pool_size: usize,
    pub nodes: u64,
}

const NODE_BUDGET: u64 = 200_000_000;

fn zero_sum_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![-bound; n];
    loop {
        if v.iter().sum::<i64>() == 0 && v.iter().any(|&x| x != 0) {
            out.push(v.clone());
        }
        let mut t = 0;
        loop {
            if t == n {
                return out;
            }
            if v[t] < bound {
                v[t] += 1;
                break;
            }
            v[t] = -bound;
            t += 1;
        }
    }
}

fn l1(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).sum()
}

fn int_rank(m: &[i64], n: usize) -> usize {
    let rows: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| Q::from_integer(m[i * n + j].into())).collect()).collect();
    rank(&rows)
}

struct Term {
    m: Vec<i64>,
    mp: Vec<i64>,
    cost: i64,
}

struct Search<'a> {
    n: usize,
    terms: &'a [Term],
    nodes: std::sync::atomic::AtomicU64,
}

impl Search<'_> {
    /// A decomposition of `residual` into at most `left` pool terms of total
    /// cost at most `budget`, with term indices `≥ from`.
    fn dfs(&self, residual: &[i64], left: usize, budget: i64, from: usize, path: &mut Vec<usize>) -> Result<bool, LabError> {
        let nodes = self.nodes.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        if nodes > NODE_BUDGET {
            return Err(LabError::SearchBudgetExceeded(NODE_BUDGET));
        }
        if residual.iter().all(|&x| x == 0) {
            return Ok(true);
        }
        let r = int_rank(residual, self.n) as i64;
        if left == 0 || r > left as i64 || l1(residual) > budget || 4 * r > budget {
            return Ok(false);
        }
        // the other r − 1 terms cost at least 4 each
        let max_cost = budget - 4 * (r - 1);
        for idx in from..self.terms.len() {
            let t = &self.terms[idx];
            if t.cost > max_cost {
                break;
            }
            let mut next = residual.to_vec();
            for i in 0..self.n {
                if t.m[i] == 0 {
                    continue;
                }
                for j in 0..self.n {
                    next[i * self.n + j] -= t.m[i] * t.mp[j];
                }
            }
            if l1(&next) > budget - t.cost {
                continue;
            }
            path.push(idx);
            if self.dfs(&next, left - 1, budget - t.cost, idx, path)? {
                return Ok(true);
            }
            path.pop();
        }
        Ok(false)
    }
}

/// Minimum of `Σ_j |m_j|₁|m'_j|₁` over decompositions
/// `I − P = Σ_{j ≤ J} m_j m'_jᵀ` (`P` the cyclic shift) into zero-sum
/// integer vectors with entries in `[−B, B]`, by iterative deepening on
/// the cost.
pub fn decomposition_lower_bound_search(n: usize, max_terms: usize, bound: i64) -> Result<SearchResult, LabError> {
    if n < 3 {
        return Err(LabError::InvalidSearch(format!("need N ≥ 3, got {}", n)));
    }
    if bound < 1 || max_terms == 0 {
        return Err(LabError::InvalidSearch("bound and term count must be positive".into()));
    }
    let vectors = zero_sum_vectors(n, bound);
    let parity_ok = vectors.iter().all(|v| l1(v) % 2 == 0);
    // m is sign-normalised (first nonzero entry positive); m' takes all signs
    let mut terms: Vec<Term> = Vec::new();
    for m in vectors.iter().filter(|v| v.iter().find(|&&x| x != 0).map_or(false, |&x| x > 0)) {
        for mp in &vectors {
            terms.push(Term { m: m.clone(), mp: mp.clone(), cost: l1(m) * l1(mp) });
        }
    }
    terms.sort_by(|a, b| a.cost.cmp(&b.cost).then_with(|| a.m.cmp(&b.m)).then_with(|| a.mp.cmp(&b.mp)));
    let mut target = vec![0i64; n * n];
    for i in 0..n {
        target[i * n + i] += 1;
        target[i * n + (i + 1) % n] -= 1;
    }
    let search = Search { n, terms: &terms, nodes: std::sync::atomic::AtomicU64::new(0) };
    let max_budget = terms.last().map_or(0, |t| t.cost) * max_terms as i64;
    let mut budget = 4;
    while budget <= max_budget {
        // split the first level across workers, keep the smallest first index
        let r = int_rank(&target, n) as i64;
        let first_max = budget - 4 * (r - 1);
        let candidates: Vec<usize> = (0..terms.len()).take_while(|&i| terms[i].cost <= first_max).collect();
        let found: Result<Vec<Option<Vec<usize>>>, LabError> = candidates
            .par_iter()
            .map(|&idx| {
                let t = &terms[idx];
                let mut next = target.clone();
                for i in 0..n {
                    for j in 0..n {
                        next[i * n + j] -= t.m[i] * t.mp[j];
                    }
                }
                if l1(&next) > budget - t.cost {
                    return Ok(None);
                }
                let mut path = vec![idx];
                Ok(search.dfs(&next, max_terms - 1, budget - t.cost, idx, &mut path)?.then_some(path))
            })
            .collect();
        if let Some(path) = found?.into_iter().flatten().next() {
            let witness: Vec<(Vec<i64>, Vec<i64>)> = path.iter().map(|&i| (terms[i].m.clone(), terms[i].mp.clone())).collect();
            let cost = path.iter().map(|&i| terms[i].cost).sum();
            return Ok(SearchResult {
                n,
                max_terms,
                bound,
                min_found: Some(cost),
                witness,
                parity_ok,
                pool_size: terms.len(),
                nodes: search.nodes.load(std::sync::atomic::Ordering::Relaxed),
            });
        }
        budget += 4;
    }
    Ok(SearchResult {
        n,
        max_terms,
        bound,
        min_found: None,
        witness: Vec::new(),
        parity_ok,
        pool_size: terms.len(),
        nodes: search.nodes.load(std::sync::atomic::Ordering::Relaxed),
    })
}

/// The explicit decomposition `I − P = Σ_{i<N−1} (e_i − e_{N−1})(e_i − e_{i+1})ᵀ`
/// of cost `4(N−1)`.
pub fn explicit_decomposition(n: usize) -> Vec<(Vec<i64>, Vec<i64>)> {
    (0..n - 1)
        .map(|i| {
            let mut m = vec![0i64; n];
            m[i] += 1;
            m[n - 1] -= 1;
            let mut mp = vec![0i64; n];
            mp[i] += 1;
            mp[i + 1] -= 1;
            (m, mp)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub level: String,
    pub slice_zero: bool,
    pub boundary_additive: bool,
}

/// For each level: whether `c ∩ {x_axis = s}` vanishes, and whether
/// `M(∂(c⌞H)) + M(∂(c⌞Hᶜ)) = M(∂c)` for `H = {x_axis > s}`.
pub fn hyperplane_split_probe(c: &Chain, axis: usize, levels: &[Q]) -> Result<Vec<ProbeRow>, LabError> {
    let vertex_levels: BTreeSet<Q> = c.vertex_levels(axis).into_iter().collect();
    let boundary_mass = |x: &Chain| -> Result<CertifiedReal, LabError> {
        let b = x.boundary()?;
        let b = if b.dim() <= 1 { b.normal_form()? } else { b };
        Ok(b.mass(false).value)
    };
    let total = boundary_mass(c)?;
    levels
        .iter()
        .map(|s| {
            if vertex_levels.contains(s) {
                return Err(LabError::NonGenericLevel { axis, level: format_rational(s) });
            }
            let sec = section(c, &SliceSpec { gamma: vec![axis], point: RationalPoint(vec![s.clone()]) })?;
            let sec = if sec.dim() <= 1 { sec.normal_form()? } else { sec };
            let above = c.clip_halfspace(axis, s, crate::geometry::Side::Above)?;
            let below = c.clip_halfspace(axis, s, crate::geometry::Side::Below)?;
            let sum = boundary_mass(&above)?.add(&boundary_mass(&below)?);
            Ok(ProbeRow { level: format_rational(s), slice_zero: sec.is_zero(), boundary_additive: sum.equals(&total) == Some(true) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_level_zero() {
        let s = build_staircase(0, false).unwrap();
        assert_eq!(s.a1.len(), 1);
        assert!(s.a2.is_empty());
        assert_eq!(s.end_height, q(0));
        let t = build_staircase(0, true).unwrap();
        assert_eq!(t.a2.len(), 1);
        assert_eq!(t.a2.mass(false).value.as_rational(), Some(q2(1, 2)));
    }

    #[test]
    fn staircase_properties() {
        for j in 0..=6 {
            let s = build_staircase(j, false).unwrap();
            assert_eq!(s.a1.mass(true).value.as_rational(), Some(q(1)));
            assert_eq!(s.end_height, staircase_end_height_closed_form(j));
            let b = s.a1.add(&s.a2).unwrap().boundary().unwrap();
            assert_eq!(b.len(), 2);
            assert_eq!(b.coefficient_of(&SimplexCell::point(point2(q(0), q(0)))).value(), &q(-1));
            assert_eq!(b.coefficient_of(&SimplexCell::point(point2(q(1), s.end_height.clone()))).value(), &q(1));
            assert_eq!(splitting_test(&s.a1, 1, TypeIndex::new(1, 0)).unwrap(), SplitVerdict::Split);
            if !s.a2.is_empty() {
                assert_eq!(splitting_test(&s.a2, 1, TypeIndex::new(0, 1)).unwrap(), SplitVerdict::Split);
            }
        }
        // untruncated measure: total 1, atom at 1 of weight 2/3
        let atoms = staircase_atoms(12);
        let at_one = atoms.last().unwrap();
        assert_eq!(at_one.0, q(1));
        assert!((at_one.1.clone() - q2(2, 3)).abs() < q2(1, 1 << 24));
    }

    #[test]
    fn boundary_growth_matches_atom_count() {
        let rows = staircase_boundary_growth(8).unwrap();
        for r in &rows {
            // independent count: dyadic points of level ≤ J strictly inside (0,1)
            let mut pts = BTreeSet::new();
            for j in 0..=r.level {
                for i in 1..(1i64 << j) {
                    pts.insert(Q::new(i.into(), (1i64 << j).into()));
                }
            }
            let expected = 2 * (pts.len() as i64 + 1);
            assert_eq!(r.boundary_mass, expected.to_string());
            assert!(expected >= 1 << r.level);
        }
        assert!(rows.windows(2).all(|w| w[0].boundary_mass.parse::<i64>().unwrap() < w[1].boundary_mass.parse::<i64>().unwrap()));
    }

    #[test]
    fn default_specs_validate() {
        let r = ThetaGraphSpec::default_rational().validate().unwrap();
        assert_eq!(r.length.as_rational(), Some(q2(5, 4)));
        let i = ThetaGraphSpec::default_irrational().validate().unwrap();
        assert_eq!(i.length.mul(&i.length).as_rational(), Some(q(5)));
        for n in 3..=7 {
            let f = ThetaGraphSpec::fan(n).unwrap();
            assert_eq!(f.paths.len(), n);
            f.validate().unwrap();
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = ThetaGraphSpec::default_rational();
        s.paths[2] = s.paths[0].clone();
        assert!(matches!(s.validate(), Err(LabError::SpecInvalid(_))));
        let mut s = ThetaGraphSpec::default_rational();
        s.paths[0][1] = point2(q2(1, 2), q2(1, 2));
        assert!(matches!(s.validate(), Err(LabError::SpecInvalid(_))));
        let mut s = ThetaGraphSpec::default_rational();
        // crosses path 2
        s.paths[0] = vec![point2(q(0), q(0)), point2(q2(1, 2), q2(-1, 8)), point2(q(1), q(0))];
        assert!(s.validate().is_err());
    }

    #[test]
    fn counterexample_mass_and_slice() {
        let c = build_counterexample(&ThetaGraphSpec::default_rational()).unwrap();
        assert_eq!(c.mass.as_rational(), Some(q(6) * q2(25, 16)));
        assert!(c.mass_certified && c.boundary_zero && c.split);
        let m = counterexample_slice_mass(&c, &q2(3, 7), &q2(5, 11)).unwrap();
        assert_eq!(m.as_rational(), Some(q(6)));
        let f = build_counterexample(&ThetaGraphSpec::fan(4).unwrap()).unwrap();
        assert_eq!(f.mass.exact, f.expected_mass.exact);
        assert!(f.boundary_zero);
    }

    fn naive_min(n: usize, terms: usize, bound: i64) -> Option<i64> {
        let vs = zero_sum_vectors(n, bound);
        let mut target = vec![0i64; n * n];
        for i in 0..n {
            target[i * n + i] += 1;
            target[i * n + (i + 1) % n] -= 1;
        }
        let pairs: Vec<(&Vec<i64>, &Vec<i64>)> = vs.iter().flat_map(|a| vs.iter().map(move |b| (a, b))).collect();
        let mut best: Option<i64> = None;
        let mut consider = |chosen: &[&(&Vec<i64>, &Vec<i64>)]| {
            let mut s = vec![0i64; n * n];
            let mut cost = 0;
            for (a, b) in chosen {
                for i in 0..n {
                    for j in 0..n {
                        s[i * n + j] += a[i] * b[j];
                    }
                }
                cost += l1(a) * l1(b);
            }
            if s == target && best.map_or(true, |b| cost < b) {
                best = Some(cost);
            }
        };
        for p in &pairs {
            consider(&[p]);
        }
        if terms >= 2 {
            for (i, p) in pairs.iter().enumerate() {
                for r in &pairs[i..] {
                    consider(&[p, r]);
                }
            }
        }
        best
    }

    #[test]
    fn search_matches_naive_enumeration() {
        for terms in 1..=2 {
            let s = decomposition_lower_bound_search(3, terms, 2).unwrap();
            assert_eq!(s.min_found, naive_min(3, terms, 2), "terms = {terms}");
        }
        let s = decomposition_lower_bound_search(3, 3, 2).unwrap();
        assert_eq!(s.min_found, Some(8));
        assert!(s.parity_ok);
    }

    #[test]
    fn explicit_decomposition_is_valid() {
        for n in 3..=7 {
            let d = explicit_decomposition(n);
            let mut s = vec![0i64; n * n];
            for (a, b) in &d {
                for i in 0..n {
                    for j in 0..n {
                        s[i * n + j] += a[i] * b[j];
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let t = i64::from(i == j) - i64::from(j == (i + 1) % n);
                    assert_eq!(s[i * n + j], t);
                }
            }
            assert_eq!(d.iter().map(|(a, b)| l1(a) * l1(b)).sum::<i64>(), 4 * (n as i64 - 1));
        }
    }

    #[test]
    fn probe_examples() {
        let s = build_staircase(3, false).unwrap();
        let rows = hyperplane_split_probe(&s.a1, 0, &[q2(3, 17)]).unwrap();
        assert!(!rows[0].slice_zero);
        let ys = s.a1.vertex_levels(1);
        let mid = (&ys[1] + &ys[2]) / q(2);
        let rows = hyperplane_split_probe(&s.a1, 1, &[mid]).unwrap();
        assert!(rows[0].slice_zero && rows[0].boundary_additive);
        let h = Chain::cell(segment(point2(q(0), q(0)), point2(q(1), q(0))), Z, q(1)).unwrap();
        for r in hyperplane_split_probe(&h, 1, &[q2(1, 3), q2(-2, 5)]).unwrap() {
            assert!(r.slice_zero && r.boundary_additive);
        }
        assert!(hyperplane_split_probe(&h, 0, &[q(0)]).is_err());
    }
}
