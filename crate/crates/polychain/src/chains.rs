//! Polyhedral G-chains: canonical formal sums of oriented simplices.
//!
//! Cells are stored sorted with the permutation parity folded into the
//! coefficient, so `g·p + g·(−p) = 0` and merging of identical cells hold
//! structurally. Equality up to subdivision is not normalised, except for
//! `k ≤ 1` through [`Chain::normal_form`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::coeff::{CoeffError, CoefficientGroup, CoefficientValue};
use crate::exact::{format_rational, CertifiedReal, Interval, SurdSum, Q};
use crate::geometry::{subsets, GeometryError, RationalPoint, Side, SimplexCell};
use crate::linalg::{inverse, Matrix};
use crate::lp::{solve_lp, LinearProgram, LpStatus};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("expected a {expected_dim}-cell in R^{expected_ambient}, got a {dim}-cell in R^{ambient}")]
    CellShape { expected_ambient: usize, expected_dim: usize, ambient: usize, dim: usize },
    #[error("chains live in different spaces: ({0}, {1}) vs ({2}, {3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("boundary of a 0-chain is not defined")]
    ZeroDimensional,
    #[error("box face x_{axis} = {level} passes through a vertex")]
    NonGenericBox { axis: usize, level: String },
    #[error("cartesian product needs an integer first factor, got {0}")]
    NonIntegerFactor(CoefficientGroup),
    #[error("operation supports chains of dimension at most {max}, got {dim}")]
    UnsupportedDimension { max: usize, dim: usize },
    #[error("axis {axis} out of range for ambient dimension {ambient}")]
    AxisOutOfRange { axis: usize, ambient: usize },
}

/// A finite sum `Σ gᵢ pᵢ` of canonical k-simplices in ℚⁿ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    ambient: usize,
    dim: usize,
    group: CoefficientGroup,
    terms: BTreeMap<SimplexCell, Q>,
}

/// Per-term data behind a mass value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassTerm {
    pub norm: Q,
    pub squared_volume: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassReport {
    pub terms: Vec<MassTerm>,
    /// `Σ |gᵢ| H^k(pᵢ)` over the stored representation.
    pub value: CertifiedReal,
    /// `Some(true)` when the cells were checked to overlap only in measure
    /// zero (the value is then the mass of the chain), `Some(false)` when an
    /// overlap was found (possible overestimate), `None` when not checked.
    pub certified: Option<bool>,
    pub overlap_witness: Option<(SimplexCell, SimplexCell)>,
}

/// Per-axis open bounds `lo < x_i < hi`; `None` is unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    pub bounds: Vec<(Option<Q>, Option<Q>)>,
}

impl BoxRegion {
    pub fn everything(n: usize) -> Self {
        BoxRegion { bounds: vec![(None, None); n] }
    }

    pub fn half_space(n: usize, axis: usize, level: Q, side: Side) -> Self {
        let mut b = BoxRegion::everything(n);
        b.bounds[axis] = match side {
            Side::Below => (None, Some(level)),
            Side::Above => (Some(level), None),
        };
        b
    }
}

impl Chain {
    pub fn new(ambient: usize, dim: usize, group: CoefficientGroup) -> Self {
        Chain { ambient, dim, group, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(ambient: usize, dim: usize, group: CoefficientGroup, terms: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (SimplexCell, Q)>,
    {
        let mut c = Chain::new(ambient, dim, group);
        for (cell, g) in terms {
            c.add_cell(cell, &g)?;
        }
        Ok(c)
    }

    /// `g·⟦p⟧` for a single simplex.
    pub fn cell(cell: SimplexCell, group: CoefficientGroup, g: Q) -> Result<Self, ChainError> {
        Chain::from_terms(cell.ambient(), cell.dim(), group, [(cell, g)])
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> CoefficientGroup {
        self.group
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SimplexCell, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, cell: &SimplexCell) -> CoefficientValue {
        let (c, s) = cell.canonical();
        let v = self.terms.get(&c).cloned().unwrap_or_else(Q::zero);
        let v = if s < 0 { self.group.neg(&v) } else { v };
        CoefficientValue::new(self.group, v).expect("stored values are canonical")
    }

    fn check_cell(&self, cell: &SimplexCell) -> Result<(), ChainError> {
        if cell.ambient() != self.ambient || cell.dim() != self.dim {
            return Err(ChainError::CellShape {
                expected_ambient: self.ambient,
                expected_dim: self.dim,
                ambient: cell.ambient(),
                dim: cell.dim(),
            });
        }
        Ok(())
    }

    /// Adds `g·cell`; the cell is canonicalised and merged.
    pub fn add_cell(&mut self, cell: SimplexCell, g: &Q) -> Result<(), ChainError> {
        self.check_cell(&cell)?;
        let g = self.group.reduce(g)?;
        let (c, s) = cell.canonical();
        self.accumulate(c, if s < 0 { self.group.neg(&g) } else { g });
        Ok(())
    }

    /// `cell` must already be canonical and `g` reduced.
    fn accumulate(&mut self, cell: SimplexCell, g: Q) {
        if g.is_zero() {
            return;
        }
        match self.terms.get_mut(&cell) {
            Some(v) => {
                let s = self.group.add(v, &g);
                if s.is_zero() {
                    self.terms.remove(&cell);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(cell, g);
            }
        }
    }

    fn accumulate_signed(&mut self, cell: SimplexCell, sign: i8, g: &Q) {
        let v = if sign < 0 { self.group.neg(g) } else { g.clone() };
        self.accumulate(cell, v);
    }

    fn check_shape(&self, other: &Chain) -> Result<(), ChainError> {
        self.group.check_same(&other.group)?;
        if self.ambient != other.ambient || self.dim != other.dim {
            return Err(ChainError::ShapeMismatch(self.ambient, self.dim, other.ambient, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Chain) -> Result<Chain, ChainError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (c, g) in &other.terms {
            out.accumulate(c.clone(), g.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Chain {
        Chain {
            ambient: self.ambient,
            dim: self.dim,
            group: self.group,
            terms: self.terms.iter().map(|(c, g)| (c.clone(), self.group.neg(g))).collect(),
        }
    }

    pub fn sub(&self, other: &Chain) -> Result<Chain, ChainError> {
        self.add(&other.neg())
    }

    /// The ℤ-action `n·c`.
    pub fn mul_int(&self, n: &BigInt) -> Chain {
        let mut out = Chain::new(self.ambient, self.dim, self.group);
        for (c, g) in &self.terms {
            out.accumulate(c.clone(), self.group.mul_int(n, g));
        }
        out
    }

    /// Same cells and values read in another group (values are reduced).
    pub fn with_group(&self, group: CoefficientGroup) -> Result<Chain, ChainError> {
        Chain::from_terms(self.ambient, self.dim, group, self.terms.iter().map(|(c, g)| (c.clone(), g.clone())))
    }

    /// `∂P = Σ gᵢ ∂pᵢ`.
    pub fn boundary(&self) -> Result<Chain, ChainError> {
        if self.dim == 0 {
            return Err(ChainError::ZeroDimensional);
        }
        let mut out = Chain::new(self.ambient, self.dim - 1, self.group);
        for (cell, g) in &self.terms {
            for (face, s) in cell.boundary_faces()? {
                // faces of a sorted simplex are sorted
                out.accumulate_signed(face, s, g);
            }
        }
        Ok(out)
    }

    /// Mass of the stored representation, optionally certified against
    /// positive-measure overlaps between cells.
    pub fn mass(&self, certify_overlap: bool) -> MassReport {
        let terms: Vec<MassTerm> = self
            .terms
            .iter()
            .map(|(c, g)| MassTerm { norm: self.group.norm(g), squared_volume: c.squared_volume() })
            .collect();
        let value = sum_scaled_roots(terms.iter().map(|t| (&t.norm, &t.squared_volume)));
        let (certified, overlap_witness) = if certify_overlap {
            let report = certify_non_overlapping(self.terms.keys());
            (Some(report.is_none()), report)
        } else {
            (None, None)
        };
        MassReport { terms, value, certified, overlap_witness }
    }

    /// Every vertex coordinate on `axis`.
    pub fn vertex_levels(&self, axis: usize) -> Vec<Q> {
        let mut v: Vec<Q> = self.terms.keys().flat_map(|c| c.vertices().iter().map(|p| p.0[axis].clone())).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `P ⌞ {x_axis ⋚ level}` (closed half-space; the level may be
    /// non-generic).
    pub fn clip_halfspace(&self, axis: usize, level: &Q, side: Side) -> Result<Chain, ChainError> {
        if axis >= self.ambient {
            return Err(ChainError::AxisOutOfRange { axis, ambient: self.ambient });
        }
        let mut out = Chain::new(self.ambient, self.dim, self.group);
        for (cell, g) in &self.terms {
            for (piece, s) in cell.clip_halfspace(axis, level, side)? {
                out.accumulate_signed(piece, s, g);
            }
        }
        Ok(out)
    }

    /// `P ⌞ box` for an open box whose faces avoid all vertex coordinates.
    pub fn restrict_box(&self, region: &BoxRegion) -> Result<Chain, ChainError> {
        if region.bounds.len() != self.ambient {
            return Err(ChainError::ShapeMismatch(self.ambient, self.dim, region.bounds.len(), self.dim));
        }
        for (axis, (lo, hi)) in region.bounds.iter().enumerate() {
            let levels = self.vertex_levels(axis);
            for l in lo.iter().chain(hi.iter()) {
                if levels.binary_search(l).is_ok() {
                    return Err(ChainError::NonGenericBox { axis, level: format_rational(l) });
                }
            }
        }
        let mut out = self.clone();
        for (axis, (lo, hi)) in region.bounds.iter().enumerate() {
            if let Some(l) = lo {
                out = out.clip_halfspace(axis, l, Side::Above)?;
            }
            if let Some(h) = hi {
                out = out.clip_halfspace(axis, h, Side::Below)?;
            }
        }
        Ok(out)
    }

    /// `P¹ × P²` with prisms triangulated by staircases. The first factor
    /// carries integer multiplicities acting on the second factor's group.
    pub fn cartesian_product(a: &Chain, b: &Chain) -> Result<Chain, ChainError> {
        if a.group != CoefficientGroup::Integers {
            return Err(ChainError::NonIntegerFactor(a.group));
        }
        let mut out = Chain::new(a.ambient + b.ambient, a.dim + b.dim, b.group);
        for (p, g) in &a.terms {
            let gi = g.to_integer();
            for (q, h) in &b.terms {
                let coeff = b.group.mul_int(&gi, h);
                for (piece, s) in p.product_prism(q) {
                    out.accumulate_signed(piece, s, &coeff);
                }
            }
        }
        Ok(out)
    }

    /// `π♯P` for the projection onto the coordinates `axes`; degenerate
    /// images vanish.
    pub fn push_forward_projection(&self, axes: &[usize]) -> Result<Chain, ChainError> {
        if let Some(&a) = axes.iter().find(|&&a| a >= self.ambient) {
            return Err(ChainError::AxisOutOfRange { axis: a, ambient: self.ambient });
        }
        let mut out = Chain::new(axes.len(), self.dim, self.group);
        for (cell, g) in &self.terms {
            if let Some(img) = cell.project(axes) {
                let (c, s) = img.canonical();
                out.accumulate_signed(c, s, g);
            }
        }
        Ok(out)
    }

    /// Canonical representative modulo subdivision for `k ≤ 1`: collinear
    /// segments are cut at all breakpoints, summed, and maximal runs with a
    /// constant coefficient are merged.
    pub fn normal_form(&self) -> Result<Chain, ChainError> {
        match self.dim {
            0 => Ok(self.clone()),
            1 => Ok(self.normal_form_1d()),
            d => Err(ChainError::UnsupportedDimension { max: 1, dim: d }),
        }
    }

    fn normal_form_1d(&self) -> Chain {
        // line key: (direction with first nonzero entry 1, point with that coordinate 0)
        let mut lines: BTreeMap<(Vec<Q>, Vec<Q>, usize), Vec<(Q, Q, Q)>> = BTreeMap::new();
        for (cell, g) in &self.terms {
            let v0 = &cell.vertices()[0];
            let v1 = &cell.vertices()[1];
            let e = v1.sub(v0);
            let a = e.iter().position(|x| !x.is_zero()).expect("nondegenerate segment");
            let d: Vec<Q> = e.iter().map(|x| x / &e[a]).collect();
            let base: Vec<Q> = v0.0.iter().zip(&d).map(|(x, di)| x - &v0.0[a] * di).collect();
            let (t0, t1) = (v0.0[a].clone(), v1.0[a].clone());
            let (lo, hi, w) = if t0 < t1 { (t0, t1, g.clone()) } else { (t1, t0, self.group.neg(g)) };
            lines.entry((d, base, a)).or_default().push((lo, hi, w));
        }
        let mut out = Chain::new(self.ambient, 1, self.group);
        for ((d, base, _), pieces) in lines {
            let mut cuts: Vec<Q> = pieces.iter().flat_map(|(lo, hi, _)| [lo.clone(), hi.clone()]).collect();
            cuts.sort();
            cuts.dedup();
            let mut runs: Vec<(Q, Q, Q)> = Vec::new();
            for w in cuts.windows(2) {
                let mid = (&w[0] + &w[1]) / Q::from_integer(2.into());
                let total = pieces
                    .iter()
                    .filter(|(lo, hi, _)| *lo < mid && mid < *hi)
                    .fold(Q::zero(), |acc, (_, _, g)| self.group.add(&acc, g));
                if total.is_zero() {
                    continue;
                }
                match runs.last_mut() {
                    Some(last) if last.1 == w[0] && last.2 == total => last.1 = w[1].clone(),
                    _ => runs.push((w[0].clone(), w[1].clone(), total)),
                }
            }
            for (lo, hi, g) in runs {
                let at = |t: &Q| RationalPoint(base.iter().zip(&d).map(|(b, di)| b + t * di).collect());
                let seg = SimplexCell::new_unchecked(vec![at(&lo), at(&hi)]);
                let (c, s) = seg.canonical();
                out.accumulate_signed(c, s, &g);
            }
        }
        out
    }

    /// Equality modulo subdivision for `k ≤ 1`.
    pub fn equals_mod_subdivision(&self, other: &Chain) -> Result<bool, ChainError> {
        self.check_shape(other)?;
        Ok(self.sub(other)?.normal_form()?.is_zero())
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(c, g)| format!("{}·{}", format_rational(g), c)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Σ nᵢ √sᵢ`, exact when every radicand factors.
pub fn sum_scaled_roots<'a>(items: impl Iterator<Item = (&'a Q, &'a Q)>) -> CertifiedReal {
    let mut exact = Some(SurdSum::zero());
    let mut interval = Interval::zero();
    for (n, s) in items {
        if n.is_zero() {
            continue;
        }
        interval = interval.add(Interval::from_rational(n).mul(Interval::sqrt_of(s)));
        exact = match (exact, SurdSum::sqrt(s)) {
            (Some(acc), Some(r)) => Some(acc.add(&r.scale(n))),
            _ => None,
        };
    }
    if let Some(e) = &exact {
        interval = e.interval();
    }
    CertifiedReal { exact, interval }
}

/// The affine k-plane of a cell written as a graph over the coordinates
/// `gamma`: `x_rest = x_γ·M + b`. `None` when the γ-minor vanishes.
pub fn graph_over(cell: &SimplexCell, gamma: &[usize]) -> Option<(Vec<usize>, Matrix, Vec<Q>)> {
    let n = cell.ambient();
    let rest: Vec<usize> = (0..n).filter(|i| !gamma.contains(i)).collect();
    let e = cell.edges();
    let p: Matrix = e.iter().map(|row| gamma.iter().map(|&c| row[c].clone()).collect()).collect();
    let r: Matrix = e.iter().map(|row| rest.iter().map(|&c| row[c].clone()).collect()).collect();
    let pinv = if gamma.is_empty() { Vec::new() } else { inverse(&p)? };
    let k = gamma.len();
    // M = P⁻¹ R  (k × |rest|)
    let m: Matrix = (0..k)
        .map(|i| (0..rest.len()).map(|j| (0..k).fold(Q::zero(), |acc, t| acc + &pinv[i][t] * &r[t][j])).collect())
        .collect();
    let v0 = &cell.vertices()[0];
    let b: Vec<Q> = (0..rest.len())
        .map(|j| {
            let shift = (0..k).fold(Q::zero(), |acc, i| acc + &v0.0[gamma[i]] * &m[i][j]);
            &v0.0[rest[j]] - shift
        })
        .collect();
    Some((rest, m, b))
}

/// A key identifying the affine span of a cell.
pub fn plane_key(cell: &SimplexCell) -> (Vec<usize>, Vec<Q>) {
    for gamma in subsets(cell.ambient(), cell.dim()) {
        if let Some((_, m, b)) = graph_over(cell, &gamma) {
            let mut key: Vec<Q> = m.into_iter().flatten().collect();
            key.extend(b);
            return (gamma, key);
        }
    }
    unreachable!("nondegenerate cell has a nonzero minor")
}

fn boxes_overlap(a: &(Vec<Q>, Vec<Q>), b: &(Vec<Q>, Vec<Q>)) -> bool {
    a.0.iter().zip(&b.1).all(|(lo, hi)| lo <= hi) && b.0.iter().zip(&a.1).all(|(lo, hi)| lo <= hi)
}

/// Whether two k-simplices of ℚᵏ share interior points.
pub fn interiors_overlap(s: &SimplexCell, t: &SimplexCell) -> bool {
    let k = s.dim();
    match k {
        0 => s.vertices()[0] == t.vertices()[0],
        1 => {
            let (a0, a1) = (&s.vertices()[0].0[0], &s.vertices()[1].0[0]);
            let (b0, b1) = (&t.vertices()[0].0[0], &t.vertices()[1].0[0]);
            let (alo, ahi) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
            let (blo, bhi) = if b0 < b1 { (b0, b1) } else { (b1, b0) };
            alo.max(blo) < ahi.min(bhi)
        }
        2 if s.ambient() == 2 => !triangles_separated(s, t) && !triangles_separated(t, s),
        _ => overlap_by_lp(s, t),
    }
}

/// Interiors of two `k`-simplices in `ℝᵏ` meet, decided by an LP.
fn overlap_by_lp(s: &SimplexCell, t: &SimplexCell) -> bool {
    let k = s.dim();
    // max t  s.t. Σλᵢvᵢ = Σμⱼwⱼ, Σλ = Σμ = 1, λ, μ ≥ t
    let m = k + 1;
    let cols = 4 * m + 1;
    let t_col = 2 * m;
    let mut a: Vec<Vec<Q>> = Vec::new();
    let mut b: Vec<Q> = Vec::new();
    for d in 0..k {
        let mut row = vec![Q::zero(); cols];
        for i in 0..m {
            row[i] = s.vertices()[i].0[d].clone();
            row[m + i] = -t.vertices()[i].0[d].clone();
        }
        a.push(row);
        b.push(Q::zero());
    }
    for block in 0..2 {
        let mut row = vec![Q::zero(); cols];
        for i in 0..m {
            row[block * m + i] = Q::one();
        }
        a.push(row);
        b.push(Q::one());
    }
    for i in 0..2 * m {
        let mut row = vec![Q::zero(); cols];
        row[i] = Q::one();
        row[t_col] = -Q::one();
        row[t_col + 1 + i] = -Q::one();
        a.push(row);
        b.push(Q::zero());
    }
    let mut c = vec![Q::zero(); cols];
    c[t_col] = -Q::one();
    let sol = solve_lp(&LinearProgram { a, b, c }, None);
    sol.status == LpStatus::Optimal && sol.objective.is_negative()
}

/// Some edge line of `s` has all of `t` on its closed outer side.
fn triangles_separated(s: &SimplexCell, t: &SimplexCell) -> bool {
    let v = s.vertices();
    let cross = |o: &RationalPoint, a: &RationalPoint, p: &RationalPoint| {
        (&a.0[0] - &o.0[0]) * (&p.0[1] - &o.0[1]) - (&a.0[1] - &o.0[1]) * (&p.0[0] - &o.0[0])
    };
    (0..3).any(|i| {
        let (o, a, opp) = (&v[i], &v[(i + 1) % 3], &v[(i + 2) % 3]);
        let inside = cross(o, a, opp).signum();
        t.vertices().iter().all(|p| (cross(o, a, p) * &inside) <= Q::zero())
    })
}

/// First pair of cells sharing a positive-measure piece, if any.
pub fn certify_non_overlapping<'a>(cells: impl Iterator<Item = &'a SimplexCell>) -> Option<(SimplexCell, SimplexCell)> {
    let mut groups: BTreeMap<(Vec<usize>, Vec<Q>), Vec<&SimplexCell>> = BTreeMap::new();
    for c in cells {
        groups.entry(plane_key(c)).or_default().push(c);
    }
    let groups: Vec<((Vec<usize>, Vec<Q>), Vec<&SimplexCell>)> = groups.into_iter().filter(|(_, v)| v.len() > 1).collect();
    groups
        .par_iter()
        .filter_map(|((gamma, _), members)| {
            let projected: Vec<SimplexCell> =
                members.iter().map(|c| c.project(gamma).expect("nonzero minor on gamma")).collect();
            let boxes: Vec<(Vec<Q>, Vec<Q>)> = projected.iter().map(|c| c.bbox()).collect();
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    if boxes_overlap(&boxes[i], &boxes[j]) && interiors_overlap(&projected[i], &projected[j]) {
                        return Some((members[i].clone(), members[j].clone()));
                    }
                }
            }
            None
        })
        .find_first(|_| true)
}
