//! Flat norm `F` and tensor flat norm `F^∧` of grid chains as exact linear
//! programs over a cubical complex.
//!
//! A cube cell is a base grid vertex plus an ascending set of directions
//! `d₁ < … < d_k`, oriented by `e_{d₁} ∧ … ∧ e_{d_k}`. Its boundary is
//! `Σ_t (−1)^{t−1}(upper_t − lower_t)`; `B1` keeps the terms with `d_t < n₁`
//! and `B2` the rest, so `B = B1 + B2` and `B2` carries the `(−1)^{k₁}` of
//! the partial boundary `∂₂`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::chains::{Chain, ChainError};
use crate::coeff::CoefficientGroup;
use crate::exact::{format_rational, CertifiedReal, Q};
use crate::geometry::{orientation_sign, subsets, unit_vector, RationalPoint, Side, SimplexCell};
use crate::linalg::{rank, solve_unique, Matrix};
use crate::lp::{solve_lp, verify, LinearProgram, LpStatus};
use crate::slicing::{slices_vanish_ae, TypeIndex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlatNormError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("cell {cell} is not a union of grid cells of the complex")]
    NotGridAligned { cell: String },
    #[error("grid chain has a cell of type ({k1}, {k2}), expected ({expected_k1}, {expected_k2})")]
    TypeMismatch { expected_k1: usize, expected_k2: usize, k1: usize, k2: usize },
    #[error("flat norms are computed for Z and Q coefficients, not {0}")]
    UnsupportedGroup(CoefficientGroup),
    #[error("linear program ended with status {0:?}")]
    Lp(LpStatus),
    #[error("dimension {dim} is out of range for the complex")]
    Dimension { dim: usize },
}

/// An axis-parallel cube: grid vertex `base` plus unit steps along `dirs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CubeCell {
    pub base: Vec<i64>,
    pub dirs: Vec<usize>,
}

impl CubeCell {
    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn type_index(&self, n1: usize) -> TypeIndex {
        TypeIndex::of_gamma(&self.dirs, n1)
    }

    /// `(face, sign)` pairs; `part` 0 = full boundary, 1 = directions `< n₁`,
    /// 2 = directions `≥ n₁`.
    pub fn faces(&self, n1: usize, part: u8) -> Vec<(CubeCell, i64)> {
        let mut out = Vec::new();
        for (t, &d) in self.dirs.iter().enumerate() {
            let keep = match part {
                1 => d < n1,
                2 => d >= n1,
                _ => true,
            };
            if !keep {
                continue;
            }
            let sign = if t % 2 == 0 { 1 } else { -1 };
            let mut dirs = self.dirs.clone();
            dirs.remove(t);
            let mut upper = self.base.clone();
            upper[d] += 1;
            out.push((CubeCell { base: upper, dirs: dirs.clone() }, sign));
            out.push((CubeCell { base: self.base.clone(), dirs }, -sign));
        }
        out
    }
}

/// Sparse column-major matrix with integer entries.
pub type SparseMatrix = Vec<Vec<(usize, i64)>>;

#[derive(Debug, Clone)]
pub struct CubicalComplex {
    origin: Vec<Q>,
    h: Q,
    extents: Vec<usize>,
    n1: usize,
    cells: Vec<Vec<CubeCell>>,
    index: Vec<HashMap<CubeCell, usize>>,
}

impl CubicalComplex {
    /// The complex of `[origin, origin + h·extents]` with split `n₁`.
    pub fn new(origin: Vec<Q>, h: Q, extents: Vec<usize>, n1: usize) -> Result<Self, FlatNormError> {
        let n = origin.len();
        if extents.len() != n {
            return Err(FlatNormError::InvalidComplex(format!("{} extents for {} axes", extents.len(), n)));
        }
        if !h.is_positive() {
            return Err(FlatNormError::InvalidComplex("spacing must be positive".into()));
        }
        if n1 > n {
            return Err(FlatNormError::InvalidComplex(format!("split {} exceeds dimension {}", n1, n)));
        }
        let mut cells = Vec::with_capacity(n + 1);
        let mut index = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut list = Vec::new();
            for dirs in subsets(n, k) {
                let ranges: Vec<i64> = (0..n).map(|a| extents[a] as i64 + if dirs.contains(&a) { 0 } else { 1 }).collect();
                if ranges.iter().any(|&r| r <= 0) {
                    continue;
                }
                let total: i64 = ranges.iter().product();
                for mut lin in 0..total {
                    let mut base = vec![0i64; n];
                    for a in (0..n).rev() {
                        base[a] = lin % ranges[a];
                        lin /= ranges[a];
                    }
                    list.push(CubeCell { base, dirs: dirs.clone() });
                }
            }
            list.sort();
            let map = list.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
            cells.push(list);
            index.push(map);
        }
        Ok(CubicalComplex { origin, h, extents, n1, cells, index })
    }

    pub fn ambient(&self) -> usize {
        self.origin.len()
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn spacing(&self) -> &Q {
        &self.h
    }

    pub fn origin(&self) -> &[Q] {
        &self.origin
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn cells(&self, k: usize) -> &[CubeCell] {
        &self.cells[k]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    pub fn index_of(&self, cell: &CubeCell) -> Option<usize> {
        self.index.get(cell.dim())?.get(cell).copied()
    }

    /// `h^k`.
    pub fn cell_volume(&self, k: usize) -> Q {
        (0..k).fold(Q::one(), |acc, _| acc * &self.h)
    }

    pub fn vertex_point(&self, base: &[i64]) -> RationalPoint {
        RationalPoint(self.origin.iter().zip(base).map(|(o, &b)| o + &self.h * Q::from_integer(b.into())).collect())
    }

    /// Boundary matrix from `k`-cells to `(k−1)`-cells (`part` as in
    /// [`CubeCell::faces`]).
    pub fn boundary_matrix(&self, k: usize, part: u8) -> SparseMatrix {
        self.cells[k]
            .iter()
            .map(|c| {
                let mut col: BTreeMap<usize, i64> = BTreeMap::new();
                for (f, s) in c.faces(self.n1, part) {
                    let i = self.index[k - 1][&f];
                    *col.entry(i).or_insert(0) += s;
                }
                col.into_iter().filter(|(_, v)| *v != 0).collect()
            })
            .collect()
    }

    /// The same grid extended by `pad` cells on every side.
    pub fn padded(&self, pad: usize) -> CubicalComplex {
        let origin = self.origin.iter().map(|o| o - &self.h * Q::from_integer((pad as i64).into())).collect();
        let extents = self.extents.iter().map(|e| e + 2 * pad).collect();
        CubicalComplex::new(origin, self.h.clone(), extents, self.n1).expect("padding keeps a valid complex")
    }

    /// Grid index of a coordinate, if it lies on a grid level in range.
    fn level_index(&self, axis: usize, x: &Q) -> Option<i64> {
        let t = (x - &self.origin[axis]) / &self.h;
        if !t.is_integer() {
            return None;
        }
        let i = t.to_integer();
        let i: i64 = i.try_into().ok()?;
        (0..=self.extents[axis] as i64).contains(&i).then_some(i)
    }
}

/// Real coefficients on the `k`-cells of a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridChain {
    pub dim: usize,
    pub group: CoefficientGroup,
    pub coeffs: Vec<Q>,
}

impl GridChain {
    pub fn zero(complex: &CubicalComplex, dim: usize, group: CoefficientGroup) -> Self {
        GridChain { dim, group, coeffs: vec![Q::zero(); complex.cells(dim).len()] }
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.coeffs.iter().enumerate().filter(|(_, v)| !v.is_zero())
    }

    pub fn nonzero_count(&self) -> usize {
        self.support().count()
    }

    pub fn mass(&self, complex: &CubicalComplex) -> Q {
        let vol = complex.cell_volume(self.dim);
        self.coeffs.iter().fold(Q::zero(), |acc, v| acc + v.abs()) * vol
    }

    pub fn boundary(&self, complex: &CubicalComplex, part: u8) -> Option<GridChain> {
        if self.dim == 0 {
            return None;
        }
        let b = complex.boundary_matrix(self.dim, part);
        let mut out = GridChain::zero(complex, self.dim - 1, self.group);
        for (j, v) in self.support() {
            for &(i, s) in &b[j] {
                out.coeffs[i] += v * Q::from_integer(s.into());
            }
        }
        Some(out)
    }

    /// Back to a simplicial chain: each cube split into `k!` Kuhn simplices.
    pub fn to_chain(&self, complex: &CubicalComplex) -> Result<Chain, FlatNormError> {
        let n = complex.ambient();
        let mut out = Chain::new(n, self.dim, self.group);
        for (j, v) in self.support() {
            let cube = &complex.cells(self.dim)[j];
            for (cell, s) in kuhn_simplices(complex, cube) {
                let g = if s < 0 { -v.clone() } else { v.clone() };
                out.add_cell(cell, &g)?;
            }
        }
        Ok(out)
    }

    /// Re-indexes the chain on a complex with the same spacing that covers it.
    pub fn transfer(&self, from: &CubicalComplex, to: &CubicalComplex) -> Result<GridChain, FlatNormError> {
        let mut out = GridChain::zero(to, self.dim, self.group);
        for (j, v) in self.support() {
            let cube = &from.cells(self.dim)[j];
            let p = from.vertex_point(&cube.base);
            let base: Option<Vec<i64>> = (0..to.ambient()).map(|a| to.level_index(a, &p.0[a])).collect();
            let target = base
                .map(|base| CubeCell { base, dirs: cube.dirs.clone() })
                .and_then(|c| to.index_of(&c))
                .ok_or_else(|| FlatNormError::NotGridAligned { cell: format!("{:?}", cube) })?;
            out.coeffs[target] = v.clone();
        }
        Ok(out)
    }
}

fn kuhn_simplices(complex: &CubicalComplex, cube: &CubeCell) -> Vec<(SimplexCell, i8)> {
    let n = complex.ambient();
    let k = cube.dim();
    let frame: Vec<Vec<Q>> = cube.dirs.iter().map(|&d| unit_vector(n, d)).collect();
    let mut out = Vec::new();
    for perm in permutations(k) {
        let mut base = cube.base.clone();
        let mut verts = vec![complex.vertex_point(&base)];
        for &i in &perm {
            base[cube.dirs[i]] += 1;
            verts.push(complex.vertex_point(&base));
        }
        let cell = SimplexCell::new(verts).expect("Kuhn simplices are nondegenerate");
        let s = if k == 0 { 1 } else { orientation_sign(&cell.edges(), &frame) };
        let (c, parity) = cell.canonical();
        out.push((c, s * parity));
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Expresses an aligned simplicial chain on the grid. Every cell must lie
/// in a coordinate `k`-plane through grid levels, and the chain must be
/// constant on each grid cube; the result is checked to embed back to the
/// same chain.
pub fn rasterize(c: &Chain, complex: &CubicalComplex) -> Result<GridChain, FlatNormError> {
    let n = complex.ambient();
    if c.ambient() != n {
        return Err(FlatNormError::InvalidComplex(format!("chain lives in R^{}, complex in R^{}", c.ambient(), n)));
    }
    let k = c.dim();
    let vol = complex.cell_volume(k);
    let kf = Q::from_integer(crate::exact::factorial(k));
    let mut out = GridChain::zero(complex, k, c.group());
    for (cell, g) in c.terms() {
        let not_aligned = || FlatNormError::NotGridAligned { cell: cell.to_string() };
        let v0 = &cell.vertices()[0];
        let dirs: Vec<usize> = (0..n).filter(|&a| cell.vertices().iter().any(|v| v.0[a] != v0.0[a])).collect();
        if dirs.len() != k {
            return Err(not_aligned());
        }
        let mut base = vec![0i64; n];
        for a in 0..n {
            if !dirs.contains(&a) {
                base[a] = complex.level_index(a, &v0.0[a]).ok_or_else(not_aligned)?;
            }
        }
        let orient = cell.minor(&dirs);
        let sign = if orient.is_positive() { Q::one() } else { -Q::one() };
        // grid cubes meeting the bounding box along `dirs`
        let (lo, hi) = cell.bbox();
        let mut ranges = Vec::new();
        for &d in &dirs {
            let a = ((&lo[d] - &complex.origin[d]) / &complex.h).floor().to_integer();
            let b = ((&hi[d] - &complex.origin[d]) / &complex.h).ceil().to_integer();
            let a: i64 = a.try_into().map_err(|_| not_aligned())?;
            let b: i64 = b.try_into().map_err(|_| not_aligned())?;
            if a < 0 || b > complex.extents[d] as i64 {
                return Err(not_aligned());
            }
            ranges.push(a..b);
        }
        for idx in product_ranges(&ranges) {
            let mut cube_base = base.clone();
            for (t, &d) in dirs.iter().enumerate() {
                cube_base[d] = idx[t];
            }
            let cube = CubeCell { base: cube_base.clone(), dirs: dirs.clone() };
            let mut pieces = vec![cell.clone()];
            for &d in &dirs {
                let lo_level = complex.vertex_point(&cube_base).0[d].clone();
                let hi_level = &lo_level + &complex.h;
                pieces = clip_all(&pieces, d, &lo_level, Side::Above);
                pieces = clip_all(&pieces, d, &hi_level, Side::Below);
            }
            let area = pieces.iter().fold(Q::zero(), |acc, p| acc + p.minor(&dirs).abs() / &kf);
            if area.is_zero() {
                continue;
            }
            let j = complex.index_of(&cube).ok_or_else(not_aligned)?;
            out.coeffs[j] += g * &sign * area / &vol;
        }
    }
    for v in &out.coeffs {
        if c.group().reduce(v).is_err() {
            return Err(FlatNormError::NotGridAligned { cell: "partially covered grid cell".into() });
        }
    }
    let back = out.to_chain(complex)?;
    let diff = c.sub(&back)?;
    if k <= 2 {
        for gamma in subsets(n, k) {
            if !slices_vanish_ae(&diff, &gamma).map_err(|e| FlatNormError::InvalidComplex(e.to_string()))?.is_vanishes() {
                return Err(FlatNormError::NotGridAligned { cell: "chain is not constant on grid cells".into() });
            }
        }
    }
    Ok(out)
}

fn clip_all(cells: &[SimplexCell], axis: usize, level: &Q, side: Side) -> Vec<SimplexCell> {
    cells
        .iter()
        .flat_map(|c| c.clip_halfspace(axis, level, side).expect("axis in range"))
        .map(|(c, _)| c)
        .collect()
}

fn product_ranges(ranges: &[std::ops::Range<i64>]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for r in ranges {
        let mut next = Vec::new();
        for prefix in &out {
            for v in r.clone() {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `min Σ wⱼ|xⱼ|  s.t.  Σ xⱼ aⱼ = b` with the first `rows` columns the
/// identity, kept unsplit so that oracles can enumerate it directly.
#[derive(Debug, Clone)]
pub struct L1Problem {
    pub rows: usize,
    pub b: Vec<Q>,
    /// weight, sparse column, (piece, cell index)
    pub columns: Vec<(Q, Vec<(usize, Q)>, usize, usize)>,
    pub piece_names: Vec<&'static str>,
    pub piece_dims: Vec<usize>,
}

impl L1Problem {
    fn dense_column(&self, j: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.rows];
        for (i, a) in &self.columns[j].1 {
            v[*i] += a;
        }
        v
    }

    /// The split program `x = x⁺ − x⁻` and its warm-start basis.
    pub fn linear_program(&self) -> (LinearProgram, Vec<usize>) {
        let ncols = 2 * self.columns.len();
        let mut a = vec![vec![Q::zero(); ncols]; self.rows];
        let mut c = Vec::with_capacity(ncols);
        for (j, (w, col, _, _)) in self.columns.iter().enumerate() {
            for (i, v) in col {
                a[*i][2 * j] += v;
                a[*i][2 * j + 1] -= v;
            }
            c.push(w.clone());
            c.push(w.clone());
        }
        let basis = (0..self.rows).map(|i| if self.b[i].is_negative() { 2 * i + 1 } else { 2 * i }).collect();
        (LinearProgram { a, b: self.b.clone(), c }, basis)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessPiece {
    pub name: &'static str,
    pub dim: usize,
    /// (cell, coefficient) pairs in the complex
    pub cells: Vec<(CubeCell, String)>,
    pub mass: String,
}

#[derive(Debug, Clone)]
pub struct FlatNormResult {
    pub value: Q,
    pub pieces: Vec<(&'static str, GridChain)>,
    pub dual: Vec<Q>,
    pub dual_hash: String,
    pub certified: bool,
    pub pivots: usize,
    /// Some witness cell touches the outer boundary of the complex.
    pub touches_boundary: bool,
}

impl FlatNormResult {
    pub fn witness(&self, complex: &CubicalComplex) -> Vec<WitnessPiece> {
        self.pieces
            .iter()
            .map(|(name, g)| WitnessPiece {
                name,
                dim: g.dim,
                cells: g.support().map(|(j, v)| (complex.cells(g.dim)[j].clone(), format_rational(v))).collect(),
                mass: format_rational(&g.mass(complex)),
            })
            .collect()
    }
}

fn check_group(g: &GridChain) -> Result<(), FlatNormError> {
    match g.group {
        CoefficientGroup::IntegersMod(_) => Err(FlatNormError::UnsupportedGroup(g.group)),
        _ => Ok(()),
    }
}

fn sparse_to_q(col: &[(usize, i64)]) -> Vec<(usize, Q)> {
    col.iter().map(|&(i, s)| (i, Q::from_integer(s.into()))).collect()
}

/// The program for `F(P) = min M(Q) + M(R)`, `P = Q + ∂R`.
pub fn flat_norm_problem(complex: &CubicalComplex, p: &GridChain) -> Result<L1Problem, FlatNormError> {
    check_group(p)?;
    let k = p.dim;
    if k > complex.ambient() {
        return Err(FlatNormError::Dimension { dim: k });
    }
    let rows = complex.cells(k).len();
    let wk = complex.cell_volume(k);
    let mut columns: Vec<(Q, Vec<(usize, Q)>, usize, usize)> =
        (0..rows).map(|i| (wk.clone(), vec![(i, Q::one())], 0, i)).collect();
    if k < complex.ambient() {
        let wr = complex.cell_volume(k + 1);
        for (j, col) in complex.boundary_matrix(k + 1, 0).iter().enumerate() {
            columns.push((wr.clone(), sparse_to_q(col), 1, j));
        }
    }
    Ok(L1Problem { rows, b: p.coeffs.clone(), columns, piece_names: vec!["Q", "R"], piece_dims: vec![k, k + 1] })
}

/// The program for `F^∧(P) = min Σ M(Q^{i₁,i₂})` subject to
/// `P = Q^{0,0} + ∂₁Q^{1,0} + ∂₂Q^{0,1} + ∂₁∂₂Q^{1,1}`.
pub fn tensor_flat_norm_problem(complex: &CubicalComplex, p: &GridChain, ty: TypeIndex) -> Result<L1Problem, FlatNormError> {
    check_group(p)?;
    let n1 = complex.n1();
    let k = p.dim;
    if ty.k1 + ty.k2 != k {
        return Err(FlatNormError::TypeMismatch { expected_k1: ty.k1, expected_k2: ty.k2, k1: ty.k1, k2: k.saturating_sub(ty.k1) });
    }
    for (j, _) in p.support() {
        let t = complex.cells(k)[j].type_index(n1);
        if t != ty {
            return Err(FlatNormError::TypeMismatch { expected_k1: ty.k1, expected_k2: ty.k2, k1: t.k1, k2: t.k2 });
        }
    }
    let of_type = |dim: usize, t: TypeIndex| -> Vec<usize> {
        if dim > complex.ambient() {
            return Vec::new();
        }
        (0..complex.cells(dim).len()).filter(|&j| complex.cells(dim)[j].type_index(n1) == t).collect()
    };
    let row_cells = of_type(k, ty);
    let row_of: HashMap<usize, usize> = row_cells.iter().enumerate().map(|(r, &j)| (j, r)).collect();
    let mut b = vec![Q::zero(); row_cells.len()];
    for (j, v) in p.support() {
        b[row_of[&j]] = v.clone();
    }
    let mut columns: Vec<(Q, Vec<(usize, Q)>, usize, usize)> = row_cells
        .iter()
        .enumerate()
        .map(|(r, &j)| (complex.cell_volume(k), vec![(r, Q::one())], 0, j))
        .collect();
    let lift = |cell: &CubeCell, parts: &[u8]| -> Vec<(usize, Q)> {
        // apply the partial boundaries right to left
        let mut current: BTreeMap<CubeCell, i64> = BTreeMap::from([(cell.clone(), 1)]);
        for &part in parts.iter().rev() {
            let mut next: BTreeMap<CubeCell, i64> = BTreeMap::new();
            for (c, v) in current {
                for (f, s) in c.faces(n1, part) {
                    *next.entry(f).or_insert(0) += v * s;
                }
            }
            current = next;
        }
        let mut col: Vec<(usize, Q)> = current
            .into_iter()
            .filter(|(_, v)| *v != 0)
            .map(|(c, v)| (row_of[&complex.index_of(&c).expect("faces lie in the complex")], Q::from_integer(v.into())))
            .collect();
        col.sort_by_key(|(i, _)| *i);
        col
    };
    let families: [(TypeIndex, &[u8], usize); 3] = [
        (TypeIndex::new(ty.k1 + 1, ty.k2), &[1], 1),
        (TypeIndex::new(ty.k1, ty.k2 + 1), &[2], 2),
        (TypeIndex::new(ty.k1 + 1, ty.k2 + 1), &[1, 2], 3),
    ];
    for (t, parts, piece) in families {
        let dim = t.k1 + t.k2;
        let w = complex.cell_volume(dim);
        for j in of_type(dim, t) {
            let col = lift(&complex.cells(dim)[j], parts);
            if !col.is_empty() {
                columns.push((w.clone(), col, piece, j));
            }
        }
    }
    Ok(L1Problem {
        rows: row_cells.len(),
        b,
        columns,
        piece_names: vec!["Q00", "Q10", "Q01", "Q11"],
        piece_dims: vec![k, k + 1, k + 1, k + 2],
    })
}

fn solve_problem(complex: &CubicalComplex, prob: &L1Problem, group: CoefficientGroup) -> Result<FlatNormResult, FlatNormError> {
    let (lp, basis) = prob.linear_program();
    let sol = solve_lp(&lp, Some(&basis));
    if sol.status != LpStatus::Optimal {
        return Err(FlatNormError::Lp(sol.status));
    }
    let certified = verify(&lp, &sol).is_ok();
    let mut pieces: Vec<(&'static str, GridChain)> = prob
        .piece_names
        .iter()
        .zip(&prob.piece_dims)
        .map(|(name, &d)| {
            let g = if d <= complex.ambient() { GridChain::zero(complex, d, group) } else { GridChain { dim: d, group, coeffs: Vec::new() } };
            (*name, g)
        })
        .collect();
    let mut touches_boundary = false;
    for (j, (_, _, piece, cell)) in prob.columns.iter().enumerate() {
        let v = &sol.x[2 * j] - &sol.x[2 * j + 1];
        if v.is_zero() {
            continue;
        }
        let g = &mut pieces[*piece].1;
        let cube = &complex.cells(g.dim)[*cell];
        touches_boundary |= (0..complex.ambient()).any(|a| {
            cube.base[a] == 0 || cube.base[a] + i64::from(cube.dirs.contains(&a)) == complex.extents[a] as i64
        });
        g.coeffs[*cell] = v;
    }
    let mut hasher = Sha256::new();
    for y in &sol.dual {
        hasher.update(format_rational(y).as_bytes());
        hasher.update(b";");
    }
    let dual_hash = format!("{:x}", hasher.finalize());
    Ok(FlatNormResult { value: sol.objective, pieces, dual: sol.dual, dual_hash, certified, pivots: sol.pivots, touches_boundary })
}

/// `F(P)` relative to the complex.
pub fn flat_norm(complex: &CubicalComplex, p: &GridChain) -> Result<FlatNormResult, FlatNormError> {
    let prob = flat_norm_problem(complex, p)?;
    solve_problem(complex, &prob, p.group)
}

/// `F^∧(P)` relative to the complex, for `P` of type `ty`.
pub fn tensor_flat_norm(complex: &CubicalComplex, p: &GridChain, ty: TypeIndex) -> Result<FlatNormResult, FlatNormError> {
    let prob = tensor_flat_norm_problem(complex, p, ty)?;
    solve_problem(complex, &prob, p.group)
}

#[derive(Debug, Clone, Serialize)]
pub struct PadCheck {
    pub value: String,
    pub padded_value: String,
    pub pad: usize,
    pub changed: bool,
}

/// Re-solves on the complex padded by the support diameter (in cells) and
/// reports whether the value moved.
pub fn pad_check(complex: &CubicalComplex, p: &GridChain, tensor: Option<TypeIndex>) -> Result<(Q, PadCheck), FlatNormError> {
    let mut lo: Option<Vec<i64>> = None;
    let mut hi: Option<Vec<i64>> = None;
    for (j, _) in p.support() {
        let c = &complex.cells(p.dim)[j];
        let top: Vec<i64> = (0..complex.ambient()).map(|a| c.base[a] + i64::from(c.dirs.contains(&a))).collect();
        lo = Some(match lo {
            None => c.base.clone(),
            Some(l) => l.iter().zip(&c.base).map(|(a, b)| *a.min(b)).collect(),
        });
        hi = Some(match hi {
            None => top,
            Some(h) => h.iter().zip(&top).map(|(a, b)| *a.max(b)).collect(),
        });
    }
    let pad = match (lo, hi) {
        (Some(l), Some(h)) => l.iter().zip(&h).map(|(a, b)| (b - a) as usize).max().unwrap_or(0).max(1),
        _ => 1,
    };
    let solve = |cx: &CubicalComplex, g: &GridChain| match tensor {
        Some(ty) => tensor_flat_norm(cx, g, ty),
        None => flat_norm(cx, g),
    };
    let base = solve(complex, p)?.value;
    let big = complex.padded(pad);
    let moved = p.transfer(complex, &big)?;
    let padded = solve(&big, &moved)?.value;
    let changed = padded != base;
    Ok((
        base.clone(),
        PadCheck { value: format_rational(&base), padded_value: format_rational(&padded), pad, changed },
    ))
}

/// Exhaustive oracle: the minimum of `Σ w|x|` over all basic solutions
/// (square invertible column subsets).
pub fn vertex_enumeration_optimum(prob: &L1Problem) -> Option<Q> {
    let ncols = prob.columns.len();
    let dense: Vec<Vec<Q>> = (0..ncols).map(|j| prob.dense_column(j)).collect();
    let full: Matrix = (0..prob.rows).map(|i| (0..ncols).map(|j| dense[j][i].clone()).collect()).collect();
    let r = if prob.rows == 0 { 0 } else { rank(&full) };
    if r == 0 {
        return Some(Q::zero());
    }
    let mut best: Option<Q> = None;
    for subset in subsets(ncols, r) {
        let a: Matrix = (0..prob.rows).map(|i| subset.iter().map(|&j| dense[j][i].clone()).collect()).collect();
        let Some(x) = solve_unique(&a, &prob.b) else { continue };
        let cost = subset.iter().zip(&x).fold(Q::zero(), |acc, (&j, v)| acc + &prob.columns[j].0 * v.abs());
        if best.as_ref().map_or(true, |b| cost < *b) {
            best = Some(cost);
        }
    }
    best
}

/// Exhaustive integer oracle: non-identity columns range over
/// `{−bound, …, bound}` and the identity part is determined.
pub fn integer_optimum(prob: &L1Problem, bound: i64) -> Q {
    let free: Vec<usize> = (prob.rows..prob.columns.len()).collect();
    let mut best: Option<Q> = None;
    let mut x = vec![-bound; free.len()];
    loop {
        let mut residual = prob.b.clone();
        let mut cost = Q::zero();
        for (t, &j) in free.iter().enumerate() {
            if x[t] == 0 {
                continue;
            }
            let v = Q::from_integer(x[t].into());
            for (i, a) in &prob.columns[j].1 {
                residual[*i] -= a * &v;
            }
            cost += &prob.columns[j].0 * v.abs();
        }
        for (i, r) in residual.iter().enumerate() {
            cost += &prob.columns[i].0 * r.abs();
        }
        if best.as_ref().map_or(true, |b| cost < *b) {
            best = Some(cost);
        }
        // odometer
        let mut t = 0;
        loop {
            if t == x.len() {
                return best.unwrap_or_else(Q::zero);
            }
            if x[t] < bound {
                x[t] += 1;
                break;
            }
            x[t] = -bound;
            t += 1;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossMassBounds {
    /// `|D_k|` by enumeration.
    pub m: usize,
    /// `|D_k|` from the closed form.
    pub m_formula: usize,
    pub lower: String,
    pub upper: String,
    pub constant: String,
}

/// `1 + min(k, n₁, n₂)` if `k ≤ max(n₁, n₂)`, else `1 + n − k`.
pub fn d_k_size_formula(k: usize, n1: usize, n2: usize) -> usize {
    if k > n1 + n2 {
        0
    } else if k <= n1.max(n2) {
        1 + k.min(n1).min(n2)
    } else {
        1 + n1 + n2 - k
    }
}

/// `M(c) ≤ M^×(c) ≤ √m·M(c)` with `m = |D_k|`.
pub fn cross_mass_bounds(c: &Chain, n1: usize) -> CrossMassBounds {
    let n2 = c.ambient().saturating_sub(n1);
    let k = c.dim();
    let m = TypeIndex::all(k, n1, n2).len();
    let mass = c.mass(false).value;
    let upper = mass.mul(&CertifiedReal::scaled_sqrt(&Q::one(), &Q::from_integer(m.into())));
    CrossMassBounds {
        m,
        m_formula: d_k_size_formula(k, n1, n2),
        lower: mass.to_string(),
        upper: upper.to_string(),
        constant: format!("sqrt({})", m),
    }
}

/// The four-corner 0-chain `−⟦a⟧ + ⟦b⟧ − ⟦c⟧ + ⟦d⟧` of the square
/// `[0, ℓ]²` with `a = (0,0)`, `b = (ℓ,0)`, `c = (ℓ,ℓ)`, `d = (0,ℓ)`.
pub fn four_corner_chain(l: &Q) -> Chain {
    let z = Q::zero();
    let pts = [
        (vec![z.clone(), z.clone()], -1),
        (vec![l.clone(), z.clone()], 1),
        (vec![l.clone(), l.clone()], -1),
        (vec![z.clone(), l.clone()], 1),
    ];
    Chain::from_terms(
        2,
        0,
        CoefficientGroup::Integers,
        pts.into_iter().map(|(p, g)| (SimplexCell::point(RationalPoint(p)), Q::from_integer(g.into()))),
    )
    .expect("points")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q2};

    fn mul(a: &SparseMatrix, b: &SparseMatrix, rows: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; b.len()]; rows];
        for (j, col) in b.iter().enumerate() {
            for &(m, v) in col {
                for &(i, w) in &a[m] {
                    out[i][j] += v * w;
                }
            }
        }
        out
    }

    fn dense(a: &SparseMatrix, rows: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; a.len()]; rows];
        for (j, col) in a.iter().enumerate() {
            for &(i, v) in col {
                out[i][j] += v;
            }
        }
        out
    }

    #[test]
    fn boundary_matrices_are_a_double_complex() {
        for (extents, n1) in [(vec![2, 2], 1), (vec![2, 1, 2], 2), (vec![1, 2, 1, 1], 2)] {
            let n = extents.len();
            let cx = CubicalComplex::new(vec![q(0); n], q(1), extents, n1).unwrap();
            for k in 2..=n {
                let rows = cx.cells(k - 2).len();
                for (p, r) in [(0u8, 0u8), (1, 1), (2, 2)] {
                    let z = mul(&cx.boundary_matrix(k - 1, p), &cx.boundary_matrix(k, r), rows);
                    assert!(z.iter().flatten().all(|&v| v == 0));
                }
                let a = mul(&cx.boundary_matrix(k - 1, 1), &cx.boundary_matrix(k, 2), rows);
                let b = mul(&cx.boundary_matrix(k - 1, 2), &cx.boundary_matrix(k, 1), rows);
                assert!(a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| x + y == 0));
            }
            for k in 1..=n {
                let rows = cx.cells(k - 1).len();
                let full = dense(&cx.boundary_matrix(k, 0), rows);
                let p1 = dense(&cx.boundary_matrix(k, 1), rows);
                let p2 = dense(&cx.boundary_matrix(k, 2), rows);
                for i in 0..rows {
                    for j in 0..full[i].len() {
                        assert_eq!(full[i][j], p1[i][j] + p2[i][j]);
                    }
                }
            }
        }
    }

    fn padded_unit(l: &Q) -> CubicalComplex {
        let h = l.clone();
        CubicalComplex::new(vec![-h.clone(), -h.clone()], h, vec![3, 3], 1).unwrap()
    }

    #[test]
    fn four_corner_values() {
        let cx = padded_unit(&q(1));
        let g = rasterize(&four_corner_chain(&q(1)), &cx).unwrap();
        assert_eq!(g.nonzero_count(), 4);
        let f = flat_norm(&cx, &g).unwrap();
        assert_eq!(f.value, q(2));
        assert!(f.certified);
        let t = tensor_flat_norm(&cx, &g, TypeIndex::new(0, 0)).unwrap();
        assert_eq!(t.value, q(1));
        let q11 = &t.pieces[3].1;
        assert_eq!(q11.nonzero_count(), 1);
        let half = q2(1, 2);
        let cx = padded_unit(&half);
        let g = rasterize(&four_corner_chain(&half), &cx).unwrap();
        assert_eq!(tensor_flat_norm(&cx, &g, TypeIndex::new(0, 0)).unwrap().value, q2(1, 4));
        assert_eq!(flat_norm(&cx, &g).unwrap().value, q(1));
    }

    #[test]
    fn trivial_values() {
        let cx = padded_unit(&q(1));
        let zero = GridChain::zero(&cx, 0, CoefficientGroup::Integers);
        assert_eq!(flat_norm(&cx, &zero).unwrap().value, q(0));
        assert_eq!(tensor_flat_norm(&cx, &zero, TypeIndex::new(0, 0)).unwrap().value, q(0));
        let mut one = zero.clone();
        let j = cx.index_of(&CubeCell { base: vec![1, 1], dirs: vec![] }).unwrap();
        one.coeffs[j] = q(1);
        assert_eq!(flat_norm(&cx, &one).unwrap().value, q(1));
    }

    #[test]
    fn rasterize_examples() {
        let cx = CubicalComplex::new(vec![q(0), q(0)], q2(1, 2), vec![2, 2], 1).unwrap();
        let square = Chain::from_terms(
            2,
            2,
            CoefficientGroup::Integers,
            [
                (SimplexCell::from_ints(&[&[0, 0], &[1, 0], &[1, 1]]).unwrap(), q(1)),
                (SimplexCell::from_ints(&[&[0, 0], &[1, 1], &[0, 1]]).unwrap(), q(1)),
            ],
        )
        .unwrap();
        let g = rasterize(&square, &cx).unwrap();
        assert_eq!(g.nonzero_count(), 4);
        assert!(g.coeffs.iter().all(|v| v.is_zero() || *v == q(1)));
        assert_eq!(rasterize(&g.to_chain(&cx).unwrap(), &cx).unwrap(), g);
        let diag = Chain::cell(SimplexCell::from_ints(&[&[0, 0], &[1, 1]]).unwrap(), CoefficientGroup::Integers, q(1)).unwrap();
        assert!(matches!(rasterize(&diag, &cx), Err(FlatNormError::NotGridAligned { .. })));
        // a half-covered cell is rejected
        let tri = Chain::cell(SimplexCell::from_ints(&[&[0, 0], &[1, 0], &[1, 1]]).unwrap(), CoefficientGroup::Integers, q(1)).unwrap();
        assert!(rasterize(&tri, &cx).is_err());
        // boundary commutes with rasterization
        let gb = g.boundary(&cx, 0).unwrap();
        assert_eq!(rasterize(&square.boundary().unwrap(), &cx).unwrap(), gb);
    }

    #[test]
    fn flat_norm_bounds() {
        let cx = CubicalComplex::new(vec![q(0), q(0)], q(1), vec![3, 3], 1).unwrap();
        let mut r = GridChain::zero(&cx, 2, CoefficientGroup::Integers);
        r.coeffs[4] = q(1);
        r.coeffs[5] = q(-2);
        let p = r.boundary(&cx, 0).unwrap();
        let f = flat_norm(&cx, &p).unwrap().value;
        assert!(f <= r.mass(&cx));
        assert!(f <= p.mass(&cx));
        let (_, pc) = pad_check(&cx, &p, None).unwrap();
        assert!(crate::exact::parse_rational(&pc.padded_value).unwrap() <= f);
    }

    #[test]
    fn oracles_agree_on_small_complexes() {
        for e in 1..=5usize {
            let cx = CubicalComplex::new(vec![q(0)], q(1), vec![e], 1).unwrap();
            let mut p = GridChain::zero(&cx, 0, CoefficientGroup::Integers);
            p.coeffs[0] = q(1);
            p.coeffs[e] = q(-2);
            let prob = flat_norm_problem(&cx, &p).unwrap();
            let lp = flat_norm(&cx, &p).unwrap().value;
            assert_eq!(Some(lp.clone()), vertex_enumeration_optimum(&prob));
            assert_eq!(integer_optimum(&prob, 2), lp);
        }
        let cx = CubicalComplex::new(vec![q(0), q(0)], q(1), vec![1, 1], 1).unwrap();
        let g = rasterize(&four_corner_chain(&q(1)), &cx).unwrap();
        let prob = tensor_flat_norm_problem(&cx, &g, TypeIndex::new(0, 0)).unwrap();
        assert_eq!(vertex_enumeration_optimum(&prob), Some(q(1)));
        assert_eq!(integer_optimum(&prob, 2), q(1));
    }

    #[test]
    fn cross_mass_constants() {
        assert_eq!(d_k_size_formula(1, 1, 1), 2);
        assert_eq!(d_k_size_formula(0, 3, 2), 1);
        assert_eq!(d_k_size_formula(3, 2, 2), 2);
        for n1 in 0..5 {
            for n2 in 0..5 {
                for k in 0..=n1 + n2 {
                    assert_eq!(TypeIndex::all(k, n1, n2).len(), d_k_size_formula(k, n1, n2), "k={k} n1={n1} n2={n2}");
                }
            }
        }
        let c = Chain::cell(SimplexCell::from_ints(&[&[0, 0], &[1, 0]]).unwrap(), CoefficientGroup::Integers, q(1)).unwrap();
        let b = cross_mass_bounds(&c, 1);
        assert_eq!((b.m, b.m_formula), (2, 2));
    }
}
