//! Coordinate slices `Sl_γ^x`, a.e.-vanishing decisions and the
//! type tests built on them.
//!
//! A slice piece `q` of a cell `p` is oriented so that `⟨ξ_q ∧ e_γ, ξ_p⟩ > 0`.
//! With this rule `∂Sl = Sl∂` holds without sign, and the two factor slices
//! of a product cell multiply to the slice of the product.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chains::{certify_non_overlapping, graph_over, Chain, ChainError};
use crate::coeff::CoefficientGroup;
use crate::exact::{q2, CertifiedReal, Q};
use crate::geometry::{orientation_sign, subsets, unit_vector, GeometryError, RationalPoint, SimplexCell};
use crate::linalg::{det, gram, inverse, solve, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlicingError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Geometry(GeometryError),
    #[error("base point {point} is not generic for this chain")]
    NonGenericPoint { point: String },
    #[error("invalid coordinate set {gamma:?} for ambient dimension {ambient}")]
    InvalidGamma { gamma: Vec<usize>, ambient: usize },
    #[error("|γ| = {gamma} exceeds the chain dimension {dim}")]
    GammaTooLarge { gamma: usize, dim: usize },
    #[error("base point has {found} coordinates, γ has {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("a.e.-vanishing is decided for |γ| = k only (|γ| = {gamma}, k = {dim})")]
    NotTopDimensional { gamma: usize, dim: usize },
    #[error("type ({k1}, {k2}) is not admissible for k = {k}, n1 = {n1}, n2 = {n2}")]
    InvalidType { k1: usize, k2: usize, k: usize, n1: usize, n2: usize },
}

impl From<GeometryError> for SlicingError {
    fn from(e: GeometryError) -> Self {
        SlicingError::Geometry(e)
    }
}

/// Coordinates `gamma` (0-based, ascending) fixed to `point`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceSpec {
    pub gamma: Vec<usize>,
    pub point: RationalPoint,
}

/// A type `(k₁, k₂)` relative to the split `n = n₁ + n₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TypeIndex {
    pub k1: usize,
    pub k2: usize,
}

impl TypeIndex {
    pub fn new(k1: usize, k2: usize) -> Self {
        TypeIndex { k1, k2 }
    }

    /// The type of a coordinate set: `(|γ ∩ [0,n₁)|, |γ ∩ [n₁,n)|)`.
    pub fn of_gamma(gamma: &[usize], n1: usize) -> Self {
        let k1 = gamma.iter().filter(|&&i| i < n1).count();
        TypeIndex { k1, k2: gamma.len() - k1 }
    }

    /// All admissible types of total dimension `k`.
    pub fn all(k: usize, n1: usize, n2: usize) -> Vec<TypeIndex> {
        (0..=k.min(n1)).filter(|&k1| k - k1 <= n2).map(|k1| TypeIndex { k1, k2: k - k1 }).collect()
    }

    /// Coordinate sets with `|γ| = k` of this type.
    pub fn gammas(&self, n1: usize, n2: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for a in subsets(n1, self.k1) {
            for b in subsets(n2, self.k2) {
                let mut g = a.clone();
                g.extend(b.iter().map(|&i| i + n1));
                out.push(g);
            }
        }
        out
    }

    fn check(&self, k: usize, n1: usize, n2: usize) -> Result<(), SlicingError> {
        if self.k1 + self.k2 != k || self.k1 > n1 || self.k2 > n2 {
            return Err(SlicingError::InvalidType { k1: self.k1, k2: self.k2, k, n1, n2 });
        }
        Ok(())
    }
}

fn check_gamma(gamma: &[usize], ambient: usize) -> Result<(), SlicingError> {
    if gamma.windows(2).any(|w| w[0] >= w[1]) || gamma.iter().any(|&g| g >= ambient) {
        return Err(SlicingError::InvalidGamma { gamma: gamma.to_vec(), ambient });
    }
    Ok(())
}

fn complement(gamma: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !gamma.contains(i)).collect()
}

/// Slice pieces of one cell, still in ℝⁿ, with their orientation signs.
fn section_cell(cell: &SimplexCell, gamma: &[usize], point: &RationalPoint) -> Result<Vec<(SimplexCell, i8)>, GeometryError> {
    let mut pieces = vec![cell.clone()];
    for (&axis, level) in gamma.iter().zip(&point.0) {
        let mut next = Vec::new();
        for p in &pieces {
            next.extend(p.slice_by_hyperplane(axis, level)?.into_iter().map(|(c, _)| c));
        }
        pieces = next;
        if pieces.is_empty() {
            break;
        }
    }
    let own = cell.edges();
    let frame_tail: Vec<Vec<Q>> = gamma.iter().map(|&a| unit_vector(cell.ambient(), a)).collect();
    Ok(pieces
        .into_iter()
        .map(|q| {
            let mut frame = q.edges();
            frame.extend(frame_tail.iter().cloned());
            let s = orientation_sign(&frame, &own);
            debug_assert!(s != 0);
            (q, s)
        })
        .collect())
}

/// `P ∩ X_{β∖γ}(x)` as a chain in ℝⁿ (not projected).
pub fn section(c: &Chain, spec: &SliceSpec) -> Result<Chain, SlicingError> {
    check_spec(c, spec)?;
    let r = spec.gamma.len();
    let mut out = Chain::new(c.ambient(), c.dim() - r, c.group());
    for (cell, g) in c.terms() {
        let pieces = section_cell(cell, &spec.gamma, &spec.point).map_err(|e| non_generic(e, &spec.point))?;
        for (piece, s) in pieces {
            let coeff = if s < 0 { c.group().neg(g) } else { g.clone() };
            out.add_cell(piece, &coeff)?;
        }
    }
    Ok(out)
}

fn non_generic(e: GeometryError, point: &RationalPoint) -> SlicingError {
    match e {
        GeometryError::NonGenericLevel { .. } => SlicingError::NonGenericPoint { point: point.to_string() },
        other => SlicingError::Geometry(other),
    }
}

fn check_spec(c: &Chain, spec: &SliceSpec) -> Result<(), SlicingError> {
    check_gamma(&spec.gamma, c.ambient())?;
    if spec.gamma.len() > c.dim() {
        return Err(SlicingError::GammaTooLarge { gamma: spec.gamma.len(), dim: c.dim() });
    }
    if spec.point.dim() != spec.gamma.len() {
        return Err(SlicingError::PointDimension { expected: spec.gamma.len(), found: spec.point.dim() });
    }
    Ok(())
}

/// `Sl_γ^x P`, a `(k−|γ|)`-chain in `ℝ^{n−|γ|}` on the coordinates `β∖γ`.
pub fn slice(c: &Chain, spec: &SliceSpec) -> Result<Chain, SlicingError> {
    let sec = section(c, spec)?;
    let rest = complement(&spec.gamma, c.ambient());
    Ok(sec.push_forward_projection(&rest)?)
}

/// `∫ M(Sl_γ^x p) dx` summed over cells with `|g|` weights: by the co-area
/// formula each cell contributes `√(det(E_γᵀ G⁻¹ E_γ)·det G)/k!` where `E`
/// is its edge matrix and `G = EEᵀ`.
pub fn coarea_bound(c: &Chain, gamma: &[usize]) -> Result<CertifiedReal, SlicingError> {
    check_gamma(gamma, c.ambient())?;
    if gamma.len() > c.dim() {
        return Err(SlicingError::GammaTooLarge { gamma: gamma.len(), dim: c.dim() });
    }
    let k = c.dim();
    let kf = Q::from_integer(crate::exact::factorial(k));
    let mut total = CertifiedReal::zero();
    for (cell, g) in c.terms() {
        let norm = c.group().norm(g);
        let e = cell.edges();
        let sq = if k == 0 {
            Q::one()
        } else {
            let gm = gram(&e, &e);
            let eg: Matrix = e.iter().map(|row| gamma.iter().map(|&i| row[i].clone()).collect()).collect();
            let ginv = inverse(&gm).expect("nondegenerate cell");
            // E_γᵀ G⁻¹ E_γ  (r × r)
            let r = gamma.len();
            let inner: Matrix = (0..r)
                .map(|a| {
                    (0..r)
                        .map(|b| {
                            let mut s = Q::zero();
                            for i in 0..k {
                                for j in 0..k {
                                    s += &eg[i][a] * &ginv[i][j] * &eg[j][b];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect();
            let d = if r == 0 { Q::one() } else { det(&inner) };
            d * det(&gm) / (&kf * &kf)
        };
        total = total.add(&CertifiedReal::scaled_sqrt(&norm, &sq));
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub enum VanishVerdict {
    Vanishes,
    /// A generic point where the slice was computed and found nonzero.
    NonzeroAt { witness: RationalPoint, slice: Chain },
    /// No nonzero slice among `samples` random generic points.
    Unknown { samples: usize },
}

impl VanishVerdict {
    pub fn is_vanishes(&self) -> bool {
        matches!(self, VanishVerdict::Vanishes)
    }
}

/// One projected cell with its signed coefficient.
struct Piece {
    verts: Vec<Vec<Q>>,
    weight: Q,
}

fn inside_open(verts: &[Vec<Q>], x: &[Q]) -> bool {
    // barycentric coordinates all positive
    let k = x.len();
    let v0 = &verts[0];
    let a: Matrix = (0..k).map(|row| (1..=k).map(|j| &verts[j][row] - &v0[row]).collect()).collect();
    let b: Vec<Q> = (0..k).map(|row| &x[row] - &v0[row]).collect();
    match solve(&a, &b) {
        Some(l) => {
            let s: Q = l.iter().cloned().fold(Q::zero(), |acc, v| acc + v);
            l.iter().all(|v| *v > Q::zero()) && s < Q::one()
        }
        None => false,
    }
}

fn weight_at(group: CoefficientGroup, pieces: &[Piece], x: &[Q]) -> Q {
    pieces
        .iter()
        .filter(|p| inside_open(&p.verts, x))
        .fold(Q::zero(), |acc, p| group.add(&acc, &p.weight))
}

/// A region of the arrangement, as a generator of interior points.
enum Region {
    Interval(Q, Q),
    /// slab `a < x < b` between two non-crossing segments given as lines
    /// `y = m x + c`.
    Trapezoid { a: Q, b: Q, lower: (Q, Q), upper: (Q, Q) },
}

const FRACTIONS: [(i64, i64); 6] = [(1, 2), (1, 3), (2, 3), (2, 7), (5, 11), (7, 13)];

impl Region {
    fn sample(&self, i: usize, j: usize) -> Vec<Q> {
        let (ti, si) = (q2(FRACTIONS[i].0, FRACTIONS[i].1), q2(FRACTIONS[j].0, FRACTIONS[j].1));
        match self {
            Region::Interval(a, b) => vec![a + (b - a) * ti],
            Region::Trapezoid { a, b, lower, upper } => {
                let x = a + (b - a) * ti;
                let y0 = &lower.0 * &x + &lower.1;
                let y1 = &upper.0 * &x + &upper.1;
                let y = &y0 + (y1 - &y0) * si;
                vec![x, y]
            }
        }
    }
}

fn regions_1d(pieces: &[Piece]) -> Vec<Region> {
    let mut cuts: Vec<Q> = pieces.iter().flat_map(|p| p.verts.iter().map(|v| v[0].clone())).collect();
    cuts.sort();
    cuts.dedup();
    cuts.windows(2).map(|w| Region::Interval(w[0].clone(), w[1].clone())).collect()
}

fn regions_2d(pieces: &[Piece]) -> Vec<Region> {
    let mut edges: Vec<(Vec<Q>, Vec<Q>)> = Vec::new();
    for p in pieces {
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let (a, b) = (p.verts[i].clone(), p.verts[j].clone());
            let e = if a <= b { (a, b) } else { (b, a) };
            edges.push(e);
        }
    }
    edges.sort();
    edges.dedup();
    let mut xs: Vec<Q> = edges.iter().flat_map(|(a, b)| [a[0].clone(), b[0].clone()]).collect();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if let Some(x) = crossing_x(&edges[i], &edges[j]) {
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();
    let mut out = Vec::new();
    for w in xs.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let mid = (a + b) / Q::from_integer(2.into());
        let mut lines: Vec<(Q, (Q, Q))> = edges
            .iter()
            .filter(|(p, r)| p[0] <= *a && r[0] >= *b)
            .map(|(p, r)| {
                let m = (&r[1] - &p[1]) / (&r[0] - &p[0]);
                let c = &p[1] - &m * &p[0];
                (&m * &mid + &c, (m, c))
            })
            .collect();
        lines.sort_by(|x, y| x.0.cmp(&y.0));
        lines.dedup_by(|x, y| x.0 == y.0);
        for pair in lines.windows(2) {
            out.push(Region::Trapezoid { a: a.clone(), b: b.clone(), lower: pair[0].1.clone(), upper: pair[1].1.clone() });
        }
    }
    out
}

/// x-coordinate of a proper crossing of two segments, if any.
fn crossing_x(e: &(Vec<Q>, Vec<Q>), f: &(Vec<Q>, Vec<Q>)) -> Option<Q> {
    let d1: Vec<Q> = vec![&e.1[0] - &e.0[0], &e.1[1] - &e.0[1]];
    let d2: Vec<Q> = vec![&f.1[0] - &f.0[0], &f.1[1] - &f.0[1]];
    let den = &d1[0] * &d2[1] - &d1[1] * &d2[0];
    if den.is_zero() {
        return None;
    }
    let w = [&f.0[0] - &e.0[0], &f.0[1] - &e.0[1]];
    let t = (&w[0] * &d2[1] - &w[1] * &d2[0]) / &den;
    let u = (&w[0] * &d1[1] - &w[1] * &d1[0]) / &den;
    let zero = Q::zero();
    let one = Q::one();
    if t > zero && t < one && u > zero && u < one {
        Some(&e.0[0] + t * &d1[0])
    } else {
        None
    }
}

const RANDOM_SAMPLES: usize = 2000;

/// Decides whether `Sl_γ^x c = 0` for a.e. `x` (`|γ| = k`). Exact for
/// `|γ| ≤ 2`; for larger `γ` a nonzero slice is searched by seeded sampling
/// and `Unknown` is returned when none is found.
pub fn slices_vanish_ae(c: &Chain, gamma: &[usize]) -> Result<VanishVerdict, SlicingError> {
    check_gamma(gamma, c.ambient())?;
    let k = c.dim();
    if gamma.len() != k {
        return Err(SlicingError::NotTopDimensional { gamma: gamma.len(), dim: k });
    }
    if k == 0 {
        return Ok(if c.is_zero() {
            VanishVerdict::Vanishes
        } else {
            VanishVerdict::NonzeroAt { witness: RationalPoint(Vec::new()), slice: c.clone() }
        });
    }
    let group = c.group();
    // cells whose γ-graphs coincide produce the same slice point
    let mut by_graph: BTreeMap<Vec<Q>, Vec<Piece>> = BTreeMap::new();
    for (cell, g) in c.terms() {
        let minor = cell.minor(gamma);
        if minor.is_zero() {
            continue;
        }
        let (_, m, b) = graph_over(cell, gamma).expect("nonzero minor");
        let mut key: Vec<Q> = m.into_iter().flatten().collect();
        key.extend(b);
        let weight = if minor > Q::zero() { g.clone() } else { group.neg(g) };
        let verts = cell.vertices().iter().map(|v| v.select(gamma).0).collect();
        by_graph.entry(key).or_default().push(Piece { verts, weight });
    }
    let mut unknown_samples = None;
    for pieces in by_graph.values() {
        let verdict = match k {
            1 | 2 => {
                let regions = if k == 1 { regions_1d(pieces) } else { regions_2d(pieces) };
                let mut found = None;
                for r in &regions {
                    let x = r.sample(0, 0);
                    if !weight_at(group, pieces, &x).is_zero() {
                        found = witness_in(c, gamma, r)?;
                        if found.is_some() {
                            break;
                        }
                        // nonzero region without a verified generic point
                        unknown_samples.get_or_insert(0);
                    }
                }
                found
            }
            _ => {
                let hit = sample_group(c, gamma, pieces)?;
                if hit.is_none() {
                    unknown_samples = Some(unknown_samples.unwrap_or(0) + RANDOM_SAMPLES);
                }
                hit
            }
        };
        if let Some(v) = verdict {
            return Ok(v);
        }
    }
    Ok(match unknown_samples {
        Some(samples) => VanishVerdict::Unknown { samples },
        None => VanishVerdict::Vanishes,
    })
}

/// Finds a point inside `region` where the full slice is computable and
/// nonzero.
fn witness_in(c: &Chain, gamma: &[usize], region: &Region) -> Result<Option<VanishVerdict>, SlicingError> {
    let spans = if gamma.len() == 1 { 1 } else { FRACTIONS.len() };
    for i in 0..FRACTIONS.len() {
        for j in 0..spans {
            let point = RationalPoint(region.sample(i, j));
            match slice(c, &SliceSpec { gamma: gamma.to_vec(), point: point.clone() }) {
                Ok(s) if !s.is_zero() => return Ok(Some(VanishVerdict::NonzeroAt { witness: point, slice: s })),
                Ok(_) | Err(SlicingError::NonGenericPoint { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

fn sample_group(c: &Chain, gamma: &[usize], pieces: &[Piece]) -> Result<Option<VanishVerdict>, SlicingError> {
    let k = gamma.len();
    let mut lo = pieces[0].verts[0].clone();
    let mut hi = lo.clone();
    for p in pieces {
        for v in &p.verts {
            for i in 0..k {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let denom = 1_000_003i64;
    for _ in 0..RANDOM_SAMPLES {
        let x: Vec<Q> = (0..k).map(|i| &lo[i] + (&hi[i] - &lo[i]) * q2(rng.gen_range(1..denom), denom)).collect();
        if weight_at(c.group(), pieces, &x).is_zero() {
            continue;
        }
        let point = RationalPoint(x);
        match slice(c, &SliceSpec { gamma: gamma.to_vec(), point: point.clone() }) {
            Ok(s) if !s.is_zero() => return Ok(Some(VanishVerdict::NonzeroAt { witness: point, slice: s })),
            Ok(_) | Err(SlicingError::NonGenericPoint { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitVerdict {
    Split,
    NotSplit { cell: SimplexCell, gamma: Vec<usize> },
    NeedsCertifiedRep { overlap: (SimplexCell, SimplexCell) },
}

/// Whether every cell's tangent plane is a product of a `k₁`-plane in the
/// first `n₁` coordinates and a `k₂`-plane in the rest (off-type Plücker
/// components vanish). Requires a representation without overlaps.
pub fn splitting_test(c: &Chain, n1: usize, ty: TypeIndex) -> Result<SplitVerdict, SlicingError> {
    let n2 = c.ambient().checked_sub(n1).ok_or(SlicingError::InvalidType { k1: ty.k1, k2: ty.k2, k: c.dim(), n1, n2: 0 })?;
    ty.check(c.dim(), n1, n2)?;
    if let Some(overlap) = certify_non_overlapping(c.terms().map(|(cell, _)| cell)) {
        return Ok(SplitVerdict::NeedsCertifiedRep { overlap });
    }
    for (cell, _) in c.terms() {
        for (gamma, minor) in cell.pluecker().components {
            if !minor.is_zero() && TypeIndex::of_gamma(&gamma, n1) != ty {
                return Ok(SplitVerdict::NotSplit { cell: cell.clone(), gamma });
            }
        }
    }
    Ok(SplitVerdict::Split)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JVerdict {
    pub verdict: VanishVerdict,
    /// The coordinate set that decided a non-vanishing verdict.
    pub gamma: Option<Vec<usize>>,
    pub per_gamma: Vec<(Vec<usize>, bool)>,
}

/// `j_{k₁,k₂} c = 0` decided through the slices `Sl_γ` with `γ` of the given
/// type.
pub fn j_vanishing_test(c: &Chain, n1: usize, ty: TypeIndex) -> Result<JVerdict, SlicingError> {
    let n2 = c.ambient().checked_sub(n1).ok_or(SlicingError::InvalidType { k1: ty.k1, k2: ty.k2, k: c.dim(), n1, n2: 0 })?;
    ty.check(c.dim(), n1, n2)?;
    let mut per_gamma = Vec::new();
    let mut unknown = None;
    for gamma in ty.gammas(n1, n2) {
        let v = slices_vanish_ae(c, &gamma)?;
        per_gamma.push((gamma.clone(), v.is_vanishes()));
        match v {
            VanishVerdict::Vanishes => {}
            VanishVerdict::NonzeroAt { .. } => return Ok(JVerdict { verdict: v, gamma: Some(gamma), per_gamma }),
            VanishVerdict::Unknown { samples } => {
                unknown.get_or_insert((gamma, 0)).1 += samples;
            }
        }
    }
    Ok(match unknown {
        Some((gamma, samples)) => JVerdict { verdict: VanishVerdict::Unknown { samples }, gamma: Some(gamma), per_gamma },
        None => JVerdict { verdict: VanishVerdict::Vanishes, gamma: None, per_gamma },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::BoxRegion;
    use crate::exact::q;
    use crate::geometry::Side;
    use proptest::prelude::*;

    const Z: CoefficientGroup = CoefficientGroup::Integers;

    fn seg(a: &[i64], b: &[i64]) -> SimplexCell {
        SimplexCell::from_ints(&[a, b]).unwrap()
    }

    fn spec(gamma: &[usize], point: Vec<Q>) -> SliceSpec {
        SliceSpec { gamma: gamma.to_vec(), point: RationalPoint(point) }
    }

    #[test]
    fn slice_examples() {
        let horiz = Chain::cell(seg(&[0, 0], &[1, 0]), Z, q(1)).unwrap();
        assert!(slice(&horiz, &spec(&[1], vec![q2(1, 3)])).unwrap().is_zero());
        let diag = Chain::cell(seg(&[0, 0], &[1, 1]), Z, q(1)).unwrap();
        let s = slice(&diag, &spec(&[0], vec![q2(1, 2)])).unwrap();
        let expected = Chain::cell(SimplexCell::point(RationalPoint(vec![q2(1, 2)])), Z, q(1)).unwrap();
        assert_eq!(s, expected);
        assert!(matches!(slice(&diag, &spec(&[0], vec![q(1)])), Err(SlicingError::NonGenericPoint { .. })));
    }

    #[test]
    fn triangle_section_orientation() {
        let t = Chain::cell(SimplexCell::from_ints(&[&[0, 0], &[2, 0], &[0, 2]]).unwrap(), Z, q(1)).unwrap();
        let s = section(&t, &spec(&[0], vec![q(1)])).unwrap();
        let expected = Chain::cell(seg(&[1, 0], &[1, 1]), Z, q(-1)).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn coarea_examples() {
        let diag = Chain::cell(seg(&[0, 0], &[1, 1]), Z, q(1)).unwrap();
        assert_eq!(coarea_bound(&diag, &[0]).unwrap().as_rational(), Some(q(1)));
        let horiz = Chain::cell(seg(&[0, 0], &[1, 0]), Z, q(1)).unwrap();
        assert_eq!(coarea_bound(&horiz, &[1]).unwrap().as_rational(), Some(q(0)));
        // γ = ∅ gives the mass
        let tri = Chain::cell(SimplexCell::from_ints(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 1]]).unwrap(), Z, q(2)).unwrap();
        assert_eq!(coarea_bound(&tri, &[]).unwrap().exact, tri.mass(false).value.exact);
    }

    #[test]
    fn vanishing_examples() {
        let diag = Chain::cell(seg(&[0, 0], &[2, 2]), Z, q(1)).unwrap();
        match slices_vanish_ae(&diag, &[0]).unwrap() {
            VanishVerdict::NonzeroAt { witness, .. } => assert_eq!(witness.0, vec![q(1)]),
            v => panic!("{v:?}"),
        }
        let split = Chain::from_terms(2, 1, Z, [(seg(&[0, 0], &[1, 1]), q(-1)), (seg(&[1, 1], &[2, 2]), q(-1))]).unwrap();
        assert!(slices_vanish_ae(&diag.add(&split).unwrap(), &[0]).unwrap().is_vanishes());
        // two triangulations of a square cancel
        let a = Chain::from_terms(
            2,
            2,
            Z,
            [
                (SimplexCell::from_ints(&[&[0, 0], &[1, 0], &[1, 1]]).unwrap(), q(1)),
                (SimplexCell::from_ints(&[&[0, 0], &[1, 1], &[0, 1]]).unwrap(), q(1)),
                (SimplexCell::from_ints(&[&[0, 0], &[1, 0], &[0, 1]]).unwrap(), q(-1)),
                (SimplexCell::from_ints(&[&[1, 0], &[1, 1], &[0, 1]]).unwrap(), q(-1)),
            ],
        )
        .unwrap();
        assert!(slices_vanish_ae(&a, &[0, 1]).unwrap().is_vanishes());
        let b = a.add(&Chain::cell(SimplexCell::from_ints(&[&[3, 0], &[4, 0], &[3, 1]]).unwrap(), Z, q(1)).unwrap()).unwrap();
        assert!(matches!(slices_vanish_ae(&b, &[0, 1]).unwrap(), VanishVerdict::NonzeroAt { .. }));
        // ℤ/2: the same segment twice under two subdivisions
        let z2 = CoefficientGroup::IntegersMod(2);
        let c = Chain::from_terms(2, 1, z2, [(seg(&[0, 0], &[2, 2]), q(1)), (seg(&[0, 0], &[1, 1]), q(1)), (seg(&[1, 1], &[2, 2]), q(1))]).unwrap();
        assert!(slices_vanish_ae(&c, &[0]).unwrap().is_vanishes());
    }

    #[test]
    fn split_examples() {
        let diag = Chain::cell(seg(&[0, 0], &[1, 1]), Z, q(1)).unwrap();
        assert_eq!(
            splitting_test(&diag, 1, TypeIndex::new(1, 0)).unwrap(),
            SplitVerdict::NotSplit { cell: diag.terms().next().unwrap().0.clone(), gamma: vec![1] }
        );
        let a = Chain::cell(seg(&[0, 0], &[1, 0]), Z, q(1)).unwrap();
        let b = Chain::cell(seg(&[0, 0], &[0, 1]), Z, q(1)).unwrap();
        let prod = Chain::cartesian_product(&a, &b).unwrap();
        assert_eq!(splitting_test(&prod, 2, TypeIndex::new(1, 1)).unwrap(), SplitVerdict::Split);
        assert!(j_vanishing_test(&prod, 2, TypeIndex::new(2, 0)).unwrap().verdict.is_vanishes());
        assert!(!j_vanishing_test(&prod, 2, TypeIndex::new(1, 1)).unwrap().verdict.is_vanishes());
        let j = j_vanishing_test(&diag, 1, TypeIndex::new(1, 0)).unwrap();
        assert!(matches!(j.verdict, VanishVerdict::NonzeroAt { .. }));
        assert_eq!(j.gamma, Some(vec![0]));
    }

    #[test]
    fn types() {
        assert_eq!(TypeIndex::all(2, 2, 2).len(), 3);
        assert_eq!(TypeIndex::new(1, 1).gammas(2, 2), vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
        assert_eq!(TypeIndex::of_gamma(&[0, 3], 2), TypeIndex::new(1, 1));
    }

    fn simplex(n: usize, k: usize) -> impl Strategy<Value = SimplexCell> {
        prop::collection::vec(prop::collection::vec(-3i64..4, n), k + 1)
            .prop_filter_map("degenerate", |vs| SimplexCell::new(vs.iter().map(|v| RationalPoint::from_ints(v)).collect()).ok())
    }

    fn chain(n: usize, k: usize) -> impl Strategy<Value = Chain> {
        prop::collection::vec((simplex(n, k), -3i64..4), 1..4)
            .prop_map(move |v| Chain::from_terms(n, k, Z, v.into_iter().map(|(c, g)| (c, q(g)))).unwrap())
    }

    fn generic(num: i64) -> Q {
        q2(num, 7) + q2(1, 1009)
    }

    proptest! {
        #[test]
        fn boundary_commutes_with_slice(c in chain(3, 2), a in -20i64..20, b in -20i64..20) {
            let sp = spec(&[0], vec![generic(a)]);
            let lhs = slice(&c, &sp).unwrap().boundary().unwrap();
            let rhs = slice(&c.boundary().unwrap(), &sp).unwrap();
            prop_assert!(lhs.equals_mod_subdivision(&rhs).unwrap());
            let sp2 = spec(&[0, 2], vec![generic(a), generic(b)]);
            // Sl_{γ} = Sl_{min γ} ∘ Sl_{max γ}
            let inner = slice(&c, &spec(&[2], vec![generic(b)]));
            prop_assume!(inner.is_ok());
            let step = slice(&inner.unwrap(), &spec(&[0], vec![generic(a)]));
            let whole = slice(&c, &sp2);
            prop_assume!(step.is_ok() && whole.is_ok());
            prop_assert_eq!(whole.unwrap(), step.unwrap());
        }

        #[test]
        fn half_space_boundary_formula(c in chain(2, 2), num in -20i64..20) {
            let s = generic(num);
            let h = BoxRegion::half_space(2, 0, s.clone(), Side::Above);
            let lhs = c.restrict_box(&h).unwrap().boundary().unwrap()
                .sub(&c.boundary().unwrap().restrict_box(&h).unwrap()).unwrap();
            let sec = section(&c, &spec(&[0], vec![s])).unwrap();
            prop_assert!(lhs.equals_mod_subdivision(&sec).unwrap());
        }

        #[test]
        fn half_space_boundary_formula_on_curves(c in chain(2, 1), num in -20i64..20) {
            let s = generic(num);
            let h = BoxRegion::half_space(2, 0, s.clone(), Side::Above);
            let lhs = c.restrict_box(&h).unwrap().boundary().unwrap()
                .sub(&c.boundary().unwrap().restrict_box(&h).unwrap()).unwrap();
            let sec = section(&c, &spec(&[0], vec![s])).unwrap();
            // (−1)^k with k = 1
            prop_assert_eq!(lhs, sec.neg());
        }

        #[test]
        fn zero_coarea_implies_vanishing(c in chain(3, 1), axis in 0usize..3) {
            if coarea_bound(&c, &[axis]).unwrap().as_rational() == Some(q(0)) {
                prop_assert!(slices_vanish_ae(&c, &[axis]).unwrap().is_vanishes());
            }
        }

        #[test]
        fn slice_integral_matches_coarea(c in chain(2, 1)) {
            let c = c.normal_form().unwrap();
            let mut cuts = c.vertex_levels(0);
            cuts.dedup();
            let mut integral = CertifiedReal::zero();
            for w in cuts.windows(2) {
                // off every crossing abscissa (those have small denominators)
                let mid = &w[0] + (&w[1] - &w[0]) * q2(500, 1009);
                let m = slice(&c, &spec(&[0], vec![mid])).unwrap().mass(false).value;
                integral = integral.add(&m.scale(&(&w[1] - &w[0])));
            }
            prop_assert_eq!(integral.le(&c.mass(false).value), Some(true));
            prop_assert_eq!(integral.exact, coarea_bound(&c, &[0]).unwrap().exact);
        }

        #[test]
        fn split_iff_off_type_slices_vanish(c in chain(2, 1)) {
            prop_assume!(certify_non_overlapping(c.terms().map(|(x, _)| x)).is_none());
            for ty in TypeIndex::all(1, 1, 1) {
                let split = splitting_test(&c, 1, ty).unwrap() == SplitVerdict::Split;
                let others = TypeIndex::all(1, 1, 1).into_iter().filter(|t| *t != ty)
                    .all(|t| j_vanishing_test(&c, 1, t).unwrap().verdict.is_vanishes());
                prop_assert_eq!(split, others);
            }
        }
    }
}
