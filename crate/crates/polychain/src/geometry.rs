//! Oriented simplices with exact rational vertices.
//!
//! The orientation of a [`SimplexCell`] is its vertex order. Operations that
//! produce new cells return them in canonical form (lexicographically sorted
//! vertices) together with a sign, so callers can fold the permutation parity
//! into a coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{factorial, format_rational, parse_rational, Interval, Q};
use crate::linalg::{det, gram, rank, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("expected a point of dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("simplex vertices are affinely dependent")]
    Degenerate,
    #[error("a simplex needs at least one vertex")]
    Empty,
    #[error("operation needs a simplex of dimension at least 1")]
    ZeroDimensional,
    #[error("level {level} on axis {axis} passes through a vertex")]
    NonGenericLevel { axis: usize, level: String },
    #[error("axis {axis} out of range for ambient dimension {ambient}")]
    AxisOutOfRange { axis: usize, ambient: usize },
}

/// A point of ℚⁿ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint(pub Vec<Q>);

impl RationalPoint {
    pub fn new(coords: Vec<Q>) -> Self {
        RationalPoint(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalPoint(coords.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn sub(&self, other: &RationalPoint) -> Vec<Q> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    /// Keeps the listed coordinates, in the listed order.
    pub fn select(&self, axes: &[usize]) -> RationalPoint {
        RationalPoint(axes.iter().map(|&i| self.0[i].clone()).collect())
    }

    pub fn concat(&self, other: &RationalPoint) -> RationalPoint {
        RationalPoint(self.0.iter().chain(&other.0).cloned().collect())
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map(RationalPoint)
            .map_err(serde::de::Error::custom)
    }
}

/// Which open half-space to keep when clipping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `x_axis < level`
    Below,
    /// `x_axis > level`
    Above,
}

/// Nonzero k×k minors of the edge matrix, keyed by sorted coordinate sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlueckerVector {
    pub dim: usize,
    pub ambient: usize,
    pub components: BTreeMap<Vec<usize>, Q>,
}

impl PlueckerVector {
    pub fn component(&self, gamma: &[usize]) -> Q {
        self.components.get(gamma).cloned().unwrap_or_else(Q::zero)
    }
}

/// Sorted `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Monotone lattice paths from `(0,0)` to `(p,q)`; each path indexes one
/// simplex of the staircase triangulation of `Δ_p × Δ_q`.
pub fn staircase_paths(p: usize, q: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for first_steps in subsets(p + q, p) {
        let mut path = vec![(0, 0)];
        let (mut a, mut b) = (0, 0);
        for step in 0..p + q {
            if first_steps.contains(&step) {
                a += 1;
            } else {
                b += 1;
            }
            path.push((a, b));
        }
        out.push(path);
    }
    out
}

fn sign_of(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `⟨u₁∧…∧u_k, v₁∧…∧v_k⟩`, i.e. of `det(U Vᵀ)`.
pub fn orientation_sign(u: &[Vec<Q>], v: &[Vec<Q>]) -> i8 {
    sign_of(&det(&gram(u, v)))
}

pub fn unit_vector(n: usize, axis: usize) -> Vec<Q> {
    (0..n).map(|i| if i == axis { Q::from_integer(1.into()) } else { Q::zero() }).collect()
}

/// An oriented k-simplex in ℚⁿ; orientation is given by the vertex order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexCell {
    ambient: usize,
    vertices: Vec<RationalPoint>,
}

impl SimplexCell {
    pub fn new(vertices: Vec<RationalPoint>) -> Result<Self, GeometryError> {
        let first = vertices.first().ok_or(GeometryError::Empty)?;
        let ambient = first.dim();
        for v in &vertices {
            if v.dim() != ambient {
                return Err(GeometryError::DimensionMismatch { expected: ambient, found: v.dim() });
            }
        }
        let cell = SimplexCell { ambient, vertices };
        if cell.dim() > ambient || rank(&cell.edges()) < cell.dim() {
            return Err(GeometryError::Degenerate);
        }
        Ok(cell)
    }

    pub(crate) fn new_unchecked(vertices: Vec<RationalPoint>) -> Self {
        let ambient = vertices[0].dim();
        SimplexCell { ambient, vertices }
    }

    pub fn point(p: RationalPoint) -> Self {
        SimplexCell { ambient: p.dim(), vertices: vec![p] }
    }

    pub fn from_ints(vertices: &[&[i64]]) -> Result<Self, GeometryError> {
        SimplexCell::new(vertices.iter().map(|v| RationalPoint::from_ints(v)).collect())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> Matrix {
        let v0 = &self.vertices[0];
        self.vertices[1..].iter().map(|v| v.sub(v0)).collect()
    }

    /// Sorted-vertex form and the parity of the sorting permutation.
    pub fn canonical(&self) -> (SimplexCell, i8) {
        let mut idx: Vec<usize> = (0..self.vertices.len()).collect();
        idx.sort_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]));
        let mut sign = 1i8;
        let mut seen = vec![false; idx.len()];
        for start in 0..idx.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = idx[j];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        let vertices = idx.into_iter().map(|i| self.vertices[i].clone()).collect();
        (SimplexCell { ambient: self.ambient, vertices }, sign)
    }

    pub fn is_canonical(&self) -> bool {
        self.vertices.windows(2).all(|w| w[0] < w[1])
    }

    /// The same point set with the opposite orientation (`dim ≥ 1`).
    pub fn negated(&self) -> Result<SimplexCell, GeometryError> {
        if self.dim() == 0 {
            return Err(GeometryError::ZeroDimensional);
        }
        let mut vertices = self.vertices.clone();
        vertices.swap(0, 1);
        Ok(SimplexCell { ambient: self.ambient, vertices })
    }

    /// `Σᵢ (−1)ⁱ [v₀ … v̂ᵢ … v_k]`.
    pub fn boundary_faces(&self) -> Result<Vec<(SimplexCell, i8)>, GeometryError> {
        if self.dim() == 0 {
            return Err(GeometryError::ZeroDimensional);
        }
        Ok((0..self.vertices.len())
            .map(|i| {
                let mut vertices = self.vertices.clone();
                vertices.remove(i);
                (SimplexCell { ambient: self.ambient, vertices }, if i % 2 == 0 { 1 } else { -1 })
            })
            .collect())
    }

    /// `det(Gram)/(k!)²`.
    pub fn squared_volume(&self) -> Q {
        let e = self.edges();
        let g = det(&gram(&e, &e));
        let kf = Q::from_integer(factorial(self.dim()));
        g / (&kf * &kf)
    }

    pub fn volume(&self) -> (Q, Interval) {
        let sq = self.squared_volume();
        let iv = Interval::sqrt_of(&sq);
        (sq, iv)
    }

    /// The k×k minor of the edge matrix on the columns `gamma`.
    pub fn minor(&self, gamma: &[usize]) -> Q {
        assert_eq!(gamma.len(), self.dim(), "minor needs |γ| = k");
        let e = self.edges();
        let m: Matrix = e.iter().map(|row| gamma.iter().map(|&c| row[c].clone()).collect()).collect();
        det(&m)
    }

    pub fn pluecker(&self) -> PlueckerVector {
        let mut components = BTreeMap::new();
        for gamma in subsets(self.ambient, self.dim()) {
            let m = self.minor(&gamma);
            if !m.is_zero() {
                components.insert(gamma, m);
            }
        }
        PlueckerVector { dim: self.dim(), ambient: self.ambient, components }
    }

    /// Sign of this cell's orientation against the k-vector spanned by `frame`.
    pub fn orientation_against(&self, frame: &[Vec<Q>]) -> i8 {
        orientation_sign(&self.edges(), frame)
    }

    pub fn bbox(&self) -> (Vec<Q>, Vec<Q>) {
        let mut lo = self.vertices[0].0.clone();
        let mut hi = lo.clone();
        for v in &self.vertices[1..] {
            for (i, c) in v.0.iter().enumerate() {
                if *c < lo[i] {
                    lo[i] = c.clone();
                }
                if *c > hi[i] {
                    hi[i] = c.clone();
                }
            }
        }
        (lo, hi)
    }

    /// Coordinate projection onto `axes` (in order); `None` if the image is
    /// degenerate.
    pub fn project(&self, axes: &[usize]) -> Option<SimplexCell> {
        let vertices: Vec<RationalPoint> = self.vertices.iter().map(|v| v.select(axes)).collect();
        let cell = SimplexCell { ambient: axes.len(), vertices };
        if cell.dim() > axes.len() || rank(&cell.edges()) < cell.dim() {
            return None;
        }
        Some(cell)
    }

    fn check_axis(&self, axis: usize) -> Result<(), GeometryError> {
        if axis >= self.ambient {
            return Err(GeometryError::AxisOutOfRange { axis, ambient: self.ambient });
        }
        Ok(())
    }

    /// Vertices strictly below, strictly above and on the plane, each sorted.
    fn classify(&self, axis: usize, level: &Q) -> (Vec<RationalPoint>, Vec<RationalPoint>, Vec<RationalPoint>) {
        let mut below = Vec::new();
        let mut above = Vec::new();
        let mut on = Vec::new();
        for v in &self.vertices {
            match v.0[axis].cmp(level) {
                std::cmp::Ordering::Less => below.push(v.clone()),
                std::cmp::Ordering::Greater => above.push(v.clone()),
                std::cmp::Ordering::Equal => on.push(v.clone()),
            }
        }
        below.sort();
        above.sort();
        on.sort();
        (below, above, on)
    }

    /// Triangulated `self ∩ {x_axis = level}` as unoriented vertex lists:
    /// on-plane vertices joined with the staircase triangulation of the
    /// crossing points of below×above edges.
    fn cross_section(axis: usize, level: &Q, below: &[RationalPoint], above: &[RationalPoint], on: &[RationalPoint]) -> Vec<Vec<RationalPoint>> {
        if below.is_empty() || above.is_empty() {
            return Vec::new();
        }
        let crossing = |l: &RationalPoint, u: &RationalPoint| -> RationalPoint {
            let t = (level - &l.0[axis]) / (&u.0[axis] - &l.0[axis]);
            RationalPoint(l.0.iter().zip(&u.0).map(|(a, b)| a + &t * (b - a)).collect())
        };
        staircase_paths(below.len() - 1, above.len() - 1)
            .into_iter()
            .map(|path| {
                let mut verts: Vec<RationalPoint> = on.to_vec();
                verts.extend(path.iter().map(|&(a, b)| crossing(&below[a], &above[b])));
                verts
            })
            .collect()
    }

    /// Exact triangulated intersection with `{x_axis = level}`, each piece
    /// oriented so that `ξ_q ∧ e_axis` agrees with `ξ_p`.
    pub fn slice_by_hyperplane(&self, axis: usize, level: &Q) -> Result<Vec<(SimplexCell, i8)>, GeometryError> {
        self.check_axis(axis)?;
        if self.dim() == 0 {
            return Err(GeometryError::ZeroDimensional);
        }
        let (below, above, on) = self.classify(axis, level);
        if !on.is_empty() {
            return Err(GeometryError::NonGenericLevel { axis, level: format_rational(level) });
        }
        let own = self.edges();
        let e_axis = unit_vector(self.ambient, axis);
        let mut out = Vec::new();
        for verts in SimplexCell::cross_section(axis, level, &below, &above, &on) {
            let piece = SimplexCell { ambient: self.ambient, vertices: verts };
            let mut frame = piece.edges();
            frame.push(e_axis.clone());
            let s = orientation_sign(&frame, &own);
            debug_assert!(s != 0);
            let (c, parity) = piece.canonical();
            out.push((c, s * parity));
        }
        Ok(out)
    }

    /// Exact triangulation of `self ∩ {x_axis ⋚ level}` (closed half-space),
    /// orientations inherited from `self`. Non-generic levels are allowed.
    ///
    /// The triangulation pulls from the lexicographically smallest kept
    /// vertex, recursively, so that cells sharing a face induce the same
    /// triangulation on it.
    pub fn clip_halfspace(&self, axis: usize, level: &Q, side: Side) -> Result<Vec<(SimplexCell, i8)>, GeometryError> {
        self.check_axis(axis)?;
        let own = self.edges();
        let mut out = Vec::new();
        for verts in self.clip_vertex_sets(axis, level, side) {
            let piece = SimplexCell { ambient: self.ambient, vertices: verts };
            let s = if self.dim() == 0 { 1 } else { orientation_sign(&piece.edges(), &own) };
            debug_assert!(s != 0);
            let (c, parity) = piece.canonical();
            out.push((c, s * parity));
        }
        Ok(out)
    }

    fn clip_vertex_sets(&self, axis: usize, level: &Q, side: Side) -> Vec<Vec<RationalPoint>> {
        let (below, above, on) = self.classify(axis, level);
        let (kept, removed) = match side {
            Side::Below => (below, above),
            Side::Above => (above, below),
        };
        if kept.is_empty() {
            return Vec::new();
        }
        if removed.is_empty() {
            return vec![self.vertices.clone()];
        }
        let apex = kept[0].clone();
        let opposite: Vec<RationalPoint> = self.vertices.iter().filter(|v| **v != apex).cloned().collect();
        let mut bases = Vec::new();
        if !opposite.is_empty() {
            let facet = SimplexCell { ambient: self.ambient, vertices: opposite };
            bases.extend(facet.clip_vertex_sets(axis, level, side));
        }
        let (lo, hi) = match side {
            Side::Below => (&kept, &removed),
            Side::Above => (&removed, &kept),
        };
        bases.extend(SimplexCell::cross_section(axis, level, lo, hi, &on));
        bases
            .into_iter()
            .map(|base| {
                let mut verts = vec![apex.clone()];
                verts.extend(base);
                verts
            })
            .collect()
    }

    /// Staircase triangulation of the prism `self × other`, each piece
    /// oriented like `ξ_self ∧ ξ_other`.
    pub fn product_prism(&self, other: &SimplexCell) -> Vec<(SimplexCell, i8)> {
        let n1 = self.ambient;
        let n2 = other.ambient;
        let mut frame: Matrix = Vec::new();
        for e in self.edges() {
            let mut v = e;
            v.extend(std::iter::repeat(Q::zero()).take(n2));
            frame.push(v);
        }
        for e in other.edges() {
            let mut v: Vec<Q> = std::iter::repeat(Q::zero()).take(n1).collect();
            v.extend(e);
            frame.push(v);
        }
        staircase_paths(self.dim(), other.dim())
            .into_iter()
            .map(|path| {
                let verts: Vec<RationalPoint> =
                    path.iter().map(|&(a, b)| self.vertices[a].concat(&other.vertices[b])).collect();
                let piece = SimplexCell { ambient: n1 + n2, vertices: verts };
                let s = if frame.is_empty() { 1 } else { orientation_sign(&piece.edges(), &frame) };
                debug_assert!(s != 0);
                let (c, parity) = piece.canonical();
                (c, s * parity)
            })
            .collect()
    }
}

impl fmt::Display for SimplexCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl Serialize for SimplexCell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.vertices.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplexCell {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let vertices = Vec::<RationalPoint>::deserialize(d)?;
        SimplexCell::new(vertices).map_err(serde::de::Error::custom)
    }
}

/// Sum of the squared volumes is not additive, so tests compare volumes of
/// pieces via their exact squares per piece; this helper sums the intervals.
pub fn total_volume_interval(cells: &[(SimplexCell, i8)]) -> Interval {
    cells.iter().fold(Interval::zero(), |acc, (c, _)| acc.add(c.volume().1))
}

pub fn factorial_q(k: usize) -> Q {
    Q::from_integer(factorial(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q2};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn cell(v: &[&[i64]]) -> SimplexCell {
        SimplexCell::from_ints(v).unwrap()
    }

    /// Signed face multiset after canonicalisation.
    fn signed_sum(faces: impl IntoIterator<Item = (SimplexCell, i64)>) -> BTreeMap<SimplexCell, i64> {
        let mut m = BTreeMap::new();
        for (f, s) in faces {
            let (c, p) = f.canonical();
            *m.entry(c).or_insert(0) += s * p as i64;
        }
        m.retain(|_, v| *v != 0);
        m
    }

    #[test]
    fn segment_boundary() {
        let s = cell(&[&[0], &[1]]);
        let faces = s.boundary_faces().unwrap();
        assert_eq!(faces[0], (SimplexCell::point(RationalPoint::from_ints(&[1])), 1));
        assert_eq!(faces[1], (SimplexCell::point(RationalPoint::from_ints(&[0])), -1));
        assert!(SimplexCell::point(RationalPoint::from_ints(&[0])).boundary_faces().is_err());
    }

    #[test]
    fn boundary_of_boundary_cancels() {
        let t = cell(&[&[0, 0], &[1, 0], &[0, 1]]);
        let mut all = Vec::new();
        for (f, s) in t.boundary_faces().unwrap() {
            for (g, r) in f.boundary_faces().unwrap() {
                all.push((g, (s * r) as i64));
            }
        }
        assert!(signed_sum(all).is_empty());
    }

    #[test]
    fn square_diagonal_cancels() {
        let t1 = cell(&[&[0, 0], &[1, 0], &[1, 1]]);
        let t2 = cell(&[&[0, 0], &[1, 1], &[0, 1]]);
        let faces = t1.boundary_faces().unwrap().into_iter().chain(t2.boundary_faces().unwrap());
        let sum = signed_sum(faces.map(|(f, s)| (f, s as i64)));
        assert_eq!(sum.len(), 4);
        let diag = cell(&[&[0, 0], &[1, 1]]);
        assert!(!sum.contains_key(&diag));
    }

    #[test]
    fn exterior_normal_rule_for_triangle() {
        // face opposite v_i with sign (−1)^i: ν ∧ ξ_face = ξ_p for the outward normal ν
        let t = cell(&[&[0, 0], &[1, 0], &[0, 1]]);
        let own = t.edges();
        let centroid = [q2(1, 3), q2(1, 3)];
        for (face, s) in t.boundary_faces().unwrap() {
            let e = face.edges()[0].clone();
            let n = vec![e[1].clone(), -e[0].clone()];
            let mid: Vec<Q> = (0..2).map(|i| (&face.vertices()[0].0[i] + &face.vertices()[1].0[i]) / q(2)).collect();
            let out: Q = (0..2).map(|i| &n[i] * (&mid[i] - &centroid[i])).fold(q(0), |a, b| a + b);
            let normal = if out > q(0) { n } else { n.into_iter().map(|x| -x).collect() };
            let mut frame = vec![normal];
            frame.push(e);
            assert_eq!(orientation_sign(&frame, &own), s);
        }
    }

    #[test]
    fn volumes() {
        let d = cell(&[&[0, 0], &[1, 1]]);
        let (sq, iv) = d.volume();
        assert_eq!(sq, q(2));
        assert!(iv.lo >= 1.41421356 && iv.hi <= 1.41421357);
        assert_eq!(cell(&[&[0, 0], &[1, 0], &[0, 1]]).squared_volume(), q2(1, 4));
        assert_eq!(cell(&[&[0, 0], &[1, 0], &[1, 1]]).squared_volume(), q2(1, 4));
    }

    #[test]
    fn pluecker_components() {
        let h = cell(&[&[0, 0], &[1, 0]]).pluecker();
        assert_eq!((h.component(&[0]), h.component(&[1])), (q(1), q(0)));
        let d = cell(&[&[0, 0], &[1, 1]]).pluecker();
        assert_eq!((d.component(&[0]), d.component(&[1])), (q(1), q(1)));
        let sq = cell(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[1, 0, 1, 0]]).pluecker();
        assert_eq!(sq.components.len(), 1);
        assert_eq!(sq.component(&[0, 2]), q(1));
    }

    #[test]
    fn slicing_examples() {
        let d = cell(&[&[0, 0], &[1, 1]]);
        let s = d.slice_by_hyperplane(0, &q2(1, 2)).unwrap();
        assert_eq!(s, vec![(SimplexCell::point(RationalPoint(vec![q2(1, 2), q2(1, 2)])), 1)]);
        let h = cell(&[&[0, 0], &[1, 0]]);
        assert!(h.slice_by_hyperplane(1, &q2(1, 2)).unwrap().is_empty());
        let t = cell(&[&[0, 0], &[2, 0], &[0, 2]]);
        let s = t.slice_by_hyperplane(0, &q(1)).unwrap();
        assert_eq!(s.len(), 1);
        let (seg, sign) = &s[0];
        assert_eq!(seg.vertices(), &[RationalPoint::from_ints(&[1, 0]), RationalPoint::from_ints(&[1, 1])]);
        // ξ_q ∧ e₁ ~ e₁ ∧ e₂ forces ξ_q = −e₂
        assert_eq!(*sign, -1);
        assert!(matches!(t.slice_by_hyperplane(0, &q(0)), Err(GeometryError::NonGenericLevel { .. })));
    }

    #[test]
    fn clipping_examples() {
        let s = cell(&[&[0, 0], &[1, 0]]);
        let c = s.clip_halfspace(0, &q2(1, 2), Side::Below).unwrap();
        assert_eq!(c, vec![(SimplexCell::new(vec![RationalPoint::from_ints(&[0, 0]), RationalPoint(vec![q2(1, 2), q(0)])]).unwrap(), 1)]);
        let t = cell(&[&[0, 0], &[2, 0], &[0, 2]]);
        assert_eq!(t.clip_halfspace(0, &q(5), Side::Below).unwrap(), vec![t.canonical()]);
        let c = t.clip_halfspace(0, &q(1), Side::Below).unwrap();
        assert_eq!(c.len(), 2);
        // trapezoid area 3/2 = Σ √(squared areas)
        let total: Q = c.iter().map(|(p, _)| p.squared_volume()).fold(q(0), |a, b| a + b);
        let areas: Vec<Q> = c.iter().map(|(p, _)| p.squared_volume()).collect();
        assert!(areas.iter().all(|a| *a == q(1) || *a == q2(1, 4)));
        assert_eq!(total, q2(5, 4));
        assert!(c.iter().all(|(p, s)| p.orientation_against(&t.edges()) * s == 1));
    }

    #[test]
    fn product_of_segments_is_unit_square() {
        let a = cell(&[&[0], &[1]]);
        let b = cell(&[&[0], &[1]]);
        let pieces = a.product_prism(&b);
        assert_eq!(pieces.len(), 2);
        for (p, s) in &pieces {
            assert_eq!(p.squared_volume(), q2(1, 4));
            assert_eq!(p.orientation_against(&[vec![q(1), q(0)], vec![q(0), q(1)]]) * s, 1);
        }
    }

    #[test]
    fn staircase_counts() {
        assert_eq!(staircase_paths(1, 1).len(), 2);
        assert_eq!(staircase_paths(2, 2).len(), 6);
        assert_eq!(staircase_paths(0, 3).len(), 1);
    }

    fn small_simplex(n: usize, k: usize) -> impl Strategy<Value = SimplexCell> {
        prop::collection::vec(prop::collection::vec(-4i64..5, n), k + 1)
            .prop_filter_map("degenerate", |vs| {
                SimplexCell::new(vs.iter().map(|v| RationalPoint::from_ints(v)).collect()).ok()
            })
    }

    proptest! {
        #[test]
        fn double_boundary_vanishes(s in small_simplex(3, 3)) {
            let mut all = Vec::new();
            for (f, a) in s.boundary_faces().unwrap() {
                for (g, b) in f.boundary_faces().unwrap() {
                    all.push((g, (a * b) as i64));
                }
            }
            prop_assert!(signed_sum(all).is_empty());
        }

        #[test]
        fn transposition_flips_pluecker(s in small_simplex(3, 2)) {
            let p = s.pluecker();
            let n = s.negated().unwrap().pluecker();
            for (g, v) in &p.components {
                prop_assert_eq!(n.component(g), -v.clone());
            }
        }

        #[test]
        fn clip_halves_add_up(s in small_simplex(2, 2), num in -9i64..9) {
            let level = q2(2 * num + 1, 4);
            let below = s.clip_halfspace(0, &level, Side::Below).unwrap();
            let above = s.clip_halfspace(0, &level, Side::Above).unwrap();
            let area2 = |v: &[(SimplexCell, i8)]| -> Q {
                v.iter().map(|(c, _)| c.minor(&[0, 1]).abs()).fold(q(0), |a, b| a + b)
            };
            prop_assert_eq!(area2(&below) + area2(&above), s.minor(&[0, 1]).abs());
            for (c, sg) in below.iter().chain(&above) {
                prop_assert_eq!(c.orientation_against(&s.edges()) * sg, 1);
            }
        }

        #[test]
        fn slice_of_clip_is_clip_of_slice(s in small_simplex(2, 2), a in -9i64..9, b in -9i64..9) {
            let s_level = q2(2 * a + 1, 4);
            let c_level = q2(2 * b + 1, 4);
            // signed length along x₂ of the resulting vertical segments
            let signed = |seg: &SimplexCell, sg: i8| -> Q {
                (&seg.vertices()[1].0[1] - &seg.vertices()[0].0[1]) * q(sg as i64)
            };
            let lhs: Option<Q> = (|| {
                let mut acc = q(0);
                for (piece, sg) in s.clip_halfspace(1, &c_level, Side::Below).ok()? {
                    for (seg, sg2) in piece.slice_by_hyperplane(0, &s_level).ok()? {
                        acc += signed(&seg, sg * sg2);
                    }
                }
                Some(acc)
            })();
            let rhs: Option<Q> = (|| {
                let mut acc = q(0);
                for (seg, sg) in s.slice_by_hyperplane(0, &s_level).ok()? {
                    for (piece, sg2) in seg.clip_halfspace(1, &c_level, Side::Below).ok()? {
                        acc += signed(&piece, sg * sg2);
                    }
                }
                Some(acc)
            })();
            prop_assume!(lhs.is_some() && rhs.is_some());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
