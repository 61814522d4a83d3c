//! Tensor chains `Σ gᵢ p¹ᵢ × p²ᵢ` over a split `ℝⁿ = ℝ^{n₁} × ℝ^{n₂}`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::chains::{Chain, ChainError};
use crate::coeff::{CoeffError, CoefficientGroup, CoefficientValue};
use crate::exact::{two_pow, CertifiedReal, Q};
use crate::geometry::{orientation_sign, RationalPoint, SimplexCell};
use crate::slicing::{slice, SliceSpec, SlicingError, TypeIndex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Slicing(#[from] SlicingError),
    #[error("expected a ({k1}, {k2}) factor pair in R^{n1} x R^{n2}")]
    FactorShape { n1: usize, n2: usize, k1: usize, k2: usize },
    #[error("expected type ({expected_k1}, {expected_k2}), got ({k1}, {k2})")]
    TypeMismatch { expected_k1: usize, expected_k2: usize, k1: usize, k2: usize },
    #[error("cell {cell} is not a piece of a product of coordinate-subspace cells")]
    NotTensorRepresentable { cell: String },
    #[error("expected a chain of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("split n1 = {n1} exceeds the ambient dimension {ambient}")]
    InvalidSplit { n1: usize, ambient: usize },
}

/// A finite sum of product cells of fixed type `(k₁, k₂)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorChain {
    n1: usize,
    n2: usize,
    k1: usize,
    k2: usize,
    group: CoefficientGroup,
    terms: BTreeMap<(SimplexCell, SimplexCell), Q>,
}

/// `i P`: first-factor cells with their second-factor coefficient chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IChainView {
    pub n1: usize,
    pub n2: usize,
    pub k1: usize,
    pub k2: usize,
    pub group: CoefficientGroup,
    pub groups: BTreeMap<SimplexCell, Chain>,
}

impl TensorChain {
    pub fn new(split: (usize, usize), ty: TypeIndex, group: CoefficientGroup) -> Self {
        TensorChain { n1: split.0, n2: split.1, k1: ty.k1, k2: ty.k2, group, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(split: (usize, usize), ty: TypeIndex, group: CoefficientGroup, terms: I) -> Result<Self, TensorError>
    where
        I: IntoIterator<Item = (SimplexCell, SimplexCell, Q)>,
    {
        let mut t = TensorChain::new(split, ty, group);
        for (a, b, g) in terms {
            t.add_term(a, b, &g)?;
        }
        Ok(t)
    }

    /// `(Σ mᵢ p¹ᵢ) ∧ (Σ gⱼ p²ⱼ) = Σ (mᵢ gⱼ) p¹ᵢ × p²ⱼ`.
    pub fn wedge(a: &Chain, b: &Chain) -> Result<Self, TensorError> {
        if a.group() != CoefficientGroup::Integers {
            return Err(ChainError::NonIntegerFactor(a.group()).into());
        }
        let mut t = TensorChain::new((a.ambient(), b.ambient()), TypeIndex::new(a.dim(), b.dim()), b.group());
        for (p, m) in a.terms() {
            let m = m.to_integer();
            for (q, g) in b.terms() {
                let v = b.group().mul_int(&m, g);
                t.accumulate(p.clone(), q.clone(), v);
            }
        }
        Ok(t)
    }

    pub fn split(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn type_index(&self) -> TypeIndex {
        TypeIndex::new(self.k1, self.k2)
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

    pub fn terms(&self) -> impl Iterator<Item = (&SimplexCell, &SimplexCell, &Q)> {
        self.terms.iter().map(|((a, b), g)| (a, b, g))
    }

    pub fn add_term(&mut self, a: SimplexCell, b: SimplexCell, g: &Q) -> Result<(), TensorError> {
        if a.ambient() != self.n1 || b.ambient() != self.n2 || a.dim() != self.k1 || b.dim() != self.k2 {
            return Err(TensorError::FactorShape { n1: self.n1, n2: self.n2, k1: self.k1, k2: self.k2 });
        }
        let g = self.group.reduce(g)?;
        self.accumulate(a, b, g);
        Ok(())
    }

    fn accumulate(&mut self, a: SimplexCell, b: SimplexCell, g: Q) {
        let (a, sa) = a.canonical();
        let (b, sb) = b.canonical();
        let g = if sa * sb < 0 { self.group.neg(&g) } else { g };
        if g.is_zero() {
            return;
        }
        let key = (a, b);
        let sum = match self.terms.get(&key) {
            Some(v) => self.group.add(v, &g),
            None => g,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    fn check_same(&self, other: &TensorChain) -> Result<(), TensorError> {
        self.group.check_same(&other.group)?;
        if (self.n1, self.n2) != (other.n1, other.n2) || (self.k1, self.k2) != (other.k1, other.k2) {
            return Err(TensorError::TypeMismatch { expected_k1: self.k1, expected_k2: self.k2, k1: other.k1, k2: other.k2 });
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorChain) -> Result<TensorChain, TensorError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for ((a, b), g) in &other.terms {
            out.accumulate(a.clone(), b.clone(), g.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> TensorChain {
        let mut out = self.clone();
        for g in out.terms.values_mut() {
            *g = self.group.neg(g);
        }
        out
    }

    pub fn sub(&self, other: &TensorChain) -> Result<TensorChain, TensorError> {
        self.add(&other.neg())
    }

    /// `∂₁P = Σ gᵢ (∂p¹ᵢ) × p²ᵢ`; `None` when `k₁ = 0`.
    pub fn d1(&self) -> Option<TensorChain> {
        if self.k1 == 0 {
            return None;
        }
        let mut out = TensorChain::new((self.n1, self.n2), TypeIndex::new(self.k1 - 1, self.k2), self.group);
        for ((a, b), g) in &self.terms {
            for (face, s) in a.boundary_faces().expect("k1 > 0") {
                let v = if s < 0 { self.group.neg(g) } else { g.clone() };
                out.accumulate(face, b.clone(), v);
            }
        }
        Some(out)
    }

    /// `∂₂P = (−1)^{k₁} Σ gᵢ p¹ᵢ × (∂p²ᵢ)`; `None` when `k₂ = 0`.
    pub fn d2(&self) -> Option<TensorChain> {
        if self.k2 == 0 {
            return None;
        }
        let mut out = TensorChain::new((self.n1, self.n2), TypeIndex::new(self.k1, self.k2 - 1), self.group);
        let outer: i8 = if self.k1 % 2 == 0 { 1 } else { -1 };
        for ((a, b), g) in &self.terms {
            for (face, s) in b.boundary_faces().expect("k2 > 0") {
                let v = if s * outer < 0 { self.group.neg(g) } else { g.clone() };
                out.accumulate(a.clone(), face, v);
            }
        }
        Some(out)
    }

    /// The underlying polyhedral chain in ℝⁿ (staircase-triangulated prisms).
    pub fn embed(&self) -> Chain {
        let mut out = Chain::new(self.n1 + self.n2, self.k1 + self.k2, self.group);
        for ((a, b), g) in &self.terms {
            for (piece, s) in a.product_prism(b) {
                let v = if s < 0 { self.group.neg(g) } else { g.clone() };
                out.add_cell(piece, &v).expect("prism pieces have the chain's shape");
            }
        }
        out
    }

    /// `Σ |gᵢ| H^{k₁}(p¹ᵢ) H^{k₂}(p²ᵢ)`.
    pub fn mass(&self) -> CertifiedReal {
        let mut total = CertifiedReal::zero();
        for ((a, b), g) in &self.terms {
            let va = CertifiedReal::scaled_sqrt(&self.group.norm(g), &a.squared_volume());
            let vb = CertifiedReal::scaled_sqrt(&Q::from_integer(1.into()), &b.squared_volume());
            total = total.add(&va.mul(&vb));
        }
        total
    }

    pub fn i_map(&self) -> IChainView {
        let mut groups: BTreeMap<SimplexCell, Chain> = BTreeMap::new();
        for ((a, b), g) in &self.terms {
            groups
                .entry(a.clone())
                .or_insert_with(|| Chain::new(self.n2, self.k2, self.group))
                .add_cell(b.clone(), g)
                .expect("stored cells have the right shape");
        }
        groups.retain(|_, c| !c.is_zero());
        IChainView { n1: self.n1, n2: self.n2, k1: self.k1, k2: self.k2, group: self.group, groups }
    }

    /// `Λ_j` for a `(0, k)` chain: first-factor points snapped to the corner
    /// `2^{−j}⌊2^j x⌋` of their half-open dyadic cube.
    pub fn dyadic_collapse(&self, level: u32) -> Result<TensorChain, TensorError> {
        if self.k1 != 0 {
            return Err(TensorError::TypeMismatch { expected_k1: 0, expected_k2: self.k2, k1: self.k1, k2: self.k2 });
        }
        let scale = two_pow(level as i32);
        let snapped: Vec<(SimplexCell, SimplexCell, Q)> = self
            .terms
            .par_iter()
            .map(|((a, b), g)| {
                let p = &a.vertices()[0];
                let y = RationalPoint(p.0.iter().map(|x| Q::from_integer((x * &scale).floor().to_integer()) / &scale).collect());
                (SimplexCell::point(y), b.clone(), g.clone())
            })
            .collect();
        let mut out = TensorChain::new((self.n1, self.n2), self.type_index(), self.group);
        for (a, b, g) in snapped {
            out.accumulate(a, b, g);
        }
        Ok(out)
    }

    /// Factorwise slice `Sl_{γ¹} p¹ × Sl_{γ²} p²` with `γ = γ¹ ∪ (n₁ + γ²)`.
    pub fn slice(&self, spec: &SliceSpec) -> Result<TensorChain, TensorError> {
        let g1: Vec<usize> = spec.gamma.iter().copied().filter(|&i| i < self.n1).collect();
        let g2: Vec<usize> = spec.gamma.iter().copied().filter(|&i| i >= self.n1).map(|i| i - self.n1).collect();
        let x1 = RationalPoint(spec.point.0[..g1.len()].to_vec());
        let x2 = RationalPoint(spec.point.0[g1.len()..].to_vec());
        if g1.len() > self.k1 || g2.len() > self.k2 {
            return Err(TensorError::TypeMismatch { expected_k1: g1.len(), expected_k2: g2.len(), k1: self.k1, k2: self.k2 });
        }
        let s1 = SliceSpec { gamma: g1.clone(), point: x1 };
        let s2 = SliceSpec { gamma: g2.clone(), point: x2 };
        let mut out = TensorChain::new(
            (self.n1 - g1.len(), self.n2 - g2.len()),
            TypeIndex::new(self.k1 - g1.len(), self.k2 - g2.len()),
            self.group,
        );
        for ((a, b), g) in &self.terms {
            let sa = slice(&Chain::cell(a.clone(), CoefficientGroup::Integers, Q::from_integer(1.into()))?, &s1)?;
            if sa.is_zero() {
                continue;
            }
            let sb = slice(&Chain::cell(b.clone(), self.group, g.clone())?, &s2)?;
            for (pa, m) in sa.terms() {
                let m = m.to_integer();
                for (pb, h) in sb.terms() {
                    out.accumulate(pa.clone(), pb.clone(), self.group.mul_int(&m, h));
                }
            }
        }
        Ok(out)
    }
}

impl IChainView {
    pub fn i_inverse(&self) -> TensorChain {
        let mut t = TensorChain::new((self.n1, self.n2), TypeIndex::new(self.k1, self.k2), self.group);
        for (a, chain) in &self.groups {
            for (b, g) in chain.terms() {
                t.accumulate(a.clone(), b.clone(), g.clone());
            }
        }
        t
    }

    /// `Σ M(coefficient chain)·H^{k₁}(p¹)`: the mass of the view with
    /// coefficient chains measured by mass (an upper bound for their flat norm).
    pub fn mass(&self) -> CertifiedReal {
        let mut total = CertifiedReal::zero();
        for (a, chain) in &self.groups {
            let m = chain.mass(false).value;
            total = total.add(&m.mul(&CertifiedReal::scaled_sqrt(&Q::from_integer(1.into()), &a.squared_volume())));
        }
        total
    }
}

/// `χ(Σ gᵢ⟦xᵢ⟧) = Σ gᵢ`.
pub fn chi(c: &Chain) -> Result<CoefficientValue, TensorError> {
    if c.dim() != 0 {
        return Err(TensorError::DimensionMismatch { expected: 0, found: c.dim() });
    }
    let s = c.terms().fold(Q::zero(), |acc, (_, g)| c.group().add(&acc, g));
    Ok(CoefficientValue::new(c.group(), s)?)
}

/// `χ^∧(A') = χ(χ(i A'))` for a `(0, 0)` tensor chain.
pub fn chi_wedge(t: &TensorChain) -> Result<CoefficientValue, TensorError> {
    if (t.k1, t.k2) != (0, 0) {
        return Err(TensorError::TypeMismatch { expected_k1: 0, expected_k2: 0, k1: t.k1, k2: t.k2 });
    }
    let mut total = CoefficientValue::zero(t.group);
    for chain in t.i_map().groups.values() {
        total = total.add(&chi(chain)?)?;
    }
    Ok(total)
}

/// Splits a chain whose cells are staircase pieces of products
/// `p¹ × p²` (both factors with sorted vertices) into its type components.
pub fn j_decompose(c: &Chain, n1: usize) -> Result<BTreeMap<TypeIndex, TensorChain>, TensorError> {
    if n1 > c.ambient() {
        return Err(TensorError::InvalidSplit { n1, ambient: c.ambient() });
    }
    let n2 = c.ambient() - n1;
    let axes1: Vec<usize> = (0..n1).collect();
    let axes2: Vec<usize> = (n1..c.ambient()).collect();
    // (p¹, p²) → piece → signed coefficient
    let mut prisms: BTreeMap<(SimplexCell, SimplexCell), Vec<(SimplexCell, Q)>> = BTreeMap::new();
    for (cell, g) in c.terms() {
        let not_rep = || TensorError::NotTensorRepresentable { cell: cell.to_string() };
        let mut a: Vec<RationalPoint> = cell.vertices().iter().map(|v| v.select(&axes1)).collect();
        let mut b: Vec<RationalPoint> = cell.vertices().iter().map(|v| v.select(&axes2)).collect();
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        if a.len() + b.len() != cell.dim() + 2 {
            return Err(not_rep());
        }
        let mut path: Vec<(usize, usize)> = cell
            .vertices()
            .iter()
            .map(|v| (a.binary_search(&v.select(&axes1)).unwrap(), b.binary_search(&v.select(&axes2)).unwrap()))
            .collect();
        path.sort();
        if path.windows(2).any(|w| w[1].0 + w[1].1 != w[0].0 + w[0].1 + 1 || w[1].1 < w[0].1) {
            return Err(not_rep());
        }
        let p1 = SimplexCell::new(a).map_err(|_| not_rep())?;
        let p2 = SimplexCell::new(b).map_err(|_| not_rep())?;
        let staircase: Vec<RationalPoint> =
            path.iter().map(|&(i, j)| p1.vertices()[i].concat(&p2.vertices()[j])).collect();
        let piece = SimplexCell::new(staircase).map_err(|_| not_rep())?;
        let mut frame = Vec::new();
        for e in p1.edges() {
            let mut v = e;
            v.extend(std::iter::repeat(Q::zero()).take(n2));
            frame.push(v);
        }
        for e in p2.edges() {
            let mut v: Vec<Q> = std::iter::repeat(Q::zero()).take(n1).collect();
            v.extend(e);
            frame.push(v);
        }
        let s = if frame.is_empty() { 1 } else { orientation_sign(&cell.edges(), &frame) };
        let v = if s < 0 { c.group().neg(g) } else { g.clone() };
        prisms.entry((p1, p2)).or_default().push((piece.canonical().0, v));
    }
    let mut out: BTreeMap<TypeIndex, TensorChain> = BTreeMap::new();
    for ((p1, p2), pieces) in prisms {
        let expected: Vec<SimplexCell> = p1.product_prism(&p2).into_iter().map(|(c, _)| c).collect();
        let g = pieces[0].1.clone();
        let mut have: Vec<SimplexCell> = pieces.iter().map(|(c, _)| c.clone()).collect();
        have.sort();
        let mut want = expected.clone();
        want.sort();
        if have != want || pieces.iter().any(|(_, v)| *v != g) {
            return Err(TensorError::NotTensorRepresentable { cell: pieces[0].0.to_string() });
        }
        let ty = TypeIndex::new(p1.dim(), p2.dim());
        out.entry(ty)
            .or_insert_with(|| TensorChain::new((n1, n2), ty, c.group()))
            .accumulate(p1, p2, g);
    }
    out.retain(|_, t| !t.is_zero());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q2};
    use proptest::prelude::*;

    const Z: CoefficientGroup = CoefficientGroup::Integers;

    fn seg1(a: i64, b: i64) -> SimplexCell {
        SimplexCell::from_ints(&[&[a], &[b]]).unwrap()
    }

    fn pt(c: &[i64]) -> SimplexCell {
        SimplexCell::point(RationalPoint::from_ints(c))
    }

    fn unit_square() -> TensorChain {
        TensorChain::from_terms((1, 1), TypeIndex::new(1, 1), Z, [(seg1(0, 1), seg1(0, 1), q(1))]).unwrap()
    }

    #[test]
    fn partial_boundaries_of_a_square() {
        let t = unit_square();
        let d1 = t.d1().unwrap();
        let expected = TensorChain::from_terms(
            (1, 1),
            TypeIndex::new(0, 1),
            Z,
            [(pt(&[1]), seg1(0, 1), q(1)), (pt(&[0]), seg1(0, 1), q(-1))],
        )
        .unwrap();
        assert_eq!(d1, expected);
        let a = t.d1().unwrap().d2().unwrap();
        let b = t.d2().unwrap().d1().unwrap();
        assert_eq!(a, b.neg());
        assert!(!a.is_zero());
        assert!(d1.d1().is_none());
        assert_eq!(t.embed().boundary().unwrap(), t.d1().unwrap().embed().add(&t.d2().unwrap().embed()).unwrap());
    }

    #[test]
    fn j_decompose_examples() {
        let h = Chain::cell(SimplexCell::from_ints(&[&[0, 0], &[1, 0]]).unwrap(), Z, q(1)).unwrap();
        let v = Chain::cell(SimplexCell::from_ints(&[&[2, 0], &[2, 1]]).unwrap(), Z, q(1)).unwrap();
        let c = h.add(&v).unwrap();
        let j = j_decompose(&c, 1).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j[&TypeIndex::new(1, 0)].embed(), h);
        assert_eq!(j[&TypeIndex::new(0, 1)].embed(), v);
        let total = j.values().fold(CertifiedReal::zero(), |acc, t| acc.add(&t.embed().mass(true).value));
        assert_eq!(total.exact, c.mass(true).value.exact);
        let sq = unit_square();
        assert_eq!(j_decompose(&sq.embed(), 1).unwrap(), BTreeMap::from([(TypeIndex::new(1, 1), sq)]));
        let d = Chain::cell(SimplexCell::from_ints(&[&[0, 0], &[1, 1]]).unwrap(), Z, q(1)).unwrap();
        assert!(matches!(j_decompose(&d, 1), Err(TensorError::NotTensorRepresentable { .. })));
    }

    #[test]
    fn i_view_examples() {
        let t = TensorChain::from_terms(
            (1, 1),
            TypeIndex::new(1, 1),
            Z,
            [(seg1(0, 1), seg1(0, 1), q(1)), (seg1(0, 1), seg1(1, 2), q(1))],
        )
        .unwrap();
        let v = t.i_map();
        assert_eq!(v.groups.len(), 1);
        assert_eq!(v.groups.values().next().unwrap().len(), 2);
        assert_eq!(v.i_inverse(), t);
        // 2p¹ ∧ 1̄p² = 0 over ℤ/2
        let z2 = CoefficientGroup::IntegersMod(2);
        let a = Chain::cell(seg1(0, 1), Z, q(2)).unwrap();
        let b = Chain::cell(seg1(0, 1), z2, q(1)).unwrap();
        let w = TensorChain::wedge(&a, &b).unwrap();
        assert!(w.is_zero());
        assert!(w.i_map().groups.is_empty());
    }

    #[test]
    fn chi_examples() {
        let c = Chain::from_terms(1, 0, Z, [(pt(&[0]), q(-1)), (pt(&[3]), q(1))]).unwrap();
        assert!(chi(&c).unwrap().is_zero());
        let c = Chain::from_terms(1, 0, Z, [(pt(&[0]), q(3)), (pt(&[3]), q(2))]).unwrap();
        assert_eq!(chi(&c).unwrap().value(), &q(5));
        let corners = TensorChain::from_terms(
            (1, 1),
            TypeIndex::new(0, 0),
            Z,
            [
                (pt(&[0]), pt(&[0]), q(-1)),
                (pt(&[1]), pt(&[0]), q(1)),
                (pt(&[1]), pt(&[1]), q(-1)),
                (pt(&[0]), pt(&[1]), q(1)),
            ],
        )
        .unwrap();
        assert!(chi_wedge(&corners).unwrap().is_zero());
        let single = TensorChain::from_terms((1, 1), TypeIndex::new(0, 0), Z, [(pt(&[0]), pt(&[0]), q(7))]).unwrap();
        assert_eq!(chi_wedge(&single).unwrap().value(), &q(7));
        assert!(chi_wedge(&unit_square()).is_err());
    }

    #[test]
    fn collapse_examples() {
        let p = SimplexCell::point(RationalPoint(vec![q2(3, 10), q2(7, 10)]));
        let t = TensorChain::from_terms((2, 1), TypeIndex::new(0, 1), Z, [(p, seg1(0, 1), q(1))]).unwrap();
        let c = t.dyadic_collapse(1).unwrap();
        let (a, _, _) = c.terms().next().unwrap();
        assert_eq!(a.vertices()[0].0, vec![q(0), q2(1, 2)]);
        let corner = SimplexCell::point(RationalPoint(vec![q2(1, 4), q2(3, 4)]));
        let t = TensorChain::from_terms((2, 1), TypeIndex::new(0, 1), Z, [(corner, seg1(0, 1), q(1))]).unwrap();
        assert_eq!(t.dyadic_collapse(2).unwrap(), t);
        let two = TensorChain::from_terms(
            (1, 1),
            TypeIndex::new(0, 1),
            Z,
            [
                (SimplexCell::point(RationalPoint(vec![q2(1, 8)])), seg1(0, 1), q(1)),
                (SimplexCell::point(RationalPoint(vec![q2(3, 8)])), seg1(0, 1), q(-1)),
            ],
        )
        .unwrap();
        assert!(two.dyadic_collapse(1).unwrap().is_zero());
        // negative coordinates floor downwards
        let neg = TensorChain::from_terms((1, 1), TypeIndex::new(0, 0), Z, [(SimplexCell::point(RationalPoint(vec![q2(-1, 3)])), pt(&[0]), q(1))]).unwrap();
        let (a, _, _) = neg.dyadic_collapse(1).unwrap().terms().next().map(|(a, b, g)| (a.clone(), b.clone(), g.clone())).unwrap();
        assert_eq!(a.vertices()[0].0, vec![q2(-1, 2)]);
    }

    fn cell(n: usize, k: usize) -> impl Strategy<Value = SimplexCell> {
        prop::collection::vec(prop::collection::vec(-3i64..4, n), k + 1)
            .prop_filter_map("degenerate", |vs| SimplexCell::new(vs.iter().map(|v| RationalPoint::from_ints(v)).collect()).ok())
    }

    fn tensor(n1: usize, n2: usize, k1: usize, k2: usize) -> impl Strategy<Value = TensorChain> {
        prop::collection::vec((cell(n1, k1), cell(n2, k2), -3i64..4), 1..4).prop_map(move |v| {
            TensorChain::from_terms((n1, n2), TypeIndex::new(k1, k2), Z, v.into_iter().map(|(a, b, g)| (a, b, q(g)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn tensor_identities(t in tensor(2, 2, 1, 2)) {
            prop_assert!(t.d2().unwrap().d2().unwrap().is_zero());
            prop_assert_eq!(t.d1().unwrap().d2().unwrap(), t.d2().unwrap().d1().unwrap().neg());
            let e = t.embed();
            let rhs = t.d1().unwrap().embed().add(&t.d2().unwrap().embed()).unwrap();
            prop_assert_eq!(e.boundary().unwrap(), rhs);
            prop_assert_eq!(t.i_map().i_inverse(), t.clone());
        }

        #[test]
        fn j_of_embed_is_identity(t in tensor(2, 1, 1, 1)) {
            let j = j_decompose(&t.embed(), 2).unwrap();
            if t.is_zero() {
                prop_assert!(j.is_empty());
            } else {
                prop_assert_eq!(j, BTreeMap::from([(t.type_index(), t)]));
            }
        }

        #[test]
        fn factor_slices_follow_partial_boundaries(t in tensor(2, 2, 1, 2), a in -20i64..20, b in -20i64..20) {
            let x = |n: i64| q2(n, 7) + q2(1, 1009);
            let spec = SliceSpec { gamma: vec![0, 3], point: RationalPoint(vec![x(a), x(b)]) };
            let s = t.slice(&spec).unwrap();
            // (−1)^{|γ¹|} on ∂₂
            prop_assert_eq!(s.d2().unwrap(), t.d2().unwrap().slice(&spec).unwrap().neg());
            // Sl_{0}: ∂₁Sl = Sl∂₁ is only meaningful when a first factor survives; use γ = {3}
            let spec2 = SliceSpec { gamma: vec![3], point: RationalPoint(vec![x(b)]) };
            prop_assert_eq!(t.slice(&spec2).unwrap().d1().unwrap(), t.d1().unwrap().slice(&spec2).unwrap());
        }
    }
}
