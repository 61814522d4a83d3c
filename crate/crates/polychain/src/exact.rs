//! Exact rationals, certified floating intervals and sums of square roots.
//!
//! Every quantity in the library is an exact [`Q`]. Square roots (volumes,
//! lengths) are carried as [`SurdSum`] values when the radicands can be
//! factored, and always as an enclosing [`Interval`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as an exact rational")]
pub struct ParseRationalError(pub String);

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q2(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"p/q"`, decimals such as `"-0.375"` and `"1.5e-3"`.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let joined = format!("{}{}", int_part, frac_part);
    let mut n: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().map_err(|_| err())? };
    if negative {
        n = -n;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Q::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(x: &Q) -> String {
    x.to_string()
}

pub fn two_pow(j: i32) -> Q {
    if j >= 0 {
        Q::from_integer(BigInt::one() << j as usize)
    } else {
        Q::new(BigInt::one(), BigInt::one() << (-j) as usize)
    }
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Closed interval of `f64` known to contain a real number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn exact_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(0.0)
    }

    /// Tightest pair of adjacent floats enclosing `x`.
    pub fn from_rational(x: &Q) -> Self {
        let approx = x.to_f64().unwrap_or(f64::NAN);
        if !approx.is_finite() {
            return Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
        }
        let mut lo = approx;
        while exact_f64(lo) > *x {
            lo = lo.next_down();
        }
        let mut hi = approx;
        while exact_f64(hi) < *x {
            hi = hi.next_up();
        }
        Interval { lo, hi }
    }

    /// Enclosure of `√x` for `x ≥ 0`, endpoints verified by exact squaring.
    pub fn sqrt_of(x: &Q) -> Self {
        assert!(!x.is_negative(), "square root of a negative rational");
        if x.is_zero() {
            return Interval::zero();
        }
        let approx = x.to_f64().unwrap_or(f64::NAN).sqrt();
        if !approx.is_finite() {
            return Interval { lo: 0.0, hi: f64::INFINITY };
        }
        let mut lo = approx.next_down().max(0.0);
        while lo > 0.0 && {
            let l = exact_f64(lo);
            &l * &l > *x
        } {
            lo = lo.next_down().max(0.0);
        }
        let mut hi = approx.next_up();
        while {
            let h = exact_f64(hi);
            &h * &h < *x
        } {
            hi = hi.next_up();
        }
        Interval { lo, hi }
    }

    pub fn add(self, other: Interval) -> Interval {
        Interval { lo: (self.lo + other.lo).next_down(), hi: (self.hi + other.hi).next_up() }
    }

    pub fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, other: Interval) -> Interval {
        let products = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi];
        let lo = products.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == 0.0 && hi == 0.0 {
            return Interval::zero();
        }
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: &Q) -> bool {
        exact_f64(self.lo) <= *x && *x <= exact_f64(self.hi)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// Trial-division bound used when extracting square factors.
const TRIAL_LIMIT: u64 = 1 << 20;

/// Splits `n > 0` as `s² · r` with `r` squarefree. `None` if a cofactor
/// above the trial-division range could not be classified.
pub fn squarefree_decompose(n: &BigUint) -> Option<(BigUint, BigUint)> {
    assert!(!n.is_zero());
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p: u64 = 2;
    while p < TRIAL_LIMIT {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            square *= num_traits::pow(pb.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some((square, free));
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        return Some((square * root, free));
    }
    let limit = BigUint::from(TRIAL_LIMIT);
    if rest < &limit * &limit {
        // no factor below its square root: prime
        return Some((square, free * rest));
    }
    None
}

/// Exact element of the field ℚ(√r₁, √r₂, …): a rational combination of
/// square roots of distinct squarefree positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SurdSum {
    terms: BTreeMap<BigUint, Q>,
}

impl SurdSum {
    pub fn zero() -> Self {
        SurdSum::default()
    }

    pub fn rational(x: Q) -> Self {
        let mut s = SurdSum::zero();
        s.push(BigUint::one(), x);
        s
    }

    fn push(&mut self, radicand: BigUint, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(radicand.clone()).or_insert_with(Q::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    /// `√x` as an exact surd, when the radicand factors.
    pub fn sqrt(x: &Q) -> Option<Self> {
        assert!(!x.is_negative(), "square root of a negative rational");
        if x.is_zero() {
            return Some(SurdSum::zero());
        }
        let n = x.numer().to_biguint()?;
        let d = x.denom().to_biguint()?;
        // √(n/d) = √(n·d)/d
        let (s, r) = squarefree_decompose(&(n * &d))?;
        let coeff = Q::new(BigInt::from_biguint(Sign::Plus, s), BigInt::from_biguint(Sign::Plus, d));
        let mut out = SurdSum::zero();
        out.push(r, coeff);
        Some(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Q)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.push(r.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SurdSum {
        SurdSum { terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &SurdSum) -> SurdSum {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Q) -> SurdSum {
        if k.is_zero() {
            return SurdSum::zero();
        }
        SurdSum { terms: self.terms.iter().map(|(r, c)| (r.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &SurdSum) -> SurdSum {
        let mut out = SurdSum::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                // √r₁·√r₂ = g·√(r₁r₂/g²) with g = gcd(r₁, r₂), both squarefree
                let g = r1.gcd(r2);
                let radicand = (r1 / &g) * (r2 / &g);
                let coeff = c1 * c2 * Q::from_integer(BigInt::from_biguint(Sign::Plus, g));
                out.push(radicand, coeff);
            }
        }
        out
    }

    pub fn interval(&self) -> Interval {
        self.terms.iter().fold(Interval::zero(), |acc, (r, c)| {
            let root = Interval::sqrt_of(&Q::from_integer(BigInt::from_biguint(Sign::Plus, r.clone())));
            acc.add(Interval::from_rational(c).mul(root))
        })
    }

    /// Rational enclosure with `bits` of fractional precision per radical.
    fn rational_bounds(&self, bits: usize) -> (Q, Q) {
        let scale = BigUint::one() << bits;
        let mut lo = Q::zero();
        let mut hi = Q::zero();
        for (r, c) in &self.terms {
            let scaled = r * &scale * &scale;
            let floor = scaled.sqrt();
            let ceil = if &floor * &floor == scaled { floor.clone() } else { &floor + 1u32 };
            let den = BigInt::from_biguint(Sign::Plus, scale.clone());
            let f = Q::new(BigInt::from_biguint(Sign::Plus, floor), den.clone());
            let g = Q::new(BigInt::from_biguint(Sign::Plus, ceil), den);
            if c.is_negative() {
                lo += c * &g;
                hi += c * &f;
            } else {
                lo += c * &f;
                hi += c * &g;
            }
        }
        (lo, hi)
    }

    /// Exact sign: zero is recognised structurally (square roots of distinct
    /// squarefree integers are linearly independent over ℚ); otherwise the
    /// enclosure is refined until it excludes zero.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = self.rational_bounds(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    pub fn cmp_exact(&self, other: &SurdSum) -> Ordering {
        self.sub(other).signum()
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, c)| {
                if r.is_one() {
                    format!("{}", c)
                } else if c.is_one() {
                    format!("sqrt({})", r)
                } else {
                    format!("{}*sqrt({})", c, r)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A real number known exactly when `exact` is present, and always
/// enclosed by `interval`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedReal {
    pub exact: Option<SurdSum>,
    pub interval: Interval,
}

impl CertifiedReal {
    pub fn zero() -> Self {
        CertifiedReal { exact: Some(SurdSum::zero()), interval: Interval::zero() }
    }

    pub fn rational(x: &Q) -> Self {
        CertifiedReal { exact: Some(SurdSum::rational(x.clone())), interval: Interval::from_rational(x) }
    }

    /// `c·√x`.
    pub fn scaled_sqrt(c: &Q, x: &Q) -> Self {
        let exact = SurdSum::sqrt(x).map(|s| s.scale(c));
        let interval = match &exact {
            Some(s) => s.interval(),
            None => Interval::from_rational(c).mul(Interval::sqrt_of(x)),
        };
        CertifiedReal { exact, interval }
    }

    pub fn add(&self, other: &CertifiedReal) -> CertifiedReal {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        let interval = match &exact {
            Some(s) => s.interval(),
            None => self.interval.add(other.interval),
        };
        CertifiedReal { exact, interval }
    }

    pub fn mul(&self, other: &CertifiedReal) -> CertifiedReal {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        let interval = match &exact {
            Some(s) => s.interval(),
            None => self.interval.mul(other.interval),
        };
        CertifiedReal { exact, interval }
    }

    pub fn scale(&self, k: &Q) -> CertifiedReal {
        let exact = self.exact.as_ref().map(|s| s.scale(k));
        let interval = match &exact {
            Some(s) => s.interval(),
            None => self.interval.mul(Interval::from_rational(k)),
        };
        CertifiedReal { exact, interval }
    }

    pub fn as_rational(&self) -> Option<Q> {
        self.exact.as_ref().and_then(|s| s.as_rational())
    }

    /// Exact equality when both sides are exact; `None` when undecidable
    /// from the enclosures.
    pub fn equals(&self, other: &CertifiedReal) -> Option<bool> {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a == b),
            _ => {
                if self.interval.hi < other.interval.lo || other.interval.hi < self.interval.lo {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    /// `self ≤ other`, decided exactly or from disjoint enclosures.
    pub fn le(&self, other: &CertifiedReal) -> Option<bool> {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.cmp_exact(b) != Ordering::Greater),
            _ => {
                if self.interval.hi <= other.interval.lo {
                    Some(true)
                } else if self.interval.lo > other.interval.hi {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(s) => write!(f, "{} in {}", s, self.interval),
            None => write!(f, "{}", self.interval),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), q2(3, 4));
        assert_eq!(parse_rational("-0.375").unwrap(), q2(-3, 8));
        assert_eq!(parse_rational("7").unwrap(), q(7));
        assert_eq!(parse_rational("1.5e-3").unwrap(), q2(3, 2000));
        assert_eq!(parse_rational(".5").unwrap(), q2(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_integers_without_denominator() {
        assert_eq!(format_rational(&q(1)), "1");
        assert_eq!(format_rational(&q2(-6, 4)), "-3/2");
    }

    #[test]
    fn sqrt_interval_encloses() {
        let two = q(2);
        let iv = Interval::sqrt_of(&two);
        assert!(iv.lo >= 1.41421356 && iv.hi <= 1.41421357);
        assert!(iv.width() < 1e-15);
        let lo = exact_f64(iv.lo);
        let hi = exact_f64(iv.hi);
        assert!(&lo * &lo <= two && &hi * &hi >= two);
    }

    #[test]
    fn squarefree_parts() {
        let (s, r) = squarefree_decompose(&BigUint::from(72u32)).unwrap();
        assert_eq!((s, r), (BigUint::from(6u32), BigUint::from(2u32)));
        let (s, r) = squarefree_decompose(&BigUint::from(1_000_003u64 * 1_000_003u64 * 7)).unwrap();
        assert_eq!((s, r), (BigUint::from(1_000_003u64), BigUint::from(7u32)));
    }

    #[test]
    fn surd_arithmetic() {
        let r5 = SurdSum::sqrt(&q(5)).unwrap();
        assert_eq!(r5.mul(&r5).as_rational(), Some(q(5)));
        let half_r20 = SurdSum::sqrt(&q2(20, 4)).unwrap();
        assert_eq!(half_r20, r5);
        let r2 = SurdSum::sqrt(&q(2)).unwrap();
        let r3 = SurdSum::sqrt(&q(3)).unwrap();
        // √2 + √3 ≈ 3.146 < √10 ≈ 3.162
        let s = r2.add(&r3);
        assert_eq!(s.cmp_exact(&SurdSum::sqrt(&q(10)).unwrap()), Ordering::Less);
        assert_eq!(r2.mul(&r3), SurdSum::sqrt(&q(6)).unwrap());
    }

    #[test]
    fn signum_of_nearly_cancelling_sum() {
        // √(10^12 + 1) − 10^6 > 0 but tiny
        let big = SurdSum::sqrt(&Q::from_integer(BigInt::from(1_000_000_000_001u64))).unwrap();
        let diff = big.sub(&SurdSum::rational(q(1_000_000)));
        assert_eq!(diff.signum(), Ordering::Greater);
    }
}
